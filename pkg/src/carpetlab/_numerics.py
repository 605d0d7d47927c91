"""Low-level numerics shared by the evaluators.

Two concerns live here:

* phases measured in units of pi, reduced modulo 2 without losing the
  fractional part when an integer index multiplies a float coordinate;
* compensated (error-carrying) accumulation over numpy arrays, so that
  long sums are reproducible and accurate to a few ulps.
"""
import numpy as np

# x is split as x_hi + x_lo with x_hi on a 2**-SPLIT_BITS grid, so that
# p * x_hi is exact for |p| * |x| < 2**(52 - SPLIT_BITS).
_SPLIT_BITS = 26
_SPLIT = float(2 ** _SPLIT_BITS)


def wrap2(r):
    """Map phase turns (units of pi) into [-1, 1)."""
    r = np.asarray(r, dtype=float)
    return r - 2.0 * np.floor((r + 1.0) * 0.5)


def reduce_turns(p, x):
    """Return ``p * x`` modulo 2, in [-1, 1), for integer ``p``.

    ``p * x`` is formed as ``p * x_hi + p * x_lo`` where the first product
    is exact and is reduced with the (exact) ``fmod`` before the small
    remainder is added.  The result is accurate to a few ulps of 1 even
    when ``p * x`` is in the thousands.
    """
    p = np.asarray(p, dtype=float)
    x = np.asarray(x, dtype=float)
    x_hi = np.round(x * _SPLIT) / _SPLIT
    x_lo = x - x_hi
    r = np.fmod(p * x_hi, 2.0) + p * x_lo
    return wrap2(r)


def sinpi(r):
    """sin(pi * r), exactly zero at integer ``r``."""
    r = wrap2(r)
    a = np.abs(r)
    a = np.minimum(a, 1.0 - a)
    return np.copysign(np.sin(np.pi * a), r)


def cospi(r):
    """cos(pi * r), exactly zero at half-integer ``r``."""
    r = wrap2(r)
    b = 0.5 - np.abs(r)
    return np.sin(np.pi * b)


def expipi(r):
    """exp(i * pi * r) built from :func:`cospi` and :func:`sinpi`."""
    return cospi(r) + 1j * sinpi(r)


def two_sum(a, b):
    """Error-free transformation ``a + b = s + e`` (Knuth, branch free)."""
    s = a + b
    bb = s - a
    e = (a - (s - bb)) + (b - bb)
    return s, e


class CompensatedSum:
    """Running elementwise sum with a carried rounding-error term.

    Works for real or complex arrays (complex addition is componentwise,
    so the error-free transformation applies to each part).  Terms are
    folded in the order they are added; the same order always gives the
    same bits.

    >>> acc = CompensatedSum(0.0)
    >>> for v in (1e16, 1.0, -1e16):
    ...     acc.add(v)
    >>> float(acc.result())
    1.0
    """

    def __init__(self, like=0.0):
        zero = np.zeros_like(np.asarray(like))
        self._s = zero.copy()
        self._c = zero.copy()

    def add(self, term):
        term = np.asarray(term)
        if np.iscomplexobj(term) and not np.iscomplexobj(self._s):
            self._s = self._s.astype(complex)
            self._c = self._c.astype(complex)
        self._s, e = two_sum(self._s, term)
        self._c = self._c + e

    def result(self):
        return self._s + self._c


def compensated_sum(terms, like=0.0):
    """Sum an iterable of arrays with :class:`CompensatedSum`."""
    acc = CompensatedSum(like)
    for t in terms:
        acc.add(t)
    return acc.result()


def reduce_turns_dd(p, x):
    """Like :func:`reduce_turns` but returns ``(hi, lo)`` with ``hi`` exact.

    ``hi`` is the exactly reduced leading product and ``lo`` the small
    remainder ``p * x_lo``, so ``hi + lo`` carries about twice the
    precision of a single double.
    """
    p = np.asarray(p, dtype=float)
    x = np.asarray(x, dtype=float)
    x_hi = np.round(x * _SPLIT) / _SPLIT
    return np.fmod(p * x_hi, 2.0), p * (x - x_hi)


def renorm_turns(hi, lo):
    """Fold ``hi + lo`` into ``[-1, 1)`` as a normalized pair."""
    s, e = two_sum(hi, lo)
    s = s - 2.0 * np.floor((s + 1.0) * 0.5)
    return two_sum(s, e)


def sinpi_dd(hi, lo):
    """sin(pi * (hi + lo)) to first order in the small part."""
    s, e = renorm_turns(hi, lo)
    return sinpi(s) + np.pi * e * cospi(s)
