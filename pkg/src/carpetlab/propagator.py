"""Time evolution in the box, its Green's function, and the line structure
of the two-point kernel.

``evolve`` sums the signed-index series

    psi(x, t) = 1/(i sqrt(2L)) sum_m psi_m exp[i pi m (x/L - 2 m t/T)]

in ascending ``m`` with compensated accumulation.  All phases are reduced
in units of pi before the trigonometric calls, so ``t = T`` reproduces
``t = 0`` to rounding and the walls are exact nodes.

The pair function ``D(eta; zeta)`` and its Dirichlet-kernel resummation
are provided at matched finite truncation; their difference is pure
rounding.
"""
from dataclasses import dataclass
import enum
import math

import numpy as np

from .boxmodel import BoxConfig
from ._numerics import (CompensatedSum, expipi, reduce_turns, reduce_turns_dd,
                        renorm_turns, sinpi_dd, two_sum, wrap2)

TERM_CLASSES = ("sum-plus", "sum-minus", "diff-plus", "diff-minus")
DIRICHLET_SINGULAR = 1e-12


def _phase_turns(m, xi, tau):
    """(m xi - 2 m**2 tau) mod 2, reduced termwise."""
    return wrap2(reduce_turns(m, xi) - reduce_turns(2 * m * m, tau))


def evolve(state, cfg, x, t):
    """Wavefunction ``psi(x, t)`` from a :class:`~carpetlab.wavepacket.SpectralState`.

    ``x`` and ``t`` broadcast against each other.
    """
    xi = cfg.xi(x)
    tau = cfg.tau(t)
    xi, tau = np.broadcast_arrays(xi, tau)
    acc = CompensatedSum(np.zeros(xi.shape, dtype=complex))
    for m, c in zip(state.indices, state.coefficients):
        if c == 0:
            continue
        acc.add(c * expipi(_phase_turns(m, xi, tau)))
    psi = acc.result() / (1j * math.sqrt(2.0 * cfg.length))
    return psi if psi.ndim else complex(psi)


def probability_direct(state, cfg, x, t):
    """W(x, t) = |psi(x, t)|**2 by direct eigenmode summation."""
    psi = np.asarray(evolve(state, cfg, x, t))
    w = psi.real ** 2 + psi.imag ** 2
    w = np.where((w < 0.0) & (w > -1e-15), 0.0, w)
    return w if w.ndim else float(w)


def green_truncated(cfg, x, t, x_source, m_max):
    """Truncated Green's function ``G(x, t | x')`` summed over ``|m| <= m_max``.

    The full series is a distribution in ``x'``; pointwise values here
    depend on ``m_max`` and only integrals against smooth packets are
    meaningful.
    """
    xi = cfg.xi(x)
    tau = cfg.tau(t)
    src = cfg.xi(x_source)
    xi, tau, src = np.broadcast_arrays(xi, tau, src)
    acc = CompensatedSum(np.zeros(xi.shape, dtype=complex))
    for m in range(-m_max, m_max + 1):
        p = _phase_turns(m, xi, tau)
        s = reduce_turns(m, src)
        acc.add(expipi(wrap2(p - s)) - expipi(wrap2(p + s)))
    g = acc.result() / (2.0 * cfg.length)
    return g if g.ndim else complex(g)


@dataclass(frozen=True)
class ChiValue:
    """chi_{n,l}(x, t) = x/L - n t/(T/2) - l with its ingredients."""

    value: float
    x_over_L: float
    t_over_half_T: float
    n: int
    l: int


def chi_array(n, l, xi, tau):
    """Vectorized chi in box units (``xi = x/L``, ``tau = t/T``)."""
    return xi - 2.0 * n * tau - l


def chi(n, l, x, t, cfg=BoxConfig()):
    """Spacetime line coordinate ``chi_{n,l}(x, t)``; zero on the line."""
    xi = float(x) / cfg.length
    th = float(t) / cfg.half_revival
    return ChiValue(xi - n * th - l, xi, th, int(n), int(l))


@dataclass(frozen=True)
class LineFamily:
    """One of the four delta-line families of the kernel for given (n, l)."""

    n: int
    l: int
    term_class: str

    def __post_init__(self):
        if self.term_class not in TERM_CLASSES:
            raise ValueError(f"unknown term class {self.term_class!r}")

    @property
    def parity_weight(self):
        return -1 if (self.n * self.l) % 2 else 1


def kernel_lines(n, l, x1, x2, cfg=BoxConfig()):
    """The four delta-line terms of ``K(x, t | x1, x2)`` for one ``(n, l)``.

    Returns a list of ``(family, weight, offset)``: the kernel contains
    ``weight / (4 L**2) * delta(chi_{n,l}(x, t) - offset)`` for each entry.
    """
    sp = (x1 + x2) / (2.0 * cfg.length)
    sm = (x1 - x2) / (2.0 * cfg.length)
    par = -1 if (n * l) % 2 else 1
    ph_m = complex(expipi(reduce_turns(n, sm)))
    ph_p = complex(expipi(reduce_turns(n, sp)))
    return [
        (LineFamily(n, l, "sum-plus"), par * ph_m, sp),
        (LineFamily(n, l, "sum-minus"), par * ph_m.conjugate(), -sp),
        (LineFamily(n, l, "diff-plus"), -par * ph_p, sm),
        (LineFamily(n, l, "diff-minus"), -par * ph_p.conjugate(), -sm),
    ]


class LineMarker(enum.Enum):
    """Returned instead of a time for lines that never cross a wall."""

    VERTICAL = "vertical"


def wall_crossing_times(n, l, s, sign=None, cfg=BoxConfig()):
    """Time at which line ``(n, l)`` meets the left wall ``x = 0``.

    ``t / (T/2) = (sign * s - l) / n`` where ``s`` is the dimensionless
    source sum ``(x' + x'')/2L`` or difference ``(x' - x'')/2L`` and
    ``sign = -1`` belongs to the family ``delta(chi - s)``.  With
    ``sign=None`` both branches are returned as ``(minus, plus)``.
    ``n = 0`` lines are vertical and give :attr:`LineMarker.VERTICAL`.
    """
    if n == 0:
        return LineMarker.VERTICAL if sign is not None else (LineMarker.VERTICAL,) * 2
    if sign is None:
        return (wall_crossing_times(n, l, s, -1, cfg),
                wall_crossing_times(n, l, s, +1, cfg))
    if sign not in (-1, 1):
        raise ValueError("sign must be -1, +1 or None")
    return cfg.half_revival * (sign * s - l) / n


# -- pair function D and its resummation ------------------------------------

def _truncation(K):
    if np.ndim(K) == 0:
        return int(K), int(K)
    km, kk = K
    return int(km), int(kk)


def d_index_pairs(K=24):
    """(m', m'') pairs covered by the rectangle ``|m| <= K_m, |k| <= K_k``.

    Both parity branches are included: ``m' + m'' = 2m, m' - m'' = 2k`` and
    ``m' + m'' = 2m + 1, m' - m'' = 2k + 1``.  Sorted ascending.
    """
    km, kk = _truncation(K)
    pairs = []
    for m in range(-km, km + 1):
        for k in range(-kk, kk + 1):
            pairs.append((m + k, m - k))
            pairs.append((m + k + 1, m - k))
    return sorted(pairs)


def d_pair_sum_truncated(eta, zeta, xi, tau, K=24, n=None):
    """Direct double sum for ``D(eta; zeta)`` over :func:`d_index_pairs`.

    ``n`` restricts the sum to the diagonal ``m' + m'' = n``.
    Arguments broadcast.
    """
    eta, zeta, xi, tau = np.broadcast_arrays(*(np.asarray(a, dtype=float)
                                              for a in (eta, zeta, xi, tau)))
    acc = CompensatedSum(np.zeros(eta.shape, dtype=complex))
    for m1, m2 in d_index_pairs(K):
        p, q = m1 + m2, m1 - m2
        if n is not None and p != n:
            continue
        turns = (reduce_turns(p, eta) - reduce_turns(q, xi) - reduce_turns(q, zeta)
                 + reduce_turns(2 * p * q, tau))
        acc.add(expipi(wrap2(turns)))
    d = acc.result()
    return d if d.ndim else complex(d)


def dirichlet_kernel(theta, K, theta_lo=0.0):
    """``sum_{k=-K}^{K} exp(-2 pi i k theta) = sin((2K+1) pi theta) / sin(pi theta)``.

    ``theta_lo`` optionally carries the low-order part of ``theta``.  Near
    integer ``theta`` (``|sin(pi theta)| < 1e-12``) the removable limit
    ``2K + 1`` is returned.
    """
    hi, lo = renorm_turns(np.asarray(theta, dtype=float), np.asarray(theta_lo, dtype=float))
    den = sinpi_dd(hi, lo)
    p = 2 * K + 1
    nh, nl = reduce_turns_dd(p, hi)
    num = sinpi_dd(nh, nl + p * lo)
    singular = np.abs(den) < DIRICHLET_SINGULAR
    safe = np.where(singular, 1.0, den)
    return np.where(singular, float(p), num / safe)


def _theta_dd(xi, zeta, tau, n):
    """theta = xi + zeta - 2 n tau (mod 2) as a (hi, lo) pair."""
    c_hi, c_lo = reduce_turns_dd(2 * n, tau)
    s, e1 = two_sum(xi, zeta)
    s, e2 = two_sum(s, -c_hi)
    return renorm_turns(s, (e1 + e2) - c_lo)


def d_resummed_truncated(eta, zeta, xi, tau, K=24, n=None):
    """``D(eta; zeta)`` with the inner k-sum done as a Dirichlet kernel.

    Same index set as :func:`d_pair_sum_truncated`; per slope index
    ``n = m' + m''`` the contribution is

        exp(i pi n eta) * [exp(-i pi theta) if n odd] * D_K(theta),
        theta = xi - 2 n tau + zeta.
    """
    eta, zeta, xi, tau = np.broadcast_arrays(*(np.asarray(a, dtype=float)
                                              for a in (eta, zeta, xi, tau)))
    km, kk = _truncation(K)
    acc = CompensatedSum(np.zeros(eta.shape, dtype=complex))
    for nn in range(-2 * km, 2 * km + 2):
        if n is not None and nn != n:
            continue
        th, tl = _theta_dd(xi, zeta, tau, nn)
        term = expipi(reduce_turns(nn, eta)) * dirichlet_kernel(th, kk, tl)
        if nn % 2:
            term = term * expipi(-th)
        acc.add(term)
    d = acc.result()
    return d if d.ndim else complex(d)


def kernel_d_arguments(x1, x2, cfg=BoxConfig()):
    """The four ``(sign, eta, zeta)`` argument patterns of the kernel.

    ``K = 1/(4 L**2) * sum(sign * D(eta; zeta))``.
    """
    sp = (x1 + x2) / (2.0 * cfg.length)
    sm = (x1 - x2) / (2.0 * cfg.length)
    return [(+1, sm, -sp), (+1, -sm, sp), (-1, sp, -sm), (-1, -sp, sm)]
