"""Carpet evaluators built on the spacetime lines chi_{n,l}.

For a Gaussian packet the density is a double sum over lines,

    W(x, t) = 1/(2L) sum_{n,l} (-1)**(n l) { classical + mirror - interference },

with Gaussian envelopes in the line coordinate and in ``kappa_n = n pi/(2L)``.
:func:`carpet_gaussian` evaluates that closed form,
:func:`carpet_factorized` the general factorized form (using the Fourier
factors of ``plus`` and ``minus``), and :func:`trace_catalog` lists the
lines that carry visible weight.

Per point the sum runs over ``n`` ascending, then ``l`` ascending, with
compensated accumulation.  Lines whose Gaussian factor in ``chi`` is below
``exp(-27**2)`` (it underflows to a subnormal) are skipped; this changes
no bits of any sum of order-one terms.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import math

import numpy as np

from .propagator import chi_array, probability_direct
from .wavepacket import (GaussianPacket, SpectralState, expand, factorize,
                         fourier_factor)
from ._numerics import CompensatedSum, cospi, reduce_turns

#: Gaussians exp(-u**2) with |u| beyond this are below 1e-316
CUTOFF = 27.0
EVALUATORS = ("direct", "gaussian-lines", "factorized")
TERM_CLASS_ORDER = {"classical": 0, "mirror": 1, "interference": 2}


def default_truncations(packet, t_max):
    """Default ``(n_max, l_max)`` for times up to ``t_max``.

    Accepts a :class:`GaussianPacket` or its :class:`FactorizedPair`.

    ``n_max`` covers every ``kappa_n`` within eight envelope widths of
    ``|kbar|``; ``l_max`` covers every line crossing the strip up to
    ``t_max``.
    """
    L = packet.box.length
    n_max = math.ceil((abs(packet.wavenumber) + 8.0 / packet.width)
                      * 2.0 * L / math.pi)
    l_max = math.ceil(abs(t_max) / packet.box.half_revival * n_max) + 2
    return n_max, l_max


def tail_bound(packet, n_max, l_max):
    """Upper bound on ``|W|`` dropped by truncating at ``(n_max, l_max)``.

    Every dropped slope index ``|n| > n_max`` contributes at most
    ``4 E_n (1 + sqrt(pi) dx/L) / (2L)`` per sign of ``n``, with
    ``E_n = exp(-((kappa_n - |kbar|) dx)**2)`` bounding all three envelopes
    and the bracket bounding the sum of one line family over ``l``.  The
    image term ``exp(-((l_max L - L - xbar)/dx)**2)`` covers dropped ``l``.
    """
    L = packet.box.length
    k0 = abs(packet.wavenumber)
    dx = packet.width
    per_family = 1.0 + math.sqrt(math.pi) * dx / L
    tail = 0.0
    n = n_max + 1
    while True:
        kappa = n * math.pi / (2.0 * L)
        a = max(kappa - k0, 0.0) * dx
        e = math.exp(-a * a)
        tail += e
        if kappa > k0 and (e < 1e-300 or e < 1e-17 * tail):
            break
        n += 1
    n_part = 2.0 * 4.0 * tail * per_family / (2.0 * L)
    b = max(l_max * L - L - packet.center, 0.0) / dx
    return n_part + math.exp(-b * b)


def modulation_factor(packet, n, chi=0.0):
    """``cos(2 (kbar L chi - kappa_n xbar))`` of the interference term.

    Evaluated in units of pi, so with ``kbar = 0`` and ``n xbar / L`` a
    half-integer the result is exactly zero.
    """
    L = packet.box.length
    q = packet.wavenumber * L
    turns = 2.0 * q / math.pi * np.asarray(chi, dtype=float) - reduce_turns(n, packet.center / L)
    out = cospi(turns)
    return out if out.ndim else float(out)


def _l_windows(lo, hi, l_max):
    """Yield ``(l, mask)`` covering per-point ranges ``lo <= l <= hi``."""
    lo = np.maximum(lo, -l_max)
    hi = np.minimum(hi, l_max)
    if lo.size == 0:
        return
    span = int(np.max(hi - lo)) if np.any(hi >= lo) else -1
    for d in range(span + 1):
        l = lo + d
        yield l, l <= hi


def _prepare(cfg, x, t):
    xi, tau = np.broadcast_arrays(cfg.xi(x), cfg.tau(t))
    return np.asarray(xi, dtype=float), np.asarray(tau, dtype=float)


def _resolve(packet, t, n_max, l_max):
    auto_n, auto_l = default_truncations(packet, np.max(np.abs(t)) if np.size(t) else 0.0)
    return (auto_n if n_max is None else int(n_max),
            auto_l if l_max is None else int(l_max))


def _gaussian_line_sums(packet, cfg, x, t, n_max, l_max, n_values=None):
    """Accumulate the three line-sum parts; returns four arrays
    ``(classical, mirror, interference, total)`` without the 1/(2L)."""
    L = cfg.length
    xi, tau = _prepare(cfg, x, t)
    a = packet.center / L
    delta = packet.width / L
    q = packet.wavenumber * L
    two_q_turns = 2.0 * q / math.pi
    w = CUTOFF * delta
    zero = np.zeros(xi.shape)
    acc = {k: CompensatedSum(zero) for k in ("classical", "mirror", "interference", "total")}
    for n in range(-n_max, n_max + 1):
        if n_values is not None and n not in n_values:
            continue
        half_n_pi = 0.5 * n * math.pi
        env_c = math.exp(-((half_n_pi - q) * delta) ** 2)
        env_m = math.exp(-((half_n_pi + q) * delta) ** 2)
        env_i = 2.0 * math.exp(-(half_n_pi * delta) ** 2)
        offset = float(reduce_turns(n, a))
        base = chi_array(n, 0, xi, tau)
        lo = np.ceil(base - a - w).astype(np.int64)
        hi = np.floor(base + a + w).astype(np.int64)
        for l, mask in _l_windows(lo, hi, l_max):
            c = base - l
            par = 1.0 - 2.0 * ((n * l) & 1)
            g_c = env_c * np.exp(-((c - a) / delta) ** 2)
            g_m = env_m * np.exp(-((c + a) / delta) ** 2)
            g_i = env_i * np.exp(-(c / delta) ** 2) * cospi(two_q_turns * c - offset)
            g_c = np.where(mask, par * g_c, 0.0)
            g_m = np.where(mask, par * g_m, 0.0)
            g_i = np.where(mask, -par * g_i, 0.0)
            acc["classical"].add(g_c)
            acc["mirror"].add(g_m)
            acc["interference"].add(g_i)
            acc["total"].add(g_c + g_m + g_i)
    return tuple(acc[k].result() for k in ("classical", "mirror", "interference", "total"))


def _scalar(arr):
    return arr if arr.ndim else float(arr)


def carpet_gaussian(packet, cfg, x, t, n_max=None, l_max=None):
    """W(x, t) for a Gaussian packet from the closed-form line sum.

    Parameters
    ----------
    packet : GaussianPacket
    cfg : BoxConfig
    x, t : float or array_like
        Broadcast against each other.
    n_max, l_max : int, optional
        Truncation of the slope and image indices; defaults from
        :func:`default_truncations` using the largest ``|t|``.

    Returns
    -------
    float or np.ndarray
    """
    n_max, l_max = _resolve(packet, t, n_max, l_max)
    *_, total = _gaussian_line_sums(packet, cfg, x, t, n_max, l_max)
    return _scalar(total / (2.0 * cfg.length))


def term_decomposition(packet, cfg, x, t, n_max=None, l_max=None, n_values=None):
    """Split the line sum into ``(classical, mirror, interference)`` parts.

    The three parts add up to :func:`carpet_gaussian`.  ``n_values``
    restricts the slope index, e.g. ``{1}`` isolates the main diagonal
    family.
    """
    n_max, l_max = _resolve(packet, t, n_max, l_max)
    if n_values is not None:
        n_values = set(n_values)
    c, m, i, _ = _gaussian_line_sums(packet, cfg, x, t, n_max, l_max, n_values)
    s = 1.0 / (2.0 * cfg.length)
    return _scalar(c * s), _scalar(m * s), _scalar(i * s)


def carpet_factorized(pair, cfg, x, t, n_max=None, l_max=None, full_output=False):
    """W(x, t) from the general factorized line sum.

    Each line ``(n, l)`` contributes

        1/2 (-1)**(n l) { F-(kappa_n) [plus(2L chi(x)) + plus(2L chi(-x))]
                        - F+(kappa_n) [minus(2L chi(x)) + minus(2L chi(-x))] }

    where ``F+-`` are the Fourier factors of the pair.  The assembled sum
    is complex only through rounding; with ``full_output=True`` the
    discarded imaginary part is returned as well.
    """
    n_max, l_max = _resolve(pair, t, n_max, l_max)
    L = cfg.length
    xi, tau = _prepare(cfg, x, t)
    cp, wp = pair.plus_window(CUTOFF)
    cm, wm = pair.minus_window(CUTOFF)
    chi_lo = min(cp - wp, cm - wm) / (2.0 * L)
    chi_hi = max(cp + wp, cm + wm) / (2.0 * L)
    acc = CompensatedSum(np.zeros(xi.shape, dtype=complex))
    for n in range(-n_max, n_max + 1):
        f_minus = complex(fourier_factor(pair, "-", n, cfg))
        f_plus = complex(fourier_factor(pair, "+", n, cfg))
        b1 = chi_array(n, 0, xi, tau)
        b2 = chi_array(n, 0, -xi, tau)
        lo = np.ceil(np.minimum(b1, b2) - chi_hi).astype(np.int64)
        hi = np.floor(np.maximum(b1, b2) - chi_lo).astype(np.int64)
        for l, mask in _l_windows(lo, hi, l_max):
            y1 = 2.0 * L * (b1 - l)
            y2 = 2.0 * L * (b2 - l)
            par = 1.0 - 2.0 * ((n * l) & 1)
            term = (f_minus * (pair.plus(y1) + pair.plus(y2))
                    - f_plus * (pair.minus(y1) + pair.minus(y2)))
            acc.add(np.where(mask, 0.5 * par * term, 0.0))
    total = acc.result()
    w = _scalar(total.real)
    if full_output:
        return w, _scalar(total.imag)
    return w


def dominant_extrema(coord, values, count=3):
    """The ``count`` interior local extrema of largest magnitude.

    Returns ``(position, 'max' | 'min', value)`` tuples ordered by position;
    used to read the canal/ridge pattern off a 1-D cut.
    """
    values = np.asarray(values, dtype=float)
    slope = np.sign(np.diff(values))
    turns = np.nonzero(np.diff(slope))[0] + 1
    found = [(float(coord[k]), "max" if slope[k - 1] > 0 else "min", float(values[k]))
             for k in turns if slope[k - 1] != 0 and slope[k] != 0]
    found.sort(key=lambda e: -abs(e[2]))
    return sorted(found[:count])


# -- trace catalog -----------------------------------------------------------

@dataclass(frozen=True)
class TraceEvent:
    """One visible spacetime line of the carpet.

    ``origin_x`` is where the line meets ``t = 0``, folded into ``[0, 1)``
    in units of L.  ``weight`` is the peak magnitude of the line's term
    (in units of 1/(2L)).  ``modulation_phase`` is only set for
    interference lines.
    """

    n: int
    l: int
    slope_inverse: int
    origin_x: float
    term_class: str
    weight: float
    modulation_phase: float = None
    classification: str = "ridge"

    def to_dict(self):
        return {
            "n": self.n,
            "l": self.l,
            "slope_inverse": self.slope_inverse,
            "origin_x_over_L": self.origin_x,
            "term_class": self.term_class,
            "weight": self.weight,
            "modulation_phase": self.modulation_phase,
            "classification": self.classification,
        }

    def sort_key(self):
        return (-self.weight, abs(self.n), self.n, self.l,
                TERM_CLASS_ORDER[self.term_class])


_PROFILE_U = np.linspace(-2.0, 2.0, 401)


def _strip_l_range(c, n, th_max):
    """Integers l for which the line x/L = c + l + n t/(T/2) meets the strip."""
    lo = math.ceil(-c - max(0.0, n * th_max) - 1e-12)
    hi = math.floor(1.0 - c - min(0.0, n * th_max) + 1e-12)
    return range(lo, hi + 1)


def trace_catalog(packet, cfg, weight_threshold, t_max=None, n_max=None):
    """List the lines whose term weight reaches ``weight_threshold`` times the
    largest weight of the same term class.

    Classical lines start at ``xbar + lL``, mirror lines at ``-xbar + lL``,
    interference lines at the walls ``lL``.  ``classification`` is the
    sign of the line's contribution at its center, parity ``(-1)**(n l)``
    included: positive is a ridge, negative a canal.  Interference lines
    whose center value is under a tenth of their peak are ``mixed``.

    Returns the events sorted by descending weight, ties by
    ``(|n|, n, l)``.
    """
    if not 0.0 < weight_threshold <= 1.0:
        raise ValueError("weight_threshold must lie in (0, 1]")
    L = cfg.length
    if t_max is None:
        t_max = cfg.half_revival
    auto_n, _ = default_truncations(packet, t_max)
    n_max = auto_n if n_max is None else n_max
    th_max = t_max / cfg.half_revival
    a = packet.center / L
    delta = packet.width / L
    q = packet.wavenumber * L

    per_n = {}
    for n in range(-n_max, n_max + 1):
        half_n_pi = 0.5 * n * math.pi
        center_mod = modulation_factor(packet, n)
        profile = np.exp(-_PROFILE_U ** 2) * np.abs(
            modulation_factor(packet, n, _PROFILE_U * delta))
        peak_mod = max(float(np.max(profile)), abs(center_mod))
        per_n[n] = {
            "classical": math.exp(-((half_n_pi - q) * delta) ** 2),
            "mirror": math.exp(-((half_n_pi + q) * delta) ** 2),
            "interference": 2.0 * math.exp(-(half_n_pi * delta) ** 2) * peak_mod,
            "center_mod": center_mod,
            "peak_mod": peak_mod,
        }
    class_max = {k: max(v[k] for v in per_n.values())
                 for k in ("classical", "mirror", "interference")}
    origins = {"classical": a, "mirror": -a, "interference": 0.0}

    merged = {}
    for n in range(-n_max, n_max + 1):
        for term_class, c in origins.items():
            weight = per_n[n][term_class]
            if class_max[term_class] == 0.0:
                continue
            for l in _strip_l_range(c, n, th_max):
                par = -1 if (n * l) % 2 else 1
                if term_class == "interference":
                    signed = -par * weight * np.sign(per_n[n]["center_mod"])
                    phase = -n * math.pi * a
                else:
                    signed = par * weight
                    phase = None
                key = (n, round(c + l, 12))
                if key in merged:
                    merged[key]["signed"] += signed
                    continue
                merged[key] = {"n": n, "l": l, "class": term_class, "origin": c + l,
                               "signed": signed, "phase": phase}

    events = []
    for rec in merged.values():
        n, term_class = rec["n"], rec["class"]
        weight = abs(rec["signed"])
        if term_class == "interference":
            weight = per_n[n]["interference"]
        if weight < weight_threshold * class_max[term_class] or weight == 0.0:
            continue
        if term_class == "interference":
            info = per_n[n]
            par = -1 if (n * rec["l"]) % 2 else 1
            center_value = -par * info["center_mod"]
            if abs(info["center_mod"]) < 0.1 * info["peak_mod"]:
                label = "mixed"
            else:
                label = "ridge" if center_value > 0 else "canal"
        else:
            label = "ridge" if rec["signed"] > 0 else "canal"
        events.append(TraceEvent(n, rec["l"], n, float(rec["origin"] % 1.0),
                                 term_class, float(weight), rec["phase"], label))
    events.sort(key=TraceEvent.sort_key)
    return events


# -- sampled grids -----------------------------------------------------------

@dataclass
class CarpetGrid:
    """W sampled on a uniform (t, x) lattice; ``values[j, i] = W(x_i, t_j)``."""

    x: np.ndarray
    t: np.ndarray
    values: np.ndarray
    evaluator: str
    truncations: dict
    parameters: dict = field(default_factory=dict)
    min_raw: float = 0.0
    warnings: list = field(default_factory=list)

    @property
    def nx(self):
        return self.x.size

    @property
    def nt(self):
        return self.t.size

    def metadata(self):
        return {
            "evaluator": self.evaluator,
            "nx": self.nx,
            "nt": self.nt,
            "x_range": [float(self.x[0]), float(self.x[-1])],
            "t_range": [float(self.t[0]), float(self.t[-1])],
            "truncations": dict(self.truncations),
            "parameters": dict(self.parameters),
            "min_raw": self.min_raw,
            "warnings": list(self.warnings),
        }


def _chunks(n, parts):
    parts = max(1, min(parts, n))
    edges = np.linspace(0, n, parts + 1).astype(int)
    return [(edges[i], edges[i + 1]) for i in range(parts)]


def carpet_grid(packet, cfg, nx, nt, t_max=None, evaluator="gaussian-lines",
                n_max=None, l_max=None, m_max=None, threads=1, state=None):
    """Fill a :class:`CarpetGrid` over ``[0, L] x [0, t_max]``.

    Rows are split among ``threads`` workers; every point is summed in the
    same fixed order, so the result does not depend on the worker count.
    ``state`` may supply a precomputed expansion for the direct evaluator.
    """
    if evaluator not in EVALUATORS:
        raise ValueError(f"unknown evaluator {evaluator!r}")
    if nx < 2 or nt < 2:
        raise ValueError("grid needs nx, nt >= 2")
    if t_max is None:
        t_max = cfg.half_revival
    x = np.linspace(0.0, cfg.length, nx)
    t = np.linspace(0.0, t_max, nt)
    truncations = {}
    parameters = {}
    warnings = []
    if isinstance(packet, GaussianPacket):
        parameters = {"xbar_over_L": packet.center / cfg.length,
                      "dx_over_L": packet.width / cfg.length,
                      "kbar_times_L": packet.wavenumber * cfg.length,
                      "leakage_left": packet.leakage_left,
                      "leakage_right": packet.leakage_right}
        if not packet.boundary_safe:
            warnings.append("boundary-unsafe packet: wall leakage above 1e-9")

    if evaluator == "direct":
        if state is None:
            state = packet if isinstance(packet, SpectralState) else expand(packet, cfg, m_max)
        truncations["M_max"] = state.m_max

        def rows(t_rows):
            return probability_direct(state, cfg, x[None, :], t_rows[:, None])
    else:
        if not isinstance(packet, GaussianPacket):
            raise TypeError("line evaluators need a GaussianPacket")
        n_max, l_max = _resolve(packet, t, n_max, l_max)
        truncations.update(n_max=n_max, l_max=l_max,
                           tail_bound=tail_bound(packet, n_max, l_max))
        if evaluator == "gaussian-lines":
            def rows(t_rows):
                return carpet_gaussian(packet, cfg, x[None, :], t_rows[:, None], n_max, l_max)
        else:
            pair = factorize(packet)

            def rows(t_rows):
                return carpet_factorized(pair, cfg, x[None, :], t_rows[:, None], n_max, l_max)

    spans = _chunks(nt, threads)
    if len(spans) == 1:
        blocks = [rows(t)]
    else:
        with ThreadPoolExecutor(max_workers=len(spans)) as pool:
            blocks = list(pool.map(lambda s: rows(t[s[0]:s[1]]), spans))
    values = np.vstack([np.atleast_2d(b) for b in blocks])
    min_raw = float(np.min(values))
    if not np.all(np.isfinite(values)):
        raise ArithmeticError("non-finite carpet values")
    if min_raw < -1e-12:
        warnings.append(f"negative density {min_raw:.3e} before clamping")
    values = np.maximum(values, 0.0)
    return CarpetGrid(x, t, values, evaluator, truncations, parameters, min_raw, warnings)
