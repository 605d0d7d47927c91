"""Cross-representation validation suite behind ``carpetlab validate``.

Every identity the library relies on has a named check here.  A check
passes exactly when its measured ``max_abs_error`` does not exceed its
``tolerance``.
"""
from dataclasses import dataclass, field
import math
import time

import numpy as np
from scipy.integrate import quad_vec

from ..carpet import (carpet_factorized, carpet_gaussian, default_truncations,
                      modulation_factor, tail_bound, term_decomposition)
from ..propagator import (d_pair_sum_truncated, d_resummed_truncated, evolve,
                          green_truncated, kernel_d_arguments, probability_direct)
from ..wavepacket import expand, factorize, fourier_factor

ORACLE_TOL = 1e-6
FACTORIZED_TOL = 1e-12
D_IDENTITY_TOL = 1e-12
NORMALIZATION_TOL = 1e-9
BOUNDARY_TOL = 1e-12
REVIVAL_TOL = 1e-9
FOURIER_TOL = 1e-10
GREEN_TOL = 1e-9
STATIONARY_TOL = 1e-12
D_TRUNCATION = 24


@dataclass
class CheckRecord:
    name: str
    max_abs_error: float
    tolerance: float
    note: str = ""

    @property
    def passed(self):
        return bool(self.max_abs_error <= self.tolerance)

    def to_dict(self):
        return {"name": self.name, "max_abs_error": self.max_abs_error,
                "tolerance": self.tolerance, "pass": self.passed, "note": self.note}


@dataclass
class ValidationReport:
    checks: list = field(default_factory=list)
    truncations: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)
    flags: list = field(default_factory=list)

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def __getitem__(self, name):
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def add(self, name, error, tolerance, note=""):
        self.checks.append(CheckRecord(name, float(error), float(tolerance), note))

    def to_dict(self):
        return {"pass": self.passed,
                "checks": [c.to_dict() for c in self.checks],
                "truncations": dict(self.truncations),
                "timings_s": dict(self.timings),
                "flags": list(self.flags)}

    def to_text(self):
        lines = []
        for c in self.checks:
            status = "PASS" if c.passed else "FAIL"
            line = f"{status}  {c.name:<28} error {c.max_abs_error:.3e}  tol {c.tolerance:.1e}"
            if c.note:
                line += f"  ({c.note})"
            lines.append(line)
        for k, v in self.timings.items():
            lines.append(f"time  {k:<28} {v:.3f} s")
        for flag in self.flags:
            lines.append(f"flag  {flag}")
        lines.append("overall: " + ("PASS" if self.passed else "FAIL"))
        return "\n".join(lines) + "\n"


def _timed(timings, key, fn, *args, **kwargs):
    start = time.perf_counter()
    out = fn(*args, **kwargs)
    timings[key] = time.perf_counter() - start
    return out


def _grid(run):
    cfg = run.box
    x = np.linspace(0.0, cfg.length, run.nx)
    t = np.linspace(0.0, run.t_max, run.nt)
    return x, t


# -- checks on the direct evaluator -----------------------------------------

def check_normalization(report, state, cfg, rng):
    """Trapezoid rule on 4M + 1 nodes is exact for |psi|**2 of M modes."""
    x = np.linspace(0.0, cfg.length, 4 * state.m_max + 1)
    times = rng.uniform(0.0, cfg.revival_time, 10)
    w = probability_direct(state, cfg, x[None, :], times[:, None])
    h = x[1] - x[0]
    norms = h * (w[:, 1:-1].sum(axis=1) + 0.5 * (w[:, 0] + w[:, -1]))
    report.add("normalization", np.max(np.abs(norms - 1.0)), NORMALIZATION_TOL,
               "10 random times")


def check_parseval(report, state):
    report.add("parseval", abs(state.residual), NORMALIZATION_TOL,
               "in-box norm minus retained mode norm")


def check_boundary(report, state, cfg, t):
    w = probability_direct(state, cfg, np.array([0.0, cfg.length])[None, :], t[:, None])
    report.add("boundary", np.max(np.abs(w)), BOUNDARY_TOL)


def check_revivals(report, state, cfg, x):
    T = cfg.revival_time
    times = np.array([0.0, 0.125, 0.3, 0.5]) * T
    a = probability_direct(state, cfg, x[None, :], times[:, None])
    b = probability_direct(state, cfg, x[None, :], times[:, None] + T)
    report.add("full_revival", np.max(np.abs(a - b)), REVIVAL_TOL)
    half = probability_direct(state, cfg, x, 0.5 * T)
    start = probability_direct(state, cfg, cfg.length - x, 0.0)
    report.add("mirror_revival", np.max(np.abs(half - start)), REVIVAL_TOL)


def check_stationarity(report, state, cfg, x, t):
    w = probability_direct(state, cfg, x[None, :], t[:, None])
    report.add("stationarity", np.max(np.abs(w - w[0])), STATIONARY_TOL,
               "single eigenmode")


def _gauss_legendre(a, b, panels=64, order=48):
    nodes, weights = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    return ((mid[:, None] + half[:, None] * nodes).ravel(),
            (half[:, None] * weights).ravel())


def check_green_chain(report, packet, state, cfg, rng):
    """Integrating the truncated Green's function against the packet
    reproduces the evolved expansion."""
    xs = rng.uniform(0.0, cfg.length, 6)
    ts = rng.uniform(0.0, cfg.revival_time, 6)
    nodes, weights = _gauss_legendre(0.0, cfg.length)
    g = green_truncated(cfg, xs[:, None], ts[:, None], nodes[None, :], state.m_max)
    lhs = (g * packet(nodes)[None, :]) @ weights
    rhs = evolve(state, cfg, xs, ts)
    report.add("green_definition_chain", np.max(np.abs(lhs - rhs)), GREEN_TOL,
               "composite Gauss-Legendre over the source point")


# -- checks on the line representations -------------------------------------

def check_oracle(report, packet, state, cfg, x, t, n_max, l_max, timings):
    direct = _timed(timings, "direct", probability_direct, state, cfg, x[None, :], t[:, None])
    lines = _timed(timings, "gaussian-lines", carpet_gaussian, packet, cfg,
                   x[None, :], t[:, None], n_max, l_max)
    scale = float(np.max(direct))
    report.add("oracle_equivalence", np.max(np.abs(direct - lines)), ORACLE_TOL * scale,
               "tolerance 1e-6 * max W")
    return direct, lines


def check_factorized(report, packet, cfg, t_max, n_max, l_max, rng):
    x = rng.uniform(0.0, cfg.length, 1000)
    t = rng.uniform(0.0, t_max, 1000)
    a = carpet_gaussian(packet, cfg, x, t, n_max, l_max)
    b, imag = carpet_factorized(factorize(packet), cfg, x, t, n_max, l_max, full_output=True)
    rel = np.max(np.abs(a - b)) / np.max(np.abs(a))
    report.add("gaussian_vs_factorized", rel, FACTORIZED_TOL,
               f"sup-norm relative, 1000 random points; max imaginary residue "
               f"{np.max(np.abs(imag)):.1e}")


def check_truncation(report, packet, cfg, x, t, n_max, l_max, base):
    bigger = carpet_gaussian(packet, cfg, x[None, :], t[:, None], n_max + 4, l_max + 4)
    allowance = 2.0 * np.spacing(np.abs(base))
    excess = np.max(np.maximum(np.abs(bigger - base) - allowance, 0.0))
    report.add("truncation_monotonicity", excess, tail_bound(packet, n_max, l_max),
               "change from n_max+4, l_max+4 beyond 2 ulp per sample")


def check_line_periodicity(report, packet, cfg, x, t_max):
    T = cfg.revival_time
    t = np.linspace(0.0, t_max, 6)
    n_max, l_max = default_truncations(packet, t_max + T)
    a = carpet_gaussian(packet, cfg, x[None, :], t[:, None], n_max, l_max)
    b = carpet_gaussian(packet, cfg, x[None, :], t[:, None] + T, n_max, l_max)
    report.add("time_periodicity_lines", np.max(np.abs(a - b)), REVIVAL_TOL)


def check_decomposition(report, packet, cfg, x, t, n_max, l_max, lines):
    ts = t[:: max(1, t.size // 8)]
    c, m, i = term_decomposition(packet, cfg, x[None, :], ts[:, None], n_max, l_max)
    whole = lines[:: max(1, t.size // 8)]
    report.add("term_decomposition_sum", np.max(np.abs(c + m + i - whole)), FACTORIZED_TOL)


def check_suppression(report, packet, cfg, n_max):
    """With kbar = 0 every n with cos(n pi xbar / L) = 0 must give an exact zero."""
    if packet.wavenumber != 0.0:
        return
    a = packet.center / cfg.length
    suppressed = [n for n in range(-n_max, n_max + 1) if (2 * n * a) % 2 == 1.0]
    worst = max((abs(modulation_factor(packet, n)) for n in suppressed), default=0.0)
    report.add("suppression", worst, 0.0,
               f"{len(suppressed)} suppressed slope indices")


def check_factorization(report, packet, rng):
    pair = factorize(packet)
    L = packet.box.length
    x1 = rng.uniform(0.0, L, 200)
    x2 = rng.uniform(0.0, L, 200)
    lhs = np.conj(packet(x1)) * packet(x2)
    rhs = pair.plus(x1 + x2) * pair.minus(x1 - x2)
    report.add("factorization_reconstruction", np.max(np.abs(lhs - rhs)), FACTORIZED_TOL)


def check_fourier_factors(report, packet, cfg):
    """Closed-form Fourier factors against adaptive quadrature, |n| <= 64."""
    pair = factorize(packet)
    L = cfg.length
    n = np.arange(-64, 65)
    kappa = n * math.pi / (2.0 * L)
    worst = 0.0
    for sign, fn, window in (("+", pair.plus, pair.plus_window()),
                             ("-", pair.minus, pair.minus_window())):
        c, hw = window

        def integrand(y, fn=fn):
            return np.exp(1j * kappa * y) * fn(y) / (2.0 * L)

        num, _ = quad_vec(integrand, c - hw, c + hw, epsabs=1e-13, epsrel=0.0,
                          norm="max", points=[c], limit=10000)
        closed = fourier_factor(pair, sign, n, cfg)
        worst = max(worst, float(np.max(np.abs(num - closed))))
    report.add("fourier_factor_quadrature", worst, FOURIER_TOL)


# -- pair function D ----------------------------------------------------------

def check_d_identity(report, cfg, rng):
    """Pair sum against Dirichlet resummation over the four kernel patterns."""
    x1 = rng.uniform(0.0, cfg.length, 100)
    x2 = rng.uniform(0.0, cfg.length, 100)
    patterns = kernel_d_arguments(x1, x2, cfg)
    pick = np.arange(100) % 4
    eta = np.choose(pick, [p[1] for p in patterns])
    zeta = np.choose(pick, [p[2] for p in patterns])
    xi = rng.uniform(0.0, 1.0, 100)
    tau = rng.uniform(0.0, 1.0, 100)
    a = d_pair_sum_truncated(eta, zeta, xi, tau, D_TRUNCATION)
    b = d_resummed_truncated(eta, zeta, xi, tau, D_TRUNCATION)
    report.add("d_identity", np.max(np.abs(a - b)), D_IDENTITY_TOL,
               f"100 tuples, K_m = K_k = {D_TRUNCATION}")


def check_steepness(report, cfg, rng):
    """Per slope index the resummed term equals the pair sum on its diagonal."""
    K = 8
    eta, zeta, xi, tau = (rng.uniform(-1.0, 1.0, 20) for _ in range(4))
    worst = 0.0
    for n in range(-2 * K, 2 * K + 2):
        a = d_pair_sum_truncated(eta, zeta, xi, tau, K, n=n)
        b = d_resummed_truncated(eta, zeta, xi, tau, K, n=n)
        worst = max(worst, float(np.max(np.abs(a - b))))
    report.add("steepness_degeneracy", worst, D_IDENTITY_TOL, f"K = {K}, every n")


# -- driver -------------------------------------------------------------------

def run_validation(run, timing=True):
    """Execute every applicable check for ``run`` (a RunConfig)."""
    cfg = run.box
    rng = np.random.default_rng(run.seed)
    report = ValidationReport()
    x, t = _grid(run)
    state = _timed(report.timings, "expand", run.state)
    report.truncations["M_max"] = state.m_max

    check_parseval(report, state)
    check_normalization(report, state, cfg, rng)
    check_boundary(report, state, cfg, t)
    check_revivals(report, state, cfg, x)
    check_d_identity(report, cfg, rng)
    check_steepness(report, cfg, rng)

    if not run.is_gaussian:
        check_stationarity(report, state, cfg, x, t)
        report.flags.append("eigenmode packet: line-representation checks skipped")
        return report

    packet = run.packet()
    if not packet.boundary_safe:
        report.flags.append("boundary-unsafe packet: wall leakage above 1e-9")
    auto_n, auto_l = default_truncations(packet, run.t_max)
    n_max = run.n_max or auto_n
    l_max = run.l_max or auto_l
    bound = tail_bound(packet, n_max, l_max)
    report.truncations.update(n_max=n_max, l_max=l_max, tail_bound=bound)

    _, lines = check_oracle(report, packet, state, cfg, x, t, n_max, l_max, report.timings)
    check_factorized(report, packet, cfg, run.t_max, n_max, l_max, rng)
    check_decomposition(report, packet, cfg, x, t, n_max, l_max, lines)
    check_truncation(report, packet, cfg, x, t, n_max, l_max, lines)
    check_line_periodicity(report, packet, cfg, x, run.t_max)
    check_suppression(report, packet, cfg, n_max)
    check_factorization(report, packet, rng)
    check_fourier_factors(report, packet, cfg)
    check_green_chain(report, packet, state, cfg, rng)

    if bound > ORACLE_TOL:
        report.flags.append(f"truncation: n_max={n_max}, l_max={l_max} leave a tail "
                            f"bound of {bound:.2e}, above the oracle tolerance")
    if timing:
        _performance(report, run, packet, state, x, t, n_max, l_max)
    return report


def _performance(report, run, packet, state, x, t, n_max, l_max):
    """Wall-clock of direct summation at M_max and 2 M_max; informational."""
    cfg = run.box
    wide = expand(packet, cfg, 2 * state.m_max)
    _timed(report.timings, "direct_2xM", probability_direct, wide, cfg,
           x[None, :], t[:, None])
    report.truncations["M_max_2x"] = wide.m_max
