"""Initial states: the Gaussian packet, its eigenmode expansion and the
sum/difference factorization of ``g*(x') g(x'')``.
"""
from dataclasses import dataclass, field
import math

import numpy as np
from scipy.integrate import quad_vec

from .boxmodel import BoxConfig, DomainError
from ._numerics import expipi, reduce_turns, sinpi

#: packets whose amplitude at either wall exceeds this are flagged
LEAKAGE_LIMIT = 1e-9
#: absolute tolerance for the expansion quadrature
EXPAND_TOL = 1e-12


class QuadratureError(ArithmeticError):
    """Adaptive quadrature did not reach its tolerance."""

    def __init__(self, message, worst_error):
        super().__init__(f"{message} (worst interval error estimate {worst_error:.3e})")
        self.worst_error = worst_error


@dataclass(frozen=True)
class GaussianPacket:
    """Normalized Gaussian ``g(x)`` of width ``width`` at ``center``.

    ``g(x) = (sqrt(pi) dx)**-1/2 exp(-((x - xbar)/dx)**2 / 2) exp(i pbar (x - xbar)/hbar)``

    The packet is normalized on the whole real line; the norm missing
    inside the box is reported through the leakage diagnostics, never
    corrected.
    """

    center: float
    width: float
    momentum: float = 0.0
    box: BoxConfig = field(default_factory=BoxConfig)
    leakage_left: float = field(init=False)
    leakage_right: float = field(init=False)

    def __post_init__(self):
        L = self.box.length
        if not 0.0 < self.center < L:
            raise DomainError(f"packet center {self.center!r} not inside (0, {L})")
        if not self.width > 0.0:
            raise DomainError(f"packet width must be positive, got {self.width!r}")
        object.__setattr__(self, "leakage_left",
                           math.exp(-(self.center / self.width) ** 2))
        object.__setattr__(self, "leakage_right",
                           math.exp(-((L - self.center) / self.width) ** 2))

    @classmethod
    def from_box_units(cls, box, xbar_over_L, dx_over_L, kbar_times_L):
        """Build from the dimensionless parameters used in run configs."""
        L = box.length
        return cls(center=xbar_over_L * L, width=dx_over_L * L,
                   momentum=box.hbar * kbar_times_L / L, box=box)

    @property
    def wavenumber(self):
        """kbar = pbar / hbar."""
        return self.momentum / self.box.hbar

    @property
    def wavenumber_width(self):
        """Delta kappa = 1 / Delta x."""
        return 1.0 / self.width

    @property
    def amplitude_scale(self):
        return (math.sqrt(math.pi) * self.width) ** -0.5

    @property
    def boundary_safe(self):
        return max(self.leakage_left, self.leakage_right) <= LEAKAGE_LIMIT

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        d = x - self.center
        return (self.amplitude_scale * np.exp(-0.5 * (d / self.width) ** 2)
                * np.exp(1j * self.wavenumber * d))

    def density(self, x):
        return np.abs(self(x)) ** 2


def default_mode_cutoff(packet, floor=32, tol=1e-14):
    """Smallest M with ``exp(-(k_M - |kbar|)**2 dx**2 / 2) < tol``, at least ``floor``.

    Non-Gaussian packets get ``floor``.
    """
    if not isinstance(packet, GaussianPacket):
        return floor
    L = packet.box.length
    k0 = abs(packet.wavenumber)
    M = 1
    while (M * math.pi / L <= k0
           or math.exp(-((M * math.pi / L - k0) * packet.width) ** 2 / 2) >= tol):
        M += 1
    return max(M, floor)


@dataclass(frozen=True, eq=False)
class SpectralState:
    """Eigenmode coefficients on the signed index range ``-m_max..m_max``.

    ``coefficients[m + m_max]`` holds psi_m, with ``psi_0 = 0`` and
    ``psi_{-m} = -psi_m``.  ``residual`` is the in-box norm not captured by
    the retained modes, ``norm_in_box - sum_{m>=1} |psi_m|**2``.
    """

    coefficients: np.ndarray
    m_max: int
    norm_in_box: float
    residual: float
    quadrature_error: float = 0.0

    def __post_init__(self):
        self.coefficients.setflags(write=False)

    @property
    def indices(self):
        return np.arange(-self.m_max, self.m_max + 1)

    @property
    def positive(self):
        """psi_1 .. psi_M."""
        return self.coefficients[self.m_max + 1:]

    def __getitem__(self, m):
        if abs(m) > self.m_max:
            return 0.0j
        return self.coefficients[m + self.m_max]

    @property
    def mode_norm(self):
        """sum_{m>=1} |psi_m|**2."""
        return float(math.fsum(np.abs(self.positive) ** 2))

    @classmethod
    def from_positive(cls, positive, norm_in_box=None, quadrature_error=0.0):
        """Assemble the signed array from psi_1..psi_M."""
        positive = np.asarray(positive, dtype=complex)
        M = positive.size
        coeffs = np.concatenate([-positive[::-1], [0.0j], positive])
        mode_norm = math.fsum(np.abs(positive) ** 2)
        if norm_in_box is None:
            norm_in_box = mode_norm
        return cls(coeffs, M, float(norm_in_box), float(norm_in_box - mode_norm),
                   float(quadrature_error))


def eigenmode_state(m, m_max=None):
    """SpectralState of the single eigenmode ``u_m``."""
    m_max = max(m, m_max or m)
    positive = np.zeros(m_max, dtype=complex)
    positive[m - 1] = 1.0
    return SpectralState.from_positive(positive, norm_in_box=1.0)


def expand(packet, cfg, m_max=None, points=None, tol=EXPAND_TOL):
    """Project an initial wavefunction onto the box eigenmodes.

    Parameters
    ----------
    packet : callable
        Complex amplitude ``phi(x)`` on ``[0, L]``; a :class:`GaussianPacket`
        or any vectorized callable.
    cfg : BoxConfig
    m_max : int, optional
        Highest retained mode.  Defaults to :func:`default_mode_cutoff`.
    points : sequence of float, optional
        Extra breakpoints for the quadrature (the packet center is added
        automatically for Gaussians).
    tol : float
        Absolute tolerance of the adaptive Gauss-Kronrod quadrature.

    Returns
    -------
    SpectralState

    Raises
    ------
    QuadratureError
        When the adaptive quadrature stops short of ``tol``.
    """
    if m_max is None:
        m_max = default_mode_cutoff(packet)
    if m_max < 1:
        raise DomainError("m_max must be >= 1")
    L = cfg.length
    m = np.arange(1, m_max + 1)
    norm = math.sqrt(2.0 / L)
    pts = list(points or [])
    if isinstance(packet, GaussianPacket):
        pts.append(packet.center)
    pts = sorted(p for p in set(pts) if 0.0 < p < L) or None

    def integrand(x):
        phi = complex(packet(x))
        u = norm * sinpi(reduce_turns(m, x / L))
        return np.concatenate([u * phi, [abs(phi) ** 2]])

    res, err, info = quad_vec(integrand, 0.0, L, epsabs=tol, epsrel=0.0,
                              norm="max", points=pts, limit=10000,
                              full_output=True)
    if not info.success or err > tol:
        worst = max(float(np.max(np.abs(e))) for e in info.errors) if len(info.errors) else err
        raise QuadratureError(f"expansion quadrature failed: {info.message}", worst)
    return SpectralState.from_positive(res[:-1], norm_in_box=res[-1].real,
                                       quadrature_error=err)


@dataclass(frozen=True)
class FactorizedPair:
    """Closed-form factors with ``g*(x') g(x'') = plus(x'+x'') * minus(x'-x'')``.

    ``plus(y) = A exp(-((y/2 - xbar)/dx)**2)`` and
    ``minus(y) = A exp(-(y/(2 dx))**2) exp(-i kbar y)`` with
    ``A = (sqrt(pi) dx)**-1/2``.
    """

    center: float
    width: float
    wavenumber: float
    box: BoxConfig

    @property
    def amplitude_scale(self):
        return (math.sqrt(math.pi) * self.width) ** -0.5

    def plus(self, y):
        y = np.asarray(y, dtype=float)
        return self.amplitude_scale * np.exp(-((0.5 * y - self.center) / self.width) ** 2)

    def minus(self, y):
        y = np.asarray(y, dtype=float)
        return (self.amplitude_scale * np.exp(-(y / (2.0 * self.width)) ** 2)
                * np.exp(-1j * self.wavenumber * y))

    def plus_window(self, cutoff=27.0):
        """(center, half width) in ``y`` outside which ``plus`` underflows."""
        return 2.0 * self.center, 2.0 * cutoff * self.width

    def minus_window(self, cutoff=27.0):
        return 0.0, 2.0 * cutoff * self.width

    def fourier_plus(self, kappa):
        """(1/2L) * integral of exp(i kappa y) plus(y) over the real line."""
        kappa = np.asarray(kappa, dtype=float)
        return (self._fourier_scale() * np.exp(-(kappa * self.width) ** 2)
                * np.exp(2j * kappa * self.center))

    def fourier_minus(self, kappa):
        """(1/2L) * integral of exp(i kappa y) minus(y) over the real line."""
        kappa = np.asarray(kappa, dtype=float)
        return self._fourier_scale() * np.exp(-((kappa - self.wavenumber) * self.width) ** 2) + 0j

    def _fourier_scale(self):
        # A * 2 sqrt(pi) dx / (2L)
        return math.sqrt(math.sqrt(math.pi) * self.width) / self.box.length


def factorize(packet):
    """Sum/difference factorization of a Gaussian packet.

    Raises
    ------
    TypeError
        For anything but a :class:`GaussianPacket`.
    """
    if not isinstance(packet, GaussianPacket):
        raise TypeError("only Gaussian packets have a closed-form factorization")
    return FactorizedPair(packet.center, packet.width, packet.wavenumber, packet.box)


def _sign(sign):
    if sign in (1, "+"):
        return 1
    if sign in (-1, "-", "−"):
        return -1
    raise ValueError(f"sign must be + or -, got {sign!r}")


def fourier_factor(pair, sign, n, cfg):
    """Fourier factor of ``plus`` (sign ``+``) or ``minus`` (sign ``-``) at
    ``kappa_n = n pi / (2L)``.

    The phase ``exp(2 i kappa_n xbar)`` of the ``plus`` factor is reduced
    exactly in units of pi, so e.g. ``n xbar / L = 1/2`` gives a purely
    imaginary result.
    """
    s = _sign(sign)
    n = np.asarray(n)
    L = cfg.length
    kappa = n * np.pi / (2.0 * L)
    if s < 0:
        return pair.fourier_minus(kappa)
    envelope = pair._fourier_scale() * np.exp(-(kappa * pair.width) ** 2)
    return envelope * expipi(reduce_turns(n, pair.center / L))
