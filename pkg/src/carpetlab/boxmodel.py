"""Geometry, spectrum and eigenfunctions of the infinite square well.

Positions are measured from the left wall, ``0 <= x <= L``.  Internally the
evaluators work with ``xi = x / L`` and ``tau = t / T`` where ``T`` is the
revival time; physical units appear only at the call boundary.
"""
from dataclasses import dataclass, field

import numpy as np

from ._numerics import reduce_turns, sinpi


class DomainError(ValueError):
    """Argument outside the domain where an operation is defined."""


def revival_time(M, L, hbar):
    """Revival time ``T = 4 M L**2 / (pi hbar)`` of the box.

    >>> revival_time(1.0, 1.0, 1.0) * np.pi
    4.0
    """
    if not (M > 0 and L > 0 and hbar > 0):
        raise DomainError(f"M, L, hbar must be positive, got {M!r}, {L!r}, {hbar!r}")
    return 4.0 * M * L**2 / (np.pi * hbar)


@dataclass(frozen=True)
class BoxConfig:
    """Particle of mass ``mass`` confined between walls at 0 and ``length``.

    The defaults ``M = L = hbar = 1`` give ``T = 4 / pi``.
    """

    mass: float = 1.0
    length: float = 1.0
    hbar: float = 1.0
    revival_time: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "revival_time",
                           revival_time(self.mass, self.length, self.hbar))

    @property
    def half_revival(self):
        return 0.5 * self.revival_time

    def xi(self, x):
        """Dimensionless position x / L."""
        return np.asarray(x, dtype=float) / self.length

    def tau(self, t):
        """Dimensionless time t / T."""
        return np.asarray(t, dtype=float) / self.revival_time

    def wavenumber(self, m):
        """k_m = m pi / L."""
        return m * np.pi / self.length


def _check_mode(m):
    if int(m) != m or m < 1:
        raise DomainError(f"physical eigenmodes need integer m >= 1, got {m!r}")
    return int(m)


def eigenfunction(cfg, m, x):
    """Normalized eigenfunction ``sqrt(2/L) sin(m pi x / L)``.

    Parameters
    ----------
    cfg : BoxConfig
    m : int
        Mode number, ``m >= 1``.
    x : float or array_like
        Position(s) inside the box, ``0 <= x <= L``.

    Returns
    -------
    float or np.ndarray
        Real amplitude.  Exactly zero at both walls for every ``m``.

    Raises
    ------
    DomainError
        If ``m < 1`` or any ``x`` lies outside ``[0, L]``.
    """
    m = _check_mode(m)
    x = np.asarray(x, dtype=float)
    if np.any((x < 0.0) | (x > cfg.length)) or np.any(~np.isfinite(x)):
        raise DomainError("eigenfunction evaluated outside the box [0, L]")
    u = np.sqrt(2.0 / cfg.length) * sinpi(reduce_turns(m, cfg.xi(x)))
    return u if u.ndim else float(u)


def eigenphase(cfg, m, t):
    """Dynamical phase ``E_m t / hbar = m**2 * 2 pi t / T``.

    The evolution factor is ``exp(-1j * eigenphase(cfg, m, t))``.  The value
    is formed as ``m**2`` times the ``m = 1`` phase, so the quadratic
    spectrum holds exactly in floating point.
    """
    base = 2.0 * np.pi * cfg.tau(t)
    phase = float(m * m) * base
    return phase if np.ndim(phase) else float(phase)


def energy(cfg, m):
    """E_m = (hbar k_m)**2 / (2 M)."""
    return (cfg.hbar * cfg.wavenumber(m)) ** 2 / (2.0 * cfg.mass)
