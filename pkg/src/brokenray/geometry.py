"""Broken-ray geometry in a disc of radius R.

A broken ray starts at a source ``A`` on the boundary circle, travels along
the diameter to the scattering vertex ``B`` at distance ``t`` from the
center, then turns by the scattering angle and exits at the detector ``C``.
"""

from dataclasses import dataclass
import math

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class AcquisitionConfig:
    """Disc radius, scattering half-angle and rotation sense of the scattered branch.

    ``chirality=+1`` rotates the inward radial direction counterclockwise by
    ``theta`` to obtain the direction of the second segment; ``-1`` rotates it
    clockwise. Forward data and inversion must use the same value.
    """

    R: float = 1.0
    theta: float = math.pi / 6
    chirality: int = 1

    def __post_init__(self):
        if not (self.R > 0 and math.isfinite(self.R)):
            raise DomainError(f"R must be positive and finite, got {self.R}")
        if not (0 < self.theta < math.pi / 2):
            raise DomainError(f"theta must lie in (0, pi/2), got {self.theta}")
        if self.chirality not in (1, -1):
            raise DomainError(f"chirality must be +1 or -1, got {self.chirality}")

    @property
    def streak_radius(self):
        """Radius ``R sin(theta)`` of the envelope of the ``t = R`` chords."""
        return self.R * math.sin(self.theta)


@dataclass(frozen=True)
class BrokenRay:
    beta: float
    t: float
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    cfg: AcquisitionConfig

    @property
    def direction(self):
        """Unit vector pointing from ``B`` toward ``C``."""
        return _scatter_direction(self.cfg, self.beta)

    @property
    def first_length(self):
        return self.cfg.R - self.t

    @property
    def second_length(self):
        return _second_length(self.cfg, self.t)


def _scatter_direction(cfg, beta):
    phi = beta + math.pi + cfg.chirality * cfg.theta
    return np.array([math.cos(phi), math.sin(phi)])


def _second_length(cfg, t):
    s = math.sin(cfg.theta)
    return t * math.cos(cfg.theta) + math.sqrt(max(cfg.R**2 - (t * s) ** 2, 0.0))


def make_broken_ray(cfg, beta, t):
    """Construct the polyline ``A -> B -> C`` for source angle ``beta`` and vertex radius ``t``.

    ``t = R`` is accepted (zero-length first segment); anything outside
    ``[0, R]`` raises :class:`DomainError` rather than being clamped.
    """
    if not math.isfinite(beta):
        raise DomainError(f"beta must be finite, got {beta}")
    if not (0.0 <= t <= cfg.R):
        raise DomainError(f"t must lie in [0, R={cfg.R}], got {t}")
    u = np.array([math.cos(beta), math.sin(beta)])
    A = cfg.R * u
    B = t * u
    C = B + _second_length(cfg, t) * _scatter_direction(cfg, beta)
    return BrokenRay(beta=float(beta), t=float(t), A=A, B=B, C=C, cfg=cfg)


def branch_length(ray):
    """Total length ``|AB| + |BC|`` of a broken ray."""
    return ray.first_length + ray.second_length


def polar_radius_along_branch(ray, s):
    """Distance from the origin of the point at arc length ``s`` from ``B`` along ``BC``.

    ``s`` may be an array; every entry must lie in ``[0, |BC|]``.
    """
    s_arr = np.asarray(s, dtype=float)
    length = ray.second_length
    tol = 1e-12 * ray.cfg.R
    if np.any(s_arr < -tol) or np.any(s_arr > length + tol):
        raise DomainError(f"arc length must lie in [0, {length}]")
    th = ray.cfg.theta
    rho = np.sqrt((ray.t * math.sin(th)) ** 2 + (s_arr - ray.t * math.cos(th)) ** 2)
    return float(rho) if rho.ndim == 0 else rho
