"""Forward broken-ray projector and measurement noise."""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
import json
from pathlib import Path

import numpy as np

from .errors import ConfigurationError, DomainError
from .geometry import AcquisitionConfig


def radial_grid(M, R=1.0, epsilon=0.001):
    """Vertex radii ``t_i = i (R - epsilon) / M`` for ``i = 1..M``."""
    h = (R - epsilon) / M
    return h * np.arange(1, M + 1)


def angular_grid(N):
    """Source angles ``beta_j = 2 pi j / N`` for ``j = 0..N-1``."""
    return 2 * np.pi * np.arange(N) / N


@dataclass
class Sinogram:
    """BRT samples: row ``i`` is vertex radius ``t_{i+1}``, column ``j`` is source angle ``beta_j``."""

    values: np.ndarray
    cfg: AcquisitionConfig
    epsilon: float = 0.001

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 2:
            raise DomainError("sinogram values must be a 2-D array")
        if self.N % 2:
            raise DomainError(f"N must be even, got {self.N}")
        if not np.all(np.isfinite(self.values)):
            raise DomainError("sinogram values must be finite")

    @property
    def M(self):
        return self.values.shape[0]

    @property
    def N(self):
        return self.values.shape[1]

    @property
    def radii(self):
        return radial_grid(self.M, self.cfg.R, self.epsilon)

    @property
    def angles(self):
        return angular_grid(self.N)

    def metadata(self):
        return {"R": self.cfg.R, "theta": self.cfg.theta, "chirality": self.cfg.chirality,
                "M": self.M, "N": self.N, "epsilon": self.epsilon}


def broken_ray_vertices(cfg, beta, t):
    """Vectorized ``A, B, C`` for broadcastable arrays ``beta`` and ``t``; each has shape ``(..., 2)``."""
    beta, t = np.broadcast_arrays(np.asarray(beta, float), np.asarray(t, float))
    u = np.stack([np.cos(beta), np.sin(beta)], axis=-1)
    phi = beta + np.pi + cfg.chirality * cfg.theta
    d = np.stack([np.cos(phi), np.sin(phi)], axis=-1)
    s = np.sin(cfg.theta)
    length = t * np.cos(cfg.theta) + np.sqrt(np.maximum(cfg.R**2 - (t * s) ** 2, 0.0))
    A = cfg.R * u
    B = t[..., None] * u
    return A, B, B + length[..., None] * d


def segment_integrals(values, R, P0, P1):
    """Integrate a piecewise-constant image along segments ``P0[k] -> P1[k]``.

    Each segment is clipped exactly against every pixel it crosses: the
    crossing parameters with all vertical and horizontal grid lines are
    merged, and each piece contributes its length times the value of the
    pixel that contains its midpoint.
    """
    values = np.asarray(values, dtype=float)
    size = values.shape[0]
    width = 2 * R / size
    lines = -R + width * np.arange(size + 1)
    P0 = np.atleast_2d(P0)
    P1 = np.atleast_2d(P1)
    delta = P1 - P0
    length = np.hypot(delta[:, 0], delta[:, 1])
    with np.errstate(divide="ignore", invalid="ignore"):
        ax = (lines[None, :] - P0[:, :1]) / delta[:, :1]
        ay = (lines[None, :] - P0[:, 1:]) / delta[:, 1:]
    ends = np.broadcast_to(np.array([0.0, 1.0]), (len(P0), 2))
    alpha = np.concatenate([ends, ax, ay], axis=1)
    alpha[~np.isfinite(alpha)] = 0.0
    alpha = np.sort(np.clip(alpha, 0.0, 1.0), axis=1)
    mid = 0.5 * (alpha[:, 1:] + alpha[:, :-1])
    xm = P0[:, :1] + mid * delta[:, :1]
    ym = P0[:, 1:] + mid * delta[:, 1:]
    col = np.floor((xm + R) / width).astype(np.intp)
    row = np.floor((R - ym) / width).astype(np.intp)
    inside = (col >= 0) & (col < size) & (row >= 0) & (row < size)
    pix = values[np.clip(row, 0, size - 1), np.clip(col, 0, size - 1)]
    pieces = np.where(inside, pix, 0.0) * np.diff(alpha, axis=1)
    return pieces.sum(axis=1) * length


def project(img, cfg, M=150, N=150, epsilon=0.001, chunk=4096, workers=1):
    """Simulate the broken-ray transform of ``img`` on the ``M x N`` acquisition grid."""
    if N % 2:
        raise DomainError(f"N must be even, got {N}")
    if M < 2:
        raise DomainError(f"M must be at least 2, got {M}")
    if not (0 < epsilon < cfg.R):
        raise DomainError(f"epsilon must lie in (0, R), got {epsilon}")
    if not np.isclose(img.R, cfg.R, rtol=0, atol=1e-12 * cfg.R):
        raise ConfigurationError(f"image R={img.R} differs from acquisition R={cfg.R}")
    t = radial_grid(M, cfg.R, epsilon)
    beta = angular_grid(N)
    A, B, C = broken_ray_vertices(cfg, beta[None, :], t[:, None])
    A, B, C = (P.reshape(-1, 2) for P in (A, B, C))

    def run(lo):
        hi = min(lo + chunk, len(A))
        return (segment_integrals(img.values, cfg.R, A[lo:hi], B[lo:hi])
                + segment_integrals(img.values, cfg.R, B[lo:hi], C[lo:hi]))

    starts = range(0, len(A), chunk)
    if workers == 1:
        parts = [run(lo) for lo in starts]
    else:
        with ThreadPoolExecutor(max_workers=workers or None) as pool:
            parts = list(pool.map(run, starts))
    return Sinogram(np.concatenate(parts).reshape(M, N), cfg, epsilon)


def add_noise(sino, level, seed):
    """Multiplicative Gaussian noise: each value is scaled by ``1 + level * xi`` with ``xi ~ N(0, 1)``.

    Draws are taken in row-major order from ``numpy.random.default_rng(seed)``.
    Negative results are kept.
    """
    if level < 0:
        raise DomainError(f"noise level must be nonnegative, got {level}")
    if level == 0:
        return Sinogram(sino.values.copy(), sino.cfg, sino.epsilon)
    xi = np.random.default_rng(seed).standard_normal(sino.values.shape)
    return Sinogram(sino.values * (1 + level * xi), sino.cfg, sino.epsilon)


def save_sinogram(sino, stem):
    """Write ``<stem>.json`` metadata and ``<stem>.csv`` with ``M`` rows by ``N`` columns."""
    stem = Path(stem)
    stem.parent.mkdir(parents=True, exist_ok=True)
    stem.with_suffix(".json").write_text(json.dumps(sino.metadata(), indent=2) + "\n")
    np.savetxt(stem.with_suffix(".csv"), sino.values, fmt="%.17g", delimiter=",")
    return stem.with_suffix(".json"), stem.with_suffix(".csv")


def load_sinogram(stem):
    stem = Path(stem)
    meta = json.loads(stem.with_suffix(".json").read_text())
    values = np.loadtxt(stem.with_suffix(".csv"), delimiter=",", ndmin=2)
    if values.shape != (meta["M"], meta["N"]):
        raise DomainError(f"CSV shape {values.shape} does not match M={meta['M']}, N={meta['N']}")
    cfg = AcquisitionConfig(R=float(meta["R"]), theta=float(meta["theta"]),
                            chirality=int(meta["chirality"]))
    return Sinogram(values, cfg, float(meta["epsilon"]))
