"""Precompute / invert orchestration and reconstruction metrics."""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import json
import math
from pathlib import Path
import time

import numpy as np

from .errors import ConfigurationError, DomainError, RankDeficiencyError
from .geometry import AcquisitionConfig
from .harmonics import HarmonicStack, forward_harmonics, inverse_harmonics
from .phantoms import ImageGrid, pixel_centers
from .system import (OperatorCache, assemble, default_rank, quadrature_plan, read_cache,
                     solve, truncated_svd, write_cache)

METRIC_PUNCTURE_PIXELS = 5


def _map(fn, items, workers):
    if workers == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers or None) as pool:
        return list(pool.map(fn, items))


def precompute(cfg, M=150, N=150, epsilon=0.001, rank_fraction=0.5, cache_path=None,
               scheme="trapezoid", workers=1):
    """Assemble and TSVD-factor ``A_n`` for ``n = 0..N/2``.

    Returns an :class:`OperatorCache`; writes it to ``cache_path`` when given.
    ``workers`` threads factor harmonics concurrently (0 means one per core).
    """
    if N % 2:
        raise DomainError(f"N must be even, got {N}")
    rank = default_rank(M, rank_fraction)
    plan = quadrature_plan(cfg, M, epsilon, N // 2) if scheme == "product" else None

    def factor(n):
        A = assemble(n, cfg, M, epsilon, scheme=scheme, plan=plan)
        try:
            op = truncated_svd(A, rank)
        except RankDeficiencyError as exc:
            raise RankDeficiencyError(f"harmonic {n}: {exc}", exc.usable_rank, n) from exc
        op.u = op.vh = None
        return op

    operators = _map(factor, range(N // 2 + 1), workers)
    cache = OperatorCache(cfg=cfg, M=M, N=N, rank=rank, epsilon=epsilon, operators=operators)
    if cache_path is not None:
        write_cache(cache_path, operators, cfg, M, N, epsilon)
    return cache


def load_cache(path):
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"operator cache {path} not found; run precompute first")
    return read_cache(path)


def check_compatible(sino, cache):
    """Raise :class:`ConfigurationError` naming the first field where sinogram and cache differ."""
    ours = sino.metadata()
    theirs = cache.metadata()
    for key in ("R", "theta", "chirality", "M", "N", "epsilon"):
        if ours[key] != theirs[key]:
            raise ConfigurationError(
                f"{key} mismatch: sinogram has {ours[key]!r}, operator cache has {theirs[key]!r}")


@dataclass
class ReconstructionReport:
    image: ImageGrid
    rel_l2_percent: float = None
    timings: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)
    imag_residual: float = 0.0
    harmonics: HarmonicStack = field(default=None, repr=False)

    @property
    def streak_radius(self):
        return self.params["R"] * math.sin(self.params["theta"])

    def to_dict(self):
        return {"rel_l2_percent": self.rel_l2_percent, "timings": self.timings,
                "params": self.params, "streak_radius": self.streak_radius,
                "imag_residual": self.imag_residual}

    def save(self, path):
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n")


def invert(sino, cache, size=150, exact=None, workers=1):
    """Reconstruct an image from a sinogram with precomputed operators.

    If ``exact`` (an :class:`ImageGrid` of the same size) is given, the
    report carries the relative L2 error inside the punctured streak disc.
    """
    check_compatible(sino, cache)
    start = time.perf_counter()
    stack = forward_harmonics(sino)
    coeffs = np.array(_map(lambda op: solve(op, stack.coeffs[op.n]), cache.operators, workers))
    f_stack = HarmonicStack(coeffs, sino.N, stack.radii)
    image = inverse_harmonics(f_stack, size=size, R=sino.cfg.R, epsilon=sino.epsilon)
    elapsed = time.perf_counter() - start
    params = dict(sino.metadata(), rank=cache.rank, size=size)
    report = ReconstructionReport(image=image, timings={"inversion": elapsed}, params=params,
                                  imag_residual=imaginary_residual(f_stack, image),
                                  harmonics=f_stack)
    if exact is not None:
        report.rel_l2_percent = relative_l2(image, exact, sino.cfg)
    return report


def imaginary_residual(stack, image):
    """Norm of the discarded imaginary part of the synthesis relative to the image norm.

    Only the ``n = 0`` and ``n = N/2`` terms can leave an imaginary part; the
    paired orders are real by construction.
    """
    real = np.linalg.norm(image.values)
    if real == 0:
        return 0.0
    half = stack.N // 2
    x, y = pixel_centers(image.size, image.R)
    rho = np.hypot(x, y)
    phi = np.arctan2(y, x)

    def interp(c):
        return (np.interp(rho, stack.radii, c.real, left=0, right=0)
                + 1j * np.interp(rho, stack.radii, c.imag, left=0, right=0))

    residue = np.imag(interp(stack.coeffs[0]) + interp(stack.coeffs[half]) * np.exp(1j * half * phi))
    return float(np.linalg.norm(residue) / real)


def metric_region(size, cfg, puncture=None):
    """Pixel centers with ``puncture < rho < R sin(theta)``; default puncture is five pixel widths."""
    if puncture is None:
        puncture = METRIC_PUNCTURE_PIXELS * 2 * cfg.R / size
    x, y = pixel_centers(size, cfg.R)
    rho = np.hypot(x, y)
    return (rho > puncture) & (rho < cfg.streak_radius)


def relative_l2(img_rec, img_ex, cfg, puncture=None):
    """Relative L2 error in percent over :func:`metric_region`."""
    if img_rec.size != img_ex.size:
        raise DomainError(f"grid sizes differ: {img_rec.size} vs {img_ex.size}")
    mask = metric_region(img_ex.size, cfg, puncture)
    denom = np.linalg.norm(img_ex.values[mask])
    if denom == 0:
        raise DomainError("reference image vanishes on the error region")
    return float(100 * np.linalg.norm((img_rec.values - img_ex.values)[mask]) / denom)


def artifact_profile(img_rec, img_ex, cfg, epsilon=0.001, bins=50):
    """Mean absolute error in ``bins`` equal radial bins over ``(epsilon, R)``.

    Returns ``(edges, values)``; empty bins hold NaN.
    """
    if img_rec.size != img_ex.size:
        raise DomainError(f"grid sizes differ: {img_rec.size} vs {img_ex.size}")
    x, y = pixel_centers(img_ex.size, cfg.R)
    rho = np.hypot(x, y).ravel()
    diff = np.abs(img_rec.values - img_ex.values).ravel()
    edges = np.linspace(epsilon, cfg.R, bins + 1)
    idx = np.digitize(rho, edges) - 1
    keep = (idx >= 0) & (idx < bins)
    total = np.bincount(idx[keep], weights=diff[keep], minlength=bins)
    count = np.bincount(idx[keep], minlength=bins)
    with np.errstate(invalid="ignore", divide="ignore"):
        values = np.where(count > 0, total / count, np.nan)
    return edges, values


def write_pgm(img, path):
    """8-bit binary PGM (P5) of the image, min-max scaled."""
    v = img.values
    lo, hi = float(v.min()), float(v.max())
    scaled = np.zeros_like(v) if hi == lo else (v - lo) / (hi - lo)
    data = np.round(scaled * 255).astype(np.uint8)
    with open(path, "wb") as fh:
        fh.write(f"P5\n{img.size} {img.size}\n255\n".encode("ascii"))
        fh.write(data.tobytes())
    return Path(path)
