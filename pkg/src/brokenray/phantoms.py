"""Raster phantoms on a square grid covering ``[-R, R]^2``.

Pixel ``(i, j)`` (row, column) has its center at
``x = -R + (j + 1/2) * 2R/size`` and ``y = R - (i + 1/2) * 2R/size``, so row 0
is the top of the image. Membership is decided at pixel centers only.
"""

from dataclasses import dataclass
import json
from pathlib import Path

import numpy as np

from .errors import DomainError


@dataclass
class ImageGrid:
    values: np.ndarray
    R: float = 1.0
    description: str = ""

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 2 or self.values.shape[0] != self.values.shape[1]:
            raise DomainError(f"image must be square, got shape {self.values.shape}")
        if not np.all(np.isfinite(self.values)):
            raise DomainError("image values must be finite")

    @property
    def size(self):
        return self.values.shape[0]

    @property
    def pixel_width(self):
        return 2 * self.R / self.size

    def centers(self):
        """Return ``(x, y)`` arrays of pixel-center coordinates, each ``size x size``."""
        return pixel_centers(self.size, self.R)

    def mass(self):
        """Integral of the piecewise-constant image."""
        return float(self.values.sum() * self.pixel_width**2)


def pixel_centers(size, R):
    c = -R + (np.arange(size) + 0.5) * (2 * R / size)
    x, y = np.meshgrid(c, -c)
    return x, y


@dataclass(frozen=True)
class Disk:
    center: tuple
    radius: float
    intensity: float = 1.0

    def evaluate(self, x, y):
        inside = (x - self.center[0]) ** 2 + (y - self.center[1]) ** 2 < self.radius**2
        return np.where(inside, self.intensity, 0.0)

    def area(self):
        return np.pi * self.radius**2


@dataclass(frozen=True)
class SquareFrame:
    """Axis-aligned hollow square: ``inner <= max(|dx|, |dy|) < outer``."""

    center: tuple
    inner: float
    outer: float
    intensity: float = 1.0

    def evaluate(self, x, y):
        d = np.maximum(np.abs(x - self.center[0]), np.abs(y - self.center[1]))
        return np.where((d >= self.inner) & (d < self.outer), self.intensity, 0.0)

    def area(self):
        return 4 * (self.outer**2 - self.inner**2)


# Test Case 1: a disk containing the origin.
TEST_CASE_1 = Disk(center=(0.05, 0.0), radius=0.15, intensity=1.0)

# Test Case 2 layout for R = 1, theta = pi/6 (streak circle at rho = 0.5): one
# disk near the origin, two disks beyond the streak circle and a frame that
# straddles it.
COMBINED_SHAPES = (
    Disk(center=(-0.1, 0.1), radius=0.12, intensity=1.0),
    Disk(center=(0.6, 0.3), radius=0.1, intensity=0.7),
    Disk(center=(-0.45, -0.55), radius=0.09, intensity=0.5),
    SquareFrame(center=(0.1, -0.45), inner=0.1, outer=0.15, intensity=0.8),
)


def evaluate_combined(x, y, R=1.0):
    """Point values of the combined phantom (shapes scale with ``R``)."""
    x = np.asarray(x, dtype=float) / R
    y = np.asarray(y, dtype=float) / R
    out = sum(shape.evaluate(x, y) for shape in COMBINED_SHAPES)
    return np.where(x**2 + y**2 < 1.0, out, 0.0)


def phantom_disk(size, R=1.0, center=(0.05, 0.0), radius=0.15, intensity=1.0):
    if radius < 0:
        raise DomainError("radius must be nonnegative")
    if np.hypot(*center) + radius > R:
        raise DomainError(f"disk at {center} with radius {radius} leaves the disc of radius {R}")
    x, y = pixel_centers(size, R)
    disk = Disk(tuple(center), radius, intensity)
    return ImageGrid(disk.evaluate(x, y), R=R,
                     description=f"disk center={tuple(center)} radius={radius} intensity={intensity}")


def phantom_combined(size, R=1.0):
    if size < 2:
        raise DomainError("size must be at least 2")
    x, y = pixel_centers(size, R)
    return ImageGrid(evaluate_combined(x, y, R), R=R, description="combined disks and square frame")


def disc_mask(size, R, radius=None):
    """Boolean mask of pixel centers strictly inside the disc of the given radius (default ``R``)."""
    x, y = pixel_centers(size, R)
    return x**2 + y**2 < (R if radius is None else radius) ** 2


def save_image(img, stem):
    """Write ``<stem>.json`` (metadata) and ``<stem>.csv`` (values, ``%.17g``)."""
    stem = Path(stem)
    stem.parent.mkdir(parents=True, exist_ok=True)
    meta = {"size": img.size, "R": img.R, "description": img.description}
    stem.with_suffix(".json").write_text(json.dumps(meta, indent=2) + "\n")
    np.savetxt(stem.with_suffix(".csv"), img.values, fmt="%.17g", delimiter=",")
    return stem.with_suffix(".json"), stem.with_suffix(".csv")


def load_image(stem):
    stem = Path(stem)
    meta = json.loads(stem.with_suffix(".json").read_text())
    values = np.loadtxt(stem.with_suffix(".csv"), delimiter=",", ndmin=2)
    if values.shape != (meta["size"], meta["size"]):
        raise DomainError(f"CSV shape {values.shape} does not match size {meta['size']}")
    return ImageGrid(values, R=float(meta["R"]), description=meta.get("description", ""))
