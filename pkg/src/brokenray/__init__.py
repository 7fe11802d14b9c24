"""Broken-ray transform simulation and inversion from radially partial data in a disc."""

from .errors import ConfigurationError, DomainError, RankDeficiencyError
from .forward import Sinogram, add_noise, load_sinogram, project, save_sinogram
from .geometry import AcquisitionConfig, BrokenRay, branch_length, make_broken_ray, polar_radius_along_branch
from .harmonics import HarmonicStack, evaluate_harmonics, forward_harmonics, inverse_harmonics
from .kernels import kernel_K, kernel_K1, kernel_K2, psi, psi_bar
from .phantoms import ImageGrid, load_image, phantom_combined, phantom_disk, save_image
from .pipeline import (ReconstructionReport, artifact_profile, invert, load_cache, precompute,
                       relative_l2, write_pgm)
from .system import (SystemMatrix, TruncatedOperator, assemble, forward_apply, read_cache, solve,
                     truncated_svd, write_cache)

__version__ = "0.1.0"
