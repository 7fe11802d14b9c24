"""Angular Fourier analysis of sinograms and synthesis of images from radial harmonics.

Convention: ``g(t, beta) = sum_n g_n(t) exp(i n beta)``, so
``g_n(t_i) = (1/N) sum_j g(t_i, beta_j) exp(-i n beta_j)``. Only
``n = 0..N/2`` are stored; negative orders follow from conjugate symmetry.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .phantoms import ImageGrid, pixel_centers


@dataclass
class HarmonicStack:
    """Complex coefficients ``coeffs[n, i]`` for ``n = 0..N/2`` at radii ``radii[i]``."""

    coeffs: np.ndarray
    N: int
    radii: np.ndarray

    @property
    def M(self):
        return self.coeffs.shape[1]


def real_split_fft(x):
    """DFT coefficients ``0..N/2`` of real sequences along the last axis, divided by ``N``.

    Even- and odd-indexed samples are packed as the real and imaginary parts
    of one complex sequence of length ``N/2``; a single half-length FFT of it
    is then unpacked into the spectrum of the real input.
    """
    x = np.asarray(x, dtype=float)
    N = x.shape[-1]
    if N % 2 or N == 0:
        raise DomainError(f"sequence length must be even and positive, got {N}")
    half = N // 2
    Z = np.fft.fft(x[..., 0::2] + 1j * x[..., 1::2], axis=-1)
    k = np.arange(half + 1)
    Zk = Z[..., k % half]
    Zc = np.conj(Z[..., (half - k) % half])
    even = 0.5 * (Zk + Zc)
    odd = -0.5j * (Zk - Zc)
    return (even + np.exp(-2j * np.pi * k / N) * odd) / N


def forward_harmonics(sino):
    """Harmonics ``g_n(t_i)`` of every sinogram row."""
    if sino.N % 2:
        raise DomainError(f"N must be even, got {sino.N}")
    return HarmonicStack(real_split_fft(sino.values).T.copy(), sino.N, sino.radii)


def synthesize_angles(coeffs, N, phi):
    """Evaluate ``Re[c_0 + 2 sum_{0<n<N/2} c_n e^{in phi} + c_{N/2} e^{i N/2 phi}]``.

    ``coeffs`` has shape ``(N/2 + 1, ...)`` broadcastable against ``phi``.
    """
    half = N // 2
    z = np.exp(1j * np.asarray(phi))
    # Horner's rule in z = exp(i phi), highest order first
    acc = np.asarray(coeffs[half], dtype=complex)
    for n in range(half - 1, 0, -1):
        acc = acc * z + 2 * coeffs[n]
    return np.real(acc * z + coeffs[0])


def evaluate_harmonics(stack, x, y, r_max=None):
    """Evaluate the real function with harmonics ``stack`` at points ``(x, y)``.

    Each ``f_n`` is interpolated linearly in radius. Points closer to the
    origin than the first radius or farther than ``r_max`` (default: the
    last radius) get zero.
    """
    radii = np.asarray(stack.radii, dtype=float)
    r_max = radii[-1] if r_max is None else r_max
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    rho = np.hypot(x, y)
    active = (rho >= radii[0]) & (rho <= r_max)
    out = np.zeros(x.shape)
    if not np.any(active):
        return out
    r = rho[active]
    idx = np.clip(np.searchsorted(radii, r, side="right") - 1, 0, len(radii) - 2)
    w = np.clip((r - radii[idx]) / (radii[idx + 1] - radii[idx]), 0.0, 1.0)
    coeffs = np.asarray(stack.coeffs)
    interp = coeffs[:, idx] * (1 - w) + coeffs[:, idx + 1] * w
    out[active] = synthesize_angles(interp, stack.N, np.arctan2(y[active], x[active]))
    return out


def inverse_harmonics(stack, size=150, R=1.0, epsilon=None):
    """Image on a ``size x size`` grid from radial harmonics ``f_n(t_i)``.

    Pixels closer to the origin than the first radius or beyond ``R - epsilon``
    are set to zero; ``epsilon`` defaults to ``R - radii[-1]``.
    """
    r_max = None if epsilon is None else R - epsilon
    x, y = pixel_centers(size, R)
    return ImageGrid(evaluate_harmonics(stack, x, y, r_max), R=R, description="reconstruction")
