"""Independent reference computations used by the test suite."""

import math

import numpy as np
from scipy.integrate import quad_vec

from brokenray.geometry import AcquisitionConfig, make_broken_ray, polar_radius_along_branch
from brokenray.kernels import kernel_K


def harmonic_integral(t, n, theta, profile, R=1.0, chirality=1):
    """Adaptive Gauss-Kronrod evaluation of ``int_{t sin(theta)}^R f(rho) K_n(t/rho) drho``.

    The inner piece uses ``rho = p + (t - p) v^2`` to absorb the inverse
    square-root singularity; every ``t`` is integrated at once.
    """
    t = np.asarray(t, dtype=float)
    p = t * math.sin(theta)

    def inner(v):
        rho = np.maximum(p + (t - p) * v * v, np.nextafter(p, np.inf))
        return profile(rho) * kernel_K(t / rho, n, theta) * 2 * (t - p) * v

    def outer(v):
        rho = t + (R - t) * v
        return profile(rho) * kernel_K(t / rho, n, theta) * (R - t)

    opts = dict(epsabs=1e-13, epsrel=1e-12, limit=4000)
    total = quad_vec(inner, 0, 1, **opts)[0] + quad_vec(outer, 0, 1, **opts)[0]
    return total if chirality == 1 else np.conj(total)


def direct_dft(x):
    """``(1/N) sum_j x_j exp(-2 pi i n j / N)`` for ``n = 0..N/2`` by brute force."""
    x = np.asarray(x, dtype=float)
    N = x.shape[-1]
    j = np.arange(N)
    n = np.arange(N // 2 + 1)
    return x @ np.exp(-2j * np.pi * np.outer(j, n) / N) / N


def ds_drho(theta, t_hat, branch, rho=0.5, step=1e-7):
    """Central-difference ``ds/drho`` along the second segment at radius ``rho``.

    The vertex radius is ``t = t_hat * rho`` inside a disc large enough to
    hold it. ``branch=1`` is the part before the closest approach, ``2`` the
    part after.
    """
    t = t_hat * rho
    cfg = AcquisitionConfig(R=max(1.0, 2 * t, 2 * rho), theta=theta)
    ray = make_broken_ray(cfg, 0.3, t)
    p = t * math.sin(theta)
    half = math.sqrt(max(rho**2 - p**2, 0.0))
    s = t * math.cos(theta) + (half if branch == 2 else -half)
    r_plus = polar_radius_along_branch(ray, s + step)
    r_minus = polar_radius_along_branch(ray, s - step)
    return 2 * step / (r_plus - r_minus)
