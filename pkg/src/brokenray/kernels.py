"""Kernels of the integral equation linking angular harmonics of an image and its BRT.

All functions accept scalar or array ``t_hat`` (the ratio ``t / rho``) and
return arrays of matching shape (0-d arrays are converted to Python scalars).
The kernels are singular at ``t_hat = 1/sin(theta)``; requesting that point
or anything beyond it raises :class:`DomainError`.
"""

import numpy as np

from .errors import DomainError


def _scalarize(a):
    return a[()] if isinstance(a, np.ndarray) and a.ndim == 0 else a


def _check_arcsin(t_hat, theta):
    x = np.asarray(t_hat, dtype=float) * np.sin(theta)
    if np.any(x < 0) or np.any(x > 1):
        raise DomainError("t_hat * sin(theta) must lie in [0, 1]")
    return x


def _check_open(t_hat, theta, lower=0.0, strict_lower=False):
    t = np.asarray(t_hat, dtype=float)
    if np.any(t * np.sin(theta) >= 1):
        raise DomainError("t_hat must be below 1/sin(theta), where the kernel is singular")
    bad = t <= lower if strict_lower else t < lower
    if np.any(bad):
        raise DomainError(f"t_hat out of range (lower bound {lower})")
    return t


def psi(t_hat, theta):
    return _scalarize(np.arcsin(_check_arcsin(t_hat, theta)) + theta)


def psi_bar(t_hat, theta):
    return _scalarize(2 * theta - (np.arcsin(_check_arcsin(t_hat, theta)) + theta))


def fraction_K2(t_hat, theta):
    """Real factor of ``K_n^2``: the rate ``ds/drho`` along the outgoing part of the second segment."""
    t = _check_open(t_hat, theta)
    p = np.arcsin(t * np.sin(theta)) + theta
    sin_t = np.sin(theta)
    num = 1 + t * np.cos(p) + t**2 * np.sin(p) * sin_t / np.sqrt(1 - t**2 * sin_t**2)
    return _scalarize(num / np.sqrt(1 + t**2 + 2 * t * np.cos(p)))


def fraction_K1(t_hat, theta):
    """Real factor of ``K_n^1`` (negative: radius decreases along the incoming part)."""
    t = _check_open(t_hat, theta, lower=1.0, strict_lower=True)
    pb = theta - np.arcsin(t * np.sin(theta))
    sin_t = np.sin(theta)
    # 1 - cos(x) written as 2 sin^2(x/2): the plain form is 0/0 near t_hat = 1
    half = 2 * np.sin(pb / 2) ** 2
    num = (1 - t) + t * half + t**2 * np.sin(pb) * sin_t / np.sqrt(1 - t**2 * sin_t**2)
    return _scalarize(num / np.sqrt((1 - t) ** 2 + 2 * t * half))


def kernel_K1(t_hat, n, theta):
    """``K_n^1`` for ``1 < t_hat < 1/sin(theta)``."""
    frac = np.asarray(fraction_K1(t_hat, theta))
    pb = np.asarray(psi_bar(t_hat, theta))
    return _scalarize(-np.exp(1j * n * pb) * frac)


def kernel_K2(t_hat, n, theta):
    """``K_n^2`` for ``0 <= t_hat < 1/sin(theta)``."""
    frac = np.asarray(fraction_K2(t_hat, theta))
    p = np.asarray(psi(t_hat, theta))
    sign = -1.0 if n % 2 else 1.0
    return _scalarize(sign * np.exp(1j * n * p) * frac)


def kernel_K(t_hat, n, theta):
    """Combined kernel: ``1 + K_n^2`` on ``[0, 1]`` and ``K_n^1 + K_n^2`` on ``(1, 1/sin(theta))``.

    ``t_hat = 1`` takes the left (closed) branch.
    """
    t = _check_open(t_hat, theta)
    out = np.asarray(kernel_K2(t, n, theta), dtype=complex).copy()
    upper = t > 1
    out[~upper] += 1.0
    if np.any(upper):
        out[upper] += np.asarray(kernel_K1(t[upper], n, theta))
    return _scalarize(out)
