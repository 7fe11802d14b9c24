import math

import numpy as np
import pytest
from oracles import ds_drho

from brokenray import DomainError
from brokenray.kernels import (fraction_K1, fraction_K2, kernel_K, kernel_K1, kernel_K2, psi,
                               psi_bar)


@pytest.mark.parametrize("theta", [0.2, math.pi / 6, math.pi / 4, 1.3])
def test_psi_landmarks(theta):
    assert psi(0, theta) == pytest.approx(theta)
    assert psi_bar(0, theta) == pytest.approx(theta)
    assert psi(1, theta) == pytest.approx(2 * theta)
    assert psi_bar(1, theta) == pytest.approx(0, abs=1e-14)
    assert psi(1 / math.sin(theta), theta) == pytest.approx(math.pi / 2 + theta)


def test_psi_domain():
    with pytest.raises(DomainError):
        psi(1.01 / math.sin(0.5), 0.5)


@pytest.mark.parametrize("n", [0, 1, 2, 5, -3])
def test_K2_at_zero(n):
    theta = 0.4
    assert kernel_K2(0.0, n, theta) == pytest.approx((-1) ** n * np.exp(1j * n * theta))
    assert kernel_K(0.0, n, theta) == pytest.approx(1 + (-1) ** n * np.exp(1j * n * theta))


def test_K2_matches_finite_difference():
    theta = math.pi / 6
    fd = ds_drho(theta, 0.5, branch=2)
    expected = np.exp(4j * psi(0.5, theta)) * fd
    assert abs(kernel_K2(0.5, 4, theta) - expected) < 1e-6


def test_K1_modulus_matches_finite_difference():
    theta = math.pi / 4
    fd = ds_drho(theta, 1.2, branch=1)
    assert fd < 0
    assert abs(abs(kernel_K1(1.2, 3, theta)) - abs(fd)) < 1e-6


@pytest.mark.parametrize("theta", [math.pi / 6, math.pi / 4, math.pi / 3])
def test_jump_at_one(theta):
    jump = abs(kernel_K(1 + 1e-8, 3, theta) - kernel_K(1 - 1e-8, 3, theta))
    assert jump == pytest.approx(1 / math.cos(theta) - 1, abs=1e-6)


def test_K_at_one_uses_left_branch():
    theta = 0.5
    assert kernel_K(1.0, 2, theta) == pytest.approx(1 + kernel_K2(1.0, 2, theta))


@pytest.mark.parametrize("theta", [math.pi / 6, math.pi / 4])
def test_singularity_is_inverse_square_root(theta):
    s = math.sin(theta)
    scaled = [abs(kernel_K(1 / s - 10.0**-k, 2, theta)) * math.sqrt(10.0**-k) for k in range(2, 7)]
    # |K| sqrt(1/s - t) -> |phase sum| / sqrt(2 s) <= 2 / sqrt(2 s)
    assert max(scaled) <= 2 / math.sqrt(2 * s) * (1 + 1e-3)
    assert abs(scaled[-1] - scaled[-2]) < 1e-2 * scaled[-1]


def test_singular_point_rejected():
    theta = 0.5
    for fn in (kernel_K, kernel_K2):
        with pytest.raises(DomainError):
            fn(1 / math.sin(theta), 1, theta)
    with pytest.raises(DomainError):
        kernel_K1(1.0, 1, theta)


def test_conjugate_symmetry():
    rng = np.random.default_rng(3)
    theta = 0.7
    t = rng.uniform(0, 0.999 / math.sin(theta), 50)
    for n in range(1, 9):
        np.testing.assert_allclose(kernel_K(t, -n, theta), np.conj(kernel_K(t, n, theta)),
                                   rtol=1e-13, atol=1e-13)


def test_K2_modulus_independent_of_n():
    theta = 0.9
    t = np.linspace(0, 0.99 / math.sin(theta), 40)
    ref = np.abs(kernel_K2(t, 0, theta))
    for n in range(1, 12):
        np.testing.assert_allclose(np.abs(kernel_K2(t, n, theta)), ref, rtol=1e-12)


def test_fractions_match_arc_length_rate():
    rng = np.random.default_rng(11)
    for _ in range(100):
        theta = rng.uniform(0.1, 1.4)
        top = 0.95 / math.sin(theta)
        if rng.random() < 0.5 and top > 1.05:
            t_hat = rng.uniform(1.02, top)
            assert abs(fraction_K1(t_hat, theta) - ds_drho(theta, t_hat, 1)) < 1e-6
        else:
            t_hat = rng.uniform(0.02, min(top, 1.0))
            assert abs(fraction_K2(t_hat, theta) - ds_drho(theta, t_hat, 2)) < 1e-6


def test_vectorized_matches_scalar():
    theta = 0.6
    t = np.array([0.0, 0.3, 1.0, 1.2, 1.5])
    vec = kernel_K(t, 5, theta)
    assert vec.shape == t.shape
    for ti, v in zip(t, vec):
        assert kernel_K(float(ti), 5, theta) == pytest.approx(v)
