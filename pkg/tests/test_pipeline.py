import json
import math

import numpy as np
import pytest

from brokenray import (AcquisitionConfig, ConfigurationError, DomainError, ImageGrid,
                       evaluate_harmonics, invert, load_cache, phantom_combined, phantom_disk,
                       precompute, project, relative_l2, write_pgm)
from brokenray.forward import Sinogram, angular_grid, radial_grid
from brokenray.phantoms import COMBINED_SHAPES, Disk
from brokenray.pipeline import artifact_profile, check_compatible, metric_region
from studies import IMAGE_SIZE, tc1_reconstruction


@pytest.fixture(scope="module")
def small_cache(cfg):
    return precompute(cfg, M=30, N=12, epsilon=0.001)


def test_cache_has_one_operator_per_harmonic(cache_150):
    assert len(cache_150.operators) == 76
    assert [op.n for op in cache_150.operators] == list(range(76))
    assert cache_150.rank == 75


def test_precompute_rejects_odd_N(cfg):
    with pytest.raises(DomainError):
        precompute(cfg, M=10, N=9)


def test_precompute_rerun_is_byte_identical(tmp_path, cfg):
    a = tmp_path / "a.bin"
    b = tmp_path / "b.bin"
    precompute(cfg, M=20, N=10, cache_path=a)
    precompute(cfg, M=20, N=10, cache_path=b, workers=2)
    assert a.read_bytes() == b.read_bytes()
    assert len(load_cache(a).operators) == 6


def test_threaded_precompute_matches_serial(cfg, small_cache):
    threaded = precompute(cfg, M=30, N=12, epsilon=0.001, workers=3)
    for a, b in zip(small_cache.operators, threaded.operators):
        np.testing.assert_array_equal(a.pinv, b.pinv)


def test_missing_cache_message(tmp_path):
    with pytest.raises(FileNotFoundError, match="run precompute first"):
        load_cache(tmp_path / "nothing.bin")


@pytest.mark.parametrize("field,kwargs", [
    ("theta", dict(cfg=AcquisitionConfig(theta=math.pi / 5))),
    ("chirality", dict(cfg=AcquisitionConfig(chirality=-1))),
    ("epsilon", dict(epsilon=0.002)),
])
def test_metadata_mismatch_names_field(small_cache, field, kwargs):
    cfg = kwargs.get("cfg", AcquisitionConfig())
    sino = Sinogram(np.zeros((30, 12)), cfg, kwargs.get("epsilon", 0.001))
    with pytest.raises(ConfigurationError, match=field):
        check_compatible(sino, small_cache)
    with pytest.raises(ConfigurationError, match=field):
        invert(sino, small_cache)


def test_grid_mismatch(small_cache, cfg):
    with pytest.raises(ConfigurationError, match="N"):
        invert(Sinogram(np.zeros((30, 14)), cfg), small_cache)
    with pytest.raises(ConfigurationError, match="M"):
        invert(Sinogram(np.zeros((31, 12)), cfg), small_cache)


def test_zero_sinogram_gives_zero_image(small_cache, cfg):
    report = invert(project(ImageGrid(np.zeros((40, 40))), cfg, M=30, N=12), small_cache, size=40)
    assert not report.image.values.any()
    assert report.imag_residual == 0.0


def test_linearity(small_cache, cfg):
    sino = project(phantom_disk(60), cfg, M=30, N=12)
    base = invert(sino, small_cache, size=60).image.values
    scaled = invert(Sinogram(-3.5 * sino.values, cfg), small_cache, size=60).image.values
    np.testing.assert_allclose(scaled, -3.5 * base, rtol=1e-8, atol=1e-12 * np.abs(base).max())


def test_band_limited_data_has_no_imaginary_residue(small_cache, cfg):
    t = radial_grid(30)
    beta = angular_grid(12)
    values = np.outer(1 - t, np.ones(12)) + np.outer(t * (1 - t), np.cos(3 * beta))
    report = invert(Sinogram(values, cfg), small_cache, size=50)
    assert report.imag_residual < 1e-8


def test_reconstruction_zero_outside_sampled_annulus(cfg):
    report = tc1_reconstruction(150)
    x, y = report.image.centers()
    rho = np.hypot(x, y)
    outside = (rho < radial_grid(150)[0]) | (rho > 1 - 0.001)
    assert not report.image.values[outside].any()


def test_test_case_1_error_band():
    report = tc1_reconstruction(150)
    assert 25 <= report.rel_l2_percent <= 45
    assert report.params["rank"] == 75 and report.params["M"] == 150
    assert report.streak_radius == pytest.approx(0.5)
    assert report.timings["inversion"] < 10


def _rotate(x, y, angle):
    return x * math.cos(angle) - y * math.sin(angle), x * math.sin(angle) + y * math.cos(angle)


def _relative(a, b, mask):
    return np.linalg.norm((a - b)[mask]) / np.linalg.norm(b[mask])


def test_rotated_data_gives_rotated_reconstruction(cfg, cache_150, tc1_sinogram):
    # rolling the sinogram by k columns is an exact rotation of the data by 2 pi k / N
    base = invert(tc1_sinogram, cache_150)
    k = 20
    angle = 2 * math.pi * k / 150
    turned = invert(Sinogram(np.roll(tc1_sinogram.values, k, axis=1), cfg), cache_150)
    x, y = base.image.centers()
    back = evaluate_harmonics(turned.harmonics, *_rotate(x, y, angle), r_max=1 - 0.001)
    mask = metric_region(IMAGE_SIZE, cfg)
    assert _relative(back, base.image.values, mask) < 1e-10


def test_rotation_equivariance_half_turn(cfg, cache_150, tc1_sinogram):
    # k = N/2 maps the pixel grid onto itself, so the rasterized phantom rotates exactly
    base = invert(tc1_sinogram, cache_150).image.values
    img = phantom_disk(IMAGE_SIZE, center=(-0.05, 0.0), radius=0.15)
    turned = invert(project(img, cfg, M=150, N=150), cache_150).image.values
    assert _relative(np.rot90(turned, k=2), base, metric_region(IMAGE_SIZE, cfg)) < 0.02


def test_rotation_equivariance_regridded(cfg, cache_150):
    # the phantom is rasterized finely so that rotating the raster perturbs the
    # data far less than the reconstruction amplifies it
    fine = 1200
    k = 20
    angle = 2 * math.pi * k / 150
    reports = []
    for a in (0.0, angle):
        img = phantom_disk(fine, center=_rotate(0.05, 0.0, a), radius=0.15)
        reports.append(invert(project(img, cfg, M=150, N=150), cache_150))
    x, y = reports[0].image.centers()
    back = evaluate_harmonics(reports[1].harmonics, *_rotate(x, y, angle), r_max=1 - 0.001)
    assert _relative(back, reports[0].image.values, metric_region(IMAGE_SIZE, cfg)) < 0.02


def test_relative_l2_examples(cfg):
    ex = phantom_disk(80)
    assert relative_l2(ex, ex, cfg) == 0.0
    assert relative_l2(ImageGrid(np.zeros((80, 80))), ex, cfg) == pytest.approx(100.0)
    assert relative_l2(ImageGrid(1.1 * ex.values), ex, cfg) == pytest.approx(10.0, abs=1e-10)
    with pytest.raises(DomainError):
        relative_l2(ex, ImageGrid(np.zeros((80, 80))), cfg)
    with pytest.raises(DomainError):
        relative_l2(ex, phantom_disk(60), cfg)


def test_metric_region_bounds(cfg):
    mask = metric_region(150, cfg)
    x, y = phantom_disk(150).centers()
    rho = np.hypot(x, y)[mask]
    assert rho.min() > 5 * 2 / 150 and rho.max() < 0.5


def test_artifact_profile_zero_for_exact(cfg):
    ex = phantom_disk(100)
    edges, values = artifact_profile(ex, ex, cfg)
    assert len(edges) == 51 and edges[0] == 0.001 and edges[-1] == 1.0
    assert np.nanmax(values) == 0.0


def test_report_json(tmp_path):
    report = tc1_reconstruction(150)
    report.save(tmp_path / "r.json")
    data = json.loads((tmp_path / "r.json").read_text())
    assert data["streak_radius"] == pytest.approx(0.5)
    assert data["rel_l2_percent"] == report.rel_l2_percent
    assert {"R", "theta", "chirality", "M", "N", "epsilon", "rank"} <= set(data["params"])


def test_pgm_output(tmp_path):
    img = phantom_disk(20)
    path = write_pgm(img, tmp_path / "x.pgm")
    data = path.read_bytes()
    header = b"P5\n20 20\n255\n"
    assert data.startswith(header) and len(data) == len(header) + 400
    body = np.frombuffer(data[len(header):], dtype=np.uint8)
    assert set(np.unique(body)) == {0, 255}
    flat = write_pgm(ImageGrid(np.ones((4, 4))), tmp_path / "flat.pgm").read_bytes()
    assert flat.endswith(bytes(16))


def test_combined_phantom_blurs_beyond_streak_circle(cfg, cache_150):
    img = phantom_combined(IMAGE_SIZE)
    report = invert(project(img, cfg, M=150, N=150), cache_150, exact=img)
    assert 0 < report.rel_l2_percent < 100
    x, y = img.centers()
    inside, outside = [], []
    for shape in COMBINED_SHAPES:
        if not isinstance(shape, Disk):
            continue
        m = (x - shape.center[0]) ** 2 + (y - shape.center[1]) ** 2 < shape.radius**2
        err = np.linalg.norm(report.image.values[m] - img.values[m]) / np.linalg.norm(img.values[m])
        (inside if np.hypot(*shape.center) + shape.radius < cfg.streak_radius else outside).append(err)
    assert len(inside) == 1 and len(outside) == 2
    assert min(outside) > 2 * inside[0]
