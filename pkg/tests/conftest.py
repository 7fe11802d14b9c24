import math

import pytest

from brokenray import AcquisitionConfig, phantom_disk, precompute, project


@pytest.fixture(scope="session")
def cfg():
    return AcquisitionConfig(R=1.0, theta=math.pi / 6)


@pytest.fixture(scope="session")
def tc1_image():
    return phantom_disk(150)


@pytest.fixture(scope="session")
def tc1_sinogram(cfg, tc1_image):
    return project(tc1_image, cfg, M=150, N=150, epsilon=0.001)


@pytest.fixture(scope="session")
def cache_150(cfg):
    return precompute(cfg, M=150, N=150, epsilon=0.001, rank_fraction=0.5)


def pytest_terminal_summary(terminalreporter):
    import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(test_acceptance.RESULTS, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
