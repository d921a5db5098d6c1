import logging

import pytest

from pml_select.numerics import gauss_legendre
from pml_select.objective import ObjectiveSpec
from pml_select.profiles import Family
from pml_select.published import BASELINE, published_profile
from pml_select.reflectivity import HALF_PI, GridSpec


@pytest.fixture(autouse=True)
def detach_cli_logging():
    """Drop the stderr handler a CLI test installed on the root logger."""
    yield
    root = logging.getLogger()
    for handler in list(root.handlers):
        if getattr(handler, "_pml_select", False):
            root.removeHandler(handler)
    root.setLevel(logging.WARNING)
    logging.getLogger("pml_select").setLevel(logging.NOTSET)


@pytest.fixture
def grid():
    """lambda0 = 1 um, n0 = 1, h = 0.05 um, m = 5."""
    return GridSpec()


@pytest.fixture
def quad():
    return gauss_legendre(100, 0.0, HALF_PI)


@pytest.fixture
def objective_spec(grid, quad):
    def build(profile):
        return ObjectiveSpec(grid=grid, quad=quad, family=profile.family, p=profile.p)

    return build


@pytest.fixture
def baseline_profile():
    return BASELINE


@pytest.fixture
def rminus_optimum():
    def build(p):
        return published_profile(Family.RATIONAL_MINUS, p)

    return build


@pytest.fixture
def rplus_optimum():
    def build(p):
        return published_profile(Family.RATIONAL_PLUS, p)

    return build
