import numpy as np
import pytest

from sispace import (GeneratorSpec, PsiParams, auto_grid, build_bspline,
                     build_psi_spectrum, build_sinc, make_grid)


@pytest.fixture(scope="session")
def sinc_grid():
    return make_grid(1024, 16)


@pytest.fixture(scope="session")
def sinc_spectrum(sinc_grid):
    return build_sinc(sinc_grid)


@pytest.fixture(scope="session")
def bspline_grid():
    return make_grid(64, 1024)


@pytest.fixture(scope="session")
def bspline1(bspline_grid):
    return build_bspline(1, bspline_grid)


@pytest.fixture(scope="session")
def psi_small():
    """Banded generator at a desk-tiny truncation (J=3) with its auto grid."""
    params = PsiParams(1.0, 2.0, 2, 3)
    grid, _ = auto_grid(GeneratorSpec(kind="psi", psi=params))
    return params, grid, build_psi_spectrum(params, grid)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20260808)
