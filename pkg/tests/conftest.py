import numpy as np
import pytest

from dqplate import CLAMPED, SIMPLY_SUPPORTED, PlateSpec


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture
def table1_ss():
    """Simply supported square benchmark plate (center w/h near 0.94)."""
    return PlateSpec.isotropic(
        a=100.0, h=1.0, e=2.1e6, nu=0.25, q=1.0, nx=7, ny=7, bc=SIMPLY_SUPPORTED
    )


@pytest.fixture
def table1_clamped():
    """Clamped square benchmark plate (center w/h near 1.12)."""
    return PlateSpec.isotropic(
        a=100.0, h=1.0, e=2.1e6, nu=0.316, q=3.0, nx=9, ny=9, bc=CLAMPED
    )


@pytest.fixture
def orthotropic_spec():
    """Rectangular orthotropic plate used for the sweep studies."""
    return PlateSpec(
        a=9.4,
        b=7.75,
        h=0.0624,
        e1=18.7e6,
        e2=1.3e6,
        nu12=0.3,
        g12=0.6e6,
        bc=SIMPLY_SUPPORTED,
        q=1.0,
        nx=7,
        ny=7,
    )


def max_rel_diff(a, b):
    """Max-entry difference relative to the larger matrix scale."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    scale = max(np.abs(a).max(), np.abs(b).max(), 1e-300)
    return float(np.abs(a - b).max() / scale)
