import math

import numpy as np
import pytest

from photon_scintillation.api.exceptions import ConfigurationError, DomainError, OutOfGridError
from photon_scintillation.api.force_models import FrozenScreens
from photon_scintillation.api.meta import PhotonState, TurbulenceSpec

Q0 = 7.854e6
STANDARD = TurbulenceSpec(cn2=1e-14, l0=5e-3)


def _state(size: int, x: float = 0.0) -> PhotonState:
    return PhotonState(x=np.full(size, x), y=np.zeros(size), qx=np.zeros(size), qy=np.zeros(size),
                       z=np.zeros(size), t=np.zeros(size), qz=Q0)


@pytest.mark.parametrize(["outer", "length", "expected"], [
    [math.inf, 5_000.0, 64],
    [math.inf, 100.0, 64],
    [100.0, 5_000.0, 50],
    [100.0, 50.0, 1],
    [10.0, 100.0, 10],
])
def test_default_slab_layout(outer, length, expected):
    n_slabs, thickness = FrozenScreens().slab_layout(TurbulenceSpec(cn2=1e-14, l0=5e-3, L0=outer), length)
    assert n_slabs == expected
    assert n_slabs * thickness == pytest.approx(length)


def test_explicit_slab_layout():
    assert FrozenScreens(n_slabs=4).slab_layout(STANDARD, 1_000.0) == (4, 250.0)
    with pytest.raises(ConfigurationError):
        FrozenScreens(n_slabs=20).slab_layout(TurbulenceSpec(cn2=1e-14, l0=5e-3, L0=100.0), 1_000.0)


@pytest.mark.parametrize("kwargs", [{"n_slabs": 0}, {"grid_n": 100}, {"grid_spacing": 0.0}])
def test_rejects(kwargs):
    with pytest.raises(DomainError):
        FrozenScreens(**kwargs)


def test_spacing_and_truncation():
    force = FrozenScreens(grid_n=64)
    assert force.spacing(STANDARD) == pytest.approx(5e-3 / 16)
    assert force.truncated(STANDARD)
    assert FrozenScreens(grid_spacing=1e-3).spacing(STANDARD) == 1e-3


def test_stack_is_reproducible_from_seed():
    force = FrozenScreens(n_slabs=2, grid_n=32)
    first = force.stack(STANDARD, 1_000.0, 5)
    second = force.stack(STANDARD, 1_000.0, 5)
    assert len(first) == 2
    np.testing.assert_array_equal(first[1].field, second[1].field)
    assert first[1].tilt == second[1].tilt


def test_propagate_correlates_photons_of_one_realization():
    force = FrozenScreens(n_slabs=2, grid_n=32)
    result = force.propagate(_state(3), 1_000.0, STANDARD, 5, np.random.default_rng(0))
    assert force.correlated
    np.testing.assert_array_equal(result.state.qx, result.state.qx[0])
    assert result.state.z[0] == pytest.approx(1_000.0)


def test_propagate_counts_wraps():
    result = FrozenScreens(n_slabs=2, grid_n=32).propagate(_state(3, x=0.5), 1_000.0, STANDARD, 5,
                                                            np.random.default_rng(0))
    assert result.wrap_count == 6


def test_propagate_without_wrap():
    with pytest.raises(OutOfGridError):
        FrozenScreens(n_slabs=1, grid_n=32, wrap=False).propagate(_state(3, x=0.5), 1_000.0, STANDARD, 5,
                                                                   np.random.default_rng(0))


def test_describe():
    assert FrozenScreens(n_slabs=3).describe() == {
        "model": "frozen_screens",
        "n_slabs": 3,
        "grid_n": 512,
        "grid_spacing": None,
        "wrap": True,
        "large_scale_tilt": True,
    }
