import math

import numpy as np
import pytest
from scipy import constants, integrate

from photon_scintillation.api.exceptions import ConfigurationError, DomainError, OutOfGridError
from photon_scintillation.api.meta import FockStatistics, PhotonState, SourceConfig, TurbulenceSpec
from photon_scintillation.api.propagation import (BeamAnalytic, beam_radius_squared, mean_intensity,
                                                  propagate_ballistic, propagate_diffusive, propagate_screens)
from photon_scintillation.api.source import sample_initial_photon
from photon_scintillation.api.turbulence import (PhaseScreen, ScreenStack, force_diffusion_coefficient,
                                                 turbulence_T)

R0 = 0.01
Q0 = 2 * math.pi / 0.8e-6
STANDARD = TurbulenceSpec(cn2=1e-14, l0=5e-3)
SOURCE = SourceConfig(r0=R0, wavelength=0.8e-6, photon_stat=FockStatistics(photons=1))


def _state(x=0.0, qx=0.0, size=1) -> PhotonState:
    return PhotonState(
        x=np.full(size, x, dtype=float),
        y=np.zeros(size),
        qx=np.full(size, qx, dtype=float),
        qy=np.zeros(size),
        z=np.zeros(size),
        t=np.zeros(size),
        qz=Q0,
    )


def test_beam_radius_squared():
    t_z = 10_000 / constants.c
    assert beam_radius_squared(0.0, R0, R0, Q0, 1.0) == pytest.approx(R0 ** 2 / 2)
    assert beam_radius_squared(t_z, R0, R0, Q0, 0.0) == pytest.approx(0.0325, rel=1e-2)
    assert beam_radius_squared(t_z, R0, R0, Q0, turbulence_T(STANDARD)) == pytest.approx(0.163, rel=1e-2)
    with pytest.raises(DomainError):
        beam_radius_squared(-1.0, R0, R0, Q0, 0.0)


def test_beam_analytic_turbulence_term():
    beam = BeamAnalytic.from_config(SOURCE, STANDARD)
    t_z = 5_000 / constants.c
    diffraction = BeamAnalytic.from_config(SOURCE, TurbulenceSpec(cn2=0.0, l0=5e-3)).radius_squared(t_z)
    assert beam.radius_squared(t_z) - diffraction == pytest.approx(beam.turbulence_term(t_z))
    assert beam.at_distance(0.0) == pytest.approx(R0 ** 2 / 2)


def test_beam_radius_insensitive_to_coherence_at_long_distance():
    partial_source = SourceConfig(r0=R0, wavelength=0.8e-6, photon_stat=FockStatistics(photons=1),
                                  lambda_c=math.sqrt(2) * R0)
    strong = TurbulenceSpec(cn2=1e-12, l0=5e-3)
    coherent = BeamAnalytic.from_config(SOURCE, strong)
    partial = BeamAnalytic.from_config(partial_source, strong)
    vacuum = BeamAnalytic.from_config(partial_source, TurbulenceSpec(cn2=0.0, l0=5e-3))

    t_z = 20_000 / constants.c
    assert partial.turbulence_term(t_z) > 100 * vacuum.radius_squared(t_z)
    assert partial.radius_squared(t_z) / coherent.radius_squared(t_z) <= 1.01


def test_mean_intensity_gaussian_profile():
    beam = BeamAnalytic.from_config(SOURCE, STANDARD)
    t = 2_000 / constants.c
    r2 = beam.radius_squared(t)
    on_axis = mean_intensity(beam, 0.0, 0.0, 2_000, t)
    assert mean_intensity(beam, math.sqrt(r2), 0.0, 2_000, t) == pytest.approx(math.exp(-1) * on_axis)
    assert mean_intensity(beam, 0.0, 0.0, 2_000, t, photons=5) == pytest.approx(5 * on_axis)


def test_mean_intensity_fluence():
    beam = BeamAnalytic.from_config(SOURCE, STANDARD)
    t_z = 10_000 / constants.c
    width = beam.rz / constants.c
    fluence, _ = integrate.quad(lambda t: mean_intensity(beam, 0.0, 0.0, 10_000, t),
                                t_z - 8 * width, t_z + 8 * width, points=[t_z], epsabs=0)
    expected = constants.hbar * beam.omega0 / (math.pi * beam.at_distance(10_000))
    assert fluence == pytest.approx(expected, rel=1e-3)


def test_propagate_ballistic():
    state = propagate_ballistic(_state(x=0.5, qx=Q0 / 1000), 1000.0)
    assert state.x[0] == pytest.approx(1.5)
    assert state.qx[0] == Q0 / 1000
    assert state.z[0] == 1000.0
    assert state.t[0] == pytest.approx(1000.0 / constants.c)

    straight = propagate_ballistic(_state(x=0.5), 1000.0)
    assert straight.x[0] == 0.5
    with pytest.raises(DomainError):
        propagate_ballistic(_state(), -1.0)


def test_propagate_diffusive_without_force_is_ballistic():
    state = _state(x=0.1, qx=50.0, size=3)
    diffused = propagate_diffusive(state, 1000.0, 0.0, np.random.default_rng(0))
    ballistic = propagate_ballistic(state, 1000.0)
    np.testing.assert_array_equal(diffused.x, ballistic.x)
    np.testing.assert_array_equal(diffused.qx, ballistic.qx)


def test_propagate_diffusive_rejects_coarse_steps():
    with pytest.raises(DomainError):
        propagate_diffusive(_state(), 1000.0, 1e9, np.random.default_rng(0), n_steps=5)


def test_propagate_diffusive_beam_spread():
    d_f = force_diffusion_coefficient(turbulence_T(STANDARD), Q0)
    rng = np.random.default_rng(1)
    start = sample_initial_photon(SOURCE, np.zeros(2), rng, size=100_000)
    end = propagate_diffusive(start, 10_000, d_f, rng)

    r2 = BeamAnalytic.from_config(SOURCE, STANDARD).at_distance(10_000)
    assert (end.x.var() + end.y.var()) / 2 == pytest.approx(r2 / 2, rel=0.02)
    gain = (end.qx.var() + end.qy.var()) / 2 - (start.qx.var() + start.qy.var()) / 2
    assert gain == pytest.approx(2 * d_f * 10_000 / constants.c, rel=0.02)
    assert end.z[0] == pytest.approx(10_000)


def test_propagate_screens_empty_stack():
    state = _state(x=0.2, qx=Q0 / 1000)
    result = propagate_screens(state, ScreenStack(100.0), 1000.0)
    assert result.wrap_count == 0
    assert result.state.x[0] == pytest.approx(1.2)


def test_propagate_screens_linear_ramp():
    slope = 1e-7
    length = 1000.0
    x = (np.arange(32) - 16) * 1e-3
    screen = PhaseScreen(field=np.tile(slope * x, (32, 1)), spacing=1e-3)
    result = propagate_screens(_state(size=4), ScreenStack(length, [screen]), length)
    np.testing.assert_allclose(result.state.x, slope * length / 2, rtol=1e-9)
    np.testing.assert_allclose(result.state.qx, Q0 * slope, rtol=1e-9)
    assert result.wrap_count == 0


def test_propagate_screens_counts_wraps():
    screen = PhaseScreen(field=np.zeros((16, 16)), spacing=1e-3, tilt=(1e-6, 0.0))
    result = propagate_screens(_state(x=0.5, size=3), ScreenStack(10.0, [screen, screen]))
    assert result.wrap_count == 6
    assert result.state.qx[0] == pytest.approx(2 * Q0 * 1e-6)


def test_propagate_screens_without_wrap():
    screen = PhaseScreen(field=np.zeros((16, 16)), spacing=1e-3)
    with pytest.raises(OutOfGridError):
        propagate_screens(_state(x=0.5), ScreenStack(10.0, [screen]), wrap=False)


def test_propagate_screens_length_mismatch():
    screen = PhaseScreen(field=np.zeros((16, 16)), spacing=1e-3)
    with pytest.raises(ConfigurationError):
        propagate_screens(_state(), ScreenStack(10.0, [screen]), 20.0)
