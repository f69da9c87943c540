import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from bosemomentum import ThermalPoint, TrapModel, condensation_temperature, renormalized_frequencies
from bosemomentum.model import ZETA3


def test_zeta3_against_series():
    # direct partial sum with Euler-Maclaurin tail 1/(2K^2)
    k_max = 200_000
    series = math.fsum(1.0 / k**3 for k in range(1, k_max + 1)) + 1.0 / (2 * k_max**2)
    assert ZETA3 == pytest.approx(series, rel=1e-13)


def test_noninteracting_frequencies_are_exact():
    assert renormalized_frequencies(TrapModel(1000, omega_xy=1.0, omega_z=1.0)) == (1.0, 1.0)
    assert renormalized_frequencies(TrapModel(10, omega_xy=0.3, omega_z=2.5)) == (0.3, 2.5)


def test_attractive_renormalization():
    w_xy, w_z = renormalized_frequencies(TrapModel(100, inter_omega=0.02, inter_sign="attractive"))
    assert w_xy == pytest.approx(0.9797958971132712, rel=1e-15)
    assert w_z == w_xy


def test_repulsive_renormalization():
    w_xy, _ = renormalized_frequencies(TrapModel(100, inter_omega=0.02, inter_sign="repulsive"))
    assert w_xy == pytest.approx(math.sqrt(1.04), rel=1e-15)


def test_overstrong_attraction_names_axis():
    with pytest.raises(ValueError, match="xy"):
        TrapModel(100, inter_omega=0.2)
    with pytest.raises(ValueError, match="z frequency"):
        TrapModel(100, omega_xy=5.0, omega_z=1.0, inter_omega=0.2)


@pytest.mark.parametrize("kw", [{"n_particles": 0}, {"n_particles": 2.5}, {"omega_z": -1.0}, {"inter_omega": -0.1}])
def test_invalid_models(kw):
    args = {"n_particles": 10} | kw
    with pytest.raises(ValueError):
        TrapModel(**args)


def test_condensation_temperature_values():
    assert condensation_temperature(TrapModel(1000)) == pytest.approx(9.404989702570405, rel=1e-14)
    assert condensation_temperature(TrapModel(1)) == pytest.approx(0.9404989702570405, rel=1e-14)


def test_condensation_temperature_uses_geometric_mean():
    aniso = TrapModel(1000, omega_xy=2.0, omega_z=0.5)
    iso = TrapModel(1000, omega_xy=1.0, omega_z=1.0)
    assert condensation_temperature(aniso) == pytest.approx(condensation_temperature(iso) * (2 * 2 * 0.5) ** (1 / 3))


@given(st.integers(1, 10**6))
def test_condensation_temperature_cube_root_scaling(n):
    assert condensation_temperature(TrapModel(8 * n)) == pytest.approx(2 * condensation_temperature(TrapModel(n)), rel=1e-14)


@given(st.integers(1, 10**5), st.floats(0.01, 100))
def test_condensation_temperature_linear_in_frequency(n, w):
    t = condensation_temperature(TrapModel(n, omega_xy=w, omega_z=w))
    assert t == pytest.approx(w * condensation_temperature(TrapModel(n)), rel=1e-13)
    assert condensation_temperature(TrapModel(n + 1, omega_xy=w, omega_z=w)) > t


@given(st.floats(0, 0.09))
def test_frequencies_continuous_in_omega(omega):
    w_xy, _ = renormalized_frequencies(TrapModel(100, inter_omega=omega))
    assert w_xy == pytest.approx(math.sqrt(1 - 100 * omega**2), rel=1e-14)
    assert abs(w_xy - 1.0) <= 100 * omega**2


@given(st.floats(1e-4, 1e4))
def test_beta_temperature_roundtrip(t):
    th = ThermalPoint(t, boltzmann_k=1.380649e-23)
    assert th.beta * th.temperature * th.boltzmann_k == pytest.approx(1.0, rel=4e-16)
