import math

import numpy as np
import pytest

from bosemomentum import DistributionSpec, ThermalPoint, TrapModel, condensation_temperature
from bosemomentum.distributions import mixture_for
from bosemomentum.partition import partition_table_for
from bosemomentum.thermometry import (
    BracketError,
    FitConfig,
    Quadrature,
    ShellQuadrature,
    be_objective,
    bias_sweep,
    fit_temperature,
    mb_tail_objective,
)


def maxwell_target(t):
    return mixture_for(DistributionSpec("maxwell"), TrapModel(1), ThermalPoint(t))


def boson_target(n, t_ratio, **kw):
    model = TrapModel(n, **kw)
    thermal = ThermalPoint(t_ratio * condensation_temperature(model))
    table = partition_table_for(model, thermal)
    mix = mixture_for(DistributionSpec("bose_ideal", normalization="per_particle"), model, thermal, table)
    return model, thermal.temperature, mix


def test_shell_quadrature_volume():
    quad = ShellQuadrature(2.0, 5.0, 32)
    assert quad.weights.sum() == pytest.approx(4 / 3 * math.pi * (5.0**3 - 2.0**3), rel=1e-13)


def test_tail_objective_self_match_and_separation():
    target = maxwell_target(3.0)
    quad = ShellQuadrature(5.0, 30.0, 128)
    assert mb_tail_objective(3.0, target, 5.0, quad) < 1e-30
    for t in (2.5, 2.99, 3.01, 4.0):
        assert mb_tail_objective(t, target, 5.0, quad) > 0


def test_tail_objective_on_condensed_gas_prefers_lower_temperature():
    model, t_be, target = boson_target(1000, 0.5)
    quad = ShellQuadrature(5.0, 6 * math.sqrt(2 * 5 * t_be), 128)
    temps = np.geomspace(0.2 * t_be, 2 * t_be, 200)
    values = [mb_tail_objective(t, target, 5.0, quad) for t in temps]
    best = temps[int(np.argmin(values))]
    assert min(values) > 0
    assert best < t_be


def test_be_objective_self_match_and_continuity():
    model, t_be, target = boson_target(400, 1.3)
    quad = Quadrature(128, 60.0)
    assert be_objective(t_be, target, model, quad) < 1e-25
    t0 = condensation_temperature(model)
    values = np.array([be_objective(r * t0, target, model, quad) for r in np.geomspace(0.1, 5, 25)])
    assert np.all(np.isfinite(values)) and np.all(values >= 0)


@pytest.mark.slow
def test_be_objective_finite_for_large_n():
    model, _, target = boson_target(2000, 0.7)
    t0 = condensation_temperature(model)
    for r in (0.1, 0.5, 1.0, 5.0):
        assert math.isfinite(be_objective(r * t0, target, model, Quadrature(128)))


def test_be_fit_recovers_generator():
    model, t_star, target = boson_target(1000, 1.2)
    fit = fit_temperature(target, model, FitConfig(procedure="bose_einstein"))
    assert fit.fitted_temperature == pytest.approx(t_star, rel=1e-7)
    assert fit.bracket_used[0] <= fit.fitted_temperature <= fit.bracket_used[1]
    assert fit.quadrature_error < 1e-12


@pytest.mark.parametrize("p_c", [0.0, 2.0, 5.0, 8.0])
@pytest.mark.parametrize("t_ratio", [0.3, 1.0, 3.0])
def test_tail_fit_recovers_maxwell_generator(p_c, t_ratio):
    model = TrapModel(1000)
    t_star = t_ratio * condensation_temperature(model)
    fit = fit_temperature(maxwell_target(t_star), model, FitConfig(procedure="maxwell_tail", p_c=p_c))
    assert fit.fitted_temperature == pytest.approx(t_star, rel=1e-7)


def test_tail_fit_is_biased_below_t0():
    model, t_star, target = boson_target(1000, 0.6)
    fit = fit_temperature(target, model, FitConfig(procedure="maxwell_tail", p_c=5.0))
    assert (t_star - fit.fitted_temperature) / t_star > 0.01


def test_be_fit_normalization_sensitivity():
    model, t_star, target = boson_target(300, 0.8)
    config = FitConfig(procedure="bose_einstein", check_quadrature=False)
    shifted = fit_temperature(target.scaled(1.05), model, config).fitted_temperature
    assert abs(shifted / t_star - 1) > 1e-3


def test_free_scale_amplitude_argmin_invariance():
    model, _, target = boson_target(1000, 0.6)
    config = FitConfig(procedure="maxwell_tail", amplitude="free-scale", check_quadrature=False)
    base = fit_temperature(target, model, config)
    scaled = fit_temperature(target.scaled(7.5), model, config)
    assert scaled.fitted_temperature == pytest.approx(base.fitted_temperature, rel=1e-6)
    assert scaled.amplitude == pytest.approx(7.5 * base.amplitude, rel=1e-6)


def test_per_particle_scaling_invariance_when_both_sides_scale():
    model, t_star, target = boson_target(500, 0.7)
    quad = ShellQuadrature(5.0, 40.0, 64)
    temps = np.geomspace(0.3 * t_star, 2 * t_star, 60)
    plain = [mb_tail_objective(t, target, 5.0, quad) for t in temps]
    c = 3.0
    both = [
        np.sum(quad.weights * (c * quad.maxwell(1.0, t) - quad.values(target.scaled(c))) ** 2) for t in temps
    ]
    assert np.argmin(plain) == np.argmin(both)
    assert np.allclose(both, c * c * np.array(plain), rtol=1e-12)


def test_bracket_failure_is_explicit():
    model = TrapModel(1000)
    t0 = condensation_temperature(model)
    with pytest.raises(BracketError):
        fit_temperature(maxwell_target(10 * t0), model, FitConfig(procedure="maxwell_tail", check_quadrature=False))


@pytest.mark.parametrize(
    "kw", [{"bracket": (2.0, 1.0)}, {"p_c": -1.0}, {"rel_tol": 0.5}, {"rel_tol": 0.0}, {"procedure": "nope"}]
)
def test_config_validation(kw):
    with pytest.raises(ValueError):
        FitConfig(**kw)


def test_bias_below_t0_has_one_sign():
    rows = bias_sweep((500, 1000, 2000), (0.3, 0.5, 0.8))
    assert all(r.flag == "ok" and r.rel_diff > 0 for r in rows)


def test_sweep_flags_failed_rows():
    rows = bias_sweep((2000,), (0.05,))
    assert rows[0].flag == "bracket_failure" and math.isnan(rows[0].t_mb)


def test_sweep_parallel_matches_serial():
    serial = bias_sweep((500, 1000), (0.7, 1.4))
    parallel = bias_sweep((500, 1000), (0.7, 1.4), workers=2)
    assert serial == parallel


def test_sweep_rejects_interacting_base():
    with pytest.raises(ValueError):
        bias_sweep((500,), (1.0,), base=TrapModel(1, inter_omega=0.1))
