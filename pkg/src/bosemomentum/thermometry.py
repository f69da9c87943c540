"""Temperature estimation from momentum distributions.

Two least-squares procedures are provided:

* ``maxwell_tail``: fit the free-particle Maxwell-Boltzmann density to the
  target on the shell |p| > p_c;
* ``bose_einstein``: fit the ideal trapped-boson distribution to the target
  over all of momentum space.

Targets are cylindrically symmetric callables ``f(p_rho, p_z)``.  By default
the comparison is per particle: a boson target should be passed as n / N, and
the boson fit family is divided by N to match.
"""

from __future__ import annotations

import enum
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np
from scipy.optimize import minimize_scalar

from bosemomentum.distributions import (
    DistributionSpec,
    GaussianMixture,
    Normalization,
    gauss_legendre,
    maxwell_mixture,
    mixture_for,
)
from bosemomentum.model import ThermalPoint, TrapModel, condensation_temperature
from bosemomentum.partition import partition_table_for

log = logging.getLogger(__name__)

Target = Callable[[np.ndarray, np.ndarray], np.ndarray]

FIG2_P_C = 5.0
FIG2_N_VALUES = (500, 1000, 2000)


class Procedure(str, enum.Enum):
    MAXWELL_TAIL = "maxwell_tail"
    BOSE_EINSTEIN = "bose_einstein"


class Amplitude(str, enum.Enum):
    PER_PARTICLE = "per-particle"
    FREE_SCALE = "free-scale"


class FitError(RuntimeError):
    """The minimizer could not produce a trustworthy temperature."""


class BracketError(FitError):
    pass


@dataclass(frozen=True)
class Quadrature:
    n_nodes: int = 128
    # None: max(10 sqrt(hbar m w), 6 sqrt(2 m k_B T_hi))
    p_max: float | None = None


@dataclass(frozen=True)
class FitConfig:
    procedure: Procedure = Procedure.BOSE_EINSTEIN
    p_c: float = FIG2_P_C
    bracket: tuple[float, float] | None = None
    rel_tol: float = 1e-8
    quadrature: Quadrature = field(default_factory=Quadrature)
    amplitude: Amplitude = Amplitude.PER_PARTICLE
    grid_points: int = 64
    check_quadrature: bool = True

    def __post_init__(self):
        object.__setattr__(self, "procedure", Procedure(self.procedure))
        object.__setattr__(self, "amplitude", Amplitude(self.amplitude))
        if self.p_c < 0:
            raise ValueError(f"p_c must be >= 0, got {self.p_c}")
        if not 0 < self.rel_tol <= 1e-2:
            raise ValueError(f"rel_tol must lie in (0, 1e-2], got {self.rel_tol}")
        if self.bracket is not None:
            lo, hi = self.bracket
            if not 0 < lo < hi:
                raise ValueError(f"bracket must satisfy 0 < T_lo < T_hi, got {self.bracket}")
        if self.grid_points < 3:
            raise ValueError("grid_points must be >= 3")

    def resolved_bracket(self, model: TrapModel) -> tuple[float, float]:
        if self.bracket is not None:
            return self.bracket
        t0 = condensation_temperature(model)
        return 0.05 * t0, 5.0 * t0


@dataclass(frozen=True)
class FitResult:
    fitted_temperature: float
    objective_value: float
    evaluations: int
    bracket_used: tuple[float, float]
    procedure: Procedure
    amplitude: float = 1.0
    quadrature_error: float | None = None


def _tail_p_max(model: TrapModel, t_hi: float, quadrature: Quadrature) -> float:
    if quadrature.p_max is not None:
        return quadrature.p_max
    return max(10.0 * model.momentum_unit, 6.0 * math.sqrt(2.0 * model.mass * model.boltzmann_k * t_hi))


def _eval_target(target: Target, p_rho: np.ndarray, p_z: np.ndarray) -> np.ndarray:
    # isotropic mixtures depend on |p| only; skip the polar direction
    if isinstance(target, GaussianMixture) and np.array_equal(target.a, target.b):
        radius = np.hypot(p_rho, p_z)
        unique, inverse = np.unique(radius, return_inverse=True)
        return np.asarray(target(unique, 0.0))[inverse].reshape(radius.shape)
    return np.asarray(target(p_rho, p_z), dtype=float)


class ShellQuadrature:
    """Nodes and d^3p weights on {p_c <= |p| <= p_max}.

    Radial and polar (0..pi/2, doubled by p_z symmetry) Gauss-Legendre; the
    azimuth contributes 2 pi.
    """

    def __init__(self, p_c: float, p_max: float, n_nodes: int):
        if not p_max > p_c:
            raise ValueError(f"p_max ({p_max:g}) must exceed p_c ({p_c:g})")
        r, wr = gauss_legendre(p_c, p_max, n_nodes)
        theta, wt = gauss_legendre(0.0, 0.5 * math.pi, n_nodes)
        self.radius = r
        self.p_rho = np.outer(r, np.sin(theta))
        self.p_z = np.outer(r, np.cos(theta))
        self.weights = 4.0 * math.pi * np.outer(wr * r * r, wt * np.sin(theta))
        self.p_c, self.p_max, self.n_nodes = p_c, p_max, n_nodes

    def values(self, func: Target) -> np.ndarray:
        return _eval_target(func, self.p_rho, self.p_z)

    def maxwell(self, mass: float, temperature: float, boltzmann_k: float = 1.0) -> np.ndarray:
        mix = maxwell_mixture(mass, ThermalPoint(temperature, boltzmann_k))
        radial = mix(self.radius, 0.0)
        return np.broadcast_to(radial[:, None], self.weights.shape)


class CylinderQuadrature:
    """Tensor Gauss-Legendre on p_rho in [0, p_max], p_z in [0, p_max] (doubled), d^3p weights."""

    def __init__(self, p_max: float, n_nodes: int):
        x, wx = gauss_legendre(0.0, p_max, n_nodes)
        self.nodes = x
        self.weights = 4.0 * math.pi * np.outer(wx * x, wx)
        self.p_max, self.n_nodes = p_max, n_nodes

    def values(self, func: Target) -> np.ndarray:
        if isinstance(func, GaussianMixture):
            return func.grid(self.nodes, self.nodes)
        rho, z = np.meshgrid(self.nodes, self.nodes, indexing="ij")
        return np.asarray(func(rho, z), dtype=float)


def _least_squares(model_values, target_values, weights, amplitude: Amplitude) -> tuple[float, float]:
    """Weighted squared distance and the amplitude used (1, or the optimal prefactor)."""
    if amplitude is Amplitude.FREE_SCALE:
        mm = float(np.sum(weights * model_values * model_values))
        mt = float(np.sum(weights * model_values * target_values))
        tt = float(np.sum(weights * target_values * target_values))
        if mm == 0.0:
            return tt, 0.0
        return max(tt - mt * mt / mm, 0.0), mt / mm
    diff = model_values - target_values
    return float(np.sum(weights * diff * diff)), 1.0


def mb_tail_objective(
    T_trial: float,
    target: Target,
    p_c: float,
    quadrature: ShellQuadrature | Quadrature,
    mass: float = 1.0,
    amplitude: Amplitude = Amplitude.PER_PARTICLE,
    boltzmann_k: float = 1.0,
) -> float:
    """int_{|p|>p_c} (n_maxwell(p; T_trial) - target(p))^2 d^3p.

    ``p_c`` is an absolute momentum.  A bare ``Quadrature`` is expanded into
    shell nodes reaching 6 thermal widths of ``T_trial``.
    """
    if not isinstance(quadrature, ShellQuadrature):
        p_max = quadrature.p_max or max(10.0, p_c + 1.0, 6.0 * math.sqrt(2.0 * mass * boltzmann_k * T_trial))
        quadrature = ShellQuadrature(p_c, p_max, quadrature.n_nodes)
    target_values = quadrature.values(target)
    model_values = quadrature.maxwell(mass, T_trial, boltzmann_k)
    return _least_squares(model_values, target_values, quadrature.weights, Amplitude(amplitude))[0]


def _bose_family(model: TrapModel, temperature: float, per_particle: bool) -> GaussianMixture:
    thermal = ThermalPoint(temperature, model.boltzmann_k)
    table = partition_table_for(model, thermal)
    spec = DistributionSpec(
        "bose_ideal", normalization=Normalization.PER_PARTICLE if per_particle else Normalization.TOTAL_N
    )
    return mixture_for(spec, _ideal(model), thermal, table)


def _ideal(model: TrapModel) -> TrapModel:
    return model if model.is_ideal else replace(model, inter_omega=0.0)


def be_objective(
    T_trial: float,
    target: Target,
    model: TrapModel,
    quadrature: CylinderQuadrature | Quadrature,
    amplitude: Amplitude = Amplitude.PER_PARTICLE,
    per_particle: bool = True,
) -> float:
    """int (n_ideal(p; T_trial) - target(p))^2 d^3p over all momenta.

    The ideal-boson family is rebuilt (partition table included) at every call.
    """
    if not isinstance(quadrature, CylinderQuadrature):
        p_max = quadrature.p_max or max(
            10.0 * model.momentum_unit, 6.0 * math.sqrt(2.0 * model.mass * model.boltzmann_k * T_trial)
        )
        quadrature = CylinderQuadrature(p_max, quadrature.n_nodes)
    family = _bose_family(model, T_trial, per_particle)
    return _least_squares(
        quadrature.values(family), quadrature.values(target), quadrature.weights, Amplitude(amplitude)
    )[0]


class _Objective:
    """Objective with target values cached on fixed nodes."""

    def __init__(self, target: Target, model: TrapModel, config: FitConfig, n_nodes: int, t_hi: float):
        self.model, self.config = model, config
        p_max = _tail_p_max(model, t_hi, config.quadrature)
        if config.procedure is Procedure.MAXWELL_TAIL:
            p_c = config.p_c * model.momentum_unit
            self.quad = ShellQuadrature(p_c, p_max, n_nodes)
        else:
            self.quad = CylinderQuadrature(p_max, n_nodes)
        self.target_values = self.quad.values(target)
        self.evaluations = 0

    def model_values(self, temperature: float) -> np.ndarray:
        m = self.model
        if self.config.procedure is Procedure.MAXWELL_TAIL:
            return self.quad.maxwell(m.mass, temperature, m.boltzmann_k)
        return self.quad.values(_bose_family(m, temperature, per_particle=True))

    def evaluate(self, temperature: float) -> tuple[float, float]:
        self.evaluations += 1
        return _least_squares(
            self.model_values(temperature), self.target_values, self.quad.weights, self.config.amplitude
        )

    def __call__(self, temperature: float) -> float:
        if not temperature > 0:
            return math.inf
        return self.evaluate(temperature)[0]


def fit_temperature(target: Target, model: TrapModel, config: FitConfig = FitConfig()) -> FitResult:
    """Least-squares temperature of ``target`` under ``config.procedure``.

    A log-spaced scan over the bracket locates the basin; golden-section search
    then refines inside the three grid points around the scan minimum.  A scan
    minimum on the bracket edge raises ``BracketError``.
    """
    t_lo, t_hi = config.resolved_bracket(model)
    objective = _Objective(target, model, config, config.quadrature.n_nodes, t_hi)

    temps = np.geomspace(t_lo, t_hi, config.grid_points)
    values = np.array([objective(t) for t in temps])
    if not np.all(np.isfinite(values)):
        raise FitError(f"non-finite objective on the scan grid at T = {temps[~np.isfinite(values)]}")
    k = int(np.argmin(values))
    if k == 0 or k == len(temps) - 1:
        raise BracketError(
            f"{config.procedure.value} objective is minimal at the bracket edge T = {temps[k]:g} "
            f"(bracket [{t_lo:g}, {t_hi:g}])"
        )
    triple = (temps[k - 1], temps[k], temps[k + 1])
    res = minimize_scalar(objective, bracket=triple, method="golden", tol=config.rel_tol)
    t_fit = float(res.x)
    if not triple[0] <= t_fit <= triple[2]:
        raise BracketError(f"golden-section left the bracket {triple} (T = {t_fit:g})")
    value, amp = objective.evaluate(t_fit)

    error = None
    if config.check_quadrature:
        fine = _Objective(target, model, config, 2 * config.quadrature.n_nodes, t_hi)
        error = abs(fine.evaluate(t_fit)[0] - value)
    return FitResult(
        fitted_temperature=t_fit,
        objective_value=value,
        evaluations=objective.evaluations,
        bracket_used=(float(triple[0]), float(triple[2])),
        procedure=config.procedure,
        amplitude=amp,
        quadrature_error=error,
    )


@dataclass(frozen=True)
class SweepRow:
    n_particles: int
    t_be_over_t0: float
    t_be: float
    t_mb: float
    rel_diff: float
    flag: str = "ok"


def _sweep_row(n: int, t_ratio: float, base: TrapModel, config: FitConfig) -> SweepRow:
    model = replace(base, n_particles=n)
    t_be = t_ratio * condensation_temperature(model)
    thermal = ThermalPoint(t_be, model.boltzmann_k)
    table = partition_table_for(model, thermal)
    target = mixture_for(DistributionSpec("bose_ideal", normalization="per_particle"), model, thermal, table)
    try:
        fit = fit_temperature(target, model, config)
    except FitError as exc:
        log.warning("sweep row N=%d T/T0=%g failed: %s", n, t_ratio, exc)
        flag = "bracket_failure" if isinstance(exc, BracketError) else "fit_failure"
        return SweepRow(n, t_ratio, t_be, math.nan, math.nan, flag)
    t_mb = fit.fitted_temperature
    return SweepRow(n, t_ratio, t_be, t_mb, (t_be - t_mb) / t_be)


def bias_sweep(
    n_values=FIG2_N_VALUES,
    t_grid=(),
    p_c: float = FIG2_P_C,
    base: TrapModel | None = None,
    config: FitConfig | None = None,
    workers: int = 1,
) -> list[SweepRow]:
    """Maxwell-tail temperature vs the generating temperature of ideal-boson targets.

    ``t_grid`` is in units of each N's own T0; ``p_c`` in sqrt(hbar m w).
    Rows whose fit fails are kept and flagged.
    """
    base = base or TrapModel(n_particles=1)
    if not base.is_ideal:
        raise ValueError("the bias sweep uses non-interacting targets; set inter_omega = 0")
    config = replace(
        config or FitConfig(check_quadrature=False), procedure=Procedure.MAXWELL_TAIL, p_c=p_c
    )
    jobs = [(int(n), float(t), base, config) for n in n_values for t in t_grid]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_sweep_row, *zip(*jobs)))
    return [_sweep_row(*job) for job in jobs]
