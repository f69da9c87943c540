"""Momentum distributions of trapped bosons and their classical limits.

Every family here is a finite mixture of anisotropic Gaussians,

    n(p) = sum_k c_k exp(-p_rho^2 / a_k - p_z^2 / b_k),

one term per cycle length for the boson families and a single term for the
distinguishable and Maxwell-Boltzmann limits.  ``GaussianMixture`` holds
(log c_k, a_k, b_k) and evaluates pointwise in the log domain or on tensor
grids for quadrature.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.special import logsumexp

from bosemomentum.model import ThermalPoint, TrapModel
from bosemomentum.partition import (
    PartitionTable,
    SinhVariant,
    log_partition_ratio,
    logsinh,
    partition_table_for,
    table_frequencies,
)

_CHUNK_ELEMENTS = 2**22


class Family(str, enum.Enum):
    BOSE_EXACT = "bose_exact"
    BOSE_IDEAL = "bose_ideal"
    DISTINGUISHABLE = "distinguishable"
    MAXWELL = "maxwell"


class Normalization(str, enum.Enum):
    TOTAL_N = "total_N"
    PER_PARTICLE = "per_particle"


@dataclass(frozen=True)
class DistributionSpec:
    family: Family = Family.BOSE_EXACT
    sinh_variant: SinhVariant = SinhVariant.RENORMALIZED
    # None keeps each family's own convention: bose -> N, classical -> 1
    normalization: Normalization | None = None

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        object.__setattr__(self, "sinh_variant", SinhVariant(self.sinh_variant))
        if self.normalization is not None:
            object.__setattr__(self, "normalization", Normalization(self.normalization))

    @property
    def is_bose(self) -> bool:
        return self.family in (Family.BOSE_EXACT, Family.BOSE_IDEAL)


class MomentumPoint(NamedTuple):
    """Transverse magnitude sqrt(p_x^2 + p_y^2) and axial component."""

    p_rho: float
    p_z: float


@dataclass(frozen=True, eq=False)
class GaussianMixture:
    log_c: np.ndarray
    a: np.ndarray
    b: np.ndarray

    def __call__(self, p_rho, p_z):
        """Pointwise value; log-sum-exp over components, chunked to bound memory."""
        rho2, z2 = np.broadcast_arrays(np.square(p_rho, dtype=float), np.square(p_z, dtype=float))
        shape = rho2.shape
        rho2, z2 = rho2.ravel(), z2.ravel()
        out = np.empty(rho2.size)
        step = max(1, _CHUNK_ELEMENTS // len(self.log_c))
        for lo in range(0, rho2.size, step):
            sl = slice(lo, lo + step)
            log_terms = self.log_c - rho2[sl, None] / self.a - z2[sl, None] / self.b
            out[sl] = logsumexp(log_terms, axis=1)
        out = np.exp(out).reshape(shape)
        return float(out) if out.ndim == 0 else out

    def grid(self, p_rho: np.ndarray, p_z: np.ndarray) -> np.ndarray:
        """Values on the tensor grid p_rho x p_z, shape (len(p_rho), len(p_z))."""
        p_rho = np.asarray(p_rho, dtype=float)
        p_z = np.asarray(p_z, dtype=float)
        shift = self.log_c.max()
        rho_part = np.exp(self.log_c - shift - np.square(p_rho)[:, None] / self.a)
        z_part = np.exp(-np.square(p_z)[:, None] / self.b)
        return (rho_part @ z_part.T) * math.exp(shift)

    def scaled(self, factor: float) -> "GaussianMixture":
        return GaussianMixture(self.log_c + math.log(factor), self.a, self.b)

    def analytic_integral(self) -> float:
        """Closed-form integral over all of momentum space, pi^(3/2) sum c a sqrt(b)."""
        return float(np.exp(logsumexp(self.log_c + np.log(self.a) + 0.5 * np.log(self.b))) * math.pi**1.5)

    @property
    def widest(self) -> float:
        return float(max(self.a.max(), self.b.max()))


def _coth(x):
    return 1.0 / np.tanh(x)


def a_coefficient(ell, Omega: float, w: float, beta: float, N: int, hbar: float = 1.0):
    """Gaussian width coefficient of cycle length ``ell``.

    A = w coth(b w ell/2) + (Omega coth(b Omega/2) - w coth(b w/2)) / N, b = beta*hbar.
    The bracket is the center-of-mass correction and vanishes when w == Omega.
    """
    b = beta * hbar
    ell = np.asarray(ell, dtype=float)
    correction = (Omega * _coth(0.5 * b * Omega) - w * _coth(0.5 * b * w)) / N
    out = w * _coth(0.5 * b * w * ell) + correction
    return float(out) if out.ndim == 0 else out


def _cycle_mixture(
    model: TrapModel,
    beta: float,
    table: PartitionTable,
    w: tuple[float, float],
    sinh_freqs: tuple[float, float],
) -> GaussianMixture:
    n = model.n_particles
    hbar, mass = model.hbar, model.mass
    ell = np.arange(1, n + 1)
    a_xy = a_coefficient(ell, model.omega_xy, w[0], beta, n, hbar)
    a_z = a_coefficient(ell, model.omega_z, w[1], beta, n, hbar)
    half = 0.5 * beta * hbar * ell
    log_c = (
        -1.5 * math.log(4.0 * math.pi * hbar * mass)
        + log_partition_ratio(table, ell)
        - 2.0 * logsinh(half * sinh_freqs[0])
        - logsinh(half * sinh_freqs[1])
        - np.log(a_xy)
        - 0.5 * np.log(a_z)
    )
    return GaussianMixture(log_c, hbar * mass * a_xy, hbar * mass * a_z)


def _check_table(table: PartitionTable, model: TrapModel, thermal: ThermalPoint, freqs) -> None:
    if table is None:
        raise ValueError("a partition table is required for the boson families")
    if not table.matches(thermal.beta, freqs[0], freqs[1], model.n_particles):
        raise ValueError(
            "partition table does not match the model/thermal point: "
            f"table (N={table.n_max}, beta={table.beta:g}, w=({table.w_xy:g}, {table.w_z:g})) vs "
            f"expected (N={model.n_particles}, beta={thermal.beta:g}, w=({freqs[0]:g}, {freqs[1]:g}))"
        )


def bose_exact_mixture(model, thermal, table, spec=DistributionSpec()) -> GaussianMixture:
    _check_table(table, model, thermal, table_frequencies(model, table.sinh_variant))
    if spec.sinh_variant is SinhVariant.CONFINEMENT:
        sinh_freqs = (model.omega_xy, model.omega_z)
    else:
        sinh_freqs = model.frequencies
    return _cycle_mixture(model, thermal.beta, table, model.frequencies, sinh_freqs)


def bose_ideal_mixture(model, thermal, table) -> GaussianMixture:
    omegas = (model.omega_xy, model.omega_z)
    _check_table(table, model, thermal, omegas)
    return _cycle_mixture(model, thermal.beta, table, omegas, omegas)


def distinguishable_mixture(model, thermal) -> GaussianMixture:
    b = thermal.beta * model.hbar
    hm = model.hbar * model.mass
    a = hm * model.omega_xy * _coth(0.5 * b * model.omega_xy)
    c = hm * model.omega_z * _coth(0.5 * b * model.omega_z)
    log_c = 0.5 * (
        2.0 * math.log(math.tanh(0.5 * b * model.omega_xy))
        + math.log(math.tanh(0.5 * b * model.omega_z))
        - 3.0 * math.log(math.pi * hm)
        - 2.0 * math.log(model.omega_xy)
        - math.log(model.omega_z)
    )
    return GaussianMixture(np.array([log_c]), np.array([a]), np.array([c]))


def maxwell_mixture(mass: float, thermal: ThermalPoint) -> GaussianMixture:
    beta = thermal.beta
    width = 2.0 * mass / beta
    log_c = 1.5 * math.log(beta / (2.0 * math.pi * mass))
    return GaussianMixture(np.array([log_c]), np.array([width]), np.array([width]))


def mixture_for(
    spec: DistributionSpec,
    model: TrapModel,
    thermal: ThermalPoint,
    table: PartitionTable | None = None,
) -> GaussianMixture:
    """Gaussian-mixture form of the distribution selected by ``spec``, normalization applied."""
    if spec.family is Family.BOSE_EXACT:
        mix = bose_exact_mixture(model, thermal, table, spec)
    elif spec.family is Family.BOSE_IDEAL:
        mix = bose_ideal_mixture(model, thermal, table)
    elif spec.family is Family.DISTINGUISHABLE:
        mix = distinguishable_mixture(model, thermal)
    else:
        mix = maxwell_mixture(model.mass, thermal)
    if spec.is_bose and spec.normalization is Normalization.PER_PARTICLE:
        mix = mix.scaled(1.0 / model.n_particles)
    elif not spec.is_bose and spec.normalization is Normalization.TOTAL_N:
        mix = mix.scaled(float(model.n_particles))
    return mix


def eval_bose_exact(point, model, thermal, table, spec=DistributionSpec()):
    """Canonical N-boson momentum distribution with harmonic interparticle coupling.

    Integrates to N.  ``spec.sinh_variant`` picks the frequencies in the
    per-cycle sinh factors; the Gaussian widths always use A_l(Omega, w).
    """
    return bose_exact_mixture(model, thermal, table, spec)(*point)


def eval_bose_ideal(point, model, thermal, table):
    """Non-interacting limit (w = Omega) of ``eval_bose_exact``; integrates to N."""
    return bose_ideal_mixture(model, thermal, table)(*point)


def eval_distinguishable(point, model, thermal):
    """Single-cycle (Boltzmann statistics) distribution in the trap; integrates to 1."""
    return distinguishable_mixture(model, thermal)(*point)


def eval_maxwell(point, mass, thermal):
    """Free-particle Maxwell-Boltzmann momentum density; integrates to 1."""
    return maxwell_mixture(mass, thermal)(*point)


def default_p_max(model: TrapModel, temperature: float) -> float:
    """max(10 sqrt(hbar m w), 6 sqrt(2 m k_B T)) with w the geometric-mean internal frequency."""
    return max(
        10.0 * model.momentum_unit,
        6.0 * math.sqrt(2.0 * model.mass * model.boltzmann_k * temperature),
    )


def gauss_legendre(lo: float, hi: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    x, wts = np.polynomial.legendre.leggauss(n)
    half = 0.5 * (hi - lo)
    return lo + half * (x + 1.0), half * wts


def cylindrical_integral(mix: GaussianMixture, p_max: float, n_nodes: int) -> float:
    """4 pi int_0^p_max int_0^p_max p_rho n(p_rho, p_z) dp_rho dp_z by tensor Gauss-Legendre."""
    x, wx = gauss_legendre(0.0, p_max, n_nodes)
    values = mix.grid(x, x)
    return float(4.0 * math.pi * (wx * x) @ values @ wx)


@dataclass(frozen=True)
class IntegralEstimate:
    value: float
    error: float
    p_max: float
    n_nodes: int


def normalization_integral(
    spec: DistributionSpec,
    model: TrapModel,
    thermal: ThermalPoint,
    table: PartitionTable | None = None,
    n_nodes: int = 128,
    p_max: float | None = None,
) -> IntegralEstimate:
    """Numerical integral of n over momentum space with a node-doubling error estimate.

    The domain is truncated at ``p_max`` (default: the evaluation-grid default,
    widened to at least 7 standard widths of the broadest mixture component).
    """
    mix = mixture_for(spec, model, thermal, table)
    if p_max is None:
        p_max = max(default_p_max(model, thermal.temperature), 7.0 * math.sqrt(mix.widest))
    coarse = cylindrical_integral(mix, p_max, n_nodes)
    fine = cylindrical_integral(mix, p_max, 2 * n_nodes)
    return IntegralEstimate(fine, abs(fine - coarse), p_max, 2 * n_nodes)


@dataclass(frozen=True)
class ArbitrationRow:
    table_variant: SinhVariant
    sinh_variant: SinhVariant
    integral: float
    error: float
    n_particles: int

    @property
    def relative_deviation(self) -> float:
        return self.integral / self.n_particles - 1.0


def sinh_variant_arbitration(model: TrapModel, thermal: ThermalPoint, n_nodes: int = 128) -> list[ArbitrationRow]:
    """Normalization of ``bose_exact`` for every (table weights, sinh frequencies) pairing.

    The partition sum whose recursion follows from the zero-momentum-transfer
    limit carries renormalized weights; pairing it with confinement-frequency
    sinh factors breaks the sum rule (integral != N) whenever omega != 0.
    """
    rows = []
    for table_variant in SinhVariant:
        table = partition_table_for(model, thermal, table_variant)
        for sinh_variant in SinhVariant:
            est = normalization_integral(DistributionSpec(Family.BOSE_EXACT, sinh_variant), model, thermal, table, n_nodes)
            rows.append(ArbitrationRow(table_variant, sinh_variant, est.value, est.error, model.n_particles))
    return rows
