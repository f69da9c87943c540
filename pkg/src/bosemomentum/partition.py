"""Log-domain canonical partition sums for the internal oscillator modes.

Z(n) obeys the cycle recursion

    n Z(n) = sum_{l=1}^{n} z(l) Z(n - l),    Z(0) = 1,

with z(l) = 1 / (8 sinh(l b w_z / 2) sinh^2(l b w_xy / 2)) the single-particle
sum at inverse temperature l*beta (b = beta*hbar).  The center-of-mass
prefactor is independent of n at fixed frequencies and drops out of every
Z(N - l) / Z(N) ratio, so it is not carried.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass

import numpy as np

from bosemomentum.model import ThermalPoint, TrapModel

LOG2 = math.log(2.0)
LOG8 = math.log(8.0)
BRUTE_FORCE_MAX_N = 5


class SinhVariant(str, enum.Enum):
    """Which frequencies enter the per-cycle sinh weights.

    ``renormalized`` uses the internal frequencies w, ``confinement`` the bare
    trap frequencies Omega. The two coincide when the interaction vanishes.
    """

    RENORMALIZED = "renormalized"
    CONFINEMENT = "confinement"


def logsinh(x):
    """log(sinh(x)) for x > 0 without overflow at large x or cancellation at small x."""
    x = np.asarray(x, dtype=float)
    return x - LOG2 + np.log(-np.expm1(-2.0 * x))


def log_cycle_weight(ell, beta: float, w_xy: float, w_z: float, hbar: float = 1.0):
    """log z(ell) = -(log 8 + logsinh(ell b w_z/2) + 2 logsinh(ell b w_xy/2)), b = beta*hbar.

    Accepts a scalar or an array of cycle lengths.
    """
    ell = np.asarray(ell, dtype=float)
    half = 0.5 * beta * hbar * ell
    out = -(LOG8 + logsinh(half * w_z) + 2.0 * logsinh(half * w_xy))
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True, eq=False)
class PartitionTable:
    log_z: np.ndarray
    beta: float
    w_xy: float
    w_z: float
    sinh_variant: SinhVariant = SinhVariant.RENORMALIZED
    hbar: float = 1.0

    @property
    def n_max(self) -> int:
        return len(self.log_z) - 1

    def log_cycle_weights(self, n: int | None = None) -> np.ndarray:
        """log z(l) for l = 1..n (default n_max)."""
        n = self.n_max if n is None else n
        return log_cycle_weight(np.arange(1, n + 1), self.beta, self.w_xy, self.w_z, self.hbar)

    def matches(self, beta: float, w_xy: float, w_z: float, n: int) -> bool:
        return (
            self.n_max == n
            and math.isclose(self.beta, beta, rel_tol=1e-14)
            and math.isclose(self.w_xy, w_xy, rel_tol=1e-14)
            and math.isclose(self.w_z, w_z, rel_tol=1e-14)
        )


def build_partition_table(
    n_max: int,
    beta: float,
    freqs: tuple[float, float],
    sinh_variant: SinhVariant | str = SinhVariant.RENORMALIZED,
    hbar: float = 1.0,
) -> PartitionTable:
    """Run the cycle recursion for log Z(0..n_max). O(n_max^2)."""
    if n_max < 0:
        raise ValueError(f"n_max must be >= 0, got {n_max}")
    if beta <= 0:
        raise ValueError(f"beta must be positive, got {beta}")
    w_xy, w_z = (float(f) for f in freqs)
    log_w = log_cycle_weight(np.arange(1, n_max + 1), beta, w_xy, w_z, hbar)
    log_z = np.zeros(n_max + 1)
    for n in range(1, n_max + 1):
        # log_z[n-1::-1] lists log Z(n-1), ..., log Z(0), aligned with l = 1..n
        terms = log_w[:n] + log_z[n - 1 :: -1]
        top = terms.max()
        log_z[n] = top + math.log(np.exp(terms - top).sum()) - math.log(n)
    log_z.setflags(write=False)
    return PartitionTable(log_z, float(beta), w_xy, w_z, SinhVariant(sinh_variant), hbar)


def table_frequencies(model: TrapModel, sinh_variant: SinhVariant | str) -> tuple[float, float]:
    if SinhVariant(sinh_variant) is SinhVariant.CONFINEMENT:
        return model.omega_xy, model.omega_z
    return model.frequencies


def partition_table_for(
    model: TrapModel,
    thermal: ThermalPoint,
    sinh_variant: SinhVariant | str = SinhVariant.RENORMALIZED,
) -> PartitionTable:
    """Table for ``model`` at ``thermal`` with cycle weights chosen by ``sinh_variant``."""
    return build_partition_table(
        model.n_particles,
        thermal.beta,
        table_frequencies(model, sinh_variant),
        sinh_variant,
        model.hbar,
    )


def log_partition_ratio(table: PartitionTable, ell):
    """log Z(N - ell) - log Z(N) with N = table.n_max; ``ell`` scalar or array in [1, N]."""
    ell_arr = np.asarray(ell)
    n = table.n_max
    if np.any(ell_arr < 1) or np.any(ell_arr > n):
        raise IndexError(f"cycle length must lie in [1, {n}], got {ell!r}")
    out = table.log_z[n - ell_arr] - table.log_z[n]
    return float(out) if out.ndim == 0 else out


def _cycle_type(perm: tuple[int, ...]) -> list[int]:
    seen = [False] * len(perm)
    lengths = []
    for start in range(len(perm)):
        if seen[start]:
            continue
        length, j = 0, start
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        lengths.append(length)
    return lengths


def brute_force_partition(n: int, beta: float, freqs: tuple[float, float], hbar: float = 1.0) -> float:
    """(1/n!) sum over all n! permutations of prod_cycles z(cycle length), linear domain.

    Independent of the recursion; used as its oracle.
    """
    if n > BRUTE_FORCE_MAX_N:
        raise ValueError(f"brute-force enumeration is limited to n <= {BRUTE_FORCE_MAX_N}, got {n}")
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    w_xy, w_z = freqs

    def z(ell: int) -> float:
        b = beta * hbar * ell / 2.0
        return 1.0 / (8.0 * math.sinh(b * w_z) * math.sinh(b * w_xy) ** 2)

    weights = [math.prod(z(ell) for ell in _cycle_type(p)) for p in itertools.permutations(range(n))]
    return math.fsum(weights) / math.factorial(n)
