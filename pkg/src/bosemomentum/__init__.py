"""Canonical momentum distribution of harmonically trapped bosons and trap thermometry."""

from bosemomentum.model import (
    InteractionSign,
    ThermalPoint,
    TrapModel,
    condensation_temperature,
    renormalized_frequencies,
)
from bosemomentum.partition import (
    PartitionTable,
    SinhVariant,
    brute_force_partition,
    build_partition_table,
    log_cycle_weight,
    log_partition_ratio,
)
from bosemomentum.distributions import (
    DistributionSpec,
    Family,
    MomentumPoint,
    Normalization,
    a_coefficient,
    eval_bose_exact,
    eval_bose_ideal,
    eval_distinguishable,
    eval_maxwell,
    normalization_integral,
)
from bosemomentum.thermometry import (
    FitConfig,
    FitResult,
    bias_sweep,
    fit_temperature,
)

__version__ = "0.1.0"
