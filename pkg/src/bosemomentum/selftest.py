"""Oracle and invariant checks runnable from the command line."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from bosemomentum.distributions import (
    DistributionSpec,
    eval_bose_exact,
    eval_bose_ideal,
    eval_distinguishable,
    eval_maxwell,
    mixture_for,
    normalization_integral,
)
from bosemomentum.model import ThermalPoint, TrapModel, condensation_temperature
from bosemomentum.partition import brute_force_partition, build_partition_table, partition_table_for
from bosemomentum.thermometry import FitConfig, fit_temperature


@dataclass
class Check:
    name: str
    measured: float
    tolerance: float
    passed: bool


def _partition_oracle() -> Check:
    worst = 0.0
    for beta in (0.3, 1.0, 3.0):
        for freqs in ((1.0, 1.0), (0.7, 1.3), (2.0, 0.5)):
            table = build_partition_table(4, beta, freqs)
            for n in range(1, 5):
                exact = brute_force_partition(n, beta, freqs)
                worst = max(worst, abs(math.exp(table.log_z[n]) / exact - 1.0))
    return Check("partition recursion vs permutation enumeration (N<=4)", worst, 1e-12, worst < 1e-12)


def _normalization() -> Check:
    model = TrapModel(100)
    thermal = ThermalPoint(condensation_temperature(model))
    table = partition_table_for(model, thermal)
    est = normalization_integral(DistributionSpec("bose_ideal"), model, thermal, table)
    dev = abs(est.value / 100 - 1.0)
    return Check("integral of ideal-boson distribution = N (N=100, T=T0)", dev, 1e-4, dev < 1e-4)


def _classical_normalization() -> Check:
    model = TrapModel(1)
    thermal = ThermalPoint(2.0)
    dev = max(
        abs(normalization_integral(DistributionSpec(fam), model, thermal).value - 1.0)
        for fam in ("maxwell", "distinguishable")
    )
    return Check("maxwell and distinguishable integrate to 1", dev, 1e-8, dev < 1e-8)


def _collapse() -> Check:
    model = TrapModel(50)
    thermal = ThermalPoint(0.8 * condensation_temperature(model))
    table = partition_table_for(model, thermal)
    p = np.linspace(0.0, 8.0, 40)
    exact = eval_bose_exact((p, 0.5 * p), model, thermal, table)
    ideal = eval_bose_ideal((p, 0.5 * p), model, thermal, table)
    diff = float(np.max(np.abs(exact - ideal)))
    return Check("bose_exact(omega=0) == bose_ideal bitwise", diff, 0.0, diff == 0.0)


def _classical_limit() -> Check:
    model = TrapModel(1)
    thermal = ThermalPoint(1e3)
    p = np.linspace(0.0, 3.0 * math.sqrt(2e3), 50)
    dist = eval_distinguishable((p, 0.3 * p), model, thermal)
    mb = eval_maxwell((p, 0.3 * p), model.mass, thermal)
    dev = float(np.max(np.abs(dist / mb - 1.0)))
    return Check("distinguishable -> maxwell at beta*hbar*Omega = 1e-3", dev, 1e-3, dev < 1e-3)


def _fit_idempotence(procedure: str) -> Check:
    model = TrapModel(200)
    t_star = 1.3 * condensation_temperature(model)
    thermal = ThermalPoint(t_star)
    if procedure == "bose_einstein":
        target = mixture_for(
            DistributionSpec("bose_ideal", normalization="per_particle"),
            model, thermal, partition_table_for(model, thermal),
        )
    else:
        target = mixture_for(DistributionSpec("maxwell"), model, thermal)
    fit = fit_temperature(target, model, FitConfig(procedure=procedure, check_quadrature=False))
    dev = abs(fit.fitted_temperature / t_star - 1.0)
    return Check(f"fit idempotence ({procedure})", dev, 1e-4, dev < 1e-4)


CHECKS: list[Callable[[], Check]] = [
    _partition_oracle,
    _normalization,
    _classical_normalization,
    _collapse,
    _classical_limit,
    lambda: _fit_idempotence("bose_einstein"),
    lambda: _fit_idempotence("maxwell_tail"),
]


def run_selftest(stream) -> bool:
    ok = True
    for check_fn in CHECKS:
        start = time.perf_counter()
        try:
            check = check_fn()
        except Exception as exc:  # a crashing check is a failed check
            check = Check(f"{getattr(check_fn, '__name__', 'check')} raised {exc!r}", math.nan, math.nan, False)
        ok &= check.passed
        status = "PASS" if check.passed else "FAIL"
        stream.write(
            f"{status}  {check.name}: measured={check.measured:.3e} tol={check.tolerance:.1e} "
            f"({time.perf_counter() - start:.2f}s)\n"
        )
    stream.write("selftest: all checks passed\n" if ok else "selftest: FAILURES\n")
    return ok
