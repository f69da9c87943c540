"""Command-line interface: ``bosemomentum {dist,fit,fig1,fig2,selftest}``.

Exit codes: 0 success, 1 numerical failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys

import numpy as np

from bosemomentum.csvio import RunManifest, TabulatedDistribution, write_csv
from bosemomentum.distributions import DistributionSpec, default_p_max, mixture_for
from bosemomentum.model import InteractionSign, ThermalPoint, TrapModel, condensation_temperature
from bosemomentum.partition import SinhVariant, partition_table_for
from bosemomentum.thermometry import (
    FIG2_N_VALUES,
    FIG2_P_C,
    Amplitude,
    FitConfig,
    FitError,
    Procedure,
    Quadrature,
    bias_sweep,
    fit_temperature,
)

log = logging.getLogger("bosemomentum")

MODEL_FAMILIES = {"bose": "bose_exact", "ideal": "bose_ideal", "dist": "distinguishable", "maxwell": "maxwell"}
FIG1_TEMPS = (0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 2.0)


class NumericalFailure(RuntimeError):
    pass


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of numbers, got {text!r}")


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of integers, got {text!r}")


def _positive(kind):
    def parse(text):
        value = kind(text)
        if not value > 0:
            raise argparse.ArgumentTypeError(f"must be positive, got {text}")
        return value

    return parse


def _add_model_args(p: argparse.ArgumentParser, n_default: int | None = 1000) -> None:
    g = p.add_argument_group("trap model (natural units hbar = m = k_B = 1 unless overridden)")
    if n_default is not None:
        g.add_argument("--n", type=_positive(int), default=n_default, help="number of bosons N")
    g.add_argument("--omega-xy", type=_positive(float), default=1.0, help="radial confinement frequency")
    g.add_argument("--omega-z", type=_positive(float), default=1.0, help="axial confinement frequency")
    g.add_argument("--inter-omega", type=float, default=0.0, help="harmonic interparticle frequency omega")
    g.add_argument("--sign", choices=[s.value for s in InteractionSign], default="attractive")
    g.add_argument("--mass", type=_positive(float), default=1.0)
    g.add_argument("--hbar", type=_positive(float), default=1.0)
    g.add_argument("--kb", type=_positive(float), default=1.0, help="Boltzmann constant")


def _model(parser, args, n: int | None = None) -> TrapModel:
    if args.inter_omega < 0:
        parser.error("--inter-omega must be >= 0")
    try:
        return TrapModel(
            n_particles=n if n is not None else args.n,
            omega_xy=args.omega_xy,
            omega_z=args.omega_z,
            inter_omega=args.inter_omega,
            inter_sign=args.sign,
            mass=args.mass,
            hbar=args.hbar,
            boltzmann_k=args.kb,
        )
    except ValueError as exc:
        parser.error(f"--inter-omega/--sign: {exc}")


def _model_params(model: TrapModel) -> dict:
    return {
        "n_particles": model.n_particles,
        "omega_xy": model.omega_xy,
        "omega_z": model.omega_z,
        "inter_omega": model.inter_omega,
        "inter_sign": model.inter_sign,
        "mass": model.mass,
        "hbar": model.hbar,
        "boltzmann_k": model.boltzmann_k,
        "w_xy,w_z": model.frequencies,
        "T0": condensation_temperature(model),
    }


def _temperature(parser, args, model: TrapModel) -> float:
    if args.temp is not None:
        return args.temp
    if args.temp_t0 is not None:
        return args.temp_t0 * condensation_temperature(model)
    parser.error("one of --temp or --temp-t0 is required")


def cmd_dist(parser, args, argv) -> int:
    family = MODEL_FAMILIES[args.model]
    if family == "bose_ideal" and args.inter_omega != 0:
        parser.error("--model ideal requires --inter-omega 0 (the ideal gas has no interaction)")
    model = _model(parser, args)
    temp = _temperature(parser, args, model)
    thermal = ThermalPoint(temp, model.boltzmann_k)
    spec = DistributionSpec(family, args.sinh_variant, args.normalization)
    table = None
    if spec.is_bose:
        variant = args.sinh_variant if family == "bose_exact" else SinhVariant.CONFINEMENT
        table = partition_table_for(model, thermal, variant)
    mix = mixture_for(spec, model, thermal, table)
    p_max = args.p_max if args.p_max is not None else default_p_max(model, temp)
    axis = np.linspace(0.0, p_max, args.points)
    values = mix.grid(axis, axis)
    if not np.all(np.isfinite(values)):
        raise NumericalFailure("non-finite distribution values")
    params = _model_params(model) | {
        "temperature": temp,
        "model": family,
        "sinh_variant": spec.sinh_variant,
        "normalization": spec.normalization or ("total_N" if spec.is_bose else "per_particle"),
        "p_max": p_max,
        "points": args.points,
    }
    rows = ((r, z, values[i, j]) for i, r in enumerate(axis) for j, z in enumerate(axis))
    write_csv(args.out, RunManifest.create("dist", params, argv), ["p_rho", "p_z", "n"], rows)
    return 0


def cmd_fit(parser, args, argv) -> int:
    model = _model(parser, args)
    try:
        target = TabulatedDistribution.from_csv(args.input)
    except (OSError, ValueError) as exc:
        parser.error(f"--input: {exc}")
    if args.input_normalization == "total_N":
        target = target.scaled(1.0 / model.n_particles)
    t0 = condensation_temperature(model)
    bracket = (args.t_lo * t0, args.t_hi * t0)
    if not bracket[0] < bracket[1]:
        parser.error("--t-lo must be smaller than --t-hi")
    tail_p_max = max(10.0 * model.momentum_unit, 6.0 * math.sqrt(2.0 * model.mass * model.boltzmann_k * bracket[1]))
    p_max = min(args.p_max or tail_p_max, target.p_max)
    if args.procedure == "maxwell_tail" and p_max <= args.pc * model.momentum_unit:
        parser.error("--pc lies beyond the sampled momentum range of --input")
    config = FitConfig(
        procedure=args.procedure,
        p_c=args.pc,
        bracket=bracket,
        rel_tol=args.rel_tol,
        quadrature=Quadrature(args.nodes, p_max),
        amplitude=args.amplitude,
    )
    result = fit_temperature(target, model, config)
    params = _model_params(model) | {
        "input": args.input,
        "input_normalization": args.input_normalization,
        "procedure": config.procedure,
        "p_c": config.p_c,
        "bracket": bracket,
        "rel_tol": config.rel_tol,
        "nodes": args.nodes,
        "p_max": p_max,
        "amplitude": config.amplitude,
    }
    columns = ["procedure", "T_fit", "T_fit_over_T0", "objective", "evaluations", "bracket_lo", "bracket_hi",
               "amplitude", "quadrature_error"]
    row = (result.procedure.value, result.fitted_temperature, result.fitted_temperature / t0,
           result.objective_value, result.evaluations, *result.bracket_used, result.amplitude,
           result.quadrature_error)
    write_csv(args.out, RunManifest.create("fit", params, argv), columns, [row])
    return 0


def cmd_fig1(parser, args, argv) -> int:
    model = _model(parser, args)
    t0 = condensation_temperature(model)
    spec = DistributionSpec("bose_exact", args.sinh_variant)
    p = np.linspace(0.0, args.p_max, args.points) * model.momentum_unit

    def mixture(t_ratio):
        thermal = ThermalPoint(t_ratio * t0, model.boltzmann_k)
        return mixture_for(spec, model, thermal, partition_table_for(model, thermal, args.sinh_variant))

    curves = []
    for t_ratio in args.temps:
        mix = mixture(t_ratio)
        values = mix(p, 0.0)
        curves += [(t_ratio * t0, pk / model.momentum_unit, v) for pk, v in zip(p, values / mix(0.0, 0.0))]
    inset_grid = np.linspace(args.inset_t_min, args.inset_t_max, args.inset_steps)
    inset = [(t, mixture(t)(0.0, 0.0)) for t in inset_grid]
    if not all(math.isfinite(v) for row in curves + inset for v in row):
        raise NumericalFailure("non-finite values in figure 1 data")

    params = _model_params(model) | {
        "sinh_variant": spec.sinh_variant,
        "temps_over_T0": args.temps,
        "p_max_over_p0": args.p_max,
        "points": args.points,
        "inset_T_over_T0": (args.inset_t_min, args.inset_t_max, args.inset_steps),
    }
    manifest = RunManifest.create("fig1", params, argv)
    write_csv(f"{args.out_prefix}_curves.csv", manifest, ["T", "p", "n_over_n0"], curves)
    write_csv(f"{args.out_prefix}_inset.csv", manifest, ["T_over_T0", "n_at_zero"], inset)
    return 0


def cmd_fig2(parser, args, argv) -> int:
    model = _model(parser, args, n=1)
    if not model.is_ideal:
        parser.error("--inter-omega must be 0: the sweep fits non-interacting targets")
    t_grid = np.linspace(args.t_min, args.t_max, args.steps)
    config = FitConfig(
        procedure=Procedure.MAXWELL_TAIL, rel_tol=args.rel_tol, quadrature=Quadrature(args.nodes),
        amplitude=args.amplitude, check_quadrature=False,
    )
    rows = bias_sweep(args.n_list, t_grid, args.pc, base=model, config=config, workers=args.workers)
    params = _model_params(model) | {
        "n_list": args.n_list,
        "T_BE_over_T0": (args.t_min, args.t_max, args.steps),
        "p_c": args.pc,
        "nodes": args.nodes,
        "rel_tol": args.rel_tol,
        "amplitude": Amplitude(args.amplitude),
    }
    del params["n_particles"], params["T0"]
    out = [(r.n_particles, r.t_be_over_t0, r.t_mb, r.rel_diff, r.flag) for r in rows]
    write_csv(args.out, RunManifest.create("fig2", params, argv), ["N", "T_BE_over_T0", "T_MB", "rel_diff", "flag"],
              out, nullable=("T_MB", "rel_diff"))
    if all(r.flag != "ok" for r in rows):
        raise NumericalFailure("every sweep row failed")
    return 0


def cmd_selftest(parser, args, argv) -> int:
    from bosemomentum.selftest import run_selftest

    return 0 if run_selftest(sys.stdout) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bosemomentum", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dist", help="evaluate a momentum distribution on a (p_rho, p_z) grid")
    _add_model_args(p)
    t = p.add_mutually_exclusive_group()
    t.add_argument("--temp", type=_positive(float), help="temperature (absolute units)")
    t.add_argument("--temp-t0", type=_positive(float), help="temperature in units of T0")
    p.add_argument("--model", choices=list(MODEL_FAMILIES), default="bose")
    p.add_argument("--sinh-variant", choices=[v.value for v in SinhVariant], default="renormalized")
    p.add_argument("--normalization", choices=["total_N", "per_particle"], default=None,
                   help="default: N for boson families, 1 for classical ones")
    p.add_argument("--p-max", type=_positive(float), default=None,
                   help="grid extent on both axes (default max(10 sqrt(hbar m w), 6 sqrt(2 m k_B T)))")
    p.add_argument("--points", type=_positive(int), default=200, help="grid points per axis")
    p.add_argument("--out", default="-", help="output CSV (default stdout)")
    p.set_defaults(handler=cmd_dist)

    p = sub.add_parser("fit", help="fit a temperature to a tabulated distribution (dist CSV schema)")
    _add_model_args(p)
    p.add_argument("--input", required=True, help="CSV with columns p_rho,p_z,n")
    p.add_argument("--input-normalization", choices=["total_N", "per_particle"], default="total_N")
    p.add_argument("--procedure", choices=[v.value for v in Procedure], default="bose_einstein")
    p.add_argument("--pc", type=float, default=FIG2_P_C, help="tail threshold in sqrt(hbar m w)")
    p.add_argument("--t-lo", type=_positive(float), default=0.05, help="bracket low end, units of T0")
    p.add_argument("--t-hi", type=_positive(float), default=5.0, help="bracket high end, units of T0")
    p.add_argument("--rel-tol", type=_positive(float), default=1e-8)
    p.add_argument("--nodes", type=_positive(int), default=128)
    p.add_argument("--p-max", type=_positive(float), default=None)
    p.add_argument("--amplitude", choices=[a.value for a in Amplitude], default="per-particle")
    p.add_argument("--out", default="-")
    p.set_defaults(handler=cmd_fit)

    p = sub.add_parser("fig1", help="momentum profiles n(p)/n(0) and n(0) versus temperature")
    _add_model_args(p)
    p.add_argument("--temps", type=_float_list, default=list(FIG1_TEMPS), help="temperatures in units of T0")
    p.add_argument("--sinh-variant", choices=[v.value for v in SinhVariant], default="renormalized")
    p.add_argument("--p-max", type=_positive(float), default=8.0, help="radial cut extent in p0 units")
    p.add_argument("--points", type=_positive(int), default=161)
    p.add_argument("--inset-t-min", type=_positive(float), default=0.05)
    p.add_argument("--inset-t-max", type=_positive(float), default=2.0)
    p.add_argument("--inset-steps", type=_positive(int), default=40)
    p.add_argument("--out-prefix", default="fig1")
    p.set_defaults(handler=cmd_fig1)

    p = sub.add_parser("fig2", help="Maxwell-tail temperature bias against the ideal-boson temperature")
    _add_model_args(p, n_default=None)
    p.add_argument("--n-list", type=_int_list, default=list(FIG2_N_VALUES))
    p.add_argument("--t-min", type=_positive(float), default=0.05, help="units of T0")
    p.add_argument("--t-max", type=_positive(float), default=2.0, help="units of T0")
    p.add_argument("--steps", type=_positive(int), default=40)
    p.add_argument("--pc", type=float, default=FIG2_P_C, help="tail threshold in sqrt(hbar m w)")
    p.add_argument("--rel-tol", type=_positive(float), default=1e-8)
    p.add_argument("--nodes", type=_positive(int), default=128)
    p.add_argument("--amplitude", choices=[a.value for a in Amplitude], default="per-particle")
    p.add_argument("--workers", type=_positive(int), default=1)
    p.add_argument("--out", default="-")
    p.set_defaults(handler=cmd_fig2)

    p = sub.add_parser("selftest", help="run oracle and invariant checks")
    p.set_defaults(handler=cmd_selftest)
    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    sub_parser = parser._subparsers._group_actions[0].choices[args.command]
    try:
        return args.handler(sub_parser, args, argv)
    except (NumericalFailure, FitError, FloatingPointError, ValueError) as exc:
        print(f"bosemomentum {args.command}: numerical failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
