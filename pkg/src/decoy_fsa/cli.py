"""Command-line front end: presets, figure-reproduction recipes, CSV output.

Exit codes: 0 success, 1 runtime failure, 2 configuration error, 3 validation
failure (analytic vs Monte Carlo disagreement beyond 3 sigma).
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path
from typing import Sequence

from . import search, security
from .faked_states import FakedStateIntensities
from .model import ConfigError, SystemParams, efficiency_matrix, preset
from .observables import (
    AttackStrategy,
    Baseline,
    PNRD,
    QND,
    observables_for,
    strategy_label,
)
from .oracle import simulate_pulses

VALIDATE_HEADER = (
    "strategy", "L", "quantity", "analytic", "empirical", "sigma", "z", "pass",
)

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_CONFIG = 2
EXIT_VALIDATION = 3


def _parse_values(text: str, name: str) -> tuple[float, ...]:
    """Parse 'start:stop:step' (inclusive of stop when it lands on-grid) or 'a,b,c'."""
    try:
        if ":" in text:
            start_s, stop_s, step_s = text.split(":")
            start, stop, step = float(start_s), float(stop_s), float(step_s)
            if step <= 0 or stop < start:
                raise ValueError("need start <= stop and step > 0")
            count = int(math.floor((stop - start) / step + 1e-9)) + 1
            return tuple(start + i * step for i in range(count))
        return tuple(float(part) for part in text.split(","))
    except ValueError as exc:
        raise ConfigError(f"invalid {name} specification {text!r}: {exc}") from exc


def _load_params(args: argparse.Namespace) -> SystemParams:
    params = preset(args.preset)
    if args.config is not None:
        params = SystemParams.from_config(args.config, base=params)
    if getattr(args, "distance", None) is not None:
        params = params.replace(distance=args.distance)
    return params


def _build_strategy(args: argparse.Namespace) -> AttackStrategy:
    kind = args.strategy
    if kind == "baseline":
        return Baseline()
    if args.k is None or args.mu_prime is None:
        raise ConfigError(f"strategy {kind!r} requires --k and --mu-prime")
    try:
        if kind == "qnd":
            return QND(mu_prime=args.mu_prime, k=args.k)
        if args.eta_e is None:
            raise ConfigError("strategy 'pnrd' requires --eta-e")
        return PNRD(mu_prime=args.mu_prime, k=args.k, eta_e=args.eta_e)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="decoy-fsa",
        description=(
            "Analyze faked-states attacks on weak+vacuum decoy-state BB84 "
            "receivers with detector efficiency mismatch."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser, with_strategy: bool = True) -> None:
        p.add_argument("--preset", default="gys", help="named parameter preset")
        p.add_argument("--config", default=None, help="flat JSON parameter file")
        p.add_argument("--out", default=None, help="output CSV path")
        if with_strategy:
            p.add_argument("--strategy", choices=("baseline", "qnd", "pnrd"),
                           default="baseline")
            p.add_argument("--k", type=float, default=None,
                           help="detector efficiency mismatch ratio")
            p.add_argument("--mu-prime", type=float, default=None,
                           help="faked-state mean photon number")
            p.add_argument("--eta-e", type=float, default=None,
                           help="eavesdropper PNRD single-photon efficiency")

    p_rate = sub.add_parser("rate", help="evaluate one (distance, strategy) point")
    add_common(p_rate)
    p_rate.add_argument("--distance", type=float, default=None, help="fiber length, km")

    p_scan = sub.add_parser("scan", help="key-rate scan over distance")
    add_common(p_scan)
    p_scan.add_argument("--distances", default="0:200:2",
                        help="'start:stop:step' or comma list, km")
    p_scan.add_argument("--recipe", choices=("fig3", "fig6", "fig7"), default=None,
                        help="named two-curve/one-curve reproduction recipe")

    p_sweep = sub.add_parser("sweep", help="(k, mu') feasibility surface at one distance")
    add_common(p_sweep, with_strategy=False)
    p_sweep.add_argument("--distance", type=float, default=100.0)
    p_sweep.add_argument("--k-values", default="10:1000:10")
    p_sweep.add_argument("--mu-prime-values", default="0:2000:20")
    p_sweep.add_argument("--eta-e", type=float, default=None,
                         help="use the PNRD strategy with this efficiency")
    p_sweep.add_argument("--recipe", choices=("fig2",), default=None)

    p_kmin = sub.add_parser("kmin", help="minimum attackable mismatch ratio per distance")
    add_common(p_kmin, with_strategy=False)
    p_kmin.add_argument("--distances", default="1:140:10")
    p_kmin.add_argument("--tol", type=float, default=0.5)
    p_kmin.add_argument("--eta-e", type=float, default=None)
    p_kmin.add_argument("--recipe", choices=("fig4",), default=None)

    p_val = sub.add_parser("validate",
                           help="Monte Carlo vs closed-form comparison at 3 sigma")
    add_common(p_val)
    p_val.add_argument("--distance", type=float, default=None)
    p_val.add_argument("--n-pulses", type=int, default=1_000_000)
    p_val.add_argument("--seed", type=int, default=20240901)
    p_val.add_argument("--manifest", default=None,
                       help="also write the run manifest (JSON) to this path")

    return parser


def _cmd_rate(args: argparse.Namespace) -> int:
    params = _load_params(args)
    strategy = _build_strategy(args)
    row = search.scan_row_for(params, strategy)
    for name, value in zip(search.SCAN_HEADER, row):
        print(f"{name} = {value}")
    if args.out:
        search.write_csv(args.out, search.SCAN_HEADER, [row])
    return EXIT_OK


_SCAN_RECIPES: dict[str, tuple[tuple[AttackStrategy, ...], str]] = {
    "fig3": ((Baseline(), QND(mu_prime=300.0, k=310.0)), "0:200:2"),
    "fig6": ((Baseline(), PNRD(mu_prime=900.0, k=1000.0, eta_e=0.1)), "0:200:2"),
    "fig7": ((PNRD(mu_prime=900.0, k=1000.0, eta_e=0.1),), "0:180:2"),
}


def _cmd_scan(args: argparse.Namespace) -> int:
    params = _load_params(args)
    if args.recipe is not None:
        strategies, distances_spec = _SCAN_RECIPES[args.recipe]
        distances = _parse_values(distances_spec, "--distances")
    else:
        strategies = (_build_strategy(args),)
        distances = _parse_values(args.distances, "--distances")
    rows = []
    for strategy in strategies:
        rows.extend(search.distance_scan(params, strategy, distances))
    out = args.out or f"scan_{args.recipe or strategy_label(strategies[0])}.csv"
    search.write_csv(out, search.SCAN_HEADER, rows)
    print(f"wrote {len(rows)} rows to {out}")
    return EXIT_OK


def _cmd_sweep(args: argparse.Namespace) -> int:
    params = _load_params(args)
    if args.recipe == "fig2":
        params = params.replace(distance=100.0)
        grid = search.SweepGrid(
            k_values=_parse_values("10:1000:10", "--k-values"),
            mu_prime_values=_parse_values("0:2000:20", "--mu-prime-values"),
        )
        eta_e = None
    else:
        grid = search.SweepGrid(
            k_values=_parse_values(args.k_values, "--k-values"),
            mu_prime_values=_parse_values(args.mu_prime_values, "--mu-prime-values"),
        )
        eta_e = args.eta_e
    rows = search.sweep_grid(params, grid, eta_e)
    out = args.out or f"sweep_{args.recipe or 'grid'}.csv"
    search.write_csv(out, search.SWEEP_HEADER, rows)
    print(f"wrote {len(rows)} rows to {out}")
    return EXIT_OK


def _cmd_kmin(args: argparse.Namespace) -> int:
    params = _load_params(args)
    if args.recipe == "fig4":
        distances = (1.0,) + tuple(float(x) for x in range(10, 141, 10))
    else:
        distances = _parse_values(args.distances, "--distances")
    rows = []
    for distance in distances:
        result = search.k_min(params, distance, tol=args.tol, eta_e=args.eta_e)
        rows.append((result.distance, result.k_min, result.mu_prime_at_kmin,
                     result.converged))
    out = args.out or f"kmin_{args.recipe or 'scan'}.csv"
    search.write_csv(out, search.KMIN_HEADER, rows)
    print(f"wrote {len(rows)} rows to {out}")
    return EXIT_OK


def _analytic_quantities(params: SystemParams, strategy: AttackStrategy) -> dict[str, tuple[float, str]]:
    """Analytic values paired with the name of the matching empirical denominator."""
    from . import faked_states as fs_mod

    obs = observables_for(params, strategy)
    quantities = {
        "q_mu": (obs.q_mu, "n_pulses"),
        "q_nu": (obs.q_nu, "n_pulses"),
        "emu_qmu": (obs.emu_qmu, "n_pulses"),
        "enu_qnu": (obs.enu_qnu, "n_pulses"),
    }
    if isinstance(strategy, Baseline):
        return quantities
    eff = efficiency_matrix(params, strategy.k)
    fs = FakedStateIntensities.symmetric(strategy.mu_prime)
    d = params.dark_count
    probs = security.table1_probs(fs, eff)
    quantities.update({
        "p_click0": (fs_mod.p_click_det0(fs, eff, d), "n_resend"),
        "p_click1": (fs_mod.p_click_det1(fs, eff, d), "n_resend"),
        "p_arrive": (fs_mod.p_arrive(fs, eff, d), "n_resend"),
        "p_error": (fs_mod.p_error(fs, eff, d), "n_resend"),
        "r1": (probs.r1, "n_match_v0"),
        "s0": (probs.s0, "n_match_v1"),
    })
    return quantities


def _cmd_validate(args: argparse.Namespace) -> int:
    params = _load_params(args)
    strategy = _build_strategy(args)
    empirical = simulate_pulses(params, strategy, args.n_pulses, args.seed)
    denominators = {
        "n_pulses": empirical.n_pulses,
        "n_resend": empirical.n_resend,
        "n_match_v0": empirical.n_match_v0,
        "n_match_v1": empirical.n_match_v1,
    }
    rows = []
    all_pass = True
    for name, (analytic, denom_name) in _analytic_quantities(params, strategy).items():
        measured = getattr(empirical, name)
        trials = denominators[denom_name]
        sigma = math.sqrt(max(analytic * (1.0 - analytic), 0.0) / trials) if trials else math.nan
        if sigma and not math.isnan(sigma):
            z = (measured - analytic) / sigma
            ok = abs(z) <= 3.0
        else:
            z = 0.0 if measured == analytic else math.inf
            ok = measured == analytic
        all_pass &= ok
        rows.append((strategy_label(strategy), params.distance, name,
                     analytic, measured, sigma, z, ok))
    out = args.out or "validate.csv"
    search.write_csv(out, VALIDATE_HEADER, rows)
    print(f"wrote {len(rows)} rows to {out}")
    if args.manifest:
        Path(args.manifest).write_text(empirical.manifest_json())
        print(f"wrote run manifest to {args.manifest}")
    if not all_pass:
        print("validation FAILED: at least one quantity beyond 3 sigma", file=sys.stderr)
        return EXIT_VALIDATION
    print("validation passed: all quantities within 3 sigma")
    return EXIT_OK


_COMMANDS = {
    "rate": _cmd_rate,
    "scan": _cmd_scan,
    "sweep": _cmd_sweep,
    "kmin": _cmd_kmin,
    "validate": _cmd_validate,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
