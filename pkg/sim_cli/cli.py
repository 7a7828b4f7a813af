"""Command-line entry point: generate, run, sweep, min-t, fit-schmidt, oracle-check."""

from __future__ import annotations

import argparse
import json
import sys
from collections.abc import Callable
from pathlib import Path
from typing import Any

from adiabatic_module.engine import NumericalAbortError
from adiabatic_module.schedule import RunConfig, Schedule, parse_sign
from exact_cover.generator import GenerationError
from sim_cli.commands import (
    cmd_fit_schmidt,
    cmd_generate,
    cmd_min_t,
    cmd_oracle_check,
    cmd_run,
    cmd_sweep,
    default_run_csv,
)
from sim_cli.config_file import load_config_file, parse_bool
from sim_cli.fit import FitError
from sim_cli.sweep import SweepSpec, t_ladder
from utils.log_utils import set_log_level, tprint
from utils.settings_store import get_setting

EXIT_OK = 0
EXIT_NOT_SOLVED = 1
EXIT_USAGE = 2
EXIT_NUMERICAL_ABORT = 3


def _float_list(text: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _int_list(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _sign(text: str) -> int:
    try:
        return parse_sign(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, default=None, help="key=value file mirroring the long flags.")
    common.add_argument("--log-level", default=None, help="ERROR, WARN, INFO, DEBUG or DEEP.")
    return common


def _add_evolution_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--delta", type=float, default=None, help="Time step Δ (default from settings).")
    parser.add_argument("--inner-delta", type=float, default=None, help="Trotter step δ (default Δ).")
    parser.add_argument("--sign", type=_sign, default=None, help="Exponent sign '+' or '-' (default '-').")
    parser.add_argument("--renormalize", action="store_true", default=None, help="Rescale λ after truncation.")


def _add_instance_source(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("instances", nargs="*", type=Path, help="Instance files (or generate with --n).")
    parser.add_argument("--n", type=int, default=None, help="Generate instances with this many qubits.")
    parser.add_argument("--count", type=int, default=None, help="Instances to generate (default 10).")
    parser.add_argument("--seed", type=int, default=None, help="First generator seed (default 0).")
    parser.add_argument("--workers", type=int, default=None, help="Worker processes (default from settings).")
    parser.add_argument("--out", type=Path, default=None, help="Output directory.")


def _build_parser() -> tuple[argparse.ArgumentParser, dict[str, argparse.ArgumentParser]]:
    common = _common_parser()
    parser = argparse.ArgumentParser(
        prog="mps-sim", description="MPS simulation of adiabatic Exact Cover with χ truncation."
    )
    sub = parser.add_subparsers(dest="command", required=True)
    commands: dict[str, argparse.ArgumentParser] = {}

    generate = sub.add_parser("generate", parents=[common], help="Generate hard instances.")
    generate.add_argument("--n", type=int, default=None, help="Qubit count (6..32).")
    generate.add_argument("--count", type=int, default=None, help="Number of instances (default 1).")
    generate.add_argument("--seed", type=int, default=None, help="First seed (default 0).")
    generate.add_argument("--m-target", type=int, default=None, help="Walk seeds until m equals this.")
    generate.add_argument("--out", type=Path, default=None, help="Output directory (default instances/).")
    commands["generate"] = generate

    run = sub.add_parser("run", parents=[common], help="Run one adiabatic evolution.")
    run.add_argument("instance", type=Path, help="Instance file.")
    run.add_argument("--T", type=float, default=None, help="Total evolution time.")
    run.add_argument("--chi", type=int, default=None, help="Bond dimension cap (default from settings).")
    run.add_argument("--stride", type=int, default=None, help="Sample every k-th step (always at s=1).")
    run.add_argument("--seed", type=int, default=None, help="Recorded in the manifest.")
    run.add_argument("--out", type=Path, default=None, help="Run CSV path.")
    run.add_argument("--record-spectra", action="store_true", default=None, help="Write <stem>_spectra.json.")
    run.add_argument("--decomposition", choices=["svd", "density"], default=None, help="Bond split method.")
    _add_evolution_flags(run)
    commands["run"] = run

    sweep = sub.add_parser("sweep", parents=[common], help="Runs over instances x χ list x T list.")
    _add_instance_source(sweep)
    sweep.add_argument("--chi", type=_int_list, default=None, help="Comma-separated χ values.")
    sweep.add_argument("--T", type=_float_list, default=None, help="Comma-separated T values (default ladder).")
    sweep.add_argument("--stride", type=int, default=None, help="Sample every k-th step.")
    _add_evolution_flags(sweep)
    commands["sweep"] = sweep

    min_t = sub.add_parser("min-t", parents=[common], help="Smallest ladder T that solves each instance.")
    _add_instance_source(min_t)
    min_t.add_argument("--chi", type=int, default=None, help="Bond dimension cap.")
    min_t.add_argument("--t-start", type=float, default=None, help="First ladder T.")
    min_t.add_argument("--t-multiplier", type=float, default=None, help="Ladder ratio.")
    min_t.add_argument("--t-max", type=float, default=None, help="Largest ladder T.")
    _add_evolution_flags(min_t)
    commands["min-t"] = min_t

    fit = sub.add_parser("fit-schmidt", parents=[common], help="Fit log2 λ_α = b + c/√α + d√α.")
    fit.add_argument("--spectra", type=Path, default=None, help="<stem>_spectra.json from a run.")
    fit.add_argument("--spectrum", type=Path, default=None, help="Raw spectrum file, one value per line.")
    fit.add_argument("--s", type=float, default=None, help="s of the recorded spectrum to fit (default 0.69).")
    fit.add_argument("--cut", type=int, default=None, help="Only spectra recorded at this cut.")
    commands["fit-schmidt"] = fit

    oracle = sub.add_parser("oracle-check", parents=[common], help="Dense-oracle equivalence corpus.")
    oracle.add_argument("--n-max", type=int, default=None, help="Largest register checked (4..12, default 8).")
    oracle.add_argument("--seed", type=int, default=None, help="Corpus seed (default 0).")
    oracle.add_argument("--chi", type=int, default=None, help="Force a bond cap (default exact).")
    oracle.add_argument("--tamper", type=float, default=None, help=argparse.SUPPRESS)
    commands["oracle-check"] = oracle
    return parser, commands


def _apply_config_file(parser: argparse.ArgumentParser, args: argparse.Namespace) -> None:
    """Fill flags the user did not pass from the --config file; unknown keys are usage errors."""
    if args.config is None:
        return
    actions = {
        option[2:]: action
        for action in parser._actions
        for option in action.option_strings
        if option.startswith("--")
    }
    for key, raw in load_config_file(args.config).items():
        action = actions.get(key)
        if action is None or key in ("config", "help"):
            raise ValueError(f"{args.config}: unknown key '{key}' for '{args.command}'")
        if getattr(args, action.dest) is not None:
            continue
        if isinstance(action, argparse._StoreTrueAction):
            value: Any = parse_bool(raw)
        elif action.type is not None:
            try:
                value = action.type(raw)
            except argparse.ArgumentTypeError as exc:
                raise ValueError(f"{args.config}: {key}: {exc}") from exc
        else:
            value = raw
        setattr(args, action.dest, value)


def _or(value: Any, fallback: Any) -> Any:
    return fallback if value is None else value


def _require(value: Any, flag: str) -> Any:
    if value is None:
        raise ValueError(f"{flag} is required")
    return value


def _resolve_instances(args: argparse.Namespace, out_dir: Path) -> list[Path]:
    if args.instances:
        return list(args.instances)
    if args.n is None:
        raise ValueError("give instance files or --n to generate them")
    return cmd_generate(args.n, _or(args.count, 10), _or(args.seed, 0), out_dir / "instances")


def _handle_generate(args: argparse.Namespace) -> int:
    paths = cmd_generate(
        _require(args.n, "--n"),
        _or(args.count, 1),
        _or(args.seed, 0),
        _or(args.out, Path("instances")),
        m_target=args.m_target,
    )
    for path in paths:
        print(path)
    return EXIT_OK


def _handle_run(args: argparse.Namespace) -> int:
    T = _require(args.T, "--T")
    chi = _or(args.chi, int(get_setting("default_chi")))
    schedule = Schedule.from_settings(T, args.delta, args.inner_delta)
    config = RunConfig.from_settings(
        chi_cap=chi,
        renormalize_after_truncation=args.renormalize,
        observable_stride=args.stride,
        evolution_sign=args.sign,
        seed=args.seed,
        decomposition=args.decomposition,
        record_spectra=args.record_spectra,
    )
    out = _or(args.out, default_run_csv(args.instance, chi, T))
    record = cmd_run(args.instance, schedule, config, out)
    print(json.dumps(record.summary(), indent=2, sort_keys=True))
    return EXIT_OK if record.solved else EXIT_NOT_SOLVED


def _ladder(args: argparse.Namespace) -> list[float]:
    return t_ladder(
        float(_or(getattr(args, "t_start", None), get_setting("default_t_ladder_start"))),
        float(_or(getattr(args, "t_multiplier", None), get_setting("default_t_ladder_multiplier"))),
        float(_or(getattr(args, "t_max", None), get_setting("default_t_ladder_max"))),
    )


def _handle_sweep(args: argparse.Namespace) -> int:
    out_dir = _or(args.out, Path("sweep"))
    spec = SweepSpec(
        instances=_resolve_instances(args, out_dir),
        chis=_or(args.chi, [int(get_setting("default_chi"))]),
        t_values=_or(args.T, _ladder(args)),
        delta=float(_or(args.delta, get_setting("default_delta"))),
        inner_delta=args.inner_delta,
        out_dir=out_dir,
        workers=_or(args.workers, int(get_setting("default_workers"))),
        stride=_or(args.stride, int(get_setting("default_observable_stride"))),
        sign=_or(args.sign, -1),
        renormalize=bool(args.renormalize),
    )
    rows = cmd_sweep(spec)
    solved = sum(1 for row in rows if row["solved"])
    print(f"{solved}/{len(rows)} runs solved; summary at {out_dir / 'summary.csv'}")
    return EXIT_OK


def _handle_min_t(args: argparse.Namespace) -> int:
    out_dir = _or(args.out, Path("min_t"))
    rows, stats = cmd_min_t(
        _resolve_instances(args, out_dir),
        _or(args.chi, int(get_setting("default_chi"))),
        _ladder(args),
        float(_or(args.delta, get_setting("default_delta"))),
        args.inner_delta,
        out_dir,
        workers=_or(args.workers, int(get_setting("default_workers"))),
        sign=_or(args.sign, -1),
        renormalize=bool(args.renormalize),
    )
    for entry in stats:
        print(json.dumps(entry.to_row(), sort_keys=True))
    return EXIT_OK


def _handle_fit(args: argparse.Namespace) -> int:
    outcome = cmd_fit_schmidt(spectra=args.spectra, spectrum=args.spectrum, s_point=_or(args.s, 0.69), cut=args.cut)
    print(json.dumps(outcome.to_dict(), indent=2, sort_keys=True))
    return EXIT_OK


def _handle_oracle(args: argparse.Namespace) -> int:
    report = cmd_oracle_check(_or(args.n_max, 8), _or(args.seed, 0), chi=args.chi, tamper=args.tamper)
    payload = report.to_dict()
    for check in payload["checks"]:
        check.pop("trace", None)
    print(json.dumps(payload, indent=2))
    return EXIT_OK if report.passed else EXIT_NOT_SOLVED


HANDLERS: dict[str, Callable[[argparse.Namespace], int]] = {
    "generate": _handle_generate,
    "run": _handle_run,
    "sweep": _handle_sweep,
    "min-t": _handle_min_t,
    "fit-schmidt": _handle_fit,
    "oracle-check": _handle_oracle,
}


def main(argv: list[str] | None = None) -> int:
    parser, commands = _build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_config_file(commands[args.command], args)
        if args.log_level:
            set_log_level(args.log_level)
        tprint(f"[CLI][DEBUG] {args.command}: {vars(args)}")
        return HANDLERS[args.command](args)
    except NumericalAbortError as exc:
        print(f"Error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL_ABORT
    except GenerationError as exc:
        print(f"Error: {exc} (n={exc.n}, seed={exc.seed})", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, OSError, FitError) as exc:
        print(f"Error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    finally:
        set_log_level(None)


if __name__ == "__main__":
    raise SystemExit(main())
