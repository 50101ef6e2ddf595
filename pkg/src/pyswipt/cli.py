"""
PySWIPT Command-Line Interface

Subcommands:
- solve: solve one channel realization and print allocations as JSON
- sweep: Monte Carlo spectral efficiency versus circuit power (CSV or SVG)
- verify: certify the policies against the brute-force oracle
- channels: dump drawn channel realizations as CSV

Exit codes: 0 on success, 1 on usage or configuration errors, 2 when
verification finds failures. Log verbosity comes from SWIPT_LOG.
"""

from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence
import argparse
import json
import logging
import os
import sys

import numpy as np
import pandas as pd

from . import __version__
from .config import CliConfigFile, load_config, default_config, dump_config
from .channels.channel_model import draw_realization, trial_seed
from .utils.types import BoundChoice
from .utils.units import dbm_to_watts, normalize_circuit_power
from .simulation.simulator import run_sweep
from .simulation.export import write_curves_csv, write_curves_svg, write_reports_csv
from .validation.oracle import (
    verify,
    random_batch,
    oracle_scenarios,
    compare_scheduling,
    DEFAULT_POWER_RESOLUTION,
    DEFAULT_BETA_RESOLUTION
)
from .exceptions import PySwiptError


logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_VERIFY_FAILED = 2
LOG_ENV = "SWIPT_LOG"
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")
SCHEDULING_MEAN_GAP = 0.02
SCHEDULING_MAX_GAP = 0.10


class UsageError(Exception):
    """Raised by the argument parser instead of exiting."""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        raise UsageError(message)


def configure_logging(verbose: bool = False) -> None:
    """Configure stderr logging from SWIPT_LOG (DEBUG, INFO, WARNING, ERROR)."""
    name = os.environ.get(LOG_ENV, "WARNING").upper()
    if name not in LOG_LEVELS:
        name = "WARNING"
    level = logging.DEBUG if verbose else getattr(logging, name)
    logging.basicConfig(
        level=level,
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s"
    )
    logging.getLogger("pyswipt").setLevel(level)


def _policies(value: str) -> List[str]:
    return [p.strip() for p in value.split(",") if p.strip()]


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with the four subcommands."""
    parser = _Parser(prog="pyswipt", description="Broadband SWIPT power control and simulation")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--verbose", action="store_true", help="Log at DEBUG level")
    sub = parser.add_subparsers(dest="command", metavar="{solve,sweep,verify,channels}")
    sub.required = True

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", help="JSON configuration file")
        p.add_argument("--seed", type=int, help="Master seed")
        p.add_argument("--out", help="Output path (stdout when omitted)")
        p.add_argument("--distance-scale", type=float, help="Divide every distance by this factor")
        p.add_argument("--verbose", action="store_true", default=argparse.SUPPRESS,
                       help="Log at DEBUG level")

    solve = sub.add_parser("solve", help="Solve one channel realization")
    common(solve)
    solve.add_argument("--p-c-dbm", type=float, help="Circuit power (dBm); first sweep point by default")
    solve.add_argument("--policies", type=_policies, help="Comma-separated policy names")
    solve.add_argument("--bound-choice", choices=[b.value for b in BoundChoice],
                       help="Downlink variable-rate objective (default exact)")
    solve.add_argument("--dump-config", action="store_true", help="Print the resolved configuration and exit")

    sweep = sub.add_parser("sweep", help="Monte Carlo sweep over circuit power")
    common(sweep)
    sweep.add_argument("--trials", type=int, help="Trials per sweep point")
    sweep.add_argument("--policies", type=_policies, help="Comma-separated policy names")
    sweep.add_argument("--format", choices=("csv", "svg"), help="Output format")
    sweep.add_argument("--workers", type=int, help="Worker processes")
    sweep.add_argument("--bound-choice", choices=[b.value for b in BoundChoice],
                       help="Downlink variable-rate objective (default exact)")

    check = sub.add_parser("verify", help="Verify the policies against the oracle")
    check.add_argument("--instances", type=int, default=50, help="Instances per scenario type")
    check.add_argument("--k", type=int, default=3, help="Sub-channels per instance")
    check.add_argument("--tolerance", type=float, default=5e-3, help="Relative gap for variable rates")
    check.add_argument("--resolution", type=float, default=DEFAULT_POWER_RESOLUTION)
    check.add_argument("--beta-resolution", type=float, default=DEFAULT_BETA_RESOLUTION)
    check.add_argument("--bound-choice", choices=[b.value for b in BoundChoice],
                       default=BoundChoice.EXACT.value)
    check.add_argument("--scheduling-trials", type=int, default=200,
                       help="Drawn instances for the scheduling gap check (0 disables)")
    check.add_argument("--seed", type=int, default=0)
    check.add_argument("--out", help="Report CSV path")
    check.add_argument("--verbose", action="store_true", default=argparse.SUPPRESS,
                       help="Log at DEBUG level")

    chans = sub.add_parser("channels", help="Dump channel realizations")
    common(chans)
    chans.add_argument("--trials", type=int, default=1, help="Realizations to draw")
    return parser


def _load(args: argparse.Namespace) -> CliConfigFile:
    cfg = load_config(args.config) if args.config else default_config()
    return cfg.with_overrides(
        sim={
            "seed": getattr(args, "seed", None),
            "trials": getattr(args, "trials", None) if args.command == "sweep" else None,
            "policies": getattr(args, "policies", None),
            "workers": getattr(args, "workers", None),
            "bound_choice": getattr(args, "bound_choice", None),
        },
        geometry={"distance_scale": getattr(args, "distance_scale", None)},
        output={"path": getattr(args, "out", None), "format": getattr(args, "format", None)},
    )


def _write_text(text: str, path: Optional[str]) -> None:
    if path:
        Path(path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _jsonable(value: Any) -> Any:
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (np.integer, np.floating)):
        return value.item()
    raise TypeError(f"not JSON serialisable: {type(value)}")


def _cmd_solve(args: argparse.Namespace) -> int:
    cfg = _load(args)
    if args.dump_config:
        _write_text(dump_config(cfg), args.out)
        return EXIT_OK
    sim = cfg.sim_config()
    p_c_dbm = args.p_c_dbm if args.p_c_dbm is not None else cfg.scenario.p_c_dbm[0]
    p_c = normalize_circuit_power(float(dbm_to_watts(p_c_dbm)), sim.noise_variance)
    scenario = sim.scenario.replace(p_c=p_c)
    ch = draw_realization(scenario, sim.geometry, trial_seed(sim.seed, 0), sim.noise_variance)

    results: Dict[str, Any] = {}
    for name in sim.policies:
        alloc, report = sim.make_policy(name, scenario).evaluate(ch)
        d = alloc.diagnostics
        results[name] = {
            "feasible": alloc.feasible,
            "downlink_powers": alloc.downlink_powers,
            "beta": alloc.beta,
            "uplink_powers": alloc.uplink_powers,
            "sum_throughput": report.sum_throughput,
            "spectral_efficiency": report.spectral_efficiency,
            "diagnostics": {
                "lambda_star": d.lambda_star,
                "mu_star": d.mu_star,
                "water_level": d.water_level,
                "stream_count": d.stream_count,
                "permutation": d.permutation,
                "objective": d.objective,
                "extra": d.extra,
            },
        }
    payload = {"scenario": scenario.label, "p_c_dBm": p_c_dbm, "seed": sim.seed, "policies": results}
    _write_text(json.dumps(payload, indent=2, sort_keys=True, default=_jsonable) + "\n", cfg.output.path)
    return EXIT_OK


def _cmd_sweep(args: argparse.Namespace) -> int:
    cfg = _load(args)
    if cfg.output.format == "svg" and not cfg.output.path:
        raise UsageError("--format svg needs --out")
    curves = run_sweep(cfg.sim_config())
    if cfg.output.format == "svg":
        write_curves_svg(curves, cfg.output.path, title=cfg.scenario_params().label)
    else:
        _write_text(write_curves_csv(curves), cfg.output.path)
    return EXIT_OK


def _cmd_verify(args: argparse.Namespace) -> int:
    reports = []
    templates = [
        s for s in oracle_scenarios(K=args.k)
        if s.is_downlink or s.is_single_user or s.is_fixed_rate
    ]
    for index, template in enumerate(templates):
        batch = random_batch(template, args.instances, seed=args.seed + index)
        reports.extend(verify(batch, tolerance=args.tolerance, resolution=args.resolution,
                              beta_resolution=args.beta_resolution, bound_choice=args.bound_choice))
    failed = [r for r in reports if not r.passed]
    if args.out:
        write_reports_csv(reports, args.out)

    scheduling_ok = True
    if args.scheduling_trials > 0:
        gap = compare_scheduling(trials=args.scheduling_trials, master_seed=args.seed)
        scheduling_ok = gap.mean_gap <= SCHEDULING_MEAN_GAP and gap.max_gap <= SCHEDULING_MAX_GAP
        sys.stdout.write(f"scheduling gap: mean={gap.mean_gap:.4g} max={gap.max_gap:.4g} "
                         f"over {gap.trials} draws\n")
    sys.stdout.write(f"verified {len(reports)} instances: {len(failed)} failed\n")
    for r in failed:
        sys.stdout.write(f"  {r.instance}: gap={r.gap:.6g} violations={list(r.violations)}\n")
    return EXIT_OK if not failed and scheduling_ok else EXIT_VERIFY_FAILED


def _cmd_channels(args: argparse.Namespace) -> int:
    cfg = _load(args)
    sim = cfg.sim_config()
    rows = []
    for trial in range(args.trials):
        ch = draw_realization(sim.scenario, sim.geometry, trial_seed(sim.seed, trial), sim.noise_variance)
        for n in range(ch.K):
            rows.append({
                "trial": trial,
                "index": n,
                "h_dot": ch.h_dot[n] if ch.has_downlink else None,
                "h_ddot": ch.h_ddot[n] if ch.has_downlink else None,
                "h": ch.h[n] if ch.has_downlink else None,
                "g_prime": ch.g_prime[n] if ch.has_uplink else None,
                "g_up": ch.g_up[n] if ch.has_uplink else None,
            })
    frame = pd.DataFrame(rows, columns=["trial", "index", "h_dot", "h_ddot", "h", "g_prime", "g_up"])
    _write_text(frame.to_csv(index=False, float_format="%.9g", lineterminator="\n"), cfg.output.path)
    return EXIT_OK


_COMMANDS = {
    "solve": _cmd_solve,
    "sweep": _cmd_sweep,
    "verify": _cmd_verify,
    "channels": _cmd_channels,
}


def run_cli(argv: Optional[Sequence[str]] = None) -> int:
    """Run the command line and return the process exit code.

    Args:
        argv: Arguments without the program name; defaults to sys.argv[1:]

    Returns:
        0 on success, 1 on usage/configuration errors, 2 on verification failures
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        sys.stderr.write(f"pyswipt: error: {e}\n")
        return EXIT_ERROR
    except SystemExit as e:
        return int(e.code or 0)

    configure_logging(args.verbose)
    try:
        return _COMMANDS[args.command](args)
    except UsageError as e:
        sys.stderr.write(f"pyswipt: error: {e}\n")
        return EXIT_ERROR
    except PySwiptError as e:
        logger.error(f"{type(e).__name__}: {e}")
        sys.stderr.write(f"pyswipt: {type(e).__name__}: {e}\n")
        return EXIT_ERROR
    except OSError as e:
        sys.stderr.write(f"pyswipt: I/O error: {e}\n")
        return EXIT_ERROR


def main() -> None:
    """Console-script entry point."""
    sys.exit(run_cli())


__all__ = ["run_cli", "main", "build_parser", "configure_logging"]
