"""Command-line entry point.

Subcommands: run, sweep, thresholds, verify, estimate-c0.
Exit codes: 0 success, 1 configuration or I/O error, 2 blow-up halt,
3 property-suite failure.
"""

from __future__ import annotations

import argparse
import os
import sys
from datetime import datetime, timezone

from . import __version__
from .config import (
    SCHEMA,
    echo_sim_config,
    echo_sweep_config,
    load_config_file,
    resolve_sim_config,
    resolve_sweep_config,
)
from .dynamics import run as run_sim
from .errors import ChemolabError, ConfigurationError
from .experiments import estimate_c0, lambda_sweep
from .io import (
    ensure_out_dir,
    fmt,
    write_diagnostics_csv,
    write_manifest,
    write_snapshot,
    write_summary_csv,
    write_sweep_csv,
)
from .mesh import build_grid
from .theory import (
    ChiParams,
    ConditionParams,
    DEFAULT_VERIFY_SEED,
    run_property_suite,
    threshold_chi0_pe,
    threshold_chi0_pp,
)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_BLOWUP = 2
EXIT_PROPERTY_FAILURE = 3


def _now() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def _config_defaults_epilog() -> str:
    lines = ["config defaults (flat key = value format, strict keys):"]
    for section, keys in SCHEMA.items():
        shown = []
        for key, (_typ, default) in keys.items():
            if type(default).__name__ == "object":  # the REQUIRED sentinel
                shown.append(f"{key} (required)")
            elif default is None:
                shown.append(f"{key} (optional)")
            elif isinstance(default, tuple):
                shown.append(f"{key} = {' '.join(str(x) for x in default)}")
            else:
                shown.append(f"{key} = {default}")
        lines.append(f"  [{section}] " + ", ".join(shown))
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chemolab",
        description=(
            "Finite-volume laboratory for signal-dependent chemotaxis systems "
            "and their quasi-stationary signal limit"
        ),
        epilog=_config_defaults_epilog(),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--seed", type=int, default=DEFAULT_VERIFY_SEED,
                        help=f"seed for randomized suites (default {DEFAULT_VERIFY_SEED})")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="integrate one configuration")
    p_run.add_argument("--config", required=True, help="path to the config file")
    p_run.add_argument("--out", required=True, help="output directory")

    p_sweep = sub.add_parser("sweep", help="relaxation sweep against lambda = 0")
    p_sweep.add_argument("--config", required=True, help="config file with a [sweep] section")
    p_sweep.add_argument("--out", required=True, help="output directory")

    p_thr = sub.add_parser("thresholds", help="print the smallness thresholds")
    p_thr.add_argument("--n", type=int, default=2, help="ambient dimension (default 2)")
    p_thr.add_argument("--k", type=float, required=True, help="sensitivity decay exponent, > 1")
    p_thr.add_argument("--a", type=float, default=0.0, help="sensitivity shift (default 0)")
    p_thr.add_argument("--eta", type=float, default=0.0, help="signal lower bound (default 0)")
    p_thr.add_argument("--lambdas", default="0,0.5,1,2",
                       help="comma-separated lambda grid (default 0,0.5,1,2)")
    p_thr.add_argument("--csv", action="store_true", help="machine-readable output")

    p_ver = sub.add_parser("verify", help="run the randomized theory property suites")
    p_ver.add_argument("--big-draws", type=int, default=100_000,
                       help="draws for the polynomial suites (default 100000)")
    p_ver.add_argument("--h-sets", type=int, default=100,
                       help="admissible sets for the sign suite (default 100)")

    p_c0 = sub.add_parser("estimate-c0", help="probe the decaying-diffusion kernel bound")
    p_c0.add_argument("--dim", type=int, default=1, help="1 or 2 (default 1)")
    p_c0.add_argument("--lx", type=float, default=1.0, help="domain length (default 1)")
    p_c0.add_argument("--ly", type=float, default=None, help="second length (dim 2)")
    p_c0.add_argument("--nx", type=int, default=256, help="cells (default 256)")
    p_c0.add_argument("--ny", type=int, default=None, help="cells along y (dim 2)")
    p_c0.add_argument("--t-star", type=float, default=1.0, help="evaluation time (default 1)")
    p_c0.add_argument("--probes", type=int, default=5, help="source count (default 5)")
    p_c0.add_argument("--csv", action="store_true", help="machine-readable output")
    return parser


def cmd_run(args) -> int:
    raw = load_config_file(args.config)
    cfg = resolve_sim_config(raw, allow_sweep=True)
    ensure_out_dir(args.out)
    started = _now()
    result = run_sim(cfg)

    outputs = ["diagnostics.csv"]
    write_diagnostics_csv(os.path.join(args.out, "diagnostics.csv"), result.records)
    for snap in result.snapshots:
        name = f"snapshot_t{snap.t!r}.txt"  # shortest round-trip float text
        write_snapshot(os.path.join(args.out, name), snap)
        outputs.append(name)

    status = EXIT_BLOWUP if result.blowup is not None else EXIT_OK
    manifest = {
        "artifact": f"chemolab {__version__}",
        "command": "run",
        "exit_status": status,
        "seed": args.seed,
        "started_utc": started,
        "finished_utc": _now(),
    }
    if result.blowup is not None:
        manifest["blowup"] = {
            "time": fmt(result.blowup.time),
            "max_u": fmt(result.blowup.max_u),
            "ceiling": fmt(result.blowup.ceiling),
        }
    manifest["outputs"] = outputs + ["manifest.txt"]
    manifest["config"] = echo_sim_config(cfg)
    write_manifest(os.path.join(args.out, "manifest.txt"), manifest)
    return status


def cmd_sweep(args) -> int:
    raw = load_config_file(args.config)
    sw = resolve_sweep_config(raw)
    ensure_out_dir(args.out)
    started = _now()
    result = lambda_sweep(sw)

    write_sweep_csv(os.path.join(args.out, "sweep.csv"), result)
    write_summary_csv(os.path.join(args.out, "summary.csv"), result)
    manifest = {
        "artifact": f"chemolab {__version__}",
        "command": "sweep",
        "exit_status": EXIT_OK,
        "seed": args.seed,
        "started_utc": started,
        "finished_utc": _now(),
        "verdict": result.verdict,
        "ratios_e_u": [fmt(x) for x in result.ratios_u],
        "ratios_e_v": [fmt(x) for x in result.ratios_v],
        "outputs": ["sweep.csv", "summary.csv", "manifest.txt"],
        "config": echo_sweep_config(sw),
    }
    write_manifest(os.path.join(args.out, "manifest.txt"), manifest)
    return EXIT_OK


def cmd_thresholds(args) -> int:
    try:
        lambdas = [float(x) for x in args.lambdas.split(",") if x.strip()]
    except ValueError as exc:
        raise ConfigurationError(f"--lambdas: {exc}")
    if not lambdas or any(l < 0 for l in lambdas):
        raise ConfigurationError("--lambdas: need a nonempty, nonnegative grid")
    chi = ChiParams(chi0=1.0, a=args.a, k=args.k)  # chi0 plays no role here
    pe = threshold_chi0_pe(args.n, chi, args.eta)
    rows = []
    for lam in lambdas:
        cond = ConditionParams(p=2.0, eps=0.25, lam=lam, n=args.n)
        rows.append((lam, threshold_chi0_pp(cond, chi, args.eta), pe))
    cond0 = ConditionParams(p=2.0, eps=0.25, lam=0.0, n=args.n)
    equal0 = threshold_chi0_pp(cond0, chi, args.eta) == pe
    if args.csv:
        print("lambda,threshold_pp,threshold_pe,lambda0_equal")
        for lam, pp, pe_v in rows:
            print(f"{fmt(lam)},{fmt(pp)},{fmt(pe_v)},{str(equal0).lower()}")
    else:
        print(f"{'lambda':>10} {'threshold_pp':>18} {'threshold_pe':>18}")
        for lam, pp, pe_v in rows:
            print(f"{lam:>10.4g} {pp:>18.12g} {pe_v:>18.12g}")
        print(f"lambda = 0 equality (pp == pe): {'exact' if equal0 else 'VIOLATED'}")
    return EXIT_OK


def cmd_verify(args) -> int:
    results = run_property_suite(
        seed=args.seed, big_draws=args.big_draws, h_sets=args.h_sets
    )
    status = EXIT_OK
    for r in results:
        print(f"{r.name}: {'PASS' if r.passed else 'FAIL'} ({r.checked} checks) {r.detail}")
        if not r.passed:
            status = EXIT_PROPERTY_FAILURE
            if r.counterexample:
                print(f"  counterexample: {r.counterexample}")
    return status


def cmd_estimate_c0(args) -> int:
    if args.dim == 1:
        grid = build_grid(1, args.lx, args.nx)
    elif args.dim == 2:
        if args.ly is None or args.ny is None:
            raise ConfigurationError("--ly and --ny are required when --dim 2")
        grid = build_grid(2, (args.lx, args.ly), (args.nx, args.ny))
    else:
        raise ConfigurationError(f"--dim: must be 1 or 2, got {args.dim}")
    est = estimate_c0(grid, t_star=args.t_star, probes=args.probes)
    if args.csv:
        print("probe_cell,per_probe_min,c0")
        for cell, mn in zip(est.probe_cells, est.per_probe_min):
            print(f"{cell},{fmt(mn)},{fmt(est.c0)}")
    else:
        print(f"c0 = {fmt(est.c0)} (normalized; kernel min {fmt(est.kernel_min)}) "
              f"at t* = {fmt(est.t_star)}")
        for cell, mn in zip(est.probe_cells, est.per_probe_min):
            print(f"  probe cell {cell}: min = {fmt(mn)}")
    return EXIT_OK


_DISPATCH = {
    "run": cmd_run,
    "sweep": cmd_sweep,
    "thresholds": cmd_thresholds,
    "verify": cmd_verify,
    "estimate-c0": cmd_estimate_c0,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _DISPATCH[args.command](args)
    except ChemolabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


def entrypoint() -> None:
    sys.exit(main())
