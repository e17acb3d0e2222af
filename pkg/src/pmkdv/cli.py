"""Command-line front end: ``pmkdv {simulate,effective,compare,scaling,check}``.

Exit codes: 0 success, 1 numerical failure, 2 usage or configuration error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
import warnings
from dataclasses import replace
from pathlib import Path

from . import checks
from .errors import ConfigError, NoConvergence, NonFinite, ScaleCollapse
from .experiments import (Perturbation, RunConfig, preset, run_compare, run_effective,
                          run_scaling, run_simulate)
from .potential import PotentialSpec
from .tracker import TRACK_COLUMNS, track
from .solver import SnapshotRecorder

EXIT_OK, EXIT_NUMERIC, EXIT_USAGE = 0, 1, 2

_FIELDS = [
    ("frame", str), ("epsilon", float), ("n", int), ("a0", float), ("c0", float),
    ("dt", float), ("t_final", float), ("snapshot_every", int), ("output_dir", str),
    ("seed", int), ("snapshot_format", str), ("name", str),
]


def _add_run_args(p: argparse.ArgumentParser):
    src = p.add_mutually_exclusive_group()
    src.add_argument("--config", type=Path, help="TOML run configuration")
    src.add_argument("--preset", help="run preset (fig1, fig2)")
    for name, typ in _FIELDS:
        p.add_argument("--" + name.replace("_", "-"), dest=name, type=typ, default=None)
    p.add_argument("--potential", default=None,
                   help="potential preset name (paper-v1, paper-v2, zero)")
    p.add_argument("--omega0", type=float, default=None, help="H1 size of the initial perturbation")
    p.add_argument("--perturbation-kind", choices=("cos", "sin", "random"), default=None)
    p.add_argument("--perturbation-mode", type=int, default=None)


def _build_config(args) -> RunConfig:
    if args.config is not None:
        try:
            cfg = RunConfig.load(args.config)
        except OSError as exc:
            raise ConfigError(f"cannot read {args.config}: {exc}") from None
    elif args.preset is not None:
        cfg = preset(args.preset)
    else:
        cfg = RunConfig()
    d = cfg.to_dict()
    for name, _ in _FIELDS:
        v = getattr(args, name)
        if v is not None:
            if name == "n":
                d["grid"] = {"n": v}
            else:
                d[name] = v
    if args.potential is not None:
        d["potential"] = args.potential
    if any(getattr(args, k) is not None for k in ("omega0", "perturbation_kind", "perturbation_mode")):
        base = cfg.perturbation or Perturbation()
        d["perturbation"] = {
            "kind": args.perturbation_kind or base.kind,
            "mode": args.perturbation_mode or base.mode,
            "omega0": args.omega0 if args.omega0 is not None else base.omega0,
        }
    return RunConfig.from_dict(d)


def _cmd_simulate(args):
    cfg = _build_config(args)
    if cfg.output_dir is not None and cfg.snapshot_format == "none":
        cfg = replace(cfg, snapshot_format="csv")
    rec = SnapshotRecorder()
    state = run_simulate(cfg, rec)
    traj = track(cfg.grid, rec)
    if cfg.output_dir is not None:
        traj.to_csv(Path(cfg.output_dir) / "track.csv", names=TRACK_COLUMNS)
    print(f"t={state.t:.6g} steps={state.step_count} snapshots={len(rec)} "
          f"a={traj.a[-1]:.10g} c={traj.c[-1]:.10g}" if len(traj) else f"t={state.t:.6g}")
    if not traj.complete:
        raise NoConvergence(f"tracking failed at t={traj.failure}", t=traj.failure)
    return EXIT_OK


def _cmd_effective(args):
    cfg = _build_config(args)
    traj = run_effective(cfg)
    if cfg.output_dir is not None:
        out = Path(cfg.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "config.toml").write_text(cfg.to_toml())
        traj.to_csv(out / "effective.csv")
    print(f"t={traj.t[-1]:.6g} a={traj.a[-1]:.10g} c={traj.c[-1]:.10g}")
    return EXIT_OK


def _cmd_compare(args):
    cfg = _build_config(args)
    rep = run_compare(cfg)
    print(json.dumps(rep.summary(), indent=2, sort_keys=True))
    return EXIT_OK


def _cmd_scaling(args):
    cfg = _build_config(args)
    rep = run_scaling(cfg, args.eps)
    print(json.dumps(rep.summary(), indent=2, sort_keys=True))
    return EXIT_OK


def _cmd_check(args):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        rows = checks.run_suite(args.suite)
    print(checks.format_table(rows))
    return EXIT_OK if all(r.passed for r in rows) else EXIT_NUMERIC


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pmkdv", description="perturbed mKdV soliton lab")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn, help_ in (("simulate", _cmd_simulate, "evolve the PDE"),
                            ("effective", _cmd_effective, "integrate the effective ODEs"),
                            ("compare", _cmd_compare, "PDE track vs effective ODEs"),
                            ("scaling", _cmd_scaling, "discrepancy vs epsilon")):
        p = sub.add_parser(name, help=help_)
        _add_run_args(p)
        p.set_defaults(func=fn)
        if name == "scaling":
            p.add_argument("--eps", type=float, nargs="+", required=True,
                           help="decreasing epsilon values")
    p = sub.add_parser("check", help="run a self-check suite")
    p.add_argument("--suite", default="all",
                   help=f"one of {', '.join(checks.SUITES)} or all")
    p.set_defaults(func=_cmd_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"pmkdv: config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NonFinite, NoConvergence, ScaleCollapse) as exc:
        print(f"pmkdv: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
