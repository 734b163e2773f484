"""Command-line interface.

Subcommands:
    simulate    run one scenario config, write the time-series CSV
    tune        print the designed PI gains for a config's system
    campaign    run a Monte-Carlo verification campaign
    experiment  run one of the bundled experiment pipelines
    compare     run one config under several controllers, tabulate nadirs

The default output directory is ``./windffs_out`` or the value of the
``WINDFFS_OUT_DIR`` environment variable.  Exit status is non-zero when an
experiment or campaign fails its acceptance bounds.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__
from ._kernel import available_backends
from .scenario import load_config
from .simulate import run_scenario
from .tuner import TunerConstants, design_pi, run_campaign
from .experiments import EXPERIMENTS, compare_table, run_experiment


def _default_out() -> str:
    return os.environ.get("WINDFFS_OUT_DIR", "windffs_out")


def _cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    res = run_scenario(cfg, backend=args.backend)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / (Path(args.config).stem + "_timeseries.csv")
    res.to_csv(csv_path)
    print(f"wrote {csv_path}")
    print(f"  backend         : {res.meta['backend']}")
    print(f"  nadir           : {res.nadir_hz:+.4f} Hz")
    print(f"  terminal df     : {res.final_df_hz:+.4f} Hz")
    if res.meta["est_pd"].max() > 0:
        phat = res.meta["est_pd"].max() * cfg.system.base_mva
        print(f"  deficit estimate: {phat:.2f} MW")
    for e in res.events:
        print(f"  event t={e['t_s']:8.3f}s farm={e['farm'] + 1} {e['event']}")
    audit = max((a["rel_mismatch"] for a in res.energy_audit()), default=0.0)
    print(f"  energy audit    : {audit:.2e} relative mismatch")
    return 0


def _cmd_tune(args) -> int:
    cfg = load_config(args.config)
    if cfg.alpha is not None:
        alpha = cfg.alpha
    else:
        from .trajectory import alpha_for_nadir
        alpha = alpha_for_nadir(cfg.system, cfg.disturbance.magnitude_pd,
                                cfg.target_nadir_hz)
    consts = TunerConstants()
    gains = design_pi(cfg.system, alpha, consts)
    kg = cfg.system.kg
    kgs = kg / alpha
    from .tuner import g_term
    arg1 = consts.margin * (kgs - cfg.system.damping_df
                            - g_term(consts.omega_up_max, consts.tg_max,
                                     1.0 / cfg.system.droop_inv_r))
    arg2 = consts.margin * (kg - kgs)
    binding = "tracking-residual bound" if arg1 >= arg2 else "sign-flip bound"
    print(f"alpha = {alpha:.4f}  (K_g = {kg:.4f}, K_g* = {kgs:.4f})")
    print(f"K_p0 = {gains.kp:.4f}   (binding: {binding})")
    print(f"K_I0 = {gains.ki:.4f}")
    return 0


def _cmd_campaign(args) -> int:
    rep = run_campaign(args.kind, args.samples, seed=args.seed,
                       out_dir=args.out, full_scale=args.full_scale)
    print(f"campaign {args.kind}: n={rep.n_samples} seed={rep.seed} "
          f"passed={rep.passed} ({rep.runtime_s:.1f}s)")
    for k, v in sorted(rep.summary.items()):
        print(f"  {k}: {v}")
    return 0 if rep.passed else 1


def _cmd_experiment(args) -> int:
    overrides = {}
    if args.samples is not None:
        overrides["n_samples"] = args.samples
    if args.full_scale:
        overrides["full_scale"] = True
    summary = run_experiment(args.id, Path(args.out) / args.id, overrides)
    print(f"experiment {args.id}: passed={summary['passed']}")
    for c in summary["checks"]:
        print(f"  [{'PASS' if c['pass'] else 'FAIL'}] {c['name']} = {c['value']}")
    return 0 if summary["passed"] else 1


def _cmd_compare(args) -> int:
    grid = {}
    for config in args.configs:
        cfg = load_config(config)
        name = Path(config).stem
        for ctrl in args.controllers:
            for fb in cfg.windfarms:
                fb.controller = ctrl
            res = run_scenario(cfg, backend=args.backend)
            grid[(ctrl, name)] = res.nadir_hz
            print(f"{name} / {ctrl}: nadir {res.nadir_hz:+.4f} Hz")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    compare_table(grid, out / "compare_nadir.csv")
    print(f"wrote {out / 'compare_nadir.csv'}")
    return 0


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="windffs",
        description="Wind-farm fast frequency support simulator and tuning toolkit")
    ap.add_argument("--version", action="version", version=f"windffs {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run a scenario config")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default=_default_out())
    p.add_argument("--backend", choices=available_backends(), default=None)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("tune", help="print designed PI gains for a config")
    p.add_argument("--config", required=True)
    p.set_defaults(func=_cmd_tune)

    p = sub.add_parser("campaign", help="run a verification campaign")
    p.add_argument("--kind", required=True,
                   choices=["spectral_bound", "tracking_error", "gr_comparison",
                            "modeling_error"])
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=_default_out())
    p.add_argument("--full-scale", action="store_true",
                   help="use the published sample counts instead of desk scale")
    p.set_defaults(func=_cmd_campaign)

    p = sub.add_parser("experiment", help="run a bundled experiment pipeline")
    p.add_argument("--id", required=True, choices=sorted(EXPERIMENTS))
    p.add_argument("--out", default=_default_out())
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--full-scale", action="store_true")
    p.set_defaults(func=_cmd_experiment)

    p = sub.add_parser("compare", help="nadir table across controllers")
    p.add_argument("--configs", nargs="+", required=True)
    p.add_argument("--controllers", nargs="+",
                   default=["proposed_ti_pi", "vic_fixed", "vic_adaptive", "sic"])
    p.add_argument("--out", default=_default_out())
    p.add_argument("--backend", choices=available_backends(), default=None)
    p.set_defaults(func=_cmd_compare)

    args = ap.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
