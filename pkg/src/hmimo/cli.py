"""Command-line entry points.

Every subcommand writes delimited output plus a JSON manifest into the
output directory, and renders companion figures alongside when the optional
figures package is importable (disable with --no-figures).
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np

from .config import ScenarioConfig
from .element_problem import load_text, make_random_quadratic
from .harness import (ExperimentSpec, SOLVERS, compare_feeding, render_figure,
                      run_bcd, sweep_antennas, sweep_power, trace_rows,
                      write_csv, write_manifest)
from .miso import snr_sweep
from .sphere_decoder import VARIANTS, solve_binary_exact


def _scenario(args) -> ScenarioConfig:
    cfg = ScenarioConfig.from_file(args.config) if args.config \
        else ScenarioConfig()
    if args.seed is not None:
        cfg = cfg.replace(rng_seed=args.seed)
    return cfg


def _spec(args, cfg, solver) -> ExperimentSpec:
    return ExperimentSpec(scenario=cfg, solver=solver,
                          max_iters=args.max_iters)


def _ints(text: str):
    return [int(tok) for tok in text.split(",") if tok]


def _floats(text: str):
    return [float(tok) for tok in text.split(",") if tok]


def _solver_list(args):
    names = [tok for tok in args.solvers.split(",") if tok]
    for name in names:
        if name not in SOLVERS:
            raise SystemExit(f"unknown solver {name!r}; choose from {SOLVERS}")
    return names


def _finish(args, command, cfg, outputs, t0, extra=None):
    out_dir = Path(args.out_dir)
    write_manifest(out_dir / "manifest.json", command, cfg, outputs,
                   time.monotonic() - t0, extra)
    for path in outputs:
        print(f"wrote {path}")
    print(f"wrote {out_dir / 'manifest.json'}")


def cmd_run(args) -> int:
    t0 = time.monotonic()
    cfg = _scenario(args)
    out_dir = Path(args.out_dir)
    rows = []
    for solver in _solver_list(args):
        rec = run_bcd(_spec(args, cfg, solver))
        rows.extend(trace_rows(rec, cfg))
        print(f"{solver}: {rec.iterations} iterations, "
              f"sum rate {rec.final_sum_rate:.3f} bit/cu"
              + ("" if rec.converged else " (iteration cap hit)"))
        for w in rec.warnings:
            print(f"  note: {w}")
    csv_path = out_dir / "trace.csv"
    write_csv(csv_path, rows)
    outputs = [str(csv_path)]
    fig = render_figure("convergence", [csv_path],
                        out_dir / "convergence.png", args.figures)
    if fig:
        outputs.append(fig)
    _finish(args, "run", cfg, outputs, t0)
    return 0


def cmd_sweep_power(args) -> int:
    t0 = time.monotonic()
    cfg = _scenario(args)
    out_dir = Path(args.out_dir)
    rows = []
    for solver in _solver_list(args):
        rows.extend(sweep_power(_spec(args, cfg, solver), args.p_dbm,
                                args.realizations))
    csv_path = out_dir / "sweep_power.csv"
    write_csv(csv_path, rows)
    outputs = [str(csv_path)]
    fig = render_figure("rate_vs_power", [csv_path],
                        out_dir / "rate_vs_power.png", args.figures)
    if fig:
        outputs.append(fig)
    _finish(args, "sweep-power", cfg, outputs, t0,
            {"p_dbm": args.p_dbm, "realizations": args.realizations})
    return 0


def cmd_sweep_antennas(args) -> int:
    t0 = time.monotonic()
    cfg = _scenario(args)
    out_dir = Path(args.out_dir)
    rows = []
    for solver in _solver_list(args):
        rows.extend(sweep_antennas(_spec(args, cfg, solver), args.m_list,
                                   args.realizations))
    csv_path = out_dir / "sweep_antennas.csv"
    write_csv(csv_path, rows)
    outputs = [str(csv_path)]
    fig = render_figure("rate_vs_M", [csv_path],
                        out_dir / "rate_vs_M.png", args.figures)
    if fig:
        outputs.append(fig)
    _finish(args, "sweep-antennas", cfg, outputs, t0,
            {"M_list": args.m_list, "realizations": args.realizations})
    return 0


def cmd_snr_scaling(args) -> int:
    t0 = time.monotonic()
    cfg = _scenario(args)   # only carries frequency defaults for the manifest
    out_dir = Path(args.out_dir)
    rows = snr_sweep(args.m_list)
    csv_path = out_dir / "snr_scaling.csv"
    write_csv(csv_path, rows)
    worst = max(abs(r["ratio"] - 1.0) for r in rows)
    print(f"single-user scaling: {len(rows)} rows, "
          f"worst simulated/theory deviation {100 * worst:.1f}%")
    outputs = [str(csv_path)]
    fig = render_figure("snr_scaling", [csv_path],
                        out_dir / "snr_scaling.png", args.figures)
    if fig:
        outputs.append(fig)
    _finish(args, "snr-scaling", cfg, outputs, t0, {"M_list": args.m_list})
    return 0


def cmd_sd_bench(args) -> int:
    t0 = time.monotonic()
    cfg = _scenario(args)
    out_dir = Path(args.out_dir)
    instances = []
    if args.problems:
        for path in sorted(Path().glob(args.problems)):
            instances.append((str(path), load_text(path)))
        if not instances:
            raise SystemExit(f"no problem files match {args.problems!r}")
    else:
        rng = np.random.default_rng(cfg.rng_seed)
        for M in args.m_list:
            for idx in range(args.random):
                qf = make_random_quadratic(M, rng, varpi=cfg.varpi)
                instances.append((f"random-M{M}-{idx}", qf))
    rows = []
    variants = [v for v in args.variants.split(",") if v]
    for name, qf in instances:
        for variant in variants:
            if variant not in VARIANTS:
                raise SystemExit(f"unknown variant {variant!r}")
            t_one = time.monotonic()
            res = solve_binary_exact(qf, variant=variant,
                                     time_limit=args.time_limit)
            rows.append({"M": qf.M, "variant": variant,
                         "nodes_visited": res.nodes,
                         "wall_time": time.monotonic() - t_one,
                         "objective": res.objective,
                         "instance": name})
    csv_path = out_dir / "sd_bench.csv"
    write_csv(csv_path, rows)
    outputs = [str(csv_path)]
    fig = render_figure("sd_nodes", [csv_path], out_dir / "sd_nodes.png",
                        args.figures)
    if fig:
        outputs.append(fig)
    _finish(args, "sd-bench", cfg, outputs, t0,
            {"variants": variants, "n_instances": len(instances)})
    return 0


def cmd_compare_feeding(args) -> int:
    t0 = time.monotonic()
    cfg = _scenario(args)
    out_dir = Path(args.out_dir)
    rows = compare_feeding(_spec(args, cfg, args.solver), args.realizations)
    csv_path = out_dir / "feeding.csv"
    write_csv(csv_path, rows)
    deltas = [r["delta"] for r in rows]
    print(f"center minus edge sum rate over {len(rows)} paired runs: "
          f"mean {np.mean(deltas):+.3f} bit/cu")
    _finish(args, "compare-feeding", cfg, [str(csv_path)], t0,
            {"realizations": args.realizations})
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hmimo",
        description="multi-cell holographic MIMO sum-rate experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", default=None,
                       help="scenario file (key = value lines)")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--out-dir", default="out")
        p.add_argument("--max-iters", type=int, default=100)
        p.add_argument("--figures", default=True,
                       action=argparse.BooleanOptionalAction,
                       help="render figures when hmimo-figures is installed")

    p = sub.add_parser("run", help="single convergence run per solver")
    common(p)
    p.add_argument("--solvers", default="WMMSE-HC",
                   help="comma-separated solver names")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep-power", help="sum rate vs transmit power")
    common(p)
    p.add_argument("--solvers", default="WMMSE-HC")
    p.add_argument("--p-dbm", type=_floats, default=[20, 25, 30, 35, 40])
    p.add_argument("--realizations", type=int, default=10)
    p.set_defaults(func=cmd_sweep_power)

    p = sub.add_parser("sweep-antennas", help="sum rate vs element count")
    common(p)
    p.add_argument("--solvers", default="WMMSE-HC")
    p.add_argument("--m-list", type=_ints, default=[16, 32, 64])
    p.add_argument("--realizations", type=int, default=10)
    p.set_defaults(func=cmd_sweep_antennas)

    p = sub.add_parser("snr-scaling",
                       help="single-user array-gain scaling check")
    common(p)
    p.add_argument("--m-list", type=_ints, default=[16, 32, 64, 100])
    p.set_defaults(func=cmd_snr_scaling)

    p = sub.add_parser("sd-bench", help="exact binary-design search cost")
    common(p)
    p.add_argument("--problems", default=None,
                   help="glob of problem files (text format)")
    p.add_argument("--random", type=int, default=20,
                   help="random instances per size when no files given")
    p.add_argument("--m-list", type=_ints, default=[8, 12, 16])
    p.add_argument("--variants", default=",".join(VARIANTS))
    p.add_argument("--time-limit", type=float, default=60.0)
    p.set_defaults(func=cmd_sd_bench)

    p = sub.add_parser("compare-feeding",
                       help="edge vs center microstrip feeding")
    common(p)
    p.add_argument("--solver", default="WMMSE-HC", choices=SOLVERS)
    p.add_argument("--realizations", type=int, default=10)
    p.set_defaults(func=cmd_compare_feeding)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
