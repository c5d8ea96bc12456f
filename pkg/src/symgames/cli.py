"""Command-line interface: ``symgames <command> [flags]``.

Flag values fall back to ``SYMGAMES_<FLAG>`` environment variables (dashes
become underscores, e.g. ``SYMGAMES_PLAYERS``) and then to built-in
defaults. Exit status is 0 on success, 1 for usage errors and 2 when the
command itself fails.
"""
import argparse
import csv
import json
import os
import sys
from pathlib import Path

import numpy as np

from symgames import bench
from symgames import combinatorics as comb
from symgames import generators as gen
from symgames import representations as rep
from symgames import solvers as sv
from symgames import svgplot

EXIT_USAGE = 1
EXIT_RUNTIME = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def _env(flag, default, kind=str):
    value = os.environ.get("SYMGAMES_" + flag.upper().replace("-", "_"))
    if value is None:
        return default
    try:
        return kind(value)
    except ValueError:
        raise UsageError(f"bad value {value!r} for SYMGAMES_{flag.upper().replace('-', '_')}")


def _add(parser, flag, kind=str, default=None, **kw):
    parser.add_argument("--" + flag, type=kind, default=_env(flag, default, kind), **kw)


def _int_list(text):
    return [int(x) for x in text.split(",") if x]


def _float_list(text):
    return [float(x) for x in text.split(",") if x]


def _str_list(text):
    return [x for x in text.split(",") if x]


def _emit(data, out):
    text = json.dumps(data)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def cmd_generate(args):
    params = gen.GeneratorParams(args.family, args.players, args.actions, args.seed,
                                 args.n_functions, args.edge_prob, args.n_gaussians)
    spec = gen.generate(params)
    out = Path(args.out)
    rep.save_game(out, spec)
    sidecar = out.with_name(out.stem + ".params.json")
    sidecar.write_text(json.dumps(params.to_json()) + "\n")
    print(f"wrote {out} and {sidecar}", file=sys.stderr)


def _load_mixtures(args, num_actions):
    if (args.mixture is None) == (args.mixtures_file is None):
        raise UsageError("give exactly one of --mixture or --mixtures-file")
    if args.mixture is not None:
        return np.array([args.mixture]), True
    mixtures = np.array(json.loads(Path(args.mixtures_file).read_text()), dtype=float)
    return np.atleast_2d(mixtures), False


def cmd_devpay(args):
    spec = rep.load_game(args.game)
    game = rep.build(spec, args.variant)
    mixtures, single = _load_mixtures(args, spec.num_actions)
    for m in mixtures:
        rep.validate_mixture(m, spec.num_actions)
    values = [rep.deviation_payoffs(game, m, denormalize=not args.normalized) for m in mixtures]
    data = [[float(x) for x in v] for v in values]
    _emit(data[0] if single else data, args.out)


def cmd_solve(args):
    spec = rep.load_game(args.game)
    game = rep.build(spec)
    config = sv.SolverConfig(iters=args.iters, rd_offset=args.offset, gd_step=args.step,
                             fp_initial_weight=args.fp_weight, epsilon=args.epsilon,
                             dedup_dist=args.dedup)
    found = sv.find_equilibria(game, tuple(args.methods), config=config, grid=args.grid,
                               workers=args.parallel, traces=args.traces)
    _emit(sv.candidates_to_json(found), args.out)


def cmd_bench(args):
    dtype = {32: np.float32, 64: np.float64}[args.precision]
    if args.kind == "devpay":
        results = bench.sweep(args.variants, args.players, args.actions, args.mixtures,
                              args.seed, args.reps, batch_size=args.batch_size,
                              workers=args.parallel, dtype=dtype, memory_cap=args.memory_cap)
        bench.write_csv(results, args.out)
        return
    rows = []
    if args.kind == "precision":
        for p in args.players:
            res = bench.precision_experiment(p, args.actions, args.games, args.mixtures, args.seed)
            rows.append({"P": p, "A": args.actions, "games": args.games, "n_mixtures": args.mixtures,
                         "max_abs_error": f"{res.max_abs_error:.6g}",
                         "max_relative_error": f"{res.max_relative_error:.6g}"})
    else:
        for p in args.players:
            for row in bench.solver_timing(p, args.actions, args.mixtures, args.iters,
                                           tuple(args.methods), args.seed):
                row.pop("finals")
                row["seconds"] = f"{row['seconds']:.6g}"
                rows.append(row)
    _write_rows(rows, args.out)


def _write_rows(rows, out):
    handle = open(out, "w", newline="") if out else sys.stdout
    try:
        writer = csv.DictWriter(handle, fieldnames=list(rows[0]) if rows else [],
                                lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    finally:
        if out:
            handle.close()


def cmd_table1(args):
    rows = [{"actions": a, "max_players": comb.max_players_without_overflow(a)}
            for a in range(2, args.max_actions + 1)]
    _write_rows(rows, args.out)


def cmd_plot(args):
    spec = rep.load_game(args.game)
    game = rep.build(spec)
    traces, equilibria = [], []
    if args.traces:
        for cand in sv.candidates_from_json(json.loads(Path(args.traces).read_text())):
            equilibria.append(cand.mixture)
            if cand.trace is not None:
                traces.append(np.asarray(cand.trace))
    if not args.heatmap and not traces and not equilibria:
        raise UsageError("nothing to plot: pass --heatmap and/or --traces")
    svg = svgplot.heatmap_svg(game, args.resolution, traces, equilibria, args.epsilon,
                              names=spec.names)
    Path(args.out).write_text(svg)


def make_parser():
    parser = _Parser(prog="symgames", description="Symmetric game deviation payoffs and equilibria.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("generate", help="write a game JSON file and its parameter sidecar")
    _add(p, "family", default="worked-example", choices=gen.FAMILIES)
    _add(p, "players", int, 3)
    _add(p, "actions", int, 3)
    _add(p, "seed", int, 0)
    _add(p, "n-functions", int, 200)
    _add(p, "edge-prob", float, 0.2)
    _add(p, "n-gaussians", int, 3)
    _add(p, "out", default="game.json")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("devpay", help="deviation payoffs at one or more mixtures")
    p.add_argument("game")
    p.add_argument("--mixture", type=_float_list)
    p.add_argument("--mixtures-file")
    scale = p.add_mutually_exclusive_group()
    scale.add_argument("--raw", dest="normalized", action="store_false")
    scale.add_argument("--normalized", dest="normalized", action="store_true")
    p.set_defaults(normalized=False)
    _add(p, "variant", default="log_weighted", choices=rep.VARIANTS)
    _add(p, "out")
    p.set_defaults(func=cmd_devpay)

    p = sub.add_parser("solve", help="search for epsilon-Nash mixtures")
    p.add_argument("game")
    _add(p, "methods", _str_list, "rd,gd")
    _add(p, "grid", int, 4)
    _add(p, "iters", int, 1000)
    _add(p, "epsilon", float, 1e-3, help="regret threshold on the normalized payoff scale")
    _add(p, "dedup", float, 1e-3)
    _add(p, "step", float, 1e-6)
    _add(p, "offset", float, 0.0)
    _add(p, "fp-weight", float)
    _add(p, "parallel", int)
    p.add_argument("--traces", action="store_true")
    _add(p, "out")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("bench", help="timing, precision and solver benchmarks as CSV")
    _add(p, "kind", default="devpay", choices=("devpay", "precision", "solvers"))
    _add(p, "variants", _str_list, ",".join(bench.LADDER))
    _add(p, "players", _int_list, "8,16,32")
    _add(p, "actions", int, 4)
    _add(p, "mixtures", int, 1024)
    _add(p, "reps", int, 3)
    _add(p, "seed", int, 0)
    _add(p, "batch-size", int)
    _add(p, "parallel", int)
    _add(p, "precision", int, 64, choices=(32, 64))
    _add(p, "memory-cap", int, bench.MEMORY_CAP)
    _add(p, "games", int, 10)
    _add(p, "iters", int, 1000)
    _add(p, "methods", _str_list, "rd,gd,fp")
    _add(p, "out")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("table1", help="largest player count per action count before 64-bit overflow")
    _add(p, "max-actions", int, 19)
    _add(p, "out")
    p.set_defaults(func=cmd_table1)

    p = sub.add_parser("plot", help="SVG regret heatmap over the 3-action simplex")
    p.add_argument("game")
    p.add_argument("--heatmap", action="store_true")
    _add(p, "traces")
    _add(p, "resolution", int, 30)
    _add(p, "epsilon", float)
    _add(p, "out", default="plot.svg")
    p.set_defaults(func=cmd_plot)
    return parser


def main(argv=None):
    try:
        args = make_parser().parse_args(argv)
        args.func(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, OverflowError, OSError, KeyError) as exc:
        print(f"symgames: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return 0


if __name__ == "__main__":
    sys.exit(main())
