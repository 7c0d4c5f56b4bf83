"""Command line: generate, solve, verify, compare, bench."""

from __future__ import annotations

import argparse
import csv
import io
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

from .cutgraph import exact_cut_graph, format_solution, is_cut_graph, parse_solution
from .errors import ParseError, SurfcutError
from .generate import generate_instance
from .pipeline import MODES, Caps, run_pipeline, with_ratio
from .surface_map import format_map, parse_map, restrict

CSV_COLUMNS = ["seed", "n", "m", "g", "epsilon", "opt", "approx", "ratio", "c",
               "baseline", "mortar", "spanner", "contracted", "dp"]


def thread_count() -> int:
    raw = os.environ.get("SURFCUT_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _fraction(text: str) -> Fraction:
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError("not a rational number: %r" % text) from None
    if value <= 0:
        raise argparse.ArgumentTypeError("epsilon must be positive")
    return value


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise ParseError("cannot read %s: %s" % (path, exc.strerror)) from None


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _caps(args) -> Caps:
    return Caps(theta_cap=args.theta_cap, width_cap=args.width_cap, state_cap=args.state_cap,
                oracle_budget=args.oracle_budget, k=args.k, threads=thread_count())


# -- dumps ---------------------------------------------------------------

def dump_mortar(report) -> str:
    mg = report.artifacts["mortar"]
    g = mg.source
    sub, ids = restrict(g, mg.subgraph.edges, validate=False)
    origin = mg.disk.dart_origin
    lines = [format_map(sub).rstrip("\n")]
    for br in report.artifacts["bricks"]:
        parts = ["brick %d" % br.index]
        for side in "NESW":
            darts = [ids[origin[br.disk_dart[x]]] for x in br.side(side)]
            parts.append(side + (" " + " ".join(map(str, darts)) if darts else ""))
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


def dump_spanner(report) -> str:
    return format_map(report.artifacts["spanner"].graph)


def dump_scd(report) -> str:
    scd = report.artifacts["scd"].scd
    bd = scd.branch
    below = bd.leaves_below()
    lines = ["scd route %s width %d" % (scd.route, bd.width)]
    for x in sorted(bd.tree_edges(), key=lambda t: (min(below[t]), t)):
        lines.append("edge %d mid %s" % (x, " ".join(map(str, sorted(bd.mid[x])))))
        for nz in scd.nooses.get(x, []):
            lines.append("  noose %s" % " ".join(map(str, nz.vertices)))
        for r in scd.regions.get(x, ()):
            lines.append("  region %d edges %d components %d" % (r.side, len(r.edges), r.components))
        lines.append("  theta %d" % scd.theta_values.get(x, 0))
    return "\n".join(lines) + "\n"


def dump_dp_stats(report) -> str:
    dp = report.artifacts.get("dp")
    if dp is None:
        return "tables 0\n"
    st = dp.stats
    lines = ["tables %d" % len(st.table_sizes)]
    lines += ["table %d %d" % (node, size) for node, size in sorted(st.table_sizes.items())]
    total = sum(st.table_sizes.values())
    lines += ["entries_total %d" % total, "pairs_tried %d" % st.pairs_tried,
              "peak_entries %d" % st.peak_entries, "spot_checks %d" % st.spot_checks,
              # rough: key tuple plus length and back pointer per entry
              "memory_estimate_bytes %d" % (total * 200)]
    return "\n".join(lines) + "\n"


# -- subcommands ---------------------------------------------------------

def cmd_generate(args) -> int:
    g = generate_instance(args.genus, args.n, args.weights, args.seed)
    _write(args.output, format_map(g))
    return 0


def cmd_solve(args) -> int:
    g = parse_map(_read(args.map))
    report, h = run_pipeline(g, args.epsilon, args.mode, _caps(args), seed=args.seed)
    if args.with_oracle:
        with_ratio(report, exact_cut_graph(g, edge_budget=args.oracle_budget).length)
    _write(args.output, format_solution(h))
    if args.report:
        _write(args.report, report.format())
    dumps = [(args.dump_mortar, dump_mortar), (args.dump_spanner, dump_spanner),
             (args.dump_scd, dump_scd), (args.dump_dp_stats, dump_dp_stats)]
    for path, fn in dumps:
        if path:
            if fn is not dump_dp_stats and "mortar" not in report.artifacts:
                raise SurfcutError("no %s in mode %s" % (fn.__name__[5:], args.mode))
            _write(path, fn(report))
    return 0


def cmd_verify(args) -> int:
    g = parse_map(_read(args.map))
    h = parse_solution(_read(args.solution), g)
    cert = is_cut_graph(g, h)
    print("\n".join(cert.lines()))
    print("length %s" % h.length)
    return 0 if cert.valid else 1


def _compare_row(g, seed, args):
    report, _ = run_pipeline(g, args.epsilon, "approx", _caps(args), seed=seed)
    opt = exact_cut_graph(g, edge_budget=args.oracle_budget).length
    with_ratio(report, opt)
    v = report.values

    def get(key):
        x = v.get(key)
        return "" if x is None else str(x)

    ratio = v["ratio"]
    return [seed, g.n, g.m, g.genus, str(v["epsilon"]), str(opt), str(v["final_length"]),
            "" if ratio is None else "%.6f" % ratio, "" if v["c"] is None else "%.6f" % v["c"],
            get("baseline_length"), get("mortar_length"), get("spanner_length"),
            get("chosen_weight"), get("dp_length")]


def cmd_compare(args) -> int:
    if args.map:
        fixed = parse_map(_read(args.map))
        jobs = [(fixed, s) for s in args.seeds]
    else:
        jobs = [(generate_instance(args.genus, args.n, args.weights, s), s) for s in args.seeds]
    with ThreadPoolExecutor(max_workers=thread_count()) as pool:
        rows = list(pool.map(lambda j: _compare_row(j[0], j[1], args), jobs))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    w.writerows(rows)
    _write(args.output, buf.getvalue())
    return 0


def cmd_bench(args) -> int:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["genus", "n", "seed", "m", "final", "width", "seconds"])
    for genus in args.genus:
        for n in args.n:
            for s in args.seeds:
                g = generate_instance(genus, n, args.weights, s)
                t = time.perf_counter()
                report, _ = run_pipeline(g, args.epsilon, args.mode, _caps(args), seed=s)
                w.writerow([genus, n, s, g.m, str(report["final_length"]),
                            report.values.get("width", ""), "%.3f" % (time.perf_counter() - t)])
    _write(args.output, buf.getvalue())
    return 0


# -- parser --------------------------------------------------------------

def _add_caps(p):
    p.add_argument("--epsilon", type=_fraction, default=Fraction(1))
    p.add_argument("--theta-cap", type=int, default=12,
                   help="largest portal count per brick with all subsets enumerated")
    p.add_argument("--k", type=int, default=None, help="override the contraction modulus")
    p.add_argument("--width-cap", type=int, default=8)
    p.add_argument("--state-cap", type=int, default=200_000)
    p.add_argument("--oracle-budget", type=int, default=16)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="surfcut", description="Shortest cut graphs of embedded graphs.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a random instance")
    p.add_argument("--genus", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--weights", default="unit", help="unit, uniform(1..W) or metric")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("solve", help="run a pipeline and write a solution")
    p.add_argument("map")
    p.add_argument("--mode", choices=MODES, default="approx")
    _add_caps(p)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--with-oracle", action="store_true", help="also record OPT and the ratio")
    p.add_argument("-o", "--output")
    p.add_argument("--report")
    p.add_argument("--dump-mortar")
    p.add_argument("--dump-spanner")
    p.add_argument("--dump-scd")
    p.add_argument("--dump-dp-stats")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="certify a solution file")
    p.add_argument("map")
    p.add_argument("solution")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("compare", help="CSV of approximation ratios against the oracle")
    p.add_argument("map", nargs="?")
    _add_caps(p)
    p.add_argument("--seeds", type=int, nargs="+", default=[0])
    p.add_argument("--genus", type=int, default=2)
    p.add_argument("--n", type=int, default=6)
    p.add_argument("--weights", default="uniform(1..9)")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("bench", help="time the pipeline on generated instances")
    p.add_argument("--genus", type=int, nargs="+", default=[2, 4])
    p.add_argument("--n", type=int, nargs="+", default=[50, 100])
    p.add_argument("--seeds", type=int, nargs="+", default=[0])
    p.add_argument("--weights", default="uniform(1..9)")
    p.add_argument("--mode", choices=MODES, default="approx")
    _add_caps(p)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_bench)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SurfcutError as exc:
        stage = getattr(exc, "stage", None)
        where = " [%s]" % stage if stage else ""
        print("error%s: %s: %s" % (where, type(exc).__name__, exc), file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
