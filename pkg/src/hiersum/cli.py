"""Command-line front end.

Subcommands cover the full workflow: generate fixture graphs, summarize an
edge list, verify a summary against its source, inspect statistics, run
queries on the compressed form, decode back to an edge list, and benchmark
scaling. Reports are line-oriented key=value text.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 I/O or
format error.
"""
from __future__ import annotations

import argparse
import sys
import time
from fractions import Fraction

from hiersum.generators import (RingGroupSpec, caveman_graph, er_graph,
                                ring_group_graph)
from hiersum.graph import (EdgeListParseError, InputGraph, induced_sample,
                           load_edge_list_path, write_edge_list)
from hiersum.pipeline import SummarizeConfig, prune, summarize
from hiersum.queries import dfs, neighbor_query_bench, pagerank
from hiersum.summary import HierarchicalSummary, SummaryFormatError

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_USAGE = 2
EXIT_IO = 3


def _fail(code: int, message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def _load_graph(path: str) -> InputGraph:
    try:
        return load_edge_list_path(path)
    except OSError as exc:
        raise _CliError(EXIT_IO, f"cannot read {path}: {exc.strerror or exc}")
    except EdgeListParseError as exc:
        raise _CliError(EXIT_IO, f"{path}: {exc}")


def _load_summary(path: str) -> HierarchicalSummary:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise _CliError(EXIT_IO, f"cannot read {path}: {exc.strerror or exc}")
    try:
        return HierarchicalSummary.deserialize(text)
    except SummaryFormatError as exc:
        raise _CliError(EXIT_IO, f"{path}: {exc}")


class _CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _emit(lines: list[str], report_path: str | None) -> None:
    for line in lines:
        print(line)
    if report_path:
        try:
            with open(report_path, "w", encoding="utf-8") as fh:
                fh.write("\n".join(lines) + "\n")
        except OSError as exc:
            raise _CliError(EXIT_IO,
                            f"cannot write {report_path}: {exc.strerror or exc}")


def _config_from_args(args, seed: int) -> SummarizeConfig:
    return SummarizeConfig(
        iterations=args.iterations,
        height_bound=args.height_bound,
        seed=seed,
        pruning_enabled=False,
    )


def cmd_gen(args) -> int:
    if args.family == "theorem":
        g = ring_group_graph(RingGroupSpec(args.n, args.k))
    elif args.family == "er":
        g = er_graph(args.n, args.p, args.seed)
    else:
        g = caveman_graph(args.cliques, args.size, args.seed)
    try:
        with open(args.out, "w", encoding="utf-8") as fh:
            write_edge_list(g, fh)
    except OSError as exc:
        return _fail(EXIT_IO, f"cannot write {args.out}: {exc.strerror or exc}")
    print(f"nodes={g.node_count}")
    print(f"edges={g.edge_count}")
    return EXIT_OK


def cmd_summarize(args) -> int:
    if args.repeat < 1:
        return _fail(EXIT_USAGE, "--repeat must be >= 1")
    g = _load_graph(args.input)
    lines = [
        f"input={args.input}",
        f"nodes={g.node_count}",
        f"edges={g.edge_count}",
        f"seed={args.seed}",
        f"iterations={args.iterations}",
        f"height_bound={args.height_bound if args.height_bound else 'none'}",
        f"pruning={'off' if args.no_prune else 'on'}",
        f"repeat={args.repeat}",
    ]
    costs = []
    times = []
    first_summary = None
    for run in range(args.repeat):
        cfg = _config_from_args(args, args.seed + run)
        trace: list[str] = []

        def on_iteration(t, s, merges):
            trace.append(f"iteration_{t:02d}_cost={s.cost()}")
            trace.append(f"iteration_{t:02d}_merges={merges}")

        start = time.perf_counter()
        s = summarize(g, cfg, on_iteration if run == 0 else None)
        merge_seconds = time.perf_counter() - start
        prune_seconds = 0.0
        if not args.no_prune:
            start = time.perf_counter()
            prune(s, g)
            prune_seconds = time.perf_counter() - start
        if run == 0:
            lines.extend(trace)
            first_summary = s
        costs.append(s.cost())
        times.append(merge_seconds + prune_seconds)
        lines.append(f"run_{run}_cost={s.cost()}")
        lines.append(f"run_{run}_merge_seconds={merge_seconds:.3f}")
        lines.append(f"run_{run}_prune_seconds={prune_seconds:.3f}")
    s = first_summary
    report = s.verify_lossless(g)
    if not report:
        _emit(lines, None)
        return _fail(EXIT_VERIFY,
                     f"self-check failed, summary not written: {report}")
    frac_p, frac_n, frac_h = s.edge_composition()
    lines.extend([
        f"cost={s.cost()}",
        f"relative_size={s.cost() / g.edge_count if g.edge_count else 0.0:.6f}",
        f"frac_p={frac_p:.6f}",
        f"frac_n={frac_n:.6f}",
        f"frac_h={frac_h:.6f}",
        f"max_height={s.max_height()}",
        f"mean_cost={sum(costs) / len(costs):.3f}",
        f"mean_seconds={sum(times) / len(times):.3f}",
        "verified=pass",
    ])
    try:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(s.serialize())
    except OSError as exc:
        return _fail(EXIT_IO, f"cannot write {args.out}: {exc.strerror or exc}")
    _emit(lines, args.report)
    return EXIT_OK


def cmd_verify(args) -> int:
    s = _load_summary(args.summary)
    g = _load_graph(args.graph)
    report = s.verify_lossless(g)
    if report:
        print("verified=pass")
        return EXIT_OK
    print("verified=fail")
    for violation in report.violations:
        print(f"violation={violation}")
    return EXIT_VERIFY


def cmd_stats(args) -> int:
    s = _load_summary(args.summary)
    frac_p, frac_n, frac_h = s.edge_composition()
    supernode_total = s.subnode_count + len(s.children)
    print(f"subnodes={s.subnode_count}")
    print(f"supernodes={supernode_total}")
    print(f"p_edges={s.pos_count}")
    print(f"n_edges={s.neg_count}")
    print(f"h_edges={s.h_edge_count()}")
    print(f"cost={s.cost()}")
    print(f"frac_p={frac_p:.6f}")
    print(f"frac_n={frac_n:.6f}")
    print(f"frac_h={frac_h:.6f}")
    print(f"max_height={s.max_height()}")
    print(f"mean_leaf_depth={s.mean_leaf_depth():.6f}")
    return EXIT_OK


def cmd_neighbors(args) -> int:
    s = _load_summary(args.summary)
    if not 0 <= args.node < s.subnode_count:
        return _fail(EXIT_USAGE, f"node {args.node} out of range")
    print(" ".join(str(w) for w in sorted(s.neighbors_of(args.node))))
    return EXIT_OK


def cmd_pagerank(args) -> int:
    s = _load_summary(args.summary)
    if not 0 < args.damping < 1:
        return _fail(EXIT_USAGE, "--damping must lie in (0, 1)")
    if args.iters < 1:
        return _fail(EXIT_USAGE, "--iters must be >= 1")
    vec = pagerank(s, d=args.damping, iters=args.iters)
    for node, score in vec.top(args.top):
        print(f"node={node} score={score!r}")
    return EXIT_OK


def cmd_dfs(args) -> int:
    s = _load_summary(args.summary)
    if not 0 <= args.start < s.subnode_count:
        return _fail(EXIT_USAGE, f"start {args.start} out of range")
    print(" ".join(str(v) for v in dfs(s, args.start)))
    return EXIT_OK


def cmd_decode(args) -> int:
    s = _load_summary(args.summary)
    g = s.decode()
    try:
        with open(args.out, "w", encoding="utf-8") as fh:
            write_edge_list(g, fh)
    except OSError as exc:
        return _fail(EXIT_IO, f"cannot write {args.out}: {exc.strerror or exc}")
    print(f"nodes={g.node_count}")
    print(f"edges={g.edge_count}")
    return EXIT_OK


def cmd_bench(args) -> int:
    g = _load_graph(args.input)
    try:
        fractions = [float(Fraction(part)) for part in args.fractions.split(",")]
    except (ValueError, ZeroDivisionError):
        return _fail(EXIT_USAGE, f"bad fraction list: {args.fractions}")
    if not fractions or any(not 0 < f <= 1 for f in fractions):
        return _fail(EXIT_USAGE, "fractions must lie in (0, 1]")
    rows = []
    for fraction in sorted(fractions):
        sample = induced_sample(g, fraction, args.seed)
        cfg = SummarizeConfig(iterations=args.iterations, seed=args.seed)
        start = time.perf_counter()
        summarize(sample, cfg)
        seconds = time.perf_counter() - start
        rows.append((fraction, sample.edge_count, seconds))
        print(f"fraction={fraction:g} edges={sample.edge_count} "
              f"seconds={seconds:.3f}")
    worst = 0.0
    for (_, e1, t1), (_, e2, t2) in zip(rows, rows[1:]):
        if e1 == 0 or t1 <= 0 or e2 == 0:
            continue
        worst = max(worst, (t2 / t1) / (e2 / e1))
    print(f"max_normalized_ratio={worst:.3f}")
    return EXIT_OK


def cmd_query_bench(args) -> int:
    s = _load_summary(args.summary)
    if args.samples < 1:
        return _fail(EXIT_USAGE, "--samples must be >= 1")
    report = neighbor_query_bench(s, args.samples, args.seed)
    print(f"samples={report.samples}")
    print(f"mean_microseconds={report.mean_microseconds:.3f}")
    print(f"mean_leaf_depth={report.mean_leaf_depth:.6f}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hiersum",
        description="Lossless hierarchical graph summarization.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a fixture graph")
    gen_sub = p.add_subparsers(dest="family", required=True)
    p_theorem = gen_sub.add_parser("theorem", help="ring-group family")
    p_theorem.add_argument("--n", type=int, required=True, help="group count")
    p_theorem.add_argument("--k", type=int, required=True, help="group size")
    p_theorem.add_argument("--out", required=True)
    p_er = gen_sub.add_parser("er", help="Erdos-Renyi G(n, p)")
    p_er.add_argument("--n", type=int, required=True)
    p_er.add_argument("--p", type=float, required=True)
    p_er.add_argument("--seed", type=int, default=0)
    p_er.add_argument("--out", required=True)
    p_cave = gen_sub.add_parser("caveman", help="ring of bridged cliques")
    p_cave.add_argument("--cliques", type=int, required=True)
    p_cave.add_argument("--size", type=int, required=True)
    p_cave.add_argument("--seed", type=int, default=0)
    p_cave.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("summarize", help="compress an edge list")
    p.add_argument("input")
    p.add_argument("--out", required=True)
    p.add_argument("--iterations", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--height-bound", type=int, default=None)
    p.add_argument("--no-prune", action="store_true")
    p.add_argument("--report", default=None)
    p.add_argument("--repeat", type=int, default=1)
    p.set_defaults(func=cmd_summarize)

    p = sub.add_parser("verify", help="check a summary against its source")
    p.add_argument("summary")
    p.add_argument("graph")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("stats", help="print summary statistics")
    p.add_argument("summary")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("neighbors", help="neighbor list of one subnode")
    p.add_argument("summary")
    p.add_argument("--node", type=int, required=True)
    p.set_defaults(func=cmd_neighbors)

    p = sub.add_parser("pagerank", help="PageRank on the compressed form")
    p.add_argument("summary")
    p.add_argument("--damping", type=float, default=0.85)
    p.add_argument("--iters", type=int, default=30)
    p.add_argument("--top", type=int, default=10)
    p.set_defaults(func=cmd_pagerank)

    p = sub.add_parser("dfs", help="DFS visit order on the compressed form")
    p.add_argument("summary")
    p.add_argument("--start", type=int, required=True)
    p.set_defaults(func=cmd_dfs)

    p = sub.add_parser("decode", help="expand a summary to an edge list")
    p.add_argument("summary")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("bench-scaling", help="runtime vs input size")
    p.add_argument("input")
    p.add_argument("--fractions", default="1/8,1/4,1/2,1")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--iterations", type=int, default=20)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("query-bench", help="time neighbor queries")
    p.add_argument("summary")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_query_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except _CliError as exc:
        return _fail(exc.code, str(exc))
    except ValueError as exc:
        return _fail(EXIT_USAGE, str(exc))


def entry_point() -> None:
    sys.exit(main())


if __name__ == "__main__":
    sys.exit(main())
