"""Command-line front end: gen, exact, count, sample, bench."""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

from .estimation import CountConfig, approx_count, approx_with_estimate, pointwise_preprocess, pointwise_samples
from .generators import GeneratorSpec, generate_graph
from .graph import EdgeListError, Graph, QueryOracle, load_edge_list, write_edge_list
from .motifs import exact_motif_count, parse_motif
from .rng import DEFAULT_SEED, RandomStream

REPORT_KEYS = ("command", "n", "m_ordered", "motif", "value", "samples", "queries", "seed", "seconds", "flags")
BENCH_COLUMNS = ("n", "m_ordered", "motif", "n_F_exact", "estimate", "rel_error",
                 "degree_q", "neighbor_q", "pair_q", "uniform_draws", "seconds")


class UsageError(Exception):
    pass


@dataclass
class RunReport:
    command: str
    n: int
    m_ordered: int
    motif: str | None
    value: float | None
    samples: list | None
    queries: dict
    seed: int
    seconds: float
    flags: dict = field(default_factory=dict)
    exact: int | None = None

    def to_json(self) -> str:
        d = asdict(self)
        return json.dumps({k: d[k] for k in REPORT_KEYS}, sort_keys=False)

    @classmethod
    def from_json(cls, text: str) -> "RunReport":
        d = json.loads(text)
        return cls(**{k: d[k] for k in REPORT_KEYS})


def emit_bench_csv(rows: list[RunReport]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(BENCH_COLUMNS)
    for r in rows:
        if r.exact is not None:
            rel = abs(r.value - r.exact) / r.exact if r.exact else (0.0 if r.value == 0 else math.inf)
        else:
            rel = ""
        q = r.queries
        w.writerow([r.n, r.m_ordered, r.motif, "" if r.exact is None else r.exact, r.value, rel,
                    q["degree"], q["neighbor"], q["pair"], q["uniform"], r.seconds])
    return buf.getvalue()


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def _motif_arg(text: str):
    try:
        return parse_motif(text)
    except (ValueError, OSError) as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _prob(text: str) -> float:
    x = float(text)
    if not 0 < x < 1:
        raise argparse.ArgumentTypeError("must lie in (0, 1)")
    return x


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="submotif", description="Sublinear motif counting and sampling in the graph query model.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def shared(sp, graph=True, motif=True):
        if graph:
            sp.add_argument("--graph", required=True, help="edge-list file")
        if motif:
            sp.add_argument("--motif", required=True, type=_motif_arg,
                            help="cycle:<k>, clique:<k>, star:<k> or file:<path>")
        sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
        sp.add_argument("--threads", type=int, default=1)
        sp.add_argument("--no-timing", action="store_true", help="report seconds as 0 for reproducible output")

    g = sub.add_parser("gen", help="generate a random graph")
    shared(g, graph=False, motif=False)
    g.add_argument("--model", choices=("er", "powerlaw", "planted"), required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--p", type=float, default=0.1)
    g.add_argument("--exponent", type=float, default=2.5)
    g.add_argument("--avg-degree", type=float, default=6.0)
    g.add_argument("--motif", default="cycle:4", help="motif to plant (planted model)")
    g.add_argument("--copies", type=int, default=0)
    g.add_argument("--out", required=True)

    e = sub.add_parser("exact", help="exact count by brute force")
    shared(e)

    c = sub.add_parser("count", help="approximate count")
    shared(c)
    c.add_argument("--eps", type=_prob, required=True)
    c.add_argument("--delta", type=_prob, default=1 / 3)
    c.add_argument("--advice-nf", type=float)
    c.add_argument("--advice-m", type=int)
    c.add_argument("--trials", type=int, help="attempt count override for counting with advice")
    c.add_argument("--c-full", type=float, default=2.0)

    s = sub.add_parser("sample", help="pointwise-uniform copy samples")
    shared(s)
    s.add_argument("--eps", type=_prob, required=True)
    s.add_argument("--delta", type=_prob, required=True)
    s.add_argument("--num", type=int, required=True)
    s.add_argument("--runs", type=int, help="repetitions for the preprocessing medians")

    b = sub.add_parser("bench", help="repeated counting runs as CSV")
    shared(b)
    b.add_argument("--trials", type=int, default=10)
    b.add_argument("--with-exact", action="store_true")
    b.add_argument("--eps", type=_prob, default=0.25)
    b.add_argument("--c-full", type=float, default=2.0)
    return p


def _report(args, graph: Graph, value, oracle: QueryOracle, t0: float, *, motif=None, samples=None,
            flags=None, exact=None, seed=None) -> RunReport:
    seconds = 0.0 if getattr(args, "no_timing", False) else round(time.perf_counter() - t0, 6)
    return RunReport(args.command, graph.n, graph.m_ordered, None if motif is None else motif.name,
                     value, samples, oracle.ledger.as_dict(), args.seed if seed is None else seed,
                     seconds, flags or {}, exact)


def _cmd_gen(args) -> RunReport:
    t0 = time.perf_counter()
    spec = GeneratorSpec(args.model, n=args.n, p=args.p, exponent=args.exponent, avg_degree=args.avg_degree,
                         motif=args.motif, copies=args.copies, seed=args.seed)
    graph = generate_graph(spec)
    write_edge_list(graph, args.out)
    return _report(args, graph, None, QueryOracle(graph), t0)


def _cmd_exact(args, graph) -> RunReport:
    t0 = time.perf_counter()
    oracle = QueryOracle(graph)
    full = oracle.read_graph()
    return _report(args, graph, exact_motif_count(full, args.motif), oracle, t0, motif=args.motif)


def _cmd_count(args, graph) -> RunReport:
    t0 = time.perf_counter()
    oracle = QueryOracle(graph)
    rng = RandomStream(args.seed)
    if (args.advice_nf is None) != (args.advice_m is None):
        raise UsageError("--advice-nf and --advice-m go together")
    if args.advice_nf is not None:
        est = approx_with_estimate(oracle, graph.n, args.motif, args.eps, min(args.delta, 0.49),
                                   args.advice_nf, args.advice_m, rng, trials=args.trials)
    else:
        est = approx_count(oracle, graph.n, args.eps, args.motif, rng,
                           config=CountConfig(c_full=args.c_full, delta=args.delta, trials=args.trials))
    return _report(args, graph, est.value, oracle, t0, motif=args.motif, flags=est.flags)


def _cmd_sample(args, graph) -> RunReport:
    t0 = time.perf_counter()
    oracle = QueryOracle(graph)
    rng = RandomStream(args.seed)
    state = pointwise_preprocess(oracle, graph.n, args.motif, args.eps, args.delta, rng, runs=args.runs)
    flags = {"empty": state.empty, "degraded_confidence": bool(state.D is not None and not state.D.ok)}
    samples = []
    if not state.empty:
        for copy in pointwise_samples(state, oracle, rng, args.num):
            samples.append({"vertices": sorted(copy.vertices), "edges": sorted(list(e) for e in copy.edges)})
    return _report(args, graph, state.n_hat_F, oracle, t0, motif=args.motif, samples=samples, flags=flags)


def _bench_trial(payload) -> RunReport:
    args, graph, trial, exact = payload
    t0 = time.perf_counter()
    oracle = QueryOracle(graph)
    rng = RandomStream(args.seed).child(trial)
    est = approx_count(oracle, graph.n, args.eps, args.motif, rng, config=CountConfig(c_full=args.c_full))
    return _report(args, graph, est.value, oracle, t0, motif=args.motif, flags=est.flags, exact=exact,
                   seed=args.seed)


def _cmd_bench(args, graph) -> str:
    exact = exact_motif_count(graph, args.motif) if args.with_exact else None
    payloads = [(args, graph, i, exact) for i in range(args.trials)]
    if args.threads > 1:
        with ProcessPoolExecutor(max_workers=args.threads) as pool:
            rows = list(pool.map(_bench_trial, payloads))
    else:
        rows = [_bench_trial(p) for p in payloads]
    return emit_bench_csv(rows)


def run_command(argv: list[str] | None = None, stdout=None, stderr=None) -> int:
    """Run one subcommand; exit code 0 ok, 1 usage error, 2 runtime error."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        if args.threads < 1:
            raise UsageError("--threads must be positive")
        if args.command == "gen":
            out = _cmd_gen(args).to_json()
        else:
            graph = load_edge_list(args.graph)
            if args.command == "bench":
                out = _cmd_bench(args, graph)
            else:
                handler = {"exact": _cmd_exact, "count": _cmd_count, "sample": _cmd_sample}[args.command]
                out = handler(args, graph).to_json()
    except UsageError as exc:
        print(exc, file=stderr)
        return 1
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except (OSError, EdgeListError, ValueError, RuntimeError) as exc:
        print(f"submotif: error: {exc}", file=stderr)
        return 2
    stdout.write(out if out.endswith("\n") else out + "\n")
    return 0


def main() -> None:
    sys.exit(run_command())


if __name__ == "__main__":
    main()
