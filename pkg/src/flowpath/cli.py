"""Command-line front end.

Exit codes: 0 success, 1 algorithm or verification failure, 2 input error,
3 internal invariant violation.
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import sys
from pathlib import Path

from . import harness
from .algorithms import A1Params, A2Params
from .conditions import check_condition_bruteforce, check_condition_edges
from .electric import effective_resistance, flow_state_distribution, solve_flow
from .emulation import MODE_PRESETS, EmulationConfig
from .generators import FAMILIES, GeneratorError, InstanceSpec, generate
from .graph import Graph, GraphError, from_edge_list, to_edge_list
from .shortest import NoPathError, dijkstra


class InputError(Exception):
    pass


def _parse_value(text: str):
    low = text.lower()
    if low in ("true", "false"):
        return low == "true"
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    return text


def _parse_kv(items) -> dict:
    out = {}
    for item in items or ():
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise InputError(f"expected key=value, got {item!r}")
        out[key] = _parse_value(value)
    return out


def _parse_cost_model(text: str | None) -> dict:
    if not text:
        return {}
    names = {"prep": "cost_constant_prep", "est": "cost_constant_est"}
    out = {}
    for key, value in _parse_kv(text.split(",")).items():
        if key not in names:
            raise InputError(f"unknown cost constant {key!r} (use prep=..,est=..)")
        out[names[key]] = float(value)
    return out


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _load(path: str) -> Graph:
    try:
        return from_edge_list(Path(path).read_text())
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _vertex(g: Graph, label: int) -> int:
    try:
        return g.index_of(label)
    except (KeyError, ValueError, GraphError):
        raise InputError(f"vertex {label} is not in the graph") from None


def _emit(args, text: str) -> None:
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _kv_block(pairs) -> str:
    return "".join(f"{k}: {v}\n" for k, v in pairs)


def _rows_csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


# -- subcommands -----------------------------------------------------------------


def cmd_gen(args) -> int:
    if args.corpus:
        if not args.out:
            raise InputError("--corpus needs --out DIRECTORY")
        count = harness.write_corpus(args.out, args.corpus, args.size, args.seed)
        sys.stdout.write(f"instances: {count}\ndirectory: {args.out}\n")
        return 0
    if not args.family:
        raise InputError("gen needs a family or --corpus")
    inst = generate(InstanceSpec.make(args.family, args.seed, **_parse_kv(args.params)))
    if args.out:
        harness.write_instance(inst, Path(args.out).parent, Path(args.out).name)
        sys.stdout.write(harness.manifest_text(inst))
    else:
        sys.stdout.write(to_edge_list(inst.graph))
        sys.stdout.write("".join(f"# {line}\n" for line in harness.manifest_text(inst).splitlines()))
    return 0


def cmd_check(args) -> int:
    g = _load(args.graph)
    s, t = _vertex(g, args.s), _vertex(g, args.t)
    rep = check_condition_edges(g, s, t)
    pairs = [("holds_condition1", rep.holds_condition1), ("max_alpha", repr(rep.max_alpha)),
             ("unique_shortest", rep.unique_shortest),
             ("violating_edge", "none" if rep.violating_edge is None else rep.violating_edge),
             ("path", " ".join(str(g.labels[v]) for v in rep.shortest_path.vertices)),
             ("path_resistance", repr(rep.path_resistance))]
    if args.bruteforce:
        pairs.append(("bruteforce_holds", check_condition_bruteforce(g, s, t)))
    _emit(args, _kv_block(pairs))
    return 0


def cmd_flow(args) -> int:
    g = _load(args.graph)
    s, t = _vertex(g, args.s), _vertex(g, args.t)
    sol = solve_flow(g, s, t)
    probs = flow_state_distribution(g, s, t).probs
    if args.format == "csv":
        rows = [(e, g.labels[u], g.labels[v], repr(w), repr(float(sol.flows[e])), repr(float(probs[e])))
                for e, u, v, w in g.edges()]
        _emit(args, _rows_csv(("edge", "u", "v", "weight", "flow", "probability"), rows))
        return 0
    lines = [("resistance", repr(effective_resistance(g, s, t)))]
    lines += [(f"potential {g.labels[v]}", repr(float(sol.potentials[v]))) for v in range(g.n)]
    lines += [(f"edge {e} {g.labels[u]}-{g.labels[v]}",
               f"flow={float(sol.flows[e])!r} p={float(probs[e])!r}") for e, u, v, _ in g.edges()]
    _emit(args, _kv_block(lines))
    return 0


def cmd_shortest(args) -> int:
    g = _load(args.graph)
    path = dijkstra(g, _vertex(g, args.s), _vertex(g, args.t))
    _emit(args, _kv_block([("path", " ".join(str(g.labels[v]) for v in path.vertices)),
                           ("length", repr(path.resistance_length)), ("hops", path.hops)]))
    return 0


def cmd_algorithm(args) -> int:
    g = _load(args.graph)
    s, t = _vertex(g, args.s), _vertex(g, args.t)
    if s == t:
        raise InputError("s and t must differ")
    config = EmulationConfig.preset(args.mode, args.seed, **_parse_cost_model(args.cost_model))
    try:
        if args.command == "a1":
            params = A1Params(args.l_hat, args.beta)
        else:
            if args.alpha is None:
                raise InputError("a2 needs --alpha")
            params = A2Params(args.l_hat, args.alpha)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    run = harness.run_algorithm(g, s, t, args.command, params, config, parallel=args.parallel)
    path = " ".join(str(g.labels[v]) for v in run.path.vertices) if run.path else "none"
    if args.format == "csv":
        text = _rows_csv(("algorithm", "mode", "seed", "success", "rounds", "total_steps",
                          "parallel_depth", "path"),
                         [(args.command, args.mode, args.seed, int(run.success), run.rounds,
                           run.ledger.total_steps, run.ledger.parallel_depth, path)])
    else:
        text = _kv_block([("algorithm", args.command), ("mode", args.mode), ("seed", args.seed),
                          ("success", str(run.success).lower()), ("rounds", run.rounds),
                          ("path", path)])
        if run.reason:
            text += f"reason: {run.reason}\n"
        text += "[ledger]\n" + run.ledger.report()
    _emit(args, text)
    return 0 if run.success else 1


def cmd_bench(args) -> int:
    if args.bench_command == "pipeline":
        if not args.out:
            raise InputError("bench pipeline needs --out DIRECTORY")
        paths = harness.bench_pipeline(args.out, args.trials, args.sweep_trials, args.seed,
                                       args.workers)
        sys.stdout.write("".join(f"wrote: {p}\n" for p in paths))
        return 0
    if args.bench_command == "sweep":
        result = harness.scaling_sweep("parallel-detour", args.l_values, args.m_values,
                                       args.algorithm, args.trials, args.seed, args.mode,
                                       fixed_m=args.fixed_m, fixed_l=args.fixed_l,
                                       workers=args.workers)
        _emit(args, result.to_csv())
        return 0
    spec = InstanceSpec.make(args.family, args.seed, **_parse_kv(args.params))
    summary = harness.run_trials(spec, args.algorithm, None, args.trials, args.seed, args.mode,
                                 parallel=args.parallel, workers=args.workers)
    if args.format == "csv":
        _emit(args, summary.to_csv())
    else:
        _emit(args, _kv_block([("instance", spec.name), ("algorithm", args.algorithm),
                               ("mode", args.mode), ("trials", len(summary.records)),
                               ("success_rate", f"{summary.success_rate:.6f}"),
                               ("mean_total_steps", f"{summary.mean_steps:.6f}"),
                               ("mean_parallel_depth", f"{summary.mean_depth:.6f}")]))
    return 0


def cmd_verify(args) -> int:
    corpus = args.corpus or os.environ.get(harness.CORPUS_ENV)
    if not corpus:
        raise InputError(f"give a corpus directory or set {harness.CORPUS_ENV}")
    try:
        report = harness.verify_suite(corpus, args.seed)
    except (FileNotFoundError, GraphError, ValueError) as exc:
        raise InputError(str(exc)) from None
    _emit(args, report.to_text())
    return 0 if report.ok else 1


# -- parser -------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    def global_flags(suppress: bool) -> argparse.ArgumentParser:
        # subcommands repeat the global flags without defaults, so a value
        # given before the subcommand is not overwritten
        flags = argparse.ArgumentParser(add_help=False)
        d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
        flags.add_argument("--seed", type=int, default=d(0), help="RNG seed (default 0)")
        flags.add_argument("--out", default=d(None), help="write output to this path instead of stdout")
        flags.add_argument("--format", choices=("text", "csv"), default=d("text"))
        return flags

    common = global_flags(True)
    parser = argparse.ArgumentParser(prog="flowpath", parents=[global_flags(False)],
                                     description="Electric-flow shortest paths with an emulated cost ledger.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", parents=[common], help="generate an instance or a corpus")
    p.add_argument("family", nargs="?", choices=FAMILIES)
    p.add_argument("params", nargs="*", help="family parameters as key=value")
    p.add_argument("--corpus", choices=("lemma", "algorithm"), help="write a whole corpus to --out")
    p.add_argument("--size", type=int, default=200, help="lemma corpus size")
    p.set_defaults(func=cmd_gen)

    def graph_args(q):
        q.add_argument("graph", help="edge-list file ('u v w' per line)")
        q.add_argument("s", type=int)
        q.add_argument("t", type=int)

    p = sub.add_parser("check", parents=[common], help="decide the uniqueness condition")
    graph_args(p)
    p.add_argument("--bruteforce", action="store_true", help="also run the subset enumeration")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("flow", parents=[common], help="unit electric flow and sampling distribution")
    graph_args(p)
    p.set_defaults(func=cmd_flow)

    p = sub.add_parser("shortest", parents=[common], help="classical shortest path")
    graph_args(p)
    p.set_defaults(func=cmd_shortest)

    for name in ("a1", "a2"):
        p = sub.add_parser(name, parents=[common], help=f"run algorithm {name.upper()}")
        graph_args(p)
        p.add_argument("--l-hat", type=float, required=True, help="upper bound on the path length")
        p.add_argument("--alpha", type=float, help="condition margin (a2)")
        p.add_argument("--beta", type=float, default=3.0, help="sample multiplier (a1)")
        p.add_argument("--mode", choices=tuple(MODE_PRESETS), default="exact")
        p.add_argument("--parallel", action="store_true", help="charge concurrent work in shared groups")
        p.add_argument("--cost-model", help="cost constants, e.g. prep=1,est=1")
        p.set_defaults(func=cmd_algorithm)

    p = sub.add_parser("bench", parents=[common], help="trials, scaling sweeps, full pipeline")
    bsub = p.add_subparsers(dest="bench_command", required=True)
    b = bsub.add_parser("trials", parents=[common])
    b.add_argument("family", choices=FAMILIES)
    b.add_argument("params", nargs="*")
    b.add_argument("--algorithm", choices=harness.ALGORITHMS, default="a2")
    b.add_argument("--trials", type=int, default=100)
    b.add_argument("--mode", choices=tuple(MODE_PRESETS), default="noisy")
    b.add_argument("--parallel", action="store_true")
    b.add_argument("--workers", type=int, default=1)
    b = bsub.add_parser("sweep", parents=[common])
    b.add_argument("--algorithm", choices=("a1", "a2"), default="a2")
    b.add_argument("--l-values", type=_int_list, default=[4, 8, 16, 32])
    b.add_argument("--m-values", type=_int_list, default=[64, 256, 1024])
    b.add_argument("--fixed-m", type=int, default=256)
    b.add_argument("--fixed-l", type=int, default=8)
    b.add_argument("--trials", type=int, default=20)
    b.add_argument("--mode", choices=tuple(MODE_PRESETS), default="noisy")
    b.add_argument("--workers", type=int, default=1)
    b = bsub.add_parser("pipeline", parents=[common])
    b.add_argument("--trials", type=int, default=20)
    b.add_argument("--sweep-trials", type=int, default=10)
    b.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("verify-lemmas", parents=[common], help="run the lemma suite over a corpus")
    p.add_argument("corpus", nargs="?", help=f"corpus directory (default ${harness.CORPUS_ENV})")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, GraphError, GeneratorError, NoPathError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return harness.EXIT_INPUT
    except harness.InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return harness.EXIT_INVARIANT
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return harness.EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
