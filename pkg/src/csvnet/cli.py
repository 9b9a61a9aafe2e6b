"""Command-line frontend.

Subcommands: validate (score a partition on a graph), compare (pairwise
relative indices for several graphs), generate (planted-partition sampler),
cluster (community detection), and simulate (the three studies). All
randomness flows from --seed; outputs are byte-identical across reruns and
thread counts. Exit codes: 0 success, 2 usage or input error, 1 internal
error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from ._rng import derive_rng
from .clustering import fast_greedy, louvain, to_newick
from .compare import compare_all, matrix_tsv
from .dcsbm import (
    DcsbmConfig,
    equal_block_sizes,
    planted_partition,
    powerlaw_weights,
    sample_dcsbm,
    theta_matrix,
)
from .graph import (
    Partition,
    induced_subgraph,
    load_graph,
    load_partition,
    save_graph,
    save_partition,
)
from .indices import csv_report, report_to_json, report_to_tsv
from .simharness import (
    DEFAULT_DEGRADATION_GRID,
    DEFAULT_SIM2_LEVELS,
    DEFAULT_THETA_GRID,
    SCHEMA_VERSION,
    rows_to_tsv,
    run_sim1,
    run_sim2,
    run_sim3,
)


def _write_text(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8", newline="\n")


def cmd_validate(args: argparse.Namespace) -> int:
    graph = load_graph(args.graph, directed=args.directed)
    partition = load_partition(args.partition, graph)
    report = csv_report(graph, partition, alpha=args.alpha)
    text = report_to_json(report) if args.format == "json" else report_to_tsv(report)
    _write_text(args.out, text)
    return 0


def _unique_names(paths: list[str]) -> list[str]:
    names: list[str] = []
    used: dict[str, int] = {}
    for path in paths:
        stem = Path(path).stem
        count = used.get(stem, 0) + 1
        used[stem] = count
        names.append(stem if count == 1 else f"{stem}-{count}")
    return names


def cmd_compare(args: argparse.Namespace) -> int:
    if len(args.graphs) < 2:
        raise ValueError("compare needs at least two graph files")
    if args.min_size < 1:
        raise ValueError("min_size must be at least 1")
    names = _unique_names(args.graphs)
    graphs = [(name, load_graph(path)) for name, path in zip(names, args.graphs)]
    result = compare_all(graphs, alpha=args.alpha, min_size=args.min_size,
                         seed=args.seed, use_wcsv=args.wcsv,
                         threads=args.threads)
    failures = [p for p in result.per_pair if p.error is not None]
    if len(failures) == len(result.per_pair):
        for pair in failures:
            print(f"error: {pair.name_i} vs {pair.name_j}: {pair.error}",
                  file=sys.stderr)
        return 2
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_text(str(out_dir / "R.tsv"), matrix_tsv(result.names, result.r_matrix))
    _write_text(str(out_dir / "S.tsv"), matrix_tsv(result.names, result.s_matrix))
    _write_text(str(out_dir / "D.tsv"),
                matrix_tsv(result.names, result.d_matrix.values))
    _write_text(str(out_dir / "dendrogram.nwk"),
                to_newick(result.dendrogram()) + "\n")
    summary = {
        "schema_version": SCHEMA_VERSION,
        "alpha": args.alpha,
        "min_size": args.min_size,
        "seed": args.seed,
        "use_wcsv": args.wcsv,
        "names": list(result.names),
        "failed_pairs": len(failures),
        "pairs": [{
            "name_i": p.name_i,
            "name_j": p.name_j,
            "n_common": p.n_common,
            "r_ij": p.r_ij,
            "r_ji": p.r_ji,
            "defined_ij": p.defined_ij,
            "defined_ji": p.defined_ji,
            "own_index_i": p.own_index_i,
            "own_index_j": p.own_index_j,
            "q_i": p.q_i,
            "q_j": p.q_j,
            "error": p.error,
        } for p in result.per_pair],
    }
    _write_text(str(out_dir / "summary.json"), json.dumps(summary, indent=2) + "\n")
    print(f"compared {len(result.names)} graphs; wrote 5 files to {out_dir}")
    return 0


def _generate_settings(args: argparse.Namespace) -> dict:
    settings = {"v": 500, "blocks": 8, "theta_within": 0.3,
                "theta_between": 0.01, "weight_mode": "uniform",
                "seed": args.seed}
    if args.config is not None:
        loaded = json.loads(Path(args.config).read_text(encoding="utf-8"))
        unknown = set(loaded) - set(settings)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        settings.update(loaded)
    for field in ("v", "blocks", "theta_within", "theta_between"):
        flag = getattr(args, field)
        if flag is not None:
            settings[field] = flag
    if args.weight_mode is not None:
        settings["weight_mode"] = args.weight_mode
    return settings


def cmd_generate(args: argparse.Namespace) -> int:
    s = _generate_settings(args)
    sizes = equal_block_sizes(int(s["v"]), int(s["blocks"]))
    partition = planted_partition(sizes)
    if s["weight_mode"] == "uniform":
        weights = np.ones(int(s["v"]))
    elif s["weight_mode"] == "powerlaw":
        weights = powerlaw_weights(partition, seed=derive_rng(s["seed"], 101))
    else:
        raise ValueError(f"unknown weight_mode {s['weight_mode']!r}")
    theta = theta_matrix(float(s["theta_within"]), float(s["theta_between"]),
                         int(s["blocks"]))
    config = DcsbmConfig(sizes, theta, weights, seed=int(s["seed"]))
    graph, partition = sample_dcsbm(config)
    if graph.n_edges == 0:
        raise ValueError("generated graph has no edges; raise theta or v")
    save_graph(graph, args.out_graph)
    connected = [lab for lab, deg in zip(graph.node_labels, graph.degrees)
                 if deg > 0]
    sub = induced_subgraph(graph, connected)
    mask = graph.degrees > 0
    save_partition(Partition(partition.assignment[mask], partition.q),
                   sub, args.out_partition)
    print(f"wrote {graph.n_nodes} nodes, {graph.n_edges} edges to "
          f"{args.out_graph}; partition of {len(connected)} connected nodes "
          f"to {args.out_partition}")
    return 0


def cmd_cluster(args: argparse.Namespace) -> int:
    graph = load_graph(args.graph)
    if args.algorithm == "louvain":
        partition = louvain(graph, args.seed)
    else:
        partition = fast_greedy(graph)
    lines = [f"{lab}\t{partition.assignment[i]}"
             for i, lab in enumerate(graph.node_labels)]
    _write_text(args.out, "\n".join(lines) + "\n")
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    common = dict(replicates=args.replicates, seed=args.seed,
                  alpha=args.alpha, threads=args.threads)
    if args.sim != "sim1" and args.v is not None and len(args.v) != 1:
        raise ValueError(f"{args.sim} takes a single --v value")
    if args.sim == "sim1":
        rows = run_sim1(v_list=args.v or (500,),
                        theta_between_grid=args.grid or DEFAULT_THETA_GRID,
                        **common)
    elif args.sim == "sim2":
        rows = run_sim2(theta_between_levels=args.levels or DEFAULT_SIM2_LEVELS,
                        degradation_grid=(args.degradation_grid
                                          or DEFAULT_DEGRADATION_GRID),
                        v=(args.v or (500,))[0], **common)
    else:
        rows = run_sim3(theta_between_levels=args.levels or (0.01, 0.1, 0.2, 0.3),
                        algorithms=args.algorithms or ("louvain", "fast_greedy"),
                        v=(args.v or (500,))[0], **common)
    _write_text(args.out, rows_to_tsv(rows))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="csvnet",
        description="Statistical validation of graph partitions as "
                    "community structures.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_val = sub.add_parser("validate", help="score a partition on a graph")
    p_val.add_argument("graph", help="edge-list file")
    p_val.add_argument("partition", help="node-community file")
    p_val.add_argument("--alpha", type=float, default=0.05)
    p_val.add_argument("--directed", action="store_true")
    p_val.add_argument("--format", choices=("json", "tsv"), default="json")
    p_val.add_argument("--out", default=None, help="output file (default stdout)")
    p_val.set_defaults(func=cmd_validate)

    p_cmp = sub.add_parser("compare", help="pairwise relative indices")
    p_cmp.add_argument("graphs", nargs="+", help="two or more edge-list files")
    p_cmp.add_argument("--alpha", type=float, default=0.05)
    p_cmp.add_argument("--min-size", type=int, default=5, dest="min_size")
    p_cmp.add_argument("--seed", type=int, default=0)
    p_cmp.add_argument("--wcsv", action="store_true",
                       help="use the weighted index in the ratios")
    p_cmp.add_argument("--threads", type=int, default=None)
    p_cmp.add_argument("--out-dir", default="csvnet_compare", dest="out_dir")
    p_cmp.set_defaults(func=cmd_compare)

    p_gen = sub.add_parser("generate", help="sample a planted-partition graph")
    p_gen.add_argument("--config", default=None, help="JSON settings file")
    p_gen.add_argument("--v", type=int, default=None)
    p_gen.add_argument("--blocks", type=int, default=None)
    p_gen.add_argument("--theta-within", type=float, default=None,
                       dest="theta_within")
    p_gen.add_argument("--theta-between", type=float, default=None,
                       dest="theta_between")
    p_gen.add_argument("--weight-mode", choices=("uniform", "powerlaw"),
                       default=None, dest="weight_mode")
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--out-graph", default="graph.tsv", dest="out_graph")
    p_gen.add_argument("--out-partition", default="partition.tsv",
                       dest="out_partition")
    p_gen.set_defaults(func=cmd_generate)

    p_clu = sub.add_parser("cluster", help="detect communities")
    p_clu.add_argument("graph", help="edge-list file")
    p_clu.add_argument("--algorithm", choices=("louvain", "fast_greedy"),
                       default="louvain")
    p_clu.add_argument("--seed", type=int, default=0)
    p_clu.add_argument("--out", default=None, help="output file (default stdout)")
    p_clu.set_defaults(func=cmd_cluster)

    p_sim = sub.add_parser("simulate", help="run a simulation study")
    p_sim.add_argument("sim", choices=("sim1", "sim2", "sim3"))
    p_sim.add_argument("--v", type=int, nargs="+", default=None)
    p_sim.add_argument("--replicates", type=int, default=20)
    p_sim.add_argument("--grid", type=float, nargs="+", default=None,
                       help="between-rate grid (sim1)")
    p_sim.add_argument("--levels", type=float, nargs="+", default=None,
                       help="between-rate levels (sim2, sim3)")
    p_sim.add_argument("--degradation-grid", type=float, nargs="+",
                       default=None, dest="degradation_grid")
    p_sim.add_argument("--algorithms", nargs="+", default=None,
                       help="louvain, fast_greedy, or external:<path> (sim3)")
    p_sim.add_argument("--alpha", type=float, default=0.05)
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--threads", type=int, default=None)
    p_sim.add_argument("--out", default=None, help="output file (default stdout)")
    p_sim.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
