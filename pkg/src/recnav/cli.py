"""Command-line pipeline: generate -> build -> diversify -> topology -> simulate -> report.

Every command reads its declared inputs, writes its outputs atomically with a
JSON sidecar recording the full parameter set, and exits nonzero with a
one-line JSON error on stderr when something goes wrong (exit 2: invalid
parameter, 3: missing input, 4: schema mismatch).
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import corpus as corpus_mod
from .errors import (
    IngestError,
    MissingInputError,
    ParameterError,
    RecnavError,
    SchemaError,
)
from .io_utils import fmt_value, read_sidecar, write_csv, write_json, write_sidecar
from .netbuild import (
    DIVERSIFIERS,
    PAPER_N_RANGE,
    Provenance,
    RecNetwork,
    build,
    diversify_exprel,
    diversify_random,
    diversify_ziegler,
    dump_network,
    network_sidecar,
)
from .navsim import (
    DEFAULT_BUDGET,
    KNOWLEDGE_KINDS,
    build_knowledge,
    cluster_items,
    run_berrypicking,
    run_foraging,
    run_p2p,
    sample_pairs,
    sample_patches,
    sample_quadruples,
)
from .similarity import (
    DEFAULT_TABLE_DEPTH,
    build_similarity_table,
    dump_similarity,
    rating_features,
    tfidf,
)
from .topology import BOWTIE_LABELS, membership_change, topology_report

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_PARAMETER = 2
EXIT_MISSING = 3
EXIT_SCHEMA = 4

RESULT_COLUMNS = [
    "scenario",
    "algo",
    "N",
    "diversifier",
    "knowledge",
    "seed",
    "sample_id",
    "goals_total",
    "goals_found",
    "steps_used",
    "success_fraction",
]

REPORT_COLUMNS = ["dataset", "algo", "N", "diversifier", "metric", "value"]

SCENARIOS = ("p2p", "berry", "forage")


def parse_n_spec(spec: str) -> list[int]:
    """Parse ``--n`` values: ``5``, ``1..20``, or ``5,10,20``."""
    values: list[int] = []
    for part in spec.split(","):
        part = part.strip()
        if ".." in part:
            lo_text, hi_text = part.split("..", 1)
            lo, hi = int(lo_text), int(hi_text)
            if lo > hi:
                raise ParameterError(f"bad N range {part!r}")
            values.extend(range(lo, hi + 1))
        elif part:
            values.append(int(part))
    if not values:
        raise ParameterError(f"no N values in {spec!r}")
    return sorted(set(values))


def _check_n_values(values: list[int], allow_large: bool) -> None:
    lo, hi = PAPER_N_RANGE
    for n in values:
        if n < lo:
            raise ParameterError(f"N={n} below the minimum of {lo}")
        if n > hi and not allow_large:
            raise ParameterError(
                f"N={n} outside the plausible range [{lo}, {hi}]; pass --allow-large-n to override"
            )


def _require(path: str | Path, what: str) -> Path:
    path = Path(path)
    if not path.exists():
        raise MissingInputError(f"{what} not found: {path}")
    return path


def _load_inputs(args, need_ratings: bool, need_corpus: bool):
    catalog = corpus_mod.load_catalog(_require(args.items, "catalog"))
    ratings = None
    text = None
    if need_ratings:
        ratings = corpus_mod.load_ratings(_require(args.ratings, "ratings"), catalog)
    if need_corpus:
        text = corpus_mod.load_corpus(_require(args.corpus, "corpus"), catalog)
    return catalog, ratings, text


def _build_table(args, n_values: list[int]):
    depth = args.k if args.k else max(DEFAULT_TABLE_DEPTH, max(n_values))
    if args.algo == "cf":
        _, ratings, _ = _load_inputs(args, need_ratings=True, need_corpus=False)
        features = rating_features(ratings)
    else:
        catalog, _, text = _load_inputs(args, need_ratings=False, need_corpus=True)
        features = tfidf(text)
    return build_similarity_table(features, K=depth)


def _net_filename(algo: str, n: int, diversifier: str) -> str:
    return f"net_{algo}_N{n}_{diversifier}.csv"


def _sidecar_config(args, command: str, extra: dict | None = None) -> dict:
    payload = {"command": command, "params": {}}
    for key, value in sorted(vars(args).items()):
        if key in ("func",):
            continue
        payload["params"][key] = str(value) if isinstance(value, Path) else value
    if extra:
        payload.update(extra)
    return payload


# --- commands ----------------------------------------------------------------


def cmd_generate(args) -> int:
    catalog, ratings, text = corpus_mod.generate_synthetic(
        seed=args.seed,
        num_items=args.num_items,
        num_users=args.num_users,
        zipf_exponent=args.zipf_exponent,
        num_genres=args.num_genres,
        year_range=(args.year_min, args.year_max),
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    items_path = out / "items.csv"
    ratings_path = out / "ratings.csv"
    corpus_path = out / "corpus.tsv"
    corpus_mod.save_catalog(catalog, items_path)
    corpus_mod.save_ratings(ratings, catalog, ratings_path)
    corpus_mod.save_corpus(text, catalog, corpus_path)
    config = _sidecar_config(args, "generate")
    for path in (items_path, ratings_path, corpus_path):
        write_sidecar(path, config)
    log.info("generated %d items, %d ratings", len(catalog), ratings.n_ratings)
    return EXIT_OK


def cmd_build(args) -> int:
    n_values = parse_n_spec(args.n)
    _check_n_values(n_values, args.allow_large_n)
    table = _build_table(args, n_values)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if args.dump_similarity:
        sim_path = out / f"similarity_{args.algo}.csv"
        dump_similarity(table, sim_path)
        write_sidecar(sim_path, _sidecar_config(args, "build"))
    for n in n_values:
        net = build(table, n)
        net_path = out / _net_filename(args.algo, n, "none")
        dump_network(net, net_path)
        write_sidecar(net_path, _sidecar_config(args, "build", {"network": network_sidecar(net)}))
    return EXIT_OK


def cmd_diversify(args) -> int:
    n_values = parse_n_spec(args.n)
    _check_n_values(n_values, args.allow_large_n)
    if args.diversifier not in DIVERSIFIERS or args.diversifier == "none":
        raise ParameterError(
            f"diversifier must be one of {[d for d in DIVERSIFIERS if d != 'none']}"
        )
    table = _build_table(args, n_values)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for n in n_values:
        base = build(table, n)
        if args.diversifier == "random":
            net = diversify_random(base, seed=args.seed)
        elif args.diversifier == "diversify":
            net = diversify_ziegler(base, table)
        else:
            net = diversify_exprel(base, table, lam=args.lam)
        net_path = out / _net_filename(args.algo, n, args.diversifier)
        dump_network(net, net_path)
        write_sidecar(
            net_path, _sidecar_config(args, "diversify", {"network": network_sidecar(net)})
        )
    return EXIT_OK


def load_network(path: str | Path) -> RecNetwork:
    """Reload a dumped network from its CSV and JSON sidecar."""
    path = _require(path, "network")
    meta = read_sidecar(path)
    info = meta.get("network", meta)
    for field in ("n_nodes", "N", "algo", "diversifier"):
        if field not in info:
            raise SchemaError(f"network sidecar for {path} lacks {field!r}")
    out_edges: list[list[tuple[int, float]]] = [[] for _ in range(info["n_nodes"])]
    with path.open("r", encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header != ["source", "target", "rank", "score"]:
            raise SchemaError(f"unexpected network header {header} in {path}")
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                source, target, rank = int(row[0]), int(row[1]), int(row[2])
                score = float(row[3]) if row[3] else math.nan
            except (ValueError, IndexError):
                raise SchemaError(f"bad network row at line {line_no} in {path}") from None
            if rank != len(out_edges[source]) + 1:
                raise SchemaError(f"non-contiguous ranks for node {source} in {path}")
            out_edges[source].append((target, score))
    return RecNetwork(
        n_nodes=info["n_nodes"],
        N=info["N"],
        out_edges=out_edges,
        provenance=Provenance(
            algo=info["algo"],
            diversifier=info["diversifier"],
            seed=info.get("seed"),
            lam=info.get("lambda"),
        ),
        skipped_nodes=list(info.get("skipped_nodes", [])),
    )


def cmd_topology(args) -> int:
    nets = [load_network(p) for p in args.net]
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    groups: dict[tuple[str, str], list[RecNetwork]] = {}
    for net in nets:
        report = topology_report(net)
        name = f"topo_{net.provenance.algo}_{net.provenance.diversifier}_N{net.N}.json"
        write_json(out / name, report)
        groups.setdefault((net.provenance.algo, net.provenance.diversifier), []).append(net)
    for (algo, diversifier), members in sorted(groups.items()):
        members.sort(key=lambda net: net.N)
        if len(members) < 2:
            continue
        matrices = membership_change(members)
        for earlier, later, matrix in zip(members, members[1:], matrices):
            payload = {
                "algo": algo,
                "diversifier": diversifier,
                "n_from": earlier.N,
                "n_to": later.N,
                "labels": list(BOWTIE_LABELS),
                "matrix": matrix.tolist(),
            }
            name = f"membership_{algo}_{diversifier}_N{earlier.N}_N{later.N}.json"
            write_json(out / name, payload)
    return EXIT_OK


def _load_wiki_edges(path: str | Path) -> list[tuple[int, int]]:
    path = _require(path, "wiki graph")
    edges = []
    with path.open("r", encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header != ["source", "target"]:
            raise SchemaError(f"wiki graph header must be ['source', 'target'], got {header}")
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                edges.append((int(row[0]), int(row[1])))
            except (ValueError, IndexError):
                raise SchemaError(f"bad wiki edge at line {line_no}") from None
    return edges


def cmd_simulate(args) -> int:
    net = load_network(args.net)
    kinds = [k.strip() for k in args.knowledge.split(",") if k.strip()]
    for kind in kinds:
        if kind not in KNOWLEDGE_KINDS:
            raise ParameterError(f"unknown knowledge kind {kind!r} (expected {KNOWLEDGE_KINDS})")
    if args.samples < 1:
        raise ParameterError("need at least one sample")
    if args.budget < 1:
        raise ParameterError("budget must be at least 1")
    catalog = corpus_mod.load_catalog(_require(args.items, "catalog"))
    if len(catalog) != net.n_nodes:
        raise SchemaError(
            f"catalog has {len(catalog)} items but the network has {net.n_nodes} nodes"
        )
    wiki_edges = _load_wiki_edges(args.wiki_graph) if args.wiki_graph else None

    if args.scenario == "p2p":
        samples = sample_pairs(net.n_nodes, args.samples, args.seed)
    else:
        clustering = cluster_items(catalog)
        if args.scenario == "berry":
            samples = sample_quadruples(clustering, args.samples, args.seed)
        else:
            samples = sample_patches(clustering, args.samples, args.seed)

    rows = []
    aggregates = []
    for kind in kinds:
        knowledge = build_knowledge(kind, net, catalog=catalog, wiki_edges=wiki_edges)
        if args.scenario == "p2p":
            result = run_p2p(net, knowledge, samples, budget=args.budget, seed=args.seed)
        elif args.scenario == "berry":
            result = run_berrypicking(
                net, knowledge, clustering, samples, budget=args.budget, seed=args.seed
            )
        else:
            result = run_foraging(
                net, knowledge, clustering, samples, budget=args.budget, seed=args.seed
            )
        for record in result.records:
            rows.append(
                (
                    args.scenario,
                    net.provenance.algo,
                    net.N,
                    net.provenance.diversifier,
                    kind,
                    args.seed,
                    record.sample_id,
                    record.goals_total,
                    record.goals_found,
                    record.steps_used,
                    record.success_fraction,
                )
            )
        aggregates.append(
            {
                "scenario": args.scenario,
                "knowledge": kind,
                "N": net.N,
                "algo": net.provenance.algo,
                "diversifier": net.provenance.diversifier,
                "samples": len(result.records),
                "mean_success": result.success_ratio,
            }
        )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    stem = f"results_{args.scenario}_{net.provenance.algo}_N{net.N}_{net.provenance.diversifier}"
    results_path = out / f"{stem}.csv"
    write_csv(results_path, RESULT_COLUMNS, rows)
    write_sidecar(results_path, _sidecar_config(args, "simulate"))
    write_json(out / f"{stem}_aggregate.json", aggregates)
    return EXIT_OK


def _report_rows_from_topology(topo_dir: Path, dataset: str) -> list[tuple]:
    rows = []
    for path in sorted(topo_dir.glob("topo_*.json")):
        payload = json.loads(path.read_text(encoding="utf-8"))
        base = (dataset, payload["algo"], payload["N"], payload["diversifier"])
        rows.append(base + ("num_scc", float(payload["num_scc"])))
        rows.append(base + ("largest_scc_fraction", float(payload["largest_scc_fraction"])))
        rows.append(base + ("clustering", float(payload["clustering"])))
        if payload.get("diameter") is not None:
            rows.append(base + ("diameter", float(payload["diameter"])))
        n_nodes = payload["n_nodes"]
        for label in BOWTIE_LABELS:
            rows.append(base + (f"bowtie:{label}", payload["bowtie_sizes"][label] / n_nodes))
        for ecc, count in sorted(payload["eccentricity_histogram"].items(), key=lambda kv: int(kv[0])):
            rows.append(base + (f"ecc_hist:{ecc}", float(count)))
    for path in sorted(topo_dir.glob("membership_*.json")):
        payload = json.loads(path.read_text(encoding="utf-8"))
        base = (dataset, payload["algo"], payload["n_to"], payload["diversifier"])
        labels = payload["labels"]
        for i, from_label in enumerate(labels):
            for j, to_label in enumerate(labels):
                count = payload["matrix"][i][j]
                if count:
                    metric = f"membership:{payload['n_from']}:{payload['n_to']}:{from_label}:{to_label}"
                    rows.append(base + (metric, float(count)))
    return rows


def _report_rows_from_sim(sim_dir: Path, dataset: str) -> list[tuple]:
    grouped: dict[tuple, list[float]] = {}
    for path in sorted(sim_dir.glob("results_*.csv")):
        with path.open("r", encoding="utf-8", newline="") as handle:
            reader = csv.DictReader(handle)
            if reader.fieldnames != RESULT_COLUMNS:
                raise SchemaError(f"unexpected simulation columns in {path}: {reader.fieldnames}")
            for row in reader:
                key = (
                    dataset,
                    row["algo"],
                    int(row["N"]),
                    row["diversifier"],
                    f"success:{row['scenario']}:{row['knowledge']}",
                )
                grouped.setdefault(key, []).append(float(row["success_fraction"]))
    return [key + (float(np.mean(values)),) for key, values in grouped.items()]


def cmd_report(args) -> int:
    topo_dir = _require(args.topology_dir, "topology directory")
    rows: list[tuple] = _report_rows_from_topology(topo_dir, args.dataset)
    if args.sim_dir:
        rows.extend(_report_rows_from_sim(_require(args.sim_dir, "simulation directory"), args.dataset))
    if not rows:
        raise MissingInputError("no topology or simulation outputs found to merge")
    rows.sort(key=lambda r: (r[0], r[1], r[2], r[3], r[4]))
    out = Path(args.out)
    write_csv(out, REPORT_COLUMNS, rows)
    write_sidecar(out, _sidecar_config(args, "report"))
    return EXIT_OK


# --- entry point ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="recnav",
        description="Build, analyze, and navigate top-N recommendation networks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="generate a seeded synthetic dataset")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--num-items", type=int, default=500)
    p.add_argument("--num-users", type=int, default=2000)
    p.add_argument("--zipf-exponent", type=float, default=1.0)
    p.add_argument("--num-genres", type=int, default=8)
    p.add_argument("--year-min", type=int, default=2000)
    p.add_argument("--year-max", type=int, default=2004)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("build", help="build top-N networks from a dataset")
    p.add_argument("--items", required=True)
    p.add_argument("--ratings")
    p.add_argument("--corpus")
    p.add_argument("--algo", choices=["cf", "cb"], required=True)
    p.add_argument("--n", required=True, help="N values: 5, 1..20, or 5,10,20")
    p.add_argument("--k", type=int, default=0, help="similarity table depth (default max(50, N))")
    p.add_argument("--allow-large-n", action="store_true")
    p.add_argument("--dump-similarity", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("diversify", help="rebuild networks with a diversified last slot")
    p.add_argument("--items", required=True)
    p.add_argument("--ratings")
    p.add_argument("--corpus")
    p.add_argument("--algo", choices=["cf", "cb"], required=True)
    p.add_argument("--n", required=True)
    p.add_argument("--k", type=int, default=0)
    p.add_argument("--allow-large-n", action="store_true")
    p.add_argument("--diversifier", choices=[d for d in DIVERSIFIERS if d != "none"], required=True)
    p.add_argument("--lambda", dest="lam", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_diversify)

    p = sub.add_parser("topology", help="component, clustering, eccentricity and bow-tie reports")
    p.add_argument("--net", nargs="+", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_topology)

    p = sub.add_parser("simulate", help="run one navigation scenario on a network")
    p.add_argument("--net", required=True)
    p.add_argument("--items", required=True)
    p.add_argument("--scenario", choices=list(SCENARIOS), required=True)
    p.add_argument("--knowledge", default="title,neighbors,optimal,random")
    p.add_argument("--samples", type=int, default=1200)
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--wiki-graph")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("report", help="merge topology and simulation outputs into one CSV")
    p.add_argument("--topology-dir", required=True)
    p.add_argument("--sim-dir")
    p.add_argument("--dataset", default="synthetic")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_report)

    return parser


def _fail(code_name: str, exc: Exception, exit_code: int) -> int:
    sys.stderr.write(json.dumps({"error": code_name, "message": str(exc)}) + "\n")
    return exit_code


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(
        level=os.environ.get("RECNAV_LOG", "WARNING").upper(),
        format="%(levelname)s %(name)s: %(message)s",
    )
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except MissingInputError as exc:
        return _fail("missing-input", exc, EXIT_MISSING)
    except (SchemaError, IngestError) as exc:
        return _fail("schema-mismatch", exc, EXIT_SCHEMA)
    except ParameterError as exc:
        return _fail("invalid-parameter", exc, EXIT_PARAMETER)
    except RecnavError as exc:
        return _fail("error", exc, EXIT_ERROR)


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
