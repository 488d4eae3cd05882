"""Command-line front end.

Every subcommand that writes ``--out FILE`` also writes ``FILE.run.json``,
a record of the arguments, seed, timestamps and SHA-256 digests of the
inputs and the output.  Rerunning the recorded ``argv`` reproduces the
output byte for byte.

Exit codes: 0 success, 1 domain failure (a pipeline stage failed, a
precondition does not hold, no embedding exists), 2 usage or input error.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import sys
import time
from pathlib import Path
from typing import Sequence

from . import FORMAT_VERSION, __version__
from .alloc import allocate
from .embed import (
    CctParams,
    ClusterDecomposition,
    PairParams,
    StageFailure,
    StructureParams,
    backtrack_embed,
    cct_pipeline,
    directed_pair_pipeline,
    structure_search,
)
from .embed.structure import ALMOST_DIRECTED
from .experiments import EXPERIMENTS, ExperimentManifest, run_manifest
from .fixtures import named_tournament, named_tree
from .oracle import census_csv, g_bruteforce, is_unavoidable, oriented_tree_census
from .otree import OrientedTree, leaf_classes, random_oriented_tree, to_prufer_exchange
from .planted import planted_cyclic_host, planted_nice_tree, planted_pair_host, random_nice_tree
from .stars import cherry_kinds, pendant_star_census
from .tournament import FormatError, Tournament, generate


class UsageError(Exception):
    """Bad arguments or unreadable input; maps to exit status 2."""


class DomainFailure(Exception):
    """A well-formed request the mathematics says no to; maps to exit status 1."""

    def __init__(self, payload: dict):
        super().__init__(payload.get("detail", ""))
        self.payload = payload


@dataclasses.dataclass
class RunRecord:
    subcommand: str
    argv: list[str]
    params: dict
    seed: int | None
    started: float
    finished: float
    inputs: dict[str, str]
    output: dict[str, str]
    version: str = __version__
    format_version: int = FORMAT_VERSION

    def to_json(self) -> str:
        return json.dumps(dataclasses.asdict(self), sort_keys=True, indent=2)


def sha256_file(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


# --- input helpers -------------------------------------------------------------


def _read_json(path: str, what: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise UsageError(f"{what}: cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{what}: {path} is not valid JSON ({exc.msg} at line {exc.lineno})") from None


def load_tree(source: str) -> OrientedTree:
    """A fixture name or a JSON file (edge list or Prüfer exchange)."""
    if not Path(source).exists():
        try:
            return named_tree(source)
        except (KeyError, ValueError) as exc:
            raise UsageError(f"--tree: {exc.args[0]} (and no such file)") from None
    try:
        return OrientedTree.from_json(_read_json(source, "--tree"))
    except FormatError as exc:
        raise UsageError(f"--tree {source}: {exc}") from None


def load_host(source: str) -> Tournament:
    if not Path(source).exists():
        try:
            return named_tournament(source)
        except (KeyError, ValueError) as exc:
            raise UsageError(f"--host: {exc.args[0]} (and no such file)") from None
    try:
        return Tournament.from_json(_read_json(source, "--host"))
    except FormatError as exc:
        raise UsageError(f"--host {source}: {exc}") from None


def load_params(cls, path: str | None):
    if path is None:
        return cls()
    data = _read_json(path, "--params")
    if not isinstance(data, dict):
        raise UsageError("--params: expected a JSON object")
    names = {f.name for f in dataclasses.fields(cls)}
    unknown = sorted(set(data) - names)
    if unknown:
        raise UsageError(f"--params: unknown field(s) {unknown} for {cls.__name__}")
    return cls(**data)


def _input_files(args) -> list[str]:
    return [getattr(args, k) for k in ("tree", "host", "decomp", "params", "manifest") if isinstance(getattr(args, k, None), str) and Path(getattr(args, k)).is_file()]


# --- subcommands -----------------------------------------------------------------


def cmd_gen_tree(args) -> tuple[str, str]:
    if args.name:
        t = named_tree(args.name)
    elif args.kind == "random":
        t = random_oriented_tree(args.n, args.seed)
    elif args.kind == "random-nice":
        t = random_nice_tree(args.n, args.alpha, args.seed)
    else:
        t = planted_nice_tree(args.n, args.a_cherries, args.b_cherries, args.seed)
    data = to_prufer_exchange(t) if args.prufer else t.to_json()
    return json.dumps(data) + "\n", "json"


def cmd_gen_tournament(args) -> tuple[str, str]:
    decomp = None
    if args.name:
        g = named_tournament(args.name)
    elif args.kind == "planted-pair":
        g, U, W = planted_pair_host(args.n, args.mu, args.seed)
        decomp = {"U": U, "W": W, "mu": args.mu}
    elif args.kind == "planted-cyclic":
        if args.n % args.k:
            raise UsageError("--n must be a multiple of --k for planted-cyclic")
        g, clusters, _ = planted_cyclic_host(args.k, args.n // args.k, args.p, args.seed)
        decomp = {"clusters": clusters}
    else:
        try:
            g = generate(args.kind, args.n, args.seed)
        except ValueError as exc:
            raise UsageError(f"--kind {args.kind}: {exc}") from None
    if args.decomp_out:
        if decomp is None:
            raise UsageError("--decomp-out needs a planted --kind")
        Path(args.decomp_out).write_text(json.dumps(decomp) + "\n")
    return json.dumps(g.to_json()) + "\n", "json"


def cmd_analyze_tree(args) -> tuple[str, str]:
    t = load_tree(args.tree)
    in_l, out_l = leaf_classes(t)
    cert = pendant_star_census(t)
    kinds = cherry_kinds(t)
    report = {
        "n": t.n,
        "max_degree": t.max_degree() if t.n > 1 else 0,
        "in_leaves": len(in_l),
        "out_leaves": len(out_l),
        "pendant_cherries": len(kinds),
        "cherries_kind_a": kinds.count("A"),
        "cherries_kind_b": kinds.count("B"),
        "a_stars": len(cert.a_stars),
        "b_stars": len(cert.b_stars),
        "alpha_max": str(cert.alpha_max),
    }
    return _emit(report, args.format), args.format


def cmd_allocate(args) -> tuple[str, str]:
    t = load_tree(args.tree)
    if args.root not in t.vertices:
        raise UsageError(f"--root: {args.root} is not a tree vertex")
    alloc = allocate(t, args.root, args.k, args.seed)
    if args.format == "csv":
        return alloc.to_csv(), "csv"
    return json.dumps({"k": alloc.k, "root": alloc.root, "cluster_of": {str(v): alloc.cluster_of[v] for v in alloc.order}}) + "\n", "json"


def _decomposition(args) -> dict:
    if args.decomp:
        data = _read_json(args.decomp, "--decomp")
        if not isinstance(data, dict):
            raise UsageError("--decomp: expected a JSON object")
        return data
    return {}


def cmd_embed(args) -> tuple[str, str]:
    t = load_tree(args.tree)
    g = load_host(args.host)
    try:
        if args.engine == "backtrack":
            emb = backtrack_embed(t, g)
            if emb is None:
                raise DomainFailure({"stage": "backtrack", "detail": "the host contains no copy of the tree", "counts": {}})
        elif args.engine == "pipeline-pair":
            params = load_params(PairParams, args.params)
            data = _decomposition(args)
            if "U" in data and "W" in data:
                U, W = data["U"], data["W"]
            else:
                verdict = structure_search(g)
                if verdict.kind != ALMOST_DIRECTED:
                    raise DomainFailure({"stage": "structure", "detail": "no almost-directed partition found", "counts": {"min_semidegree": verdict.min_semidegree}})
                U, W = verdict.U, verdict.W
            emb = directed_pair_pipeline(t, g, (U, W), params, seed=args.seed)
        else:
            params = load_params(CctParams, args.params)
            data = _decomposition(args)
            if "clusters" not in data:
                raise UsageError("--decomp: pipeline-cct needs a file with 'clusters'")
            decomp = ClusterDecomposition.of(g.n, data["clusters"], params.d, params.eps)
            emb = cct_pipeline(t, g, decomp, params, seed=args.seed)
    except StageFailure as exc:
        raise DomainFailure(exc.to_dict()) from None
    except (ValueError, TypeError) as exc:
        raise DomainFailure({"stage": "precondition", "detail": str(exc), "counts": {}}) from None
    if args.format == "csv":
        return emb.to_csv(), "csv"
    return json.dumps(emb.to_json()) + "\n", "json"


def cmd_unavoidable(args) -> tuple[str, str]:
    t = load_tree(args.tree)
    if args.mode == "exhaustive" and t.n > 7:
        raise UsageError("--mode exhaustive handles trees on at most 7 vertices; use --mode sampled")
    report = is_unavoidable(t, mode=args.mode, samples=args.samples, seed=args.seed, jobs=args.jobs)
    return json.dumps(report.to_json()) + "\n", "json"


def cmd_g_value(args) -> tuple[str, str]:
    t = load_tree(args.tree)
    if not t.n <= args.n_max <= 7:
        raise UsageError("--n-max must lie between |T| and 7")
    gv = g_bruteforce(t, args.n_max, jobs=args.jobs)
    out = {"value": gv.value, "lower_bound": gv.lower_bound, "summary": str(gv), "witnesses": {str(k): w.to_json() for k, w in gv.witnesses.items()}}
    return json.dumps(out) + "\n", "json"


def cmd_census(args) -> tuple[str, str]:
    if not 1 <= args.n <= 6:
        raise UsageError("--n must lie between 1 and 6")
    return census_csv(oriented_tree_census(args.n, jobs=args.jobs)), "csv"


def cmd_structure(args) -> tuple[str, str]:
    g = load_host(args.host)
    params = load_params(StructureParams, args.params)
    return json.dumps(structure_search(g, params).to_json()) + "\n", "json"


def cmd_experiment(args) -> tuple[str, str]:
    if args.manifest:
        try:
            manifest = ExperimentManifest.from_json(Path(args.manifest).read_text())
        except (OSError, ValueError, TypeError) as exc:
            raise UsageError(f"--manifest: {exc}") from None
    else:
        if not args.name:
            raise UsageError("experiment needs --name or --manifest")
        params = {"n": args.n, "trials": args.trials}
        if args.name in ("allocation", "path_endpoint"):
            params["k"] = args.k
        if args.name == "niceness":
            params["alpha"] = args.alpha
        manifest = ExperimentManifest(args.name, params, seed=args.seed or 0)
    if args.out:
        manifest.output = args.out
    try:
        result, checks = run_manifest(dataclasses.replace(manifest, output=None), jobs=args.jobs)
    except (ValueError, TypeError) as exc:
        raise UsageError(f"experiment: {exc}") from None
    if args.out:
        Path(args.out + ".manifest.json").write_text(manifest.to_json() + "\n")
    if checks and not all(checks.values()):
        print(json.dumps({"bands": checks}), file=sys.stderr)
    return result.to_csv(), "csv"


def _emit(report: dict, fmt: str) -> str:
    if fmt == "csv":
        return "key,value\n" + "".join(f"{k},{v}\n" for k, v in report.items())
    return json.dumps(report) + "\n"


# --- parser ------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--format", choices=["json", "csv"], default="json")
    common.add_argument("--params", help="JSON file overriding engine parameters")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for sweeps and trials")

    parser = argparse.ArgumentParser(prog="unavoidable", description="Oriented trees in tournaments.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__} (format {FORMAT_VERSION})")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-tree", parents=[common], help="generate an oriented tree")
    p.add_argument("--n", type=int, default=20)
    p.add_argument("--kind", choices=["random", "random-nice", "planted-nice"], default="random")
    p.add_argument("--name", help="fixture name, e.g. path-directed-5")
    p.add_argument("--alpha", type=float, default=1 / 250)
    p.add_argument("--a-cherries", type=int, default=10)
    p.add_argument("--b-cherries", type=int, default=10)
    p.add_argument("--prufer", action="store_true", help="write the Prüfer exchange format")
    p.set_defaults(func=cmd_gen_tree)

    p = sub.add_parser("gen-tournament", parents=[common], help="generate a tournament")
    p.add_argument("--n", type=int, default=7)
    p.add_argument("--kind", choices=["random", "transitive", "circulant", "paley", "planted-pair", "planted-cyclic"], default="random")
    p.add_argument("--name", help="fixture name, e.g. paley-7")
    p.add_argument("--mu", type=float, default=0.005)
    p.add_argument("--k", type=int, default=6)
    p.add_argument("--p", type=float, default=0.9)
    p.add_argument("--decomp-out", help="write the planted decomposition here")
    p.set_defaults(func=cmd_gen_tournament)

    p = sub.add_parser("analyze-tree", parents=[common], help="leaves, cherries, stars and niceness")
    p.add_argument("--tree", required=True)
    p.set_defaults(func=cmd_analyze_tree)

    p = sub.add_parser("allocate", parents=[common], help="random semi-canonical allocation to k clusters")
    p.add_argument("--tree", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--root", type=int, default=0)
    p.set_defaults(func=cmd_allocate)

    p = sub.add_parser("embed", parents=[common], help="embed a tree in a tournament")
    p.add_argument("--tree", required=True)
    p.add_argument("--host", required=True)
    p.add_argument("--engine", choices=["backtrack", "pipeline-pair", "pipeline-cct"], default="backtrack")
    p.add_argument("--decomp", help="JSON with U/W (pair) or clusters (cct)")
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("unavoidable", parents=[common], help="is the tree contained in every tournament of its order?")
    p.add_argument("--tree", required=True)
    p.add_argument("--mode", choices=["exhaustive", "sampled"], default="exhaustive")
    p.add_argument("--samples", type=int, default=1000)
    p.set_defaults(func=cmd_unavoidable)

    p = sub.add_parser("g-value", parents=[common], help="smallest order forcing a copy of the tree")
    p.add_argument("--tree", required=True)
    p.add_argument("--n-max", type=int, default=7)
    p.set_defaults(func=cmd_g_value)

    p = sub.add_parser("census", parents=[common], help="all oriented trees on n vertices")
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_census)

    p = sub.add_parser("structure", parents=[common], help="almost-directed partition or dense core")
    p.add_argument("--host", required=True)
    p.set_defaults(func=cmd_structure)

    p = sub.add_parser("experiment", parents=[common], help="Monte Carlo experiments")
    p.add_argument("--name", choices=sorted(EXPERIMENTS))
    p.add_argument("--manifest", help="manifest JSON to rerun")
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--alpha", type=float, default=1 / 250)
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    started = time.time()
    try:
        text, _ = args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DomainFailure as exc:
        payload = json.dumps(exc.payload, sort_keys=True)
        if args.out:
            Path(args.out).write_text(payload + "\n")
        print(payload, file=sys.stderr if args.out else sys.stdout)
        return 1
    if not args.out:
        sys.stdout.write(text)
        return 0
    Path(args.out).write_text(text)
    params = {k: v for k, v in vars(args).items() if k not in ("func", "out")}
    record = RunRecord(
        subcommand=args.command,
        argv=argv,
        params=params,
        seed=args.seed,
        started=started,
        finished=time.time(),
        inputs={p: sha256_file(p) for p in _input_files(args)},
        output={args.out: sha256_file(args.out)},
    )
    Path(args.out + ".run.json").write_text(record.to_json() + "\n")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
