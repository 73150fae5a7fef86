"""Command line interface.

Subcommands cover the full workflow: generate interventional bundles from a
network file, discover blankets/parents from a bundle manifest, verify the
regime theory by fuzzing, run the repeated benchmark protocol, and split a
raw CSV into two interventional datasets.

Exit codes: 0 success, 2 input error, 3 unsatisfiable constraints,
4 internal invariant violation.
"""

from __future__ import annotations

import argparse
import json
import sys
import traceback
from pathlib import Path

from .bayesnet import ParseError, parse_network
from .citest import DataBackend, OracleBackend
from .discovery import mimb
from .hiton import baseline
from .metrics import run_benchmark
from .simulate import ConstraintError, generate_bundle, generate_intervention_family
from .tabular import (
    apply_mask,
    discretize,
    family_from_manifest,
    load_bundle,
    read_manifest,
    read_table,
    split_mask,
    write_bundle,
    write_table,
)
from .theorems import fuzz_theorems

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_CONSTRAINT = 3
EXIT_INTERNAL = 4


def _emit(payload: dict, out: str | None) -> None:
    text = json.dumps(payload, indent=2) + "\n"
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _load_network(path: str):
    return parse_network(Path(path).read_text(encoding="utf-8"))


def _int_range(spec: str) -> tuple[int, int]:
    if "-" in spec:
        lo, hi = spec.split("-", 1)
        return int(lo), int(hi)
    v = int(spec)
    return v, v


def cmd_generate(args: argparse.Namespace) -> int:
    bn = _load_network(args.network)
    family = generate_intervention_family(
        bn.dag,
        args.target,
        args.n_datasets,
        args.regime,
        require_conservative=args.conservative,
        require_children_covered=args.cover_children,
        max_targets_per_set=args.max_targets,
        seed=args.seed,
    )
    bundle = generate_bundle(bn, family, args.samples, args.alpha_dirichlet, args.seed)
    manifest = write_bundle(
        bundle,
        args.out,
        network=str(Path(args.network).resolve()),
        target=args.target,
        seed=args.seed,
    )
    _emit(
        {
            "manifest": str(manifest),
            "n_datasets": bundle.n,
            "samples": args.samples,
            "interventions": [sorted(s) for s in family.sets],
        },
        None,
    )
    return EXIT_OK


def cmd_discover(args: argparse.Namespace) -> int:
    manifest = read_manifest(args.manifest)
    states = None
    network = None
    if manifest.get("network"):
        net_path = Path(manifest["network"])
        if not net_path.is_absolute():
            net_path = Path(args.manifest).parent / net_path
        if net_path.exists():
            network = _load_network(str(net_path))
            states = {
                v: network.schema.states_of(v) for v in network.variables
            }

    if args.backend == "oracle":
        if network is None:
            raise ValueError("oracle backend needs a manifest with a network file")
        family = family_from_manifest(manifest)
        backend = OracleBackend(network.dag, family)
    else:
        bundle = load_bundle(args.manifest, states)
        backend = DataBackend(bundle, args.alpha)

    if args.algo == "mimb":
        result = mimb(
            backend,
            args.target,
            args.max_cond,
            symmetry_correction=args.symmetry,
        )
        body = {
            "mb": sorted(result.mb),
            "parents": sorted(result.parents),
            "cpc": sorted(result.cpc),
            "cmb": [sorted(s) for s in result.cmb],
            "sepsets": {v: sorted(s) for v, s in sorted(result.sepsets.items())},
        }
        n_tests, per_dataset = result.n_tests, list(result.tests_per_dataset)
    else:
        result = baseline(backend, args.target, args.max_cond)
        body = {
            "mb": sorted(result.mb),
            "parents": sorted(result.parents),
            "per_dataset_mb": [sorted(r.mb) for r in result.per_dataset],
        }
        n_tests, per_dataset = result.n_tests, list(result.tests_per_dataset)

    _emit(
        {
            "algorithm": args.algo,
            "target": args.target,
            "alpha": args.alpha,
            "max_cond": args.max_cond,
            "symmetry_correction": bool(args.symmetry),
            "backend": args.backend,
            **body,
            "n_tests": n_tests,
            "n_tests_per_dataset": per_dataset,
        },
        args.out,
    )
    return EXIT_OK


def cmd_verify_theorems(args: argparse.Namespace) -> int:
    summary = fuzz_theorems(
        args.trials,
        node_range=_int_range(args.nodes),
        edge_prob=args.edge_prob,
        n_datasets_range=_int_range(args.n_datasets),
        seed=args.seed,
    )
    _emit(summary.to_json_dict(), args.out)
    return EXIT_OK if summary.passed else EXIT_INTERNAL


def cmd_benchmark(args: argparse.Namespace) -> int:
    bn = _load_network(args.network)
    algorithms = ["mimb", "baseline"] if args.algo == "both" else [args.algo]
    reports = {}
    for algo in algorithms:
        report = run_benchmark(
            bn,
            args.target,
            algorithm=algo,
            n_datasets=args.n_datasets,
            rows_per_dataset=args.samples,
            regime=args.regime,
            require_conservative=args.conservative,
            require_children_covered=args.cover_children,
            alpha=args.alpha,
            max_cond_size=args.max_cond,
            reps=args.reps,
            seed=args.seed,
            symmetry_correction=args.symmetry,
            max_targets_per_set=args.max_targets,
        )
        reports[algo] = report.to_json_dict()
    _emit(reports, args.out)
    return EXIT_OK


def cmd_split(args: argparse.Namespace) -> int:
    table = read_table(args.data)
    if args.threshold is None and args.label is None:
        raise ValueError("give --threshold or --label")
    # the membership mask comes from the raw column; discretisation happens
    # afterwards on the whole table so both halves share bin boundaries
    mask = split_mask(table, args.by, threshold=args.threshold, label=args.label)
    for spec in args.discretize or []:
        name, _, bins = spec.partition(":")
        if not bins:
            raise ValueError(f"--discretize wants VAR:BINS, got {spec!r}")
        table = discretize(table, name, int(bins))
    low, high = apply_mask(table, mask, args.by)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_table(low, out / "dataset_00.csv")
    write_table(high, out / "dataset_01.csv")
    manifest = {
        "datasets": ["dataset_00.csv", "dataset_01.csv"],
        "interventions": [[args.by], [args.by]],
        "network": None,
        "target": args.target,
        "split": {
            "by": args.by,
            "threshold": args.threshold,
            "label": args.label,
        },
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    _emit(
        {
            "manifest": str(out / "manifest.json"),
            "sizes": [low.n_rows, high.n_rows],
        },
        None,
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mimb",
        description="Markov blanket discovery from multiple interventional datasets",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="sample an interventional bundle from a network")
    p.add_argument("--network", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--n-datasets", type=int, default=5)
    p.add_argument("--samples", type=int, default=5000)
    p.add_argument("--regime", choices=["zeta0", "mid", "all"], default="zeta0")
    p.add_argument("--conservative", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--cover-children", action="store_true")
    p.add_argument("--max-targets", type=int, default=None)
    p.add_argument("--alpha-dirichlet", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("discover", help="run a discovery algorithm on a bundle")
    p.add_argument("--manifest", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--algo", choices=["mimb", "baseline"], default="mimb")
    p.add_argument("--alpha", type=float, default=0.01)
    p.add_argument("--max-cond", type=int, default=3)
    p.add_argument("--symmetry", action="store_true")
    p.add_argument("--backend", choices=["data", "oracle"], default="data")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_discover)

    p = sub.add_parser("verify-theorems", help="fuzz the regime theory on random graphs")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--nodes", default="6-10", help="node count or range, e.g. 8 or 6-10")
    p.add_argument("--edge-prob", type=float, default=0.3)
    p.add_argument("--n-datasets", default="2-4")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_verify_theorems)

    p = sub.add_parser("benchmark", help="repeat the synthetic protocol and score it")
    p.add_argument("--network", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--algo", choices=["mimb", "baseline", "both"], default="both")
    p.add_argument("--n-datasets", type=int, default=5)
    p.add_argument("--samples", type=int, default=5000)
    p.add_argument("--regime", choices=["zeta0", "mid", "all"], default="zeta0")
    p.add_argument("--conservative", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--cover-children", action="store_true")
    p.add_argument("--alpha", type=float, default=0.01)
    p.add_argument("--max-cond", type=int, default=3)
    p.add_argument("--symmetry", action="store_true")
    p.add_argument("--max-targets", type=int, default=None)
    p.add_argument("--reps", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_benchmark)

    p = sub.add_parser("split", help="split one CSV into two interventional datasets")
    p.add_argument("--data", required=True)
    p.add_argument("--by", required=True)
    p.add_argument("--threshold", type=float, default=None)
    p.add_argument("--label", default=None)
    p.add_argument("--discretize", action="append", metavar="VAR:BINS")
    p.add_argument("--target", default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_split)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConstraintError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONSTRAINT
    except (ParseError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception:
        traceback.print_exc()
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
