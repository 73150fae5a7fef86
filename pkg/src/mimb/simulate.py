"""Synthetic-data generation: random DAGs and CPTs, random conservative
intervention families, and interventional dataset bundles."""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .bayesnet import (
    BayesianNetwork,
    Dataset,
    DatasetBundle,
    forward_sample,
    randomize_manipulated_cpts,
)
from .graph import Dag, InterventionFamily, is_conservative

REGIMES = ("zeta_zero", "zeta_mid", "zeta_all")

_REGIME_ALIASES = {
    "zeta_zero": "zeta_zero",
    "zeta0": "zeta_zero",
    "zero": "zeta_zero",
    "zeta_mid": "zeta_mid",
    "mid": "zeta_mid",
    "zeta_all": "zeta_all",
    "all": "zeta_all",
}


class ConstraintError(ValueError):
    """Requested generation constraints cannot be satisfied jointly."""


def _as_generator(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def random_dag(n_nodes: int, edge_prob: float, seed, names: Sequence[str] | None = None) -> Dag:
    """Random DAG: a random order, then independent edge coin flips."""
    if n_nodes < 1:
        raise ValueError("n_nodes must be at least 1")
    if not 0.0 <= edge_prob <= 1.0:
        raise ValueError("edge_prob must be in [0, 1]")
    rng = _as_generator(seed)
    if names is None:
        names = tuple(f"X{i}" for i in range(n_nodes))
    else:
        names = tuple(names)
        if len(names) != n_nodes:
            raise ValueError("names must match n_nodes")
    order = rng.permutation(n_nodes)
    edges = []
    for i in range(n_nodes):
        for j in range(i + 1, n_nodes):
            if rng.random() < edge_prob:
                edges.append((names[order[i]], names[order[j]]))
    return Dag(names, edges)


def random_cpts(
    dag: Dag,
    cardinality: int = 2,
    dirichlet_alpha: float = 1.0,
    seed=0,
    state_labels: Sequence[str] | None = None,
) -> BayesianNetwork:
    """Uniform-cardinality CPTs with symmetric-Dirichlet rows."""
    if cardinality < 2:
        raise ValueError("cardinality must be at least 2")
    if dirichlet_alpha <= 0:
        raise ValueError("dirichlet_alpha must be positive")
    rng = _as_generator(seed)
    if state_labels is None:
        state_labels = tuple(f"s{i}" for i in range(cardinality))
    states = {v: tuple(state_labels) for v in dag.variables}
    cpts = {}
    orders = {}
    for v in dag.variables:
        order = tuple(u for u in dag.variables if u in dag.parents(v))
        n_rows = cardinality ** len(order)
        cpts[v] = rng.dirichlet(np.full(cardinality, dirichlet_alpha), size=n_rows)
        orders[v] = order
    return BayesianNetwork(dag, states, cpts, parent_orders=orders)


def generate_intervention_family(
    dag: Dag,
    target: str,
    n_datasets: int,
    regime: str = "zeta_zero",
    *,
    require_conservative: bool = True,
    require_children_covered: bool = False,
    max_targets_per_set: int | None = None,
    seed=0,
    max_attempts: int = 10000,
) -> InterventionFamily:
    """Random manipulated-variable sets satisfying the requested regime.

    ``regime`` fixes how often the target itself is manipulated: never
    (zeta_zero), somewhere strictly between never and always (zeta_mid), or
    in every experiment (zeta_all). Conservativity is checked on the family
    itself, except under zeta_all where it is checked with the target
    removed. ``require_children_covered`` forces every child of the target
    into some experiment, the precondition for recovering the parent set by
    intersection.

    Sampling is by rejection with a bounded number of attempts, after which
    the last draw is repaired constructively (offending variables are
    removed from one experiment, missing children are added to one).
    """
    regime = _REGIME_ALIASES.get(regime, regime)
    if regime not in REGIMES:
        raise ValueError(f"unknown regime {regime!r}")
    dag.index(target)
    if n_datasets < 1:
        raise ConstraintError("n_datasets must be at least 1")
    if regime == "zeta_mid" and n_datasets < 2:
        raise ConstraintError("zeta_mid needs at least two datasets")
    others = [v for v in dag.variables if v != target]
    if require_conservative and n_datasets < 2 and others:
        if regime == "zeta_all":
            # manipulating only the target is the single family that is
            # conservative (minus the target) with one experiment
            return InterventionFamily([{target}])
        raise ConstraintError(
            "conservativity needs at least two datasets when variables are manipulated"
        )
    children = dag.children(target)
    if require_children_covered and children and regime == "zeta_zero" and n_datasets < 2 and require_conservative:
        raise ConstraintError("cannot cover children conservatively with one dataset")

    rng = _as_generator(seed)
    max_t = max_targets_per_set
    if max_t is None:
        max_t = max(1, math.ceil(len(dag.variables) / 5))
    if max_t < 1:
        raise ConstraintError("max_targets_per_set must be at least 1")

    def draw() -> list[set[str]]:
        if regime == "zeta_zero":
            t_in = [False] * n_datasets
        elif regime == "zeta_all":
            t_in = [True] * n_datasets
        else:
            k = int(rng.integers(1, n_datasets))
            chosen = rng.choice(n_datasets, size=k, replace=False)
            t_in = [i in set(int(c) for c in chosen) for i in range(n_datasets)]
        sets: list[set[str]] = []
        for i in range(n_datasets):
            size = int(rng.integers(1, max_t + 1))
            size = min(size, len(others))
            picked = rng.choice(len(others), size=size, replace=False) if size else []
            s = {others[int(j)] for j in picked}
            if t_in[i]:
                s.add(target)
            sets.append(s)
        return sets

    def ok(sets: list[set[str]]) -> bool:
        fam = InterventionFamily(sets)
        if require_conservative:
            check = fam.without(target) if regime == "zeta_all" else fam
            if not is_conservative(check):
                return False
        if require_children_covered and not children <= fam.union_of_targets():
            return False
        return True

    sets = None
    for _ in range(max_attempts):
        candidate = draw()
        if ok(candidate):
            sets = candidate
            break
    if sets is None:
        # Constructive repair of the last draw: termination is guaranteed
        # and the zeta pattern is never touched.
        sets = candidate
        if require_children_covered:
            missing = sorted(children - InterventionFamily(sets).union_of_targets())
            for c in missing:
                sets[int(rng.integers(n_datasets))].add(c)
        if require_conservative:
            exempt = {target} if regime == "zeta_all" else set()
            for v in sorted(InterventionFamily(sets).union_of_targets() - exempt):
                if all(v in s for s in sets):
                    if n_datasets < 2:
                        raise ConstraintError(
                            f"cannot make {v!r} conservative with a single dataset"
                        )
                    sets[int(rng.integers(n_datasets))].discard(v)
        if not ok(sets):
            raise ConstraintError("constraints remain unsatisfied after repair")

    return InterventionFamily(sets)


def generate_bundle(
    bn: BayesianNetwork,
    family: InterventionFamily,
    rows_per_dataset: int,
    dirichlet_alpha: float = 1.0,
    seed=0,
) -> DatasetBundle:
    """One dataset per experiment, sampled from the manipulated network.

    The master seed is split into independent per-dataset streams (one for
    the Dirichlet draws of the manipulated CPTs, one for the row sampling),
    so bundles are bit-reproducible and datasets could be generated in
    parallel.
    """
    family.validate_names(bn.variables)
    master = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    streams = master.spawn(len(family.sets))
    datasets = []
    for targets, stream in zip(family.sets, streams):
        cpt_seed, sample_seed = stream.spawn(2)
        manipulated = randomize_manipulated_cpts(bn, targets, dirichlet_alpha, cpt_seed)
        sampled = forward_sample(manipulated, rows_per_dataset, sample_seed)
        datasets.append(Dataset(sampled.schema, sampled.rows, intervention=targets))
    return DatasetBundle(datasets)
