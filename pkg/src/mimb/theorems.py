"""Exact verification of what unions and intersections of per-dataset
Markov blankets can recover, as a function of the manipulation regime.

Everything here is graph-level: per-dataset blankets are computed exactly on
post-intervention graphs, the expected relation is predicted from the regime
classification, and the two are compared. The fuzzer drives this over
thousands of random (graph, target, family) instances per regime row.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .graph import Dag, InterventionFamily, is_conservative
from .simulate import generate_intervention_family, random_dag

# Union relations
UNION_EQUALS_MB = "equals-mb"
UNION_BETWEEN_PA_AND_MB = "between-pa-and-mb"
UNION_EQUALS_CH_SP = "equals-ch-sp"
UNION_SUBSET_CH_SP = "subset-of-ch-sp"

# Intersection relations
INTER_EQUALS_PA = "equals-pa"
INTER_EQUALS_MB = "equals-mb"
INTER_BETWEEN_PA_AND_MB = "between-pa-and-mb"
INTER_EMPTY = "empty"
INTER_EQUALS_CH_SP = "equals-ch-sp"
INTER_SUBSET_CH_SP = "subset-of-ch-sp"


@dataclass(frozen=True)
class RegimeClassification:
    """Exact regime flags recomputed from (graph, target, family)."""

    zeta_t: int
    n: int
    zeta_class: str  # zero | mid | all
    conservative: bool
    conservative_minus_t: bool
    children_covered: bool
    children_untouched: bool


@dataclass(frozen=True)
class TheoremPrediction:
    """Predicted relations plus the reference sets they refer to.

    ``children_and_spouses`` uses the collider-partner reading of spouse:
    every parent of a child of the target other than the target itself,
    including variables that are also parents or children of the target.
    That is the set the proofs actually deliver once the target's own
    parents become unreachable; it coincides with children plus strict
    spouses whenever no variable plays two roles at once.
    """

    union_relation: str
    intersection_relation: str
    mb: frozenset[str]
    parents: frozenset[str]
    children_and_spouses: frozenset[str]


@dataclass(frozen=True)
class VerificationReport:
    target: str
    classification: RegimeClassification
    prediction: TheoremPrediction
    mb_per_dataset: tuple[frozenset[str], ...]
    union_actual: frozenset[str]
    intersection_actual: frozenset[str]
    union_ok: bool
    intersection_ok: bool

    @property
    def passed(self) -> bool:
        return self.union_ok and self.intersection_ok

    def to_json_dict(self) -> dict:
        c = self.classification
        p = self.prediction
        return {
            "target": self.target,
            "regime": {
                "zeta_t": c.zeta_t,
                "n": c.n,
                "zeta_class": c.zeta_class,
                "conservative": c.conservative,
                "conservative_minus_t": c.conservative_minus_t,
                "children_covered": c.children_covered,
                "children_untouched": c.children_untouched,
            },
            "predicted": {
                "union": p.union_relation,
                "intersection": p.intersection_relation,
                "mb": sorted(p.mb),
                "parents": sorted(p.parents),
                "children_and_spouses": sorted(p.children_and_spouses),
            },
            "actual": {
                "mb_per_dataset": [sorted(s) for s in self.mb_per_dataset],
                "union": sorted(self.union_actual),
                "intersection": sorted(self.intersection_actual),
            },
            "union_ok": self.union_ok,
            "intersection_ok": self.intersection_ok,
            "passed": self.passed,
        }


def oracle_mbs(dag: Dag, target: str, family: InterventionFamily) -> tuple[frozenset[str], ...]:
    """Exact blanket of the target in each post-intervention graph."""
    family.validate_names(dag.variables)
    return tuple(
        dag.apply_intervention(s).markov_blanket(target) for s in family.sets
    )


def classify_regime(dag: Dag, target: str, family: InterventionFamily) -> RegimeClassification:
    family.validate_names(dag.variables)
    zeta = family.zeta(target)
    n = family.n
    if zeta == 0:
        zeta_class = "zero"
    elif zeta == n:
        zeta_class = "all"
    else:
        zeta_class = "mid"
    children = dag.children(target)
    return RegimeClassification(
        zeta_t=zeta,
        n=n,
        zeta_class=zeta_class,
        conservative=is_conservative(family),
        conservative_minus_t=is_conservative(family.without(target)),
        children_covered=children <= family.union_of_targets(),
        children_untouched=all(not (children & s) for s in family.sets),
    )


def predict(dag: Dag, target: str, family: InterventionFamily) -> TheoremPrediction:
    """Map the regime to the relations the theory promises.

    Union axis: while the target escapes manipulation somewhere, a
    conservative family recovers the whole blanket and a non-conservative
    one is sandwiched between the parent set and the blanket. Once the
    target is manipulated everywhere the parents are unreachable and only
    children plus spouses remain (exactly, when the family without the
    target is conservative; as an upper bound otherwise).

    Intersection axis: with the target never manipulated, covering all
    children leaves exactly the parents; never touching any child leaves the
    whole blanket; partial coverage lands in between. Once the target is
    manipulated anywhere the parents drop out: covered children force the
    empty set, untouched children leave exactly children plus spouses, and
    partial coverage only bounds it by children plus spouses.
    """
    c = classify_regime(dag, target, family)
    mb = dag.markov_blanket(target)
    parents = dag.parents(target)
    ch_sp = dag.children(target) | _collider_partners(dag, target)

    if c.zeta_class in ("zero", "mid"):
        union = UNION_EQUALS_MB if c.conservative else UNION_BETWEEN_PA_AND_MB
    else:
        union = UNION_EQUALS_CH_SP if c.conservative_minus_t else UNION_SUBSET_CH_SP

    if c.zeta_class == "zero":
        if c.children_covered:
            inter = INTER_EQUALS_PA
        elif c.children_untouched:
            inter = INTER_EQUALS_MB
        else:
            inter = INTER_BETWEEN_PA_AND_MB
    else:
        if c.children_covered:
            inter = INTER_EMPTY
        elif c.children_untouched:
            inter = INTER_EQUALS_CH_SP
        else:
            inter = INTER_SUBSET_CH_SP

    return TheoremPrediction(
        union_relation=union,
        intersection_relation=inter,
        mb=mb,
        parents=parents,
        children_and_spouses=ch_sp,
    )


def _collider_partners(dag: Dag, target: str) -> frozenset[str]:
    """Parents of the target's children, the target excluded."""
    out: set[str] = set()
    for c in dag.children(target):
        out |= dag.parents(c)
    out.discard(target)
    return frozenset(out)


def _multi_spouses(dag: Dag, target: str) -> frozenset[str]:
    """Variables parenting two or more distinct children of the target."""
    children = dag.children(target)
    out: set[str] = set()
    for m in dag.variables:
        if m == target:
            continue
        if sum(1 for c in children if m in dag.parents(c)) >= 2:
            out.add(m)
    return frozenset(out)


def _always_manipulated_children(dag: Dag, target: str, family: InterventionFamily) -> frozenset[str]:
    return frozenset(
        c for c in dag.children(target) if all(c in s for s in family.sets)
    )


def verify(dag: Dag, target: str, family: InterventionFamily) -> VerificationReport:
    """Check the exact per-dataset blankets against the predicted relation.

    Each relation is asserted in the strongest form the proofs support:

    - Sandwich relations assert containment both ways, plus exactness when
      every child escapes manipulation somewhere, plus the absence of
      children that are manipulated everywhere and recoverable by no other
      role.
    - The parents and empty intersection claims tolerate precisely the
      variables that can lawfully leak through a second role: a child that
      also parents a sibling child, a parent that also parents a child, or
      a spouse shared by two or more children. Whenever no such dual-role
      variable exists the equalities are asserted exactly.
    """
    prediction = predict(dag, target, family)
    mbs = oracle_mbs(dag, target, family)
    union: set[str] = set()
    inter: set[str] | None = None
    for s in mbs:
        union |= s
        inter = set(s) if inter is None else inter & s
    union_actual = frozenset(union)
    inter_actual = frozenset(inter or set())

    mb, pa, ch_sp = prediction.mb, prediction.parents, prediction.children_and_spouses
    children = dag.children(target)
    partners = _collider_partners(dag, target)
    multi = _multi_spouses(dag, target)
    stuck = _always_manipulated_children(dag, target, family)
    unrecoverable = stuck - partners  # stuck children with no spouse role

    rel = prediction.union_relation
    if rel == UNION_EQUALS_MB:
        union_ok = union_actual == mb
    elif rel == UNION_BETWEEN_PA_AND_MB:
        union_ok = pa <= union_actual <= mb and not (union_actual & unrecoverable)
        if not stuck:
            union_ok = union_ok and union_actual == mb
    elif rel == UNION_EQUALS_CH_SP:
        union_ok = union_actual == ch_sp
    else:  # UNION_SUBSET_CH_SP
        union_ok = union_actual <= ch_sp and not (union_actual & unrecoverable)
        if children and stuck == children:
            union_ok = union_ok and not union_actual
    union_ok = bool(union_ok)

    rel = prediction.intersection_relation
    if rel == INTER_EQUALS_PA:
        leakage = (children & partners) | multi
        inter_ok = pa <= inter_actual and inter_actual - pa <= leakage
        if not leakage:
            inter_ok = inter_ok and inter_actual == pa
    elif rel == INTER_EQUALS_MB:
        inter_ok = inter_actual == mb
    elif rel == INTER_BETWEEN_PA_AND_MB:
        inter_ok = pa <= inter_actual <= mb
    elif rel == INTER_EMPTY:
        leakage = (partners & (pa | children)) | multi
        inter_ok = inter_actual <= leakage
        if not leakage:
            inter_ok = inter_ok and not inter_actual
    elif rel == INTER_EQUALS_CH_SP:
        inter_ok = inter_actual == ch_sp
    else:  # INTER_SUBSET_CH_SP
        inter_ok = inter_actual <= ch_sp
    inter_ok = bool(inter_ok)

    return VerificationReport(
        target=target,
        classification=classify_regime(dag, target, family),
        prediction=prediction,
        mb_per_dataset=mbs,
        union_actual=union_actual,
        intersection_actual=inter_actual,
        union_ok=union_ok,
        intersection_ok=inter_ok,
    )


# -- fuzzing -----------------------------------------------------------------

# (name, regime, require_conservative, force_nonconservative,
#  require_children_covered, force_child_uncovered, needs_children)
_ROWS: tuple[tuple[str, str, bool, bool, bool, bool, bool], ...] = (
    ("union-zero-conservative", "zeta_zero", True, False, False, False, False),
    ("union-zero-nonconservative", "zeta_zero", False, True, False, False, False),
    ("union-mid-conservative", "zeta_mid", True, False, False, False, False),
    ("union-mid-nonconservative", "zeta_mid", False, True, False, False, False),
    ("union-all-conservative", "zeta_all", True, False, False, False, False),
    ("union-all-nonconservative", "zeta_all", False, True, False, False, False),
    ("intersection-zero-covered", "zeta_zero", True, False, True, False, False),
    ("intersection-zero-uncovered", "zeta_zero", True, False, False, True, True),
    ("intersection-mid-covered", "zeta_mid", True, False, True, False, False),
    ("intersection-mid-uncovered", "zeta_mid", True, False, False, True, True),
    ("intersection-all-covered", "zeta_all", True, False, True, False, False),
    ("intersection-all-uncovered", "zeta_all", True, False, False, True, True),
)

ROW_NAMES = tuple(name for name, *_ in _ROWS)


@dataclass
class RowStats:
    trials: int = 0
    failures: int = 0
    witnesses: list[dict] = field(default_factory=list)


@dataclass
class FuzzSummary:
    seed: int
    node_range: tuple[int, int]
    edge_prob: float
    n_datasets_range: tuple[int, int]
    rows: dict[str, RowStats]

    @property
    def total_trials(self) -> int:
        return sum(r.trials for r in self.rows.values())

    @property
    def total_failures(self) -> int:
        return sum(r.failures for r in self.rows.values())

    @property
    def passed(self) -> bool:
        return self.total_failures == 0

    def to_json_dict(self) -> dict:
        return {
            "seed": self.seed,
            "node_range": list(self.node_range),
            "edge_prob": self.edge_prob,
            "n_datasets_range": list(self.n_datasets_range),
            "rows": {
                name: {
                    "trials": r.trials,
                    "failures": r.failures,
                    "witnesses": r.witnesses[:5],
                }
                for name, r in self.rows.items()
            },
            "total_trials": self.total_trials,
            "total_failures": self.total_failures,
            "passed": self.passed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2)


def _witness(dag: Dag, target: str, family: InterventionFamily, report: VerificationReport) -> dict:
    return {
        "variables": list(dag.variables),
        "edges": sorted(dag.edges),
        "target": target,
        "family": [sorted(s) for s in family.sets],
        "report": report.to_json_dict(),
    }


def fuzz_theorems(
    trials_per_row: int,
    node_range: tuple[int, int] = (6, 10),
    edge_prob: float = 0.3,
    n_datasets_range: tuple[int, int] = (2, 4),
    seed: int = 0,
) -> FuzzSummary:
    """Verify every regime row on random instances; failures carry witnesses.

    For each row a (graph, target, family) instance is drawn until it
    actually classifies into the row, post-editing the family where the
    generator cannot express the condition: non-conservativity is forced by
    inserting one non-target variable into every experiment, uncovered
    children by deleting one child from every experiment.
    """
    rows = {name: RowStats() for name in ROW_NAMES}
    master = np.random.SeedSequence(seed)
    row_streams = master.spawn(len(_ROWS))

    for (name, regime, conservative, force_noncon, covered, force_uncov, needs_children), stream in zip(
        _ROWS, row_streams
    ):
        rng = np.random.default_rng(stream)
        stats = rows[name]
        while stats.trials < trials_per_row:
            n_nodes = int(rng.integers(node_range[0], node_range[1] + 1))
            dag = random_dag(n_nodes, edge_prob, rng)
            target = dag.variables[int(rng.integers(n_nodes))]
            if needs_children and not dag.children(target):
                continue
            n_datasets = int(rng.integers(n_datasets_range[0], n_datasets_range[1] + 1))
            family = generate_intervention_family(
                dag,
                target,
                n_datasets,
                regime,
                require_conservative=conservative,
                require_children_covered=covered,
                seed=rng,
            )
            if force_noncon:
                pool = [v for v in dag.variables if v != target]
                if not pool:
                    continue  # a single variable cannot break conservativity
                offender = pool[int(rng.integers(len(pool)))]
                family = InterventionFamily([s | {offender} for s in family.sets])
            if force_uncov:
                child = sorted(dag.children(target))[0]
                family = InterventionFamily([s - {child} for s in family.sets])

            c = classify_regime(dag, target, family)
            if c.zeta_class != regime.removeprefix("zeta_"):
                continue
            if conservative and not (
                c.conservative_minus_t if regime == "zeta_all" else c.conservative
            ):
                continue
            if force_noncon and (
                c.conservative_minus_t if regime == "zeta_all" else c.conservative
            ):
                continue
            if covered and not c.children_covered:
                continue
            if force_uncov and c.children_covered:
                continue

            report = verify(dag, target, family)
            stats.trials += 1
            if not report.passed:
                stats.failures += 1
                if len(stats.witnesses) < 5:
                    stats.witnesses.append(_witness(dag, target, family, report))

    return FuzzSummary(
        seed=seed,
        node_range=node_range,
        edge_prob=edge_prob,
        n_datasets_range=n_datasets_range,
        rows=rows,
    )
