"""Cross-dataset Markov blanket discovery: the MIPC subroutine and the MIMB
algorithm.

MIPC finds candidate parents/children of a target by pooling evidence from
every dataset: a variable found independent somewhere credible is removed
everywhere, so tests are not repeated per dataset the way the baseline must.
MIMB adds spouse recovery on top and reports the union of per-dataset
candidate blankets as the blanket and their intersection as the parent set.
"""

from __future__ import annotations

from dataclasses import dataclass

from .citest import CiBackend
from .graph import Dag, InterventionFamily
from .util import iter_subsets


@dataclass(frozen=True)
class MipcResult:
    """Candidate parents/children plus the per-dataset bookkeeping."""

    cpc: tuple[str, ...]
    cmb: tuple[frozenset[str], ...]
    sepsets: dict[str, frozenset[str]]
    n_tests: int
    tests_per_dataset: tuple[int, ...]


@dataclass(frozen=True)
class DiscoveryResult:
    mb: frozenset[str]
    parents: frozenset[str]
    cpc: tuple[str, ...]
    cmb: tuple[frozenset[str], ...]
    sepsets: dict[str, frozenset[str]]
    n_tests: int
    tests_per_dataset: tuple[int, ...]


def mipc(
    backend: CiBackend,
    target: str,
    max_cond_size: int = 3,
    *,
    rank_by_p: bool = False,
) -> MipcResult:
    """Candidate parent/children discovery across all datasets.

    Phase 1 tests every other variable against the target marginally in
    every dataset; a variable dependent anywhere becomes a candidate and is
    recorded in that dataset's candidate blanket. A variable independent
    everywhere keeps the empty set as its separator and is never
    reconsidered.

    Phase 2 walks the candidates (admission order by default, ascending
    marginal p-value behind ``rank_by_p``) maintaining an intermediate set
    ipc. A candidate v is discarded if some non-empty subset S of ipc
    separates it from the target in a dataset whose candidate blanket
    contains both v and S; the removal applies to every dataset's blanket.
    Otherwise v joins ipc and every earlier member is re-examined, but only
    against subsets that contain the newly admitted v. Search order is
    deterministic: subset sizes ascending, subsets lexicographic by member
    position, datasets in bundle order; the first separation wins.
    """
    n = backend.n_datasets
    before = backend.ledger.snapshot()

    cpc: list[str] = []
    cmb: list[set[str]] = [set() for _ in range(n)]
    sepsets: dict[str, frozenset[str]] = {}
    marginal_p: dict[str, float] = {}
    for v in backend.variables:
        if v == target:
            continue
        dependent_anywhere = False
        best_p = 1.0
        for i in range(n):
            res = backend.test(v, target, (), i)
            if not res.independent:
                dependent_anywhere = True
                cmb[i].add(v)
                best_p = min(best_p, res.p_value)
        if dependent_anywhere:
            cpc.append(v)
            marginal_p[v] = best_p
        else:
            sepsets[v] = frozenset()

    if rank_by_p:
        position = {v: i for i, v in enumerate(backend.variables)}
        cpc.sort(key=lambda v: (marginal_p[v], position[v]))

    def find_separator(v: str, pool: list[str], must_contain: str | None):
        for subset in iter_subsets(pool, max_cond_size, containing=must_contain):
            needed = set(subset) | {v}
            for k in range(n):
                if needed <= cmb[k]:
                    res = backend.test(v, target, subset, k)
                    if res.independent:
                        return frozenset(subset)
        return None

    ipc: list[str] = []
    for v in cpc:
        sep = find_separator(v, ipc, None)
        if sep is not None:
            for k in range(n):
                cmb[k].discard(v)
            sepsets[v] = sep
            continue
        ipc.append(v)
        for y in [u for u in ipc if u != v]:
            pool = [u for u in ipc if u != y]
            sep_y = find_separator(y, pool, v)
            if sep_y is not None:
                ipc.remove(y)
                for k in range(n):
                    cmb[k].discard(y)
                sepsets[y] = sep_y

    after = backend.ledger.snapshot()
    per_dataset = tuple(a - b for a, b in zip(after, before))
    return MipcResult(
        cpc=tuple(ipc),
        cmb=tuple(frozenset(s) for s in cmb),
        sepsets={v: s for v, s in sepsets.items() if v not in ipc},
        n_tests=sum(per_dataset),
        tests_per_dataset=per_dataset,
    )


def mimb(
    backend: CiBackend,
    target: str,
    max_cond_size: int = 3,
    *,
    symmetry_correction: bool = False,
    rank_by_p: bool = False,
) -> DiscoveryResult:
    """Blanket and parent-set discovery across multiple datasets.

    Runs :func:`mipc` for the target, then for each candidate v runs it
    again (candidate set only) to harvest spouse candidates. A candidate
    spouse x of the target via v is accepted in the first dataset whose
    candidate blanket contains v and in which x is independent of the target
    given its recorded separator yet dependent once v is added; x then joins
    that dataset's candidate blanket. When x's separator already contains v
    the pair of conditions cannot hold and no test is spent.

    With ``symmetry_correction`` a candidate v is dropped (from the
    candidate set and every per-dataset blanket) when the target is not
    among v's own candidates; dropped variables stay eligible as spouses.
    """
    res = mipc(backend, target, max_cond_size, rank_by_p=rank_by_p)
    before_total = res.n_tests
    before = backend.ledger.snapshot()

    cpc = list(res.cpc)
    cmb = [set(s) for s in res.cmb]
    sepsets = dict(res.sepsets)
    n = backend.n_datasets

    cpc_of: dict[str, tuple[str, ...]] = {}
    for v in cpc:
        cpc_of[v] = mipc(backend, v, max_cond_size, rank_by_p=rank_by_p).cpc

    if symmetry_correction:
        surviving = [v for v in cpc if target in cpc_of[v]]
        for v in cpc:
            if v not in surviving:
                for k in range(n):
                    cmb[k].discard(v)
        cpc = surviving

    for v in cpc:
        for x in cpc_of[v]:
            if x == target or x in cpc:
                continue
            sep = sepsets.get(x, frozenset())
            if v in sep:
                continue
            for k in range(n):
                if v not in cmb[k]:
                    continue
                first = backend.test(x, target, sep, k)
                if not first.independent:
                    continue
                second = backend.test(x, target, sep | {v}, k)
                if second.reliable and not second.independent:
                    # admission needs positive evidence of dependence; an
                    # unreliable verdict is not evidence
                    cmb[k].add(x)
                    break

    union: set[str] = set()
    inter: set[str] | None = None
    for s in cmb:
        union |= s
        inter = set(s) if inter is None else inter & s

    after = backend.ledger.snapshot()
    per_dataset = tuple(
        a - b + base for a, b, base in zip(after, before, res.tests_per_dataset)
    )
    return DiscoveryResult(
        mb=frozenset(union),
        parents=frozenset(inter or set()),
        cpc=tuple(cpc),
        cmb=tuple(frozenset(s) for s in cmb),
        sepsets=sepsets,
        n_tests=before_total + sum(a - b for a, b in zip(after, before)),
        tests_per_dataset=per_dataset,
    )


def trace_example() -> tuple[Dag, InterventionFamily]:
    """A seven-variable fixture with three experiments whose oracle run
    exercises every branch of the discovery pipeline.

    The target T has parents A and B (with common parent E) and child G;
    C is a spouse of T through G and is fed by the remote root F.
    Experiments manipulate {G}, {A} and {A, B}; the family is conservative
    and never touches T.
    """
    dag = Dag(
        ["E", "A", "B", "F", "C", "G", "T"],
        [
            ("E", "A"),
            ("E", "B"),
            ("A", "T"),
            ("B", "T"),
            ("T", "G"),
            ("C", "G"),
            ("F", "C"),
        ],
    )
    family = InterventionFamily([{"G"}, {"A"}, {"A", "B"}])
    return dag, family
