"""DAGs over named variables: d-separation, Markov blankets, interventions.

Graphs are immutable value objects. The public API speaks variable names;
internally each variable gets a dense integer index in declaration order so
the traversal loops stay cheap. All queries are read-only and intervention
surgery returns a new graph, so instances can be shared freely across
threads.
"""

from __future__ import annotations

import functools
import itertools
from collections import deque
from typing import Iterable, Iterator


class Dag:
    """Immutable directed acyclic graph over named variables.

    Construction validates that every edge endpoint is a declared variable,
    that there are no self-loops or duplicate edges, and that a topological
    order exists.
    """

    __slots__ = ("variables", "edges", "_index", "_pa", "_ch", "_topo", "_hash")

    def __init__(self, variables: Iterable[str], edges: Iterable[tuple[str, str]] = ()):
        self.variables: tuple[str, ...] = tuple(variables)
        self._index = {v: i for i, v in enumerate(self.variables)}
        if len(self._index) != len(self.variables):
            raise ValueError("duplicate variable names")
        pa: list[set[int]] = [set() for _ in self.variables]
        ch: list[set[int]] = [set() for _ in self.variables]
        seen: set[tuple[int, int]] = set()
        for a, b in edges:
            ia, ib = self._resolve(a), self._resolve(b)
            if ia == ib:
                raise ValueError(f"self edge on {a!r}")
            if (ia, ib) in seen:
                raise ValueError(f"duplicate edge {a!r} -> {b!r}")
            seen.add((ia, ib))
            pa[ib].add(ia)
            ch[ia].add(ib)
        self._pa = tuple(frozenset(s) for s in pa)
        self._ch = tuple(frozenset(s) for s in ch)
        self.edges: frozenset[tuple[str, str]] = frozenset(
            (self.variables[a], self.variables[b]) for a, b in seen
        )
        self._topo = self._toposort()
        self._hash: int | None = None

    def _resolve(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise ValueError(f"unknown variable {name!r}") from None

    def _toposort(self) -> tuple[int, ...]:
        # children are visited in index order so the resulting order is a
        # pure function of the graph, independent of set iteration order
        # (and with it of the process hash seed)
        indeg = [len(p) for p in self._pa]
        queue = deque(i for i, d in enumerate(indeg) if d == 0)
        order: list[int] = []
        while queue:
            v = queue.popleft()
            order.append(v)
            for c in sorted(self._ch[v]):
                indeg[c] -= 1
                if indeg[c] == 0:
                    queue.append(c)
        if len(order) != len(self.variables):
            raise ValueError("edge relation contains a cycle")
        return tuple(order)

    # -- value semantics ---------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Dag):
            return NotImplemented
        return self.variables == other.variables and self.edges == other.edges

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.variables, self.edges))
        return self._hash

    def __repr__(self) -> str:
        return f"Dag({len(self.variables)} variables, {len(self.edges)} edges)"

    def __contains__(self, name: str) -> bool:
        return name in self._index

    # -- accessors ---------------------------------------------------------

    def index(self, name: str) -> int:
        """Dense index of a variable in declaration order."""
        return self._resolve(name)

    def parents(self, v: str) -> frozenset[str]:
        return frozenset(self.variables[i] for i in self._pa[self._resolve(v)])

    def children(self, v: str) -> frozenset[str]:
        return frozenset(self.variables[i] for i in self._ch[self._resolve(v)])

    def spouses(self, v: str) -> frozenset[str]:
        """Parents of v's children that are neither v nor adjacent to v."""
        vi = self._resolve(v)
        out: set[int] = set()
        for c in self._ch[vi]:
            out |= self._pa[c]
        out -= {vi} | self._pa[vi] | self._ch[vi]
        return frozenset(self.variables[i] for i in out)

    def descendants(self, v: str) -> frozenset[str]:
        """All variables reachable from v by directed paths; excludes v."""
        start = self._resolve(v)
        seen: set[int] = set()
        stack = list(self._ch[start])
        while stack:
            u = stack.pop()
            if u not in seen:
                seen.add(u)
                stack.extend(self._ch[u])
        return frozenset(self.variables[i] for i in seen)

    def non_descendants(self, v: str) -> frozenset[str]:
        """Complement of {v} and its descendants."""
        desc = self.descendants(v)
        return frozenset(u for u in self.variables if u != v and u not in desc)

    def markov_blanket(self, v: str) -> frozenset[str]:
        """Parents, children and spouses of v."""
        return self.parents(v) | self.children(v) | self.spouses(v)

    def topological_order(self) -> tuple[str, ...]:
        return tuple(self.variables[i] for i in self._topo)

    # -- surgery -----------------------------------------------------------

    def apply_intervention(self, targets: Iterable[str]) -> "Dag":
        """Post-intervention graph: every edge into a target is removed.

        Variables and all other edges are unchanged; self is not modified.
        The surviving edges are rebuilt in index order so the copy is
        canonical whatever order the edge set iterates in.
        """
        tset = {self._resolve(t) for t in targets}
        kept = sorted(
            (
                (a, b)
                for (a, b) in self.edges
                if self._index[b] not in tset
            ),
            key=lambda e: (self._index[e[0]], self._index[e[1]]),
        )
        return Dag(self.variables, kept)

    # -- d-separation ------------------------------------------------------

    def d_separated(self, x: str, y: str, z: Iterable[str] = ()) -> bool:
        """True iff every path between x and y is blocked given z.

        A path is blocked when some non-collider on it is conditioned on, or
        some collider on it has neither itself nor any descendant conditioned
        on. Decided with a linear-time reachability sweep over (node,
        direction) states rather than path enumeration.
        """
        xi, yi = self._resolve(x), self._resolve(y)
        zi = frozenset(self._resolve(v) for v in z)
        if xi == yi:
            raise ValueError(f"x and y must differ, both are {x!r}")
        if xi in zi or yi in zi:
            raise ValueError("x and y must not be in the conditioning set")

        # Ancestors of the conditioning set, including the set itself:
        # these are the nodes at which a collider may pass the ball.
        anc = set(zi)
        stack = list(zi)
        while stack:
            v = stack.pop()
            for p in self._pa[v]:
                if p not in anc:
                    anc.add(p)
                    stack.append(p)

        # States are (node, came_from_child); the source behaves as if
        # entered from below.
        UP, DOWN = True, False
        queue: deque[tuple[int, bool]] = deque([(xi, UP)])
        visited: set[tuple[int, bool]] = set()
        while queue:
            v, direction = queue.popleft()
            if (v, direction) in visited:
                continue
            visited.add((v, direction))
            if v == yi:
                return False
            if direction is UP:
                if v not in zi:
                    for p in self._pa[v]:
                        queue.append((p, UP))
                    for c in self._ch[v]:
                        queue.append((c, DOWN))
            else:
                if v not in zi:
                    for c in self._ch[v]:
                        queue.append((c, DOWN))
                if v in anc:
                    for p in self._pa[v]:
                        queue.append((p, UP))
        return True


class InterventionFamily:
    """The per-experiment sets of manipulated variables."""

    __slots__ = ("sets",)

    def __init__(self, sets: Iterable[Iterable[str]]):
        self.sets: tuple[frozenset[str], ...] = tuple(frozenset(s) for s in sets)
        if not self.sets:
            raise ValueError("an intervention family needs at least one experiment")

    @property
    def n(self) -> int:
        return len(self.sets)

    def __len__(self) -> int:
        return len(self.sets)

    def __iter__(self) -> Iterator[frozenset[str]]:
        return iter(self.sets)

    def __getitem__(self, i: int) -> frozenset[str]:
        return self.sets[i]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, InterventionFamily):
            return NotImplemented
        return self.sets == other.sets

    def __hash__(self) -> int:
        return hash(self.sets)

    def __repr__(self) -> str:
        inner = ", ".join("{" + ", ".join(sorted(s)) + "}" for s in self.sets)
        return f"InterventionFamily([{inner}])"

    def union_of_targets(self) -> frozenset[str]:
        out: set[str] = set()
        for s in self.sets:
            out |= s
        return frozenset(out)

    def zeta(self, t: str) -> int:
        """Number of experiments in which t was manipulated."""
        return sum(1 for s in self.sets if t in s)

    def without(self, t: str) -> "InterventionFamily":
        """The family with t removed from every experiment."""
        return InterventionFamily(s - {t} for s in self.sets)

    def validate_names(self, valid: Iterable[str]) -> None:
        known = set(valid)
        for i, s in enumerate(self.sets):
            unknown = s - known
            if unknown:
                raise ValueError(
                    f"experiment {i} manipulates unknown variables {sorted(unknown)}"
                )

    def is_conservative(self) -> bool:
        return is_conservative(self)


def is_conservative(family: InterventionFamily) -> bool:
    """Every manipulated variable must be left alone in some experiment."""
    for v in family.union_of_targets():
        if all(v in s for s in family.sets):
            return False
    return True


# -- brute-force oracle ----------------------------------------------------
#
# Independent cross-check for Dag.d_separated: enumerate every undirected
# simple path and apply the blocking rule literally, path by path. Intended
# for small graphs only.


@functools.lru_cache(maxsize=65536)
def _descendants_ix(dag: Dag, v: int) -> frozenset[int]:
    seen: set[int] = set()
    stack = list(dag._ch[v])
    while stack:
        u = stack.pop()
        if u not in seen:
            seen.add(u)
            stack.extend(dag._ch[u])
    return frozenset(seen)


@functools.lru_cache(maxsize=65536)
def _paths_between(dag: Dag, xi: int, yi: int) -> tuple[tuple[frozenset[int], tuple[int, ...]], ...]:
    """All simple undirected paths xi..yi as (non-colliders, colliders) pairs."""
    adjacency = [dag._pa[i] | dag._ch[i] for i in range(len(dag.variables))]
    paths: list[tuple[frozenset[int], tuple[int, ...]]] = []

    def extend(path: list[int], visited: set[int]) -> None:
        tail = path[-1]
        for nxt in adjacency[tail]:
            if nxt in visited:
                continue
            if nxt == yi:
                full = path + [nxt]
                noncolliders: set[int] = set()
                colliders: list[int] = []
                for k in range(1, len(full) - 1):
                    prev, mid, fol = full[k - 1], full[k], full[k + 1]
                    if prev in dag._pa[mid] and fol in dag._pa[mid]:
                        colliders.append(mid)
                    else:
                        noncolliders.add(mid)
                paths.append((frozenset(noncolliders), tuple(colliders)))
            else:
                extend(path + [nxt], visited | {nxt})

    extend([xi], {xi})
    return tuple(paths)


def brute_force_d_separated(dag: Dag, x: str, y: str, z: Iterable[str] = ()) -> bool:
    """Same contract as Dag.d_separated, by exhaustive path enumeration."""
    xi, yi = dag._resolve(x), dag._resolve(y)
    zi = frozenset(dag._resolve(v) for v in z)
    if xi == yi:
        raise ValueError(f"x and y must differ, both are {x!r}")
    if xi in zi or yi in zi:
        raise ValueError("x and y must not be in the conditioning set")
    for noncolliders, colliders in _paths_between(dag, xi, yi):
        if noncolliders & zi:
            continue  # blocked by a conditioned chain/fork node
        open_path = True
        for c in colliders:
            if c not in zi and not (_descendants_ix(dag, c) & zi):
                open_path = False
                break
        if open_path:
            return False
    return True


def all_conditioning_sets(pool: Iterable[str], max_size: int) -> Iterator[frozenset[str]]:
    """Subsets of pool up to max_size, smallest first."""
    items = tuple(pool)
    for size in range(min(max_size, len(items)) + 1):
        for combo in itertools.combinations(items, size):
            yield frozenset(combo)
