"""Conditional-independence testing on discrete data.

The G-squared test is the workhorse; a d-separation oracle backend with the
same call shape stands in for it when ideal tests are wanted. Every test,
from either backend, is counted in a per-run ledger because the number of
tests is itself a reported metric.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Protocol, runtime_checkable

import numpy as np
from scipy.special import gammaincc

from .bayesnet import Dataset, DatasetBundle
from .graph import Dag, InterventionFamily


@dataclass(frozen=True)
class CiQuery:
    x: str
    y: str
    z: frozenset[str]
    dataset_index: int


@dataclass(frozen=True)
class CiResult:
    statistic: float
    dof: int
    p_value: float
    independent: bool
    reliable: bool


class TestLedger:
    """Counts independence tests per dataset; totals are the nTest metric."""

    __slots__ = ("counts",)

    def __init__(self, n_datasets: int):
        self.counts = [0] * n_datasets

    def record(self, dataset_index: int) -> None:
        self.counts[dataset_index] += 1

    @property
    def total(self) -> int:
        return sum(self.counts)

    def snapshot(self) -> tuple[int, ...]:
        return tuple(self.counts)


def chi_square_upper_tail(statistic: float, dof: int) -> float:
    """P[chi2(dof) >= statistic] via the regularised incomplete gamma."""
    if dof < 1:
        raise ValueError("dof must be at least 1")
    if statistic <= 0:
        return 1.0
    return float(gammaincc(dof / 2.0, statistic / 2.0))


def g2_statistic(counts: np.ndarray) -> tuple[float, int]:
    """Log likelihood ratio statistic and degrees of freedom.

    ``counts`` is (rx, ry) or (rx, ry, n_configs), the trailing axis indexing
    configurations of the conditioning set. Expectations are formed from the
    margins of each configuration stratum; zero observed cells contribute
    nothing. Per-stratum dof is (rx'-1)(ry'-1) counting only states with a
    nonzero marginal in that stratum, so empty strata and degenerate margins
    contribute zero.
    """
    arr = np.asarray(counts, dtype=np.float64)
    if arr.ndim == 2:
        arr = arr[:, :, None]
    if arr.ndim != 3:
        raise ValueError("counts must be 2- or 3-dimensional")
    if (arr < 0).any():
        raise ValueError("counts must be nonnegative")

    totals = arr.sum(axis=(0, 1))  # (nz,)
    rows = arr.sum(axis=1)  # (rx, nz)
    cols = arr.sum(axis=0)  # (ry, nz)
    with np.errstate(divide="ignore", invalid="ignore"):
        expected = rows[:, None, :] * cols[None, :, :] / totals[None, None, :]
    mask = arr > 0
    stat = 0.0
    if mask.any():
        stat = 2.0 * float((arr[mask] * np.log(arr[mask] / expected[mask])).sum())
    rx_eff = (rows > 0).sum(axis=0)
    ry_eff = (cols > 0).sum(axis=0)
    dof = int((np.maximum(rx_eff - 1, 0) * np.maximum(ry_eff - 1, 0)).sum())
    return max(stat, 0.0), dof


def contingency_counts(
    data: Dataset, x: str, y: str, z: Iterable[str] = ()
) -> np.ndarray:
    """(rx, ry, n_z_configs) observed counts, one bincount pass."""
    schema = data.schema
    zs = tuple(z)
    rx = len(schema.states_of(x))
    ry = len(schema.states_of(y))
    xcol = data.column(x)
    ycol = data.column(y)
    zkey = np.zeros(data.n_rows, dtype=np.int64)
    nz = 1
    for v in zs:
        card = len(schema.states_of(v))
        zkey = zkey * card + data.column(v)
        nz *= card
    key = (xcol * ry + ycol) * nz + zkey
    flat = np.bincount(key, minlength=rx * ry * nz)
    return flat.reshape(rx, ry, nz)


def g2_test(
    data: Dataset,
    x: str,
    y: str,
    z: Iterable[str] = (),
    alpha: float = 0.01,
    *,
    min_rows_per_cell: int = 5,
    ledger: TestLedger | None = None,
    dataset_index: int = 0,
) -> CiResult:
    """G-squared conditional independence test of x and y given z.

    The test is flagged unreliable when the dataset is too small for the
    full contingency table (fewer than ``min_rows_per_cell`` rows per cell)
    or when the degrees of freedom degenerate to zero. Unreliable tests
    report dependence, which keeps doubtful variables in candidate sets.

    An unordered conditioning set is canonicalised by sorting, so results
    are bit-identical across processes; an explicit sequence keeps the
    caller's order.
    """
    zs = tuple(sorted(z)) if isinstance(z, (set, frozenset)) else tuple(z)
    if x == y or x in zs or y in zs:
        raise ValueError("x, y and z must be disjoint")
    if ledger is not None:
        ledger.record(dataset_index)
    counts = contingency_counts(data, x, y, zs)
    stat, dof = g2_statistic(counts)
    n_cells = counts.size
    reliable = data.n_rows >= min_rows_per_cell * n_cells and dof > 0
    p_value = chi_square_upper_tail(stat, dof) if dof > 0 else 1.0
    independent = bool(reliable and p_value > alpha)
    return CiResult(stat, dof, p_value, independent, reliable)


@runtime_checkable
class CiBackend(Protocol):
    """What the discovery algorithms need from a test provider."""

    variables: tuple[str, ...]
    ledger: TestLedger

    @property
    def n_datasets(self) -> int: ...

    def test(self, x: str, y: str, z: Iterable[str], dataset_index: int) -> CiResult: ...


class DataBackend:
    """G-squared tests over the datasets of a bundle."""

    def __init__(
        self,
        bundle: DatasetBundle,
        alpha: float = 0.01,
        *,
        min_rows_per_cell: int = 5,
    ):
        self.bundle = bundle
        self.alpha = alpha
        self.min_rows_per_cell = min_rows_per_cell
        self.variables = bundle.schema.names
        self.ledger = TestLedger(bundle.n)

    @property
    def n_datasets(self) -> int:
        return self.bundle.n

    def test(self, x: str, y: str, z: Iterable[str], dataset_index: int) -> CiResult:
        return g2_test(
            self.bundle[dataset_index],
            x,
            y,
            z,
            self.alpha,
            min_rows_per_cell=self.min_rows_per_cell,
            ledger=self.ledger,
            dataset_index=dataset_index,
        )


class OracleBackend:
    """Ideal tests answered by d-separation on post-intervention graphs.

    Dataset i is represented by the graph after the i-th experiment's
    manipulations. Results are always reliable; p-values are 1 or 0 by
    convention.
    """

    def __init__(self, dag: Dag, family: InterventionFamily):
        family.validate_names(dag.variables)
        self.dag = dag
        self.family = family
        self.post_dags = tuple(dag.apply_intervention(s) for s in family.sets)
        self.variables = dag.variables
        self.ledger = TestLedger(len(self.post_dags))

    @property
    def n_datasets(self) -> int:
        return len(self.post_dags)

    def test(self, x: str, y: str, z: Iterable[str], dataset_index: int) -> CiResult:
        self.ledger.record(dataset_index)
        separated = self.post_dags[dataset_index].d_separated(x, y, z)
        return CiResult(
            statistic=0.0 if separated else math.inf,
            dof=0,
            p_value=1.0 if separated else 0.0,
            independent=separated,
            reliable=True,
        )
