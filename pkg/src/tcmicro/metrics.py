"""Independent verifiers and information-loss metrics: normalized SSE,
k-anonymity and t-closeness checks, cluster-size statistics, and a standalone
transport oracle for cross-checking the cumulative EMD formula."""

from __future__ import annotations

from dataclasses import dataclass, asdict
from typing import Optional

import numpy as np

from .dataset import AnonymizedTable, NormalizationParams, Table
from .emd import Distribution, TableEmd
from .microagg import Partition


@dataclass(frozen=True)
class RunReport:
    """Summary of one anonymization run: requested parameters, realized
    cluster sizes, worst per-cluster EMD, normalized SSE and wall time."""

    algorithm: str
    n: int
    k_requested: int
    tau: float
    k_min_actual: int
    k_avg_actual: float
    max_cluster_emd: float
    sse: float
    runtime_ms: float
    seed: Optional[int] = None
    sse_attr_count: int = 0

    def __post_init__(self):
        if self.k_min_actual > self.k_avg_actual:
            raise ValueError("minimum cluster size cannot exceed the average")
        if self.sse < 0 or self.max_cluster_emd < 0:
            raise ValueError("sse and max_cluster_emd must be nonnegative")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class KAnonymityCheck:
    ok: bool
    k: int
    min_count: int
    witness: Optional[tuple[float, ...]]

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class TClosenessCheck:
    ok: bool
    tau: float
    max_emd: float
    worst_cluster: Optional[int]

    def __bool__(self) -> bool:
        return self.ok


def normalized_sse(
    original: Table, anonymized: AnonymizedTable, params: NormalizationParams
) -> float:
    """Mean over records and released attributes of the squared normalized
    difference between original and anonymized cells.

    Differences are scaled by each QI's original min-max range (degenerate
    ranges contribute 0). The confidential column is released unchanged, so it
    contributes 0 while still counting toward the attribute total; ignored
    attributes are excluded.
    """
    anon = anonymized.table
    if anon.rows.shape != original.rows.shape:
        raise ValueError("original and anonymized tables differ in shape")
    qi_idx = np.array(original.qi_indices)
    spans = params.spans
    diff = original.rows[:, qi_idx] - anon.rows[:, qi_idx]
    ned = np.zeros_like(diff)
    ok = spans > 0
    ned[:, ok] = diff[:, ok] / spans[ok]
    m = len(qi_idx) + 1
    return float((ned**2).sum() / (original.n * m))


def verify_k_anonymity(anonymized: AnonymizedTable, k: int) -> KAnonymityCheck:
    """Pass iff every distinct QI combination occurs in at least k rows; on
    failure the witness is one violating combination."""
    qi = anonymized.table.qi_matrix()
    _, inverse, counts = np.unique(qi, axis=0, return_inverse=True, return_counts=True)
    min_count = int(counts.min())
    if min_count >= k:
        return KAnonymityCheck(True, k, min_count, None)
    bad_group = int(np.argmin(counts))
    witness_row = int(np.flatnonzero(inverse == bad_group)[0])
    return KAnonymityCheck(False, k, min_count, tuple(float(v) for v in qi[witness_row]))


def verify_t_closeness(
    table: Table, partition: Partition, tau: float, slack: float = 1e-9
) -> TClosenessCheck:
    """Pass iff every cluster's EMD to the table marginal is at most
    tau + slack; reports the worst cluster either way."""
    ctx = TableEmd(table)
    emds = [ctx.cluster_emd(c.members) for c in partition.clusters]
    worst = int(np.argmax(emds))
    max_emd = float(emds[worst])
    return TClosenessCheck(max_emd <= tau + slack, tau, max_emd, worst)


def transport_oracle_emd(p: Distribution, q: Distribution) -> float:
    """EMD computed by explicitly moving probability mass between bins.

    Supply bins of p and demand bins of q are matched left to right, paying
    |i - j| / (m - 1) per unit moved. For an ordered 1-D support this greedy
    plan is an optimal transport plan. Coded independently of emd_ordered's
    cumulative-sum formula so the two act as cross-checks.
    """
    if p.support.shape != q.support.shape or np.any(p.support != q.support):
        raise ValueError("distributions must share an identical support")
    m = p.m
    if m == 1:
        return 0.0
    a = p.mass.copy()
    b = q.mass.copy()
    cost = 0.0
    i = j = 0
    while i < m and j < m:
        if a[i] <= 0.0:
            i += 1
            continue
        if b[j] <= 0.0:
            j += 1
            continue
        moved = min(a[i], b[j])
        cost += moved * abs(i - j) / (m - 1)
        a[i] -= moved
        b[j] -= moved
    return cost


def cluster_size_stats(partition: Partition) -> tuple[int, float]:
    sizes = partition.sizes()
    return min(sizes), sum(sizes) / len(sizes)


def make_report(
    algorithm: str,
    table: Table,
    params: NormalizationParams,
    partition: Partition,
    anonymized: AnonymizedTable,
    k_requested: int,
    tau: float,
    runtime_ms: float,
    seed: Optional[int] = None,
) -> RunReport:
    k_min, k_avg = cluster_size_stats(partition)
    check = verify_t_closeness(table, partition, tau)
    return RunReport(
        algorithm=algorithm,
        n=table.n,
        k_requested=k_requested,
        tau=tau,
        k_min_actual=k_min,
        k_avg_actual=k_avg,
        max_cluster_emd=check.max_emd,
        sse=normalized_sse(table, anonymized, params),
        runtime_ms=runtime_ms,
        seed=seed,
        sse_attr_count=len(table.qi_indices) + 1,
    )
