"""k-Anonymity-first pipeline: clusters are grown to size k on QI proximity,
then refined by EMD-guided record swaps; a final merge pass guarantees
t-closeness, which cluster construction alone cannot."""

from __future__ import annotations

import time
from typing import Optional

import numpy as np

from .dataset import AnonymizedTable, NormalizationParams, Table, minmax_params
from .emd import TableEmd
from .merge import merge_until_tclose
from .metrics import RunReport, make_report
from .microagg import (
    Cluster,
    Partition,
    _farthest,
    aggregate,
    normalized_qi,
    partition_from_arrays,
)


class _SwapEmd:
    """Incremental cluster-vs-table EMD under single-record swaps.

    Keeps the cumulative mass-difference vector of the current cluster plus
    prefix sums of |cum|, |cum + 1/c| and |cum - 1/c|, so that the EMD after
    replacing one member by one candidate is a constant-time interval query:
    swapping rank a for rank b shifts the cumulative vector by -1/c on [a, b)
    (a < b) or +1/c on [b, a) (a > b).
    """

    def __init__(self, ctx: TableEmd, members: np.ndarray):
        self.ctx = ctx
        self.members = list(int(i) for i in members)
        self.member_ranks = [int(ctx.ranks[i]) for i in members]
        self.size = len(self.members)
        self.counts = np.bincount(self.member_ranks, minlength=ctx.m).astype(np.float64)
        self._rebuild()

    def _rebuild(self):
        ctx = self.ctx
        if ctx.m == 1:
            self.emd = 0.0
            return
        cum = np.cumsum(self.counts / self.size - ctx.table_mass)
        shift = 1.0 / self.size
        zero = np.zeros(1)
        self._abs = np.concatenate([zero, np.cumsum(np.abs(cum))])
        self._plus = np.concatenate([zero, np.cumsum(np.abs(cum + shift))])
        self._minus = np.concatenate([zero, np.cumsum(np.abs(cum - shift))])
        self._total = self._abs[-1]
        self.emd = float(self._total / (ctx.m - 1))

    def _swap_sum(self, a: int, b: int) -> float:
        if a == b:
            return self._total
        if a < b:
            return self._total - (self._abs[b] - self._abs[a]) + (self._minus[b] - self._minus[a])
        return self._total - (self._abs[a] - self._abs[b]) + (self._plus[a] - self._plus[b])

    def best_swap(self, candidate_rank: int) -> int:
        """Member position whose replacement by the candidate minimizes the
        EMD, or -1 when no strict improvement exists. Ties keep the earliest
        member, so equal-EMD swaps are never taken."""
        if self.ctx.m == 1:
            return -1
        best_pos = -1
        best_sum = self._total
        for pos, a in enumerate(self.member_ranks):
            s = self._swap_sum(a, candidate_rank)
            if s < best_sum:
                best_sum = s
                best_pos = pos
        return best_pos

    def apply_swap(self, pos: int, candidate: int, candidate_rank: int):
        old_rank = self.member_ranks[pos]
        self.counts[old_rank] -= 1.0
        self.counts[candidate_rank] += 1.0
        self.members[pos] = candidate
        self.member_ranks[pos] = candidate_rank
        self._rebuild()


def _generate(
    seed: int, candidates: np.ndarray, x: np.ndarray, ctx: TableEmd, k: int, tau: float
) -> np.ndarray:
    """One cluster around a seed record, per the k-anonymity-first rules.

    Fewer than 2k candidates are returned whole. Otherwise the cluster starts
    as the seed plus its k-1 QI-nearest candidates; then candidates are
    consumed in order of QI distance to the seed, each swapped against the
    member whose replacement most reduces the cluster-vs-table EMD, accepting
    strict improvements only, until the EMD reaches tau or candidates run out.
    Consumption is local to this call: only the returned members leave the
    caller's pool.
    """
    if candidates.size < 2 * k:
        return np.sort(candidates)
    others = candidates[candidates != seed]
    d = ((x[others] - x[seed]) ** 2).sum(axis=1)
    order = np.argsort(d, kind="stable")
    ordered = others[order]
    state = _SwapEmd(ctx, np.concatenate([[seed], ordered[: k - 1]]))
    for y in ordered[k - 1 :]:
        if state.emd <= tau:
            break
        y_rank = int(ctx.ranks[y])
        pos = state.best_swap(y_rank)
        if pos >= 0:
            state.apply_swap(pos, int(y), y_rank)
    return np.sort(np.array(state.members, dtype=np.int64))


def generate_cluster(
    x: int, candidates: np.ndarray, table: Table, k: int, tau: float
) -> Cluster:
    """Build one t-closeness-aware cluster seeded at record x from the given
    unassigned candidate indices. The candidate pool is not mutated."""
    candidates = np.asarray(candidates, dtype=np.int64)
    if candidates.size == 0:
        raise ValueError("candidate set is empty")
    if x not in candidates:
        raise ValueError("seed record must belong to the candidate set")
    if k < 2:
        raise ValueError("k must be at least 2")
    params = minmax_params(table)
    xm = normalized_qi(table, params)
    return Cluster(_generate(int(x), candidates, xm, TableEmd(table), k, tau))


def kfirst_partition(
    table: Table, k: int, tau: float, params: Optional[NormalizationParams] = None
) -> Partition:
    """Full k-anonymity-first partition: seeds alternate between the record
    farthest from the average of the unassigned pool and the record farthest
    from the previous seed. Cluster sizes lie in [k, 2k-1]; clusters need not
    all be t-close yet (see run_kfirst_algorithm)."""
    n = table.n
    if k < 2 or k > n:
        raise ValueError(f"need 2 <= k <= n, got k={k}, n={n}")
    if params is None:
        params = minmax_params(table)
    x = normalized_qi(table, params)
    ctx = TableEmd(table)
    remaining = np.arange(n)
    groups: list[np.ndarray] = []
    while remaining.size:
        avg = x[remaining].mean(axis=0)
        x0 = _farthest(x, remaining, avg)
        members = _generate(x0, remaining, x, ctx, k, tau)
        groups.append(members)
        remaining = np.setdiff1d(remaining, members, assume_unique=True)
        if remaining.size:
            x1 = _farthest(x, remaining, x[x0])
            members = _generate(x1, remaining, x, ctx, k, tau)
            groups.append(members)
            remaining = np.setdiff1d(remaining, members, assume_unique=True)
    return partition_from_arrays(groups, n)


def run_kfirst_algorithm(
    table: Table, k: int, tau: float, seed: Optional[int] = None
) -> tuple[AnonymizedTable, Partition, RunReport]:
    """k-Anonymity-first partition followed by the merge pass as the hard
    t-closeness guarantee, then aggregation."""
    if tau <= 0:
        raise ValueError("tau must be positive")
    start = time.perf_counter()
    params = minmax_params(table)
    partition = kfirst_partition(table, k, tau, params)
    partition = merge_until_tclose(table, partition, tau, params)
    anonymized = aggregate(table, partition)
    runtime_ms = (time.perf_counter() - start) * 1000.0
    report = make_report("kfirst", table, params, partition, anonymized, k, tau, runtime_ms, seed)
    return anonymized, partition, report
