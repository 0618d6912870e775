"""Record-space geometry, clusters and partitions, MDAV partitioning, and
centroid aggregation into an anonymized release."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import AnonymizedTable, NormalizationParams, Table


@dataclass(frozen=True)
class Cluster:
    """A nonempty, duplicate-free set of record indices, stored sorted."""

    members: np.ndarray

    def __post_init__(self):
        members = np.sort(np.asarray(self.members, dtype=np.int64))
        if members.size == 0:
            raise ValueError("a cluster must contain at least one record")
        if np.any(np.diff(members) == 0):
            raise ValueError("cluster members must be distinct record indices")
        members.setflags(write=False)
        object.__setattr__(self, "members", members)

    def __len__(self) -> int:
        return int(self.members.size)


@dataclass(frozen=True)
class Partition:
    """A list of pairwise-disjoint clusters covering all n record indices."""

    clusters: tuple[Cluster, ...]
    n: int

    def __post_init__(self):
        clusters = tuple(self.clusters)
        if not clusters:
            raise ValueError("a partition needs at least one cluster")
        joined = np.concatenate([c.members for c in clusters])
        if joined.size != self.n or np.any(np.sort(joined) != np.arange(self.n)):
            raise ValueError("clusters must disjointly cover all record indices")
        object.__setattr__(self, "clusters", clusters)

    def sizes(self) -> list[int]:
        return [len(c) for c in self.clusters]

    def __len__(self) -> int:
        return len(self.clusters)


def partition_from_arrays(member_arrays, n: int) -> Partition:
    return Partition(tuple(Cluster(a) for a in member_arrays), n)


def normalized_qi(table: Table, params: NormalizationParams) -> np.ndarray:
    """QI matrix mapped into [0, 1] per attribute with the given min/max;
    degenerate attributes (min == max) map to 0."""
    qi = table.qi_matrix()
    spans = params.spans
    out = np.zeros_like(qi)
    ok = spans > 0
    out[:, ok] = (qi[:, ok] - params.mins[ok]) / spans[ok]
    return out


def record_distance(table: Table, params: NormalizationParams, i: int, j: int) -> float:
    """Euclidean distance between two records over min-max-normalized QIs."""
    x = normalized_qi(table, params)
    return float(np.sqrt(((x[i] - x[j]) ** 2).sum()))


def centroid(table: Table, cluster: Cluster) -> np.ndarray:
    """Per-QI arithmetic mean of a cluster, in original units."""
    if len(cluster) == 0:
        raise ValueError("cluster is empty")
    return table.qi_matrix()[cluster.members].mean(axis=0)


def _nearest_split(x: np.ndarray, remaining: np.ndarray, point: np.ndarray, k: int):
    """The k remaining records nearest to a point, ties by lowest index, and
    the rest. `remaining` must be ascending."""
    d = ((x[remaining] - point) ** 2).sum(axis=1)
    order = np.argsort(d, kind="stable")
    chosen = np.sort(remaining[order[:k]])
    rest = np.setdiff1d(remaining, chosen, assume_unique=True)
    return chosen, rest


def _farthest(x: np.ndarray, remaining: np.ndarray, point: np.ndarray) -> int:
    d = ((x[remaining] - point) ** 2).sum(axis=1)
    return int(remaining[int(np.argmax(d))])


def mdav_partition(table: Table, params: NormalizationParams, k: int) -> Partition:
    """Fixed-size MDAV microaggregation partition.

    While at least 3k records remain, a k-cluster is built around the record
    farthest from the average and another around the record farthest from that
    one; with 2k..3k-1 left, one k-cluster around the farthest record plus one
    cluster with the rest; below 2k, all remaining records form one cluster.
    All ties break toward the lowest record index, so the result is
    deterministic. Every cluster size lies in [k, 2k-1].
    """
    n = table.n
    if k < 2 or k > n:
        raise ValueError(f"need 2 <= k <= n, got k={k}, n={n}")
    x = normalized_qi(table, params)
    remaining = np.arange(n)
    groups: list[np.ndarray] = []
    while remaining.size >= 3 * k:
        avg = x[remaining].mean(axis=0)
        r = _farthest(x, remaining, avg)
        first, remaining = _nearest_split(x, remaining, x[r], k)
        groups.append(first)
        s = _farthest(x, remaining, x[r])
        second, remaining = _nearest_split(x, remaining, x[s], k)
        groups.append(second)
    if remaining.size >= 2 * k:
        avg = x[remaining].mean(axis=0)
        r = _farthest(x, remaining, avg)
        first, remaining = _nearest_split(x, remaining, x[r], k)
        groups.append(first)
        groups.append(remaining)
    elif remaining.size:
        groups.append(remaining)
    return partition_from_arrays(groups, n)


def aggregate(table: Table, partition: Partition) -> AnonymizedTable:
    """Replace each record's QI cells with its cluster centroid, leaving the
    confidential and ignored cells untouched, and record cluster ids."""
    if partition.n != table.n:
        raise ValueError("partition does not match the table size")
    rows = table.rows.copy()
    ids = np.empty(table.n, dtype=np.int64)
    qi_idx = np.array(table.qi_indices)
    for ci, cluster in enumerate(partition.clusters):
        rows[np.ix_(cluster.members, qi_idx)] = rows[np.ix_(cluster.members, qi_idx)].mean(axis=0)
        ids[cluster.members] = ci
    return AnonymizedTable(Table(table.specs, rows), ids)
