"""Microaggregate-then-merge pipeline: standard MDAV microaggregation followed
by merging of clusters until every cluster is t-close."""

from __future__ import annotations

import time
from typing import Optional

import numpy as np

from .dataset import AnonymizedTable, NormalizationParams, Table, minmax_params
from .emd import TableEmd
from .metrics import RunReport, make_report
from .microagg import Partition, aggregate, mdav_partition, normalized_qi, partition_from_arrays


def merge_until_tclose(
    table: Table,
    partition: Partition,
    tau: float,
    params: Optional[NormalizationParams] = None,
) -> Partition:
    """Repeatedly merge the cluster with the greatest EMD to the table into
    its QI-nearest neighbor (centroid to centroid, normalized space) until
    every cluster's EMD is at most tau.

    Always terminates: in the worst case all clusters collapse into one, whose
    EMD is exactly 0. A partition that already satisfies tau is returned
    unchanged. Ties break toward the lower cluster index; the merged cluster
    keeps the lower of the two slots.
    """
    if tau < 0:
        raise ValueError("tau must be nonnegative")
    if partition.n != table.n:
        raise ValueError("partition does not match the table size")
    if params is None:
        params = minmax_params(table)

    ctx = TableEmd(table)
    emds = [ctx.cluster_emd(c.members) for c in partition.clusters]
    if max(emds) <= tau:
        return partition

    x = normalized_qi(table, params)
    groups = [c.members for c in partition.clusters]
    centroids = [x[g].mean(axis=0) for g in groups]

    while max(emds) > tau and len(groups) > 1:
        worst = int(np.argmax(emds))
        dists = ((np.array(centroids) - centroids[worst]) ** 2).sum(axis=1)
        dists[worst] = np.inf
        other = int(np.argmin(dists))
        lo, hi = sorted((worst, other))
        merged = np.sort(np.concatenate([groups[lo], groups[hi]]))
        groups[lo] = merged
        centroids[lo] = x[merged].mean(axis=0)
        emds[lo] = ctx.cluster_emd(merged)
        del groups[hi], centroids[hi], emds[hi]

    return partition_from_arrays(groups, table.n)


def run_merge_algorithm(
    table: Table, k: int, tau: float, seed: Optional[int] = None
) -> tuple[AnonymizedTable, Partition, RunReport]:
    """MDAV partition, merge until t-close, aggregate. The output satisfies
    k-anonymity at level k and t-closeness at tau."""
    if tau <= 0:
        raise ValueError("tau must be positive")
    start = time.perf_counter()
    params = minmax_params(table)
    partition = mdav_partition(table, params, k)
    partition = merge_until_tclose(table, partition, tau, params)
    anonymized = aggregate(table, partition)
    runtime_ms = (time.perf_counter() - start) * 1000.0
    report = make_report("merge", table, params, partition, anonymized, k, tau, runtime_ms, seed)
    return anonymized, partition, report
