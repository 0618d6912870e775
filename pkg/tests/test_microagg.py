from itertools import combinations

import numpy as np
import pytest

from tcmicro import (
    AttributeSpec,
    Cluster,
    Partition,
    Role,
    Table,
    aggregate,
    centroid,
    mdav_partition,
    minmax_params,
    normalized_qi,
    record_distance,
    verify_k_anonymity,
)
from util import make_1d_table, make_ranks_table

SPECS_2QI = (
    AttributeSpec("a", Role.QUASI_IDENTIFIER),
    AttributeSpec("b", Role.QUASI_IDENTIFIER),
    AttributeSpec("s", Role.CONFIDENTIAL),
)


def random_table(n, seed):
    rng = np.random.default_rng(seed)
    return Table(SPECS_2QI, rng.uniform(-50, 50, size=(n, 3)))


class TestClusterPartition:
    def test_cluster_rejects_empty_and_duplicates(self):
        with pytest.raises(ValueError):
            Cluster([])
        with pytest.raises(ValueError):
            Cluster([1, 1, 2])

    def test_partition_must_cover(self):
        with pytest.raises(ValueError, match="cover"):
            Partition((Cluster([0, 1]),), 3)

    def test_partition_must_be_disjoint(self):
        with pytest.raises(ValueError, match="cover"):
            Partition((Cluster([0, 1]), Cluster([1, 2])), 3)


class TestRecordDistance:
    def test_identical_rows(self):
        t = make_1d_table([3, 3, 7], [1, 2, 3])
        assert record_distance(t, minmax_params(t), 0, 1) == 0.0

    def test_full_range_is_one(self):
        t = make_1d_table([0, 10], [1, 2])
        assert record_distance(t, minmax_params(t), 0, 1) == 1.0

    def test_two_full_ranges_sqrt2(self):
        t = Table(SPECS_2QI, np.array([[0.0, -5.0, 1.0], [10.0, 5.0, 2.0]]))
        d = record_distance(t, minmax_params(t), 0, 1)
        assert d == pytest.approx(np.sqrt(2), abs=1e-12)

    def test_symmetry(self):
        t = random_table(10, 2)
        p = minmax_params(t)
        assert record_distance(t, p, 2, 7) == record_distance(t, p, 7, 2)


class TestCentroid:
    def test_singleton(self):
        t = make_1d_table([4, 9], [1, 2])
        assert centroid(t, Cluster([1]))[0] == 9.0

    def test_mean_of_endpoints(self):
        t = make_1d_table([0, 10], [1, 2])
        assert centroid(t, Cluster([0, 1]))[0] == 5.0

    def test_minimizes_within_cluster_squared_distance(self):
        t = random_table(12, 8)
        params = minmax_params(t)
        x = normalized_qi(t, params)
        members = np.array([0, 3, 5, 9])
        c = (centroid(t, Cluster(members)) - params.mins) / params.spans
        base = ((x[members] - c) ** 2).sum()
        rng = np.random.default_rng(1)
        for _ in range(50):
            perturbed = c + rng.uniform(-0.05, 0.05, size=c.shape)
            assert ((x[members] - perturbed) ** 2).sum() >= base - 1e-12


class TestMdav:
    def test_two_obvious_groups(self):
        t = make_1d_table([1, 2, 3, 101, 102, 103], [1, 2, 3, 4, 5, 6])
        part = mdav_partition(t, minmax_params(t), 3)
        groups = {tuple(c.members) for c in part.clusters}
        assert groups == {(0, 1, 2), (3, 4, 5)}

    def test_two_groups_is_sse_optimum_by_exhaustion(self):
        t = make_1d_table([1, 2, 3, 101, 102, 103], [1, 2, 3, 4, 5, 6])
        x = normalized_qi(t, minmax_params(t))

        def sse_of(groups):
            return sum(((x[list(g)] - x[list(g)].mean(0)) ** 2).sum() for g in groups)

        best = min(
            sse_of([c, tuple(set(range(6)) - set(c))]) for c in combinations(range(6), 3)
        )
        part = mdav_partition(t, minmax_params(t), 3)
        assert sse_of([tuple(c.members) for c in part.clusters]) == pytest.approx(best)

    def test_residual_absorption(self):
        t = make_ranks_table(7)
        part = mdav_partition(t, minmax_params(t), 3)
        assert sorted(part.sizes()) == [3, 4]

    def test_k_equals_n(self):
        t = make_ranks_table(5)
        part = mdav_partition(t, minmax_params(t), 5)
        assert len(part) == 1 and part.sizes() == [5]

    def test_k_larger_than_n(self):
        t = make_ranks_table(4)
        with pytest.raises(ValueError):
            mdav_partition(t, minmax_params(t), 5)

    def test_size_bounds_and_count(self):
        for seed, n, k in [(1, 53, 4), (2, 80, 7), (3, 41, 2), (4, 60, 20)]:
            t = random_table(n, seed)
            part = mdav_partition(t, minmax_params(t), k)
            sizes = part.sizes()
            assert min(sizes) >= k
            assert max(sizes) <= 2 * k - 1
            assert len(part) == n // k

    def test_deterministic(self):
        t = random_table(64, 9)
        p1 = mdav_partition(t, minmax_params(t), 5)
        p2 = mdav_partition(t, minmax_params(t), 5)
        assert [tuple(c.members) for c in p1.clusters] == [tuple(c.members) for c in p2.clusters]


class TestAggregate:
    def test_singleton_partition_is_identity(self):
        t = random_table(8, 3)
        part = Partition(tuple(Cluster([i]) for i in range(8)), 8)
        anon = aggregate(t, part)
        assert np.array_equal(anon.table.rows, t.rows)

    def test_single_cluster_gives_global_mean(self):
        t = random_table(9, 4)
        anon = aggregate(t, Partition((Cluster(np.arange(9)),), 9))
        qi = anon.table.qi_matrix()
        assert np.allclose(qi, t.qi_matrix().mean(axis=0))

    def test_preserves_column_means(self):
        t = random_table(37, 5)
        part = mdav_partition(t, minmax_params(t), 4)
        anon = aggregate(t, part)
        assert np.allclose(
            anon.table.qi_matrix().mean(axis=0), t.qi_matrix().mean(axis=0), atol=1e-9
        )

    def test_confidential_untouched(self):
        t = random_table(30, 6)
        anon = aggregate(t, mdav_partition(t, minmax_params(t), 3))
        assert np.array_equal(anon.table.confidential_column(), t.confidential_column())

    def test_output_is_k_anonymous_at_min_size(self):
        t = random_table(45, 7)
        part = mdav_partition(t, minmax_params(t), 4)
        anon = aggregate(t, part)
        assert verify_k_anonymity(anon, min(part.sizes())).ok

    def test_ignored_column_passes_through(self):
        specs = SPECS_2QI + (AttributeSpec("note", Role.IGNORED),)
        rng = np.random.default_rng(10)
        t = Table(specs, rng.uniform(0, 1, size=(20, 4)))
        anon = aggregate(t, mdav_partition(t, minmax_params(t), 5))
        assert np.array_equal(anon.table.rows[:, 3], t.rows[:, 3])
