import numpy as np
import pytest

from tcmicro import (
    Cluster,
    SynthConfig,
    TableEmd,
    emd_cluster_vs_table,
    generate_cluster,
    kfirst_partition,
    max_emd_bound,
    mdav_partition,
    minmax_params,
    normalized_qi,
    run_kfirst_algorithm,
    synth_generate,
    verify_k_anonymity,
    verify_t_closeness,
)
from tcmicro.kfirst import _SwapEmd
from util import make_1d_table, make_ranks_table


def small_table(n=120, seed=6):
    return synth_generate(SynthConfig(n=n, qi_count=2, target_correlation=0.52, seed=seed))


class TestGenerateCluster:
    def test_slack_tau_returns_k_nearest(self):
        t = make_ranks_table(10)
        c = generate_cluster(0, np.arange(10), t, 3, max_emd_bound(10, 3) + 0.5)
        assert tuple(c.members) == (0, 1, 2)

    def test_small_pool_returned_whole(self):
        t = make_ranks_table(9)
        pool = np.arange(4, 9)  # 2k - 1 = 5 candidates for k = 3
        c = generate_cluster(5, pool, t, 3, 0.01)
        assert tuple(c.members) == (4, 5, 6, 7, 8)

    def test_swap_trace_on_six_ranks(self):
        # seed rank 1, k=2, tau=0.2: EMD path 0.4 -> 0.2667 -> 0.1667, ending
        # at the {rank2, rank4} cluster
        t = make_ranks_table(6)
        c = generate_cluster(0, np.arange(6), t, 2, 0.2)
        assert tuple(c.members) == (1, 3)
        assert emd_cluster_vs_table(t, c) == pytest.approx(1 / 6, abs=1e-12)

    def test_candidate_pool_not_mutated(self):
        t = make_ranks_table(12)
        pool = np.arange(12)
        before = pool.copy()
        generate_cluster(0, pool, t, 2, 0.05)
        assert np.array_equal(pool, before)

    def test_swaps_never_increase_emd(self):
        t = small_table(60, 8)
        pool = np.arange(60)
        for seed_rec, tau in [(0, 0.05), (17, 0.02), (41, 0.1)]:
            refined = generate_cluster(seed_rec, pool, t, 4, tau)
            baseline = generate_cluster(seed_rec, pool, t, 4, 10.0)  # no swaps
            assert emd_cluster_vs_table(t, refined) <= emd_cluster_vs_table(t, baseline) + 1e-12

    def test_seed_must_be_candidate(self):
        t = make_ranks_table(8)
        with pytest.raises(ValueError, match="seed"):
            generate_cluster(7, np.arange(5), t, 2, 0.1)

    def test_empty_candidates(self):
        t = make_ranks_table(8)
        with pytest.raises(ValueError, match="empty"):
            generate_cluster(0, np.array([], dtype=int), t, 2, 0.1)

    def test_incremental_emd_matches_recomputation(self):
        # duplicate confidential values included, so several records share a
        # support rank
        rng = np.random.default_rng(55)
        t = make_1d_table(rng.uniform(0, 1, 40), rng.integers(0, 9, 40))
        ctx = TableEmd(t)
        members = rng.choice(40, size=6, replace=False)
        state = _SwapEmd(ctx, members)
        outside = [i for i in range(40) if i not in members]
        for candidate in outside:
            pos = state.best_swap(int(ctx.ranks[candidate]))
            if pos >= 0:
                state.apply_swap(pos, candidate, int(ctx.ranks[candidate]))
            fresh = ctx.cluster_emd(np.array(state.members))
            assert state.emd == pytest.approx(fresh, abs=1e-12)

    def test_matches_naive_reference(self):
        # direct transcription of the swap rules, recomputing every EMD
        def naive(seed, candidates, table, k, tau):
            x = normalized_qi(table, minmax_params(table))
            cands = list(candidates)
            if len(cands) < 2 * k:
                return sorted(cands)
            others = [c for c in cands if c != seed]
            others.sort(key=lambda j: (((x[j] - x[seed]) ** 2).sum(), j))
            members = [seed] + others[: k - 1]
            cur = emd_cluster_vs_table(table, Cluster(members))
            for y in others[k - 1 :]:
                if cur <= tau:
                    break
                best_pos, best = -1, cur
                for pos in range(k):
                    trial = list(members)
                    trial[pos] = y
                    e = emd_cluster_vs_table(table, Cluster(trial))
                    if e < best:
                        best_pos, best = pos, e
                if best_pos >= 0:
                    members[best_pos] = y
                    cur = best
            return sorted(members)

        rng = np.random.default_rng(77)
        for trial in range(8):
            n = int(rng.integers(12, 30))
            t = make_1d_table(rng.uniform(0, 100, n), rng.uniform(0, 100, n))
            k = int(rng.integers(2, 5))
            tau = float(rng.uniform(0.02, 0.3))
            seed_rec = int(rng.integers(0, n))
            got = generate_cluster(seed_rec, np.arange(n), t, k, tau)
            assert list(got.members) == naive(seed_rec, range(n), t, k, tau)


class TestKfirstPartition:
    def test_huge_tau_equals_mdav(self):
        t = small_table()
        got = kfirst_partition(t, 3, 1.0)
        want = mdav_partition(t, minmax_params(t), 3)
        assert [tuple(c.members) for c in got.clusters] == [
            tuple(c.members) for c in want.clusters
        ]

    def test_cluster_sizes_in_band(self):
        for seed, n, k in [(1, 97, 3), (2, 64, 2), (3, 55, 5)]:
            t = small_table(n, seed)
            part = kfirst_partition(t, k, 0.15)
            sizes = part.sizes()
            assert min(sizes) >= k
            assert max(sizes) <= 2 * k - 1

    def test_min_size_stays_near_k_at_moderate_tau(self, mcd_table):
        part = kfirst_partition(mcd_table, 2, 0.17)
        assert min(part.sizes()) == 2


class TestRunKfirst:
    def test_output_always_verifies(self):
        t = small_table(130, 14)
        for k, tau in [(2, 0.25), (2, 0.05), (5, 0.1)]:
            anon, part, report = run_kfirst_algorithm(t, k, tau)
            assert verify_k_anonymity(anon, k).ok
            assert verify_t_closeness(t, part, tau).ok
            assert report.k_min_actual >= k

    def test_vacuous_tau_no_merging(self):
        # 0.5 is a hard ceiling on any EMD under the ordered distance
        t = small_table(100, 18)
        _, part, _ = run_kfirst_algorithm(t, 2, 0.6)
        assert max(part.sizes()) <= 3

    def test_tight_tau_forces_merging(self):
        t = small_table(100, 18)
        _, loose, _ = run_kfirst_algorithm(t, 2, 0.25)
        _, tight, _ = run_kfirst_algorithm(t, 2, 0.01)
        assert max(tight.sizes()) > max(loose.sizes())
