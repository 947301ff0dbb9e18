import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import naive_hcluster
from polarsteer.clustering import (
    Dendrogram,
    cut,
    hcluster,
    parameter_clusters,
    spatial_clusters,
)


def partition(labels):
    return {tuple(np.flatnonzero(labels == lbl)) for lbl in np.unique(labels)}


class TestHcluster:
    def test_two_points(self):
        dend = hcluster(np.array([[0.0], [3.0]]))
        assert dend.n_leaves == 2
        assert dend.merges == [(0, 1, 3.0)]

    def test_identical_points_merge_at_zero(self):
        dend = hcluster(np.zeros((4, 2)))
        assert all(h == 0.0 for _, _, h in dend.merges)
        # ties resolve toward the smallest ids first
        assert dend.merges[0][:2] == (0, 1)

    def test_two_well_separated_pairs(self):
        points = np.array([[0.0], [1.0], [10.0], [11.0]])
        for linkage in ("average", "single", "complete"):
            dend = hcluster(points, linkage)
            labels = cut(dend, 2)
            assert partition(labels) == {(0, 1), (2, 3)}
            assert labels[0] == 0  # label order by smallest leaf

    def test_average_linkage_heights_by_hand(self):
        # 1-D points 0, 1, 5: merge (0,1) at 1, then average of |0-5|,|1-5| = 4.5.
        dend = hcluster(np.array([[0.0], [1.0], [5.0]]), "average")
        assert dend.merges[0] == (0, 1, 1.0)
        assert dend.merges[1][2] == pytest.approx(4.5)

    def test_single_and_complete_heights_by_hand(self):
        points = np.array([[0.0], [1.0], [5.0]])
        assert hcluster(points, "single").merges[1][2] == pytest.approx(4.0)
        assert hcluster(points, "complete").merges[1][2] == pytest.approx(5.0)

    @pytest.mark.parametrize("linkage", ["average", "single", "complete"])
    def test_matches_naive_oracle(self, linkage):
        rng = np.random.default_rng(hash(linkage) % (1 << 31))
        for trial in range(12):
            n = int(rng.integers(3, 33))
            points = rng.normal(size=(n, int(rng.integers(1, 4))))
            got = hcluster(points, linkage).merges
            want = naive_hcluster(points, linkage)
            for (ga, gb, gh), (wa, wb, wh) in zip(got, want):
                assert (ga, gb) == (wa, wb)
                assert gh == pytest.approx(wh, abs=1e-9)

    def test_single_linkage_heights_monotone(self):
        rng = np.random.default_rng(1)
        heights = [h for _, _, h in hcluster(rng.normal(size=(40, 3)), "single").merges]
        assert all(b >= a - 1e-12 for a, b in zip(heights, heights[1:]))

    def test_relabeling_invariance(self):
        # Permuting point order permutes leaf ids but not the partition.
        rng = np.random.default_rng(2)
        points = rng.normal(size=(20, 2))
        perm = rng.permutation(20)
        base = cut(hcluster(points), 4)
        permuted = cut(hcluster(points[perm]), 4)
        mapped = np.empty(20, dtype=int)
        mapped[perm] = permuted
        assert partition(mapped) == partition(base)

    def test_rejects_bad_input(self):
        with pytest.raises(ValueError):
            hcluster(np.zeros((1, 2)))
        with pytest.raises(ValueError):
            hcluster(np.zeros((3, 2)), "ward")


class TestCut:
    def test_k_extremes(self):
        rng = np.random.default_rng(3)
        dend = hcluster(rng.normal(size=(15, 2)))
        assert np.array_equal(cut(dend, 1), np.zeros(15, dtype=int))
        assert np.array_equal(cut(dend, 15), np.arange(15))

    def test_refinement_splits_one_cluster(self):
        rng = np.random.default_rng(4)
        dend = hcluster(rng.normal(size=(25, 3)))
        for k in range(1, 25):
            coarse = partition(cut(dend, k))
            fine = partition(cut(dend, k + 1))
            removed = coarse - fine
            added = fine - coarse
            assert len(removed) == 1 and len(added) == 2
            (old,) = removed
            assert set(old) == set(added.pop()) | set(added.pop())

    def test_out_of_range(self):
        dend = hcluster(np.array([[0.0], [1.0]]))
        with pytest.raises(ValueError):
            cut(dend, 0)
        with pytest.raises(ValueError):
            cut(dend, 3)

    @given(st.integers(min_value=0, max_value=2**31), st.integers(min_value=2, max_value=12))
    @settings(max_examples=25, deadline=None)
    def test_labels_are_contiguous_and_ordered(self, seed, k):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(k, 20))
        labels = cut(hcluster(rng.normal(size=(n, 2))), k)
        assert set(labels) == set(range(k))
        firsts = [int(np.flatnonzero(labels == lbl)[0]) for lbl in range(k)]
        assert firsts == sorted(firsts)


class TestDendrogram:
    def test_to_dict_structure(self):
        dend = hcluster(np.array([[0.0], [1.0], [5.0]]))
        tree = dend.to_dict()
        assert tree["id"] == 4
        assert {c["id"] for c in tree["children"]} == {2, 3}

    def test_leaves_under(self):
        dend = hcluster(np.array([[0.0], [1.0], [5.0]]))
        below = dend.leaves_under()
        assert below[3] == [0, 1]
        assert below[4] == [0, 1, 2]

    def test_merge_count_enforced(self):
        with pytest.raises(ValueError):
            Dendrogram(3, [(0, 1, 0.5)])


class TestSpatialClusters:
    def test_step_profile_splits_at_the_step(self):
        profile = np.zeros(400)
        profile[100:200] = 50.0
        labels = cut(spatial_clusters(profile), 2)
        assert partition(labels) == {
            tuple(range(100)) + tuple(range(200, 400)),
            tuple(range(100, 200)),
        }

    def test_uncertainty_only_weights(self):
        profile = np.linspace(0, 100, 400)
        std = np.zeros(400)
        std[50:60] = 9.0
        labels = cut(spatial_clusters(profile, std, weights=(0.0, 1.0)), 2)
        assert partition(labels) == {
            tuple(i for i in range(400) if not 50 <= i < 60),
            tuple(range(50, 60)),
        }

    def test_constant_profile_all_merge_at_zero(self):
        dend = spatial_clusters(np.full(400, 7.0))
        assert all(h == 0.0 for _, _, h in dend.merges)

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            spatial_clusters(np.zeros(400), np.zeros(399))


class TestParameterClusters:
    def test_tree_has_34_merges(self):
        sens = np.random.default_rng(5).uniform(0, 1, (400, 35))
        dend = parameter_clusters(sens)
        assert dend.n_leaves == 35 and len(dend.merges) == 34

    def test_duplicate_columns_merge_first(self):
        rng = np.random.default_rng(6)
        sens = rng.uniform(0.1, 1, (400, 35))
        sens[:, 20] = sens[:, 3]
        dend = parameter_clusters(sens)
        assert dend.merges[0] == (3, 20, 0.0)

    def test_scale_invariant_tree(self):
        # Global max normalization: scaling the whole map rescales heights only.
        sens = np.random.default_rng(7).uniform(0, 1, (400, 35))
        a = parameter_clusters(sens)
        b = parameter_clusters(sens * 123.0)
        assert [(m[0], m[1]) for m in a.merges] == [(m[0], m[1]) for m in b.merges]
        for (_, _, ha), (_, _, hb) in zip(a.merges, b.merges):
            assert ha == pytest.approx(hb, abs=1e-12)

    def test_all_zero_rejected(self):
        with pytest.raises(ValueError):
            parameter_clusters(np.zeros((400, 35)))
