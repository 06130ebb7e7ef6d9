import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from synthaudit import Dataset, brute_nearest, build_index, nearest


def points_1d(values):
    return Dataset(np.array(values, dtype=np.float64)[:, None])


class TestBasics:
    def test_build_small(self):
        idx = build_index(points_1d([0.0, 1.0, 2.0]))
        assert idx.source_size == 3
        assert idx.dim == 1

    def test_nearest_two_of_four(self):
        idx = build_index(points_1d([0.0, 1.0, 2.0, 10.0]))
        hits = nearest(idx, [0.1], 2)
        assert [h.index for h in hits] == [0, 1]

    def test_exact_match_at_distance_zero(self):
        idx = build_index(points_1d([0.0, 1.0, 2.0]))
        hit = nearest(idx, [1.0], 1)[0]
        assert hit.index == 1
        assert hit.distance == 0.0

    def test_exclusion_returns_next_closest(self):
        idx = build_index(points_1d([0.0, 1.0, 2.0]))
        hit = nearest(idx, [1.0], 1, exclude={1})[0]
        assert hit.index in (0, 2)
        assert hit.distance == 1.0
        # tie at distance 1.0 resolves to the lower index
        assert hit.index == 0

    def test_tie_broken_by_ascending_index(self):
        assert brute_nearest(points_1d([0.0, 1.0, 2.0]), [1.5], 1)[0].index == 1
        idx = build_index(points_1d([0.0, 1.0, 2.0]))
        assert nearest(idx, [1.5], 1)[0].index == 1

    def test_count_zero(self):
        ds = points_1d([0.0, 1.0, 2.0])
        assert brute_nearest(ds, [1.5], 0) == []
        assert nearest(build_index(ds), [1.5], 0) == []

    def test_dimension_mismatch(self):
        idx = build_index(points_1d([0.0, 1.0]))
        with pytest.raises(ValueError, match="dimension mismatch"):
            nearest(idx, [0.0, 1.0], 1)

    def test_count_too_large(self):
        ds = points_1d([0.0, 1.0, 2.0])
        idx = build_index(ds)
        with pytest.raises(ValueError, match="exceeds"):
            nearest(idx, [0.0], 4)
        with pytest.raises(ValueError, match="exceeds"):
            nearest(idx, [0.0], 3, exclude={0})
        with pytest.raises(ValueError, match="exceeds"):
            brute_nearest(ds, [0.0], 4)


def assert_same_hits(got, expected):
    assert [(h.index, h.distance) for h in got] == [(h.index, h.distance) for h in expected]


class TestAgainstBruteForce:
    @pytest.mark.parametrize("seed", range(8))
    def test_random_instances(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(5, 400))
        d = int(rng.integers(1, 9))
        data = Dataset(rng.normal(size=(n, d)))
        idx = build_index(data)
        for _ in range(15):
            q = rng.normal(size=d)
            count = int(rng.integers(0, min(n, 8) + 1))
            assert_same_hits(nearest(idx, q, count), brute_nearest(data, q, count))

    @pytest.mark.parametrize("seed", range(4))
    def test_random_instances_with_exclusion(self, seed):
        rng = np.random.default_rng(100 + seed)
        n = int(rng.integers(10, 200))
        d = int(rng.integers(1, 5))
        data = Dataset(rng.normal(size=(n, d)))
        idx = build_index(data)
        for _ in range(10):
            q = rng.normal(size=d)
            excl = set(int(i) for i in rng.choice(n, size=int(rng.integers(1, 5)), replace=False))
            count = int(rng.integers(1, min(n - len(excl), 6) + 1))
            got = nearest(idx, q, count, exclude=excl)
            assert_same_hits(got, brute_nearest(data, q, count, exclude=excl))
            assert not {h.index for h in got} & excl

    def test_duplicate_heavy_data(self):
        rng = np.random.default_rng(7)
        base = rng.integers(0, 4, size=(60, 2)).astype(np.float64)
        data = Dataset(base)
        idx = build_index(data)
        for _ in range(20):
            q = rng.integers(0, 4, size=2).astype(np.float64)
            assert_same_hits(nearest(idx, q, 5), brute_nearest(data, q, 5))

    @settings(max_examples=60, deadline=None)
    @given(st.data())
    def test_hypothesis_instances(self, data):
        n = data.draw(st.integers(min_value=2, max_value=60))
        d = data.draw(st.integers(min_value=1, max_value=4))
        grid = st.integers(min_value=-8, max_value=8).map(float)
        pts = data.draw(st.lists(st.lists(grid, min_size=d, max_size=d), min_size=n, max_size=n))
        q = data.draw(st.lists(grid, min_size=d, max_size=d))
        count = data.draw(st.integers(min_value=0, max_value=n))
        ds = Dataset(np.array(pts))
        assert_same_hits(nearest(build_index(ds), q, count), brute_nearest(ds, q, count))


class TestProperties:
    def test_distances_non_decreasing(self):
        rng = np.random.default_rng(3)
        data = Dataset(rng.normal(size=(300, 4)))
        idx = build_index(data)
        for _ in range(10):
            hits = nearest(idx, rng.normal(size=4), 12)
            dists = [h.distance for h in hits]
            assert dists == sorted(dists)

    def test_excluding_best_promotes_second(self):
        rng = np.random.default_rng(4)
        data = Dataset(rng.normal(size=(200, 3)))
        idx = build_index(data)
        for _ in range(10):
            q = rng.normal(size=3)
            first, second = nearest(idx, q, 2)
            assert nearest(idx, q, 1, exclude={first.index})[0] == second

    def test_deterministic_rebuild(self):
        rng = np.random.default_rng(5)
        pts = rng.normal(size=(150, 3))
        q = rng.normal(size=3)
        a = nearest(build_index(Dataset(pts)), q, 7)
        b = nearest(build_index(Dataset(pts)), q, 7)
        assert a == b
