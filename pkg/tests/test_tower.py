"""Tests for the layered saturating-counter frequency screen."""
from __future__ import annotations

import random
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pqsketch import TowerFilter


class TestConstruction:
    def test_counter_counts_from_byte_budget(self):
        t = TowerFilter(bytes_per_array=64)
        # 64 bytes = 512 bits: 128 four-bit, 64 eight-bit, 32 sixteen-bit.
        assert [layer[1] for layer in t._layers] == [128, 64, 32]

    def test_memory_accounting(self):
        assert TowerFilter(bytes_per_array=100).memory_bytes == 300
        assert TowerFilter(bytes_per_array=7, widths=(2, 4)).memory_bytes == 14

    def test_infeasible_budget_rejected(self):
        with pytest.raises(ValueError, match="infeasible layout"):
            TowerFilter(bytes_per_array=1)  # no room for one 16-bit counter

    def test_bad_budget_rejected(self):
        for bad in (0, -5, 2.5):
            with pytest.raises(ValueError):
                TowerFilter(bytes_per_array=bad)

    def test_widths_must_strictly_increase(self):
        for bad in ((8, 8, 16), (16, 8, 4), (4, 0)):
            with pytest.raises(ValueError, match="widths"):
                TowerFilter(bytes_per_array=16, widths=bad)


class TestCounting:
    def test_lone_key_counts_exactly(self):
        t = TowerFilter(bytes_per_array=256, seed=3)
        assert t.query(42) == 0
        for i in range(1, 12):
            t.insert(42)
            assert t.query(42) == i

    def test_narrow_layers_saturate_and_drop_out(self):
        # 1 byte per array with widths (2, 3, 4) gives limits 3, 7, 15. At
        # ten inserts the two narrow layers are pinned and must be ignored.
        t = TowerFilter(bytes_per_array=1, widths=(2, 3, 4), seed=0)
        for _ in range(10):
            t.insert(5)
        assert t.query(5) == 10

    def test_full_saturation_reports_top_limit(self):
        t = TowerFilter(bytes_per_array=1, widths=(2, 3, 4), seed=0)
        for _ in range(40):
            t.insert(5)
        assert t.query(5) == 15

    def test_default_widths_saturate_in_order(self):
        t = TowerFilter(bytes_per_array=64, seed=9)
        for _ in range(20):
            t.insert(8)
        assert t.query(8) == 20  # 4-bit layer pinned at 15, wider ones exact
        for _ in range(280):
            t.insert(8)
        assert t.query(8) == 300  # 8-bit layer pinned at 255

    def test_engineered_full_collision(self):
        # At 2 bytes per array (counters 4/2/1) keys 1 and 14 share all
        # three counters, so key 14 inherits every count of key 1.
        t = TowerFilter(bytes_per_array=2, seed=11)
        for _ in range(5):
            t.insert(1)
        assert t.query(14) == 5
        for _ in range(3):
            t.insert(14)
        assert t.query(1) == 8
        assert t.query(14) == 8


class TestOneSidedness:
    def check_workload(self, keys, bytes_per_array, seed):
        t = TowerFilter(bytes_per_array=bytes_per_array, seed=seed)
        truth: Counter[int] = Counter()
        for k in keys:
            t.insert(k)
            truth[k] += 1
        for k, n in truth.items():
            assert t.query(k) >= n

    def test_uniform_workload_never_undercounts(self):
        rng = random.Random(1)
        self.check_workload([rng.randrange(200) for _ in range(10_000)], 128, seed=2)

    def test_skewed_workload_never_undercounts(self):
        rng = random.Random(5)
        population = list(range(500))
        weights = [1.0 / (i + 1) for i in population]
        keys = rng.choices(population, weights=weights, k=10_000)
        self.check_workload(keys, 64, seed=7)

    def test_tiny_filter_never_undercounts(self):
        rng = random.Random(9)
        self.check_workload([rng.randrange(50) for _ in range(2_000)], 8, seed=1)

    @settings(max_examples=40)
    @given(
        keys=st.lists(st.integers(0, 30), min_size=1, max_size=300),
        seed=st.integers(0, 2**32),
    )
    def test_one_sided_property(self, keys, seed):
        t = TowerFilter(bytes_per_array=4, seed=seed)
        truth: Counter[int] = Counter()
        for k in keys:
            t.insert(k)
            truth[k] += 1
        for k, n in truth.items():
            assert t.query(k) >= n

    @given(keys=st.lists(st.integers(0, 20), min_size=1, max_size=200))
    def test_estimates_never_decrease(self, keys):
        t = TowerFilter(bytes_per_array=2, seed=4)
        watched = 3
        last = t.query(watched)
        for k in keys:
            t.insert(k)
            now = t.query(watched)
            assert now >= last
            last = now


class TestDeterminism:
    def test_same_seed_same_estimates(self):
        rng = random.Random(12)
        keys = [rng.randrange(100) for _ in range(5_000)]
        a = TowerFilter(bytes_per_array=32, seed=6)
        b = TowerFilter(bytes_per_array=32, seed=6)
        for k in keys:
            a.insert(k)
            b.insert(k)
        assert all(a.query(k) == b.query(k) for k in range(100))

    def test_different_seeds_place_keys_differently(self):
        from pqsketch.hashing import hash_key

        a = TowerFilter(bytes_per_array=1024, seed=0)
        b = TowerFilter(bytes_per_array=1024, seed=1)

        def placement(t, key):
            return tuple(hash_key(key, seed) % n for seed, n, _, _ in t._layers)

        assert placement(a, 77) != placement(b, 77)

    def test_layers_use_distinct_seeds(self):
        t = TowerFilter(bytes_per_array=16, seed=5)
        seeds = [layer[0] for layer in t._layers]
        assert len(set(seeds)) == len(seeds)
