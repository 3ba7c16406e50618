import numpy as np

from qreservoir.rng import MASK64, SplitMix64, derive_seed, mix64


def test_counter_based_random_access():
    # stream values depend only on (seed, position)
    a = SplitMix64(42)
    head = [a.next_u64() for _ in range(5)]
    b = SplitMix64(42)
    assert [b.next_u64() for _ in range(5)] == head


def test_vectorized_matches_scalar():
    a = SplitMix64(123456789)
    scalars = [a.uniform() for _ in range(100)]
    b = SplitMix64(123456789)
    assert np.array_equal(b.uniforms(100), np.array(scalars))


def test_uniform_range_and_spread():
    u = SplitMix64(7).uniforms(10000)
    assert u.min() >= 0.0 and u.max() < 1.0
    assert abs(u.mean() - 0.5) < 0.02


def test_mix64_is_64_bit():
    assert mix64(0) <= MASK64
    assert mix64(MASK64) <= MASK64
    assert mix64(1) != mix64(2)


def test_derive_seed_order_and_arity_sensitive():
    base = 99
    assert derive_seed(base, 1, 2) != derive_seed(base, 2, 1)
    assert derive_seed(base, 1) != derive_seed(base, 1, 0)
    assert derive_seed(base, 5) == derive_seed(base, 5)


def test_spawned_streams_differ():
    root = SplitMix64(0)
    u1 = root.spawn(0).uniforms(50)
    u2 = root.spawn(1).uniforms(50)
    assert not np.array_equal(u1, u2)


def test_permutation_is_permutation():
    for seed in range(20):
        perm = SplitMix64(seed).permutation(17)
        assert sorted(perm) == list(range(17))


def test_sample_sorted_properties():
    for seed in range(50):
        picks = SplitMix64(seed).sample_sorted(9, 4)
        assert len(picks) == 4
        assert len(set(picks)) == 4
        assert list(picks) == sorted(picks)
        assert all(0 <= p < 9 for p in picks)


def test_sample_sorted_uniform_coverage():
    counts = np.zeros(6)
    for seed in range(600):
        for p in SplitMix64(seed).sample_sorted(6, 2):
            counts[p] += 1
    # each site appears in about 1/3 of draws
    assert np.all(counts / 600 > 0.2) and np.all(counts / 600 < 0.47)


def test_normals_moments():
    z = SplitMix64(11).normals(20000)
    assert abs(z.mean()) < 0.03
    assert abs(z.std() - 1.0) < 0.03


def test_normals_odd_count():
    assert len(SplitMix64(3).normals(7)) == 7
