import math

from disconn.rng import SplitMix64, substream


def test_streams_are_deterministic():
    a = SplitMix64(12345)
    b = SplitMix64(12345)
    assert [a.next_u64() for _ in range(32)] == [b.next_u64() for _ in range(32)]


def test_substreams_differ_by_key():
    draws = {key: substream(9, key).next_u64() for key in range(64)}
    assert len(set(draws.values())) == 64


def test_substream_argument_order_matters():
    assert substream(1, 2, 3).next_u64() != substream(1, 3, 2).next_u64()


def test_uniform_range():
    rng = SplitMix64(7)
    values = [rng.uniform() for _ in range(10_000)]
    assert all(0.0 <= v < 1.0 for v in values)
    mean = sum(values) / len(values)
    assert abs(mean - 0.5) < 0.02


def test_angle_range():
    rng = SplitMix64(8)
    values = [rng.angle() for _ in range(10_000)]
    assert all(-math.pi < v <= math.pi for v in values)


def test_normal_pair_moments():
    rng = SplitMix64(9)
    values = []
    for _ in range(5_000):
        a, b = rng.normal_pair()
        values.extend((a, b))
    mean = sum(values) / len(values)
    var = sum((v - mean) ** 2 for v in values) / len(values)
    assert abs(mean) < 0.05
    assert abs(var - 1.0) < 0.1
