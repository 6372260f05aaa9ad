import numpy as np

from kiloswarm.utils.rng import (
    DecisionStream,
    MotorNoise,
    derived_rng,
    trial_seed,
    trial_streams,
)


def test_trial_seed_is_stable_and_distinct():
    assert trial_seed(42, 3, 7) == trial_seed(42, 3, 7)
    assert trial_seed(42, 3, 7) != trial_seed(42, 7, 3)
    assert trial_seed(42, 3, 7) != trial_seed(43, 3, 7)
    assert 0 <= trial_seed(2**64 - 1, 0, 0) < 2**64


def test_derived_rng_repeats_per_key():
    a = derived_rng(5, 1).random(4)
    b = derived_rng(5, 1).random(4)
    c = derived_rng(5, 2).random(4)
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, c)


def test_motor_noise_matches_block_draws_across_refills():
    generator = np.random.default_rng(11)
    expected = np.vstack([generator.standard_normal((3, 2)), generator.standard_normal((3, 2))])
    noise = MotorNoise(np.random.default_rng(11), block=3)
    drawn = np.array([noise.draw_pair() for _ in range(6)])
    np.testing.assert_array_equal(drawn, expected)


def test_reflected_streams_swap_motors_and_mirror_decisions():
    plain = trial_streams(9, 1, 2)
    mirror = trial_streams(9, 1, 2, reflected=True)
    for _ in range(5):
        z_r, z_l = plain.motor.draw_pair()
        assert mirror.motor.draw_pair() == (z_l, z_r)
    u = plain.decisions.uniform()
    assert mirror.decisions.uniform() == 1.0 - u
    s = plain.decisions.symmetric(0.5)
    assert mirror.decisions.symmetric(0.5) == -s
    assert plain.decisions.exponential(2.0) == mirror.decisions.exponential(2.0)


def test_bernoulli_extremes():
    stream = DecisionStream(np.random.default_rng(0))
    assert all(stream.bernoulli(1.0) for _ in range(100))
    assert not any(stream.bernoulli(0.0) for _ in range(100))
