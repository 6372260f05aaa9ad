import numpy as np
import pytest

from kiloswarm.core.exceptions import ConfigError, InsufficientDataError
from kiloswarm.sim.sensing import (
    SensorModel,
    StimulusProfile,
    agreement_count,
    agreement_curve,
    agreement_matrix,
    median_response,
    read,
    response_matrix,
    run_sweep,
    sample_sensors,
    trim_period,
    trim_table,
)


@pytest.mark.parametrize("gain, offset, stimulus, expected", [
    (1.0, 0.0, 0.0, 0),
    (1.0, 0.0, 2000.0, 1023),
    (1.1, -5.0, 500.0, 545),
    (1.0, -50.0, 10.0, 0),
    (1.0, 0.5, 2.0, 2),
    (1.0, 0.5, 3.0, 4),
])
def test_read_examples(gain, offset, stimulus, expected):
    assert read(SensorModel(0, gain, offset), stimulus) == expected


def test_read_is_monotone_and_quantized():
    sensor = SensorModel(0, gain=1.07, offset=-3.2)
    stimulus = np.linspace(0.0, 1200.0, 500)
    readings = read(sensor, stimulus)
    assert readings.dtype.kind == "i"
    assert readings.min() >= 0 and readings.max() <= 1023
    assert np.all(np.diff(readings) >= 0)


def test_invalid_sensor_and_profile():
    with pytest.raises(ConfigError):
        SensorModel(0, gain=0.0)
    with pytest.raises(ConfigError):
        SensorModel(0, reading_noise=-1.0)
    with pytest.raises(ConfigError):
        StimulusProfile(repetitions=0)


def test_stimulus_is_a_saw_tooth():
    v = StimulusProfile(repetitions=3, samples_per_rep=5).v_values
    np.testing.assert_allclose(v, [0, 0.25, 0.5, 0.75, 1.0] * 3)


def test_identical_sensors_give_identical_rows():
    sensors = [SensorModel(i, 1.02, 4.0) for i in range(3)]
    matrix = response_matrix(run_sweep(sensors, StimulusProfile(2, 50))).to_numpy()
    np.testing.assert_array_equal(matrix[0], matrix[1])
    np.testing.assert_array_equal(matrix[0], matrix[2])


def test_sweep_is_deterministic_and_complete():
    sensors = sample_sensors(4, np.random.default_rng(7))
    first = run_sweep(sensors, StimulusProfile())
    second = run_sweep(sensors, StimulusProfile())
    assert len(first) == 4 * 400
    assert list(first.columns) == ["robot_id", "sample_index", "v_value", "reading"]
    assert first.equals(second)


def test_trim_period_examples():
    series = np.arange(400)
    np.testing.assert_array_equal(trim_period(series, 100, 1), np.arange(100, 200))
    np.testing.assert_array_equal(trim_period(series, 400, 0), series)
    with pytest.raises(InsufficientDataError):
        trim_period(series, 100, 4)
    with pytest.raises(InsufficientDataError):
        trim_period(np.arange(50), 100)


def test_trimmed_period_matches_the_slice():
    sensors = sample_sensors(3, np.random.default_rng(2))
    table = run_sweep(sensors, StimulusProfile(4, 100))
    trimmed = trim_table(table, 100, 2)
    assert len(trimmed) == 300
    assert trimmed["sample_index"].tolist() == list(range(100)) * 3
    full = response_matrix(table).to_numpy()
    np.testing.assert_array_equal(response_matrix(trimmed).to_numpy(), full[:, 200:300])
    # every repetition is identical without reading noise
    np.testing.assert_array_equal(full[:, :100], full[:, 200:300])


def test_median_lies_between_min_and_max():
    table = run_sweep(sample_sensors(12, np.random.default_rng(3)), StimulusProfile(1, 100))
    summary = median_response(table)
    assert len(summary) == 100
    assert np.all(summary["min"] <= summary["median"])
    assert np.all(summary["median"] <= summary["max"])


def test_agreement_count_bounds():
    readings = [0, 10, 512, 1023]
    assert agreement_count(readings, 0) == 4
    assert agreement_count(readings, 1024) == 0
    assert agreement_count(readings, 512) == 2
    with pytest.raises(ConfigError):
        agreement_count(readings, 1025)


def test_agreement_curve_matches_brute_force():
    sensors = sample_sensors(12, np.random.default_rng(4))
    table = run_sweep(sensors, StimulusProfile(1, 101))
    mid = response_matrix(table).to_numpy()[:, 50]
    curve = agreement_curve(mid)
    assert len(curve) == 1025
    brute = [sum(1 for r in mid if r >= t) for t in range(1025)]
    assert curve["count"].tolist() == brute
    assert np.all(np.diff(curve["count"].to_numpy()) <= 0)


def test_agreement_curve_accepts_a_generator():
    readings = np.array([10, 20, 30])
    curve = agreement_curve(readings, (t for t in (0, 15, 25, 40)))
    assert curve["threshold"].tolist() == [0, 15, 25, 40]
    assert curve["count"].tolist() == [3, 2, 1, 0]


def test_agreement_matrix_matches_brute_force():
    table = run_sweep(sample_sensors(12, np.random.default_rng(5)), StimulusProfile(1, 20))
    thresholds = [0, 100, 400, 700, 1024]
    matrix = agreement_matrix(table, thresholds)
    readings = response_matrix(table).to_numpy()
    for sample_index, threshold, count in matrix.to_numpy():
        assert count == int(np.sum(readings[:, sample_index] >= threshold))


def test_homogeneous_fleet_is_unanimous():
    sensors = [SensorModel(i) for i in range(12)]
    table = run_sweep(sensors, StimulusProfile(1, 50))
    matrix = agreement_matrix(table, range(0, 1025, 7))
    assert set(matrix["count"].unique()) <= {0, 12}


def test_reading_noise_needs_a_generator():
    sensor = SensorModel(0, reading_noise=5.0)
    assert read(sensor, 300.0) == 300
    noisy = read(sensor, np.full(200, 300.0), np.random.default_rng(0))
    assert noisy.std() > 0


def test_sweep_rejects_empty_fleet():
    with pytest.raises(InsufficientDataError):
        run_sweep([], StimulusProfile())
