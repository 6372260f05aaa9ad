import math

import numpy as np
import pandas as pd
import pytest

from kiloswarm.core.constants import RESULT_COLUMNS, ControllerKind
from kiloswarm.core.exceptions import ConfigError, InsufficientDataError
from kiloswarm.core.types import Trajectory
from kiloswarm.sim.controllers import ControllerSpec, PhototaxisParams
from kiloswarm.sim.harness import (
    ExperimentConfig,
    acceptability,
    acceptability_curves,
    bias_cell_widths,
    bias_grid,
    compare_bias_groups,
    cost,
    coverage_image_name,
    ensemble_distribution,
    mean_cost_curve,
    mirrored_config,
    optimum_report,
    run_coverage_sweep,
    run_sweep,
    run_trial,
    shared_initials,
    threshold_grid,
)
from kiloswarm.sim.kinematics import mirror_trajectory


def toy_results(costs_by_bias):
    rows = []
    for robot_id, (bias, costs) in enumerate(costs_by_bias):
        for trial_id, c in enumerate(costs):
            rows.append((robot_id, bias, trial_id, c))
    return pd.DataFrame(rows, columns=["robot_id", "bias", "trial_id", "cost"])


@pytest.fixture
def toy():
    return toy_results([(-0.04, [0.5, 1.0]), (0.0, [0.2, 0.4]), (0.04, [0.9, 1.1])])


def phototaxis_config(**kwargs):
    p_right = kwargs.pop("p_right", 0.5)
    spec = ControllerSpec(ControllerKind.PHOTOTAXIS, phototaxis=PhototaxisParams(p_right=p_right))
    return ExperimentConfig(controller=spec, **kwargs)


def test_bias_grid():
    assert bias_grid(-0.04, 0.04, 5) == pytest.approx((-0.04, -0.02, 0.0, 0.02, 0.04))
    assert bias_grid(-0.04, 0.02, 1) == pytest.approx((-0.01,))
    with pytest.raises(ConfigError):
        bias_grid(0.0, 1.0, 0)


def test_experiment_config_validation():
    with pytest.raises(ConfigError):
        ExperimentConfig(biases=())
    with pytest.raises(ConfigError):
        ExperimentConfig(biases=(0.0,), n_mc=0)
    with pytest.raises(ConfigError):
        ExperimentConfig(biases=(0.05,))
    with pytest.raises(ConfigError):
        ExperimentConfig(biases=(0.0,), duration=0.05, dt=0.1)
    config = ExperimentConfig(biases=(0.0, 0.01), n_mc=3)
    assert (config.n_robots, config.n_trials) == (2, 6)
    assert config.robot_params(1).delta == 0.01


def test_cost_is_mean_distance_over_final_window():
    n = 150
    x = np.concatenate([np.zeros(50), np.full(100, 3.0)])
    y = np.concatenate([np.zeros(50), np.full(100, 4.0)])
    trajectory = Trajectory(0.1, x, y, np.zeros(n))
    assert cost(trajectory, (0.0, 0.0)) == pytest.approx(5.0)
    assert cost(trajectory, (3.0, 4.0)) == pytest.approx(0.0)
    with pytest.raises(InsufficientDataError):
        cost(Trajectory(0.1, np.zeros(99), np.zeros(99)), (0.0, 0.0))


def test_cell_widths_are_clipped_voronoi_cells():
    np.testing.assert_allclose(bias_cell_widths([0.04, -0.04, 0.0, 0.0]), [0.02, 0.04, 0.02])
    np.testing.assert_allclose(bias_cell_widths([0.01]), [0.0])


def test_acceptability_on_toy_costs(toy):
    point = acceptability(toy, 0.75)
    assert point.n_acc == 3
    assert point.r_acc == pytest.approx(0.06)
    top = acceptability(toy, float(toy["cost"].max()))
    assert top.n_acc == 6
    assert top.r_acc == pytest.approx(0.08)
    assert acceptability(toy, 0.0).n_acc == 0
    with pytest.raises(ConfigError):
        acceptability(toy, -0.1)


def test_acceptability_curves_are_monotone(toy):
    grid = threshold_grid(toy, 100)
    assert 0.75 in grid
    assert len(grid) == 100
    assert grid[-1] == pytest.approx(1.1)
    curves = acceptability_curves(toy, grid)
    assert list(curves.columns) == ["delta_acc", "r_acc", "n_acc"]
    assert np.all(np.diff(curves["r_acc"]) >= 0)
    assert np.all(np.diff(curves["n_acc"]) >= 0)
    with pytest.raises(ConfigError):
        acceptability_curves(toy, [0.5, 0.2])


def test_threshold_grid_has_exactly_n_points():
    costs = toy_results([(0.0, [0.2, 1.0])])
    grid = threshold_grid(costs, 5, include=0.5)
    assert grid.tolist() == [0.0, 0.25, 0.5, 0.75, 1.0]
    grid = threshold_grid(costs, 4, include=0.5)
    assert len(grid) == 4
    assert 0.5 in grid
    assert np.all(np.diff(grid) > 0)
    assert (grid[0], grid[-1]) == (0.0, 1.0)
    near_zero = threshold_grid(costs, 4, include=0.01)
    assert near_zero.tolist() == pytest.approx([0.0, 0.01, 2 / 3, 1.0])
    with pytest.raises(ConfigError):
        threshold_grid(costs, 2)


def test_mean_cost_curve(toy):
    curve = mean_cost_curve(toy)
    assert list(curve.columns) == ["bias", "mean_cost"]
    np.testing.assert_allclose(curve["mean_cost"], [0.75, 0.3, 1.0])
    with pytest.raises(InsufficientDataError):
        mean_cost_curve(toy.iloc[0:0])


def test_ensemble_quantiles_use_linear_interpolation():
    summary = ensemble_distribution(pd.DataFrame({"cost": [4.0, 1.0, 3.0, 2.0, math.nan]}))
    assert (summary["q25"], summary["median"], summary["q75"]) == pytest.approx((1.75, 2.5, 3.25))
    assert (summary["min"], summary["max"], summary["mean"]) == pytest.approx((1.0, 4.0, 2.5))
    assert len(summary["values"]) == 4
    with pytest.raises(InsufficientDataError):
        ensemble_distribution(pd.DataFrame({"cost": [math.nan]}))


def test_bias_group_comparison():
    rng = np.random.default_rng(0)
    results = toy_results([(-0.02, list(1.0 + 0.05 * rng.standard_normal(40))),
                           (0.02, list(0.5 + 0.05 * rng.standard_normal(40)))])
    comparison = compare_bias_groups(results, "cost", results["bias"] < 0, results["bias"] > 0,
                                     n_boot=500, rng=np.random.default_rng(1))
    assert comparison.difference == pytest.approx(0.5, abs=0.05)
    assert comparison.ci_low <= comparison.difference <= comparison.ci_high
    assert comparison.excludes_zero
    with pytest.raises(InsufficientDataError):
        compare_bias_groups(results, "cost", results["bias"] > 1, results["bias"] < 0)


def test_optimum_report_finds_separated_minimum():
    rng = np.random.default_rng(2)
    results = toy_results([
        (-0.02, list(0.6 + 0.01 * rng.standard_normal(30))),
        (0.0, list(0.5 + 0.01 * rng.standard_normal(30))),
        (0.02, list(0.1 + 0.01 * rng.standard_normal(30))),
    ])
    report = optimum_report(results, n_boot=300, rng=np.random.default_rng(3))
    assert report["best_bias"] == pytest.approx(0.02)
    assert report["zero_bias"] == 0.0
    assert report["best_ci_high"] < report["zero_ci_low"]
    assert report["separated"]


def test_shared_initials_are_reproducible_and_inside_the_arena():
    config = ExperimentConfig(biases=(0.0,), n_mc=20, master_seed=4)
    first = shared_initials(config)
    assert first == shared_initials(config)
    assert len(first) == 20
    for pose in first:
        assert -1.0 <= pose.x <= 1.0 and -1.0 <= pose.y <= 1.0
        assert -math.pi < pose.theta <= math.pi
    mirrored = shared_initials(mirrored_config(config))
    for a, b in zip(first, mirrored):
        assert (b.x, b.y) == (a.x, -a.y)
        assert b.theta == pytest.approx(-a.theta) or abs(a.theta) == pytest.approx(math.pi)


def test_mirrored_config_exchanges_left_and_right():
    config = phototaxis_config(biases=(-0.01, 0.03), p_right=0.2)
    mirrored = mirrored_config(config)
    assert mirrored.biases == (0.01, -0.03)
    assert mirrored.controller.phototaxis.p_right == pytest.approx(0.8)
    assert mirrored.mirror
    assert not mirrored_config(mirrored).mirror


def test_mirror_symmetry_of_random_configs():
    rng = np.random.default_rng(9)
    for seed in range(5):
        config = phototaxis_config(
            biases=tuple(rng.uniform(-0.04, 0.04, 2)),
            n_mc=2,
            duration=30.0,
            p_right=float(rng.uniform(0.0, 1.0)),
            master_seed=seed,
        )
        mirrored = mirrored_config(config)
        initials = shared_initials(config)
        mirrored_initials = shared_initials(mirrored)
        for robot_id in range(config.n_robots):
            for trial_id in range(config.n_mc):
                result, trajectory = run_trial(config, robot_id, trial_id, initials[trial_id])
                twin, twin_trajectory = run_trial(mirrored, robot_id, trial_id,
                                                  mirrored_initials[trial_id])
                expected = mirror_trajectory(trajectory)
                np.testing.assert_allclose(twin_trajectory.x, expected.x, rtol=0, atol=1e-9)
                np.testing.assert_allclose(twin_trajectory.y, expected.y, rtol=0, atol=1e-9)
                assert twin.cost == pytest.approx(result.cost, abs=1e-9)
                assert twin.bias == -result.bias


def test_sweep_table_layout_and_order():
    config = phototaxis_config(biases=(-0.02, 0.0, 0.02), n_mc=2, duration=15.0, master_seed=1)
    results = run_sweep(config)
    assert list(results.columns) == RESULT_COLUMNS
    assert len(results) == 6
    assert results["robot_id"].tolist() == [0, 0, 1, 1, 2, 2]
    assert results["trial_id"].tolist() == [0, 1] * 3
    assert results["cost"].notna().all()
    assert results["coverage"].isna().all()


def test_sweep_does_not_depend_on_worker_count():
    config = phototaxis_config(biases=(-0.03, 0.0, 0.03), n_mc=2, duration=12.0, master_seed=8)
    pd.testing.assert_frame_equal(run_sweep(config, workers=1), run_sweep(config, workers=2))
    with pytest.raises(ConfigError):
        run_sweep(config, workers=0)


def test_random_walk_sweep_reports_coverage_not_cost():
    spec = ControllerSpec(ControllerKind.RANDOM_WALK)
    config = ExperimentConfig(biases=(0.0, 0.04), n_mc=1, duration=20.0, controller=spec,
                              master_seed=3)
    assert config.coverage_enabled
    results = run_sweep(config)
    assert results["cost"].isna().all()
    assert ((results["coverage"] > 0) & (results["coverage"] < 1)).all()
    assert not results["stopped"].any()


def test_coverage_sweep_tables_and_images(tmp_path):
    spec = ControllerSpec(ControllerKind.RANDOM_WALK)
    config = ExperimentConfig(biases=(0.0, 0.04), n_mc=2, duration=10.0, controller=spec,
                              master_seed=5)
    results, coverage = run_coverage_sweep(config, workers=2, image_dir=tmp_path)
    pd.testing.assert_frame_equal(results, run_sweep(config))
    assert list(coverage.columns) == ["robot_id", "trial_id", "cells_total", "cells_visited",
                                      "fraction"]
    assert coverage[["robot_id", "trial_id"]].values.tolist() == [[0, 0], [0, 1], [1, 0], [1, 1]]
    assert coverage["fraction"].tolist() == pytest.approx(results["coverage"].tolist())
    assert (coverage["cells_visited"] / coverage["cells_total"]).tolist() == \
        pytest.approx(coverage["fraction"].tolist())
    image = tmp_path / coverage_image_name(1, 0)
    assert image.name == "robot_001_trial_000.pgm"
    assert image.read_bytes().startswith(b"P5")
    assert len(list(tmp_path.glob("*.pgm"))) == 4

    with pytest.raises(ConfigError):
        run_coverage_sweep(phototaxis_config(biases=(0.0,), duration=5.0))
