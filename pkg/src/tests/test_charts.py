import numpy as np
import pandas as pd
import pytest

from kiloswarm.charts.estimate_chart import EstimateChart
from kiloswarm.charts.oscillator_chart import OrderChart, RatioChart
from kiloswarm.charts.sensing_chart import AgreementChart, ResponseChart
from kiloswarm.charts.sweep_chart import AcceptabilityChart, CostChart, CoverageChart
from kiloswarm.charts.trajectory_chart import TrajectoryChart


def sweep_frame():
    rng = np.random.default_rng(0)
    bias = np.repeat([-0.04, 0.0, 0.04], 5)
    return pd.DataFrame({
        "bias": bias,
        "cost": rng.uniform(0.1, 1.0, len(bias)),
        "coverage": rng.uniform(0.0, 0.2, len(bias)),
    })


def trajectory_frame(offset):
    t = np.arange(20) * 0.1
    return pd.DataFrame({"t": t, "x": np.cos(t) + offset, "y": np.sin(t), "theta": t})


CHARTS = {
    "trajectories": lambda: TrajectoryChart([trajectory_frame(0.0), trajectory_frame(1.0)],
                                            labels=["a", "b"]),
    "estimates": lambda: EstimateChart(pd.DataFrame({
        "robot_id": [0, 1, 2], "mu_i": [0.02, -0.05, 0.0], "sigma_i": [0.01, 0.02, 0.0],
        "n_trials": [3, 3, 3],
    })),
    "cost": lambda: CostChart(sweep_frame()),
    "coverage": lambda: CoverageChart(sweep_frame()),
    "acceptability": lambda: AcceptabilityChart(pd.DataFrame({
        "delta_acc": [0.0, 0.5, 1.0], "r_acc": [0.0, 0.04, 0.08], "n_acc": [0, 7, 15],
    })),
    "response": lambda: ResponseChart(pd.DataFrame({
        "robot_id": np.repeat([0, 1], 4), "sample_index": np.tile(np.arange(4), 2),
        "v_value": np.tile(np.linspace(0, 1, 4), 2),
        "reading": [0, 300, 700, 1023, 5, 320, 690, 1010],
    })),
    "agreement": lambda: AgreementChart(pd.DataFrame({
        "threshold": np.arange(0, 1025, 256), "count": [12, 9, 6, 2, 0],
    })),
    "ratio": lambda: RatioChart(pd.DataFrame({
        "t": np.repeat([0.0, 0.1, 0.2], 2), "osc_id": [0, 1] * 3,
        "color": ["red", "red", "red", "blue", "blue", "blue"],
    })),
    "order": lambda: OrderChart(pd.DataFrame({"t": [0.0, 0.1, 0.2], "r": [1.0, 0.8, 0.6]})),
}


@pytest.mark.parametrize("kind", sorted(CHARTS))
def test_chart_saves_deterministic_svg(kind, tmp_path):
    first = CHARTS[kind]().save(tmp_path / "first.svg")
    second = CHARTS[kind]().save(tmp_path / "second.svg")
    content = first.read_bytes()
    assert content.lstrip().startswith(b"<?xml")
    assert b"<svg" in content
    assert content == second.read_bytes()


def test_cost_chart_accepts_a_precomputed_curve(tmp_path):
    curve = pd.DataFrame({"bias": [-0.04, 0.0, 0.04], "mean_cost": [0.6, 0.4, 0.7]})
    path = CostChart(sweep_frame(), curve, delta_acc=0.5).save(tmp_path / "cost.svg")
    assert path.stat().st_size > 0
