#!/usr/bin/env python3
"""
KiloSwarm - command-line entry point

Subcommands: simulate, sweep, oscillate, sense, estimate, plot.
Exit codes: 0 success, 1 usage or configuration error, 2 runtime error.
"""

import argparse
import sys
from dataclasses import replace
from pathlib import Path
from typing import List, Optional

import pandas as pd

from .charts.estimate_chart import EstimateChart
from .charts.oscillator_chart import OrderChart, RatioChart
from .charts.sensing_chart import AgreementChart, ResponseChart
from .charts.sweep_chart import AcceptabilityChart, CostChart, CoverageChart
from .charts.trajectory_chart import TrajectoryChart
from .core.config import Config
from .core.constants import (
    APP_NAME,
    APP_VERSION,
    BOOTSTRAP_STREAM_KEY,
    OSCILLATOR_STREAM_KEY,
    PLOT_SCHEMAS,
    SENSOR_STREAM_KEY,
    ControllerKind,
    PlotKind,
)
from .core.exceptions import ConfigError, KiloswarmError, SchemaError
from .core.types import Pose
from .models.data_manager import DataManager
from .sim import estimation, harness, oscillators, sensing
from .utils.logger import get_logger
from .utils.rng import derived_rng, random_master_seed

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_RUNTIME = 2

logger = get_logger()


class UsageError(KiloswarmError):
    """Bad command-line usage."""


class ArgumentParser(argparse.ArgumentParser):
    """argparse with usage errors raised (exit code 1) instead of exiting with 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def build_parser() -> ArgumentParser:
    common = ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="Experiment config file (INI)")
    common.add_argument("--seed", type=int, help="Master seed (random and recorded when omitted)")
    common.add_argument("--workers", type=int, help="Worker processes for sweeps")
    common.add_argument("--out-dir", type=Path, help="Output directory")
    common.add_argument("--set", action="append", default=[], metavar="SECTION.KEY=VALUE",
                        help="Override one config value (repeatable)")
    common.add_argument("--verbose", action="store_true", help="Debug output on the console")

    parser = ArgumentParser(prog="kiloswarm",
                            description=f"{APP_NAME} swarm individuality simulator")
    parser.add_argument("--version", action="version", version=f"%(prog)s {APP_VERSION}")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=ArgumentParser)

    simulate = commands.add_parser("simulate", parents=[common], help="Write trajectories")
    simulate.add_argument("--bias", type=float, action="append", help="Heading bias (repeatable)")
    simulate.add_argument("--sigma", type=float, help="Motor noise std")
    simulate.add_argument("--robots", type=int, help="Number of robots on the bias grid")
    simulate.add_argument("--trials", type=int, help="Trials per robot")
    simulate.add_argument("--controller", choices=ControllerKind.ALL)
    simulate.add_argument("--duration", type=float)
    simulate.add_argument("--dt", type=float)

    sweep = commands.add_parser("sweep", parents=[common], help="Monte Carlo bias sweep")
    sweep.add_argument("--p-right", type=float, action="append", dest="p_right",
                       help="Phototaxis right-turn probability (repeatable)")
    sweep.add_argument("--thresholds", type=int, help="Size of the acceptability threshold grid")
    sweep.add_argument("--coverage-images", action="store_true",
                       help="Write one coverage PGM per trial under coverage/")

    commands.add_parser("oscillate", parents=[common], help="Oscillator populations")
    commands.add_parser("sense", parents=[common], help="Sensor sweep and agreement")

    estimate = commands.add_parser("estimate", parents=[common], help="Fit bias models")
    estimate.add_argument("index", type=Path, nargs="?", help="Index CSV (robot_id,trial_id,path)")
    estimate.add_argument("--self-check", action="store_true",
                          help="Fit a synthetic fleet with known biases instead of an index")

    plot = commands.add_parser("plot", parents=[common], help="Render an SVG from CSV output")
    plot.add_argument("kind", choices=sorted(PLOT_SCHEMAS))
    plot.add_argument("inputs", type=Path, nargs="+", help="Input CSV file(s)")
    plot.add_argument("--output", type=Path, help="SVG path (default: <out-dir>/<kind>.svg)")
    return parser


def load_config(args) -> Config:
    """File values, then --set, then dedicated flags; a missing seed is drawn and recorded."""
    config = Config.from_file(args.config)
    config.apply_assignments(args.set)
    flags = {
        "experiment.seed": args.seed,
        "experiment.workers": args.workers,
        "output.out_dir": None if args.out_dir is None else str(args.out_dir),
    }
    if args.command == "simulate":
        flags.update({
            "experiment.biases": None if args.bias is None else tuple(args.bias),
            "robot.sigma_motor": args.sigma,
            "experiment.n_robots": args.robots,
            "experiment.n_mc": args.trials,
            "experiment.controller": args.controller,
            "experiment.duration": args.duration,
            "experiment.dt": args.dt,
        })
    if args.command == "sweep":
        flags.update({
            "output.thresholds": args.thresholds,
            "phototaxis.p_right_values": None if args.p_right is None else tuple(args.p_right),
            "coverage.export": True if args.coverage_images else None,
        })
    for key, value in flags.items():
        if value is not None:
            config.set(key, value)
    if config.get("experiment.seed") is None and args.command != "plot":
        config.set("experiment.seed", random_master_seed())
        logger.info(f"No seed given; using {config.get('experiment.seed')}")
    return config


def setup_environment(config: Config, verbose: bool) -> DataManager:
    """Prepare the output directory and attach the log file."""
    data = DataManager(config.get("output.out_dir"))
    data.ensure_out_dir()
    level = "DEBUG" if verbose else config.get("logging.level")
    logger.configure(data.path("logs"), level)
    return data


def cmd_simulate(args, config: Config) -> None:
    experiment = config.resolve_experiment()
    data = setup_environment(config, args.verbose)
    data.write_manifest(config, "simulate", experiment.master_seed, args.config)

    if config.get("experiment.random_start"):
        starts = harness.shared_initials(experiment)
    else:
        env = config.section("environment")
        starts = [Pose(env["start_x"], env["start_y"], env["start_theta"])] * experiment.n_mc

    index = []
    for robot_id in range(experiment.n_robots):
        for trial_id in range(experiment.n_mc):
            trajectory, _ = harness.simulate_trial(experiment, robot_id, trial_id, starts[trial_id])
            name = f"robot_{robot_id:03d}_trial_{trial_id:03d}.csv"
            data.write_csv(trajectory.to_frame(), "trajectories", name)
            index.append((robot_id, trial_id, f"trajectories/{name}"))
    data.write_csv(pd.DataFrame(index, columns=["robot_id", "trial_id", "path"]), "index.csv")
    logger.info(f"Wrote {len(index)} trajectories to {data.out_dir}")


def _run_and_write(data: DataManager, prefix: List[str], config: Config,
                   experiment: harness.ExperimentConfig, workers: int) -> None:
    if experiment.coverage_enabled:
        image_dir = data.path(*prefix, "coverage") if experiment.coverage.export else None
        results, coverage = harness.run_coverage_sweep(experiment, workers, image_dir)
        data.write_csv(coverage, *prefix, "coverage", "summary.csv")
    else:
        results = harness.run_sweep(experiment, workers)
    data.write_csv(results, *prefix, "results.csv")
    n_boot = config.get("output.n_boot")
    rng = derived_rng(experiment.master_seed, BOOTSTRAP_STREAM_KEY)
    if experiment.controller.kind == ControllerKind.RANDOM_WALK:
        data.write_csv(harness.mean_cost_curve(results, "coverage"), *prefix, "mean_coverage.csv")
        summary = harness.ensemble_distribution(results, "coverage")
        summary.pop("values")
        data.write_summary(summary, *prefix, "ensemble.csv")
        return

    data.write_csv(harness.mean_cost_curve(results), *prefix, "mean_cost.csv")
    thresholds = harness.threshold_grid(results, config.get("output.thresholds"),
                                        config.get("output.delta_acc"))
    data.write_csv(harness.acceptability_curves(results, thresholds), *prefix, "acceptability.csv")
    summary = harness.ensemble_distribution(results)
    summary.pop("values")
    data.write_summary(summary, *prefix, "ensemble.csv")
    data.write_summary(harness.optimum_report(results, n_boot, rng), *prefix, "optimum.csv")
    if experiment.coverage_enabled:
        data.write_csv(harness.mean_cost_curve(results, "coverage"), *prefix, "mean_coverage.csv")


def cmd_sweep(args, config: Config) -> None:
    experiment = config.resolve_experiment()
    p_right_values = config.resolve_p_right_values()
    if experiment.coverage.export and not experiment.coverage_enabled:
        raise ConfigError("coverage images need coverage enabled", section="coverage",
                          key="export")
    workers = config.get("experiment.workers")
    data = setup_environment(config, args.verbose)
    data.write_manifest(config, "sweep", experiment.master_seed, args.config)

    if not p_right_values:
        _run_and_write(data, [], config, experiment, workers)
        return
    for p_right in p_right_values:
        spec = experiment.controller
        variant = replace(experiment, controller=replace(
            spec, phototaxis=replace(spec.phototaxis, p_right=p_right)
        ))
        logger.info(f"P_R = {p_right:g}")
        _run_and_write(data, [f"p_right_{p_right:g}"], config, variant, workers)


def cmd_oscillate(args, config: Config) -> None:
    settings = config.resolve_oscillators()
    seed = config.get("experiment.seed")
    data = setup_environment(config, args.verbose)
    data.write_manifest(config, "oscillate", seed, args.config)

    histories = []
    for repetition in range(settings.repetitions):
        population = oscillators.make_population(
            settings.n, derived_rng(seed, OSCILLATOR_STREAM_KEY, repetition), settings.pulse_rate,
            settings.spread, settings.coupling, settings.topology, settings.synchronized,
        )
        history = oscillators.run_population(population, settings.duration, settings.dt,
                                             record_every=settings.record_every)
        histories.append(history)
        folder = f"rep_{repetition}"
        data.write_csv(history.to_frame(), folder, "history.csv")
        data.write_csv(oscillators.switch_table(history), folder, "switches.csv")
        data.write_csv(oscillators.order_series(history), folder, "order.csv")
    data.write_csv(oscillators.switch_summary(histories), "switch_summary.csv")
    data.write_csv(oscillators.switch_distribution(histories), "switch_distribution.csv")

    if settings.coupling_values:
        base = oscillators.make_population(
            settings.n, derived_rng(seed, OSCILLATOR_STREAM_KEY), settings.pulse_rate,
            settings.spread, 0.0, settings.topology, settings.synchronized,
        )
        table, sweep_histories = oscillators.coupling_sweep(
            base, settings.coupling_values, settings.duration, settings.dt, settings.record_every
        )
        for k, history in zip(settings.coupling_values, sweep_histories):
            data.write_csv(oscillators.order_series(history), "coupling", f"order_K_{k:g}.csv")
        data.write_csv(table, "coupling", "coupling_sweep.csv")
    logger.info(f"Oscillator outputs written to {data.out_dir}")


def cmd_sense(args, config: Config) -> None:
    settings = config.resolve_sensing()
    seed = config.get("experiment.seed")
    data = setup_environment(config, args.verbose)
    data.write_manifest(config, "sense", seed, args.config)

    if settings.homogeneous:
        sensors = [sensing.SensorModel(i, reading_noise=settings.reading_noise)
                   for i in range(settings.n_sensors)]
    else:
        sensors = sensing.sample_sensors(settings.n_sensors, derived_rng(seed, SENSOR_STREAM_KEY),
                                         settings.gain_sd, settings.offset_sd,
                                         settings.reading_noise)
    profile = sensing.StimulusProfile(settings.repetitions, settings.samples_per_rep)
    noise = derived_rng(seed, SENSOR_STREAM_KEY, 1)
    table = sensing.run_sweep(sensors, profile, settings.stimulus_scale, noise)
    period = sensing.trim_table(table, settings.samples_per_rep, settings.period_index)
    thresholds = list(settings.thresholds) or None

    data.write_csv(pd.DataFrame([(s.robot_id, s.gain, s.offset) for s in sensors],
                                columns=["robot_id", "gain", "offset"]), "sensors.csv")
    data.write_csv(table, "responses.csv")
    data.write_csv(period, "period.csv")
    data.write_csv(sensing.median_response(period), "median.csv")
    matrix = sensing.response_matrix(period)
    middle = matrix.columns[len(matrix.columns) // 2]
    data.write_csv(sensing.agreement_curve(matrix[middle].to_numpy(), thresholds),
                   "agreement_mid.csv")
    data.write_csv(sensing.agreement_matrix(period, thresholds or range(0, 1025)),
                   "agreement.csv")
    logger.info(f"Sensing outputs written to {data.out_dir}")


def _self_check(data: DataManager, config: Config) -> None:
    robot = config.section("robot")
    experiment = config.section("experiment")
    table, summary = estimation.self_check(
        experiment["n_robots"], experiment["n_mc"], experiment["seed"],
        duration=experiment["duration"], dt=experiment["dt"],
        sigma_motor=robot["sigma_motor"], delta_max=robot["delta_max"],
        c_v=robot["c_v"], c_omega=robot["c_omega"],
    )
    data.write_csv(table, "self_check.csv")
    data.write_summary(summary, "self_check_summary.csv")


def cmd_estimate(args, config: Config) -> None:
    if args.index is None and not args.self_check:
        raise UsageError("estimate needs an index CSV or --self-check")
    data = setup_environment(config, args.verbose)
    data.write_manifest(config, "estimate", config.get("experiment.seed"), args.config)
    if args.self_check:
        _self_check(data, config)
        if args.index is None:
            return
    records = [
        estimation.TrialRecord(robot_id, trial_id, data.read_trajectory(path))
        for robot_id, trial_id, path in data.read_index(args.index)
    ]
    individual = estimation.fit_individual(records)
    data.write_csv(estimation.estimates_frame(individual), "estimates.csv")
    if len(records) < 2:
        logger.warning("Single trial: ensemble model and comparison skipped")
        return
    ensemble = estimation.fit_ensemble(records)
    comparison = estimation.compare_models(individual, ensemble)
    data.write_summary({"mu": ensemble.mu, "sigma": ensemble.sigma,
                        "n_trials_total": ensemble.n_trials_total}, "ensemble.csv")
    data.write_summary(comparison.to_dict(), "comparison.csv")
    logger.info(
        f"Ensemble mu={ensemble.mu:.6g} sigma={ensemble.sigma:.6g} "
        f"(n={ensemble.n_trials_total}); mean sigma_i={comparison.mean_sigma_i:.6g}"
    )


def _sibling(path: Path, name: str) -> Optional[pd.DataFrame]:
    candidate = path.parent / name
    return pd.read_csv(candidate) if candidate.exists() else None


def cmd_plot(args, config: Config) -> None:
    data = DataManager(config.get("output.out_dir"))
    frames = [data.read_plot_input(path, args.kind) for path in args.inputs]
    first, source = frames[0], args.inputs[0]
    if args.kind == PlotKind.TRAJECTORIES:
        chart = TrajectoryChart(frames, labels=[p.stem for p in args.inputs])
    elif args.kind == PlotKind.ESTIMATES:
        chart = EstimateChart(first)
    elif args.kind == PlotKind.COST:
        chart = CostChart(first, _sibling(source, "mean_cost.csv"), config.get("output.delta_acc"))
    elif args.kind == PlotKind.COVERAGE:
        chart = CoverageChart(first, _sibling(source, "mean_coverage.csv"))
    elif args.kind == PlotKind.ACCEPTABILITY:
        chart = AcceptabilityChart(first)
    elif args.kind == PlotKind.RESPONSE:
        chart = ResponseChart(first)
    elif args.kind == PlotKind.AGREEMENT:
        chart = AgreementChart(first)
    elif args.kind == PlotKind.RATIO:
        chart = RatioChart(first)
    else:
        chart = OrderChart(first)
    target = args.output or data.path(f"{args.kind}.svg")
    Path(target).parent.mkdir(parents=True, exist_ok=True)
    chart.save(target)
    logger.info(f"Wrote {target}")


COMMANDS = {
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "oscillate": cmd_oscillate,
    "sense": cmd_sense,
    "estimate": cmd_estimate,
    "plot": cmd_plot,
}


def main(argv: Optional[List[str]] = None) -> int:
    """Main application entry point."""
    try:
        args = build_parser().parse_args(argv)
        if args.verbose:
            logger.configure(level="DEBUG")
        config = load_config(args)
        COMMANDS[args.command](args, config)
        return EXIT_OK
    except SystemExit as e:
        # --help and --version
        return EXIT_OK if e.code in (None, 0) else EXIT_USAGE
    except (UsageError, ConfigError, SchemaError) as e:
        logger.error(str(e))
        return EXIT_USAGE
    except Exception as e:
        logger.critical(f"{APP_NAME} failed: {e}", exc_info=True)
        return EXIT_RUNTIME
    finally:
        logger.close()


if __name__ == '__main__':
    sys.exit(main())
