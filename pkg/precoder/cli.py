"""
Command-line front end.

Purpose: Load channel / sweep / simulation documents, run the solvers and write JSON or CSV results
Key Decisions: config.yml supplies tool defaults, command-line flags override it.
               Channel JSON numbers are parsed as exact decimals: noise_free keeps them as
               rationals, every other command converts them to binary floats.
               Tuples are 1-based in every document read or written here.
               Sweep points run on a process pool and are merged back in input order.
               Exit codes: 0 success (NotApplicable included), 2 config error, 3 computation error,
               4 when the exhaustive search proves no disjoint system exists.
Limitations: No plotting; CSV and JSON only
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from concurrent.futures.process import BrokenProcessPool
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from decimal import Decimal
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd
import yaml
from loguru import logger

from precoder.channel_model import (
    AssociatedSymbol,
    JointPmf,
    ValidatedChannel,
    channel_from_document,
    noise_power_for_snr,
)
from precoder.constants import (
    DEFAULT_BLOCK_SIZE,
    DEFAULT_CAPACITY_MAX_ITERS,
    DEFAULT_CAPACITY_TOL,
    DEFAULT_GRID_POINTS,
    DEFAULT_MODULO_DELTA,
    DEFAULT_MODULO_GRID,
    DEFAULT_SEED,
    DEFAULT_TRIALS,
    EXHAUSTIVE_MAX_M,
    EXHAUSTIVE_MAX_Q,
    EXIT_COMPUTATION_ERROR,
    EXIT_CONFIG_ERROR,
    EXIT_NONE_EXISTS,
    EXIT_OK,
    MDAP_NODE_BUDGET,
    NOISE_FREE_SEARCH_BUDGET,
    SOLVERS,
)
from precoder.entropy_engine import (
    QuadratureSettings,
    capacity_estimate,
    g_function,
    inflection_points,
    interference_free_rate,
)
from precoder.exceptions import ComputationError, ConfigError, NotArithmeticProgression, PrecoderError
from precoder.noise_free import (
    NoneExists,
    construct_disjoint,
    distinct_output_rate,
    exists_disjoint_exhaustive,
    output_multisets,
    verify_disjoint,
)
from precoder.outcomes import NotApplicable
from precoder.precoding import ModuloPrecoder, TuplePrecoder, compare_modulo_vs_identity
from precoder.simulator import SimConfig, estimate_ser
from precoder.uniform_optimizer import Solution, pattern_rates, pattern_solution, solve_uniform
from precoder.utilities.report import print_channel_report, print_result_report, print_sweep_report
from precoder.utilities.timing import StageTimer

CONFIG_FILE = "config.yml"
CSV_COLUMNS = ["snr_db", "noise_power", "solver", "rate_bits", "objective_bits", "support_size", "integral"]
UNIFORM_SOLVERS = ("lp", "hungarian", "mdap", "diag", "antidiag")


# ===== CONFIGURATION =====


@dataclass(frozen=True)
class ToolConfig:
    log_level: str = "INFO"
    threads: int = 0
    quadrature: QuadratureSettings = field(default_factory=QuadratureSettings)
    grid_points: int = DEFAULT_GRID_POINTS
    capacity_tol: float = DEFAULT_CAPACITY_TOL
    capacity_max_iters: int = DEFAULT_CAPACITY_MAX_ITERS
    exhaustive_max_m: int = EXHAUSTIVE_MAX_M
    exhaustive_max_q: int = EXHAUSTIVE_MAX_Q
    node_budget: int = MDAP_NODE_BUDGET
    search_budget: int = NOISE_FREE_SEARCH_BUDGET
    trials: int = DEFAULT_TRIALS
    seed: int = DEFAULT_SEED
    block_size: int = DEFAULT_BLOCK_SIZE
    modulo_delta: float = DEFAULT_MODULO_DELTA
    modulo_grid: int = DEFAULT_MODULO_GRID
    exhaustive: bool = False
    reproducible: bool = False

    @property
    def workers(self) -> int:
        return self.threads if self.threads > 0 else (os.cpu_count() or 1)

    def use_exhaustive(self, ch: ValidatedChannel) -> bool:
        return self.exhaustive or (ch.M <= self.exhaustive_max_m and ch.Q <= self.exhaustive_max_q)


def load_tool_config(path: str | Path | None) -> ToolConfig:
    """Read config.yml; a missing default file means built-in defaults, a missing explicit one is an error."""
    config_path = Path(path) if path else Path(CONFIG_FILE)
    if not config_path.is_file():
        if path:
            raise ConfigError(f"config file {config_path} not found")
        return ToolConfig()
    try:
        with open(config_path) as config_file:
            config: dict = yaml.safe_load(config_file) or {}
    except yaml.YAMLError as e:
        raise ConfigError(f"cannot parse {config_path}: {e}") from e

    quad = config.get("Quadrature", {})
    capacity = config.get("Capacity", {})
    optimizer = config.get("Optimizer", {})
    simulation = config.get("Simulation", {})
    modulo = config.get("Modulo", {})
    defaults = ToolConfig()
    try:
        return ToolConfig(
            log_level=str(config.get("LogLevel", defaults.log_level)),
            threads=int(config.get("Threads", defaults.threads)),
            quadrature=QuadratureSettings(
                abs_tol=float(quad.get("AbsTol", defaults.quadrature.abs_tol)),
                truncation_sigmas=float(quad.get("TruncationSigmas", defaults.quadrature.truncation_sigmas)),
                max_subdivisions=int(quad.get("MaxSubdivisions", defaults.quadrature.max_subdivisions)),
            ),
            grid_points=int(capacity.get("GridPoints", defaults.grid_points)),
            capacity_tol=float(capacity.get("Tolerance", defaults.capacity_tol)),
            capacity_max_iters=int(capacity.get("MaxIterations", defaults.capacity_max_iters)),
            exhaustive_max_m=int(optimizer.get("ExhaustiveMaxM", defaults.exhaustive_max_m)),
            exhaustive_max_q=int(optimizer.get("ExhaustiveMaxQ", defaults.exhaustive_max_q)),
            node_budget=int(float(optimizer.get("NodeBudget", defaults.node_budget))),
            search_budget=int(float(config.get("NoiseFree", {}).get("SearchBudget", defaults.search_budget))),
            trials=int(simulation.get("Trials", defaults.trials)),
            seed=int(simulation.get("Seed", defaults.seed)),
            block_size=int(simulation.get("BlockSize", defaults.block_size)),
            modulo_delta=float(modulo.get("Delta", defaults.modulo_delta)),
            modulo_grid=int(modulo.get("GridSize", defaults.modulo_grid)),
        )
    except (TypeError, ValueError, AttributeError) as e:
        raise ConfigError(f"invalid value in {config_path}: {e}") from e


def _apply_flags(cfg: ToolConfig, args: argparse.Namespace) -> ToolConfig:
    updates: dict[str, Any] = {"exhaustive": args.exhaustive, "reproducible": args.reproducible}
    if args.threads is not None:
        updates["threads"] = args.threads
    if args.seed is not None:
        updates["seed"] = args.seed
    if args.grid is not None:
        updates["grid_points"] = args.grid
    if args.log_level is not None:
        updates["log_level"] = args.log_level
    return replace(cfg, **updates)


def load_document(path: str | Path) -> dict[str, Any]:
    try:
        with open(path) as f:
            doc = json.load(f, parse_float=Decimal)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"cannot read {path}: {e}") from e
    if not isinstance(doc, dict):
        raise ConfigError(f"{path} must hold a JSON object")
    return doc


# ===== RESULT DOCUMENTS =====


def _json_default(value: Any) -> Any:
    if isinstance(value, (np.floating, Decimal)):
        return float(value)
    if isinstance(value, np.integer):
        return int(value)
    raise TypeError(f"cannot serialize {type(value).__name__}")


def _p_nonzeros(p: JointPmf) -> list[dict[str, Any]]:
    return [{"tuple": t.one_based(), "p": p.mass(t)} for t in p.support()]


def _solution_document(solution: Solution | NotApplicable, requested: str) -> dict[str, Any]:
    if isinstance(solution, NotApplicable):
        return {"solver": requested, "status": solution.status, "reason": solution.reason}
    tuples = solution.tuples
    return {
        "solver": solution.solver,
        "status": "ok",
        "objective_bits": solution.objective_bits,
        "rate_bits": solution.rate_bits,
        "support": solution.support_size,
        "integral": solution.is_integral,
        "tuples": [t.one_based() for t in tuples] if tuples is not None else None,
        "p_nonzeros": _p_nonzeros(solution.p),
    }


def _finish(doc: dict[str, Any], cfg: ToolConfig, timer: StageTimer) -> dict[str, Any]:
    if not cfg.reproducible:
        doc["timings"] = timer.as_dict()
        doc["created"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
    return doc


def _write_json(doc: dict[str, Any], out: str | None) -> None:
    text = json.dumps(doc, indent=2, default=_json_default) + "\n"
    if out:
        Path(out).write_text(text)
        logger.info(f"Wrote {out}")
    else:
        sys.stdout.write(text)


def _report(args: argparse.Namespace) -> bool:
    return bool(args.out) and not args.quiet


# ===== SOLVE =====


def _capacity_document(ch: ValidatedChannel, cfg: ToolConfig) -> dict[str, Any]:
    result = capacity_estimate(
        ch, cfg.quadrature, grid_points=cfg.grid_points, tol=cfg.capacity_tol, max_iters=cfg.capacity_max_iters
    )
    return {
        "solver": "capacity",
        "status": "ok",
        "rate_bits": result.rate_bits,
        "ba_rate_bits": result.ba_rate_bits,
        "upper_bits": result.upper_bits,
        "iterations": result.iterations,
        "support_size": result.p.support_size,
        "p_nonzeros": _p_nonzeros(result.p),
    }


def _modulo_precoder(ch: ValidatedChannel, delta: float, grid_size: int) -> ModuloPrecoder:
    return ModuloPrecoder.mmse(delta, ch.noise_power, grid_size)


def solve_document(ch: ValidatedChannel, solver: str, cfg: ToolConfig) -> dict[str, Any]:
    """Result document of one solver on one channel."""
    if solver in UNIFORM_SOLVERS:
        solution = solve_uniform(
            ch, solver, cfg.quadrature, budget=cfg.node_budget, exhaustive=cfg.use_exhaustive(ch)
        )
        doc = _solution_document(solution, solver)
        if isinstance(solution, NotApplicable):
            logger.info(f"{solver}: {solution.reason}")
            if solver in ("diag", "antidiag") and ch.Q == 2:
                doc["pattern_rates_bits"] = pattern_rates(ch, cfg.quadrature)
        return doc
    if solver == "capacity":
        return _capacity_document(ch, cfg)
    if solver == "modulo":
        mp = _modulo_precoder(ch, cfg.modulo_delta, cfg.modulo_grid)
        rate_modulo, rate_identity = compare_modulo_vs_identity(mp, ch, q=cfg.quadrature)
        return {
            "solver": "modulo",
            "status": "ok",
            "alpha": mp.alpha,
            "delta": mp.delta,
            "grid_size": mp.grid_size,
            "rate_bits": rate_modulo,
            "rate_identity_bits": rate_identity,
        }
    if solver == "awgn":
        rate_bits = interference_free_rate(ch.x, ch.noise_power, cfg.quadrature)
        return {"solver": "awgn", "status": "ok", "rate_bits": rate_bits}
    raise ConfigError(f"unknown solver {solver!r}; choose from {', '.join(SOLVERS)}")


def cmd_solve(args: argparse.Namespace, cfg: ToolConfig) -> int:
    timer = StageTimer(enabled=not cfg.reproducible)
    with timer.stage("load"):
        ch = channel_from_document(load_document(args.channel))
    if _report(args):
        print_channel_report(ch)
    with timer.stage("solve"):
        doc = solve_document(ch, args.solver, cfg)
    doc = _finish(doc, cfg, timer)
    _write_json(doc, args.out)
    if _report(args):
        print_result_report(f"SOLVE ({args.solver})", doc, timer)
    return EXIT_OK


def cmd_capacity(args: argparse.Namespace, cfg: ToolConfig) -> int:
    timer = StageTimer(enabled=not cfg.reproducible)
    ch = channel_from_document(load_document(args.channel))
    with timer.stage("capacity"):
        doc = _capacity_document(ch, cfg)
    doc = _finish(doc, cfg, timer)
    _write_json(doc, args.out)
    if _report(args):
        print_result_report("CAPACITY", doc, timer)
    return EXIT_OK


# ===== SWEEP =====


@dataclass(frozen=True)
class SweepSpec:
    snr_db: tuple[float, ...] | None
    noise_power: tuple[float, ...] | None
    solvers: tuple[str, ...]
    modulo_delta: float
    modulo_grid: int

    def points(self, ch: ValidatedChannel) -> list[tuple[float, float]]:
        """(snr_db, noise_power) per sweep point, in document order."""
        if self.snr_db is not None:
            return [(snr, noise_power_for_snr(ch.signal_power, snr)) for snr in self.snr_db]
        assert self.noise_power is not None
        return [(10.0 * math.log10(ch.signal_power / p_n), p_n) for p_n in self.noise_power]


def parse_sweep(doc: dict[str, Any], cfg: ToolConfig) -> SweepSpec:
    has_snr, has_noise = "snr_db" in doc, "noise_power" in doc
    if has_snr == has_noise:
        raise ConfigError("sweep document needs exactly one of snr_db / noise_power")
    values = tuple(float(v) for v in doc["snr_db" if has_snr else "noise_power"])
    if not values:
        raise ConfigError("sweep list is empty")
    if has_noise and any(not v > 0 for v in values):
        raise ConfigError("sweep noise powers must be positive")
    solvers = doc.get("solvers") or ([doc["solver"]] if "solver" in doc else [])
    if not solvers:
        raise ConfigError("sweep document names no solver")
    unknown = [s for s in solvers if s not in SOLVERS]
    if unknown:
        raise ConfigError(f"unknown sweep solvers {unknown}; choose from {', '.join(SOLVERS)}")
    modulo = doc.get("modulo", {})
    return SweepSpec(
        snr_db=values if has_snr else None,
        noise_power=None if has_snr else values,
        solvers=tuple(solvers),
        modulo_delta=float(modulo.get("delta", cfg.modulo_delta)),
        modulo_grid=int(modulo.get("grid_size", cfg.modulo_grid)),
    )


@dataclass(frozen=True)
class SweepTask:
    channel: ValidatedChannel
    solver: str
    snr_db: float
    modulo_delta: float
    modulo_grid: int
    cfg: ToolConfig


def sweep_point(task: SweepTask) -> dict[str, Any]:
    """One CSV row; diag / antidiag rows are the fixed patterns, not the checked closed forms."""
    ch, cfg = task.channel, task.cfg
    row: dict[str, Any] = {
        "snr_db": task.snr_db,
        "noise_power": ch.noise_power,
        "solver": task.solver,
        "rate_bits": math.nan,
        "objective_bits": math.nan,
        "support_size": None,
        "integral": None,
    }
    if task.solver in ("diag", "antidiag"):
        solution = pattern_solution(ch, task.solver, cfg.quadrature)
    elif task.solver in UNIFORM_SOLVERS:
        solution = solve_uniform(
            ch, task.solver, cfg.quadrature, budget=cfg.node_budget, exhaustive=cfg.use_exhaustive(ch)
        )
    elif task.solver == "capacity":
        result = capacity_estimate(ch, cfg.quadrature, cfg.grid_points, cfg.capacity_tol, cfg.capacity_max_iters)
        row.update(rate_bits=result.rate_bits, support_size=result.p.support_size)
        return row
    elif task.solver == "modulo":
        mp = _modulo_precoder(ch, task.modulo_delta, task.modulo_grid)
        row["rate_bits"] = compare_modulo_vs_identity(mp, ch, q=cfg.quadrature)[0]
        return row
    else:
        row["rate_bits"] = interference_free_rate(ch.x, ch.noise_power, cfg.quadrature)
        return row
    if isinstance(solution, Solution):
        row.update(
            rate_bits=solution.rate_bits,
            objective_bits=solution.objective_bits,
            support_size=solution.support_size,
            integral=solution.is_integral,
        )
    return row


def run_sweep(ch: ValidatedChannel, spec: SweepSpec, cfg: ToolConfig) -> pd.DataFrame:
    tasks = [
        SweepTask(ch.with_noise_power(p_n), solver, snr, spec.modulo_delta, spec.modulo_grid, cfg)
        for snr, p_n in spec.points(ch)
        for solver in spec.solvers
    ]
    workers = min(cfg.workers, len(tasks))
    logger.info(f"Sweeping {len(tasks)} points on {workers} worker(s)")
    if workers <= 1:
        rows = [sweep_point(t) for t in tasks]
    else:
        try:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                rows = list(pool.map(sweep_point, tasks))
        except BrokenProcessPool as e:
            raise ComputationError(f"sweep worker died: {e}") from e
    df = pd.DataFrame(rows, columns=CSV_COLUMNS)
    return df.sort_values("snr_db", kind="stable").reset_index(drop=True)


def cmd_sweep(args: argparse.Namespace, cfg: ToolConfig) -> int:
    ch = channel_from_document(load_document(args.channel))
    spec = parse_sweep(load_document(args.sweep), cfg)
    df = run_sweep(ch, spec, cfg)
    if args.out:
        df.to_csv(args.out, index=False)
        logger.info(f"Wrote {args.out}")
    else:
        df.to_csv(sys.stdout, index=False)
    if _report(args):
        print_sweep_report(df.to_dict("records"))
    return EXIT_OK


# ===== G CURVE =====


def gcurve_frame(ch: ValidatedChannel, u_min: float, u_max: float, samples: int, cfg: ToolConfig) -> pd.DataFrame:
    if ch.Q not in (2, 3):
        raise ConfigError(f"g curves are produced for Q in {{2, 3}}, channel has Q={ch.Q}")
    if samples < 2 or not u_min < u_max:
        raise ConfigError("g curve needs u_min < u_max and at least 2 samples")
    axis = np.linspace(u_min, u_max, samples)
    if ch.Q == 2:
        return pd.DataFrame({"u1": axis, "g_bits": [g_function([u], ch, cfg.quadrature) for u in axis]})
    u1, u2 = np.meshgrid(axis, axis, indexing="ij")
    g = [g_function([a, b], ch, cfg.quadrature) for a, b in zip(u1.ravel(), u2.ravel())]
    return pd.DataFrame({"u1": u1.ravel(), "u2": u2.ravel(), "g_bits": g})


def cmd_gcurve(args: argparse.Namespace, cfg: ToolConfig) -> int:
    ch = channel_from_document(load_document(args.channel))
    ch.require_noise()
    reach = (ch.x[-1] - ch.x[0]) + (ch.s[-1] - ch.s[0]) + 4.0 * ch.sigma
    u_min = args.u_min if args.u_min is not None else -reach
    u_max = args.u_max if args.u_max is not None else reach
    df = gcurve_frame(ch, u_min, u_max, args.samples, cfg)
    header = ""
    if ch.Q == 2:
        points = inflection_points(ch)
        header = f"# alpha_1={points.alpha_1:.9f}\n# alpha_2={points.alpha_2:.9f}\n# u_0={points.u_0:.9f}\n"
    if args.out:
        with open(args.out, "w") as f:
            f.write(header)
            df.to_csv(f, index=False)
        logger.info(f"Wrote {args.out}")
    else:
        sys.stdout.write(header)
        df.to_csv(sys.stdout, index=False)
    return EXIT_OK


# ===== NOISE-FREE =====


def cmd_noisefree(args: argparse.Namespace, cfg: ToolConfig) -> int:
    doc = load_document(args.channel)
    try:
        x, s = doc["x"], doc["s"]
    except KeyError as e:
        raise ConfigError(f"channel document is missing {e}") from e
    timer = StageTimer(enabled=not cfg.reproducible)

    fast_path = distinct_output_rate(x, s)
    result: dict[str, Any] = {
        "distinct_output_rate_bits": None if isinstance(fast_path, NotApplicable) else fast_path,
    }
    with timer.stage("search"):
        try:
            tuples = construct_disjoint(x, s)
            result["method"] = "construction"
        except NotArithmeticProgression:
            if not cfg.exhaustive:
                raise
            logger.info("Input alphabet is not an arithmetic progression; searching exhaustively")
            found = exists_disjoint_exhaustive(x, s, cfg.search_budget)
            result["method"] = "exhaustive"
            result["nodes"] = found.nodes
            if isinstance(found, NoneExists):
                result["status"] = found.status
                _write_json(_finish(result, cfg, timer), args.out)
                logger.warning(f"No disjoint multi-set system exists ({found.nodes} nodes examined)")
                return EXIT_NONE_EXISTS
            tuples = found.tuples

    multisets = output_multisets(tuples, x, s)
    result.update(
        status="ok",
        tuples=[t.one_based() for t in tuples],
        multisets=[[str(v) for v in ms.values] for ms in multisets],
        disjoint=verify_disjoint(multisets),
    )
    _write_json(_finish(result, cfg, timer), args.out)
    if _report(args):
        print_result_report("NOISE-FREE", result, timer)
    return EXIT_OK


# ===== SIMULATE =====


def parse_sim(doc: dict[str, Any], cfg: ToolConfig, seed_flag: int | None = None) -> SimConfig:
    """--seed beats the document seed, which beats config.yml."""
    interference = doc.get("interference", "iid")
    if not isinstance(interference, str):
        interference = tuple(int(q) - 1 for q in interference)
    return SimConfig(
        trials=int(doc.get("trials", cfg.trials)),
        seed=seed_flag if seed_flag is not None else int(doc.get("seed", cfg.seed)),
        interference=interference,
        noise=str(doc.get("noise", "gaussian")),
        block_size=cfg.block_size,
    )


def load_precoder(source: str, ch: ValidatedChannel, cfg: ToolConfig) -> TuplePrecoder:
    """A solver name, "noisefree", or a JSON file holding 1-based "tuples"."""
    if source in UNIFORM_SOLVERS:
        solution = solve_uniform(ch, source, cfg.quadrature, budget=cfg.node_budget, exhaustive=cfg.use_exhaustive(ch))
        if isinstance(solution, NotApplicable) or solution.tuples is None:
            raise ConfigError(f"solver {source} did not produce M tuples for this channel")
        return TuplePrecoder(tuple(solution.tuples), ch)
    if source == "noisefree":
        return TuplePrecoder(tuple(construct_disjoint(ch.x_exact, ch.s_exact)), ch)
    tuples = load_document(source).get("tuples")
    if not tuples:
        raise ConfigError(f"{source} holds no tuples")
    return TuplePrecoder(tuple(AssociatedSymbol(tuple(int(i) - 1 for i in t)) for t in tuples), ch)


def cmd_simulate(args: argparse.Namespace, cfg: ToolConfig) -> int:
    timer = StageTimer(enabled=not cfg.reproducible)
    ch = channel_from_document(load_document(args.channel))
    sim = parse_sim(load_document(args.sim) if args.sim else {}, cfg, args.seed)
    with timer.stage("precoder"):
        tp = load_precoder(args.precoder, ch, cfg)
    with timer.stage("simulate"):
        estimate = estimate_ser(tp, sim)
    doc = _finish(
        {
            "trials": estimate.trials,
            "seed": sim.seed,
            "ser": estimate.ser,
            "ci95": estimate.ci95,
            "zero_error": estimate.zero_error,
            "state_frequencies": list(estimate.state_frequencies),
        },
        cfg,
        timer,
    )
    _write_json(doc, args.out)
    if _report(args):
        print_result_report("SIMULATION", doc, timer)
    return EXIT_OK


# ===== ENTRY POINT =====


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="tool defaults (default: ./config.yml when present)")
    common.add_argument("--out", help="result file (default: stdout)")
    common.add_argument("--threads", type=int, help="sweep workers (0 = logical cores)")
    common.add_argument("--seed", type=int, help="simulation seed")
    common.add_argument("--reproducible", action="store_true", help="omit timestamps and timings")
    common.add_argument("--exhaustive", action="store_true", help="exhaustive search / assignment")
    common.add_argument("--grid", type=int, help="capacity output grid points")
    common.add_argument("--log-level", help="loguru level for stderr")
    common.add_argument("--quiet", action="store_true", help="no console summaries")

    parser = argparse.ArgumentParser(
        prog="precoder", description="Precoding for channels with causally known interference"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", parents=[common], help="run one solver on a channel")
    solve.add_argument("channel")
    solve.add_argument("--solver", required=True, choices=SOLVERS)
    solve.set_defaults(handler=cmd_solve)

    sweep = sub.add_parser("sweep", parents=[common], help="rate versus SNR curves as CSV")
    sweep.add_argument("channel")
    sweep.add_argument("sweep")
    sweep.set_defaults(handler=cmd_sweep)

    gcurve = sub.add_parser("gcurve", parents=[common], help="sample the g function as CSV")
    gcurve.add_argument("channel")
    gcurve.add_argument("--u-min", type=float)
    gcurve.add_argument("--u-max", type=float)
    gcurve.add_argument("--samples", type=int, default=201)
    gcurve.set_defaults(handler=cmd_gcurve)

    noisefree = sub.add_parser("noisefree", parents=[common], help="disjoint multi-set construction")
    noisefree.add_argument("channel")
    noisefree.set_defaults(handler=cmd_noisefree)

    simulate = sub.add_parser("simulate", parents=[common], help="Monte Carlo symbol error rate")
    simulate.add_argument("channel")
    simulate.add_argument("--precoder", required=True, help="solver name, 'noisefree', or a tuples JSON file")
    simulate.add_argument("--sim", help="simulation document")
    simulate.set_defaults(handler=cmd_simulate)

    capacity = sub.add_parser("capacity", parents=[common], help="Blahut-Arimoto capacity estimate")
    capacity.add_argument("channel")
    capacity.set_defaults(handler=cmd_capacity)
    return parser


def configure_logging(level: str) -> None:
    logger.remove()
    logger.add(sys.stderr, level=level.upper(), format="<level>{level: <8}</level> {name}:{function} - {message}")


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _apply_flags(load_tool_config(args.config), args)
        configure_logging(cfg.log_level)
        return args.handler(args, cfg)
    except ConfigError as e:
        logger.error(f"Configuration error: {e}")
        return EXIT_CONFIG_ERROR
    except PrecoderError as e:
        logger.error(f"Computation error: {e}")
        return EXIT_COMPUTATION_ERROR
