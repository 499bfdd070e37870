"""Experiment orchestration: scenario presets, config files, evaluation
runs, hyperparameter sweeps and metrics persistence.

Every run is identified by (config, seed) and reproduces byte-identical
CSV output. Scenario presets:

* ``table1`` - 28 homogeneous servers, 5 customers, 99.9% requirement.
* ``table3`` - two 14-server reliability groups, 10 customers, 99.955%
  requirement, five-year evaluation horizon.
* ``custom`` - everything supplied explicitly.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import statistics
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence

from . import agents, core, sim
from .agents import A2cConfig, PpoConfig
from .core import ConfigurationError, GroupParams
from .env import EnvConfig, PlacementEnv
from .nn import Mlp
from .rng import STREAM_ACTIONS, STREAM_BASELINE, STREAM_INFRA, RngStream

RL_AGENTS = ("ppo2", "a2c")
BASELINE_AGENTS = ("greedy", "random")

METRICS_COLUMNS = [
    "run_id",
    "seed",
    "scenario",
    "agent",
    "acceptance_rate",
    "mean_energy_per_sfc",
    "requests",
    "accepted",
    "rejected",
    "cumulative_reward",
]

CURVE_COLUMNS = [
    "step",
    "cumulative_reward",
    "episode_reward_mean",
    "entropy",
    "policy_loss",
    "value_loss",
]


@dataclass
class ExperimentConfig:
    """Full description of one experiment: infrastructure, workload,
    reward weights, agent and run bookkeeping."""

    scenario: str = "table1"
    topology: Optional[str] = None
    server_groups: list[GroupParams] = field(default_factory=list)
    server_names: Optional[list[str]] = None
    vm_max: int = 4
    max_retries: int = 3
    n_customers: int = 5
    theta: float = 0.999
    base_lambda: float = 0.04
    base_mu: float = 1000.0
    vnf_mttf: float = 2880.0
    vnf_mttr: float = 0.17
    availability_weight: float = 1000.0
    energy_weight: float = 0.005
    catalog: list[core.VnfType] = field(default_factory=core.default_catalog)
    agent: str = "greedy"
    a2c: A2cConfig = field(default_factory=A2cConfig)
    ppo: PpoConfig = field(default_factory=PpoConfig)
    training_steps: int = 87600
    episode_hours: float = 8760.0
    eval_horizon_hours: float = 8760.0
    repetitions: int = 30
    seed: int = 0
    log_interval: int = 1000

    def validate(self) -> "ExperimentConfig":
        if self.agent not in RL_AGENTS + BASELINE_AGENTS:
            raise ConfigurationError(f"unknown agent {self.agent!r}")
        if not self.server_groups:
            raise ConfigurationError("no server groups configured")
        if not 0.0 < self.theta < 1.0:
            raise ConfigurationError(f"theta must lie in (0, 1), got {self.theta}")
        if self.base_lambda <= 0 or self.base_mu <= 0:
            raise ConfigurationError("arrival rate and lifetime must be positive")
        if self.vnf_mttf <= 0 or self.vnf_mttr <= 0:
            raise ConfigurationError("VNF MTTF/MTTR must be positive")
        if self.repetitions < 1:
            raise ConfigurationError("repetitions must be >= 1")
        if self.vm_max < 1 or self.max_retries < 1:
            raise ConfigurationError("vm_max and max_retries must be >= 1")
        if self.episode_hours <= 0 or self.eval_horizon_hours <= 0:
            raise ConfigurationError("horizons must be positive")
        if self.training_steps < 1:
            raise ConfigurationError("training_steps must be >= 1")
        return self

    # -- derived views ---------------------------------------------------

    @property
    def n_servers(self) -> int:
        return sum(g.count for g in self.server_groups)

    def env_config(self, episode_hours: Optional[float] = None) -> EnvConfig:
        return EnvConfig(
            server_groups=list(self.server_groups),
            server_names=self.server_names,
            catalog=list(self.catalog),
            n_customers=self.n_customers,
            base_lambda=self.base_lambda,
            base_mu=self.base_mu,
            theta=self.theta,
            vnf_mttf=self.vnf_mttf,
            vnf_mttr=self.vnf_mttr,
            vm_max=self.vm_max,
            max_retries=self.max_retries,
            availability_weight=self.availability_weight,
            energy_weight=self.energy_weight,
            episode_hours=(
                episode_hours if episode_hours is not None else self.episode_hours
            ),
        )

    def with_servers(self, total: int) -> "ExperimentConfig":
        """Desk-scale helper: shrink/grow the infrastructure, keeping the
        group proportions of the scenario."""
        if total < 1:
            raise ConfigurationError("need at least one server")
        groups = self.server_groups
        counts = [total // len(groups)] * len(groups)
        for i in range(total - sum(counts)):
            counts[i] += 1
        new_groups = [
            dataclasses.replace(g, count=c) for g, c in zip(groups, counts)
        ]
        return dataclasses.replace(
            self, server_groups=new_groups, server_names=None
        )

    def with_capacity(self, capacity: int) -> "ExperimentConfig":
        new_groups = [
            dataclasses.replace(g, capacity=capacity) for g in self.server_groups
        ]
        return dataclasses.replace(self, server_groups=new_groups)


def _default_names() -> list[str]:
    doc = resources.files("sfcplace").joinpath("data/rnp.json")
    with resources.as_file(doc) as path:
        topo = core.load_topology(path)
    return topo.names


def preset_config(scenario: str) -> ExperimentConfig:
    base_group = dict(capacity=10, mttf=8760.0, mttr=1.667, cpu_power=40.0,
                      mem_power=30.17)
    if scenario == "table1":
        return ExperimentConfig(
            scenario="table1",
            server_groups=[GroupParams(group=1, count=28, **base_group)],
            server_names=_default_names(),
            n_customers=5,
            theta=0.999,
            training_steps=87600,
            eval_horizon_hours=8760.0,
        )
    if scenario == "table3":
        group2 = dict(base_group, mttf=7884.0)
        return ExperimentConfig(
            scenario="table3",
            server_groups=[
                GroupParams(group=1, count=14, **base_group),
                GroupParams(group=2, count=14, **group2),
            ],
            server_names=_default_names(),
            n_customers=10,
            theta=0.99955,
            training_steps=500000,
            eval_horizon_hours=43800.0,
        )
    if scenario == "custom":
        return ExperimentConfig(scenario="custom", server_groups=[])
    raise ConfigurationError(f"unknown scenario {scenario!r}")


_TOP_LEVEL_KEYS = {
    "scenario", "topology", "agent", "seed", "repetitions", "training_steps",
    "episode_hours", "eval_horizon_hours", "theta", "customers", "base_lambda",
    "base_mu", "vm_max", "max_retries", "availability_weight", "energy_weight",
    "vnf_mttf", "vnf_mttr", "capacity", "servers", "vnf_types", "server_groups",
    "a2c", "ppo", "log_interval",
}

_GROUP_KEYS = {
    "group", "count", "capacity", "mttf", "mttr", "cpu_power", "mem_power",
}


def _group_from_json(entry: dict, path) -> GroupParams:
    unknown = set(entry) - _GROUP_KEYS
    if unknown:
        raise ConfigurationError(f"{path}: unknown server_groups keys {sorted(unknown)}")
    try:
        return GroupParams(
            group=int(entry.get("group", 1)),
            count=int(entry["count"]),
            capacity=int(entry["capacity"]),
            mttf=float(entry["mttf"]),
            mttr=float(entry["mttr"]),
            cpu_power=float(entry.get("cpu_power", 40.0)),
            mem_power=float(entry.get("mem_power", 30.17)),
        )
    except KeyError as exc:
        raise ConfigurationError(f"{path}: server_groups entry missing {exc}") from exc


def _groups_from_topology(topo: core.Topology, fallback: dict) -> list[GroupParams]:
    counts: dict[int, int] = {}
    for label in topo.group_labels:
        counts[label] = counts.get(label, 0) + 1
    groups = []
    for label in sorted(counts):
        block = topo.group_params.get(label, {})
        groups.append(
            GroupParams(
                group=label,
                count=counts[label],
                capacity=int(block.get("capacity", fallback["capacity"])),
                mttf=float(block.get("mttf_hours", fallback["mttf"])),
                mttr=float(block.get("mttr_hours", fallback["mttr"])),
                cpu_power=float(block.get("cpu_power_watts", fallback["cpu_power"])),
                mem_power=float(block.get("mem_power_watts", fallback["mem_power"])),
            )
        )
    return groups


def load_config(path: str | Path) -> ExperimentConfig:
    """Parse and validate a JSON experiment config; unknown keys are
    rejected and missing ones default from the ``table1`` preset."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
        doc = json.loads(text)
    except OSError as exc:
        raise ConfigurationError(f"{path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigurationError(
            f"{path}:{exc.lineno}:{exc.colno}: invalid JSON ({exc.msg})"
        ) from exc
    if not isinstance(doc, dict):
        raise ConfigurationError(f"{path}: config must be a JSON object")
    unknown = set(doc) - _TOP_LEVEL_KEYS
    if unknown:
        raise ConfigurationError(f"{path}: unknown config keys {sorted(unknown)}")

    scenario = doc.get("scenario", "table1")
    cfg = preset_config(scenario)

    if "topology" in doc:
        topo_path = Path(doc["topology"])
        if not topo_path.is_absolute():
            topo_path = path.parent / topo_path
        topo = core.load_topology(topo_path)
        fallback = dict(capacity=10, mttf=8760.0, mttr=1.667,
                        cpu_power=40.0, mem_power=30.17)
        cfg = dataclasses.replace(
            cfg,
            topology=str(topo_path),
            server_names=topo.names,
            server_groups=_groups_from_topology(topo, fallback),
        )
    if "server_groups" in doc:
        groups = [_group_from_json(e, path) for e in doc["server_groups"]]
        cfg = dataclasses.replace(cfg, server_groups=groups, server_names=None)

    simple = {
        "agent": ("agent", str),
        "seed": ("seed", int),
        "repetitions": ("repetitions", int),
        "training_steps": ("training_steps", int),
        "episode_hours": ("episode_hours", float),
        "eval_horizon_hours": ("eval_horizon_hours", float),
        "theta": ("theta", float),
        "customers": ("n_customers", int),
        "base_lambda": ("base_lambda", float),
        "base_mu": ("base_mu", float),
        "vm_max": ("vm_max", int),
        "max_retries": ("max_retries", int),
        "availability_weight": ("availability_weight", float),
        "energy_weight": ("energy_weight", float),
        "vnf_mttf": ("vnf_mttf", float),
        "vnf_mttr": ("vnf_mttr", float),
        "log_interval": ("log_interval", int),
    }
    updates = {}
    for key, (attr, cast) in simple.items():
        if key in doc:
            try:
                updates[attr] = cast(doc[key])
            except (TypeError, ValueError) as exc:
                raise ConfigurationError(f"{path}: bad value for {key!r}: {exc}")
    if updates:
        cfg = dataclasses.replace(cfg, **updates)

    if "servers" in doc:
        cfg = cfg.with_servers(int(doc["servers"]))
    if "capacity" in doc:
        cfg = cfg.with_capacity(int(doc["capacity"]))
    if "vnf_types" in doc:
        catalog = [
            core.VnfType(i, str(v["name"]), int(v["demand"]))
            for i, v in enumerate(doc["vnf_types"])
        ]
        cfg = dataclasses.replace(cfg, catalog=catalog)
    for section, cls, attr in (("a2c", A2cConfig, "a2c"), ("ppo", PpoConfig, "ppo")):
        if section in doc:
            known = {f.name for f in dataclasses.fields(cls)}
            unknown = set(doc[section]) - known
            if unknown:
                raise ConfigurationError(
                    f"{path}: unknown {section} keys {sorted(unknown)}"
                )
            cfg = dataclasses.replace(cfg, **{attr: cls(**doc[section])})

    return cfg.validate()


def agent_config(cfg: ExperimentConfig) -> agents.AgentConfig:
    if cfg.agent == "a2c":
        return cfg.a2c
    if cfg.agent == "ppo2":
        return cfg.ppo
    raise ConfigurationError(f"agent {cfg.agent!r} is not a learning agent")


# -- metrics rows ------------------------------------------------------------


@dataclass
class MetricsRow:
    run_id: str
    seed: Optional[int]
    scenario: str
    agent: str
    acceptance_rate: Optional[float]
    mean_energy_per_sfc: Optional[float]
    requests: float
    accepted: float
    rejected: float
    cumulative_reward: float

    def as_list(self) -> list:
        return [getattr(self, c) for c in METRICS_COLUMNS]


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(path, columns: Sequence[str], rows: Sequence[Sequence]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    path.write_text(buf.getvalue(), encoding="utf-8")


def summarize(rows: Sequence[MetricsRow]) -> list[MetricsRow]:
    """Mean/median/population-std rows over the numeric columns."""
    numeric = [
        "acceptance_rate",
        "mean_energy_per_sfc",
        "requests",
        "accepted",
        "rejected",
        "cumulative_reward",
    ]
    out = []
    for stat in ("mean", "median", "std"):
        values = {}
        for col in numeric:
            data = [getattr(r, col) for r in rows if getattr(r, col) is not None]
            if not data:
                values[col] = None
            elif stat == "mean":
                values[col] = statistics.fmean(data)
            elif stat == "median":
                values[col] = statistics.median(data)
            else:
                values[col] = statistics.pstdev(data)
        out.append(
            MetricsRow(
                run_id=stat,
                seed=None,
                scenario=rows[0].scenario if rows else "",
                agent=rows[0].agent if rows else "",
                **values,
            )
        )
    return out


# -- single runs -------------------------------------------------------------


def make_baseline_placer(cfg: ExperimentConfig, rng: RngStream) -> sim.PlacerCallback:
    if cfg.agent == "greedy":
        def placer(state, request):
            return agents.greedy_place(request, state.servers, rng, cfg.vm_max)
    elif cfg.agent == "random":
        def placer(state, request):
            return agents.random_place(
                request, state.servers, rng, cfg.vm_max, cfg.max_retries
            )
    else:
        raise ConfigurationError(f"{cfg.agent!r} is not a baseline agent")
    return placer


def run_baseline(
    cfg: ExperimentConfig,
    seed: int,
    horizon: Optional[float] = None,
    trace: Optional[list] = None,
) -> tuple[sim.SimulationReport, float]:
    """One seeded baseline simulation; returns the report and a terminal
    reward total reconstructed from the placements (baselines never pay
    the per-retry penalty because they do not step the environment)."""
    horizon = horizon if horizon is not None else cfg.eval_horizon_hours
    infra_rng = RngStream(seed, STREAM_INFRA)
    customers = core.generate_customers(
        cfg.n_customers, cfg.base_lambda, cfg.base_mu, cfg.theta, infra_rng
    )
    servers = core.build_infrastructure(cfg)
    state = sim.SimState(
        servers=servers,
        customers=customers,
        catalog=list(cfg.catalog),
        vnf_mttf=cfg.vnf_mttf,
        vnf_mttr=cfg.vnf_mttr,
        seed=seed,
        trace=trace,
    )
    sim.schedule_initial_events(state)
    placer = make_baseline_placer(cfg, RngStream(seed, STREAM_BASELINE))
    report = sim.run_until(state, horizon, placer)
    reward = 0.0
    for record in report.placements:
        reward += (
            (record.availability - cfg.theta) * cfg.availability_weight
            - record.energy_watts * cfg.energy_weight
            + 2.0
        )
    reward -= 5.0 * report.rejected
    return report, reward


def run_rl_eval(
    cfg: ExperimentConfig,
    net: Mlp,
    seed: int,
    horizon: Optional[float] = None,
    trace: Optional[list] = None,
):
    horizon = horizon if horizon is not None else cfg.eval_horizon_hours
    env = PlacementEnv(cfg.env_config(episode_hours=horizon), seed=seed, trace=trace)
    return agents.run_policy_episode(env, net, seed, deterministic=True)


def evaluate(
    cfg: ExperimentConfig,
    net: Optional[Mlp] = None,
    reps: Optional[int] = None,
    horizon: Optional[float] = None,
    trace: Optional[list] = None,
    scenario_label: Optional[str] = None,
) -> tuple[list[MetricsRow], list[sim.PlacementRecord]]:
    """Seeded evaluation repetitions; per-run rows plus pooled placement
    records for downstream analysis."""
    reps = reps if reps is not None else cfg.repetitions
    label = scenario_label if scenario_label is not None else cfg.scenario
    if cfg.agent in RL_AGENTS and net is None:
        raise ConfigurationError(f"agent {cfg.agent!r} needs a checkpoint to evaluate")
    rows: list[MetricsRow] = []
    records: list[sim.PlacementRecord] = []
    for rep in range(reps):
        seed = cfg.seed + rep
        run_trace = trace if rep == 0 else None
        if cfg.agent in BASELINE_AGENTS:
            report, reward = run_baseline(cfg, seed, horizon, trace=run_trace)
            rows.append(
                MetricsRow(
                    run_id=str(rep),
                    seed=seed,
                    scenario=label,
                    agent=cfg.agent,
                    acceptance_rate=report.acceptance_rate,
                    mean_energy_per_sfc=report.mean_energy_per_placed,
                    requests=report.requests,
                    accepted=report.accepted,
                    rejected=report.rejected,
                    cumulative_reward=reward,
                )
            )
            records.extend(report.placements)
        else:
            stats = run_rl_eval(cfg, net, seed, horizon, trace=run_trace)
            rows.append(
                MetricsRow(
                    run_id=str(rep),
                    seed=seed,
                    scenario=label,
                    agent=cfg.agent,
                    acceptance_rate=stats.acceptance_rate,
                    mean_energy_per_sfc=stats.mean_energy_per_placed,
                    requests=stats.requests,
                    accepted=stats.accepted,
                    rejected=stats.rejected,
                    cumulative_reward=stats.cumulative_reward,
                )
            )
            records.extend(stats.placements)
    return rows, records


# -- training ----------------------------------------------------------------


def make_envs(cfg: ExperimentConfig, workers: int, seed: int) -> list[PlacementEnv]:
    return [
        PlacementEnv(cfg.env_config(), seed=seed + 7919 * w) for w in range(workers)
    ]


def train(
    cfg: ExperimentConfig,
    steps: Optional[int] = None,
    seed: Optional[int] = None,
) -> agents.TrainingResult:
    """Train the configured learning agent and return the result."""
    if cfg.agent not in RL_AGENTS:
        raise ConfigurationError(f"agent {cfg.agent!r} cannot be trained")
    acfg = agent_config(cfg)
    steps = steps if steps is not None else cfg.training_steps
    seed = seed if seed is not None else cfg.seed
    envs = make_envs(cfg, acfg.workers, seed)
    net = Mlp(envs[0].observation_size, envs[0].n_actions, seed=seed)
    rng = RngStream(seed, STREAM_ACTIONS)
    return agents.train_agent(
        envs, net, acfg, steps, rng, log_interval=cfg.log_interval
    )


def cmd_train(cfg: ExperimentConfig, out_dir, steps=None, seed=None):
    """Train, then persist the checkpoint and the training curve."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    result = train(cfg, steps=steps, seed=seed)
    checkpoint = out / f"{cfg.agent}_checkpoint.bin"
    try:
        result.net.save(checkpoint)
    except OSError as exc:
        raise ConfigurationError(f"cannot write checkpoint {checkpoint}: {exc}")
    curve_path = out / f"{cfg.agent}_training_curve.csv"
    write_csv(
        curve_path,
        CURVE_COLUMNS,
        [[row[c] for c in CURVE_COLUMNS] for row in result.curve],
    )
    return checkpoint, curve_path, result


def cmd_evaluate(
    cfg: ExperimentConfig,
    out_dir,
    checkpoint=None,
    reps=None,
    horizon=None,
    trace_path=None,
):
    """Evaluate the configured agent and write metrics plus summary rows."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    net = None
    if cfg.agent in RL_AGENTS:
        if checkpoint is None:
            raise ConfigurationError(
                f"evaluating {cfg.agent!r} requires --checkpoint"
            )
        checkpoint = Path(checkpoint)
        if not checkpoint.exists():
            raise ConfigurationError(f"checkpoint {checkpoint} does not exist")
        net = Mlp.load(checkpoint)
    trace = [] if trace_path else None
    rows, records = evaluate(cfg, net=net, reps=reps, horizon=horizon, trace=trace)
    all_rows = rows + summarize(rows)
    metrics_path = out / f"{cfg.agent}_metrics.csv"
    write_csv(metrics_path, METRICS_COLUMNS, [r.as_list() for r in all_rows])
    if trace_path:
        write_csv(trace_path, ["time", "kind", "entity"], trace)
    return metrics_path, rows, records


def cmd_sweep(
    cfg: ExperimentConfig,
    alphas: Sequence[float],
    gammas: Sequence[float],
    out_dir,
    reps: Optional[int] = None,
    steps: Optional[int] = None,
):
    """Train one agent per (learning rate, discount) cell per repetition and
    emit one mean cumulative-reward curve file per cell."""
    if not alphas or not gammas:
        raise ConfigurationError("sweep grids must be non-empty")
    if cfg.agent not in RL_AGENTS:
        raise ConfigurationError("sweep needs a learning agent")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    reps = reps if reps is not None else cfg.repetitions
    written = []
    summary_rows = []
    for alpha in alphas:
        for gamma in gammas:
            acfg = dataclasses.replace(agent_config(cfg), lr=alpha, gamma=gamma)
            sweep_cfg = dataclasses.replace(
                cfg, **{"a2c" if cfg.agent == "a2c" else "ppo": acfg}
            )
            curves = []
            for rep in range(reps):
                result = train(sweep_cfg, steps=steps, seed=cfg.seed + rep)
                curves.append(result.curve)
            n_rows = min(len(c) for c in curves)
            rows = []
            for i in range(n_rows):
                step = curves[0][i]["step"]
                mean_reward = statistics.fmean(
                    c[i]["cumulative_reward"] for c in curves
                )
                rows.append([step, mean_reward])
            cell_path = out / f"sweep_{cfg.agent}_a{alpha:g}_g{gamma:g}.csv"
            write_csv(cell_path, ["step", "mean_cumulative_reward"], rows)
            written.append(cell_path)
            summary_rows.append([alpha, gamma, rows[-1][0], rows[-1][1]])
    summary_path = out / f"sweep_{cfg.agent}_summary.csv"
    write_csv(
        summary_path,
        ["alpha", "gamma", "final_step", "final_mean_cumulative_reward"],
        summary_rows,
    )
    return written, summary_path


AXIS_CHOICES = ("theta", "customers", "capacity")


def apply_axis(cfg: ExperimentConfig, axis: str, value: float) -> ExperimentConfig:
    if axis == "theta":
        return dataclasses.replace(cfg, theta=float(value)).validate()
    if axis == "customers":
        return dataclasses.replace(cfg, n_customers=int(value)).validate()
    if axis == "capacity":
        return cfg.with_capacity(int(value)).validate()
    raise ConfigurationError(f"unknown axis {axis!r}; choose from {AXIS_CHOICES}")


def cmd_scenario_series(
    cfg: ExperimentConfig,
    axis: str,
    values: Sequence[float],
    out_dir,
    reps: Optional[int] = None,
    steps: Optional[int] = None,
):
    """Train (when needed) and evaluate the agent across one scenario axis;
    per-seed rows are retained so the result can be box-plotted."""
    if not values:
        raise ConfigurationError("scenario series needs at least one value")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    all_rows: list[MetricsRow] = []
    for value in values:
        varied = apply_axis(cfg, axis, value)
        label = f"{cfg.scenario}:{axis}={value:g}"
        net = None
        if varied.agent in RL_AGENTS:
            net = train(varied, steps=steps).net
        rows, _ = evaluate(varied, net=net, reps=reps, scenario_label=label)
        all_rows.extend(rows + summarize(rows))
    series_path = out / f"series_{cfg.agent}_{axis}.csv"
    write_csv(series_path, METRICS_COLUMNS, [r.as_list() for r in all_rows])
    return series_path, all_rows


# -- report ------------------------------------------------------------------


def read_metrics(path) -> list[MetricsRow]:
    rows = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != METRICS_COLUMNS:
            raise ConfigurationError(f"{path}: unexpected columns {reader.fieldnames}")
        for rec in reader:
            def opt_float(s):
                return float(s) if s not in ("", None) else None

            rows.append(
                MetricsRow(
                    run_id=rec["run_id"],
                    seed=int(rec["seed"]) if rec["seed"] else None,
                    scenario=rec["scenario"],
                    agent=rec["agent"],
                    acceptance_rate=opt_float(rec["acceptance_rate"]),
                    mean_energy_per_sfc=opt_float(rec["mean_energy_per_sfc"]),
                    requests=opt_float(rec["requests"]),
                    accepted=opt_float(rec["accepted"]),
                    rejected=opt_float(rec["rejected"]),
                    cumulative_reward=opt_float(rec["cumulative_reward"]),
                )
            )
    return rows


def render_boxplot_svg(groups: dict[str, list[float]], title: str) -> str:
    """Minimal fixed-layout SVG box plot (median, quartiles, extremes)."""
    width, height = 640, 360
    margin, plot_h = 60, 240
    labels = list(groups)
    finite = [v for vals in groups.values() for v in vals]
    lo, hi = (min(finite), max(finite)) if finite else (0.0, 1.0)
    if hi - lo < 1e-12:
        hi = lo + 1.0

    def y(v):
        return margin + plot_h * (1.0 - (v - lo) / (hi - lo))

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<text x="{width / 2}" y="24" text-anchor="middle" font-size="14">{title}</text>',
        f'<line x1="{margin}" y1="{margin}" x2="{margin}" y2="{margin + plot_h}" stroke="black"/>',
        f'<text x="{margin - 8}" y="{y(hi) + 4}" text-anchor="end" font-size="10">{hi:.4g}</text>',
        f'<text x="{margin - 8}" y="{y(lo) + 4}" text-anchor="end" font-size="10">{lo:.4g}</text>',
    ]
    slot = (width - 2 * margin) / max(1, len(labels))
    for i, label in enumerate(labels):
        vals = sorted(groups[label])
        if not vals:
            continue
        q1 = statistics.quantiles(vals, n=4)[0] if len(vals) > 1 else vals[0]
        q2 = statistics.median(vals)
        q3 = statistics.quantiles(vals, n=4)[2] if len(vals) > 1 else vals[0]
        cx = margin + slot * (i + 0.5)
        half = min(28.0, slot * 0.3)
        parts += [
            f'<line x1="{cx}" y1="{y(vals[0])}" x2="{cx}" y2="{y(vals[-1])}" stroke="black"/>',
            f'<rect x="{cx - half}" y="{y(q3)}" width="{2 * half}" '
            f'height="{max(1.0, y(q1) - y(q3))}" fill="lightsteelblue" stroke="black"/>',
            f'<line x1="{cx - half}" y1="{y(q2)}" x2="{cx + half}" y2="{y(q2)}" stroke="black"/>',
            f'<text x="{cx}" y="{margin + plot_h + 16}" text-anchor="middle" font-size="10">{label}</text>',
        ]
    parts.append("</svg>")
    return "\n".join(parts)


def cmd_report(metrics_path, svg_path=None) -> str:
    """Re-parse a metrics CSV, print recomputed summaries, optionally render
    an acceptance-rate box plot."""
    rows = read_metrics(metrics_path)
    runs = [r for r in rows if r.run_id not in ("mean", "median", "std")]
    lines = []
    groups: dict[str, list[float]] = {}
    by_key: dict[tuple, list[MetricsRow]] = {}
    for row in runs:
        by_key.setdefault((row.scenario, row.agent), []).append(row)
    for (scenario, agent), grp in by_key.items():
        summary = summarize(grp)
        mean, median, std = summary[0], summary[1], summary[2]
        lines.append(
            f"{scenario} {agent}: runs={len(grp)} "
            f"acceptance mean={_fmt(mean.acceptance_rate)} "
            f"median={_fmt(median.acceptance_rate)} std={_fmt(std.acceptance_rate)} "
            f"energy mean={_fmt(mean.mean_energy_per_sfc)}"
        )
        groups[f"{scenario}/{agent}"] = [
            r.acceptance_rate for r in grp if r.acceptance_rate is not None
        ]
    if svg_path:
        svg = render_boxplot_svg(groups, title="acceptance rate")
        Path(svg_path).write_text(svg, encoding="utf-8")
    return "\n".join(lines)
