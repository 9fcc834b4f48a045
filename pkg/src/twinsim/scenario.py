"""Scenario files: schema, validation, defaults, and bundled presets."""

from __future__ import annotations

import copy
import math
from dataclasses import dataclass, field, fields
from importlib import resources
from pathlib import Path
from typing import Any

import yaml

from .feedback import FeedbackParams
from .geometry import Bounds, Disk, Pose2D, Rect, ScanSpec, WorldModel, clearance
from .mapping import InverseSensorModel
from .navigation import DWAParams
from .transport import CHANNEL_PRESETS, ChannelConfig

CASES = ("RO", "MT", "DT", "ST")
SCHEMA_VERSION = 1

TOPIC_NAMES = ("cmd_vel", "odom", "scan", "force")

# which topics each case opens, and in which direction
CASE_TOPICS: dict[str, dict[str, str]] = {
    "RO": {"cmd_vel": "c2p", "odom": "p2c", "scan": "p2c"},
    "MT": {"cmd_vel": "c2p", "odom": "p2c"},
    "DT": {"cmd_vel": "c2p", "odom": "p2c"},
    "ST": {"cmd_vel": "c2p", "odom": "p2c", "scan": "p2c", "force": "p2c"},
}


class ScenarioError(ValueError):
    """Carries field-level diagnostics for a bad scenario file."""

    def __init__(self, problems: list[str]):
        self.problems = problems
        super().__init__("invalid scenario:\n  " + "\n  ".join(problems))


_DEFAULTS: dict[str, Any] = {
    "schema_version": SCHEMA_VERSION,
    "case_id": None,
    "seed": 0,
    "tick_dt": 0.05,
    "time_budget": 120.0,
    "settle_time": 1.0,
    "start": [0.0, 0.0, 0.0],
    "twin_world": None,
    "physical_world": None,
    "goals": [],
    "robot": {"radius": 0.18},
    "scan": {"beams": 360, "angle_min": -math.pi, "range_max": 3.5},
    "mapping": {
        "resolution": 0.05,
        "p_hit": 0.7,
        "p_miss": 0.3,
        "l_max": 5.0,
        "occupied_threshold": 0.65,
        "update_every_ticks": 5,
        "inflation_margin": 0.05,
        "ground_truth_grid": False,
    },
    "dwa": {
        "v_max": 0.5, "v_min": 0.0, "omega_max": 1.0,
        "a_v": 0.5, "a_omega": 2.0,
        "sim_horizon": 1.5, "control_dt": 0.25, "rollout_dt": 0.05,
        "n_v": 11, "n_omega": 21,
        "alpha": 0.8, "beta": 0.1, "gamma": 0.1,
        "goal_xy_tol": 0.05, "goal_yaw_tol": 0.2,
        "clearance_cutoff": 1.0, "lookahead": 1.0,
    },
    "feedback": {
        "enabled": None,   # default: true only for ST
        "d0": 0.6, "k_rep": 0.05, "f_max": 10.0, "k_v": 0.1, "k_omega": 0.5,
    },
    "mux": {
        "nav_timeout": 0.5,
        "force_timeout": 0.5,
        "cmd_timeout": 0.5,
        "estop_timeout": 0.5,
    },
    "noise": {"sigma_v": 0.0, "sigma_omega": 0.0},
    "net": {name: {"preset": "ideal"} for name in TOPIC_NAMES},
    "scan_publish_every_ticks": 2,
    "replan_interval": 2.0,
}


def _deep_merge(base: dict, override: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in override.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _deep_merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


def _parse_world(raw: dict, robot_radius: float, where: str,
                 problems: list[str]) -> WorldModel | None:
    try:
        bounds = Bounds(*[float(v) for v in raw["bounds"]])
    except (KeyError, TypeError, ValueError):
        problems.append(f"{where}.bounds: expected [x0, y0, x1, y1]")
        return None
    obstacles: list[Disk | Rect] = []
    for i, ob in enumerate(raw.get("obstacles", []) or []):
        kind = ob.get("type")
        try:
            if kind == "disk":
                obstacles.append(Disk(float(ob["center"][0]), float(ob["center"][1]),
                                      float(ob["radius"])))
            elif kind == "rect":
                obstacles.append(Rect(float(ob["min"][0]), float(ob["min"][1]),
                                      float(ob["max"][0]), float(ob["max"][1])))
            else:
                problems.append(f"{where}.obstacles[{i}].type: must be 'disk' or 'rect'")
        except (KeyError, TypeError, ValueError, IndexError):
            problems.append(f"{where}.obstacles[{i}]: malformed {kind} obstacle")
    try:
        return WorldModel(bounds, tuple(obstacles), robot_radius)
    except ValueError as e:
        problems.append(f"{where}: {e}")
        return None


def _build(cls, raw: dict, where: str, problems: list[str], **extra):
    known = {f.name for f in fields(cls)}
    kwargs = dict(extra)
    for k, v in raw.items():
        if k not in known:
            problems.append(f"{where}.{k}: unknown field")
        else:
            kwargs[k] = v
    try:
        return cls(**kwargs)
    except (TypeError, ValueError) as e:
        problems.append(f"{where}: {e}")
        return None


@dataclass
class Scenario:
    """Fully validated experiment definition with all defaults resolved."""

    case_id: str
    seed: int
    tick_dt: float
    time_budget: float
    settle_time: float
    start: Pose2D
    twin_world: WorldModel | None
    physical_world: WorldModel
    goals: list[tuple[float, float, float]]
    scan_spec: ScanSpec
    sensor_model: InverseSensorModel
    dwa: DWAParams
    feedback: FeedbackParams
    feedback_enabled: bool
    channels: dict[str, ChannelConfig]
    mux_timeouts: dict[str, float]
    sigma_v: float
    sigma_omega: float
    map_resolution: float
    occupied_threshold: float
    map_update_every_ticks: int
    inflation_margin: float
    ground_truth_grid: bool
    scan_publish_every_ticks: int
    replan_interval: float
    raw: dict = field(repr=False, default_factory=dict)

    @property
    def control_every_ticks(self) -> int:
        return round(self.dwa.control_dt / self.tick_dt)

    def to_dict(self) -> dict:
        """The fully-resolved scenario, echoed into reports for provenance."""
        return copy.deepcopy(self.raw)


def scenario_from_dict(data: dict, case_override: str | None = None) -> Scenario:
    merged = _deep_merge(_DEFAULTS, data)
    problems: list[str] = []

    if merged.get("schema_version") != SCHEMA_VERSION:
        problems.append(f"schema_version: expected {SCHEMA_VERSION}")

    case_id = case_override or merged.get("case_id")
    if case_id not in CASES:
        problems.append(f"case_id: required, one of {'/'.join(CASES)} (got {case_id!r})")
        raise ScenarioError(problems)
    merged["case_id"] = case_id

    tick_dt = float(merged["tick_dt"])
    if tick_dt <= 0:
        problems.append("tick_dt: must be positive")
    if float(merged["time_budget"]) < 0:
        problems.append("time_budget: must be non-negative")

    robot_radius = float(merged["robot"].get("radius", 0.18))

    twin_world = None
    if merged.get("twin_world") is not None:
        twin_world = _parse_world(merged["twin_world"], robot_radius, "twin_world", problems)
    physical_world = None
    if merged.get("physical_world") is not None:
        physical_world = _parse_world(merged["physical_world"], robot_radius,
                                      "physical_world", problems)

    if physical_world is None:
        problems.append("physical_world: required")
    if case_id != "RO" and twin_world is None:
        problems.append(f"twin_world: required for case {case_id}")

    sc = merged["scan"]
    scan_spec = _build(ScanSpec, sc, "scan", problems)

    mp = merged["mapping"]
    try:
        p_hit, p_miss = float(mp["p_hit"]), float(mp["p_miss"])
        sensor_model = InverseSensorModel(
            l_occ=math.log(p_hit / (1.0 - p_hit)),
            l_free=math.log(p_miss / (1.0 - p_miss)),
            l_max=float(mp["l_max"]))
    except (ValueError, ZeroDivisionError) as e:
        problems.append(f"mapping: {e}")
        sensor_model = InverseSensorModel()

    dwa = _build(DWAParams, merged["dwa"], "dwa", problems)
    fb_raw = dict(merged["feedback"])
    fb_enabled = fb_raw.pop("enabled", None)
    if fb_enabled is None:
        fb_enabled = case_id == "ST"
    fb = _build(FeedbackParams, fb_raw, "feedback", problems)

    channels: dict[str, ChannelConfig] = {}
    for name, raw_cfg in merged["net"].items():
        if name not in TOPIC_NAMES:
            problems.append(f"net.{name}: unknown topic (expected {'/'.join(TOPIC_NAMES)})")
            continue
        cfg = dict(raw_cfg or {})
        preset = cfg.pop("preset", None)
        base = dict(CHANNEL_PRESETS.get(preset, CHANNEL_PRESETS["ideal"]))
        if preset is not None and preset not in CHANNEL_PRESETS:
            problems.append(f"net.{name}.preset: unknown preset {preset!r}")
        base.update(cfg)
        base.setdefault("seed", int(merged["seed"]))
        try:
            channels[name] = ChannelConfig(**base)
        except (TypeError, ValueError) as e:
            problems.append(f"net.{name}: {e}")

    try:
        start = Pose2D(*[float(v) for v in merged["start"]])
    except (TypeError, ValueError):
        problems.append("start: expected [x, y, yaw]")
        start = Pose2D(0.0, 0.0, 0.0)

    goals: list[tuple[float, float, float]] = []
    for i, g in enumerate(merged["goals"]):
        try:
            goals.append((float(g[0]), float(g[1]), float(g[2])))
        except (TypeError, ValueError, IndexError):
            problems.append(f"goals[{i}]: expected [x, y, yaw]")
    if not goals:
        problems.append("goals: at least one goal required")

    # goal reachability is a geometry property of the navigating world
    nav_world = physical_world if case_id == "RO" else twin_world
    if nav_world is not None:
        for i, (gx, gy, _) in enumerate(goals):
            if not nav_world.bounds.contains(gx, gy):
                problems.append(f"goals[{i}]: outside world bounds")
            elif clearance(nav_world, gx, gy) < robot_radius:
                problems.append(f"goals[{i}]: inside or too close to an obstacle")
        if not nav_world.bounds.contains(start.x, start.y) or \
                clearance(nav_world, start.x, start.y) < robot_radius:
            problems.append("start: not in free space")
    if physical_world is not None:
        if not physical_world.bounds.contains(start.x, start.y) or \
                clearance(physical_world, start.x, start.y) < robot_radius:
            problems.append("start: not in free space of the physical world")

    if dwa is not None and tick_dt > 0:
        ratio = dwa.control_dt / tick_dt
        if abs(ratio - round(ratio)) > 1e-9 or round(ratio) < 1:
            problems.append("dwa.control_dt: must be a positive multiple of tick_dt")

    if int(mp["update_every_ticks"]) < 1:
        problems.append("mapping.update_every_ticks: must be >= 1")
    if int(merged["scan_publish_every_ticks"]) < 1:
        problems.append("scan_publish_every_ticks: must be >= 1")

    if problems:
        raise ScenarioError(problems)

    # echo the fully-resolved form (with derived fields) for provenance
    merged["feedback"]["enabled"] = bool(fb_enabled)
    for name, cfg in channels.items():
        merged["net"][name] = {
            "base_delay": cfg.base_delay, "jitter": cfg.jitter,
            "loss_prob": cfg.loss_prob, "bandwidth": cfg.bandwidth, "seed": cfg.seed,
        }

    return Scenario(
        case_id=case_id,
        seed=int(merged["seed"]),
        tick_dt=tick_dt,
        time_budget=float(merged["time_budget"]),
        settle_time=float(merged["settle_time"]),
        start=start,
        twin_world=twin_world,
        physical_world=physical_world,
        goals=goals,
        scan_spec=scan_spec,
        sensor_model=sensor_model,
        dwa=dwa,
        feedback=fb,
        feedback_enabled=bool(fb_enabled),
        channels=channels,
        mux_timeouts={k: float(v) for k, v in merged["mux"].items()},
        sigma_v=float(merged["noise"]["sigma_v"]),
        sigma_omega=float(merged["noise"]["sigma_omega"]),
        map_resolution=float(mp["resolution"]),
        occupied_threshold=float(mp["occupied_threshold"]),
        map_update_every_ticks=int(mp["update_every_ticks"]),
        inflation_margin=float(mp["inflation_margin"]),
        ground_truth_grid=bool(mp["ground_truth_grid"]),
        scan_publish_every_ticks=int(merged["scan_publish_every_ticks"]),
        replan_interval=float(merged["replan_interval"]),
        raw=merged,
    )


def apply_overrides(data: dict, overrides: dict[str, Any]) -> dict:
    """Apply dotted-path overrides (e.g. ``net.cmd_vel.base_delay``)."""
    out = copy.deepcopy(data)
    for path, value in overrides.items():
        node = out
        parts = path.split(".")
        for part in parts[:-1]:
            node = node.setdefault(part, {})
        node[parts[-1]] = value
    return out


def load_scenario(path: str | Path, case_override: str | None = None,
                  overrides: dict[str, Any] | None = None) -> Scenario:
    """Load and validate a scenario file (or a bundled scenario name)."""
    p = Path(path)
    if p.exists():
        text = p.read_text(encoding="utf-8")
    else:
        name = p.name if p.name.endswith(".yaml") else f"{p.name}.yaml"
        res = resources.files("twinsim").joinpath("scenarios", name)
        if not res.is_file():
            raise FileNotFoundError(f"scenario not found: {path}")
        text = res.read_text(encoding="utf-8")
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as e:
        raise ScenarioError([f"YAML parse error: {e}"]) from e
    if not isinstance(data, dict):
        raise ScenarioError(["scenario file must contain a mapping"])
    if overrides:
        data = apply_overrides(data, overrides)
    return scenario_from_dict(data, case_override=case_override)


def bundled_scenarios() -> list[str]:
    base = resources.files("twinsim").joinpath("scenarios")
    return sorted(f.name[:-5] for f in base.iterdir() if f.name.endswith(".yaml"))
