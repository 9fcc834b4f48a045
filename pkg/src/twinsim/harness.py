"""Experiment harness: the four case topologies, the tick loop, metrics,
and result export.

Tick order (fixed): physical sense -> feedback publish -> transport deliver
-> twin MUX arbitrate -> twin map/plan/step -> twin publish -> transport
deliver -> physical MUX arbitrate -> physical step.
"""

from __future__ import annotations

import csv
import json
import math

import numpy as np
from dataclasses import dataclass, field
from pathlib import Path

from . import encoding
from .feedback import compute_feedback_force, force_to_correction, override_command
from .geometry import Pose2D, ScanSpec, Twist, WorldModel
from .mapping import (
    InverseSensorModel,
    OccupancyGrid,
    PlanningSnapshot,
    export_pgm,
    make_planning_snapshot,
    rasterize_world,
    update_with_scan,
)
from .navigation import DWAParams, MissionExecutor
from .mux import MuxChannel, VelocityMux
from .scenario import CASE_TOPICS, Scenario
from .transport import Network
from .world import OdometryNoiseModel, check_collision, raycast_scan, step_kinematics

ZERO = Twist(0.0, 0.0)


@dataclass
class SiteAccounting:
    planner_invocations: int = 0
    mapping_updates: int = 0
    messages_sent: int = 0
    bytes_sent: int = 0
    messages_received: int = 0
    bytes_received: int = 0

    def to_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass
class TickRecord:
    tick: int
    t: float
    twin_pose: Pose2D | None
    phys_pose: Pose2D
    twin_active: str | None
    phys_active: str | None


@dataclass
class CaseReport:
    case_id: str
    seed: int
    goal_errors: list[float | None]
    completion_times: list[float | None]
    success: list[bool]
    mean_tracking_error: float | None
    collision_count: int
    twin_collision_count: int
    force_activations: int
    force_publications: int
    recovery_triggers: int
    mission_status: str
    ticks: int
    duration: float
    accounting: dict[str, dict]
    network: dict
    scenario: dict
    records: list[TickRecord] = field(repr=False, default_factory=list)
    grid: OccupancyGrid | None = field(repr=False, default=None)

    def to_dict(self) -> dict:
        return {
            "case_id": self.case_id,
            "seed": self.seed,
            "goal_errors": self.goal_errors,
            "completion_times": self.completion_times,
            "success": self.success,
            "mean_tracking_error": self.mean_tracking_error,
            "collision_count": self.collision_count,
            "twin_collision_count": self.twin_collision_count,
            "force_activations": self.force_activations,
            "force_publications": self.force_publications,
            "recovery_triggers": self.recovery_triggers,
            "mission_status": self.mission_status,
            "ticks": self.ticks,
            "duration": self.duration,
            "accounting": self.accounting,
            "network": self.network,
            "scenario": self.scenario,
        }


class _Robot:
    """An embodied robot: true pose, executed command, contact bookkeeping."""

    def __init__(self, world: WorldModel, pose: Pose2D,
                 noise: OdometryNoiseModel | None = None):
        self.world = world
        self.pose = pose
        self.noise = noise
        self.executed = ZERO
        self.in_contact = False
        self.collisions = 0

    def step(self, cmd: Twist, dt: float) -> None:
        applied = self.noise.apply(cmd) if self.noise is not None else cmd
        attempted = step_kinematics(self.pose, applied, dt)
        if check_collision(self.world, attempted):
            # contact stops translation; rotation in place stays legal
            if not self.in_contact:
                self.collisions += 1
                self.in_contact = True
            self.pose = Pose2D(self.pose.x, self.pose.y, attempted.theta)
            self.executed = Twist(0.0, applied.omega)
        else:
            self.in_contact = False
            self.pose = attempted
            self.executed = applied


class _MapperNav:
    """Grid + mission state for the site that runs mapping and planning."""

    def __init__(self, scn: Scenario, world: WorldModel, accounting: SiteAccounting):
        self.scn = scn
        self.world = world
        self.accounting = accounting
        if scn.ground_truth_grid:
            self.grid = rasterize_world(world, scn.map_resolution, scn.sensor_model)
        else:
            self.grid = OccupancyGrid.for_bounds(world.bounds, scn.map_resolution)
        self._snapshot: PlanningSnapshot | None = None
        self._virtual = np.zeros(self.grid.logodds.shape, dtype=bool)
        self.mission = MissionExecutor(scn.goals, scn.dwa, dwell_time=scn.settle_time)

    def integrate(self, pose: Pose2D, scan) -> None:
        if self.scn.ground_truth_grid:
            return
        update_with_scan(self.grid, pose, scan, self.scn.sensor_model)
        if self._virtual.any():
            # feedback-registered obstacles persist; own scans cannot clear
            # what only the remote site can see
            self.grid.logodds[self._virtual] = self.scn.sensor_model.l_max
        self.accounting.mapping_updates += 1
        self._snapshot = None

    def stamp_virtual(self, x: float, y: float) -> None:
        grid = self.grid
        col = int(math.floor((x - grid.origin.x) / grid.resolution))
        row = int(math.floor((y - grid.origin.y) / grid.resolution))
        if 0 <= col < grid.width and 0 <= row < grid.height:
            grid.logodds[row, col] = max(grid.logodds[row, col],
                                         self.scn.sensor_model.l_max)
            self._virtual[row, col] = True
            self._snapshot = None

    def snapshot(self) -> PlanningSnapshot:
        if self._snapshot is None:
            self._snapshot = make_planning_snapshot(
                self.grid, self.scn.occupied_threshold,
                self.world.robot_radius, self.scn.inflation_margin)
        return self._snapshot

    def control(self, pose: Pose2D, current: Twist, now: float) -> Twist:
        before = self.mission.plan_invocations
        cmd = self.mission.step(pose, current, self.snapshot(), now)
        self.accounting.planner_invocations += 1 + (self.mission.plan_invocations - before)
        return cmd


class RunHooks:
    """Observer/commander interface for the bridge service."""

    def on_tick(self, state: dict) -> None:  # pragma: no cover - interface
        pass

    def drain_commands(self, now: float) -> list[tuple[float, float]]:
        return []

    def pace(self, tick_dt: float) -> None:
        pass


def _traces_to_offers(trace: list[tuple[float, float, float]]):
    """Sort a teleop trace by time for tick-quantized replay."""
    return sorted(trace, key=lambda r: r[0])


def run_case(scn: Scenario, hooks: RunHooks | None = None,
             trace: list[tuple[float, float, float]] | None = None) -> CaseReport:
    """Execute one experiment case to completion or time budget."""
    case = scn.case_id
    topics = CASE_TOPICS[case]
    net = Network(scn.seed)
    for name, direction in topics.items():
        net.open_topic(name, scn.channels[name], direction)

    cyber_acct = SiteAccounting()
    phys_acct = SiteAccounting()

    noise = OdometryNoiseModel(scn.sigma_v, scn.sigma_omega, scn.seed)
    physical = _Robot(scn.physical_world, scn.start, noise)

    twin: _Robot | None = None
    if case == "RO":
        mapper = _MapperNav(scn, scn.physical_world, cyber_acct)
    else:
        twin = _Robot(scn.twin_world, scn.start)
        mapper = _MapperNav(scn, scn.twin_world, cyber_acct)

    twin_mux = VelocityMux()
    twin_mux.register_channel(MuxChannel("nav", 10, scn.mux_timeouts["nav_timeout"]))
    twin_mux.register_channel(MuxChannel("force", 100, scn.mux_timeouts["force_timeout"]))
    phys_mux = VelocityMux()
    phys_mux.register_channel(MuxChannel("cmd", 10, scn.mux_timeouts["cmd_timeout"]))
    phys_mux.register_channel(MuxChannel("estop", 100, scn.mux_timeouts["estop_timeout"]))

    control_every = scn.control_every_ticks
    map_every = scn.map_update_every_ticks
    scan_every = scn.scan_publish_every_ticks
    replan_every = max(1, round(scn.replan_interval / scn.tick_dt))

    dwa = scn.dwa
    feedback_on = scn.feedback_enabled and "force" in topics
    trace_iter = _traces_to_offers(trace) if trace else []
    trace_pos = 0
    if case == "MT" and trace:
        end_budget = min(scn.time_budget, trace_iter[-1][0] + 2.0)
    else:
        end_budget = scn.time_budget

    # RO: scan/odom pairs are matched on their shared send stamp
    ro_pending_scan: dict[float, object] = {}
    ro_pending_pose: dict[float, Pose2D] = {}
    ro_last_pose: Pose2D | None = None

    latest_scan = None
    latest_phys_scan_msg = None
    force_pubs = 0
    force_activations = 0
    force_stamp_pending = False
    last_stamp_tick = -10**9
    seq_seen: dict[str, int] = {}

    records: list[TickRecord] = []
    tracking_samples: list[float] = []
    goal_measure_at: list[float | None] = [None] * len(scn.goals)
    goal_errors: list[float | None] = [None] * len(scn.goals)
    completion: list[float | None] = [None] * len(scn.goals)
    goals_seen = 0
    run_done_at: float | None = None

    max_ticks = int(math.ceil(end_budget / scn.tick_dt)) if end_budget > 0 else 0
    tick = 0
    now = 0.0

    last_nav_cmd = ZERO  # latest remote command; RO republishes it every tick

    while tick < max_ticks:
        now = tick * scn.tick_dt

        # --- physical sense + feedback publish -------------------------------
        need_scan = feedback_on or ("scan" in topics and tick % scan_every == 0)
        phys_scan = None
        if need_scan:
            phys_scan = raycast_scan(scn.physical_world, physical.pose, scn.scan_spec, now)
        if "scan" in topics and tick % scan_every == 0 and phys_scan is not None:
            payload = encoding.encode_scan(phys_scan)
            net.publish("scan", "p2c", payload, now)
            phys_acct.messages_sent += 1
            phys_acct.bytes_sent += len(payload)
        if "odom" in topics:
            payload = encoding.encode_pose(physical.pose)
            net.publish("odom", "p2c", payload, now)
            phys_acct.messages_sent += 1
            phys_acct.bytes_sent += len(payload)
        if feedback_on and phys_scan is not None:
            force = compute_feedback_force(phys_scan, scn.feedback)
            if force.magnitude > scn.feedback.publish_threshold:
                payload = encoding.encode_force(force)
                net.publish("force", "p2c", payload, now)
                phys_acct.messages_sent += 1
                phys_acct.bytes_sent += len(payload)
                force_pubs += 1

        # --- transport deliver p2c -------------------------------------------
        delivered_odom: list = []
        for name in ("odom", "scan", "force"):
            if name not in topics:
                continue
            for d in net.poll(name, "p2c", now):
                cyber_acct.messages_received += 1
                cyber_acct.bytes_received += len(d.payload)
                if d.seq <= seq_seen.get(name, 0):
                    continue  # stale out-of-order message
                seq_seen[name] = d.seq
                if name == "odom":
                    delivered_odom.append(d)
                elif name == "scan":
                    latest_phys_scan_msg = d
                    if case == "RO":
                        ro_pending_scan[d.send_time] = encoding.decode_scan(d.payload)
                elif name == "force" and twin is not None:
                    f = encoding.decode_force(d.payload)
                    corr = force_to_correction(f, scn.feedback, dwa.v_max, dwa.omega_max)
                    # readjust the intended (nav) command, not the already-
                    # overridden executed one, or speed pins at zero
                    intended = twin_mux.latest("nav", now) or twin.executed
                    cmd = override_command(intended, corr, dwa.v_max, dwa.omega_max)
                    twin_mux.offer("force", cmd, now)
                    force_stamp_pending = True
        for d in delivered_odom:
            pose = encoding.decode_pose(d.payload)
            ro_last_pose = pose
            if case == "RO":
                ro_pending_pose[d.send_time] = pose

        # --- teleop inbox (MT): recorded trace and/or live bridge commands ---
        if case == "MT":
            while trace_pos < len(trace_iter) and trace_iter[trace_pos][0] <= now:
                _, tv, tw = trace_iter[trace_pos]
                trace_pos += 1
                tv = max(-dwa.v_max, min(dwa.v_max, tv))
                tw = max(-dwa.omega_max, min(dwa.omega_max, tw))
                twin_mux.offer("nav", Twist(tv, tw), now)
            if hooks is not None:
                for tv, tw in hooks.drain_commands(now):
                    tv = max(-dwa.v_max, min(dwa.v_max, tv))
                    tw = max(-dwa.omega_max, min(dwa.omega_max, tw))
                    twin_mux.offer("nav", Twist(tv, tw), now)

        # --- twin MUX arbitrate -----------------------------------------------
        twin_cmd = None
        if twin is not None:
            twin_cmd = twin_mux.arbitrate(now)
            if twin_mux.active_channel == "force":
                force_activations += 1

        # --- twin map / plan / step -------------------------------------------
        if mapper is not None and case == "RO":
            # integrate matched scan/odom pairs in stamp order
            ready = sorted(set(ro_pending_scan) & set(ro_pending_pose))
            for stamp in ready:
                mapper.integrate(ro_pending_pose.pop(stamp), ro_pending_scan.pop(stamp))
            for bucket in (ro_pending_scan, ro_pending_pose):
                for stamp in [s for s in bucket if s < now - 2.0]:
                    del bucket[stamp]
        elif mapper is not None and twin is not None and not scn.ground_truth_grid:
            if tick % map_every == 0:
                twin_scan = raycast_scan(scn.twin_world, twin.pose, scn.scan_spec, now)
                latest_scan = twin_scan
                mapper.integrate(twin.pose, twin_scan)

        # ST reroute: register feedback-confirmed obstacle points (from the
        # physical site's scan around its reported pose) in the twin's grid,
        # so the global planner routes around what only the physical can see
        if case == "ST" and force_stamp_pending and tick - last_stamp_tick >= control_every:
            if ro_last_pose is not None and latest_phys_scan_msg is not None:
                pscan = encoding.decode_scan(latest_phys_scan_msg.payload)
                base = ro_last_pose
                bias = scn.map_resolution  # push stamps into the obstacle body
                for i, rng in enumerate(pscan.ranges):
                    if pscan.no_return[i] or rng >= scn.feedback.d0:
                        continue
                    bearing = base.theta + pscan.angle_min + i * pscan.angle_increment
                    mapper.stamp_virtual(base.x + (rng + bias) * math.cos(bearing),
                                         base.y + (rng + bias) * math.sin(bearing))
                mapper.mission.request_replan()
                last_stamp_tick = tick
            force_stamp_pending = False

        if case != "MT" and tick % replan_every == 0 and tick > 0:
            mapper.mission.request_replan()

        if case != "MT" and tick % control_every == 0:
            if case == "RO":
                if ro_last_pose is not None:
                    last_nav_cmd = mapper.control(ro_last_pose, last_nav_cmd, now)
            else:
                # offered now, arbitrated from the next tick (fixed tick order)
                nav_cmd = mapper.control(twin.pose, twin.executed, now)
                twin_mux.offer("nav", nav_cmd, now)

        if twin is not None:
            twin.step(twin_cmd if twin_cmd is not None else ZERO, scn.tick_dt)

        # --- twin publish -------------------------------------------------------
        if "cmd_vel" in topics:
            out_cmd = twin.executed if twin is not None else last_nav_cmd
            payload = encoding.encode_twist(out_cmd)
            net.publish("cmd_vel", "c2p", payload, now)
            cyber_acct.messages_sent += 1
            cyber_acct.bytes_sent += len(payload)

        # --- transport deliver c2p / physical MUX / physical step ---------------
        for d in net.poll("cmd_vel", "c2p", now):
            phys_acct.messages_received += 1
            phys_acct.bytes_received += len(d.payload)
            if d.seq <= seq_seen.get("cmd_vel", 0):
                continue
            seq_seen["cmd_vel"] = d.seq
            phys_mux.offer("cmd", encoding.decode_twist(d.payload), now)
        phys_cmd = phys_mux.arbitrate(now)
        physical.step(phys_cmd if phys_cmd is not None else ZERO, scn.tick_dt)

        # --- bookkeeping ---------------------------------------------------------
        t_after = now + scn.tick_dt
        records.append(TickRecord(
            tick=tick, t=t_after,
            twin_pose=twin.pose if twin is not None else None,
            phys_pose=physical.pose,
            twin_active=twin_mux.active_channel if twin is not None else None,
            phys_active=phys_mux.active_channel))
        if twin is not None:
            tracking_samples.append(math.hypot(twin.pose.x - physical.pose.x,
                                               twin.pose.y - physical.pose.y))

        if mapper is not None:
            done = mapper.mission.status.goals_done
            while goals_seen < len(done):
                completion[goals_seen] = done[goals_seen]
                goal_measure_at[goals_seen] = done[goals_seen] + scn.settle_time
                goals_seen += 1
        for i, measure_t in enumerate(goal_measure_at):
            if measure_t is not None and goal_errors[i] is None and t_after >= measure_t:
                gx, gy, _ = scn.goals[i]
                goal_errors[i] = math.hypot(physical.pose.x - gx, physical.pose.y - gy)

        if hooks is not None:
            hooks.on_tick(_state_frame(scn, now=t_after, tick=tick, twin=twin,
                                       physical=physical, mapper=mapper,
                                       twin_mux=twin_mux, phys_mux=phys_mux,
                                       scan=latest_scan or (
                                           encoding.decode_scan(latest_phys_scan_msg.payload)
                                           if latest_phys_scan_msg else None)))
            hooks.pace(scn.tick_dt)

        tick += 1

        if mapper is not None and run_done_at is None and \
                mapper.mission.status.state in ("reached", "failed"):
            # let in-flight commands and goal measurements drain, then stop
            run_done_at = t_after + max(scn.settle_time, 1.0)
        if run_done_at is not None and t_after >= run_done_at and \
                all(m is None or e is not None for m, e in zip(goal_measure_at, goal_errors)):
            break

    duration = tick * scn.tick_dt

    if case == "MT":
        mission_status = "reached"
        for i, (gx, gy, _) in enumerate(scn.goals):
            best = math.inf
            best_t = None
            for r in records:
                d = math.hypot(r.phys_pose.x - gx, r.phys_pose.y - gy)
                if d < best:
                    best = d
                    best_t = r.t
            goal_errors[i] = best if best < math.inf else None
            completion[i] = best_t
            if best > 2.0 * dwa.goal_xy_tol:
                mission_status = "failed"
    else:
        mission_status = mapper.mission.status.state if mapper is not None else "running"

    success = []
    for err, done_t in zip(goal_errors, completion):
        success.append(err is not None and done_t is not None
                       and err <= 2.0 * dwa.goal_xy_tol and done_t <= scn.time_budget)

    mean_te = (sum(tracking_samples) / len(tracking_samples)
               if tracking_samples else None)

    return CaseReport(
        case_id=case,
        seed=scn.seed,
        goal_errors=goal_errors,
        completion_times=completion,
        success=success,
        mean_tracking_error=mean_te,
        collision_count=physical.collisions,
        twin_collision_count=twin.collisions if twin is not None else 0,
        force_activations=force_activations,
        force_publications=force_pubs,
        recovery_triggers=mapper.mission.recovery_triggers if mapper is not None else 0,
        mission_status=mission_status,
        ticks=tick,
        duration=duration,
        accounting={"cyber": cyber_acct.to_dict(), "physical": phys_acct.to_dict()},
        network=net.metrics_snapshot(duration if duration > 0 else scn.tick_dt),
        scenario=scn.to_dict(),
        records=records,
        grid=mapper.grid if mapper is not None else None,
    )


def _state_frame(scn: Scenario, now: float, tick: int, twin, physical, mapper,
                 twin_mux, phys_mux, scan) -> dict:
    frame = {
        "t": now,
        "tick": tick,
        "case_id": scn.case_id,
        "twin_pose": [twin.pose.x, twin.pose.y, twin.pose.theta] if twin else None,
        "physical_pose": [physical.pose.x, physical.pose.y, physical.pose.theta],
        "twin_cmd": [twin.executed.v, twin.executed.omega] if twin else None,
        "active_channel": {
            "twin": twin_mux.active_channel if twin else None,
            "physical": phys_mux.active_channel,
        },
        "mission": mapper.mission.status.state if mapper else "n/a",
        "active_goal": mapper.mission.status.active_goal if mapper else None,
        "goals": [list(g) for g in scn.goals],
    }
    if scan is not None:
        step = max(1, len(scan.ranges) // 90)  # downsample for the wire
        frame["scan"] = {
            "angle_min": scan.angle_min,
            "angle_increment": scan.angle_increment * step,
            "range_max": scan.range_max,
            "ranges": [scan.ranges[i] for i in range(0, len(scan.ranges), step)],
        }
    if mapper is not None:
        frame["_grid"] = mapper.grid  # bridge turns this into snapshot/deltas
    return frame


def compute_metrics(report: CaseReport) -> dict:
    """Condensed task metrics from a finished run."""
    return {
        "goal_errors": report.goal_errors,
        "mean_tracking_error": report.mean_tracking_error,
        "completion_times": report.completion_times,
        "success": report.success,
        "collision_count": report.collision_count,
    }


def _fmt(v: float | None) -> str:
    return "" if v is None else repr(float(v))


def export_results(report: CaseReport, out_dir: str | Path) -> dict[str, Path]:
    """Write report.json, metrics.csv, trajectories.csv, map.pgm + map.yaml."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "report": out / "report.json",
        "metrics": out / "metrics.csv",
        "trajectories": out / "trajectories.csv",
        "map": out / "map.pgm",
        "map_meta": out / "map.yaml",
    }

    paths["report"].write_text(
        json.dumps(report.to_dict(), sort_keys=True, indent=2) + "\n", encoding="utf-8")

    with paths["metrics"].open("w", newline="", encoding="utf-8") as f:
        w = csv.writer(f)
        w.writerow(["goal_index", "goal_x", "goal_y", "goal_yaw",
                    "goal_error", "completion_time", "success"])
        for i, (gx, gy, gyaw) in enumerate(report.scenario.get("goals", [])):
            w.writerow([i, _fmt(gx), _fmt(gy), _fmt(gyaw),
                        _fmt(report.goal_errors[i]), _fmt(report.completion_times[i]),
                        int(report.success[i])])

    with paths["trajectories"].open("w", newline="", encoding="utf-8") as f:
        w = csv.writer(f)
        w.writerow(["tick", "t", "twin_x", "twin_y", "twin_theta",
                    "phys_x", "phys_y", "phys_theta"])
        for r in report.records:
            tp = r.twin_pose
            w.writerow([
                r.tick, _fmt(r.t),
                _fmt(tp.x) if tp else "", _fmt(tp.y) if tp else "",
                _fmt(tp.theta) if tp else "",
                _fmt(r.phys_pose.x), _fmt(r.phys_pose.y), _fmt(r.phys_pose.theta),
            ])

    if report.grid is not None:
        export_pgm(report.grid, paths["map"], paths["map_meta"])
    return paths


@dataclass
class TwinOnlyResult:
    status: str
    collisions: int
    ticks: int
    goals_done: list[float]


def simulate_twin_only(world: WorldModel, start: Pose2D,
                       goals: list[tuple[float, float, float]],
                       dwa: DWAParams, tick_dt: float = 0.05,
                       time_budget: float = 90.0,
                       resolution: float = 0.05,
                       inflation_margin: float = 0.05,
                       scan_spec: ScanSpec | None = None,
                       ground_truth_grid: bool = True,
                       sensor_model: InverseSensorModel = InverseSensorModel(),
                       occupied_threshold: float = 0.65,
                       map_every: int = 5) -> TwinOnlyResult:
    """One robot navigating its own world -- the twin site without a network.

    This is the loop behind the DWA safety gate: exact (or mapped) grid, no
    noise, collision counting against the true geometry.
    """
    robot = _Robot(world, start)
    if ground_truth_grid:
        grid = rasterize_world(world, resolution, sensor_model)
    else:
        grid = OccupancyGrid.for_bounds(world.bounds, resolution)
    snap: PlanningSnapshot | None = None
    mission = MissionExecutor(goals, dwa)
    control_every = max(1, round(dwa.control_dt / tick_dt))
    spec = scan_spec or ScanSpec()
    cmd = ZERO
    pending: Twist | None = None
    max_ticks = int(math.ceil(time_budget / tick_dt))
    tick = 0
    for tick in range(max_ticks):
        now = tick * tick_dt
        if not ground_truth_grid and tick % map_every == 0:
            scan = raycast_scan(world, robot.pose, spec, now)
            update_with_scan(grid, robot.pose, scan, sensor_model)
            snap = None
        if snap is None:
            snap = make_planning_snapshot(grid, occupied_threshold,
                                          world.robot_radius, inflation_margin)
        if tick % control_every == 0:
            pending = mission.step(robot.pose, robot.executed, snap, now)
        # commands take effect one tick after computation, like the full loop
        robot.step(cmd, tick_dt)
        if pending is not None:
            cmd = pending
            pending = None
        if mission.status.state != "running":
            break
    return TwinOnlyResult(mission.status.state, robot.collisions, tick + 1,
                          list(mission.status.goals_done))
