"""Reactive force feedback: scan-local repulsion at the physical site, and
its conversion into a velocity correction for the twin."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .geometry import LaserScan, Twist


@dataclass(frozen=True)
class ForceVector:
    fx: float
    fy: float
    stamp: float

    @property
    def magnitude(self) -> float:
        return math.hypot(self.fx, self.fy)


@dataclass(frozen=True)
class FeedbackParams:
    d0: float = 0.6          # influence distance
    k_rep: float = 0.05      # repulsion gain
    f_max: float = 10.0      # saturation
    k_v: float = 0.1         # linear-correction gain
    k_omega: float = 0.5     # angular-correction gain

    def __post_init__(self):
        if min(self.d0, self.k_rep, self.f_max, self.k_v, self.k_omega) <= 0:
            raise ValueError("feedback parameters must be positive")

    @property
    def publish_threshold(self) -> float:
        # below this the force is numerical dust, not worth channel traffic
        return 0.01 * self.f_max


def compute_feedback_force(scan: LaserScan, params: FeedbackParams) -> ForceVector:
    """Potential-field repulsion summed over beams inside the influence
    distance, in the robot body frame; saturated at f_max."""
    fx = 0.0
    fy = 0.0
    for i, d in enumerate(scan.ranges):
        if scan.no_return[i] or d >= params.d0:
            continue
        bearing = scan.angle_min + i * scan.angle_increment
        mag = params.k_rep * (1.0 / d - 1.0 / params.d0) / (d * d)
        # unit vector from the obstacle point back toward the robot
        fx -= mag * math.cos(bearing)
        fy -= mag * math.sin(bearing)
    norm = math.hypot(fx, fy)
    if norm > params.f_max:
        scale = params.f_max / norm
        fx *= scale
        fy *= scale
    return ForceVector(fx, fy, scan.stamp)


def force_to_correction(force: ForceVector, params: FeedbackParams,
                        v_max: float, omega_max: float) -> Twist:
    """Velocity correction: a forward-opposing force brakes (never reverses,
    never accelerates), a lateral force steers away."""
    if force.fx < 0.0:
        v_corr = max(-v_max, params.k_v * force.fx)
    else:
        v_corr = 0.0
    omega_corr = max(-omega_max, min(omega_max, params.k_omega * force.fy))
    return Twist(v_corr, omega_corr)


def override_command(intended: Twist, correction: Twist, v_max: float,
                     omega_max: float) -> Twist:
    """Absolute high-priority command: the intended (navigation) command
    readjusted by the correction. Forward speed only ever shrinks, into
    [0, v_max]; steering is the sum of intent and corrective turn."""
    v = max(0.0, min(v_max, intended.v + correction.v))
    w = max(-omega_max, min(omega_max, intended.omega + correction.omega))
    return Twist(v, w)
