"""Planar contact friction on an ellipsoidal limit surface.

The generalized slip velocity of a contact is ``(vx, vy, omega)``. Scaling the
spin by the rim radius ``r`` (``S = diag(1, 1, r)``) makes the limit surface a
sphere of radius ``mu * f_n`` in ``(fx, fy, tau / r)`` space.
"""

import math
from dataclasses import dataclass

from ..exceptions import SimulationFault


@dataclass(frozen=True, slots=True)
class ContactParams:
    mu_s: float = 0.45
    mu_c: float = 0.40
    mu_v: float = 0.0
    v_s: float = 2e-3
    r: float = 6e-3

    def __post_init__(self):
        if not 0 < self.mu_c <= self.mu_s:
            raise ValueError(f"need 0 < mu_c <= mu_s, got mu_c={self.mu_c}, mu_s={self.mu_s}")
        if not (self.r > 0 and self.v_s > 0):
            raise ValueError("r and v_s must be positive")


@dataclass(frozen=True, slots=True)
class PlanarWrench:
    fx: float = 0.0
    fy: float = 0.0
    tau: float = 0.0

    def __add__(self, other):
        return PlanarWrench(self.fx + other.fx, self.fy + other.fy, self.tau + other.tau)

    def __neg__(self):
        return PlanarWrench(-self.fx, -self.fy, -self.tau)

    def scaled(self, k):
        return PlanarWrench(k * self.fx, k * self.fy, k * self.tau)


@dataclass(frozen=True, slots=True)
class PlanarVelocity:
    vx: float = 0.0
    vy: float = 0.0
    omega: float = 0.0

    @property
    def linear_speed(self):
        return math.hypot(self.vx, self.vy)


def friction_coefficient(s, cp):
    """Stribeck curve evaluated at slip speed ``s`` (never negative)."""
    mu = cp.mu_c + (cp.mu_s - cp.mu_c) * math.exp(-(s / cp.v_s) ** 2) + cp.mu_v * s
    return mu if mu > 0.0 else 0.0


def slip_speed(v_rel, r):
    return math.sqrt(v_rel.vx ** 2 + v_rel.vy ** 2 + (r * v_rel.omega) ** 2)


def friction_wrench(v_rel, f_n, cp):
    """Sliding friction wrench acting on the object, opposing ``v_rel``.

    Returns the zero wrench when there is no relative motion; sticking is
    resolved by the caller.
    """
    if f_n < 0:
        raise SimulationFault(f"normal force must be non-negative, got {f_n}")
    r = cp.r
    s = slip_speed(v_rel, r)
    if s == 0.0 or f_n == 0.0:
        return PlanarWrench()
    k = -friction_coefficient(s, cp) * f_n / s
    return PlanarWrench(k * v_rel.vx, k * v_rel.vy, k * r * r * v_rel.omega)


def limit_surface_norm(wrench, r):
    """``||S^-1 w||_2``: load measured against a unit-coefficient limit surface."""
    return math.sqrt(wrench.fx ** 2 + wrench.fy ** 2 + (wrench.tau / r) ** 2)


def inside_static_surface(wrench, f_n, cp):
    return limit_surface_norm(wrench, cp.r) <= cp.mu_s * f_n
