from dataclasses import dataclass


@dataclass(frozen=True, slots=True)
class TrajectorySpec:
    """Symmetric trapezoid: accelerate, cruise and decelerate for a third each."""

    target: float
    duration: float
    profile: str = "trapezoidal"

    def __post_init__(self):
        if not self.duration > 0:
            raise ValueError("duration must be positive")
        if self.profile != "trapezoidal":
            raise ValueError(f"unsupported profile {self.profile!r}")

    @property
    def cruise_velocity(self):
        return 1.5 * self.target / self.duration


def trapezoid(spec, t):
    """Desired ``(position, velocity)`` at time ``t`` since the start."""
    if t < 0:
        raise ValueError("t must be non-negative")
    T = spec.duration
    if t >= T:
        return spec.target, 0.0
    v = spec.cruise_velocity
    t1 = T / 3.0
    a = v / t1
    if t < t1:
        return 0.5 * a * t * t, a * t
    if t < 2.0 * t1:
        return 0.5 * a * t1 * t1 + v * (t - t1), v
    tr = T - t
    return spec.target - 0.5 * a * tr * tr, a * tr
