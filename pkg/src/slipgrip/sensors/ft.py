"""Force/torque sensors and the mirror transform between finger frames."""

from dataclasses import dataclass

from ..sim.contact import PlanarVelocity, PlanarWrench


@dataclass(frozen=True, slots=True)
class FTReading:
    wrench: PlanarWrench
    f_n: float

    def __post_init__(self):
        if self.f_n < 0:
            raise ValueError("f_n must be non-negative")


def simulate_ft_reading(wrench, f_n, rng=None, force_noise=0.0, torque_noise=0.0):
    """Noisy reading of the tangential wrench and normal force on one finger."""
    if rng is None or (force_noise == 0.0 and torque_noise == 0.0):
        return FTReading(wrench, max(f_n, 0.0))
    nx, ny, nn = rng.normal(0.0, force_noise, size=3)
    nt = rng.normal(0.0, torque_noise)
    return FTReading(
        PlanarWrench(wrench.fx + nx, wrench.fy + ny, wrench.tau + nt),
        max(f_n + nn, 0.0),
    )


# The second finger faces the first: its sensor frame is the middle frame
# rotated by pi about the gripper x axis, so y and the spin flip sign.
def finger_to_middle(finger, value):
    if finger == 0:
        return value
    if isinstance(value, PlanarWrench):
        return PlanarWrench(value.fx, -value.fy, -value.tau)
    return PlanarVelocity(value.vx, -value.vy, -value.omega)


middle_to_finger = finger_to_middle
