"""Object, gripper and rig-surface presets.

Object masses, dimensions and per-finger friction follow the five test
objects; contact stiffness is picked per rigidity class. The sponge's
friction was never identified on hardware, so its values are made up.
"""

from dataclasses import dataclass

from ..sensors.calibration import OpticalAxisCalibration
from ..sim.contact import ContactParams
from ..sim.gripper import GripperParams
from ..sim.objects import ObjectParams

#: How far below the top edge the fingers grasp the object (m).
GRASP_DEPTH = 0.020


@dataclass(frozen=True)
class ObjectPreset:
    name: str
    mass: float
    dims: tuple  # (h, w, d) in m
    contacts: tuple  # ContactParams per finger
    k2: float
    d2: float = 20.0

    @property
    def cog_offset(self):
        return self.dims[0] / 2.0 - GRASP_DEPTH

    @property
    def inertia_grasp(self):
        h, w, _ = self.dims
        return self.mass * ((h * h + w * w) / 12.0 + self.cog_offset ** 2)

    def object_params(self):
        return ObjectParams(self.mass, self.inertia_grasp, self.cog_offset, self.dims[2])

    def gripper_params(self, **overrides):
        kw = {"k2": self.k2, "d2": self.d2}
        kw.update(overrides)
        return GripperParams(**kw)


def _cp(mu_s, mu_c, mu_v, r_mm):
    return ContactParams(mu_s=mu_s, mu_c=mu_c, mu_v=mu_v, r=r_mm * 1e-3)


OBJECT_PRESETS = {
    "sponge": ObjectPreset(
        "sponge", 6.8e-3, (0.092, 0.062, 0.027),
        (_cp(0.62, 0.55, 0.0, 8.0), _cp(0.62, 0.55, 0.0, 8.0)), k2=1.5e3),
    "case": ObjectPreset(
        "case", 138.7e-3, (0.169, 0.070, 0.051),
        (_cp(0.533, 0.511, 1.106, 6.31), _cp(0.507, 0.479, 1.914, 5.04)), k2=4e3),
    "cardboard": ObjectPreset(
        "cardboard", 160.6e-3, (0.153, 0.070, 0.069),
        (_cp(0.565, 0.538, 0.578, 6.12), _cp(0.540, 0.511, 0.379, 5.84)), k2=6e3),
    "plastic": ObjectPreset(
        "plastic", 84.1e-3, (0.140, 0.081, 0.046),
        (_cp(0.411, 0.366, 11.694, 7.64), _cp(0.399, 0.363, 3.60, 7.40)), k2=1.5e4),
    "wood": ObjectPreset(
        "wood", 141.3e-3, (0.180, 0.060, 0.028),
        (_cp(0.499, 0.444, -1.123, 7.92), _cp(0.507, 0.432, -1.649, 3.91)), k2=5e4),
}

#: Presets ordered from softest to stiffest contact.
STIFFNESS_ORDER = ("sponge", "case", "cardboard", "plastic", "wood")

#: Objects used in the slip experiments (the sponge is too light to slip).
SLIP_OBJECTS = ("cardboard", "case", "plastic", "wood")


def object_preset(name):
    try:
        return OBJECT_PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown object preset {name!r}; choose from {sorted(OBJECT_PRESETS)}") from None


def _surface(*pairs):
    return tuple((OpticalAxisCalibration(*x), OpticalAxisCalibration(*y)) for x, y in pairs)


#: True per-sensor, per-axis distortion ``(a, b)`` of the optical sensors on
#: a few rig surfaces.
SURFACE_PRESETS = {
    "ideal": _surface(((0.0, 1.0), (0.0, 1.0)), ((0.0, 1.0), (0.0, 1.0)), ((0.0, 1.0), (0.0, 1.0))),
    "wood": _surface(((0.8, 0.93), (0.6, 0.95)), ((1.1, 0.91), (0.7, 0.94)), ((0.5, 0.96), (0.9, 0.92))),
    "paper": _surface(((0.4, 0.98), (0.3, 0.99)), ((0.6, 0.97), (0.2, 1.0)), ((0.5, 0.98), (0.4, 0.97))),
    "fabric": _surface(((1.6, 0.86), (1.3, 0.88)), ((1.9, 0.84), (1.2, 0.9)), ((1.4, 0.87), (1.7, 0.85))),
}
