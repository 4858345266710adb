"""Declarative scenario description and its TOML loader.

A scenario names an object preset, optional parameter overrides, and three
timed tables: controller commands, arm motions and external disturbances.
Angles are given in degrees in files and held in radians in memory.
"""

import math
from dataclasses import dataclass, field, fields, replace

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from ..estimation.core import ExplorationConfig
from ..exceptions import ConfigError
from ..grasp import GraspGains
from ..sim.contact import ContactParams
from ..sim.objects import MODES
from ..slip.controllers import SlipGains
from .presets import OBJECT_PRESETS, SURFACE_PRESETS

COMMAND_MODES = ("force", "avoidance", "linear", "rotational", "hinge", "explore")
FORCE_PROFILES = ("step", "sine")
ARM_KINDS = ("translate", "rotate")
DISTURBANCE_SHAPES = ("step", "ramp", "impulse")


@dataclass(frozen=True)
class Command:
    """Switch the outer controller to ``mode`` at time ``t``.

    ``force`` holds ``f_d`` (or a sine ``f_d + amplitude*sin(2 pi freq t')``);
    the trajectory modes use ``target`` (m or rad) over ``duration``;
    ``explore`` runs the exploration script.
    """

    t: float
    mode: str
    f_d: float = 0.0
    profile: str = "step"
    amplitude: float = 0.0
    freq: float = 0.0
    target: float = 0.0
    duration: float = 0.0


@dataclass(frozen=True)
class ArmMove:
    """Trapezoidal arm motion: downward translation (m) or roll (rad)."""

    t: float
    kind: str
    amount: float
    duration: float


@dataclass(frozen=True)
class Disturbance:
    """External load in the world frame (x down, y horizontal), N and N m.

    ``step`` holds the load for ``duration``; ``ramp`` rises linearly over
    ``ramp`` seconds then holds; ``impulse`` is a short ``step``. ``mass``
    (kg) rides with the object while the load is active, as for a weight
    resting on it.
    """

    t: float
    duration: float
    fx: float = 0.0
    fy: float = 0.0
    tau: float = 0.0
    shape: str = "step"
    ramp: float = 0.0
    mass: float = 0.0

    def load(self, t):
        """Scale factor in [0, 1] at time ``t``."""
        if t < self.t or t >= self.t + self.duration:
            return 0.0
        if self.shape == "ramp" and self.ramp > 0 and t < self.t + self.ramp:
            return (t - self.t) / self.ramp
        return 1.0


@dataclass(frozen=True)
class Dropout:
    finger: int
    sensor: int
    t_start: float
    t_end: float = math.inf


@dataclass(frozen=True)
class Sensing:
    cpi: float = 3200.0
    quantize: bool = True
    force_noise: float = 0.02
    torque_noise: float = 1e-4
    d: float = 0.01
    surface: str = "ideal"
    attenuation: float = 0.0
    dropouts: tuple = ()


@dataclass(frozen=True)
class Support:
    """Table under the object; it initially carries the object's weight."""

    enabled: bool = False
    stiffness: float = 2e4
    damping: float = 40.0


@dataclass(frozen=True)
class Rates:
    physics_hz: int = 10000
    inner_divisor: int = 20
    outer_divisor: int = 84

    @property
    def dt(self):
        return 1.0 / self.physics_hz

    @property
    def outer_hz(self):
        return self.physics_hz / self.outer_divisor


@dataclass(frozen=True)
class Scenario:
    name: str = "scenario"
    object: str = "plastic"
    seed: int = 0
    duration: float = 1.0
    mode: str = "planar"
    gravity: float = 9.81
    cog_angle: float = 0.0
    gripper_angle: float = 0.0
    initial_force: float = 0.0
    delta: float = 0.0
    gripper: dict = field(default_factory=dict)
    contacts: tuple = None
    estimates: tuple = None
    sensing: Sensing = field(default_factory=Sensing)
    support: Support = field(default_factory=Support)
    rates: Rates = field(default_factory=Rates)
    grasp_gains: GraspGains = field(default_factory=GraspGains)
    slip_gains: SlipGains = None
    exploration: ExplorationConfig = field(default_factory=ExplorationConfig)
    commands: tuple = ()
    arm: tuple = ()
    disturbances: tuple = ()
    drop_distance: float = 0.08
    decimation: int = 1

    def __post_init__(self):
        validate(self)

    @property
    def preset(self):
        return OBJECT_PRESETS[self.object]

    @property
    def true_contacts(self):
        return self.contacts if self.contacts is not None else self.preset.contacts

    @property
    def controller_estimates(self):
        return self.estimates if self.estimates is not None else self.true_contacts

    @property
    def outer_gains(self):
        if self.slip_gains is not None:
            return self.slip_gains
        return SlipGains(t_h=self.rates.outer_divisor / self.rates.physics_hz)

    def with_(self, **changes):
        return replace(self, **changes)


def validate(sc):
    """Raise :class:`ConfigError` with a field path on the first problem."""
    if sc.object not in OBJECT_PRESETS:
        raise ConfigError("object", f"unknown preset {sc.object!r}")
    if sc.mode not in MODES:
        raise ConfigError("mode", f"must be one of {sorted(MODES)}")
    if not sc.duration > 0:
        raise ConfigError("duration", "must be positive")
    if sc.decimation < 1:
        raise ConfigError("decimation", "must be >= 1")
    r = sc.rates
    for name in ("physics_hz", "inner_divisor", "outer_divisor"):
        v = getattr(r, name)
        if not (isinstance(v, int) and v > 0):
            raise ConfigError(f"rates.{name}", "must be a positive integer")
    if sc.sensing.surface not in SURFACE_PRESETS:
        raise ConfigError("sensing.surface", f"unknown surface {sc.sensing.surface!r}")
    if not 0.0 <= sc.sensing.attenuation < 1.0:
        raise ConfigError("sensing.attenuation", "must be in [0, 1)")
    for i, d in enumerate(sc.sensing.dropouts):
        if d.finger not in (0, 1) or d.sensor not in (0, 1, 2):
            raise ConfigError(f"sensing.dropout[{i}]", "finger must be 0/1 and sensor 0..2")
    for key in ("contacts", "estimates"):
        v = getattr(sc, key)
        if v is not None and len(v) != 2:
            raise ConfigError(key, "need one entry per finger")
    for i, c in enumerate(sc.commands):
        p = f"command[{i}]"
        if c.mode not in COMMAND_MODES:
            raise ConfigError(f"{p}.mode", f"must be one of {COMMAND_MODES}")
        if c.t < 0:
            raise ConfigError(f"{p}.t", "must be non-negative")
        if c.mode == "force" and c.profile not in FORCE_PROFILES:
            raise ConfigError(f"{p}.profile", f"must be one of {FORCE_PROFILES}")
        if c.mode in ("linear", "rotational"):
            if not c.duration > 0:
                raise ConfigError(f"{p}.duration", "must be positive")
            if not c.target > 0:
                raise ConfigError(f"{p}.target", "must be positive")
    if any(b.t < a.t for a, b in zip(sc.commands, sc.commands[1:])):
        raise ConfigError("command", "commands must be sorted by time")
    for i, a in enumerate(sc.arm):
        if a.kind not in ARM_KINDS:
            raise ConfigError(f"arm[{i}].kind", f"must be one of {ARM_KINDS}")
        if not a.duration > 0:
            raise ConfigError(f"arm[{i}].duration", "must be positive")
    for i, d in enumerate(sc.disturbances):
        if d.shape not in DISTURBANCE_SHAPES:
            raise ConfigError(f"disturbance[{i}].shape", f"must be one of {DISTURBANCE_SHAPES}")
        if not d.mass >= 0.0:
            raise ConfigError(f"disturbance[{i}].mass", "must be non-negative")
        if not d.duration > 0:
            raise ConfigError(f"disturbance[{i}].duration", "must be positive")


def _build(cls, data, path, degrees=()):
    """Instantiate a dataclass from a dict, rejecting unknown keys."""
    if not isinstance(data, dict):
        raise ConfigError(path, "expected a table")
    names = {f.name for f in fields(cls)}
    kw = {}
    for key, value in data.items():
        name = key[:-4] if key.endswith("_deg") and key[:-4] in degrees else key
        if name not in names:
            raise ConfigError(f"{path}.{key}" if path else key, "unknown field")
        if key.endswith("_deg"):
            value = math.radians(value)
        kw[name] = value
    try:
        return cls(**kw)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(path or cls.__name__.lower(), str(exc)) from None


def _contacts(items, path):
    if not isinstance(items, list) or len(items) != 2:
        raise ConfigError(path, "need a list of two contact tables")
    out = []
    for i, item in enumerate(items):
        item = dict(item)
        if "r_mm" in item:
            item["r"] = item.pop("r_mm") * 1e-3
        out.append(_build(ContactParams, item, f"{path}[{i}]"))
    return tuple(out)


def scenario_from_dict(data):
    data = dict(data)
    kw = {}
    sections = {
        "sensing": Sensing, "support": Support, "rates": Rates,
        "grasp_gains": GraspGains, "slip_gains": SlipGains,
        "exploration": ExplorationConfig,
    }
    for key, cls in sections.items():
        if key in data:
            table = dict(data.pop(key))
            if key == "sensing" and "dropout" in table:
                drops = table.pop("dropout")
                table["dropouts"] = tuple(_build(Dropout, d, f"sensing.dropout[{i}]")
                                          for i, d in enumerate(drops))
            kw[key] = _build(cls, table, key, degrees=("theta_e",))
    for key in ("contacts", "estimates"):
        if key in data:
            kw[key] = _contacts(data.pop(key), key)
    lists = {"command": ("commands", Command, ("target",)),
             "arm": ("arm", ArmMove, ("amount",)),
             "disturbance": ("disturbances", Disturbance, ())}
    for key, (name, cls, deg) in lists.items():
        if key in data:
            items = data.pop(key)
            if not isinstance(items, list):
                raise ConfigError(key, "expected an array of tables")
            kw[name] = tuple(_build(cls, d, f"{key}[{i}]", degrees=deg)
                             for i, d in enumerate(items))
    if "gripper" in data:
        kw["gripper"] = dict(data.pop("gripper"))
    for key in list(data):
        name = key[:-4] if key.endswith("_deg") else key
        if name not in {f.name for f in fields(Scenario)} or name in kw:
            raise ConfigError(key, "unknown field")
        value = data.pop(key)
        kw[name] = math.radians(value) if key.endswith("_deg") else value
    try:
        return Scenario(**kw)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError("scenario", str(exc)) from None


def load_scenario(path):
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(str(path), f"invalid TOML: {exc}") from None
    return scenario_from_dict(data)
