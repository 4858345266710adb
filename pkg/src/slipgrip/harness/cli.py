"""Command-line entry point.

Every subcommand prints a JSON report on stdout. With ``--out DIR`` the
report and the trace (``trace.csv`` or ``trace.json``) are written there as
well. Failures print ``{"error": ...}`` and exit nonzero.
"""

import argparse
import json
import math
import sys
from collections import Counter
from pathlib import Path

import numpy as np

from ..exceptions import ConfigError, InsufficientDataError, SimulationFault
from . import experiments as ex
from .metrics import BODE_FREQS
from .presets import OBJECT_PRESETS, SURFACE_PRESETS
from .rig import RIG_KINDS, rig_test
from .runner import run_scenario
from .scenario import load_scenario
from .trace import export_trace

EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_FAULT = 4
EXIT_IO = 5
EXIT_OTHER = 1


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else None
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _run(args):
    sc = load_scenario(args.scenario)
    if args.seed is not None:
        sc = sc.with_(seed=args.seed)
    trace = run_scenario(sc)
    events = Counter(e["kind"] for e in trace.events)
    report = {"scenario": sc.name, "seed": sc.seed, "duration": sc.duration,
              "samples": len(trace), "events": dict(events),
              "final": {"f_n": float(trace["f_n"][-1]), "px": float(trace["px"][-1]),
                        "py": float(trace["py"][-1]),
                        "theta_deg": math.degrees(float(trace["theta"][-1]))}}
    return trace, report


def _explore(args):
    return ex.explore_test(args.object, args.seed or 0)


def _step(args):
    return ex.step_test(args.object, args.seed or 0, args.f_from, args.f_to)


def _bode(args):
    freqs = tuple(args.freq) if args.freq else BODE_FREQS
    plant = ex.FirstOrderDelayPlant(args.plant_T, args.plant_delay) if args.analytic else None
    return ex.bode_test(args.object, args.seed or 0, freqs, plant=plant)


def _rig(args):
    seeds = range(args.seed or 0, (args.seed or 0) + args.runs)
    return None, rig_test(args.kind, args.surface, seeds=seeds)


def _slip(args):
    kw = {}
    if args.target is not None:
        kw["target"] = math.radians(args.target) if args.kind == "rotational" else args.target * 1e-3
    if args.duration is not None:
        kw["duration"] = args.duration
    return ex.slip_test(args.kind, args.object, args.seed or 0, **kw)


def _demo(args):
    return ex.demo(args.object, args.seed or 0)


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="random seed (default 0)")
    common.add_argument("--out", type=Path, default=None, help="directory for report and trace")
    common.add_argument("--format", choices=("csv", "json"), default="csv", help="trace format")
    common.add_argument("--decimation", type=int, default=1, help="keep every n-th trace row")

    p = argparse.ArgumentParser(prog="slipgrip", description="Slip-aware gripper simulation.")
    sub = p.add_subparsers(dest="command", required=True)
    objects = sorted(OBJECT_PRESETS)

    s = sub.add_parser("run", parents=[common], help="run a TOML scenario")
    s.add_argument("scenario", type=Path)
    s.set_defaults(func=_run)

    s = sub.add_parser("explore", parents=[common], help="contact exploration and estimation")
    s.add_argument("--object", choices=objects, default="plastic")
    s.set_defaults(func=_explore)

    s = sub.add_parser("step-test", parents=[common], help="grasp-force step response")
    s.add_argument("--object", choices=objects, default="wood")
    s.add_argument("--f-from", type=float, default=5.0)
    s.add_argument("--f-to", type=float, default=25.0)
    s.set_defaults(func=_step)

    s = sub.add_parser("bode", parents=[common], help="grasp-force frequency response")
    s.add_argument("--object", choices=objects, default="wood")
    s.add_argument("--freq", type=float, action="append", help="test frequency in Hz (repeatable)")
    s.add_argument("--analytic", action="store_true",
                   help="use the first-order-plus-delay reference plant")
    s.add_argument("--plant-T", type=float, default=0.0)
    s.add_argument("--plant-delay", type=float, default=0.002)
    s.set_defaults(func=_bode)

    s = sub.add_parser("rig-test", parents=[common], help="velocity-sensor bench test")
    s.add_argument("kind", choices=RIG_KINDS)
    s.add_argument("--surface", choices=sorted(SURFACE_PRESETS), default="ideal")
    s.add_argument("--runs", type=int, default=10)
    s.set_defaults(func=_rig)

    s = sub.add_parser("slip-test", parents=[common], help="slip controller experiment")
    s.add_argument("kind", choices=sorted(ex.SLIP_TESTS))
    s.add_argument("--object", choices=objects, default="plastic")
    s.add_argument("--target", type=float, default=None, help="mm, or degrees for rotational")
    s.add_argument("--duration", type=float, default=None)
    s.set_defaults(func=_slip)

    s = sub.add_parser("demo", parents=[common], help="full grasp, explore and manipulate sequence")
    s.add_argument("--object", choices=objects, default="plastic")
    s.set_defaults(func=_demo)
    return p


def _fail(code, kind, message, **extra):
    print(json.dumps({"error": {"type": kind, "message": message, **extra}}))
    return code


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.decimation < 1:
            raise ConfigError("decimation", "must be >= 1")
        trace, report = args.func(args)
        report = _jsonable(report)
        if args.out is not None:
            args.out.mkdir(parents=True, exist_ok=True)
            if trace is not None:
                path = export_trace(trace, args.format, args.out / f"trace.{args.format}",
                                    args.decimation)
                report["trace"] = str(path)
            with open(args.out / "report.json", "w") as fh:
                json.dump(report, fh, indent=2)
    except ConfigError as exc:
        return _fail(EXIT_CONFIG, "ConfigError", exc.message, path=exc.path)
    except InsufficientDataError as exc:
        return _fail(EXIT_DATA, "InsufficientDataError", str(exc))
    except SimulationFault as exc:
        return _fail(EXIT_FAULT, "SimulationFault", str(exc))
    except OSError as exc:
        return _fail(EXIT_IO, "OSError", str(exc))
    except (KeyError, ValueError) as exc:
        return _fail(EXIT_OTHER, type(exc).__name__, str(exc))
    print(json.dumps(report, indent=2))
    return 0


if __name__ == "__main__":
    sys.exit(main())
