"""Scripted contact exploration on a simulated object resting on a table.

The gripper closes at ``f_g``, waits ``t1``, moves the arm down by ``d_e``
over ``t2`` so the table pushes the object through the grasp, then rolls the
gripper by ``theta_e`` and back. Each finger's log is then run through the
friction and radius estimators.
"""

from dataclasses import dataclass

from .core import ExplorationConfig


@dataclass(frozen=True)
class ExplorationResult:
    """Outcome of one exploration run.

    ``estimates`` holds a :class:`ContactEstimate` per finger (``None`` where
    estimation failed), ``contacts`` the resulting controller parameters,
    ``log`` the recorded samples and ``trace`` the full simulation trace.
    """

    estimates: tuple
    contacts: tuple
    log: object
    trace: object
    duration: float


def exploration_scenario(base=None, cfg=None, **changes):
    """Scenario that grasps an object on the table and explores it.

    ``base`` supplies object, contacts and seed; the command table, support
    and duration are replaced.
    """
    # Imported here: the harness depends on this package, not the reverse.
    from ..harness.scenario import Command, Scenario, Support

    cfg = cfg or ExplorationConfig()
    base = base or Scenario(name="explore")
    return base.with_(
        name=changes.pop("name", "explore"),
        exploration=cfg,
        support=Support(enabled=True),
        initial_force=cfg.f_g,
        duration=changes.pop("duration", cfg.duration + 0.05),
        commands=(Command(0.0, "explore"),),
        arm=(),
        **changes,
    )


def run_exploration(cfg=None, scenario=None, **changes):
    """Explore the object of ``scenario`` and estimate both contacts.

    Raises :class:`InsufficientDataError` when neither finger yields an
    estimate.
    """
    from ..exceptions import InsufficientDataError
    from ..harness.runner import run_scenario

    sc = exploration_scenario(scenario, cfg, **changes)
    trace, world = run_scenario(sc, return_world=True)
    results = getattr(world, "explore_result", None)
    if results is None:
        raise InsufficientDataError("exploration did not finish within the scenario duration")
    if all(r is None for r in results):
        reasons = [e["reason"] for e in trace.events_of("estimate_failed")]
        raise InsufficientDataError("; ".join(reasons) or "no finger produced an estimate")
    return ExplorationResult(tuple(results), tuple(world.est), world.explore_log, trace,
                             sc.exploration.duration)
