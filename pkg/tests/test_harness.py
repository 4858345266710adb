import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from slipgrip.exceptions import ConfigError
from slipgrip.harness import (
    COLUMNS,
    FirstOrderDelayPlant,
    Scenario,
    Trace,
    bode_analysis,
    bode_test,
    export_trace,
    import_trace,
    load_scenario,
    run_scenario,
    scenario_from_dict,
    step_metrics,
    step_response_metrics,
    step_test,
)
from slipgrip.harness.experiments import (
    avoidance_test,
    bode_schedule,
    explore_test,
    hinge_test,
    linear_slip_test,
    rotational_slip_test,
    slip_test,
)
from slipgrip.harness.metrics import bode_point
from slipgrip.harness.rig import RIG_KINDS, rig_test, run_rig
from slipgrip.harness.scenario import Command, Disturbance, Sensing
from slipgrip.harness.trace import expected_rows

finite = dict(allow_nan=False, allow_infinity=False)


# -- scenarios ------------------------------------------------------------------

SCENARIO_TOML = """
name = "slide"
object = "case"
seed = 4
duration = 0.3
initial_force = 8.0
cog_angle_deg = 10.0

[sensing]
surface = "paper"
dropout = [{finger = 1, sensor = 2, t_start = 0.1}]

[[command]]
t = 0.0
mode = "avoidance"

[[command]]
t = 0.1
mode = "rotational"
target_deg = 20.0
duration = 1.0

[[arm]]
t = 0.05
kind = "rotate"
amount_deg = 30.0
duration = 0.2

[[disturbance]]
t = 0.1
duration = 0.1
fx = 0.5
shape = "ramp"
ramp = 0.05
"""


def test_scenario_file_loads(tmp_path):
    path = tmp_path / "s.toml"
    path.write_text(SCENARIO_TOML)
    sc = load_scenario(path)
    assert sc.name == "slide" and sc.object == "case" and sc.seed == 4
    assert sc.cog_angle == pytest.approx(math.radians(10.0))
    assert sc.commands[1].target == pytest.approx(math.radians(20.0))
    assert sc.arm[0].amount == pytest.approx(math.radians(30.0))
    assert sc.sensing.dropouts[0].sensor == 2
    assert sc.disturbances[0].load(0.125) == pytest.approx(0.5)
    assert len(run_scenario(sc)) == 3001


@pytest.mark.parametrize("data, path", [
    ({"object": "anvil"}, "object"),
    ({"duration": -1.0}, "duration"),
    ({"bogus": 1}, "bogus"),
    ({"command": [{"t": 0.0, "mode": "dance"}]}, "command[0].mode"),
    ({"command": [{"t": 0.0, "mode": "linear", "target": 0.0, "duration": 1.0}]},
     "command[0].target"),
    ({"rates": {"outer_divisor": 0}}, "rates.outer_divisor"),
    ({"sensing": {"surface": "glass"}}, "sensing.surface"),
    ({"arm": [{"t": 0.0, "kind": "spin", "amount": 1.0, "duration": 1.0}]}, "arm[0].kind"),
    ({"disturbance": [{"t": 0.0, "duration": 1.0, "mass": -0.1}]}, "disturbance[0].mass"),
])
def test_config_errors_name_the_field(data, path):
    with pytest.raises(ConfigError) as info:
        scenario_from_dict(data)
    assert info.value.path == path


def test_invalid_toml(tmp_path):
    path = tmp_path / "bad.toml"
    path.write_text("duration = = 1")
    with pytest.raises(ConfigError):
        load_scenario(path)


# -- runner ------------------------------------------------------------------------------

def test_idle_scenario_without_gravity_stays_put():
    quiet = Sensing(force_noise=0.0, torque_noise=0.0)
    tr = run_scenario(Scenario(gravity=0.0, duration=0.1, sensing=quiet))
    for c in COLUMNS:
        if c != "t":
            assert np.all(tr[c] == tr[c][0]), c
    assert tr.events == []


def test_resting_weight_carries_its_mass():
    # A weight resting on a free object adds its mass, so the pair falls at g.
    w = 0.5
    sc = Scenario(object="plastic", duration=0.02, initial_force=0.0,
                  disturbances=(Disturbance(0.0, 1.0, fx=w * 9.81, mass=w),))
    tr = run_scenario(sc)
    assert tr["vx"][-1] == pytest.approx(9.81 * 0.02, rel=0.02)


def test_rate_fidelity():
    tr = run_scenario(Scenario(duration=0.5, initial_force=5.0))
    assert abs(tr.metadata["inner_count"] - 0.5 * 500) <= 1
    assert abs(tr.metadata["outer_count"] - 0.5 * 10000 / 84) <= 1
    assert "84" in tr.metadata["outer_note"]
    assert np.all(np.diff(tr["t"]) > 0)


def test_step_scenario_on_stiff_object():
    _, rep = step_test("wood", 0)
    for k in ("t_r", "t_50", "M_p", "t_s"):
        assert rep[k] is not None and math.isfinite(rep[k])
    assert rep["M_p"] > 0


def test_same_seed_gives_identical_bytes(tmp_path):
    sc = Scenario(object="plastic", duration=0.3, initial_force=6.0,
                  commands=(Command(0.0, "avoidance"),))
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    export_trace(run_scenario(sc), "csv", a)
    export_trace(run_scenario(sc), "csv", b)
    assert a.read_bytes() == b.read_bytes()
    c = tmp_path / "c.csv"
    export_trace(run_scenario(sc.with_(seed=1)), "csv", c)
    assert a.read_bytes() != c.read_bytes()


def test_decimated_scenario_keeps_every_nth_row():
    full = run_scenario(Scenario(duration=0.05, initial_force=5.0))
    dec = run_scenario(Scenario(duration=0.05, initial_force=5.0, decimation=7))
    assert len(dec) == expected_rows(len(full), 7)
    np.testing.assert_array_equal(dec["f_n"], full["f_n"][::7])


# -- trace export ---------------------------------------------------------------------------

def test_empty_trace_exports_header_only(tmp_path):
    path = export_trace(Trace(), "csv", tmp_path / "e.csv")
    assert path.read_text() == ",".join(COLUMNS) + "\n"
    assert len(import_trace(path)) == 0


@pytest.mark.parametrize("fmt", ["csv", "json"])
def test_round_trip_is_bit_exact(tmp_path, fmt):
    rng = np.random.default_rng(0)
    cols = {c: rng.normal(size=50) * 10.0 ** rng.integers(-12, 6) for c in COLUMNS}
    cols["t"] = np.arange(50) * 1e-4
    tr = Trace(cols, [{"kind": "stick", "t": 0.001}], {"seed": 3})
    back = import_trace(export_trace(tr, fmt, tmp_path / f"x.{fmt}"))
    for c in COLUMNS:
        np.testing.assert_array_equal(back[c], tr[c])
    if fmt == "json":
        assert back.events == tr.events and back.metadata["seed"] == 3


@settings(max_examples=30, deadline=None)
@given(n=st.integers(0, 300), dec=st.integers(1, 40))
def test_decimation_row_count(tmp_path_factory, n, dec):
    tr = Trace.from_columns(t=np.arange(n) * 1e-4)
    path = export_trace(tr, "csv", tmp_path_factory.mktemp("d") / "t.csv", decimation=dec)
    assert len(import_trace(path)) == math.ceil(n / dec)


def test_export_errors(tmp_path):
    with pytest.raises(ValueError):
        export_trace(Trace(), "xml", tmp_path / "t.xml")
    with pytest.raises(OSError, match="missing"):
        export_trace(Trace(), "csv", tmp_path / "missing" / "t.csv")
    bad = tmp_path / "bad.csv"
    bad.write_text("a,b\n")
    with pytest.raises(ValueError):
        import_trace(bad)


# -- step metrics ----------------------------------------------------------------------------

def test_first_order_step_metrics():
    T = 0.01
    t = np.arange(0, 0.2, 1e-6)
    y = 5.0 + 20.0 * (1.0 - np.exp(-t / T))
    m = step_response_metrics(t, y, 5.0, 25.0)
    assert m.t_r == pytest.approx(T * math.log(9.0), rel=1e-4)
    assert m.t_50 == pytest.approx(T * math.log(2.0), rel=1e-4)
    assert m.M_p == 0.0
    assert m.t_s == pytest.approx(T * math.log(50.0), rel=1e-3)


def test_instant_step_metrics():
    t = np.linspace(0, 1, 11)
    m = step_response_metrics(t, np.full(11, 25.0), 5.0, 25.0)
    assert (m.t_r, m.t_50, m.M_p, m.t_s) == (0.0, 0.0, 0.0, 0.0)


def test_unattained_metrics_are_none():
    t = np.linspace(0, 1, 101)
    m = step_response_metrics(t, 5.0 + 5.0 * t, 5.0, 25.0)
    assert m.t_r is None and m.t_50 is None and m.t_s is None


def test_step_metrics_finds_step_in_trace():
    t = np.arange(0, 0.1, 1e-4)
    f_d = np.where(t >= 0.02, 25.0, 5.0)
    f_n = np.where(t >= 0.02, 5.0 + 20.0 * (1 - np.exp(-(t - 0.02) / 0.005)), 5.0)
    m = step_metrics(Trace.from_columns(t=t, f_d=f_d, f_n=f_n), 5.0, 25.0)
    assert m.t_50 == pytest.approx(0.005 * math.log(2.0), abs=2e-4)


# -- frequency response ------------------------------------------------------------------------

def _sine_trace(freq, response):
    t = np.arange(0, 4.0 / freq, 1e-4)
    u = 15.0 + 5.0 * np.sin(2 * math.pi * freq * t)
    return t, u, response(t)


def test_identical_signals_give_unity():
    for f in (1.0, 16.0, 64.0):
        t, u, y = _sine_trace(f, lambda t: 15.0 + 5.0 * np.sin(2 * math.pi * f * t))
        p = bode_point(t, u, y, f)
        assert p.magnitude == pytest.approx(0.0, abs=1e-9)
        assert p.phase == pytest.approx(0.0, abs=1e-9)


def test_pure_delay_phase_at_64_hz():
    f = 64.0
    t, u, y = _sine_trace(f, lambda t: 15.0 + 5.0 * np.sin(2 * math.pi * f * (t - 0.002)))
    assert bode_point(t, u, y, f).phase == pytest.approx(-46.08, abs=0.01)


def test_first_order_magnitude_at_16_hz():
    plant = FirstOrderDelayPlant(T=0.01, delay=0.0)
    _, rep = bode_test(freqs=(16.0,), plant=plant)
    expected = -20 * math.log10(math.sqrt(1 + (2 * math.pi * 16 * 0.01) ** 2))
    assert rep["points"][0]["magnitude_db"] == pytest.approx(expected, abs=1e-6)
    assert rep["points"][0]["phase_deg"] == pytest.approx(plant.phase(16.0), abs=1e-6)


def test_short_segment_is_rejected():
    t, u, y = _sine_trace(8.0, lambda t: 15.0 + np.zeros_like(t))
    m = t < 1.5 / 8.0
    with pytest.raises(ValueError, match="two periods"):
        bode_point(t[m], u[m], y[m], 8.0)


def test_bode_schedule_covers_every_frequency():
    seg = bode_schedule()
    assert sorted(seg) == [1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0]
    for f, (t0, t1) in seg.items():
        assert t1 - t0 >= 2.0 / f


def test_bode_analysis_reads_segments_from_metadata():
    tr, rep = bode_test(freqs=(4.0, 64.0), plant=FirstOrderDelayPlant())
    again = bode_analysis(tr, (4.0, 64.0))
    assert [p.phase for p in again] == [p["phase_deg"] for p in rep["points"]]


# -- rig ---------------------------------------------------------------------------------------

def test_perfect_rig_has_no_error():
    for kind in ("linear", "rotation", "combined"):
        err = run_rig(kind, "ideal", 0, quantize=False, calibrate=False)
        assert max(abs(e) for e in err) < 1e-9


def test_quantized_rig_within_two_millimetres():
    rep = rig_test("linear", "ideal")
    assert rep["runs"] == 10 and rep["max_abs_distance_error_mm"] <= 2.0


def test_rejection_rig_comparable_to_linear():
    lin = rig_test("linear", "wood")
    rej = rig_test("rejection", "wood")
    assert abs(rej["distance_mm"]["mean"]) <= 2 * max(abs(lin["distance_mm"]["mean"]), 0.01)


def test_unknown_rig_test():
    assert "combined" in RIG_KINDS
    with pytest.raises(ValueError):
        run_rig("zigzag")


# -- experiment reports ---------------------------------------------------------------------------

def test_reports_cover_table_metrics():
    _, step = step_test("case", 0)
    assert {"t_r", "t_50", "M_p", "t_s"} <= set(step)
    assert {"x_mm", "y_mm", "theta_deg", "distance_mm"} <= set(rig_test("combined", seeds=[0]))
    _, ex = explore_test("plastic", 0)
    assert {"mu_c", "mu_s", "mu_v", "r"} <= set(ex["fingers"][0])
    _, lin = linear_slip_test("plastic", 0, target=0.01, duration=1.0, settle=0.3)
    assert {"final_displacement", "error", "estimated_displacement", "stick_events"} <= set(lin)
    _, rot = rotational_slip_test("plastic", 0, duration=1.0, settle=0.3)
    assert {"rotation_deg", "error_deg", "estimated_rotation_deg"} <= set(rot)
    _, hin = hinge_test("plastic", 0, sweep_time=1.0, settle=0.2)
    assert "orientation_change_deg" in hin
    _, av = avoidance_test("plastic", 0, duration=2.5)
    assert {"rise_ticks", "max_slip", "decay_max_residual"} <= set(av)


def test_unknown_slip_test():
    with pytest.raises(ValueError):
        slip_test("sideways")
