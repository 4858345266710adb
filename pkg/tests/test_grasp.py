import pytest
from hypothesis import given
from hypothesis import strategies as st

from slipgrip.grasp import (
    GraspCtrlState,
    GraspForceController,
    GraspGains,
    force_to_voltage,
    grasp_update,
    voltage_to_force,
)
from slipgrip.harness.experiments import step_test
from slipgrip.harness.presets import STIFFNESS_ORDER

finite = dict(allow_nan=False, allow_infinity=False)
G = GraspGains()


def test_zero_error_is_pure_feedforward():
    f_c, _ = grasp_update(GraspCtrlState(), 12.0, 12.0, G)
    assert f_c == 12.0


def test_first_tick_after_step():
    f_c, state = grasp_update(GraspCtrlState(), 25.0, 5.0, G)
    eta = 5.0 * 20.0 ** 2 + 1.0
    assert eta == 2001.0
    expected = 25.0 + 2.0 * 20.0 / eta + min(100.0 * 20.0 * 0.002, 10.0 / eta)
    assert f_c == pytest.approx(expected, rel=1e-12)
    assert f_c == pytest.approx(25.025, abs=1e-3)
    assert state.prev_error == 20.0


def test_persistent_error_saturates_integral():
    state = GraspCtrlState(prev_error=1.0)
    for _ in range(200):
        f_c, state = grasp_update(state, 10.0, 9.0, G)
    assert G.k_I * state.integral == pytest.approx(G.I_max)
    assert f_c == pytest.approx(10.0 + 2.0 + 10.0)


def test_voltage_map():
    assert force_to_voltage(0.0, 3.9166) == 0.0
    assert force_to_voltage(-7.8332, 3.9166) == pytest.approx(2.0)
    assert voltage_to_force(force_to_voltage(12.5, 3.9166), 3.9166) == pytest.approx(12.5)
    with pytest.raises(ValueError):
        force_to_voltage(1.0, 0.0)


def test_gains_validation():
    with pytest.raises(ValueError):
        GraspGains(k_P=0.0)


@given(st.lists(st.tuples(st.floats(-50, 50, **finite), st.floats(0, 50, **finite)),
                min_size=1, max_size=60))
def test_windup_bound_and_gain_scaling(seq):
    state = GraspCtrlState()
    for f_d, f_n in seq:
        e = f_d - f_n
        eta = G.gamma * (e - state.prev_error) ** 2 + 1.0
        f_c, state = grasp_update(state, f_d, f_n, G)
        assert eta >= 1.0
        assert abs(G.k_I * state.integral) <= G.I_max / eta * (1 + 1e-12)
        assert abs(f_c - f_d - G.k_I * state.integral) <= G.k_P * abs(e) * (1 + 1e-12) + 1e-12


@given(st.lists(st.tuples(st.floats(0, 40, **finite), st.floats(0, 40, **finite)), max_size=30))
def test_controller_is_deterministic(seq):
    a, b = GraspForceController(), GraspForceController()
    assert [a.update(*x) for x in seq] == [b.update(*x) for x in seq]


def test_voltage_ceiling():
    ctrl = GraspForceController(v_max=20.0)
    _, v_t, applied = ctrl.update(500.0, 0.0)
    assert v_t == -20.0 and applied == pytest.approx(20.0 * ctrl.k_f)
    ctrl.reset()
    assert ctrl.state == GraspCtrlState()


@pytest.mark.parametrize("obj", STIFFNESS_ORDER)
@pytest.mark.parametrize("f_to", [2.0, 40.0])
def test_closed_loop_enters_band_within_half_second(obj, f_to):
    _, rep = step_test(obj, 0, f_from=5.0, f_to=f_to, t_step=0.1, duration=0.6)
    assert rep["t_s"] is not None and rep["t_s"] <= 0.5
    assert rep["final_error"] <= 0.02 * abs(f_to - 5.0)
