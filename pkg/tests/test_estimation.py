import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sklearn.base import clone

from slipgrip.estimation import (
    LOG_COLUMNS,
    ContactEstimate,
    ContactRadiusEstimator,
    ContactSampleLog,
    ExplorationConfig,
    FrictionEstimator,
    estimate_contact,
    estimate_friction,
    estimate_radius,
    linear_regression,
    run_exploration,
)
from slipgrip.estimation.core import OMEGA_MAX, V_MIN
from slipgrip.exceptions import InsufficientDataError
from slipgrip.harness.scenario import Scenario
from slipgrip.sim import ContactParams

finite = dict(allow_nan=False, allow_infinity=False)


def _log(**cols):
    n = len(next(iter(cols.values())))
    cols.setdefault("t", np.arange(n) / 120.0)
    return ContactSampleLog.from_columns(**cols)


def _slide_log(mu_c, mu_v, speeds, fn=5.0, pre=()):
    v = np.r_[[s for s, _ in pre], speeds]
    mu = np.r_[[m for _, m in pre], mu_c + mu_v * np.asarray(speeds)]
    return _log(fx=mu * fn, fn=np.full(v.size, fn), vx=v)


# -- regression -----------------------------------------------------------------

def test_regression_on_exact_line():
    x = np.linspace(0, 1, 7)
    assert linear_regression(x, 0.5 + 2.0 * x) == pytest.approx((0.5, 2.0))


def test_regression_two_points_interpolates():
    b0, b1 = linear_regression([1.0, 3.0], [2.0, -2.0])
    assert b0 + b1 * 1.0 == pytest.approx(2.0)
    assert b0 + b1 * 3.0 == pytest.approx(-2.0)


@given(st.floats(-5, 5, **finite), st.floats(-5, 5, **finite), st.integers(0, 2 ** 16))
def test_regression_recovers_random_line(b0, b1, seed):
    x = np.random.default_rng(seed).uniform(-1, 1, 50)
    got = linear_regression(x, b0 + b1 * x)
    assert got[0] == pytest.approx(b0, abs=1e-9)
    assert got[1] == pytest.approx(b1, abs=1e-9)


def test_regression_degenerate():
    with pytest.raises(ValueError):
        linear_regression([1.0, 1.0], [0.0, 1.0])


# -- friction ------------------------------------------------------------------------

def test_all_samples_below_normal_force_floor():
    log = _slide_log(0.4, 0.0, np.linspace(0.005, 0.02, 20), fn=0.5)
    with pytest.raises(InsufficientDataError, match="insufficient slip"):
        estimate_friction(log)


def test_pre_slip_only_log_fails():
    pre = [(v, m) for v, m in zip(np.linspace(0, 1.5e-3, 10), np.linspace(0.1, 0.43, 10))]
    log = _slide_log(0.4, 2.0, [], pre=pre)
    with pytest.raises(InsufficientDataError):
        estimate_friction(log)


def test_two_kinetic_samples_give_exact_line():
    pre = [(v, m) for v, m in zip(np.linspace(0, 1.5e-3, 10), np.linspace(0.1, 0.43, 10))]
    log = _slide_log(0.4, 2.0, [0.005, 0.01], pre=pre)
    mu_c, mu_s, mu_v = estimate_friction(log)
    assert mu_c == pytest.approx(0.4, abs=1e-12)
    assert mu_v == pytest.approx(2.0, abs=1e-9)
    assert mu_s == pytest.approx(0.43)


def test_filters_are_sound():
    rng = np.random.default_rng(0)
    n = 200
    log = _log(fx=rng.uniform(0, 3, n), fn=rng.uniform(0, 8, n),
               vx=rng.uniform(0, 0.02, n), omega=rng.uniform(-0.3, 0.3, n),
               tau=rng.uniform(-0.01, 0.01, n))
    fe = FrictionEstimator().fit(log.features)
    used = fe.static_mask_ | fe.kinetic_mask_
    assert np.all(np.abs(log.omega[used]) <= OMEGA_MAX)
    assert np.all(log.fn[used] >= 1.0)
    assert np.all(log.vx[fe.static_mask_] < V_MIN)
    assert np.all(log.vx[fe.kinetic_mask_] >= V_MIN)
    re = ContactRadiusEstimator(mu_c=0.4).fit(log.features)
    assert np.all(np.abs(log.omega[re.used_mask_]) >= 0.1)
    assert np.all(log.vx[re.used_mask_] <= 5e-3)
    assert np.all(log.fn[re.used_mask_] >= 1.0)


@settings(max_examples=50)
@given(st.integers(0, 2 ** 16))
def test_static_never_below_coulomb(seed):
    rng = np.random.default_rng(seed)
    n = 40
    log = _log(fx=rng.uniform(0, 4, n), fn=rng.uniform(1, 8, n), vx=rng.uniform(0, 0.02, n))
    try:
        mu_c, mu_s, _ = estimate_friction(log)
    except InsufficientDataError:
        return
    assert mu_s >= mu_c


@given(st.floats(1.0, 10.0, **finite))
def test_estimates_invariant_to_force_scale(k):
    log = _slide_log(0.4, 1.0, np.linspace(0.003, 0.02, 15),
                     pre=[(0.0, 0.2), (1e-3, 0.44)])
    scaled = ContactSampleLog(log.data.copy())
    for c in ("fx", "fy", "tau", "fn"):
        scaled.data[:, LOG_COLUMNS.index(c)] *= k
    np.testing.assert_allclose(estimate_friction(scaled), estimate_friction(log), rtol=1e-9)


def test_friction_estimator_api():
    log = _slide_log(0.4, 1.0, np.linspace(0.003, 0.02, 15))
    est = clone(FrictionEstimator(v_min=1e-3)).fit(log.features)
    assert est.get_params()["v_min"] == 1e-3
    np.testing.assert_allclose(est.predict([0.0, 0.01]), [0.4, 0.41])


# -- radius -------------------------------------------------------------------------

def test_radius_from_constructed_samples():
    w = np.linspace(0.2, 2.0, 10)
    log = _log(tau=np.full(10, 0.004 * 5.0), fn=np.full(10, 5.0), omega=w)
    assert estimate_radius(log, 0.5) == pytest.approx(8e-3, rel=1e-12)


def test_radius_needs_rotation():
    log = _log(tau=np.full(10, 0.01), fn=np.full(10, 5.0), omega=np.full(10, 0.05))
    with pytest.raises(InsufficientDataError, match="insufficient rotation"):
        estimate_radius(log, 0.5)


def test_unreliable_radius_for_vanishing_friction():
    log = _slide_log(0.01, 0.0, np.linspace(0.003, 0.02, 15))
    est = estimate_contact(log, log)
    assert not est.r_reliable and math.isnan(est.r)
    cp = est.to_contact_params()
    assert cp.r == 6e-3


def test_contact_estimate_to_params_clamps():
    cp = ContactEstimate(mu_c=-0.1, mu_s=-0.1, mu_v=0.0, r=5e-3).to_contact_params()
    assert cp.mu_c > 0 and cp.mu_s >= cp.mu_c


# -- logs ------------------------------------------------------------------------------

def test_log_csv_round_trip(tmp_path):
    rng = np.random.default_rng(2)
    data = rng.normal(size=(25, len(LOG_COLUMNS)))
    data[:, -1] = rng.integers(0, 2, 25)
    path = tmp_path / "log.csv"
    ContactSampleLog(data).to_csv(path)
    assert path.read_text().splitlines()[0] == ",".join(LOG_COLUMNS)
    back = ContactSampleLog.from_csv(path)
    np.testing.assert_array_equal(back.data, data)
    assert len(back.for_finger(1)) == int(data[:, -1].sum())


def test_log_csv_rejects_wrong_header(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("a,b\n1,2\n")
    with pytest.raises(ValueError):
        ContactSampleLog.from_csv(path)


def test_exploration_config_validation():
    cfg = ExplorationConfig()
    assert cfg.duration == pytest.approx(1.0 + 0.5 * 2)
    with pytest.raises(ValueError):
        ExplorationConfig(t2=0.0)


# -- simulation oracles ----------------------------------------------------------------

def _explore(cp):
    return run_exploration(scenario=Scenario(object="plastic", contacts=(cp, cp)))


@pytest.fixture(scope="module")
def stribeck_run():
    return _explore(ContactParams(mu_s=0.45, mu_c=0.40, mu_v=2.0, r=6e-3))


@pytest.fixture(scope="module")
def rim_run():
    return _explore(ContactParams(mu_s=0.45, mu_c=0.40, mu_v=0.0, r=8e-3))


def test_friction_recovered_from_simulation(stribeck_run):
    for est in stribeck_run.estimates:
        assert est.mu_s == pytest.approx(0.45, abs=0.02)
        assert est.mu_c == pytest.approx(0.40, abs=0.01)
        assert est.mu_v == pytest.approx(2.0, abs=0.5)


def test_radius_recovered_from_simulation(rim_run):
    for est in rim_run.estimates:
        assert est.r_reliable
        assert est.r == pytest.approx(8e-3, abs=0.5e-3)


def test_default_exploration_recovers_coulomb():
    res = run_exploration(scenario=Scenario(object="plastic"))
    truth = Scenario(object="plastic").true_contacts
    for est, cp in zip(res.estimates, truth):
        assert est.mu_c == pytest.approx(cp.mu_c, rel=0.05)
    assert res.duration <= 2.0


def test_estimated_friction_reproduces_episode(stribeck_run):
    # Feed the estimates back into the friction law and compare with the
    # recorded tangential force on the kinetic samples.
    log = stribeck_run.log
    for finger, est in enumerate(stribeck_run.estimates):
        lg = log.for_finger(finger)
        v = np.hypot(lg.vx, lg.vy)
        m = (v >= V_MIN) & (np.abs(lg.omega) <= OMEGA_MAX) & (lg.fn >= 1.0)
        f_t = np.hypot(lg.fx, lg.fy)[m]
        pred = (est.mu_c + est.mu_v * v[m]) * lg.fn[m]
        rms = math.sqrt(np.mean((pred - f_t) ** 2))
        assert rms <= 0.05 * math.sqrt(np.mean(f_t ** 2))


def test_vanishing_friction_flags_radius():
    cp = ContactParams(mu_s=1e-3, mu_c=1e-3, mu_v=0.0, r=6e-3)
    res = _explore(cp)
    for est in res.estimates:
        if est is None:
            continue
        assert est.mu_c < 0.05
        assert not est.r_reliable
