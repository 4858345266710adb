"""Step-response, frequency-response and tracking metrics."""

import math
from dataclasses import asdict, dataclass

import numpy as np

BAND_FRACTION = 0.02
BODE_FREQS = (1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0)


@dataclass(frozen=True)
class StepMetrics:
    """Times in seconds from the step instant; ``None`` when never reached."""

    t_r: float = None
    t_50: float = None
    M_p: float = None
    t_s: float = None

    def as_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class BodePoint:
    freq: float
    magnitude: float
    phase: float


def _crossing(t, y, level):
    """Interpolated first time ``y`` reaches ``level`` (y rising)."""
    idx = np.flatnonzero(y >= level)
    if idx.size == 0:
        return None
    i = int(idx[0])
    if i == 0:
        return float(t[0])
    y0, y1 = y[i - 1], y[i]
    return float(t[i - 1] + (level - y0) / (y1 - y0) * (t[i] - t[i - 1]))


def step_response_metrics(t, y, f_from, f_to, t_step=0.0, band=BAND_FRACTION):
    """Metrics of response ``y(t)`` to a set-point step at ``t_step``.

    Rise time spans 10 to 90 % of the change, ``t_50`` is the time to half
    of it, ``M_p`` the peak excursion past ``f_to`` (N) and ``t_s`` the time
    after which ``y`` stays within ``band`` of the change around ``f_to``.
    """
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    keep = t >= t_step
    t, y = t[keep], y[keep]
    change = f_to - f_from
    if change == 0 or t.size == 0:
        raise ValueError("need a non-zero step and samples after it")
    # Normalise to a rising unit step.
    u = (y - f_from) / change
    t10, t50, t90 = (_crossing(t, u, lv) for lv in (0.1, 0.5, 0.9))
    t_r = None if t10 is None or t90 is None else t90 - t10
    t_50 = None if t50 is None else t50 - t_step
    M_p = max(0.0, float(np.max(u) - 1.0)) * abs(change)
    outside = np.flatnonzero(np.abs(u - 1.0) > band)
    if outside.size == 0:
        t_s = 0.0
    elif outside[-1] == u.size - 1:
        t_s = None
    else:
        t_s = float(t[outside[-1] + 1] - t_step)
    return StepMetrics(t_r, t_50, M_p, t_s)


def step_metrics(trace, f_from, f_to, t_step=None, channel="f_n"):
    """Step metrics of ``trace[channel]``; the step instant defaults to the
    first sample where the desired force reaches ``f_to``."""
    t = trace["t"]
    if t_step is None:
        f_d = trace["f_d"]
        hit = np.flatnonzero(np.isclose(f_d, f_to))
        if hit.size == 0:
            raise ValueError(f"trace never commands {f_to} N")
        t_step = float(t[hit[0]])
    return step_response_metrics(t, trace[channel], f_from, f_to, t_step)


def fit_sinusoid(t, y, freq):
    """Least-squares ``y ~ A sin(wt + phi) + c``. Returns ``(A, phi, c)``."""
    w = 2.0 * math.pi * freq
    X = np.column_stack([np.sin(w * t), np.cos(w * t), np.ones_like(t)])
    (a, b, c), *_ = np.linalg.lstsq(X, y, rcond=None)
    return math.hypot(a, b), math.atan2(b, a), float(c)


def bode_point(t, command, response, freq, settle_periods=1.0):
    """Gain and phase of ``response`` relative to ``command`` at ``freq``.

    The first ``settle_periods`` periods are discarded; at least two periods
    must remain in the segment.
    """
    t = np.asarray(t, dtype=float)
    period = 1.0 / freq
    if t[-1] - t[0] < 2.0 * period - 1e-12:
        raise ValueError(f"segment at {freq} Hz is shorter than two periods")
    start = t[0] + settle_periods * period
    if t[-1] - start < 2.0 * period - 1e-12:
        start = t[0]
    m = t >= start
    a_c, p_c, _ = fit_sinusoid(t[m], np.asarray(command)[m], freq)
    a_r, p_r, _ = fit_sinusoid(t[m], np.asarray(response)[m], freq)
    if a_c == 0:
        raise ValueError("command has no component at the test frequency")
    phase = math.degrees(p_r - p_c)
    phase = (phase + 180.0) % 360.0 - 180.0
    return BodePoint(freq, 20.0 * math.log10(a_r / a_c), phase)


def bode_analysis(trace, freqs, segments=None, channel="f_n"):
    """Bode points for consecutive sine segments of a trace.

    ``segments`` maps each frequency to ``(t_start, t_end)``; by default it is
    read from the trace metadata written by the bode experiment. The phase is
    unwrapped across increasing frequency so lags beyond 180 degrees show.
    """
    segments = segments or {float(k): v for k, v in trace.metadata["segments"].items()}
    t = trace["t"]
    pts = []
    for f in freqs:
        t0, t1 = segments[float(f)]
        m = (t >= t0) & (t < t1)
        pts.append(bode_point(t[m], trace["f_d"][m], trace[channel][m], f))
    return unwrap_phases(pts)


def unwrap_phases(points):
    phases = np.unwrap(np.radians([p.phase for p in points]))
    return [BodePoint(p.freq, p.magnitude, float(np.degrees(ph)))
            for p, ph in zip(points, phases)]


def tracking_error(true_final, target):
    return true_final - target
