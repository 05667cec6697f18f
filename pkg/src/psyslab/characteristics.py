"""Characteristic curves traced through a computed trajectory.

A curve of family i solves dx/dt = lambda_i(u(t, x)) through the
space-time field stored in a Trajectory.  Evaluation of u between grid
points is trigonometric in x and cubic (4 nearest snapshots) in t, so
the tracer sees the same field the solver computed.  Along the curve we
record the Riemann invariants, the scaled gradient beta, and the
accumulated Riccati integral K(t) = int k(u) ds, from which finite-time
gradient blow-up is predicted via 1 + beta0 * K(t*) = 0.

Curves are classified over a finite horizon: B means the curve ran the
whole horizon with -u growing beyond a factor and still increasing; A
means it hit the u = 0 interface or stayed bounded; anything else is
reported as undetermined rather than silently coerced.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .errors import EllipticStart, WindowTooShort
from .field import derivative_coefficients, phase_vector, trig_coefficients
from .riemann import Family, beta_from_gradient, q_of_u, riccati_k
from .solver import Trajectory


class Direction(enum.Enum):
    forward = 1
    backward = -1

    @property
    def sign(self) -> float:
        return float(self.value)


class Termination(str, enum.Enum):
    reached_horizon = "reached_horizon"
    reached_boundary = "reached_boundary"
    left_trajectory_window = "left_trajectory_window"


class ClassLabel(str, enum.Enum):
    A_plus = "A_plus"
    A_minus = "A_minus"
    B_plus = "B_plus"
    B_minus = "B_minus"
    undetermined = "undetermined"


class CurveSample(NamedTuple):
    t: float
    x: float  # unwrapped (lifted) position
    u: float
    r1: float
    r2: float
    beta: float
    K_accum: float


@dataclass
class CharacteristicCurve:
    family: Family
    direction: Direction
    samples: list  # [CurveSample], times monotone along traversal
    termination: Termination
    t_hit: Optional[float] = None  # boundary-hit time, if any

    @property
    def t_start(self) -> float:
        return self.samples[0].t

    @property
    def t_end(self) -> float:
        return self.samples[-1].t

    def own_invariant(self, sample: CurveSample) -> float:
        return sample.r1 if self.family is Family.first else sample.r2


class _SpaceTimeField:
    """Spectral-in-x, cubic-in-t evaluator over a trajectory's snapshots."""

    def __init__(self, trajectory: Trajectory):
        snaps = trajectory.snapshots
        if len(snaps) < 2:
            raise WindowTooShort("tracing needs at least 2 snapshots")
        times = np.array([t for t, _ in snaps])
        # drop near-duplicate times: degenerate spacings blow up the
        # Lagrange weights
        tiny = 1e-9 * float(np.max(np.diff(times), initial=0.0))
        self.law = trajectory.law
        self.n = trajectory.grid.n
        idx = [0]
        for i in range(1, len(times)):
            if times[i] - times[idx[-1]] > tiny:
                idx.append(i)
        snaps = [snaps[i] for i in idx]
        if len(snaps) < 2:
            raise WindowTooShort("tracing needs at least 2 distinct times")
        self.times = times[idx]
        self.U = np.array([trig_coefficients(s.u) for _, s in snaps])
        self.V = np.array([trig_coefficients(s.v) for _, s in snaps])
        self.UX = np.array([derivative_coefficients(row) for row in self.U])
        self.VX = np.array([derivative_coefficients(row) for row in self.V])

    def _window(self, t: float):
        k = min(4, len(self.times))
        i = int(np.searchsorted(self.times, t))
        i0 = min(max(i - 2, 0), len(self.times) - k)
        ts = self.times[i0:i0 + k]
        w = np.empty(k)
        for a in range(k):
            num = 1.0
            for b in range(k):
                if b != a:
                    num *= (t - ts[b]) / (ts[a] - ts[b])
            w[a] = num
        return i0, k, w

    def eval_u(self, t: float, x: float) -> float:
        i0, k, w = self._window(t)
        ph = phase_vector(self.n, x)
        return float(w @ np.real(self.U[i0:i0 + k] @ ph))

    def eval_all(self, t: float, x: float):
        """(u, v, u_x, v_x) at one space-time point."""
        i0, k, w = self._window(t)
        ph = phase_vector(self.n, x)
        out = []
        for M in (self.U, self.V, self.UX, self.VX):
            out.append(float(w @ np.real(M[i0:i0 + k] @ ph)))
        return tuple(out)


def _field_of(trajectory: Trajectory) -> _SpaceTimeField:
    # coefficient stacks are expensive; memoize on the trajectory
    fld = getattr(trajectory, "_stf_cache", None)
    if fld is None:
        fld = _SpaceTimeField(trajectory)
        trajectory._stf_cache = fld
    return fld


def _speed(law, u: float, fam: Family) -> float:
    # clamp: transient stage points may graze the u = 0 interface
    return fam.sign * np.sqrt(max(-law.dp(u), 0.0))


def _make_sample(law, fam: Family, t, x, u, v, ux, vx, K) -> CurveSample:
    uc = min(u, 0.0)
    qv = q_of_u(law, uc)
    sq = np.sqrt(max(-law.dp(uc), 0.0))  # -q'(u)
    rx = vx + sq * ux if fam is Family.first else vx - sq * ux
    beta = rx * max(-law.dp(uc), 0.0) ** 0.25
    return CurveSample(t, x, u, v - qv, v + qv, beta, K)


def gradient_beta(trajectory: Trajectory, x0: float, fam: Family,
                  at_end: bool = False) -> float:
    """beta at x0 recomputed from the spectral gradients of a snapshot.

    Uses the first snapshot (the last with ``at_end=True``):
    r_x = v_x -+ q'(u) u_x with q'(u) = -sqrt(-p'(u)), then
    beta = r_x (-p'(u))^(1/4).
    """
    t, _state = trajectory.snapshots[-1 if at_end else 0]
    fld = _field_of(trajectory)
    u, v, ux, vx = fld.eval_all(t, x0)
    sq = np.sqrt(max(-trajectory.law.dp(min(u, 0.0)), 0.0))
    rx = vx + sq * ux if fam is Family.first else vx - sq * ux
    return beta_from_gradient(trajectory.law, u, rx)


def trace(trajectory: Trajectory, x0: float, fam: Family,
          direction: Direction = Direction.forward, *,
          t_start: Optional[float] = None, t_stop: Optional[float] = None,
          eps_b: float = 1e-3, step_factor: float = 0.5) -> CharacteristicCurve:
    """Trace one characteristic through the trajectory's window.

    Integrates dx/dt = lambda_fam(u(t, x)) with RK4 at a step of
    ``step_factor`` times the snapshot spacing.  Forward curves start at
    the first snapshot, backward curves at the last (the only part of
    the window behind them), unless ``t_start`` overrides.  Tracing
    stops at the window edge (or ``t_stop``), or as soon as the
    interpolated u rises above -eps_b: the curve reached the hyperbolic
    boundary.  The boundary sample is recorded with u clamped to 0 in
    the derived quantities and K_accum carried from the previous sample
    (k diverges at the interface).

    Positions are recorded unwrapped; reduce modulo 1 for plotting.
    """
    fld = _field_of(trajectory)
    law = trajectory.law
    times = fld.times
    t_lo, t_hi = float(times[0]), float(times[-1])

    if t_start is None:
        t_start = t_lo if direction is Direction.forward else t_hi
    if direction is Direction.forward:
        t_goal = t_hi if t_stop is None else min(t_stop, t_hi)
        span = t_goal - t_start
    else:
        t_goal = t_lo if t_stop is None else max(t_stop, t_lo)
        span = t_start - t_goal
    if not t_lo <= t_start <= t_hi or span <= 0.0:
        u0, v0, ux0, vx0 = fld.eval_all(min(max(t_start, t_lo), t_hi), x0)
        s = _make_sample(law, fam, t_start, x0, u0, v0, ux0, vx0, 0.0)
        return CharacteristicCurve(fam, direction, [s],
                                   Termination.left_trajectory_window)

    spacing = float(np.median(np.diff(times)))
    if len(trajectory.series) >= 3:
        dts = np.diff([r.t for r in trajectory.series])
        if spacing > 5.01 * float(np.median(dts)):
            warnings.warn(
                "snapshot spacing exceeds 5 solver steps; tracer accuracy "
                "degrades (lower snapshot_stride)", stacklevel=2)

    u0, v0, ux0, vx0 = fld.eval_all(t_start, x0)
    if u0 >= 0.0:
        raise EllipticStart(f"u(t={t_start:g}, x={x0:g}) = {u0:g} >= 0")

    samples = [_make_sample(law, fam, t_start, x0, u0, v0, ux0, vx0, 0.0)]
    if u0 > -eps_b:
        return CharacteristicCurve(fam, direction, samples,
                                   Termination.reached_boundary, t_hit=t_start)

    n_steps = max(1, int(np.ceil(span / (step_factor * spacing))))
    h = direction.sign * span / n_steps
    t, x = t_start, x0
    k_prev = riccati_k(law, u0)
    K = 0.0
    termination = Termination.reached_horizon
    t_hit = None

    for _ in range(n_steps):
        k1 = _speed(law, fld.eval_u(t, x), fam)
        k2 = _speed(law, fld.eval_u(t + 0.5 * h, x + 0.5 * h * k1), fam)
        k3 = _speed(law, fld.eval_u(t + 0.5 * h, x + 0.5 * h * k2), fam)
        k4 = _speed(law, fld.eval_u(t + h, x + h * k3), fam)
        x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t = t + h
        u, v, ux, vx = fld.eval_all(t, x)
        if u > -eps_b:
            samples.append(_make_sample(law, fam, t, x, u, v, ux, vx, K))
            termination = Termination.reached_boundary
            t_hit = t
            break
        k_cur = riccati_k(law, u)
        K += 0.5 * (k_prev + k_cur) * h
        k_prev = k_cur
        samples.append(_make_sample(law, fam, t, x, u, v, ux, vx, K))

    return CharacteristicCurve(fam, direction, samples, termination, t_hit)


def invariant_drift(curve: CharacteristicCurve) -> float:
    """max over samples of |r_fam(t) - r_fam(t_start)| for the curve's
    own family."""
    if not curve.samples:
        raise ValueError("curve has no samples")
    r0 = curve.own_invariant(curve.samples[0])
    return max(abs(curve.own_invariant(s) - r0) for s in curve.samples)


def predict_blowup(curve: CharacteristicCurve, beta0: float,
                   extrapolate: float = 0.0) -> Optional[float]:
    """Earliest t* with 1 + beta0 * K(t*) <= 0 along the curve.

    K is linearly interpolated between samples; returns None when no
    root lies in the window.  Going forward K <= 0, so only beta0 > 0
    can blow up; negative beta decays, matching the Riccati picture in
    which boundary-reaching curves force r_x <= 0.

    ``extrapolate`` (a fraction of the traced span) optionally continues
    K at its final slope past the last sample.  Trajectories stop at the
    detected catastrophe, which is where the root sits, so roots often
    fall a hair beyond the window; a small allowance recovers them
    without inventing data far from the measurement.
    """
    if beta0 == 0.0 or not curve.samples:
        return None
    K_star = -1.0 / beta0
    prev = curve.samples[0]
    if 1.0 + beta0 * prev.K_accum <= 0.0:
        return prev.t
    for s in curve.samples[1:]:
        if 1.0 + beta0 * s.K_accum <= 0.0:
            dK = s.K_accum - prev.K_accum
            theta = (K_star - prev.K_accum) / dK if dK != 0.0 else 1.0
            return prev.t + theta * (s.t - prev.t)
        prev = s
    if extrapolate > 0.0 and len(curve.samples) >= 2:
        span = abs(curve.t_end - curve.t_start)
        last = curve.samples[-1]
        before = next((s for s in reversed(curve.samples)
                       if s.K_accum != last.K_accum), None)
        if before is not None:
            slope = (last.K_accum - before.K_accum) / (last.t - before.t)
            if slope != 0.0:
                t_root = last.t + (K_star - last.K_accum) / slope
                overshoot = (t_root - last.t) * curve.direction.sign
                if 0.0 <= overshoot <= extrapolate * span:
                    return t_root
    return None


def classify(curve: CharacteristicCurve, horizon: float,
             growth_factor: float = 10.0, eps_b: float = 1e-3) -> ClassLabel:
    """Finite-horizon proxy of the A/B dichotomy for this curve.

    B (by direction): traversed the full horizon, -u at the end grew
    beyond growth_factor times its start value, and -u is still
    non-decreasing over the final quarter of the window.  A: hit the
    u = 0 interface in finite time, or ran the horizon with -u bounded
    by the growth factor.  Everything else is undetermined.
    """
    plus = curve.direction is Direction.forward
    a_label = ClassLabel.A_plus if plus else ClassLabel.A_minus
    b_label = ClassLabel.B_plus if plus else ClassLabel.B_minus

    if curve.termination is Termination.reached_boundary or \
            curve.samples[-1].u > -eps_b:
        return a_label
    span = abs(curve.t_end - curve.t_start)
    if curve.termination is not Termination.reached_horizon or \
            span < horizon * (1.0 - 1e-9):
        return ClassLabel.undetermined

    mu0 = -curve.samples[0].u
    mu_end = -curve.samples[-1].u
    if mu_end <= growth_factor * mu0:
        return a_label

    tail = [-s.u for s in curve.samples
            if abs(s.t - curve.t_start) >= 0.75 * span]
    tol = 1e-9 * max(1.0, max(tail))
    if all(b - a >= -tol for a, b in zip(tail, tail[1:])):
        return b_label
    return ClassLabel.undetermined


@dataclass
class SpotcheckReport:
    """Outcome of the dual-growth exclusion check.

    A violation is a same-direction pair of curves, one per family, both
    classified B: no solution of the system should ever produce one.
    """

    sample_points: int
    horizon: float
    growth_factor: float
    labels: dict = field(default_factory=dict)  # {(Direction, Family): [ClassLabel]}
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "sample_points": self.sample_points,
            "horizon": self.horizon,
            "growth_factor": self.growth_factor,
            "labels": {
                f"{d.name}/{f.name}": [lab.value for lab in labs]
                for (d, f), labs in self.labels.items()
            },
            "ok": self.ok,
            "violations": self.violations,
        }


def dual_growth_spotcheck(trajectory: Trajectory, sample_points: int,
                          horizon: Optional[float] = None,
                          growth_factor: float = 10.0) -> SpotcheckReport:
    """Trace both families from seeded points and flag same-direction
    (B, B) pairs across the families.

    Seeds with elliptic start points are recorded as undetermined.
    Expected outcome on any trajectory of the system: zero violations.
    """
    window = trajectory.t_end - trajectory.t0
    if horizon is None:
        horizon = window
    report = SpotcheckReport(sample_points, horizon, growth_factor)
    seeds = [(j + 0.5) / sample_points for j in range(sample_points)]
    for direction in Direction:
        for fam in Family:
            labels = []
            for x0 in seeds:
                try:
                    curve = trace(trajectory, x0, fam, direction)
                except EllipticStart:
                    labels.append(ClassLabel.undetermined)
                    continue
                labels.append(classify(curve, horizon, growth_factor))
            report.labels[(direction, fam)] = labels
    for direction in Direction:
        b = ClassLabel.B_plus if direction is Direction.forward else ClassLabel.B_minus
        s1 = [seeds[i] for i, lab in
              enumerate(report.labels[(direction, Family.first)]) if lab is b]
        s2 = [seeds[i] for i, lab in
              enumerate(report.labels[(direction, Family.second)]) if lab is b]
        if s1 and s2:
            report.violations.append({
                "direction": direction.name, "label": b.value,
                "family1_seeds": s1, "family2_seeds": s2,
            })
    return report
