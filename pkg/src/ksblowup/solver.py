"""Explicit finite-volume integrator for the quasilinear chemotaxis system

    u_t = div[(u+alpha)^(m1-1) grad u - chi u (u+alpha)^(m2-2) grad v]
    v_t = lap v - v + u

with zero-flux boundaries.  Diffusive face fluxes are centred; the
chemotactic flux is first-order upwind in the direction of grad v.  Time
stepping is the two-stage SSP Runge-Kutta (Heun) scheme with step-doubling
error control and a positivity/stability cap on dt.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InsufficientDataError, InvalidStateError, KSError
from .exponents import ModelParams
from .field import EnergySample, EnergySeries, Grid, State, cell_gradient, energy_sample

logger = logging.getLogger(__name__)

COMPLETED = "completed-horizon"
BLOWUP = "blowup-detected"
UNDERFLOW = "step-underflow"


@dataclass(frozen=True)
class SolverConfig:
    cfl_safety: float = 0.9
    dt_min: float = 1e-12
    u_blowup_threshold: float = 1e8
    t_end: float = 1.0
    sample_stride: float = 0.01
    seed: int = 0
    rtol: float = 1e-4
    atol: float = 1e-8
    clip: bool = True
    max_steps: int = 5_000_000
    # extra energy samples whenever u_max has grown by this factor
    growth_sample_factor: float = 2.0
    # a single cell holding this fraction of the total mass counts as blow-up
    # (a fixed grid caps u_max at mass / smallest cell volume)
    concentration_fraction: float = 0.5

    def __post_init__(self):
        if not 0 < self.cfl_safety <= 1:
            raise KSError(f"cfl_safety must lie in (0, 1], got {self.cfl_safety}")
        if not self.dt_min > 0:
            raise KSError(f"dt_min must be > 0, got {self.dt_min}")
        if not (self.t_end > 0 and self.sample_stride > 0):
            raise KSError("t_end and sample_stride must be > 0")
        if not self.u_blowup_threshold > 0:
            raise KSError("u_blowup_threshold must be > 0")
        if not 0 < self.concentration_fraction <= 1:
            raise KSError("concentration_fraction must lie in (0, 1]")


@dataclass(frozen=True)
class BlowupFit:
    t_star: float
    low_confidence: bool
    points: int


@dataclass(frozen=True)
class BlowupVerdict:
    kind: str
    t_final: float
    final_u_max: float
    final_phi: float
    t_star_estimate: float | None = None
    t_star_phi: float | None = None
    trigger: str | None = None
    low_confidence: bool = False
    final_gradv_max: float = 0.0
    clip_events: int = 0
    steps: int = 0
    rejected_steps: int = 0


@dataclass
class Trajectory:
    grid: Grid
    params: ModelParams
    p: float
    q: float
    series: EnergySeries
    snapshots: list[State]
    monitor_t: np.ndarray
    monitor_umax: np.ndarray
    monitor_phi: np.ndarray
    dt_used: np.ndarray
    dt_cap: np.ndarray
    clip_events: int = 0
    min_u_seen: float = 0.0


class _Geometry:
    """Precomputed face/cell factors shared by every RHS evaluation."""

    def __init__(self, grid: Grid):
        self.h = grid.h
        self.inner_areas = np.asarray(grid.face_areas[1:-1])
        self.volumes = np.asarray(grid.volumes)
        areas = np.asarray(grid.face_areas)
        # (A_left + A_right) / V per cell; enters the positivity cap
        self.spread = (areas[:-1] + areas[1:]) / self.volumes
        self.n = grid.cells


def _divergence(face_flux: np.ndarray, geo: _Geometry) -> np.ndarray:
    af = np.zeros(geo.n + 1)
    af[1:-1] = geo.inner_areas * face_flux
    return -np.diff(af) / geo.volumes


def _rhs(u: np.ndarray, v: np.ndarray, params: ModelParams, geo: _Geometry):
    ua = u + params.alpha
    diff_coef = ua ** (params.m1 - 1.0) if params.m1 != 1.0 else np.ones_like(u)
    d_face = 0.5 * (diff_coef[:-1] + diff_coef[1:])
    du_face = np.diff(u) / geo.h
    dv_face = np.diff(v) / geo.h
    sens = u * ua ** (params.m2 - 2.0)
    upwind = np.where(dv_face > 0, sens[:-1], sens[1:])
    flux_u = -d_face * du_face + params.chi * upwind * dv_face
    du = _divergence(flux_u, geo)
    dv = _divergence(-dv_face, geo) - v + u
    return du, dv


def rhs(state: State, params: ModelParams, grid: Grid) -> tuple[np.ndarray, np.ndarray]:
    """Semi-discrete time derivatives ``(du/dt, dv/dt)``."""
    if np.any(state.u < 0) or np.any(state.v < 0):
        raise InvalidStateError("u and v must be nonnegative")
    return _rhs(state.u, state.v, params, _Geometry(grid))


def stability_cap(u: np.ndarray, v: np.ndarray, params: ModelParams, geo: _Geometry,
                  cfl: float) -> float:
    """Largest admissible dt.

    It is the diffusive limit ``h^2 / (2 D_max)`` (with the unit diffusivity of
    the v-equation included in ``D_max``), further tightened by the per-cell
    outflow rate that keeps a forward Euler stage nonnegative.
    """
    ua = u + params.alpha
    diff_coef = ua ** (params.m1 - 1.0)
    d_max = max(float(np.max(diff_coef)), 1.0)
    grad_v = np.zeros(geo.n + 1)
    grad_v[1:-1] = np.abs(np.diff(v)) / geo.h
    grad_cell = np.maximum(grad_v[:-1], grad_v[1:])
    adv = params.chi * ua ** (params.m2 - 2.0) * grad_cell
    rate_u = geo.spread * (diff_coef.max() / geo.h + adv)
    rate_v = geo.spread / geo.h + 1.0
    rate = max(float(np.max(rate_u)), float(np.max(rate_v)))
    return cfl * min(geo.h ** 2 / (2.0 * d_max), 1.0 / rate)


class _Stepper:
    def __init__(self, params: ModelParams, grid: Grid, cfg: SolverConfig):
        self.params = params
        self.geo = _Geometry(grid)
        self.cfg = cfg
        self.clip_events = 0
        self.min_u_seen = 0.0

    def _clip(self, u, v):
        if not self.cfg.clip:
            self.min_u_seen = min(self.min_u_seen, float(u.min()))
            return u, v
        neg_u = u < 0
        neg_v = v < 0
        count = int(neg_u.sum() + neg_v.sum())
        if count:
            self.clip_events += count
            self.min_u_seen = min(self.min_u_seen, float(u.min()))
            u = np.where(neg_u, 0.0, u)
            v = np.where(neg_v, 0.0, v)
        return u, v

    def rk2(self, u, v, dt):
        du, dv = _rhs(u, v, self.params, self.geo)
        u1, v1 = self._clip(u + dt * du, v + dt * dv)
        du1, dv1 = _rhs(u1, v1, self.params, self.geo)
        return self._clip(0.5 * (u + u1 + dt * du1), 0.5 * (v + v1 + dt * dv1))

    def try_step(self, u, v, dt):
        """Step-doubling: returns (u, v, err) where err <= 1 means acceptable."""
        clips_before = self.clip_events
        ub, vb = self.rk2(u, v, dt)
        um, vm = self.rk2(u, v, 0.5 * dt)
        us, vs = self.rk2(um, vm, 0.5 * dt)
        if not (np.all(np.isfinite(us)) and np.all(np.isfinite(vs))
                and np.all(np.isfinite(ub)) and np.all(np.isfinite(vb))):
            self.clip_events = clips_before
            return None, None, math.inf
        scale_u = self.cfg.atol + self.cfg.rtol * np.abs(us)
        scale_v = self.cfg.atol + self.cfg.rtol * np.abs(vs)
        # Richardson factor 2^2 - 1 for a second-order method
        err = max(float(np.max(np.abs(us - ub) / scale_u)),
                  float(np.max(np.abs(vs - vb) / scale_v))) / 3.0
        if err > 1.0:
            self.clip_events = clips_before
        return us, vs, err


class StepUnderflow(KSError):
    kind = "step-underflow"


def step_adaptive(state: State, params: ModelParams, grid: Grid, cfg: SolverConfig,
                  dt: float | None = None) -> tuple[State, float]:
    """Advance one accepted step, retrying with smaller dt on error-test failure.

    Raises :class:`StepUnderflow` when the controller would need ``dt < dt_min``.
    """
    stepper = _Stepper(params, grid, cfg)
    new_u, new_v, dt_used, _, _ = _advance(stepper, state.u, state.v, dt, cfg)
    return State(new_u, new_v, state.t + dt_used), dt_used


def _advance(stepper: _Stepper, u, v, dt, cfg: SolverConfig, limit: float = math.inf):
    cap = stability_cap(u, v, stepper.params, stepper.geo, cfg.cfl_safety)
    dt = cap if dt is None else min(dt, cap)
    rejected = 0
    while True:
        if dt < cfg.dt_min:
            raise StepUnderflow(f"dt = {dt:.3e} below dt_min = {cfg.dt_min:.3e}")
        step = min(dt, limit)
        us, vs, err = stepper.try_step(u, v, step)
        if err <= 1.0:
            factor = 2.0 if err == 0 else min(2.0, max(0.2, 0.9 * err ** (-1.0 / 3.0)))
            # a step truncated to hit a sample time should not shrink the proposal
            proposal = max(dt, step * factor) if step < dt else step * factor
            return us, vs, step, proposal, rejected
        rejected += 1
        dt = step * (0.5 if not math.isfinite(err) else max(0.2, 0.9 * err ** (-1.0 / 3.0)))


def detect_blowup(times, values, threshold: float | None = None) -> BlowupFit:
    """Extrapolate the blow-up time from the tail of an L-infinity series.

    Fits ``1 / value`` linearly in ``t`` over the final decade of growth (at
    least three points) and returns the zero crossing, clamped to the last
    sample time.  A non-increasing tail yields the last time, flagged.
    """
    t = np.asarray(times, dtype=float)
    m = np.asarray(values, dtype=float)
    if t.size < 3:
        raise InsufficientDataError("need at least three samples")
    if threshold is not None and not m[-1] >= threshold:
        raise KSError(f"last value {m[-1]:.3e} is below the blow-up threshold {threshold:.3e}")
    # final decade: trailing run of samples with value >= last / 10
    below = np.nonzero(m < m[-1] / 10.0)[0]
    start = below[-1] + 1 if below.size else 0
    start = min(start, t.size - 3)
    tt, mm = t[start:], m[start:]
    if np.any(np.diff(mm) < 0) or np.any(mm <= 0):
        return BlowupFit(float(t[-1]), True, tt.size)
    slope, intercept = np.polyfit(tt, 1.0 / mm, 1)
    if not slope < 0:
        return BlowupFit(float(t[-1]), True, tt.size)
    return BlowupFit(max(float(-intercept / slope), float(t[-1])), False, tt.size)


def _growing_tail(umax: list[float], initial: float) -> bool:
    if len(umax) < 3:
        return False
    tail = np.asarray(umax[-min(len(umax), 50):])
    return bool(umax[-1] >= 10.0 * max(initial, 1e-300) and np.all(np.diff(tail) >= 0))


def simulate(initial: State, params: ModelParams, grid: Grid, cfg: SolverConfig,
             p: float = 2.0, q: float = 2.0) -> tuple[Trajectory, BlowupVerdict]:
    """Integrate until ``t_end``, detected blow-up, or step underflow.

    Energy samples (and field snapshots) are taken on the uniform grid
    ``k * sample_stride`` and additionally each time ``u_max`` has grown by
    ``growth_sample_factor`` since the last sample.  Phi uses ``(p, q)``.
    """
    if initial.u.shape != (grid.cells,) or initial.v.shape != (grid.cells,):
        raise InvalidStateError("initial fields do not match the grid")
    if np.any(initial.u < 0) or np.any(initial.v < 0):
        raise InvalidStateError("initial data must be nonnegative")
    stepper = _Stepper(params, grid, cfg)
    u, v, t = initial.u.astype(float).copy(), initial.v.astype(float).copy(), float(initial.t)
    alpha = params.alpha

    samples: list[EnergySample] = []
    snapshots: list[State] = []

    def record(u, v, t):
        st = State(u.copy(), v.copy(), t)
        samples.append(energy_sample(st, p, q, alpha, grid))
        snapshots.append(st)
        return samples[-1]

    first = record(u, v, t)
    mon_t, mon_u, mon_phi = [t], [first.u_max], [first.phi]
    dts, caps = [], []
    initial_umax = first.u_max
    concentrated = cfg.concentration_fraction * first.mass
    last_sample_umax = first.u_max
    k_next = 1
    dt = None
    steps = rejected = 0
    kind, trigger = COMPLETED, None

    while t < cfg.t_end:
        if steps >= cfg.max_steps:
            kind, trigger = UNDERFLOW, "max_steps"
            break
        t_target = min(k_next * cfg.sample_stride, cfg.t_end)
        cap = stability_cap(u, v, params, stepper.geo, cfg.cfl_safety)
        try:
            u_new, v_new, dt_used, dt, rej = _advance(stepper, u, v, dt, cfg, limit=t_target - t)
        except StepUnderflow:
            if _growing_tail(mon_u, initial_umax):
                kind, trigger = BLOWUP, "dt_min"
            else:
                kind, trigger = UNDERFLOW, "dt_min"
            break
        rejected += rej
        steps += 1
        dts.append(dt_used)
        caps.append(cap)
        u, v = u_new, v_new
        hit_sample = t + dt_used >= t_target * (1.0 - 1e-13)
        t = t_target if hit_sample else t + dt_used
        u_max = float(u.max())
        if hit_sample or u_max >= cfg.growth_sample_factor * last_sample_umax:
            s = record(u, v, t)
            last_sample_umax = s.u_max
            phi = s.phi
            if hit_sample:
                k_next += 1
        else:
            st = State(u, v, t)
            phi = energy_sample(st, p, q, alpha, grid).phi
        mon_t.append(t)
        mon_u.append(u_max)
        mon_phi.append(phi)
        if u_max >= cfg.u_blowup_threshold:
            if samples[-1].t != t:
                record(u, v, t)
            kind, trigger = BLOWUP, "threshold"
            break
        if concentrated > 0 and float(np.max(u * grid.volumes)) >= concentrated:
            if samples[-1].t != t:
                record(u, v, t)
            kind, trigger = BLOWUP, "concentration"
            break

    if samples[-1].t != t:
        record(u, v, t)

    t_star = t_phi = None
    low_conf = False
    if kind == BLOWUP:
        fit = detect_blowup(mon_t, mon_u)
        # A mass-preserving concentration of width l has u_max ~ l^-n and
        # Phi ~ u_max^p l^n ~ u_max^(p-1), so Phi^(1/(p-1)) shares the L-infinity
        # blow-up rate and the same zero-crossing fit applies.
        phi_scale = np.asarray(mon_phi) ** (1.0 / (p - 1.0)) if p > 1 else np.asarray(mon_phi)
        fit_phi = detect_blowup(mon_t, phi_scale)
        t_star, t_phi = fit.t_star, fit_phi.t_star
        low_conf = fit.low_confidence or fit_phi.low_confidence
    final = samples[-1]
    traj = Trajectory(grid=grid, params=params, p=p, q=q, series=EnergySeries(samples),
                      snapshots=snapshots, monitor_t=np.array(mon_t),
                      monitor_umax=np.array(mon_u), monitor_phi=np.array(mon_phi),
                      dt_used=np.array(dts), dt_cap=np.array(caps),
                      clip_events=stepper.clip_events, min_u_seen=stepper.min_u_seen)
    verdict = BlowupVerdict(
        kind=kind, t_final=t, final_u_max=final.u_max, final_phi=final.phi,
        t_star_estimate=t_star, t_star_phi=t_phi, trigger=trigger, low_confidence=low_conf,
        final_gradv_max=float(np.max(np.abs(cell_gradient(v, grid)))),
        clip_events=stepper.clip_events, steps=steps, rejected_steps=rejected)
    logger.info("simulation finished: %s at t=%.6g after %d steps", kind, t, steps)
    return traj, verdict
