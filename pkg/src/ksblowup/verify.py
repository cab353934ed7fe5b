"""Numerical audits of the energy inequalities along simulated trajectories,
plus an empirical estimator for Gagliardo-Nirenberg constants.

Every inequality check is one-sided.  At each interior energy sample the
residual ``(RHS - LHS) / scale`` with ``scale = max(|LHS|, |RHS|, 1)`` is
formed; a check passes iff the worst residual is ``>= -tol``.  Time
derivatives are three-point centred differences on the (possibly non-uniform)
sampling grid.

Gradient integrals in the lemma audits are evaluated on the staggered grid the
solver uses: gradients live on interior faces (zero on boundary faces, which
is the Neumann condition), face weights use the face-averaged density, and
the dual volume of a face is ``area * h``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bound import g_of_phi, lower_bound_integral
from .constants import BoundConstants
from .errors import GNHypothesisError, InsufficientDataError, KSError
from .exponents import ExponentConfig, ModelParams, exponent_f, exponent_r, resolve_eta
from .field import EnergySeries, Grid, State
from .solver import Trajectory

DEFAULT_TOL = 1e-3


@dataclass(frozen=True)
class CheckResult:
    name: str
    samples: int
    worst_residual: float
    tolerance: float
    passed: bool
    conditional: bool = False
    skipped: bool = False
    note: str = ""
    residuals: tuple[float, ...] = field(default=(), repr=False)

    @property
    def verdict(self) -> str:
        if self.skipped:
            return "skipped"
        return "pass" if self.passed else "fail"


@dataclass
class VerifyReport:
    checks: list[CheckResult]
    conditional_flags: dict[str, list[str]] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks if not c.skipped)

    def rows(self) -> list[dict]:
        return [
            {"name": c.name, "samples": c.samples, "worst_residual": c.worst_residual,
             "tolerance": c.tolerance, "verdict": c.verdict, "conditional": c.conditional,
             "note": c.note}
            for c in self.checks
        ]


def centered_derivative(t: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Second-order derivative at interior points of a non-uniform grid."""
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    h0 = t[1:-1] - t[:-2]
    h1 = t[2:] - t[1:-1]
    return (h0 ** 2 * y[2:] - h1 ** 2 * y[:-2] + (h1 ** 2 - h0 ** 2) * y[1:-1]) / (
        h0 * h1 * (h0 + h1))


def _one_sided(name, lhs, rhs, tol, conditional=False, note="") -> CheckResult:
    lhs = np.asarray(lhs, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    scale = np.maximum(np.maximum(np.abs(lhs), np.abs(rhs)), 1.0)
    res = (rhs - lhs) / scale
    worst = float(res.min())
    return CheckResult(name=name, samples=int(res.size), worst_residual=worst, tolerance=tol,
                       passed=bool(worst >= -tol), conditional=conditional, note=note,
                       residuals=tuple(float(x) for x in res))


def _dual_face_volumes(grid: Grid) -> np.ndarray:
    return np.asarray(grid.face_areas[1:-1]) * grid.h


def _face_mean(w: np.ndarray) -> np.ndarray:
    return 0.5 * (w[:-1] + w[1:])


def _times(snapshots: list[State]) -> np.ndarray:
    return np.array([s.t for s in snapshots])


def _require_samples(snapshots, what):
    if len(snapshots) < 3:
        raise InsufficientDataError(f"{what}: need at least 3 energy samples, got {len(snapshots)}")


def lemma_u_terms(state: State, p: float, params: ModelParams, grid: Grid) -> tuple[float, float, float]:
    """``(energy, dissipation, forcing)`` for the density estimate at one instant."""
    alpha, m1, m2 = params.alpha, params.m1, params.m2
    ua = state.u + alpha
    energy = float(np.dot(ua ** p, grid.volumes)) / p
    dual = _dual_face_volumes(grid)
    uf = _face_mean(ua)
    du = np.diff(state.u) / grid.h
    dv = np.diff(state.v) / grid.h
    dissipation = float(np.dot(dual, uf ** (p + m1 - 3.0) * du ** 2))
    forcing = float(np.dot(dual, uf ** (p + 2.0 * m2 - m1 - 3.0) * dv ** 2))
    return energy, dissipation, forcing


def check_lemma_u(trajectory: Trajectory, p: float, params: ModelParams | None = None,
                  tol: float = DEFAULT_TOL) -> CheckResult:
    """(1/p) d/dt int (u+a)^p + (p-1)/2 int (u+a)^(p+m1-3)|grad u|^2
    <= chi^2 (p-1)/2 int (u+a)^(p+2 m2-m1-3) |grad v|^2."""
    if p < 1:
        raise KSError(f"p must be >= 1, got {p}")
    params = params or trajectory.params
    snaps = trajectory.snapshots
    _require_samples(snaps, "lemma-u")
    terms = np.array([lemma_u_terms(s, p, params, trajectory.grid) for s in snaps])
    d_energy = centered_derivative(_times(snaps), terms[:, 0])
    lhs = d_energy + (p - 1.0) / 2.0 * terms[1:-1, 1]
    rhs = params.chi ** 2 * (p - 1.0) / 2.0 * terms[1:-1, 2]
    return _one_sided("lemma-u", lhs, rhs, tol)


def lemma_v_terms(state: State, q: float, params: ModelParams, grid: Grid) -> tuple[float, float, float, float]:
    """``(gradient energy, int |grad v|^2q, int |grad |grad v|^q|^2, forcing)``."""
    dual = _dual_face_volumes(grid)
    g = np.abs(np.diff(state.v)) / grid.h
    gpow = np.concatenate(([0.0], g ** q, [0.0]))
    grad_gpow = np.diff(gpow) / grid.h
    power = float(np.dot(dual, g ** (2.0 * q)))
    curvature = float(np.dot(grid.volumes, grad_gpow ** 2))
    uf = _face_mean(state.u + params.alpha)
    forcing = float(np.dot(dual, uf ** 2 * g ** (2.0 * q - 2.0)))
    return power / q, power, curvature, forcing


def check_lemma_v_convex(trajectory: Trajectory, q: float, params: ModelParams | None = None,
                         tol: float = DEFAULT_TOL) -> CheckResult:
    """Gradient-energy estimate with the boundary term dropped (convex domains)."""
    params = params or trajectory.params
    if not params.domain.convex:
        return CheckResult(name="lemma-v-convex", samples=0, worst_residual=float("nan"),
                           tolerance=tol, passed=True, skipped=True,
                           note="non-convex domain: D_delta unknown, check not attempted")
    if q < 1:
        raise KSError(f"q must be >= 1, got {q}")
    snaps = trajectory.snapshots
    _require_samples(snaps, "lemma-v")
    terms = np.array([lemma_v_terms(s, q, params, trajectory.grid) for s in snaps])
    d_energy = centered_derivative(_times(snaps), terms[:, 0])
    inner = terms[1:-1]
    lhs = d_energy + 2.0 * (q - 1.0) / q ** 2 * inner[:, 2] + 2.0 * inner[:, 1]
    rhs = (4.0 * (q - 1.0) + params.n) / 2.0 * inner[:, 3]
    return _one_sided("lemma-v-convex", lhs, rhs, tol)


def check_ode_inequality(series: EnergySeries, bc: BoundConstants, cfg: ExponentConfig,
                         tol: float = DEFAULT_TOL) -> CheckResult:
    """dPhi/dt <= G(Phi) at every interior sample of the recorded series."""
    if len(series) < 3:
        raise InsufficientDataError(f"ode-inequality: need at least 3 samples, got {len(series)}")
    t = series.column("t")
    phi = series.column("phi")
    lhs = centered_derivative(t, phi)
    rhs = np.array([g_of_phi(x, bc, cfg) for x in phi[1:-1]])
    conditional = bool(bc.conditional_on)
    note = "conditional on " + ", ".join(bc.conditional_on) if conditional else ""
    return _one_sided("ode-inequality", lhs, rhs, tol, conditional=conditional, note=note)


@dataclass(frozen=True)
class M1Entry:
    m1: float
    admissible: bool
    f_r: float | None
    t_lower: float | None
    note: str = ""


def check_m1_monotonicity(p: float, q: float, n: int, m1_values, m2: float | None = None,
                          eta: float | None = None, bc: BoundConstants | None = None,
                          phi0: float | None = None, base_cfg: ExponentConfig | None = None,
                          tol: float = 1e-10) -> tuple[CheckResult, list[M1Entry]]:
    """f(eta, r(m1)) strictly decreasing and, with frozen A..D, t_lb nondecreasing.

    Admissibility of each m1 is judged with ``m2`` when given (C1/C2 via
    :func:`derive_exponents`); otherwise only ``r(m1)`` must be defined.
    """
    from .exponents import derive_exponents

    eta = resolve_eta(n, eta)
    entries: list[M1Entry] = []
    for m1 in sorted(float(x) for x in m1_values):
        try:
            if m2 is not None:
                cfg = derive_exponents(p, q, n, m1, m2, eta)
                ok, why = cfg.admissible, "; ".join(cfg.reasons())
                f_r = cfg.f_r
            else:
                f_r = exponent_f(eta, exponent_r(p, m1), n)
                ok, why = f_r > 1.0, "" if f_r > 1.0 else "f(eta,r) <= 1"
        except KSError as exc:
            entries.append(M1Entry(m1, False, None, None, str(exc)))
            continue
        t_lb = None
        if ok and bc is not None and phi0 is not None:
            template = base_cfg or derive_exponents(p, q, n, m1, m2 if m2 is not None else m1, eta)
            frozen = _with_f_r(template, f_r)
            t_lb = lower_bound_integral(phi0, bc, frozen, tol).t_lower
        entries.append(M1Entry(m1, ok, f_r, t_lb, why))

    good = [e for e in entries if e.admissible]
    f_steps = [b.f_r - a.f_r for a, b in zip(good, good[1:])]
    t_steps = [b.t_lower - a.t_lower for a, b in zip(good, good[1:])
               if a.t_lower is not None and b.t_lower is not None]
    worst = min([-s for s in f_steps] + [s for s in t_steps] + [0.0]) if (f_steps or t_steps) else 0.0
    passed = all(s < 0 for s in f_steps) and all(s >= 0 for s in t_steps)
    note = f"{len(good)}/{len(entries)} entries admissible"
    return CheckResult(name="m1-monotonicity", samples=len(good), worst_residual=float(worst),
                       tolerance=0.0, passed=passed, note=note), entries


def _with_f_r(cfg: ExponentConfig, f_r: float) -> ExponentConfig:
    from dataclasses import replace
    return replace(cfg, f_r=f_r)


# --- Gagliardo-Nirenberg constant estimation -------------------------------

def _lp_norm(w: np.ndarray, weights: np.ndarray, p: float) -> float:
    return float(np.dot(np.abs(w) ** p, weights)) ** (1.0 / p)


def gn_ratio(w: np.ndarray, grid: Grid, target: float, base: float, extra: float, a: float,
             grad_exponent: float = 2.0) -> float:
    """``|w|_target / (|grad w|_r^a |w|_base^(1-a) + |w|_extra)`` on the grid."""
    vol = np.asarray(grid.volumes)
    grad = np.diff(w) / grid.h
    grad_norm = float(np.dot(np.abs(grad) ** grad_exponent, _dual_face_volumes(grid))) ** (
        1.0 / grad_exponent)
    denom = grad_norm ** a * _lp_norm(w, vol, base) ** (1.0 - a) + _lp_norm(w, vol, extra)
    if denom == 0:
        return 0.0
    return _lp_norm(w, vol, target) / denom


class _TrialFamily:
    """Smooth trial fields: offset + low cosine modes + one Gaussian bump."""

    modes = 6

    def __init__(self, grid: Grid):
        extent = grid.faces[-1]
        self.s = np.asarray(grid.centers) / extent
        self.k = np.arange(1, self.modes + 1)
        self.cos = np.cos(np.pi * np.outer(self.k, self.s))
        self.size = 1 + self.modes + 3

    def field(self, theta: np.ndarray) -> np.ndarray:
        offset = theta[0]
        coeffs = theta[1:1 + self.modes]
        amp, center, log_width = theta[1 + self.modes:]
        width = np.exp(np.clip(log_width, -6.0, 1.0))
        bump = amp * np.exp(-((self.s - center) / width) ** 2)
        return offset + coeffs @ self.cos + bump

    def random(self, rng: np.random.Generator) -> np.ndarray:
        theta = np.empty(self.size)
        theta[0] = rng.normal()
        theta[1:1 + self.modes] = rng.normal(size=self.modes) / self.k
        theta[1 + self.modes:] = (rng.normal() * 3.0, rng.uniform(0.0, 1.0),
                                  rng.uniform(-5.0, 0.0))
        return theta


def check_gn_hypotheses(n: int, target: float, base: float, extra: float, a: float,
                        grad_exponent: float = 2.0) -> None:
    if not (grad_exponent >= 1.0 and 0.0 < base <= target and extra > 0.0):
        raise GNHypothesisError(
            f"need grad exponent >= 1, 0 < base <= target, extra > 0 "
            f"(got r={grad_exponent}, base={base}, target={target}, extra={extra})")
    if not 1.0 / grad_exponent <= 1.0 / n + 1.0 / target:
        raise GNHypothesisError(f"1/r <= 1/n + 1/p violated (r={grad_exponent}, n={n}, p={target})")
    if not 0.0 <= a <= 1.0:
        raise GNHypothesisError(f"interpolation exponent a = {a} outside [0, 1]")


def gn_history(grid: Grid, target: float, base: float, extra: float, a: float, budget: int,
               grad_exponent: float = 2.0, seed: int = 0) -> np.ndarray:
    """Running maximum of the GN ratio after each of ``budget`` evaluations.

    The evaluation sequence depends only on ``seed``, never on ``budget``, so a
    larger budget extends the same sequence and the running maximum is
    nondecreasing in budget.  Evaluation 0 is the constant field.
    """
    check_gn_hypotheses(grid.dim, target, base, extra, a, grad_exponent)
    if budget < 1:
        raise KSError(f"budget must be >= 1, got {budget}")
    rng = np.random.default_rng(seed)
    family = _TrialFamily(grid)

    def ratio(theta):
        return gn_ratio(family.field(theta), grid, target, base, extra, a, grad_exponent)

    best_theta = np.zeros(family.size)
    best_theta[0] = 1.0
    best = gn_ratio(np.ones(grid.cells), grid, target, base, extra, a, grad_exponent)
    history = [best]
    step = 0.5
    for i in range(1, budget):
        if i % 5 == 1:
            cand = family.random(rng)
        else:
            cand = best_theta + step * rng.normal(size=family.size) * np.maximum(
                np.abs(best_theta), 0.1)
        val = ratio(cand)
        if val > best:
            best, best_theta = val, cand
            step = min(step * 1.5, 2.0)
        elif i % 5 != 1:
            step = max(step * 0.9, 1e-3)
        history.append(best)
    return np.array(history)


def estimate_gn_constant(grid: Grid, target: float, base: float, extra: float, a: float,
                         budget: int, grad_exponent: float = 2.0, seed: int = 0) -> float:
    """Empirical lower bound on the best Gagliardo-Nirenberg constant."""
    return float(gn_history(grid, target, base, extra, a, budget, grad_exponent, seed)[-1])


def estimate_gn_pair(grid: Grid, cfg: ExponentConfig, budget: int, seed: int = 0,
                     safety: float = 2.0) -> tuple[float, float, float, float]:
    """Estimates for the two constants of the bound pipeline.

    c1 controls |w|_(2 r eta) with base and extra norms L^(2r) and exponent a;
    c2 controls |w|_(2 eta) with base/extra L^2 and exponent 1/2.  Returns
    ``(c1, c2, raw_c1, raw_c2)`` where the first two include ``safety``.
    """
    r, eta = cfg.r, cfg.eta
    raw1 = estimate_gn_constant(grid, 2 * r * eta, 2 * r, 2 * r, cfg.a, budget, seed=seed)
    raw2 = estimate_gn_constant(grid, 2 * eta, 2.0, 2.0, 0.5, budget, seed=seed + 1)
    return safety * raw1, safety * raw2, raw1, raw2
