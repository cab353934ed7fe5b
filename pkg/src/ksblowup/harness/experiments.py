"""Experiment orchestration behind the CLI subcommands.

Each ``run_*`` function takes a resolved :class:`ExperimentConfig`, writes its
artifacts under ``outputs.dir`` and returns an :class:`Outcome` carrying the
exit code and a short stdout summary.  Errors are raised as :class:`KSError`
subclasses and mapped to exit codes by the CLI.
"""

from __future__ import annotations

import csv
import hashlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from ..bound import corollary_bound, lower_bound_integral
from ..constants import BoundConstants, GnConstants, assemble_bound_constants
from ..errors import ConfigError, InadmissibleConfigError, KSError
from ..exponents import ExponentConfig, ModelParams, exponents_for, search_admissible
from ..field import (EnergySample, EnergySeries, Grid, State, make_grid, read_snapshot_csv,
                     write_snapshot_csv)
from ..solver import BLOWUP, BlowupVerdict, Trajectory, simulate
from ..verify import (CheckResult, VerifyReport, check_lemma_u, check_lemma_v_convex,
                      check_m1_monotonicity, check_ode_inequality, estimate_gn_pair)
from . import svg
from .config import ExperimentConfig, InitialData
from .report import Report, fmt

ENERGY_COLUMNS = ("t", "phi", "u_max", "mass", "gradv_energy")
SNAPSHOT_COLUMNS = ("x", "u", "v")
SWEEP_COLUMNS = ("m1", "p", "q", "phi0", "A", "B", "C", "D", "t_lb", "t_star_observed", "verdict")
VERIFY_COLUMNS = ("name", "samples", "worst_residual", "tolerance", "verdict", "conditional")

OK, FAILED, CONFIG_ERROR, RUNTIME_ERROR = 0, 1, 2, 3


@dataclass
class Outcome:
    code: int
    summary: str
    report: Report | None = None
    files: list[Path] = field(default_factory=list)
    payload: object = None


def config_hash(cfg: ExperimentConfig) -> str:
    text = cfg.canonical(exclude_sections=("outputs",))
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


# --- resolution helpers -----------------------------------------------------

def resolve_exponents(cfg: ExperimentConfig, params: ModelParams | None = None,
                      require_admissible: bool = True) -> ExponentConfig:
    params = params or cfg.model
    eta = cfg["exponents.eta"]
    if cfg["exponents.mode"] == "explicit":
        exp = exponents_for(params, cfg["exponents.p"], cfg["exponents.q"], eta)
        if require_admissible and not exp.admissible:
            raise InadmissibleConfigError("; ".join(exp.reasons()))
        return exp
    found = search_admissible(params, (cfg["exponents.p_min"], cfg["exponents.p_max"]),
                              (cfg["exponents.q_min"], cfg["exponents.q_max"]),
                              cfg["exponents.step"], eta)
    if not found:
        raise InadmissibleConfigError("no admissible (p, q) in the search box")
    return found[0]


def build_grid(cfg: ExperimentConfig, params: ModelParams | None = None) -> Grid | None:
    params = params or cfg.model
    if params.domain.geometry == "abstract":
        return None
    return make_grid(params.domain, cfg.cells)


def _profile(data: InitialData, grid: Grid, column: str) -> np.ndarray:
    if data.kind == "constant":
        return np.full(grid.cells, data.value)
    if data.kind == "gaussian":
        x = np.asarray(grid.centers)
        return data.background + data.amplitude * np.exp(-((x - data.center) / data.width) ** 2)
    try:
        _, u, v = read_snapshot_csv(data.path)
    except OSError as exc:
        raise ConfigError(f"cannot read initial data file: {exc.strerror}", data.path) from None
    values = u if column == "u" else v
    if values.size != grid.cells:
        raise ConfigError(f"{data.path} has {values.size} rows, grid has {grid.cells} cells")
    return values


def initial_state(cfg: ExperimentConfig, grid: Grid) -> State:
    rng = np.random.default_rng(cfg.solver.seed)
    fields = []
    for data, column in ((cfg.initial_u, "u"), (cfg.initial_v, "v")):
        w = _profile(data, grid, column).astype(float)
        if data.noise > 0:
            w = w * (1.0 + data.noise * rng.uniform(-1.0, 1.0, size=w.size))
        if np.any(w < 0):
            raise ConfigError(f"initial_{column} must be nonnegative")
        fields.append(w)
    return State(fields[0], fields[1], 0.0)


def initial_phi(cfg: ExperimentConfig, grid: Grid | None, p: float, q: float,
                alpha: float) -> float:
    from ..field import phi_measure
    if grid is not None:
        return phi_measure(initial_state(cfg, grid), p, q, alpha, grid)
    if cfg.initial_u.kind != "constant" or cfg.initial_v.kind != "constant" or (
            cfg.initial_u.noise or cfg.initial_v.noise):
        raise ConfigError("abstract domains only support noise-free constant initial data")
    return (cfg.initial_u.value + alpha) ** p * cfg.model.domain.measure / p


def resolve_gn(cfg: ExperimentConfig, exp: ExponentConfig,
               params: ModelParams | None = None) -> tuple[GnConstants, dict]:
    given = cfg.gn_constants()
    if given is not None:
        return given, {"mode": "given"}
    params = params or cfg.model
    grid = build_grid(cfg, params)
    if grid is None:
        raise ConfigError("GN estimation needs an interval or ball domain")
    c1, c2, raw1, raw2 = estimate_gn_pair(grid, exp, cfg["gn.budget"], cfg["gn.seed"],
                                          cfg["gn.safety"])
    info = {"mode": "estimate", "budget": cfg["gn.budget"], "seed": cfg["gn.seed"],
            "safety": cfg["gn.safety"], "raw_c1": raw1, "raw_c2": raw2}
    return GnConstants(c1, c2, "empirically-estimated"), info


def assemble(cfg: ExperimentConfig, exp: ExponentConfig,
             params: ModelParams | None = None) -> tuple[BoundConstants, GnConstants, dict]:
    params = params or cfg.model
    gn, info = resolve_gn(cfg, exp, params)
    bc = assemble_bound_constants(exp, params, gn, d_delta=cfg["bound.d_delta"])
    return bc, gn, info


# --- report sections --------------------------------------------------------

def _model_rows(cfg: ExperimentConfig) -> list[tuple[str, object]]:
    m = cfg.model
    return [("n", m.n), ("m1", m.m1), ("m2", m.m2), ("chi", m.chi), ("alpha", m.alpha),
            ("geometry", m.domain.geometry), ("measure", m.domain.measure),
            ("convex", m.domain.convex)]


def _exponent_rows(exp: ExponentConfig) -> list[tuple[str, object]]:
    rows = list(exp.as_dict().items())
    for name, verdict in (("C1", exp.c1), ("C2", exp.c2)):
        if verdict is None:
            rows.append((f"{name}.verdict", "not evaluated (q too small)"))
            continue
        rows += [(f"{name}.verdict", "pass" if verdict.passed else "fail"),
                 (f"{name}.binding", verdict.binding), (f"{name}.margin", verdict.margin)]
        rows += [(f"{name}.term[{k}]", v) for k, v in verdict.terms.items()]
    rows += [("q > 1/(eta-1)", exp.q_ok), ("admissible", exp.admissible)]
    return rows


def _constants_rows(bc: BoundConstants, gn: GnConstants, info: dict) -> list[tuple[str, object]]:
    rows: list[tuple[str, object]] = [("c1", gn.c1), ("c2", gn.c2), ("gn.provenance", gn.provenance)]
    rows += [(f"gn.{k}", v) for k, v in info.items()]
    rows += [("delta", bc.delta), ("D_delta", bc.d_delta), ("epsilon", bc.epsilon),
             ("epsilon.binding", bc.epsilon_binding)]
    rows += [(f"epsilon.{k}", v) for k, v in bc.epsilon_caps.items()]
    rows.append(("epsilon.cap2_literal_variant", bc.cap2_literal))
    if bc.cfactors is not None:
        rows += list(bc.cfactors.as_dict().items())
    rows += [("E1", bc.e1), ("E2", bc.e2), ("A", bc.A), ("B", bc.B), ("C", bc.C), ("D", bc.D)]
    return rows


def _write_report(report: Report, cfg: ExperimentConfig, name: str = "report.txt") -> Path:
    out = cfg.out_dir
    out.mkdir(parents=True, exist_ok=True)
    report.section("outputs", [("dir", str(out))])
    path = out / name
    report.write(path)
    return path


def _base_report(command: str, cfg: ExperimentConfig) -> Report:
    report = Report(command)
    report.raw("config", cfg.canonical(exclude_sections=("outputs",)))
    report.section("model", _model_rows(cfg))
    return report


# --- validate ---------------------------------------------------------------

def run_validate(cfg: ExperimentConfig) -> Outcome:
    report = _base_report("validate", cfg)
    if cfg["exponents.mode"] == "search":
        try:
            exp = resolve_exponents(cfg)
        except InadmissibleConfigError as exc:
            report.section("result", [("admissible", False), ("reason", str(exc))])
            path = _write_report(report, cfg)
            return Outcome(FAILED, f"inadmissible: {exc}", report, [path])
    else:
        exp = resolve_exponents(cfg, require_admissible=False)
    report.section("exponents", _exponent_rows(exp))
    path = _write_report(report, cfg)
    lines = [f"p = {fmt(exp.p)}, q = {fmt(exp.q)}, eta = {fmt(exp.eta)}"]
    for name, verdict in (("C1", exp.c1), ("C2", exp.c2)):
        if verdict is not None:
            lines.append(f"{name}: {'pass' if verdict.passed else 'fail'} "
                         f"(binding {verdict.binding}, margin {fmt(verdict.margin)})")
    lines.append("admissible" if exp.admissible else "inadmissible: " + "; ".join(exp.reasons()))
    return Outcome(OK if exp.admissible else FAILED, "\n".join(lines), report, [path], exp)


# --- bound ------------------------------------------------------------------

@dataclass(frozen=True)
class BoundResult:
    exponents: ExponentConfig
    constants: BoundConstants
    phi0: float
    t_lower: float
    quadrature_error: float
    corollary: float | None


def compute_bound(cfg: ExperimentConfig) -> tuple[BoundResult, GnConstants, dict]:
    exp = resolve_exponents(cfg)
    bc, gn, info = assemble(cfg, exp)
    grid = build_grid(cfg)
    phi0 = initial_phi(cfg, grid, exp.p, exp.q, cfg.model.alpha)
    rep = lower_bound_integral(phi0, bc, exp, cfg["bound.tol"])
    cor = corollary_bound(phi0, bc, exp).t_lower if 0.0 < phi0 < 1.0 else None
    return BoundResult(exp, bc, phi0, rep.t_lower, rep.quadrature_error_estimate, cor), gn, info


def run_bound(cfg: ExperimentConfig) -> Outcome:
    res, gn, info = compute_bound(cfg)
    report = _base_report("bound", cfg)
    report.section("exponents", _exponent_rows(res.exponents))
    report.section("constants", _constants_rows(res.constants, gn, info))
    rows = [("Phi(0)", res.phi0), ("t_lb", res.t_lower),
            ("quadrature_error_estimate", res.quadrature_error)]
    code = OK
    if res.corollary is not None:
        ok = res.corollary <= res.t_lower * (1.0 + 1e-12)
        rows += [("corollary", res.corollary), ("corollary <= t_lb", ok)]
        code = OK if ok else FAILED
    rows.append(("conditional_on", list(res.constants.conditional_on)))
    report.section("result", rows)
    path = _write_report(report, cfg)
    summary = f"Phi(0) = {fmt(res.phi0)}\nt_lb = {fmt(res.t_lower)}"
    if res.corollary is not None:
        summary += f"\ncorollary = {fmt(res.corollary)}"
    return Outcome(code, summary, report, [path], res)


# --- simulate ---------------------------------------------------------------

def _phi_exponents(cfg: ExperimentConfig) -> tuple[float, float]:
    if cfg["exponents.mode"] == "explicit":
        return cfg["exponents.p"], cfg["exponents.q"]
    exp = resolve_exponents(cfg)
    return exp.p, exp.q


def write_energy_csv(path: Path, series: EnergySeries) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(ENERGY_COLUMNS)
        for s in series.samples:
            writer.writerow([repr(float(getattr(s, c))) for c in ENERGY_COLUMNS])


def save_trajectory(path: Path, traj: Trajectory, verdict: BlowupVerdict, digest: str) -> None:
    np.savez(path, config_hash=np.array(digest),
             snap_t=np.array([s.t for s in traj.snapshots]),
             snap_u=np.array([s.u for s in traj.snapshots]),
             snap_v=np.array([s.v for s in traj.snapshots]),
             series=np.array([[getattr(s, c) for c in ENERGY_COLUMNS] for s in traj.series.samples]),
             monitor_t=traj.monitor_t, monitor_umax=traj.monitor_umax,
             monitor_phi=traj.monitor_phi, dt_used=traj.dt_used, dt_cap=traj.dt_cap,
             p=traj.p, q=traj.q, clip_events=traj.clip_events, verdict_kind=np.array(verdict.kind))


def load_trajectory(path: Path, cfg: ExperimentConfig, grid: Grid) -> Trajectory | None:
    """Reload a saved trajectory if it was produced by an identical config."""
    if not path.exists():
        return None
    with np.load(path) as data:
        if str(data["config_hash"]) != config_hash(cfg):
            return None
        snaps = [State(u.copy(), v.copy(), float(t))
                 for t, u, v in zip(data["snap_t"], data["snap_u"], data["snap_v"])]
        series = EnergySeries([EnergySample(*map(float, row)) for row in data["series"]])
        return Trajectory(grid=grid, params=cfg.model, p=float(data["p"]), q=float(data["q"]),
                          series=series, snapshots=snaps, monitor_t=data["monitor_t"],
                          monitor_umax=data["monitor_umax"], monitor_phi=data["monitor_phi"],
                          dt_used=data["dt_used"], dt_cap=data["dt_cap"],
                          clip_events=int(data["clip_events"]))


def _verdict_rows(verdict: BlowupVerdict, traj: Trajectory) -> list[tuple[str, object]]:
    mass = traj.series.column("mass")
    drift = abs(mass[-1] - mass[0]) / mass[0] if mass[0] > 0 else 0.0
    return [("kind", verdict.kind), ("trigger", verdict.trigger), ("t_final", verdict.t_final),
            ("t_star_estimate", verdict.t_star_estimate), ("t_star_phi", verdict.t_star_phi),
            ("low_confidence", verdict.low_confidence), ("final_u_max", verdict.final_u_max),
            ("final_phi", verdict.final_phi), ("final_gradv_max", verdict.final_gradv_max),
            ("steps", verdict.steps), ("rejected_steps", verdict.rejected_steps),
            ("clip_events", verdict.clip_events), ("mass_drift", drift),
            ("energy_samples", len(traj.series))]


def simulate_config(cfg: ExperimentConfig, params: ModelParams | None = None
                    ) -> tuple[Trajectory, BlowupVerdict, Grid]:
    params = params or cfg.model
    grid = build_grid(cfg, params)
    if grid is None:
        raise ConfigError("an abstract domain cannot be simulated")
    p, q = _phi_exponents(cfg)
    traj, verdict = simulate(initial_state(cfg, grid), params, grid, cfg.solver, p=p, q=q)
    return traj, verdict, grid


def _emit_trajectory(cfg: ExperimentConfig, traj: Trajectory, verdict: BlowupVerdict,
                     grid: Grid, plots: bool) -> list[Path]:
    out = cfg.out_dir
    out.mkdir(parents=True, exist_ok=True)
    files = [out / "energy.csv", out / "trajectory.npz"]
    write_energy_csv(files[0], traj.series)
    save_trajectory(files[1], traj, verdict, config_hash(cfg))
    snap_dir = out / "snapshots"
    snap_dir.mkdir(exist_ok=True)
    every = max(1, cfg["outputs.snapshot_every"])
    last = len(traj.snapshots) - 1
    for i, state in enumerate(traj.snapshots):
        if i % every == 0 or i == last:
            path = snap_dir / f"snapshot_{i:05d}.csv"
            write_snapshot_csv(path, state, grid)
            files.append(path)
    if plots:
        t = traj.series.column("t")
        svg.line_chart(out / "phi.svg", {"Phi": (t, traj.series.column("phi"))},
                       "Phi(t)", "t", "Phi", log_y=True)
        svg.line_chart(out / "u_max.svg", {"max u": (traj.monitor_t, traj.monitor_umax)},
                       "max u(t)", "t", "max u", log_y=True)
        files += [out / "phi.svg", out / "u_max.svg"]
    return files


def run_simulate(cfg: ExperimentConfig, plots: bool = True) -> Outcome:
    traj, verdict, grid = simulate_config(cfg)
    files = _emit_trajectory(cfg, traj, verdict, grid, plots and cfg["outputs.plots"])
    report = _base_report("simulate", cfg)
    report.section("phi", [("p", traj.p), ("q", traj.q)])
    report.section("verdict", _verdict_rows(verdict, traj))
    files.insert(0, _write_report(report, cfg))
    summary = f"{verdict.kind} at t = {fmt(verdict.t_final)}"
    if verdict.kind == BLOWUP:
        summary += (f" (trigger {verdict.trigger}); t* ~ {fmt(verdict.t_star_estimate)} "
                    f"[L-inf], {fmt(verdict.t_star_phi)} [Phi]")
    return Outcome(OK, summary, report, files, (traj, verdict))


# --- verify -----------------------------------------------------------------

def _skipped(name: str, tol: float, note: str) -> CheckResult:
    return CheckResult(name=name, samples=0, worst_residual=float("nan"), tolerance=tol,
                       passed=True, skipped=True, note=note)


def verify_trajectory(cfg: ExperimentConfig, traj: Trajectory, tol: float) -> VerifyReport:
    checks = [check_lemma_u(traj, traj.p, cfg.model, tol),
              check_lemma_v_convex(traj, traj.q, cfg.model, tol)]
    flags: dict[str, list[str]] = {}
    try:
        exp = exponents_for(cfg.model, traj.p, traj.q, cfg["exponents.eta"])
        if not exp.admissible:
            raise InadmissibleConfigError("; ".join(exp.reasons()))
        bc, _, _ = assemble(cfg, exp)
    except (InadmissibleConfigError, ConfigError) as exc:
        checks.append(_skipped("ode-inequality", tol, f"constants unavailable: {exc}"))
    else:
        check = check_ode_inequality(traj.series, bc, exp, tol)
        checks.append(check)
        flags[check.name] = list(bc.conditional_on)
    if cfg["sweep.m1"]:
        m1_check, _ = check_m1_monotonicity(traj.p, traj.q, cfg.model.n, cfg["sweep.m1"],
                                            m2=cfg.model.m2, eta=cfg["exponents.eta"])
        checks.append(m1_check)
    return VerifyReport(checks=checks, conditional_flags=flags)


def run_verify(cfg: ExperimentConfig, tol: float | None = None, plots: bool = True) -> Outcome:
    tol = cfg["verify.tol"] if tol is None else tol
    grid = build_grid(cfg)
    if grid is None:
        raise ConfigError("an abstract domain has no trajectory to verify")
    traj = load_trajectory(cfg.out_dir / "trajectory.npz", cfg, grid)
    source = "reloaded"
    files: list[Path] = []
    if traj is None:
        traj, verdict, grid = simulate_config(cfg)
        files = _emit_trajectory(cfg, traj, verdict, grid, plots and cfg["outputs.plots"])
        source = "simulated"
    vr = verify_trajectory(cfg, traj, tol)
    out = cfg.out_dir
    csv_path = out / "verify.csv"
    with open(csv_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(VERIFY_COLUMNS)
        for row in vr.rows():
            writer.writerow([fmt(row[c]) for c in VERIFY_COLUMNS])
    report = _base_report("verify", cfg)
    report.section("trajectory", [("source", source), ("samples", len(traj.series)),
                                  ("p", traj.p), ("q", traj.q)])
    for c in vr.checks:
        report.section(f"check {c.name}", [
            ("verdict", c.verdict), ("samples", c.samples), ("worst_residual", c.worst_residual),
            ("tolerance", c.tolerance), ("conditional", c.conditional), ("note", c.note or "none")])
    report.section("conditional_flags", {k: v for k, v in vr.conditional_flags.items()})
    path = _write_report(report, cfg, "verify_report.txt")
    summary = "\n".join(f"{c.name}: {c.verdict} (worst residual {fmt(c.worst_residual)}, "
                        f"tol {fmt(c.tolerance)}{', conditional' if c.conditional else ''})"
                        for c in vr.checks)
    return Outcome(OK if vr.passed else FAILED, summary, report, [path, csv_path] + files, vr)


# --- sweep ------------------------------------------------------------------

@dataclass(frozen=True)
class SweepRow:
    m1: float
    p: float
    q: float
    phi0: float | None
    A: float | None
    B: float | None
    C: float | None
    D: float | None
    t_lb: float | None
    t_star_observed: float | None
    verdict: str
    f_r: float | None = None


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[SweepRow, ...]
    frozen: bool
    monotone: bool | None

    def column(self, name: str) -> list:
        return [getattr(r, name) for r in self.rows]


def _sweep_row(job: tuple) -> SweepRow:
    cfg, m1, frozen_base, do_simulate = job
    params = replace(cfg.model, m1=m1)
    p, q = _phi_exponents(cfg)
    try:
        exp = exponents_for(params, p, q, cfg["exponents.eta"])
        if not exp.admissible:
            return SweepRow(m1, p, q, None, None, None, None, None, None, None,
                            "inadmissible: " + "; ".join(exp.reasons()), exp.f_r)
        grid = build_grid(cfg, params)
        phi0 = initial_phi(cfg, grid, p, q, params.alpha)
        if frozen_base is not None:
            bc, base_exp = frozen_base
            rep = lower_bound_integral(phi0, bc, replace(base_exp, f_r=exp.f_r), cfg["bound.tol"])
        else:
            bc, _, _ = assemble(cfg, exp, params)
            rep = lower_bound_integral(phi0, bc, exp, cfg["bound.tol"])
        t_star = None
        verdict = "ok"
        if do_simulate:
            _, sim, _ = simulate_config(cfg, params)
            if sim.kind == BLOWUP:
                t_star = sim.t_star_estimate
                if rep.t_lower > t_star:
                    verdict = "t_lb exceeds observed t*"
            else:
                verdict = f"ok ({sim.kind})"
        return SweepRow(m1, p, q, phi0, bc.A, bc.B, bc.C, bc.D, rep.t_lower, t_star, verdict,
                        exp.f_r)
    except KSError as exc:
        return SweepRow(m1, p, q, None, None, None, None, None, None, None, f"error: {exc}")


def sweep(cfg: ExperimentConfig, m1_values, frozen: bool = False,
          simulate_rows: bool | None = None) -> SweepResult:
    values = sorted({float(m) for m in m1_values})
    if not values:
        raise ConfigError("sweep needs at least one m1 value (sweep.m1 or --m1)")
    do_sim = cfg["sweep.simulate"] if simulate_rows is None else simulate_rows
    frozen_base = None
    if frozen:
        base_exp = resolve_exponents(cfg)
        bc, _, _ = assemble(cfg, base_exp)
        frozen_base = (bc, base_exp)
    jobs = [(cfg, m1, frozen_base, do_sim) for m1 in values]
    workers = min(cfg["sweep.workers"], len(jobs))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = tuple(pool.map(_sweep_row, jobs))
    else:
        rows = tuple(_sweep_row(job) for job in jobs)
    monotone = None
    if frozen:
        good = [r for r in rows if r.t_lb is not None]
        monotone = all(b.t_lb >= a.t_lb and b.f_r < a.f_r for a, b in zip(good, good[1:]))
    return SweepResult(rows=rows, frozen=frozen, monotone=monotone)


def write_sweep_csv(path: Path, result: SweepResult) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SWEEP_COLUMNS)
        for row in result.rows:
            writer.writerow(["" if getattr(row, c) is None else
                             (repr(float(getattr(row, c))) if c != "verdict" else row.verdict)
                             for c in SWEEP_COLUMNS])


def run_sweep(cfg: ExperimentConfig, m1_values=None, frozen: bool = False,
              plots: bool = True) -> Outcome:
    values = cfg["sweep.m1"] if m1_values is None else m1_values
    result = sweep(cfg, values, frozen)
    out = cfg.out_dir
    out.mkdir(parents=True, exist_ok=True)
    files = [out / "sweep.csv"]
    write_sweep_csv(files[0], result)
    good = [r for r in result.rows if r.t_lb is not None]
    if plots and cfg["outputs.plots"]:
        series = {"t_lb": ([r.m1 for r in good], [r.t_lb for r in good])}
        observed = [r for r in good if r.t_star_observed is not None]
        if observed:
            series["observed t*"] = ([r.m1 for r in observed],
                                     [r.t_star_observed for r in observed])
        svg.line_chart(out / "sweep.svg", series, "lower bound vs m1", "m1", "time", log_y=True)
        files.append(out / "sweep.svg")
    report = _base_report("sweep", cfg)
    report.section("sweep", [("mode", "frozen-constants" if frozen else "full-constants"),
                             ("m1_values", [r.m1 for r in result.rows]),
                             ("monotone", result.monotone)])
    for r in result.rows:
        report.section(f"row m1={fmt(r.m1)}", [(c, getattr(r, c)) for c in SWEEP_COLUMNS[1:]]
                       + [("f_r", r.f_r)])
    files.insert(0, _write_report(report, cfg))
    failed = (result.monotone is False
              or any(r.t_lb is not None and not r.t_lb > 0 for r in result.rows)
              or any(r.verdict.startswith("t_lb exceeds") for r in result.rows))
    lines = [f"m1 = {fmt(r.m1)}: t_lb = {fmt(r.t_lb)}, {r.verdict}" for r in result.rows]
    if frozen:
        lines.append(f"t_lb nondecreasing in m1: {fmt(result.monotone)}")
    return Outcome(FAILED if failed else OK, "\n".join(lines), report, files, result)
