"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the summary lines
(they are also emitted without ``-s`` through ``capsys.disabled``).
"""

import math
import time
from pathlib import Path

import numpy as np
import pytest

from ksblowup.bound import corollary_bound, lower_bound_integral
from ksblowup.constants import BoundConstants, GnConstants, assemble_bound_constants
from ksblowup.errors import InfeasibleEpsilonError
from ksblowup.exponents import (DomainSpec, ExponentConfig, ModelParams, derive_exponents,
                                exponent_f, exponents_for, gn_exponent_a, resolve_eta)
from ksblowup.field import State, make_grid
from ksblowup.harness.cli import run as cli_run
from ksblowup.harness.config import load_config
from ksblowup.harness.experiments import compute_bound, simulate_config, sweep
from ksblowup.harness.report import read_hash
from ksblowup.solver import BLOWUP, COMPLETED, SolverConfig, detect_blowup, simulate
from ksblowup.verify import check_lemma_u, check_lemma_v_convex

CONFIGS = Path(__file__).resolve().parent.parent / "configs"
INTERVAL = DomainSpec.interval(1.0)
DISC = DomainSpec.ball(1.0, 2)


@pytest.fixture
def verdict(capsys):
    def emit(number: int, title: str, ok: bool, detail: str = "") -> None:
        line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {title}"
        if detail:
            line += f" ({detail})"
        with capsys.disabled():
            print("\n" + line)
        assert ok, line
    return emit


def random_admissible(rng, count):
    """Draw admissible exponent configurations from a seeded generator."""
    out = []
    while len(out) < count:
        n = int(rng.integers(1, 6))
        eta = resolve_eta(n) if n >= 3 else float(rng.uniform(1.1, 1.9))
        m1, m2 = float(rng.uniform(0.5, 3.0)), float(rng.uniform(1.0, 5.0))
        q = 1 / (eta - 1) + float(rng.uniform(0.05, 6.0))
        p = float(rng.uniform(1.0, 40.0))
        cfg = derive_exponents(p, q, n, m1, m2, eta)
        if cfg.admissible:
            out.append((n, m1, m2, cfg))
    return out


def brute_force(p, q, n, m1, m2, eta):
    c1 = {"n/2*(m2-m1)": n * (m2 - m1) / 2, "n*(m2-m1-1)": n * (m2 - m1 - 1), "n": n}
    c2 = {"q(2m2-m1-3)/(q*eta-q-1)": q * (2 * m2 - m1 - 3) / (q * eta - q - 1),
          "-2m2+m1+3": -2 * m2 + m1 + 3,
          "2q/(q*eta-q+1)": 2 * q / (q * eta - q + 1),
          "eta(m1-1)/((eta-1)(eta-2))": eta * (m1 - 1) / ((eta - 1) * (eta - 2))}
    pick = {}
    for name, terms in (("c1", c1), ("c2", c2)):
        best = None
        for key, value in terms.items():
            if best is None or value > terms[best]:
                best = key
        pick[name] = (best, all(p > v for v in terms.values()))
    return pick


def test_criterion_1_exponent_arithmetic(verdict):
    start = time.perf_counter()
    checks = [abs(exponent_f(1.5, 1.0, 3) - 3.0) <= 1e-12,
              abs(exponent_f(1.5, 0.8, 3) - 1.8) <= 1e-12,
              abs(gn_exponent_a(1.0, 1.5, 3) - 0.5) <= 1e-12]
    worst = 0.0
    for _, _, _, cfg in random_admissible(np.random.default_rng(1), 1000):
        a = gn_exponent_a(cfg.r, cfg.eta, cfg.n)
        closed = (1 - a) * cfg.eta / (1 - a * cfg.r * cfg.eta)
        worst = max(worst, abs(cfg.f_r - closed) / abs(closed))
    elapsed = time.perf_counter() - start
    ok = all(checks) and worst <= 1e-12 and elapsed < 1.0
    verdict(1, "exponent arithmetic", ok, f"worst identity rel err {worst:.2e}, {elapsed:.2f}s")


def test_criterion_2_condition_gates(verdict):
    start = time.perf_counter()
    good = derive_exponents(4.0, 4.0, 3, 1.0, 2.0)
    bad = derive_exponents(3.0, 4.0, 3, 1.0, 2.0)
    agree = True
    for p, q in ((4.0, 4.0), (3.0, 4.0), (5.0, 2.5), (10.0, 3.0)):
        cfg = derive_exponents(p, q, 3, 1.0, 2.0)
        ref = brute_force(p, q, 3, 1.0, 2.0, cfg.eta)
        agree &= (cfg.c1.binding, cfg.c1.passed) == ref["c1"]
        agree &= (cfg.c2.binding, cfg.c2.passed) == ref["c2"]
    for n, m1, m2, cfg in random_admissible(np.random.default_rng(2), 200):
        ref = brute_force(cfg.p, cfg.q, n, m1, m2, cfg.eta)
        agree &= (cfg.c1.binding, cfg.c1.passed) == ref["c1"]
        agree &= (cfg.c2.binding, cfg.c2.passed) == ref["c2"]
    elapsed = time.perf_counter() - start
    ok = good.admissible and not bad.admissible and agree and elapsed < 1.0
    verdict(2, "condition gates", ok, f"(4,4) {good.admissible}, (3,4) {bad.admissible}, "
            f"binding terms agree {agree}, {elapsed:.2f}s")


def test_criterion_3_constants_audit(verdict):
    params = ModelParams(3, 1.0, 2.0, 1.0, 1.0, DomainSpec.ball_with_measure(1.0, 3))
    bc = assemble_bound_constants(exponents_for(params, 4.0, 4.0), params, GnConstants(1.0, 1.0))
    cf = bc.cfactors
    expected = {"E1": (bc.e1, 5.0), "E2": (bc.e2, 4.0), "C1": (cf.c1, 3.0), "C2": (cf.c2, 2.0),
                "C4": (cf.c4, 3.0), "eps": (bc.epsilon, 1 / 64), "A": (bc.A, 2560.0),
                "C": (bc.C, 288.0)}
    bad = [k for k, (got, want) in expected.items() if abs(got - want) > 1e-12 * abs(want)]
    ok = not bad and bc.D == 0.0
    verdict(3, "worked constants", ok, "mismatch: " + ", ".join(bad) if bad else "all match")


def test_criterion_4_quadrature(verdict):
    start = time.perf_counter()

    def single(coef, expo, c=0.0):
        cfg = ExponentConfig(p=2, q=2, eta=1.5, r=1, f_r=expo, f_1=expo, a=None, beta1=None,
                             beta2=None)
        return BoundConstants(A=coef, B=0.0, C=c, D=0.0), cfg

    bc, cfg = single(1.0, 2.0)
    i2 = lower_bound_integral(1.0, bc, cfg).t_lower
    bc, cfg = single(1.0, 3.0)
    i3 = lower_bound_integral(1.0, bc, cfg).t_lower
    arctan_cfg = ExponentConfig(p=2, q=2, eta=1.5, r=1, f_r=2.0, f_1=2.0, a=None, beta1=None,
                                beta2=None)
    ia = lower_bound_integral(0.0, BoundConstants(A=1.0, B=0.0, C=0.0, D=1.0), arctan_cfg).t_lower
    oracles = (abs(i2 - 1.0) <= 1e-8 and abs(i3 - 0.5) <= 1e-8
               and abs(ia - math.pi / 2) <= 1e-8)

    rng = np.random.default_rng(4)
    below, tried = 0, 0
    while tried < 100:
        n, m1, m2, cfg = random_admissible(rng, 1)[0]
        params = ModelParams(n, m1, m2, 1.0, 1.0, DomainSpec.abstract(1.0, n, True))
        try:
            bc = assemble_bound_constants(cfg, params, GnConstants(*rng.uniform(0.5, 2.0, 2)))
        except (InfeasibleEpsilonError, OverflowError):
            continue
        if not all(math.isfinite(x) for x in (bc.A, bc.B, bc.C)):
            continue
        tried += 1
        phi0 = float(rng.uniform(0.001, 0.999))
        cor = corollary_bound(phi0, bc, cfg).t_lower
        below += cor <= lower_bound_integral(phi0, bc, cfg).t_lower * (1 + 1e-10)
    elapsed = time.perf_counter() - start
    ok = oracles and below == 100 and elapsed < 5.0
    verdict(4, "quadrature", ok, f"errors {abs(i2 - 1):.1e}/{abs(i3 - 0.5):.1e}/"
            f"{abs(ia - math.pi / 2):.1e}, corollary below {below}/100, {elapsed:.2f}s")


def test_criterion_5_m1_effect(verdict):
    start = time.perf_counter()
    cfg = load_config(CONFIGS / "worked.cfg")
    result = sweep(cfg, (1.0, 1.5, 2.0, 3.0), frozen=True, simulate_rows=False)
    f = result.column("f_r")
    t = result.column("t_lb")
    elapsed = time.perf_counter() - start
    ok = (None not in t and all(b < a for a, b in zip(f, f[1:]))
          and all(b >= a for a, b in zip(t, t[1:])) and elapsed < 5.0)
    verdict(5, "m1 effect", ok, "f = " + ", ".join(f"{x:.4g}" for x in f) + "; t_lb = "
            + ", ".join(f"{x:.4g}" for x in t) + f"; {elapsed:.2f}s")


def test_criterion_6_solver_quality(verdict):
    start = time.perf_counter()
    drifts, errs = [], []
    heat = ModelParams(1, 1.0, 2.0, 0.0, 1.0, INTERVAL)
    for n in (64, 128, 256):
        g = make_grid(INTERVAL, n)
        x = np.asarray(g.centers)
        traj, res = simulate(State(2 + np.cos(np.pi * x), np.zeros(n)), heat, g,
                             SolverConfig(t_end=0.1, sample_stride=0.01, rtol=1e-6))
        exact = 2 + np.cos(np.pi * x) * np.exp(-np.pi ** 2 * 0.1)
        errs.append(float(np.max(np.abs(traj.snapshots[-1].u - exact))))
        drifts.append((res, traj))
    g = make_grid(DISC, 128)
    r = np.asarray(g.centers)
    drifts.append(simulate(State(1 + 2 * np.exp(-(r / 0.3) ** 2), np.zeros(128)),
                           ModelParams(2, 1.5, 2.0, 1.0, 1.0, DISC), g,
                           SolverConfig(t_end=0.05, sample_stride=0.005))[::-1])
    worst = 0.0
    for res, traj in drifts:
        assert res.kind == COMPLETED
        m = traj.series.column("mass")
        worst = max(worst, float(np.max(np.abs(m - m[0])) / m[0]))
    orders = [math.log2(a / b) for a, b in zip(errs, errs[1:])]
    elapsed = time.perf_counter() - start
    ok = worst < 1e-8 and all(1.7 <= o <= 2.3 for o in orders) and elapsed < 60
    verdict(6, "solver quality", ok, f"mass drift {worst:.1e}, orders "
            + ", ".join(f"{o:.3f}" for o in orders) + f", {elapsed:.1f}s")


def test_criterion_7_inequality_audits(verdict):
    start = time.perf_counter()
    g = make_grid(INTERVAL, 128)
    x = np.asarray(g.centers)
    cfg = SolverConfig(t_end=0.05, sample_stride=0.001)
    dissipative = ModelParams(1, 1.5, 2.0, 0.0, 1.0, INTERVAL)
    chemo = ModelParams(1, 1.0, 2.0, 1.0, 1.0, INTERVAL)
    runs = {
        "chi=0": simulate(State(1 + np.cos(np.pi * x), np.zeros(128)), dissipative, g, cfg,
                          p=2.0, q=2.0)[0],
        "interval": simulate(State(1 + np.cos(np.pi * x), 0.5 + 0.3 * np.cos(2 * np.pi * x)),
                             chemo, g, cfg, p=2.0, q=2.0)[0],
    }
    gd = make_grid(DISC, 128)
    r = np.asarray(gd.centers)
    runs["disc"] = simulate(State(5 * np.exp(-(r / 0.3) ** 2), np.zeros(128)),
                            ModelParams(2, 1.0, 3.0, 1.0, 1.0, DISC), gd, cfg, p=4.0, q=2.0)[0]
    results = [check_lemma_u(traj, traj.p) for traj in runs.values()]
    results += [check_lemma_v_convex(traj, traj.q) for traj in runs.values()]
    elapsed = time.perf_counter() - start
    ok = (all(c.passed and not c.skipped and not c.conditional for c in results)
          and elapsed < 120)
    verdict(7, "inequality audits", ok, ", ".join(
        f"{c.name} {c.worst_residual:.1e}" for c in results) + f"; {elapsed:.1f}s")


@pytest.mark.slow
def test_criterion_8_end_to_end(verdict):
    start = time.perf_counter()
    cfg = load_config(CONFIGS / "blowup_2d.cfg")
    assert cfg.cells == 512
    bound, _, _ = compute_bound(cfg)
    _, res, _ = simulate_config(cfg)
    elapsed = time.perf_counter() - start
    ok = res.kind == BLOWUP and res.t_star_estimate is not None and res.t_star_phi is not None
    gap = math.inf
    if ok:
        gap = abs(res.t_star_phi - res.t_star_estimate) / res.t_star_estimate
        ok = bound.t_lower <= res.t_star_estimate and gap <= 0.05 and elapsed < 300
    verdict(8, "end-to-end bound sanity [conditional on estimated GN constants]", ok,
            f"t_lb {bound.t_lower:.3e}, t*_Linf {res.t_star_estimate}, t*_Phi {res.t_star_phi}, "
            f"gap {gap:.2%}, {elapsed:.1f}s")


def test_criterion_9_detector(verdict):
    t = np.linspace(0.0, 0.999, 2000)
    fit = detect_blowup(t, 1.0 / (1.0 - t))
    ok = abs(fit.t_star - 1.0) <= 1e-3
    verdict(9, "blow-up detector", ok, f"t* = {fit.t_star:.6f}")


def test_criterion_10_determinism(verdict, tmp_path):
    cfg = CONFIGS / "subcritical_1d.cfg"
    codes, energy, hashes = [], [], []
    for name in ("first", "second"):
        out = tmp_path / name
        codes.append(cli_run(["simulate", "--config", str(cfg), "--out", str(out), "--no-plots"]))
        energy.append((out / "energy.csv").read_bytes())
        hashes.append(read_hash(out / "report.txt"))
    ok = codes == [0, 0] and energy[0] == energy[1] and hashes[0] == hashes[1] and hashes[0]
    verdict(10, "determinism", bool(ok), f"hash {hashes[0]}")
