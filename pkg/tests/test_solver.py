import numpy as np
import pytest

from ksblowup.errors import InsufficientDataError, InvalidStateError, KSError
from ksblowup.exponents import DomainSpec, ModelParams
from ksblowup.field import State, make_grid, mass
from ksblowup.solver import (BLOWUP, COMPLETED, SolverConfig, detect_blowup, rhs, simulate,
                             step_adaptive)

INTERVAL = DomainSpec.interval(1.0)


def heat_params(chi=0.0):
    return ModelParams(1, 1.0, 2.0, chi, 1.0, INTERVAL)


class TestRhs:
    def test_constant_density_no_chemotaxis(self):
        g = make_grid(INTERVAL, 32)
        du, _ = rhs(State(np.full(32, 3.0), np.linspace(0, 1, 32)), heat_params(), g)
        assert np.all(du == 0)

    def test_constant_fields_reaction_only(self):
        g = make_grid(INTERVAL, 32)
        du, dv = rhs(State(np.full(32, 3.0), np.full(32, 1.25)), heat_params(1.0), g)
        assert np.allclose(du, 0) and np.allclose(dv, 3.0 - 1.25)

    @pytest.mark.parametrize("spec,n", [(INTERVAL, 1), (DomainSpec.ball(1.0, 2), 2),
                                        (DomainSpec.ball(1.0, 3), 3)])
    def test_discrete_mass_conservation(self, spec, n, rng):
        g = make_grid(spec, 64)
        params = ModelParams(n, 1.5, 2.5, 2.0, 0.5, spec)
        du, _ = rhs(State(rng.random(64) * 5, rng.random(64) * 5), params, g)
        scale = np.dot(np.abs(du), g.volumes)
        assert abs(np.dot(du, g.volumes)) <= 1e-12 * max(scale, 1.0)

    def test_negative_input(self):
        g = make_grid(INTERVAL, 16)
        u = np.ones(16)
        u[3] = -1e-3
        with pytest.raises(InvalidStateError):
            rhs(State(u, np.zeros(16)), heat_params(), g)


class TestStepping:
    def test_step_respects_cap(self, rng):
        g = make_grid(INTERVAL, 64)
        cfg = SolverConfig()
        st = State(1 + rng.random(64), rng.random(64))
        new, dt = step_adaptive(st, heat_params(1.0), g, cfg)
        assert 0 < dt <= cfg.cfl_safety * g.h ** 2 / 2
        assert new.t == pytest.approx(dt)

    def test_config_validation(self):
        with pytest.raises(KSError):
            SolverConfig(cfl_safety=1.5)
        with pytest.raises(KSError):
            SolverConfig(dt_min=0.0)

    def test_heat_relaxes_to_mean(self):
        g = make_grid(INTERVAL, 128)
        x = np.asarray(g.centers)
        # second mode decays like exp(-4 pi^2 t), far below 1e-6 by t = 1
        traj, verdict = simulate(State(2 + np.cos(2 * np.pi * x), np.zeros(128)), heat_params(),
                                 g, SolverConfig(t_end=1.0, sample_stride=0.1))
        assert verdict.kind == COMPLETED
        assert np.max(np.abs(traj.snapshots[-1].u - 2.0)) < 1e-6
        assert np.all(traj.dt_used <= traj.dt_cap * (1 + 1e-12))

    def test_manufactured_heat_second_order(self):
        errs = []
        for n in (64, 128, 256):
            g = make_grid(INTERVAL, n)
            x = np.asarray(g.centers)
            traj, _ = simulate(State(2 + np.cos(np.pi * x), np.zeros(n)), heat_params(), g,
                               SolverConfig(t_end=0.1, sample_stride=0.1, rtol=1e-6))
            exact = 2 + np.cos(np.pi * x) * np.exp(-np.pi ** 2 * 0.1)
            errs.append(np.max(np.abs(traj.snapshots[-1].u - exact)))
        for coarse, fine in zip(errs, errs[1:]):
            assert 3.2 <= coarse / fine <= 4.8


class TestSimulate:
    def _subcritical(self, clip=True):
        g = make_grid(INTERVAL, 128)
        x = np.asarray(g.centers)
        u0 = 0.5 + 2 * np.exp(-((x - 0.5) / 0.1) ** 2)
        cfg = SolverConfig(t_end=0.1, sample_stride=0.005, clip=clip)
        return simulate(State(u0, np.zeros(128)), heat_params(1.0), g, cfg)

    def test_subcritical_completes_and_conserves_mass(self):
        traj, verdict = self._subcritical()
        assert verdict.kind == COMPLETED and verdict.t_star_estimate is None
        m = traj.series.column("mass")
        assert abs(m[-1] - m[0]) / m[0] < 1e-8
        assert verdict.clip_events == 0

    def test_positivity_without_clipping(self):
        traj, _ = self._subcritical(clip=False)
        assert traj.min_u_seen >= -1e-10

    def test_deterministic(self):
        a, _ = self._subcritical()
        b, _ = self._subcritical()
        assert np.array_equal(a.series.column("phi"), b.series.column("phi"))
        assert np.array_equal(a.snapshots[-1].u, b.snapshots[-1].u)

    def test_supercritical_detects_blowup(self):
        spec = DomainSpec.ball(1.0, 2)
        g = make_grid(spec, 128)
        u0 = 500 * np.exp(-(np.asarray(g.centers) / 0.1) ** 2)
        cfg = SolverConfig(t_end=0.01, sample_stride=1e-4, u_blowup_threshold=1e4)
        traj, verdict = simulate(State(u0, np.zeros(128)), ModelParams(2, 1, 3, 1, 1, spec), g,
                                 cfg, p=7, q=6)
        assert verdict.kind == BLOWUP and verdict.trigger == "threshold"
        assert verdict.t_star_estimate >= verdict.t_final
        assert verdict.t_star_phi >= verdict.t_final
        m = traj.series.column("mass")
        assert abs(m[-1] - m[0]) / m[0] < 1e-8

    def test_rejects_mismatched_initial_data(self):
        g = make_grid(INTERVAL, 16)
        with pytest.raises(InvalidStateError):
            simulate(State(np.ones(8), np.ones(8)), heat_params(), g, SolverConfig())


class TestDetectBlowup:
    def test_simple_pole(self):
        t = np.linspace(0, 1 - 1e-6, 20001)
        fit = detect_blowup(t, 1 / (1 - t), threshold=1e5)
        assert abs(fit.t_star - 1.0) < 1e-3 and not fit.low_confidence

    def test_double_pole(self):
        t = 1 - np.geomspace(1, 1e-3, 4000)
        fit = detect_blowup(t, (1 - t) ** -2.0, threshold=1e5)
        assert abs(fit.t_star - 1.0) < 5e-3

    def test_below_threshold(self):
        with pytest.raises(KSError):
            detect_blowup([0, 1, 2], [1.0, 1.0, 1.0], threshold=1e8)

    def test_non_monotone_tail_low_confidence(self):
        fit = detect_blowup([0, 1, 2, 3], [1.0, 5.0, 3.0, 10.0])
        assert fit.low_confidence and fit.t_star == 3.0

    def test_too_few_points(self):
        with pytest.raises(InsufficientDataError):
            detect_blowup([0, 1], [1.0, 2.0])

    def test_clamped_to_last_time(self):
        t = np.linspace(0, 0.5, 50)
        fit = detect_blowup(t, 1 / (1 - t))
        assert fit.t_star >= t[-1]
