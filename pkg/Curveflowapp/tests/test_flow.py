import math

import numpy as np
from django.test import SimpleTestCase

from Curveflowapp.curve import RadialCurve
from Curveflowapp.exceptions import DomainError, FitWindowError, NotConvexError
from Curveflowapp.flow import (
    FlowConfig,
    FlowStatus,
    SpeedLaw,
    curvature_evolution_residual,
    decay_rate,
    diffusivity,
    normal_speed,
    refine,
    rescaled_classical,
    rhs,
    run,
    stable_dt,
    step,
)
from Curveflowapp.generators import fourier_rho
from Curveflowapp.spaceform import SpaceForm


def circle(K, r, N):
    return RadialCurve(SpaceForm(K), np.full(N, r))


class SpeedTests(SimpleTestCase):
    def test_circles_are_stationary_under_constrained_flow(self):
        for K in (-1, 0, 1):
            self.assertLess(np.max(np.abs(rhs(circle(K, 0.8, 32), SpeedLaw.CONSTRAINED_ICF))), 1e-13)

    def test_curve_shortening_speed(self):
        np.testing.assert_allclose(normal_speed(circle(0, 2.0, 32), SpeedLaw.CURVE_SHORTENING), -0.5)

    def test_inverse_curvature_needs_convexity(self):
        star = RadialCurve(SpaceForm(0), fourier_rho(1.0, {3: 0.5}, {}, 64))
        for law in (SpeedLaw.CONSTRAINED_ICF, SpeedLaw.CLASSICAL_ICF):
            with self.assertRaises(NotConvexError):
                rhs(star, law)
        self.assertEqual(rhs(star, SpeedLaw.CURVE_SHORTENING).shape, (64,))

    def test_stable_step(self):
        c = circle(0, 1.0, 64)
        self.assertAlmostEqual(stable_dt(c, SpeedLaw.CURVE_SHORTENING, 0.1), 0.1 * c.h ** 2)
        np.testing.assert_allclose(diffusivity(c, SpeedLaw.CONSTRAINED_ICF), 1.0)


class ExactSolutionTests(SimpleTestCase):
    def test_shrinking_circle(self):
        trace = run(circle(0, 1.0, 128), SpeedLaw.CURVE_SHORTENING, FlowConfig(t_end=0.1, report_stride=50))
        self.assertEqual(trace.status, FlowStatus.TIME_LIMIT)
        self.assertAlmostEqual(trace.t_final, 0.1, places=12)
        np.testing.assert_allclose(trace.final.rho, math.sqrt(1 - 2 * 0.1), rtol=1e-9)
        self.assertEqual(trace.violations, [])

    def test_expanding_circle(self):
        trace = run(circle(0, 1.0, 64), SpeedLaw.CLASSICAL_ICF, FlowConfig(t_end=1.0, report_stride=200))
        self.assertEqual(trace.status, FlowStatus.TIME_LIMIT)
        np.testing.assert_allclose(trace.final.rho, math.e, rtol=1e-9)
        self.assertAlmostEqual(trace.reports[-1].L, 2 * math.pi * math.e, delta=1e-6)

    def test_curvature_evolution_on_shrinking_circle(self):
        c = circle(0, 1.0, 64)
        dt = 1e-4
        c_next = step(c, SpeedLaw.CURVE_SHORTENING, dt)
        self.assertLess(curvature_evolution_residual(c, c_next, SpeedLaw.CURVE_SHORTENING, dt), 1e-3)


class StoppingTests(SimpleTestCase):
    def test_circle_converges_immediately(self):
        trace = run(circle(1, 0.6, 32), SpeedLaw.CONSTRAINED_ICF)
        self.assertEqual(trace.status, FlowStatus.CONVERGED)
        self.assertEqual(trace.steps, 0)
        self.assertLess(trace.limit_error(), 1e-12)

    def test_shortening_stops_before_collapse(self):
        trace = run(circle(0, 1.0, 64), SpeedLaw.CURVE_SHORTENING, FlowConfig(t_end=1.0))
        self.assertEqual(trace.status, FlowStatus.SINGULARITY)
        self.assertTrue(trace.failed)
        self.assertLess(trace.t_final, 0.05)

    def test_refinement_retry(self):
        config = FlowConfig(t_end=0.05, refine_on_failure=True, report_stride=100)
        trace = run(circle(0, 1.0, 64), SpeedLaw.CURVE_SHORTENING, config)
        self.assertTrue(trace.refined)
        self.assertEqual(trace.initial.N, 128)
        self.assertEqual(trace.status, FlowStatus.TIME_LIMIT)

    def test_hemisphere_expansion_fails_near_equator(self):
        trace = run(circle(1, 1.4, 32), SpeedLaw.CLASSICAL_ICF, FlowConfig(t_end=1.0, report_stride=1000))
        self.assertIn(trace.status, (FlowStatus.POLE_HIT, FlowStatus.STEP_UNDERFLOW))
        self.assertTrue(trace.failed)

    def test_nonconvex_start_is_rejected(self):
        star = RadialCurve(SpaceForm(0), fourier_rho(1.0, {3: 0.5}, {}, 64))
        with self.assertRaises(NotConvexError):
            run(star, SpeedLaw.CONSTRAINED_ICF)

    def test_config_validation(self):
        with self.assertRaises(DomainError):
            FlowConfig(sigma=0.0)
        with self.assertRaises(DomainError):
            FlowConfig(t_end=-1.0)


class ConstrainedFlowTests(SimpleTestCase):
    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        c0 = RadialCurve(SpaceForm(0), fourier_rho(1.0, {2: 0.08}, {3: 0.02}, 64))
        cls.trace = run(c0, SpeedLaw.CONSTRAINED_ICF, FlowConfig(t_end=30.0, eps_stationary=1e-7))

    def test_converges_to_circle_of_same_length(self):
        self.assertEqual(self.trace.status, FlowStatus.CONVERGED)
        self.assertAlmostEqual(self.trace.limit_radius(), self.trace.reports[0].L / (2 * math.pi))
        self.assertLess(self.trace.limit_error(), 1e-4)

    def test_monotone_quantities(self):
        first, last = self.trace.reports[0], self.trace.reports[-1]
        self.assertAlmostEqual(last.L, first.L, delta=1e-5 * first.L)
        self.assertGreater(last.A, first.A)
        self.assertLess(last.deficit, first.deficit)
        self.assertLess(last.kappa_max, first.kappa_max)
        self.assertGreater(last.kappa_min, first.kappa_min)
        self.assertEqual(self.trace.violations, [])

    def test_summary(self):
        summary = self.trace.summary()
        self.assertEqual(summary["status"], "converged")
        self.assertEqual(summary["law"], "constrained_icf")
        self.assertIn("limit_error", summary)

    def test_trace_layout(self):
        self.assertEqual(len(self.trace.times), len(self.trace.diagnostics))
        self.assertEqual(len(self.trace.times), len(self.trace.reports))
        self.assertEqual(self.trace.snapshots[0][0], 0.0)
        self.assertEqual(self.trace.snapshots[-1][0], self.trace.t_final)


class CurvedConstrainedFlowTests(SimpleTestCase):
    """The same perturbed circle flowed in the hyperbolic plane and on the hemisphere."""

    limit_radius = {-1: math.asinh, 1: math.asin}

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        config = FlowConfig(t_end=40.0, eps_stationary=1e-7)
        cls.traces = {
            K: run(RadialCurve(SpaceForm(K), fourier_rho(0.8, {2: 0.08}, {3: 0.02}, 64)),
                   SpeedLaw.CONSTRAINED_ICF, config)
            for K in (-1, 1)
        }

    def test_converges_without_violations(self):
        for K, trace in self.traces.items():
            with self.subTest(K=K):
                self.assertEqual(trace.status, FlowStatus.CONVERGED)
                self.assertEqual(trace.violations, [])

    def test_limit_is_circle_of_initial_length(self):
        for K, trace in self.traces.items():
            with self.subTest(K=K):
                L0 = trace.reports[0].L
                rho_inf = self.limit_radius[K](L0 / (2 * math.pi))
                self.assertAlmostEqual(trace.limit_radius(), rho_inf, places=12)
                self.assertLess(trace.limit_error(), 1e-4)
                self.assertAlmostEqual(float(trace.final.rho.mean()), rho_inf, delta=1e-4)
                self.assertAlmostEqual(trace.final.length(), L0, delta=1e-5 * L0)

    def test_bounds_hold(self):
        for K, trace in self.traces.items():
            with self.subTest(K=K):
                first, last = trace.reports[0], trace.reports[-1]
                self.assertLessEqual(last.rho_max, first.rho_max + 1e-8)
                self.assertGreaterEqual(last.rho_min, first.rho_min - 1e-8)
                self.assertLess(last.deficit, first.deficit)

    def test_hemisphere_identity_residuals_are_second_order(self):
        c0 = RadialCurve(SpaceForm(1), fourier_rho(0.8, {2: 0.08}, {3: 0.02}, 128))
        trace = run(c0, SpeedLaw.CONSTRAINED_ICF, FlowConfig(t_end=0.5))
        self.assertEqual(trace.status, FlowStatus.TIME_LIMIT)
        self.assertEqual(trace.violations, [])
        first = trace.diagnostics[0]
        self.assertLess(first["dA_residual"], 0.1 * first["dt"])


class DecayRateTests(SimpleTestCase):
    def fit(self, K, m, t_end=20.0):
        c0 = RadialCurve(SpaceForm(K), fourier_rho(1.0, {m: 1e-3}, {}, 64))
        config = FlowConfig(t_end=t_end, eps_stationary=1e-11, report_stride=10)
        return decay_rate(run(c0, SpeedLaw.CONSTRAINED_ICF, config), m)

    def test_planar_mode_two(self):
        fit = self.fit(0, 2)
        self.assertAlmostEqual(fit.predicted_rate, 4.0, delta=1e-5)
        self.assertLess(fit.relative_error, 0.1)
        self.assertGreaterEqual(fit.samples, 20)

    def test_hyperbolic_mode_two(self):
        fit = self.fit(-1, 2)
        self.assertAlmostEqual(fit.predicted_rate, 2.59222, delta=1e-3)
        self.assertLess(fit.relative_error, 0.1)

    def test_rates_scale_with_mode_squared(self):
        ratio = self.fit(0, 3).measured_rate / self.fit(0, 2).measured_rate
        self.assertAlmostEqual(ratio, 9 / 4, delta=0.1 * 9 / 4)

    def test_other_laws_rejected(self):
        trace = run(circle(0, 1.0, 64), SpeedLaw.CLASSICAL_ICF, FlowConfig(t_end=0.01))
        with self.assertRaises(FitWindowError):
            decay_rate(trace, 2)


class RescalingTests(SimpleTestCase):
    def test_planar_rescaling_equivalence(self):
        c0 = RadialCurve(SpaceForm(0), fourier_rho(1.0, {2: 0.05}, {}, 64))
        # dt_max below the stable step keeps both time grids identical
        config = FlowConfig(t_end=0.5, dt_max=5e-4, report_stride=100)
        classical = run(c0, SpeedLaw.CLASSICAL_ICF, config)
        constrained = run(c0, SpeedLaw.CONSTRAINED_ICF, config)
        rescaled = rescaled_classical(classical)
        self.assertEqual([t for t, _ in rescaled], [t for t, _ in constrained.snapshots])
        np.testing.assert_allclose(rescaled[-1][1].rho, constrained.final.rho, atol=1e-8)

    def test_only_for_planar_classical_flow(self):
        trace = run(circle(-1, 0.5, 32), SpeedLaw.CONSTRAINED_ICF)
        with self.assertRaises(DomainError):
            rescaled_classical(trace)


class RefineTests(SimpleTestCase):
    def test_refined_curve_interpolates(self):
        c = RadialCurve(SpaceForm(0), fourier_rho(1.0, {2: 0.1}, {3: 0.05}, 32))
        fine = refine(c)
        self.assertEqual(fine.N, 64)
        np.testing.assert_allclose(fine.rho[::2], c.rho, atol=1e-12)
        np.testing.assert_allclose(fine.rho, fourier_rho(1.0, {2: 0.1}, {3: 0.05}, 64), atol=1e-12)
