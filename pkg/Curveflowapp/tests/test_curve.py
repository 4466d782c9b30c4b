import math
import tempfile
from pathlib import Path

import numpy as np
from django.test import SimpleTestCase
from scipy.special import ellipe

from Curveflowapp.curve import RadialCurve, periodic_d1
from Curveflowapp.exceptions import DomainError, PoleHit
from Curveflowapp.generators import ellipse_rho, fourier_rho, theta_grid
from Curveflowapp.spaceform import SpaceForm


class PeriodicDerivativeTests(SimpleTestCase):
    def test_cosine(self):
        N = 256
        h = 2 * math.pi / N
        theta = theta_grid(N)
        err4 = np.max(np.abs(periodic_d1(np.cos(theta), h, 4) + np.sin(theta)))
        err2 = np.max(np.abs(periodic_d1(np.cos(theta), h, 2) + np.sin(theta)))
        self.assertLess(err4, 1.3e-8)
        self.assertLess(err2, 1.1e-4)

    def test_second_order_refinement(self):
        errors = []
        for N in (64, 128):
            theta = theta_grid(N)
            c = RadialCurve(SpaceForm(0), 2 + np.cos(3 * theta), 2)
            rho_t1, rho_t2 = c.derivatives()
            errors.append((np.max(np.abs(rho_t1 + 3 * np.sin(3 * theta))),
                           np.max(np.abs(rho_t2 + 9 * np.cos(3 * theta)))))
        for coarse, fine in zip(*errors):
            self.assertAlmostEqual(coarse / fine, 4.0, delta=0.4)

    def test_constants_are_flat(self):
        for order in (2, 4):
            c = RadialCurve(SpaceForm(0), np.full(32, 0.7), order)
            rho_t1, rho_t2 = c.derivatives()
            self.assertTrue(np.all(rho_t1 == 0.0))
            self.assertTrue(np.all(rho_t2 == 0.0))


class ConstructionTests(SimpleTestCase):
    def test_grid_size(self):
        with self.assertRaises(DomainError):
            RadialCurve(SpaceForm(0), np.ones(15))
        with self.assertRaises(DomainError):
            RadialCurve(SpaceForm(0), np.ones(8))

    def test_positive_radius(self):
        rho = np.ones(16)
        rho[3] = 0.0
        with self.assertRaises(DomainError):
            RadialCurve(SpaceForm(0), rho)

    def test_pole_hit_names_limit(self):
        with self.assertRaisesMessage(PoleHit, "r_max"):
            RadialCurve(SpaceForm(1), np.full(16, math.pi / 2))

    def test_immutable(self):
        c = RadialCurve(SpaceForm(0), np.ones(16))
        with self.assertRaises(ValueError):
            c.rho[0] = 2.0


class CircleFieldTests(SimpleTestCase):
    def test_geodesic_circles(self):
        for K in (-1, 0, 1):
            sf = SpaceForm(K)
            c = RadialCurve(sf, np.full(64, 0.7))
            f = c.fields()
            phi, phi_prime, _ = sf.warp(0.7)
            np.testing.assert_allclose(f.kappa, phi_prime / phi, rtol=1e-13)
            np.testing.assert_allclose(f.u, phi, rtol=1e-13)
            self.assertAlmostEqual(c.length(), sf.circle_length(0.7), places=12)
            self.assertAlmostEqual(c.area(), sf.circle_area(0.7), places=12)
            self.assertLess(abs(c.gauss_bonnet_residual()), 1e-12)
            self.assertEqual(c.gradient_monitor(), 0.0)


class EllipseTests(SimpleTestCase):
    def setUp(self):
        self.c = RadialCurve(SpaceForm(0), ellipse_rho(2.0, 1.0, 1024))

    def test_length_and_area(self):
        self.assertAlmostEqual(self.c.length(), 8 * ellipe(0.75), delta=1e-5)
        self.assertAlmostEqual(self.c.area(), 2 * math.pi, delta=1e-10)

    def test_curvature_at_vertices(self):
        kappa = self.c.fields().kappa
        # a / b^2 on the minor axis, b / a^2 on the major axis
        self.assertAlmostEqual(kappa[256], 2.0, delta=1e-5)
        self.assertAlmostEqual(kappa[0], 0.25, delta=1e-5)

    def test_gauss_bonnet(self):
        self.assertLess(abs(self.c.gauss_bonnet_residual()), 1e-5)


class ConvexityTests(SimpleTestCase):
    def test_circle_is_convex(self):
        check = RadialCurve(SpaceForm(0), np.ones(32)).is_strictly_convex()
        self.assertTrue(check.convex)
        self.assertAlmostEqual(check.margin, 1.0)

    def test_star_is_not(self):
        c = RadialCurve(SpaceForm(0), fourier_rho(1.0, {3: 0.5}, {}, 128))
        check = c.is_strictly_convex()
        self.assertFalse(check.convex)
        self.assertLess(check.margin, 0)


class FourierAmplitudeTests(SimpleTestCase):
    def test_mode_amplitude(self):
        c = RadialCurve(SpaceForm(0), fourier_rho(1.0, {2: 0.03}, {2: 0.04}, 64))
        self.assertAlmostEqual(c.fourier_amplitude(2), 0.05, places=14)
        self.assertAlmostEqual(c.fourier_amplitude(3), 0.0, places=14)


class CsvTests(SimpleTestCase):
    def setUp(self):
        tmp = tempfile.TemporaryDirectory()
        self.addCleanup(tmp.cleanup)
        self.dir = Path(tmp.name)

    def test_written_curve_reads_back_exactly(self):
        c = RadialCurve(SpaceForm(-1), fourier_rho(0.9, {2: 0.05}, {3: 0.01}, 32))
        path = c.to_csv(self.dir / "curve.csv")
        lines = path.read_text().splitlines()
        self.assertEqual(lines[0], "# K=-1 N=32")
        self.assertEqual(lines[1], "theta,rho")
        back = RadialCurve.from_csv(path)
        self.assertEqual(back.sf.K, -1)
        np.testing.assert_array_equal(back.rho, c.rho)

    def test_header_required(self):
        path = self.dir / "bad.csv"
        path.write_text("theta,rho\n0,1\n")
        with self.assertRaises(DomainError):
            RadialCurve.from_csv(path)

    def test_row_count_checked(self):
        path = self.dir / "short.csv"
        path.write_text("# K=0 N=16\ntheta,rho\n0,1\n")
        with self.assertRaisesMessage(DomainError, "N=16"):
            RadialCurve.from_csv(path)
