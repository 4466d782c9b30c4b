import math

import numpy as np
from django.test import SimpleTestCase

from Curveflowapp.exceptions import DomainError
from Curveflowapp.generators import CurveKind, CurveSpec, generate, sample_random
from Curveflowapp.spaceform import SpaceForm


class GenerateTests(SimpleTestCase):
    def test_circle(self):
        c = generate(CurveSpec(CurveKind.CIRCLE, r0=0.5), SpaceForm(1), 32)
        np.testing.assert_array_equal(c.rho, 0.5)

    def test_fourier(self):
        spec = CurveSpec(CurveKind.FOURIER, r0=2.0, cos_modes={2: 0.1}, sin_modes={3: 0.05})
        c = generate(spec, SpaceForm(0), 16)
        self.assertAlmostEqual(c.rho[0], 2.2)
        self.assertAlmostEqual(c.rho[4], 2.0 * (1 - 0.1 - 0.05))

    def test_ellipse(self):
        c = generate(CurveSpec(CurveKind.ELLIPSE, a=3.0, b=2.0), SpaceForm(0), 16)
        self.assertAlmostEqual(c.rho[0], 3.0)
        self.assertAlmostEqual(c.rho[4], 2.0)

    def test_ellipse_only_in_plane(self):
        with self.assertRaises(DomainError):
            generate(CurveSpec(CurveKind.ELLIPSE), SpaceForm(-1), 16)

    def test_radius_range(self):
        with self.assertRaisesMessage(DomainError, "r_max"):
            generate(CurveSpec(CurveKind.CIRCLE, r0=2.0), SpaceForm(1), 16)
        with self.assertRaises(DomainError):
            generate(CurveSpec(CurveKind.CIRCLE, r0=0.0), SpaceForm(0), 16)

    def test_describe(self):
        spec = CurveSpec(CurveKind.FOURIER, cos_modes={3: 0.1, 2: 0.2})
        described = spec.describe()
        self.assertEqual(described["kind"], "fourier")
        self.assertEqual(list(described["cos_modes"]), ["2", "3"])


class SamplerTests(SimpleTestCase):
    def test_seeded_draws_repeat(self):
        sf = SpaceForm(-1)
        first, spec = sample_random(sf, 64, seed=42)
        again, _ = sample_random(sf, 64, seed=42)
        other, _ = sample_random(sf, 64, seed=43)
        np.testing.assert_array_equal(first.rho, again.rho)
        self.assertFalse(np.array_equal(first.rho, other.rho))
        self.assertEqual(spec.seed, 42)

    def test_convex_samples(self):
        for seed in range(5):
            c, spec = sample_random(SpaceForm(1), 64, seed, r0=0.7)
            self.assertTrue(c.is_strictly_convex().convex)
            for m, a_m in spec.cos_modes.items():
                self.assertLessEqual(abs(a_m), 0.3 / m ** 3)

    def test_nonconvex_samples(self):
        c, spec = sample_random(SpaceForm(-1), 128, 7, convex=False)
        self.assertFalse(c.is_strictly_convex().convex)
        self.assertNotIn(1, spec.cos_modes)
        self.assertTrue(np.all(c.rho > 0))

    def test_random_kind_uses_seed(self):
        spec = CurveSpec(CurveKind.RANDOM, r0=1.0, seed=5)
        c = generate(spec, SpaceForm(0), 64)
        expected, _ = sample_random(SpaceForm(0), 64, 5)
        np.testing.assert_array_equal(c.rho, expected.rho)
        self.assertTrue(math.isfinite(c.length()))
