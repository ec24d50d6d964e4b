# Copyright (c) 2025, GWS and Contributors
# See license.txt

import unittest

import numpy as np

from wstrata.curve import differential_data, point_on_curve, random_points, ring_of
from wstrata.exceptions import DegenerateDivisor
from wstrata.fs_mu import fs_det, fs_matrix, mu, mu_coefficients
from wstrata.tests.curves import preset


class TestFrobeniusStickelberger(unittest.TestCase):
	def setUp(self):
		self.spec = preset("genus2")
		self.rng = np.random.default_rng(11)

	def test_small_determinants(self):
		P1, P2 = random_points(self.spec, self.rng, 2)
		self.assertAlmostEqual(abs(fs_det(self.spec, [P1]) - 1), 0, places=14)
		self.assertAlmostEqual(abs(fs_det(self.spec, [P1, P2]) - (P2.x - P1.x)), 0, places=12)
		self.assertEqual(fs_det(self.spec, [P1, P1]), 0)
		self.assertTrue(fs_matrix(self.spec, [P1, P2, P1]).has_repeated_rows())

	def test_mu_is_mumford_u(self):
		P1, P2, P = random_points(self.spec, self.rng, 3)
		value = mu(self.spec, 2, P, [P1, P2])
		expected = (P.x - P1.x) * (P.x - P2.x)
		self.assertLess(abs(value - expected) / abs(expected), 1e-10)
		self.assertEqual(mu(self.spec, 2, P1, [P1, P2]), 0)

	def test_coefficients_are_symmetric_functions(self):
		P1, P2 = random_points(self.spec, self.rng, 2)
		expansion = mu_coefficients(self.spec, 2, [P1, P2])
		self.assertLess(abs(expansion.coefficients[1] - (P1.x + P2.x)), 1e-10 * (1 + abs(P1.x + P2.x)))
		self.assertLess(abs(expansion.coefficients[0] - P1.x * P2.x), 1e-10 * (1 + abs(P1.x * P2.x)))
		self.assertEqual(expansion.coefficients[2], 1)

		swapped = mu_coefficients(self.spec, 2, [P2, P1])
		np.testing.assert_allclose(swapped.coefficients, expansion.coefficients, rtol=1e-10)

	def test_first_coefficient(self):
		spec = preset("example-iii")
		diff = differential_data(spec)
		P1 = random_points(spec, self.rng, 1)[0]
		phi0, phi1 = ring_of(spec).evaluate_many(diff.phi_hat[:2], P1)
		expansion = mu_coefficients(spec, 1, [P1])
		self.assertLess(abs(expansion.coefficients[0] - phi1 / phi0), 1e-10 * abs(phi1 / phi0))

	def test_expansion_identity(self):
		spec = preset("example-iii")
		points = random_points(spec, self.rng, 2)
		expansion = mu_coefficients(spec, 2, points)
		for P in random_points(spec, self.rng, 5):
			lhs = mu(spec, 2, P, points)
			self.assertLess(abs(lhs - expansion.evaluate(spec, P)) / max(abs(lhs), 1.0), 1e-9)

	def test_permutation_invariance(self):
		spec = preset("trigonal")
		points = random_points(spec, self.rng, 3)
		P = random_points(spec, self.rng, 1)[0]
		value = mu(spec, 3, P, points)
		self.assertLess(abs(mu(spec, 3, P, points[::-1]) - value), 1e-10 * max(abs(value), 1.0))

	def test_zero_divisor_contains_points(self):
		spec = preset("example-iii")
		points = random_points(spec, self.rng, spec.genus - 1)
		for P in points:
			self.assertEqual(mu(spec, spec.genus - 1, P, points), 0)

	def test_special_divisor(self):
		# same x on two sheets: the rows (1, x) coincide
		P1 = point_on_curve(self.spec, 0.2 + 0.3j, 0)
		P2 = point_on_curve(self.spec, 0.2 + 0.3j, 1)
		with self.assertRaises(DegenerateDivisor):
			mu_coefficients(self.spec, 2, [P1, P2])
		with self.assertRaises(DegenerateDivisor):
			mu(self.spec, 2, P1, [P1, P2])
