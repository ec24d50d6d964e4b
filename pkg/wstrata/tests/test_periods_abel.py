# Copyright (c) 2025, GWS and Contributors
# See license.txt

import unittest

import numpy as np
from scipy.special import ellipk

from wstrata.curve import POINT_AT_INFINITY, branch_point, differential_data, random_points, sheet_model
from wstrata.exceptions import BranchClearanceViolated, PeriodError
from wstrata.periods_abel import (
	PathHint,
	PeriodData,
	abel_divisor,
	abel_map,
	adaptive_integrate,
	canonical_class_residual,
	characteristic_of,
	gauss_legendre,
	half_period_distance,
	homology_basis,
	lattice_consistency,
	path_difference,
	shifted_abel_image,
	vanishing_score,
)
from wstrata.periods_abel.riemann_constant import divisor_images, half_period, search_characteristic
from wstrata.tests.curves import constant, periods, preset


def reduce_to_fundamental_domain(tau):
	for _ in range(100):
		tau = tau - round(tau.real)
		if abs(tau) >= 1 - 1e-12:
			return tau
		tau = -1 / tau
	return tau


class TestQuadrature(unittest.TestCase):
	def test_gauss_legendre(self):
		nodes, weights = gauss_legendre(12)
		self.assertAlmostEqual(float(np.sum(weights)), 1.0, places=14)
		self.assertTrue(np.all((nodes > 0) & (nodes < 1)))

	def test_adaptive(self):
		result = adaptive_integrate(lambda s: np.column_stack([np.exp(s), np.cos(3 * s)]))
		np.testing.assert_allclose(result.value, [np.e - 1, np.sin(3) / 3], rtol=1e-10)


class TestHomology(unittest.TestCase):
	def test_canonical_form(self):
		for name in ("genus2", "trigonal"):
			spec = preset(name)
			homology = homology_basis(spec)
			g = spec.genus
			self.assertEqual(len(homology.cycles), 2 * g)
			J = np.block([[np.zeros((g, g)), np.eye(g)], [-np.eye(g), np.zeros((g, g))]])
			np.testing.assert_array_equal(homology.canonical_form(), J)
			self.assertEqual(abs(round(np.linalg.det(homology.transform.astype(float)))), 1)
			self.assertTrue(all(c.closed for c in homology.cycles))


class TestPeriods(unittest.TestCase):
	def test_lemniscatic_tau(self):
		data = periods("lemniscatic")
		tau = reduce_to_fundamental_domain(complex(data.tau.tau[0, 0]))
		self.assertLess(abs(tau - 1j), 1e-8)

		# the period lattice of dx/y on y^2 = x^3 - x is square with side sqrt(2) K(1/2)
		side = np.sqrt(2) * ellipk(0.5)
		vectors = [m * data.lattice[0, 0] + n * data.lattice[0, 1] for m in range(-3, 4) for n in range(-3, 4)]
		shortest = min(abs(v) for v in vectors if abs(v) > 1e-6)
		self.assertLess(abs(shortest - side) / side, 1e-8)

	def test_riemann_bilinear(self):
		for name in ("genus2", "fermat-quintic", "trigonal"):
			data = periods(name)
			self.assertLess(data.tau.asymmetry, 1e-9, name)
			self.assertGreater(float(np.min(np.linalg.eigvalsh(data.tau.Y))), 0, name)

	def test_shapes(self):
		data = periods("genus2")
		self.assertEqual(data.genus, 2)
		self.assertEqual(data.lattice.shape, (2, 4))
		coords = data.lattice_coordinates(data.lattice[:, 1] + 2 * data.lattice[:, 3])
		np.testing.assert_allclose(coords, [0, 1, 0, 2], atol=1e-9)
		with self.assertRaises(PeriodError):
			PeriodData(omega1=np.eye(2), omega2=np.eye(3))

	def test_lattice_stable_under_refinement(self):
		spec = preset("genus2")
		self.assertLess(lattice_consistency(spec, periods("genus2"), differential_data(spec)), 1e-9)


class TestAbel(unittest.TestCase):
	def test_path_independence(self):
		spec = preset("genus2")
		data = periods("genus2")
		model = sheet_model(spec)
		rng = np.random.default_rng(2)
		for P in random_points(spec, rng, 3):
			first = abel_map(spec, data, P)
			second = None
			for offset in (0.6, -0.6, 0.9, -0.9):
				try:
					second = abel_map(spec, data, P, PathHint(offset=offset * model.spread * np.exp(1j * model.theta)))
					break
				except BranchClearanceViolated:
					continue
			self.assertIsNotNone(second)
			coords = path_difference(data, first, second)
			self.assertLess(float(np.max(np.abs(coords - np.rint(coords)))), 1e-8)

	def test_divisor_is_additive(self):
		spec = preset("genus2")
		data = periods("genus2")
		P1, P2 = random_points(spec, np.random.default_rng(4), 2)
		total = abel_divisor(spec, data, [P1, P2], multiplicities=[1, 2])
		expected = abel_map(spec, data, P1).value + 2 * abel_map(spec, data, P2).value
		np.testing.assert_allclose(total.value, expected, rtol=1e-12)
		np.testing.assert_allclose(total.normalized, data.normalize(expected), rtol=1e-10)

	def test_base_point_is_infinity(self):
		data = periods("lemniscatic")
		result = abel_map(preset("lemniscatic"), data, POINT_AT_INFINITY)
		np.testing.assert_array_equal(result.value, np.zeros(1))

	def test_branch_point_is_half_period(self):
		spec = preset("lemniscatic")
		data = periods("lemniscatic")
		origin = int(np.argmin(np.abs(np.asarray(spec.points))))
		self.assertLess(abs(spec.points[origin]), 1e-12)
		result = abel_map(spec, data, branch_point(spec, origin))
		self.assertLess(data.lattice_distance(2 * result.value), 1e-7)
		# one branch point alone is not a lattice point
		self.assertGreater(data.lattice_distance(result.value), 0.25)


class TestRiemannConstant(unittest.TestCase):
	def test_genus_one(self):
		data = periods("lemniscatic")
		xi = constant("lemniscatic").xi
		self.assertLess(data.lattice_distance(xi - half_period(data, [1], [1]), normalized=True), 1e-6)

	def test_vanishing(self):
		for name in ("genus2", "trigonal"):
			spec = preset(name)
			data = periods(name)
			result = constant(name)
			images = divisor_images(spec, data, 10, spec.genus - 1, np.random.default_rng(9))
			self.assertLess(vanishing_score(data, result.xi, images), 1e-6, name)
			self.assertLess(canonical_class_residual(data, result.xi, result.base_image), 1e-6, name)

	def test_characteristic(self):
		data = periods("genus2")
		result = constant("genus2")
		self.assertTrue(result.resolved)
		np.testing.assert_array_equal(result.xi_s, result.xi)
		self.assertEqual(result.delta.parity, -1)
		self.assertEqual(characteristic_of(data, result.xi), result.delta)
		self.assertEqual(search_characteristic(data, result.xi), result.delta)

	def test_shifted_image(self):
		data = periods("genus2")
		result = constant("genus2")
		image = np.array([0.1 + 0.2j, -0.3j])
		np.testing.assert_allclose(shifted_abel_image(data, result, image), image)

	def test_base_divisor(self):
		self.assertEqual(differential_data(preset("trigonal")).d1, 0)

	def test_half_period_gate(self):
		# tau = i I; the lattice in normalised coordinates is Z^2 + i Z^2
		data = PeriodData(omega1=0.5 * np.eye(2), omega2=0.5j * np.eye(2))
		self.assertLess(half_period_distance(data, np.array([1 + 2j, -1j])), 1e-3)
		self.assertLess(half_period_distance(data, np.array([0j, 3 + 0j])), 1e-3)
		self.assertGreater(half_period_distance(data, np.array([0.6 + 0.2j, 0.4j])), 1e-3)
