# Copyright (c) 2025, GWS and Contributors
# See license.txt

import unittest

import numpy as np
from scipy.special import gamma

from wstrata.config import DEFAULT_SETTINGS
from wstrata.exceptions import ThetaError, TruncationBudgetExceeded
from wstrata.riemann_theta import (
	Characteristic,
	RiemannMatrix,
	characteristics,
	half_period_bits,
	half_period_moduli,
	parity_counts,
	theta,
	theta_char,
	theta_grad,
	theta_hessian,
	theta_modulus,
)
from wstrata.tests.curves import random_tau


def relative(a, b):
	return abs(a - b) / max(abs(a), abs(b), 1e-300)


class TestTheta(unittest.TestCase):
	def setUp(self):
		self.rng = np.random.default_rng(5)
		self.tau = random_tau(2, seed=1)

	def random_z(self, g=2):
		return self.rng.normal(size=g) + 0.5j * self.rng.normal(size=g)

	def test_square_lattice_value(self):
		# theta_3(0, e^{-pi}) = pi^{1/4} / Gamma(3/4)
		value = theta([0], [[1j]])
		self.assertLess(abs(value - np.pi ** 0.25 / gamma(0.75)), 1e-10)

	def test_periodicity_and_evenness(self):
		for _ in range(5):
			z = self.random_z()
			value = theta(z, self.tau)
			for j in range(2):
				self.assertLess(relative(theta(z + np.eye(2)[j], self.tau), value), 1e-10)
			self.assertLess(relative(theta(-z, self.tau), value), 1e-10)

	def test_quasi_periodicity(self):
		riemann = RiemannMatrix(self.tau)
		for _ in range(10):
			z = self.random_z()
			m = self.rng.integers(-2, 3, size=2)
			n = self.rng.integers(-2, 3, size=2)
			shifted = theta(z + m + riemann.tau @ n, riemann)
			expected = np.exp(-1j * np.pi * (2 * n @ z + n @ riemann.tau @ n)) * theta(z, riemann)
			self.assertLess(relative(shifted, expected), 1e-8)

	def test_characteristics(self):
		self.assertEqual(parity_counts(1), (3, 1))
		self.assertEqual(parity_counts(2), (10, 6))
		self.assertEqual(len(list(characteristics(3))), 64)
		odd = Characteristic((0.5, 0.5), (0.5, 0.5))
		self.assertEqual(odd.parity, 1)
		odd = Characteristic.from_bits((1, 0), (1, 0))
		self.assertEqual(odd.parity, -1)
		self.assertEqual(str(odd), "[10;10]")
		self.assertLess(abs(theta_char(odd, np.zeros(2), self.tau)), 1e-12)
		with self.assertRaises(ThetaError):
			Characteristic((0.25,), (0.0,))

	def test_zero_characteristic(self):
		z = self.random_z()
		self.assertEqual(theta_char(Characteristic.zero(2), z, self.tau), theta(z, self.tau))

	def test_parity(self):
		for _ in range(20):
			bits = self.rng.integers(2, size=4)
			delta = Characteristic.from_bits(bits[:2], bits[2:])
			z = self.random_z()
			self.assertLess(relative(theta_char(delta, -z, self.tau), delta.parity * theta_char(delta, z, self.tau)),
							1e-9)

	def test_gradient(self):
		self.assertLess(np.max(np.abs(theta_grad([0], [[1j]]))), 1e-12)
		odd = Characteristic.from_bits((1,), (1,))
		self.assertGreater(abs(theta_grad([0], [[1j]], delta=odd)[0]), 0.1)

		for _ in range(5):
			z = self.random_z()
			direction = self.rng.normal(size=2)
			h = 1e-5
			fd = (theta(z + h * direction, self.tau) - theta(z - h * direction, self.tau)) / (2 * h)
			self.assertLess(relative(fd, theta_grad(z, self.tau) @ direction), 1e-6)

	def test_hessian(self):
		z = self.random_z()
		h = 1e-5
		H = theta_hessian(z, self.tau)
		np.testing.assert_allclose(H, H.T, rtol=1e-10)
		for j in range(2):
			e = np.eye(2)[j]
			fd = (theta_grad(z + h * e, self.tau) - theta_grad(z - h * e, self.tau)) / (2 * h)
			self.assertLess(np.max(np.abs(fd - H[:, j])) / np.max(np.abs(H)), 1e-6)

	def test_modulus_is_lattice_invariant(self):
		riemann = RiemannMatrix(self.tau)
		z = self.random_z()
		shifted = z + np.array([1, -2]) + riemann.tau @ np.array([2, 1])
		self.assertLess(relative(theta_modulus(z, riemann), theta_modulus(shifted, riemann)), 1e-9)

	def test_half_period_moduli(self):
		riemann = RiemannMatrix(self.tau)
		z = self.random_z()
		grid = half_period_moduli(z, riemann)
		self.assertEqual(grid.shape, (4, 4))
		for row in range(4):
			for col in range(4):
				a, b = np.array(half_period_bits(2, col)), np.array(half_period_bits(2, row))
				expected = theta_modulus(z + a / 2 + riemann.tau @ b / 2, riemann)
				self.assertLess(abs(grid[row, col] - expected), 1e-10 * max(expected, 1.0))

	def test_odd_half_period_is_a_zero(self):
		riemann = RiemannMatrix([[1j]])
		grid = half_period_moduli(np.zeros(1), riemann)
		self.assertEqual(np.unravel_index(np.argmin(grid), grid.shape), (1, 1))
		self.assertLess(grid[1, 1], 1e-12)

	def test_truncation_budget(self):
		settings = DEFAULT_SETTINGS.updated(theta_radius_cap=0.5)
		with self.assertRaises(TruncationBudgetExceeded):
			theta([0], [[1j]], settings=settings)

	def test_bad_tau(self):
		with self.assertRaises(ThetaError):
			RiemannMatrix([[1.0, 0], [0, 1j]])
		with self.assertRaises(ThetaError):
			theta(np.zeros(3), self.tau)
