# Copyright (c) 2025, GWS and Contributors
# See license.txt

import unittest
from unittest import mock

import numpy as np

from wstrata import inversion
from wstrata.curve import differential_data, random_points
from wstrata.exceptions import (
	DegenerateConfiguration,
	PreconditionFailed,
	RiemannConstantError,
	ThetaDenominatorVanishes,
)
from wstrata.inversion import (
	InversionReport,
	burgers_residual,
	inversion_rows,
	is_hyperelliptic_basis,
	jacobi_inversion_check,
	jacobi_inversion_rows,
	jorgenson_check,
	mu_expansion_check,
	mu_g_expansion_check,
	relative_residual,
	stratum_regular,
	stratum_vanishing,
	symmetric_function_check,
)
from wstrata.tests.curves import constant, periods, preset

TOL = 1e-5


def retry(check, attempts=5):
	for _ in range(attempts - 1):
		try:
			return check()
		except (DegenerateConfiguration, ThetaDenominatorVanishes):
			continue
	return check()


class InversionTestCase(unittest.TestCase):
	name = "genus2"

	def setUp(self):
		self.spec = preset(self.name)
		self.periods = periods(self.name)
		self.constant = constant(self.name)
		self.diff = differential_data(self.spec)
		self.rng = np.random.default_rng(21)

	def points(self, count):
		return random_points(self.spec, self.rng, count)


class TestHelpers(unittest.TestCase):
	def test_relative_residual(self):
		self.assertEqual(relative_residual(2.0, 2.0), 0)
		self.assertAlmostEqual(relative_residual(1.0, 2.0), 0.5)
		self.assertAlmostEqual(relative_residual(1e-13, 0.0), 0.1)
		self.assertAlmostEqual(relative_residual(1e-3, 0.0, scale=1.0), 1e-3)

	def test_stratum_regular(self):
		spec = preset("pentagonal")
		self.assertEqual([stratum_regular(spec, k) for k in range(1, 8)],
						 [False, False, True, True, True, True, True])
		self.assertTrue(stratum_regular(preset("genus2"), 1))
		self.assertTrue(all(stratum_regular(preset("trigonal"), k) for k in (1, 2)))

	def test_hyperelliptic_basis(self):
		self.assertTrue(is_hyperelliptic_basis(preset("genus2"), differential_data(preset("genus2"))))
		self.assertFalse(is_hyperelliptic_basis(preset("trigonal"), differential_data(preset("trigonal"))))

	def test_record(self):
		report = InversionReport(check="jacobi", curve_id="c", k=1, i=1, lhs=1 + 2j, rhs=1 + 2j, residual=0.0,
								 checks={"analytic": 1e-3})
		record = report.as_record()
		self.assertEqual(record["lhs"], [1.0, 2.0])
		self.assertIsNone(record["raw"])
		self.assertEqual(report.worst, 1e-3)


class TestGenusTwo(InversionTestCase):
	def test_jacobi_row(self):
		P = self.points(1)
		report = retry(lambda: jacobi_inversion_check(self.spec, self.periods, self.constant, P, 1))
		self.assertLess(report.residual, TOL)
		# mu_{1,0} = phi_1 / phi_0 = x
		self.assertLess(abs(report.lhs - P[0].x), 1e-10 * max(abs(P[0].x), 1.0))
		self.assertTrue(report.gates["stratum_regular"])

	def test_delta_form(self):
		self.assertIsNotNone(self.constant.delta)
		P = self.points(1)
		plain = jacobi_inversion_rows(self.spec, self.periods, self.constant, P)[0]
		shifted = jacobi_inversion_rows(self.spec, self.periods, self.constant, P, delta_form=True)[0]
		self.assertEqual(shifted.check, "jacobi_delta")
		self.assertLess(relative_residual(plain.raw, shifted.raw), 1e-8)

	def test_symmetric_functions(self):
		for report in symmetric_function_check(self.spec, self.points(2)):
			self.assertLess(report.residual, 1e-9)

	def test_jorgenson(self):
		def check():
			a = self.rng.normal(size=2) + 1j * self.rng.normal(size=2)
			b = self.rng.normal(size=2) + 1j * self.rng.normal(size=2)
			return jorgenson_check(self.spec, self.periods, self.constant, self.points(1), a, b)
		self.assertLess(retry(check).residual, TOL)

	def test_mu_g_expansion(self):
		report = retry(lambda: mu_g_expansion_check(self.spec, self.periods, self.constant, self.points(1), seed=3))
		self.assertLess(report.residual, TOL)

	def test_burgers(self):
		P = self.points(1)[0]
		report = retry(lambda: burgers_residual(self.spec, self.periods, self.constant, P))
		self.assertLess(report.worst, TOL)
		self.assertLess(abs(report.raw + 1), TOL)
		self.assertLess(report.residual, TOL)
		same = retry(lambda: burgers_residual(self.spec, self.periods, self.constant, P, 1, 1))
		self.assertEqual(same.checks["relation"], 0)

	def test_burgers_catches_bad_hessian(self):
		noise = np.random.default_rng(4)
		exact = inversion.stratum_point

		def noisy(*args, **kwargs):
			point = exact(*args, **kwargs)
			if point.hessian is not None:
				point.hessian = 7 * noise.normal(size=point.hessian.shape)
			return point

		P = self.points(1)[0]
		with mock.patch("wstrata.inversion.stratum_point", noisy):
			report = retry(lambda: burgers_residual(self.spec, self.periods, self.constant, P))
		self.assertGreater(report.residual, 1e-2)

	def test_rows(self):
		rows = retry(lambda: inversion_rows(self.spec, self.periods, self.constant, self.rng))
		self.assertEqual([r.check for r in rows], ["jacobi", "symmetric", "symmetric"])
		for report in rows:
			self.assertLess(report.worst, TOL, report.check)

	def test_preconditions(self):
		with self.assertRaises(PreconditionFailed):
			jacobi_inversion_rows(self.spec, self.periods, self.constant, self.points(2))
		with self.assertRaises(PreconditionFailed):
			jorgenson_check(self.spec, self.periods, self.constant, self.points(2), [1, 0], [0, 1])
		with self.assertRaises(PreconditionFailed):
			burgers_residual(self.spec, self.periods, self.constant, self.points(1)[0], i=3)


class TestTrigonal(InversionTestCase):
	name = "trigonal"

	def test_vanishing_on_strata(self):
		for k in (1, 2):
			self.assertLess(stratum_vanishing(self.spec, self.periods, self.constant, self.points(k)), 1e-6)

	def test_jacobi_rows(self):
		for k in (1, 2):
			rows = retry(lambda: jacobi_inversion_rows(self.spec, self.periods, self.constant, self.points(k)))
			self.assertEqual([r.i for r in rows], list(range(1, k + 1)))
			for report in rows:
				self.assertLess(report.residual, TOL, (k, report.i))

	def test_mu_expansion(self):
		report = mu_expansion_check(self.spec, self.points(3), self.points(5))
		self.assertLess(report.residual, 1e-9)

	def test_jorgenson(self):
		def check():
			a = self.rng.normal(size=3) + 1j * self.rng.normal(size=3)
			b = self.rng.normal(size=3) + 1j * self.rng.normal(size=3)
			return jorgenson_check(self.spec, self.periods, self.constant, self.points(2), a, b)
		self.assertLess(retry(check).residual, TOL)

	def test_mu_g_expansion(self):
		report = retry(lambda: mu_g_expansion_check(self.spec, self.periods, self.constant, self.points(2), seed=5))
		self.assertLess(report.residual, TOL)

	def test_burgers(self):
		# phi_hat = (1, x, y) here as well
		P = self.points(1)[0]
		report = retry(lambda: burgers_residual(self.spec, self.periods, self.constant, P, 1, 3))
		self.assertLess(report.worst, TOL)


class TestShiftedForms(unittest.TestCase):
	def test_burgers_needs_x_ratio(self):
		spec = preset("example-iii")
		P = random_points(spec, np.random.default_rng(0), 1)[0]
		with self.assertRaises(PreconditionFailed):
			burgers_residual(spec, None, None, P)

	def test_missing_shift(self):
		from wstrata.periods_abel import RiemannConstantData, shifted_abel_image
		data = RiemannConstantData(xi=np.zeros(2), base_image=np.zeros(2), score=0.0)
		with self.assertRaises(RiemannConstantError):
			shifted_abel_image(None, data, np.zeros(2))
