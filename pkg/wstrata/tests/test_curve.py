# Copyright (c) 2025, GWS and Contributors
# See license.txt

import unittest

import numpy as np

from wstrata.curve import (
	INFINITY,
	CyclicCurveSpec,
	PlaneWeierstrassSpec,
	branch_place,
	branch_point,
	canonical_basis,
	curve_semigroup,
	differential_data,
	evaluate,
	monomial_basis,
	point_on_curve,
	random_points,
	ring_of,
	sheet_model,
	valuation,
	validate_normal_form,
)
from wstrata.exceptions import (
	BranchClearanceViolated,
	CurveError,
	DegreeBoundViolated,
	NearBranchPoint,
	NotCoprime,
	PoleAtPoint,
)
from wstrata.tests.curves import preset


class TestCurveSpec(unittest.TestCase):
	def test_genus(self):
		self.assertEqual(preset("lemniscatic").genus, 1)
		self.assertEqual(preset("genus2").genus, 2)
		self.assertEqual(preset("trigonal").genus, 3)
		self.assertEqual(preset("example-iii").genus, 4)
		self.assertEqual(preset("pentagonal").genus, 8)
		self.assertEqual(preset("example-i").genus, 12)

	def test_invalid_cyclic(self):
		with self.assertRaises(NotCoprime):
			CyclicCurveSpec(r=4, branch=((0, 2), (1, 1), (2, 1)))
		with self.assertRaises(NotCoprime):
			CyclicCurveSpec(r=2, branch=((0, 1), (1, 1)))
		with self.assertRaises(CurveError):
			CyclicCurveSpec(r=3, branch=((0, 1), (0, 1), (1, 1)))

	def test_normal_form(self):
		report = validate_normal_form(preset("example-i"))
		self.assertTrue(report.valid)
		self.assertTrue(report.sheets_resolved)
		self.assertEqual(report.semigroup.generators, (5, 7))
		self.assertEqual(report.degree_bounds, (1, 2, 4, 5, 7))

		self.assertTrue(validate_normal_form(preset("hyperelliptic-plane")).valid)

		with self.assertRaises(NotCoprime):
			validate_normal_form(PlaneWeierstrassSpec(m=4, n=6, coeffs=((), (), (), (0,) * 6 + (1,))))
		with self.assertRaises(DegreeBoundViolated):
			validate_normal_form(PlaneWeierstrassSpec(m=2, n=5, coeffs=((0, 0, 0, 0.5), (0, 0, 0, 0, 0, 1))))

	def test_single_place_at_infinity(self):
		# coprime (m, n): the roots of f(x, .) circle infinity as one m-cycle
		from wstrata.curve.specs import _circle_monodromy, _single_cycle
		spec = preset("example-i")
		for phase in (0.0, 1.0, 2.5):
			permutation = _circle_monodromy(spec, radius_factor=1.5, phase=phase)
			self.assertEqual(sorted(permutation), list(range(5)))
			self.assertTrue(_single_cycle(permutation))
		self.assertFalse(_single_cycle([1, 0, 2]))


class TestValuation(unittest.TestCase):
	def test_pentagonal(self):
		spec = preset("pentagonal")
		ring = ring_of(spec)
		self.assertEqual([g.name for g in ring.generators], ["y", "w"])
		self.assertEqual(valuation(spec, ring.monomial(w=1), INFINITY), -11)
		self.assertEqual(valuation(spec, ring.monomial(x=1), INFINITY), -5)
		self.assertEqual(valuation(spec, ring.monomial(y=1), branch_place(0)), 2)
		self.assertEqual(valuation(spec, ring.monomial(y=1), branch_place(2)), 1)

	def test_evaluation(self):
		spec = preset("pentagonal")
		ring = ring_of(spec)
		b = spec.points
		P = random_points(spec, np.random.default_rng(3), 1)[0]
		self.assertLess(spec.residual(P.x, P.y), 1e-12)

		k2 = (P.x - b[0]) * (P.x - b[1])
		k3 = (P.x - b[2]) * (P.x - b[3]) * (P.x - b[4])
		w = evaluate(spec, ring.monomial(w=1), P)
		self.assertAlmostEqual(abs(w - k2 * k3 / P.y ** 2) / abs(w), 0, places=10)
		self.assertAlmostEqual(abs(w - P.y ** 3 / k2) / abs(w), 0, places=10)
		self.assertEqual(evaluate(spec, ring.monomial(), P), 1)

		Q = branch_point(spec, 0)
		self.assertEqual(evaluate(spec, ring.monomial(y=1), Q), 0)
		with self.assertRaises(PoleAtPoint):
			evaluate(spec, ring.branch_factor((-1, 0, 0, 0, 0)), Q)

	def test_point_on_curve(self):
		spec = preset("lemniscatic")
		P = point_on_curve(spec, 2.0, 0)
		self.assertAlmostEqual(abs(P.y ** 2 - 6), 0, places=12)
		other = point_on_curve(spec, 2.0, 1)
		self.assertAlmostEqual(abs(P.y + other.y), 0, places=12)
		with self.assertRaises(NearBranchPoint):
			point_on_curve(spec, 1.0, 0)


class TestBases(unittest.TestCase):
	def assertBasis(self, elements, labels, weights):
		self.assertEqual([f.label for f in elements], labels)
		self.assertEqual([f.weight for f in elements], weights)

	def test_monomial_bases(self):
		self.assertBasis(monomial_basis(preset("pentagonal"), 14),
						 ["1", "x", "y", "x^2", "w", "xy", "y^2"], [0, 5, 7, 10, 11, 12, 14])
		self.assertBasis(monomial_basis(preset("example-iii"), 8),
						 ["1", "x", "x^2", "y", "w"], [0, 3, 6, 7, 8])
		self.assertEqual([f.weight for f in monomial_basis(preset("hyperelliptic-plane"), 6)], [0, 2, 4, 5, 6])

	def test_weights_follow_semigroup(self):
		expected = {"pentagonal": (5, 7, 11), "example-iii": (3, 7, 8), "genus2": (2, 5), "trigonal": (3, 4)}
		for name, gens in expected.items():
			spec = preset(name)
			H = curve_semigroup(spec)
			self.assertEqual(H.generators, gens, name)
			bound = H.conductor + 3
			self.assertEqual([f.weight for f in monomial_basis(spec, bound)], H.elements(bound), name)

	def test_canonical_pentagonal(self):
		diff = canonical_basis(preset("pentagonal"))
		self.assertBasis(diff.phi_hat, ["y", "w", "xy", "y^2", "xw", "x^2y", "yw", "xy^2"],
						 [7, 11, 12, 14, 16, 17, 18, 19])
		self.assertEqual(diff.d1, 5)
		self.assertEqual(sum(n for _, n in diff.B), 5)
		for orders in diff.form_orders().values():
			self.assertTrue(all(v >= 0 for v in orders))

	def test_canonical_example_iii(self):
		diff = canonical_basis(preset("example-iii"))
		self.assertEqual([f.label for f in diff.phi_hat], ["y", "w", "xy", "xw"])
		self.assertEqual(diff.genus, 4)

	def test_canonical_hyperelliptic(self):
		diff = canonical_basis(preset("genus2"))
		self.assertEqual(diff.h.label, "y")
		self.assertEqual([f.label for f in diff.phi_hat], ["1", "x"])
		self.assertEqual(diff.d1, 0)
		self.assertEqual(diff.B, [])
		self.assertEqual([f.weight for f in diff.extended(4)], [0, 2, 4, 5])

	def test_canonical_trigonal(self):
		diff = canonical_basis(preset("trigonal"))
		self.assertEqual(diff.h.label, "y^2")
		self.assertBasis(diff.phi_hat, ["1", "x", "y"], [0, 3, 4])
		self.assertEqual(diff.d1, 0)

	def test_canonical_plane(self):
		diff = differential_data(preset("hyperelliptic-plane"))
		self.assertEqual([f.weight for f in diff.phi_hat], [0, 2])
		self.assertEqual(diff.d1, 0)
		self.assertEqual(diff.form_orders()[INFINITY], [2, 0])


def circle(centre, radius, vertices=24):
	angles = 0.1 + 2 * np.pi * np.arange(vertices + 1) / vertices
	return list(centre + radius * np.exp(1j * angles))


class TestMonodromy(unittest.TestCase):
	def loop_around(self, spec, index):
		b = spec.points
		others = np.delete(np.abs(b - b[index]), index)
		return circle(complex(b[index]), 0.3 * float(np.min(others)))

	def test_square_root(self):
		spec = preset("lemniscatic")
		model = sheet_model(spec)
		for index in range(len(spec.points)):
			self.assertEqual(model.monodromy(self.loop_around(spec, index)), [1, 0])

	def test_shift_by_multiplicity(self):
		spec = preset("pentagonal")
		model = sheet_model(spec)
		for index, m in enumerate(spec.mults):
			loop = self.loop_around(spec, index)
			permutation = model.monodromy(loop)
			self.assertIn(permutation, ([(l + m) % 5 for l in range(5)], [(l - m) % 5 for l in range(5)]))
			self.assertEqual(permutation, [model.continue_numerically(loop, l) for l in range(5)])

	def test_contractible_loop(self):
		spec = preset("trigonal")
		model = sheet_model(spec)
		far = complex(np.max(spec.points.real)) + 10.0
		self.assertEqual(model.monodromy(circle(far, 1.0)), [0, 1, 2])

	def test_clearance(self):
		spec = preset("lemniscatic")
		with self.assertRaises(BranchClearanceViolated):
			sheet_model(spec).monodromy(circle(complex(spec.points[0]), 1e-9))
