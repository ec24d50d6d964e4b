# Copyright (c) 2025, GWS and Contributors
# See license.txt

import os
import tempfile
import unittest

import numpy as np

from wstrata.exceptions import ConfigError, ShapeMismatch
from wstrata.services.managers.periods import PeriodCacheManager
from wstrata.tests.curves import periods, preset


class TestPeriodCache(unittest.TestCase):
	def setUp(self):
		self.tmp = tempfile.TemporaryDirectory()
		self.manager = PeriodCacheManager(self.tmp.name)

	def tearDown(self):
		self.tmp.cleanup()

	def test_round_trip(self):
		spec = preset("genus2")
		data = periods("genus2")
		path = self.manager.save(data)
		self.assertEqual(path, os.path.join(self.tmp.name, "genus2.periods"))

		loaded = self.manager.load(path, spec=spec)
		np.testing.assert_array_equal(loaded.omega1, data.omega1)
		np.testing.assert_array_equal(loaded.omega2, data.omega2)
		np.testing.assert_array_equal(loaded.homology.transform, data.homology.transform)
		self.assertEqual(loaded.curve_id, "genus2")

		bare = self.manager.load(path, genus=2)
		self.assertIsNone(bare.homology)

	def test_genus_mismatch(self):
		path = self.manager.save(periods("genus2"))
		with self.assertRaises(ShapeMismatch):
			self.manager.load(path, spec=preset("trigonal"))
		with self.assertRaises(ShapeMismatch):
			self.manager.load(path, genus=3)

	def test_truncated_file(self):
		path = self.manager.save(periods("genus2"))
		with open(path) as f:
			lines = f.read().splitlines()
		start = lines.index("[omega1]")
		with open(path, "w") as f:
			f.write("\n".join(lines[:start + 1] + lines[start + 2:]) + "\n")
		with self.assertRaises(ShapeMismatch):
			self.manager.load(path, genus=2)

	def test_bad_header(self):
		path = os.path.join(self.tmp.name, "broken.periods")
		with open(path, "w") as f:
			f.write("curve = x\n[omega1]\n1 0\n")
		with self.assertRaises(ConfigError):
			self.manager.load(path)
