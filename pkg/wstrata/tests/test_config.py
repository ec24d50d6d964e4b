# Copyright (c) 2025, GWS and Contributors
# See license.txt

import argparse
import os
import tempfile
import unittest

from wstrata.config import DEFAULT_SETTINGS
from wstrata.config.loader import load_curve, parse_curve, preset_names
from wstrata.config.run import RunConfig
from wstrata.curve import CyclicCurveSpec, PlaneWeierstrassSpec
from wstrata.exceptions import ConfigError
from wstrata.hooks import default_stages

CYCLIC = """
[curve]
name = "sample"
r = 3

[[curve.branch]]
point = [0.5, -1.0]
multiplicity = 2

[[curve.branch]]
point = 1.5

[[curve.branch]]
point = -2
"""


def flags(**overrides):
	values = dict(spec="preset:genus2", stages=None, seed=None, eps=None, report=None,
				  periods_cache=None, samples=None, extended=False, verbose=False)
	values.update(overrides)
	return argparse.Namespace(**values)


class TestLoader(unittest.TestCase):
	def test_presets(self):
		names = preset_names()
		for name in ("lemniscatic", "genus2", "pentagonal", "example-i", "example-iii"):
			self.assertIn(name, names)
		spec, run = load_curve("preset:pentagonal")
		self.assertIsInstance(spec, CyclicCurveSpec)
		self.assertEqual(spec.mults, (2, 2, 1, 1, 1))
		self.assertEqual(run["samples"], 3)
		spec, _ = load_curve("preset:example-i")
		self.assertIsInstance(spec, PlaneWeierstrassSpec)
		self.assertEqual(spec.coeffs[4][7], 1)

	def test_parse(self):
		spec, run = parse_curve(CYCLIC)
		self.assertEqual(spec.curve_id, "sample")
		self.assertEqual(spec.branch[0], (0.5 - 1j, 2))
		self.assertEqual(spec.mults, (2, 1, 1))
		self.assertEqual(run, {})

	def test_errors_name_line_and_key(self):
		with self.assertRaises(ConfigError) as ctx:
			parse_curve(CYCLIC.replace("r = 3", "r = \"three\""))
		self.assertEqual(ctx.exception.key, "r")
		self.assertEqual(ctx.exception.line, 4)

		with self.assertRaises(ConfigError) as ctx:
			parse_curve(CYCLIC.replace("point = 1.5", "point = [1.5]"))
		self.assertEqual(ctx.exception.key, "point")
		self.assertEqual(ctx.exception.line, 11)

		with self.assertRaises(ConfigError) as ctx:
			parse_curve(CYCLIC.replace("point = -2", "point = [-2]"))
		self.assertEqual((ctx.exception.key, ctx.exception.line), ("point", 14))

		with self.assertRaises(ConfigError) as ctx:
			parse_curve(CYCLIC.replace("point = -2", "point = -2\nmultiplicity = 1.5"))
		self.assertEqual((ctx.exception.key, ctx.exception.line), ("multiplicity", 15))

		with self.assertRaises(ConfigError) as ctx:
			parse_curve("[curve\nr = 2\n")
		self.assertEqual(ctx.exception.line, 1)

		with self.assertRaises(ConfigError):
			parse_curve("[run]\nseed = 1\n")
		with self.assertRaises(ConfigError):
			load_curve("preset:no-such-curve")

	def test_invalid_curve_becomes_config_error(self):
		with self.assertRaises(ConfigError):
			parse_curve(CYCLIC.replace("multiplicity = 2", "multiplicity = 3"))

	def test_bad_encoding(self):
		with tempfile.TemporaryDirectory() as tmp:
			path = os.path.join(tmp, "latin1.toml")
			with open(path, "wb") as f:
				f.write(CYCLIC.replace("sample", "caf\u00e9").encode("latin-1"))
			with self.assertRaises(ConfigError) as ctx:
				load_curve(path)
		self.assertEqual(ctx.exception.line, 3)


class TestRunConfig(unittest.TestCase):
	def test_defaults(self):
		config = RunConfig.from_args(flags())
		self.assertEqual(config.stages, list(default_stages))
		self.assertEqual((config.seed, config.samples), (0, 5))
		self.assertEqual(config.settings, DEFAULT_SETTINGS)

	def test_precedence(self):
		run = {"seed": 4, "samples": 2, "stages": ["semigroup"], "theta_eps": 1e-10}
		config = RunConfig.from_args(flags(seed=9), run)
		self.assertEqual(config.seed, 9)
		self.assertEqual(config.samples, 2)
		self.assertEqual(config.stages, ["semigroup"])
		self.assertEqual(config.settings.theta_eps, 1e-10)

		config = RunConfig.from_args(flags(eps=1e-9, stages="semigroup, basis"), run)
		self.assertEqual(config.settings.theta_eps, 1e-9)
		self.assertEqual(config.stages, ["semigroup", "basis"])

	def test_rejects_unknown(self):
		with self.assertRaises(ConfigError):
			RunConfig.from_args(flags(stages="semigroup,nonsense"))
		with self.assertRaises(ConfigError):
			RunConfig.from_args(flags(), {"colour": "blue"})
		with self.assertRaises(ConfigError):
			RunConfig.from_args(flags(samples=0))
