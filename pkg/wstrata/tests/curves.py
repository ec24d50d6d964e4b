# Copyright (c) 2025, GWS and Contributors
# See license.txt

import os
from functools import lru_cache

import numpy as np

from wstrata.config.loader import load_curve
from wstrata.curve import differential_data
from wstrata.periods_abel import period_matrices, riemann_constant

# genus-8 periods and the pentagonal checks take minutes
EXTENDED = os.environ.get("WSTRATA_EXTENDED") == "1"


@lru_cache(maxsize=None)
def preset(name):
	return load_curve(f"preset:{name}")[0]


@lru_cache(maxsize=None)
def periods(name):
	spec = preset(name)
	return period_matrices(spec, differential_data(spec))


@lru_cache(maxsize=None)
def constant(name):
	spec = preset(name)
	return riemann_constant(spec, periods(name), differential_data(spec), allow_unresolved=True)


def random_tau(g, seed=0):
	rng = np.random.default_rng(seed)
	A = rng.normal(size=(g, g))
	X = rng.normal(size=(g, g))
	return 0.5 * (X + X.T) + 1j * (A @ A.T + np.eye(g))
