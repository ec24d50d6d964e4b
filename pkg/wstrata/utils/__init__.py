import importlib
import logging
import os


def get_attr(path: str):
	"""Resolve a dotted path such as 'wstrata.services.pipeline.stages.basis_stage'."""
	module_name, _, attr = path.rpartition(".")
	if not module_name:
		raise ValueError(f"'{path}' is not a dotted path")
	return getattr(importlib.import_module(module_name), attr)


def ensure_dir(path: str) -> str:
	path = os.path.expanduser(path)
	if not os.path.exists(path):
		os.makedirs(path)
	return path


def setup_logging(verbose: bool = False):
	logging.basicConfig(
		level=logging.DEBUG if verbose else logging.INFO,
		format="%(asctime)s %(levelname)s %(name)s: %(message)s",
	)
