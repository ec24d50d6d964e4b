# wstrata/config/loader.py

import logging
import os
import re
import tomllib
from typing import Dict, Optional, Tuple

from wstrata.curve import CyclicCurveSpec, PlaneWeierstrassSpec
from wstrata.curve.functions import CurveSpec
from wstrata.exceptions import ConfigError, WStrataError

logger = logging.getLogger(__name__)

PRESET_DIR = os.path.join(os.path.dirname(__file__), "curves")
PRESET_PREFIX = "preset:"


def preset_names():
    return sorted(name[:-5] for name in os.listdir(PRESET_DIR) if name.endswith(".toml"))


def resolve_path(spec: str) -> str:
    """A file path, or `preset:NAME` for one of the bundled curves."""
    if spec.startswith(PRESET_PREFIX):
        name = spec[len(PRESET_PREFIX):]
        path = os.path.join(PRESET_DIR, f"{name}.toml")
        if not os.path.exists(path):
            raise ConfigError(f"unknown preset '{name}', expected one of {', '.join(preset_names())}")
        return path
    if not os.path.exists(spec):
        raise ConfigError(f"curve file {spec} does not exist")
    return spec


def _line_of(text: str, key: str, where: Optional[Tuple[str, int]] = None) -> Optional[int]:
    """Line of `key`; `where = (table, index)` searches inside the index-th [[table]] entry."""
    start = 0
    if where is not None:
        table, index = where
        headers = list(re.finditer(rf"^\s*\[\[\s*{re.escape(table)}\s*\]\]", text, re.MULTILINE))
        if index < len(headers):
            start = headers[index].end()
    pattern = re.compile(rf"^\s*{re.escape(key)}\s*=", re.MULTILINE)
    match = pattern.search(text, start)
    if match is None:
        return None
    return text.count("\n", 0, match.start()) + 1


def _complex(value, key: str, text: str, where: Optional[Tuple[str, int]] = None) -> complex:
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, list) and len(value) == 2 and all(isinstance(v, (int, float)) for v in value):
        return complex(value[0], value[1])
    raise ConfigError(f"expected a number or a [re, im] pair, got {value!r}", key=key,
                      line=_line_of(text, key, where))


def _require(table: Dict, key: str, text: str, kind=None, where: Optional[Tuple[str, int]] = None):
    if key not in table:
        raise ConfigError("missing required key", key=key, line=_line_of(text, key, where))
    value = table[key]
    if kind is not None and not isinstance(value, kind):
        raise ConfigError(f"expected {kind.__name__}, got {type(value).__name__}", key=key,
                          line=_line_of(text, key, where))
    return value


def _cyclic(curve: Dict, text: str) -> CyclicCurveSpec:
    r = _require(curve, "r", text, int)
    branch = []
    for index, entry in enumerate(_require(curve, "branch", text, list)):
        where = ("curve.branch", index)
        point = _complex(_require(entry, "point", text, where=where), "point", text, where)
        multiplicity = entry.get("multiplicity", 1)
        if not isinstance(multiplicity, int):
            raise ConfigError("multiplicity must be an integer", key="multiplicity",
                              line=_line_of(text, "multiplicity", where))
        branch.append((point, multiplicity))
    b0 = curve.get("b0")
    if b0 is not None:
        try:
            b0 = tuple((int(i), int(n)) for i, n in b0)
        except (TypeError, ValueError):
            raise ConfigError("b0 must list [index, multiplicity] pairs", key="b0", line=_line_of(text, "b0"))
        if any(not 0 <= i < len(branch) for i, _ in b0):
            raise ConfigError("b0 refers to a missing branch point", key="b0", line=_line_of(text, "b0"))
    return CyclicCurveSpec(r=r, branch=tuple(branch), name=curve.get("name", ""), b0=b0)


def _plane(curve: Dict, text: str) -> PlaneWeierstrassSpec:
    m = _require(curve, "m", text, int)
    n = _require(curve, "n", text, int)
    rows = [[] for _ in range(m)]
    for index, entry in enumerate(curve.get("coefficient", [])):
        where = ("curve.coefficient", index)
        i = _require(entry, "i", text, int, where)
        if not 1 <= i <= m:
            raise ConfigError(f"coefficient index i={i} outside 1..{m}", key="i", line=_line_of(text, "i", where))
        rows[i - 1] = [_complex(v, "values", text, where) for v in _require(entry, "values", text, list, where)]
    return PlaneWeierstrassSpec(m=m, n=n, coeffs=tuple(tuple(row) for row in rows), name=curve.get("name", ""))


def parse_curve(text: str, source: str = "<string>") -> Tuple[CurveSpec, Dict]:
    """Curve spec and the optional [run] table from TOML text."""
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        match = re.search(r"line (\d+)", str(e))
        raise ConfigError(f"{source}: {e}", line=int(match.group(1)) if match else None) from e

    curve = data.get("curve")
    if not isinstance(curve, dict):
        raise ConfigError(f"{source}: missing [curve] table", key="curve")
    kind = curve.get("kind", "cyclic")
    try:
        if kind == "cyclic":
            spec = _cyclic(curve, text)
        elif kind == "plane":
            spec = _plane(curve, text)
        else:
            raise ConfigError(f"unknown curve kind '{kind}'", key="kind", line=_line_of(text, "kind"))
    except ConfigError:
        raise
    except WStrataError as e:
        raise ConfigError(f"{source}: {e}", key="curve", line=_line_of(text, "name")) from e

    run = data.get("run", {})
    if not isinstance(run, dict):
        raise ConfigError("[run] must be a table", key="run")
    logger.debug("loaded %s from %s", spec.curve_id, source)
    return spec, run


def load_curve(spec: str) -> Tuple[CurveSpec, Dict]:
    path = resolve_path(spec)
    with open(path, "rb") as f:
        raw = f.read()
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as e:
        raise ConfigError(f"{path}: curve file is not valid UTF-8", line=raw.count(b"\n", 0, e.start) + 1) from e
    return parse_curve(text, path)
