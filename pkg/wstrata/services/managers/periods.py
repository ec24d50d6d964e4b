# wstrata/services/managers/periods.py

import logging
import os
from typing import Dict, List, Optional, Tuple

import numpy as np

from wstrata.curve import CyclicCurveSpec, sheet_model
from wstrata.exceptions import ConfigError, ShapeMismatch
from wstrata.hooks import period_cache_dir, period_cache_suffix
from wstrata.periods_abel import HomologyBasis, PeriodData, harvest_cycles, intersection_matrix
from wstrata.utils import ensure_dir

logger = logging.getLogger(__name__)

BLOCKS = ("omega1", "omega2", "homology")


class PeriodCacheManager:
    """
    Text cache of half-period matrices so genus-8 periods are computed once.

    Layout: `key = value` header lines, then `[omega1]`, `[omega2]` blocks
    of row-major `re im` pairs at 17 significant digits and an integer
    `[homology]` block with the symplectic transform.
    """

    def __init__(self, cache_dir: Optional[str] = None):
        self.cache_dir = cache_dir or period_cache_dir

    def path_for(self, curve_id: str) -> str:
        return os.path.join(ensure_dir(self.cache_dir), f"{curve_id}{period_cache_suffix}")

    def _format_complex_rows(self, matrix: np.ndarray) -> List[str]:
        return [" ".join(f"{z.real:.17g} {z.imag:.17g}" for z in row) for row in matrix]

    def _format(self, periods: PeriodData) -> str:
        lines = [
            "# wstrata period cache",
            f"curve = {periods.curve_id}",
            f"genus = {periods.genus}",
            "digits = 17",
            "[omega1]",
            *self._format_complex_rows(periods.omega1),
            "[omega2]",
            *self._format_complex_rows(periods.omega2),
        ]
        if periods.homology is not None:
            lines.append("[homology]")
            lines.extend(" ".join(str(int(v)) for v in row) for row in periods.homology.transform)
        return "\n".join(lines) + "\n"

    def _parse(self, text: str, source: str) -> Tuple[Dict[str, str], Dict[str, List[Tuple[int, str]]]]:
        header: Dict[str, str] = {}
        blocks: Dict[str, List[Tuple[int, str]]] = {}
        current = None
        for number, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if line.startswith("[") and line.endswith("]"):
                current = line[1:-1]
                if current not in BLOCKS:
                    raise ConfigError(f"{source}: unknown block [{current}]", line=number)
                blocks[current] = []
            elif current is None:
                key, sep, value = line.partition("=")
                if not sep:
                    raise ConfigError(f"{source}: expected 'key = value'", line=number)
                header[key.strip()] = value.strip()
            else:
                blocks[current].append((number, line))
        return header, blocks

    def _complex_matrix(self, rows: List[Tuple[int, str]], genus: int, name: str, source: str) -> np.ndarray:
        if len(rows) != genus:
            raise ShapeMismatch(f"{source}: [{name}] has {len(rows)} rows, expected {genus}")
        matrix = np.zeros((genus, genus), dtype=complex)
        for i, (number, line) in enumerate(rows):
            try:
                values = [float(v) for v in line.split()]
            except ValueError as e:
                raise ConfigError(f"{source}: {e}", key=name, line=number) from e
            if len(values) != 2 * genus:
                raise ShapeMismatch(f"{source}: line {number} holds {len(values) // 2} entries, expected {genus}")
            matrix[i] = np.array(values[0::2]) + 1j * np.array(values[1::2])
        return matrix

    def save(self, periods: PeriodData, path: Optional[str] = None) -> str:
        path = path or self.path_for(periods.curve_id)
        directory = os.path.dirname(os.path.abspath(path))
        ensure_dir(directory)
        with open(path, "w", encoding="utf-8") as f:
            f.write(self._format(periods))
        logger.info("cached periods of %s (genus %d) at %s", periods.curve_id, periods.genus, path)
        return path

    def load(self, path: str, spec: Optional[CyclicCurveSpec] = None,
             genus: Optional[int] = None) -> PeriodData:
        """
        Read a cache file; `spec` (or `genus`) pins the expected shape.

        With a spec the harvested cycles are rebuilt so the homology basis
        is complete again.
        """
        with open(path, "r", encoding="utf-8") as f:
            text = f.read()
        header, blocks = self._parse(text, path)
        try:
            stored = int(header["genus"])
        except (KeyError, ValueError) as e:
            raise ConfigError(f"{path}: missing or invalid genus", key="genus") from e
        expected = spec.genus if spec is not None else genus
        if expected is not None and stored != expected:
            raise ShapeMismatch(f"{path} holds genus-{stored} periods, expected genus {expected}")
        if spec is not None and header.get("curve") and header["curve"] != spec.curve_id:
            logger.warning("period cache %s was written for %s, loading for %s", path, header["curve"], spec.curve_id)
        for name in ("omega1", "omega2"):
            if name not in blocks:
                raise ConfigError(f"{path}: missing [{name}] block", key=name)

        omega1 = self._complex_matrix(blocks["omega1"], stored, "omega1", path)
        omega2 = self._complex_matrix(blocks["omega2"], stored, "omega2", path)

        homology = None
        if spec is not None and "homology" in blocks:
            transform = np.array([[int(v) for v in line.split()] for _, line in blocks["homology"]], dtype=np.int64)
            if transform.shape != (2 * stored, 2 * stored):
                raise ShapeMismatch(f"{path}: [homology] has shape {transform.shape}, expected {(2 * stored,) * 2}")
            model = sheet_model(spec)
            cycles = harvest_cycles(model)
            homology = HomologyBasis(cycles=cycles, intersection=intersection_matrix(model, cycles),
                                     transform=transform)

        logger.debug("loaded genus-%d periods from %s", stored, path)
        return PeriodData(omega1=omega1, omega2=omega2, homology=homology,
                          curve_id=header.get("curve", spec.curve_id if spec is not None else ""))
