# wstrata/services/pipeline/__init__.py

import logging
import time
from typing import Dict, List, Optional

from wstrata.config.run import RunConfig
from wstrata.curve.functions import CurveSpec
from wstrata.exceptions import StageFailed, WStrataError
from wstrata.hooks import extended_stages, pipeline_stages, stage_requires
from wstrata.utils import get_attr

logger = logging.getLogger(__name__)


class PipeLine:
    """
    Runs the configured stages on one curve.

    A stage is a function of the pipeline; it reads earlier outputs from
    `context`, adds records through `emit` and tables through `table`, and
    returns its own output for later stages.
    """

    def process(self, spec: CurveSpec, config: RunConfig) -> Dict[str, object]:
        self.spec = spec
        self.config = config
        self.settings = config.settings
        self.context: Dict[str, object] = {}
        self.records: List[Dict[str, object]] = []
        self.tables: List[Dict[str, object]] = []
        self.failures: List[Dict[str, str]] = []
        self.logs: List[str] = []

        stages = list(config.stages)
        if config.extended:
            stages += [s for s in extended_stages if s not in stages]
        for name in stages:
            self.require(name)

        return {
            "curve": spec.curve_id,
            "stages": stages,
            "records": self.records,
            "tables": self.tables,
            "failures": self.failures,
            "passed": self.passed,
            "logs": self.logs,
        }

    @property
    def passed(self) -> bool:
        return not self.failures and all(r.get("passed", True) for r in self.records if r.get("gated", True))

    def require(self, name: str):
        """Output of a stage, running it (and what it needs) on first use."""
        if name in self.context:
            output = self.context[name]
            if output is None:
                raise StageFailed(name, "failed earlier in this run")
            return output

        for dependency in stage_requires.get(name, []):
            try:
                self.require(dependency)
            except StageFailed as e:
                return self._fail(name, e)

        started = time.perf_counter()
        self.logs.append(f"stage {name}: start")
        stage = get_attr(pipeline_stages[name])
        try:
            output = stage(self)
        except WStrataError as e:
            return self._fail(name, e)
        except Exception:
            logger.exception("stage %s crashed on %s", name, self.spec.curve_id)
            raise
        self.context[name] = output if output is not None else {}
        self.logs.append(f"stage {name}: done in {time.perf_counter() - started:.2f}s")
        return self.context[name]

    def _fail(self, name: str, error: Exception):
        logger.error("stage %s failed on %s: %s", name, self.spec.curve_id, error)
        self.context[name] = None
        self.failures.append({"stage": name, "error": type(error).__name__, "message": str(error)})
        self.logs.append(f"stage {name}: failed ({type(error).__name__})")
        return None

    def emit(self, stage: str, record: Dict[str, object], passed: Optional[bool] = None, gated: bool = True):
        row = {"stage": stage, "curve": self.spec.curve_id, **record}
        if passed is not None:
            row["passed"] = bool(passed)
            row["gated"] = gated
            if gated and not passed:
                self.logs.append(f"stage {stage}: gate failed ({record.get('check', stage)})")
        self.records.append(row)

    def table(self, title: str, header: List[str], rows: List[List[object]]):
        self.tables.append({"title": title, "header": header, "rows": rows})

    def need(self, name: str):
        output = self.require(name)
        if output is None:
            raise StageFailed(name, "failed earlier in this run")
        return output
