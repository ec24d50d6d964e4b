# wstrata/config/run.py

from dataclasses import dataclass, field
from typing import Dict, List, Optional

from wstrata.config.settings import DEFAULT_SETTINGS, Settings
from wstrata.exceptions import ConfigError
from wstrata.hooks import default_stages, pipeline_stages

RUN_KEYS = {"stages", "seed", "samples", "report", "periods_cache", "extended"}


@dataclass
class RunConfig:
    """One CLI run: which curve, which stages, where results go, and the numeric settings."""
    spec: str
    stages: List[str] = field(default_factory=lambda: list(default_stages))
    seed: int = 0
    samples: int = 5
    report: Optional[str] = None
    periods_cache: Optional[str] = None
    extended: bool = False
    verbose: bool = False
    settings: Settings = DEFAULT_SETTINGS

    def __post_init__(self):
        unknown = [s for s in self.stages if s not in pipeline_stages]
        if unknown:
            raise ConfigError(f"unknown stages {unknown}; available: {', '.join(pipeline_stages)}", key="stages")
        if self.samples < 1:
            raise ConfigError("samples must be positive", key="samples")

    @classmethod
    def from_args(cls, args, run_table: Optional[Dict] = None) -> "RunConfig":
        """Flags override the [run] table of the curve file, which overrides the defaults."""
        table = dict(run_table or {})
        unknown = set(table) - RUN_KEYS - set(DEFAULT_SETTINGS.as_dict())
        if unknown:
            raise ConfigError(f"unknown [run] keys {sorted(unknown)}", key="run")

        settings = DEFAULT_SETTINGS.updated(**{k: v for k, v in table.items() if k not in RUN_KEYS})
        settings = settings.updated(theta_eps=args.eps)

        stages = args.stages.split(",") if args.stages else table.get("stages", list(default_stages))
        pick = lambda name, default: getattr(args, name) if getattr(args, name) is not None else table.get(name, default)
        return cls(
            spec=args.spec,
            stages=[s.strip() for s in stages if s.strip()],
            seed=pick("seed", 0),
            samples=pick("samples", 5),
            report=pick("report", None),
            periods_cache=pick("periods_cache", None),
            extended=bool(args.extended or table.get("extended", False)),
            verbose=bool(args.verbose),
            settings=settings,
        )
