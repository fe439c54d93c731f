"""Experiment configuration: a YAML document with one section per subcommand."""
from __future__ import annotations

from dataclasses import asdict, dataclass, field, fields, replace

import yaml

from . import reshaping as rs
from .benchmark import FUNCTIONS, Prior, cells_from, full_grid
from .methods import MethodSpecError, parse_method_spec

KINDS = ("sample", "bench", "check-bounds", "report")
BENCH_REPLICAS = 1000

DEFAULT_METHODS = [
    "Random",
    "RandomPlusMiddlePoint",
    "LHS",
    "ScrHalton",
    "ScrHammersley",
    "ScrHammersleyPlusMiddlePoint",
    "MetaRctgScrHammersley",
    "Rctg0.4ScrHammersley",
    "Rctg0.7ScrHalton",
    "ORctg0.4ScrHammersley",
    "QORctg0.4ScrHammersley",
    "CauchyRctg0.55ScrHammersley",
]


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SampleSection:
    method: str = "ScrHammersley"
    n: int = 100
    d: int = 2
    target: str = rs.UNIT_CUBE


@dataclass(frozen=True)
class GridSection:
    critical: tuple = (3, 25)
    useless_factors: tuple = (0, 5)
    budgets: tuple = (30, 100, 300, 1000, 3000)
    functions: tuple = FUNCTIONS
    prior: str = "NormalStd"

    def cells(self):
        return cells_from(self.critical, self.useless_factors)


@dataclass(frozen=True)
class ReportSection:
    results: str | None = None
    quantiles: tuple = (0.1, 0.5, 0.9)


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str = "bench"
    seed: int = 0
    replicas: int | None = None  # None: per-subcommand default
    jobs: int = 1
    out: str = "out"
    full_grid: bool = False
    methods: tuple = tuple(DEFAULT_METHODS)
    sample: SampleSection = field(default_factory=SampleSection)
    grid: GridSection = field(default_factory=GridSection)
    report: ReportSection = field(default_factory=ReportSection)

    def to_dict(self) -> dict:
        d = asdict(self)
        for key in ("methods",):
            d[key] = list(d[key])
        for key in ("critical", "useless_factors", "budgets", "functions"):
            d["grid"][key] = list(d["grid"][key])
        d["report"]["quantiles"] = list(d["report"]["quantiles"])
        return d

    def dump(self) -> str:
        return yaml.safe_dump(self.to_dict(), sort_keys=False)

    @classmethod
    def from_dict(cls, data: dict | None) -> "ExperimentConfig":
        data = dict(data or {})
        sections = {"sample": SampleSection, "grid": GridSection, "report": ReportSection}
        kwargs = {}
        known = {f.name for f in fields(cls)}
        for key, value in data.items():
            if key not in known:
                raise ConfigError(f"unknown config key {key!r}")
            if key in sections:
                kwargs[key] = _section(sections[key], key, value)
            elif key == "methods":
                if isinstance(value, str) or not isinstance(value, (list, tuple)):
                    raise ConfigError("methods must be a list of method names")
                kwargs[key] = tuple(str(v) for v in value)
            else:
                kwargs[key] = value
        cfg = cls(**kwargs)
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        try:
            with open(path) as fh:
                data = yaml.safe_load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc.strerror}") from exc
        except yaml.YAMLError as exc:
            raise ConfigError(f"malformed YAML in {path}: {exc}".replace("\n", " ")) from exc
        if data is not None and not isinstance(data, dict):
            raise ConfigError("config must be a mapping")
        return cls.from_dict(data)

    def override(self, **kw) -> "ExperimentConfig":
        kw = {k: v for k, v in kw.items() if v is not None}
        sample_kw = {k: kw.pop(k) for k in ("method", "n", "d", "target") if k in kw}
        report_kw = {k: kw.pop(k) for k in ("results",) if k in kw}
        cfg = replace(self, **kw)
        if sample_kw:
            cfg = replace(cfg, sample=replace(cfg.sample, **sample_kw))
        if report_kw:
            cfg = replace(cfg, report=replace(cfg.report, **report_kw))
        cfg.validate()
        return cfg

    def validate(self):
        if self.kind not in KINDS:
            raise ConfigError(f"kind must be one of {KINDS}, got {self.kind!r}")
        for name in ("seed", "replicas", "jobs"):
            v = getattr(self, name)
            if name == "replicas" and v is None:
                continue
            if isinstance(v, bool) or not isinstance(v, int):
                raise ConfigError(f"{name} must be an integer")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        if self.replicas is not None and self.replicas < 1:
            raise ConfigError("replicas must be >= 1")
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1")
        if not isinstance(self.full_grid, bool):
            raise ConfigError("full_grid must be true or false")
        if not self.methods:
            raise ConfigError("at least one method is required")
        if len(set(self.method_names())) != len(self.methods):
            raise ConfigError("methods must be distinct")
        s = self.sample
        try:
            parse_method_spec(s.method).with_target(s.target)
        except MethodSpecError as exc:
            raise ConfigError(str(exc)) from exc
        except ValueError as exc:
            raise ConfigError(f"sample: {exc}") from exc
        if not (_posint(s.n) and _posint(s.d)):
            raise ConfigError("sample.n and sample.d must be positive integers")
        g = self.grid
        if not all(_posint(c) for c in g.critical):
            raise ConfigError("grid.critical must hold positive integers")
        if not all(isinstance(f, int) and f >= 0 for f in g.useless_factors):
            raise ConfigError("grid.useless_factors must hold non-negative integers")
        if not g.budgets or not all(_posint(b) for b in g.budgets):
            raise ConfigError("grid.budgets must hold positive integers")
        bad = [f for f in g.functions if f not in FUNCTIONS]
        if bad or not g.functions:
            raise ConfigError(f"grid.functions must be drawn from {FUNCTIONS}, got {bad}")
        try:
            Prior.parse(g.prior)
        except ValueError as exc:
            raise ConfigError(f"grid.prior: {exc}") from exc
        if not all(0.0 <= q <= 1.0 for q in self.report.quantiles):
            raise ConfigError("report.quantiles must lie in [0, 1]")

    def effective_grid(self) -> GridSection:
        """The configured grid, or the paper-scale one when ``full_grid`` is set."""
        if not self.full_grid:
            return self.grid
        g = full_grid()
        return replace(self.grid, critical=tuple(g["critical"]),
                       useless_factors=tuple(g["useless_factors"]),
                       budgets=tuple(g["budgets"]), functions=tuple(g["functions"]))

    def bench_replicas(self) -> int:
        if self.replicas is not None:
            return self.replicas
        return full_grid()["replicas"] if self.full_grid else BENCH_REPLICAS

    def method_names(self) -> list[str]:
        try:
            return [parse_method_spec(m).name for m in self.methods]
        except MethodSpecError as exc:
            raise ConfigError(str(exc)) from exc


def _posint(v):
    return isinstance(v, int) and not isinstance(v, bool) and v >= 1


def _section(cls, name, value):
    if value is None:
        return cls()
    if not isinstance(value, dict):
        raise ConfigError(f"section {name!r} must be a mapping")
    known = {f.name for f in fields(cls)}
    unknown = set(value) - known
    if unknown:
        raise ConfigError(f"unknown key(s) in {name!r}: {sorted(unknown)}")
    coerced = {k: tuple(v) if isinstance(v, list) else v for k, v in value.items()}
    if "functions" in coerced:
        lookup = {f.lower(): f for f in FUNCTIONS}
        coerced["functions"] = tuple(lookup.get(str(f).lower(), f) for f in coerced["functions"])
    return cls(**coerced)


__all__ = ["ExperimentConfig", "ConfigError", "DEFAULT_METHODS", "KINDS"]
