"""Scenario configuration: INI sections validated by pydantic models.

A section missing from the file falls back to the same section of
``DEFAULT_CONFIG``; a section present in the file replaces it entirely.
"""

from __future__ import annotations

import configparser
import logging
from dataclasses import dataclass, field as dc_field
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Tuple, Type, TypeVar, Union

from pydantic import BaseModel, ConfigDict, Field, PositiveFloat, ValidationError, field_validator, model_validator

from .errors import ConfigurationError
from .expr import VarRole, parse
from .field import ClosedForm, FieldSource, Sampled
from .noether import SymmetryGenerator
from .oscillator import OscillatorParams, anchor_time
from .space import AxisDomain, GridSpec, Side, SpaceSpec, Spacing, check_alpha
from .variational import LagrangianSpec

logger = logging.getLogger(__name__)

DEFAULT_CONFIG = """\
# Fractional oscillator, alpha = 1/2, Right sector with a = 0.
[space]
dimension = 1
alpha = 0.5
sides = right
endpoints = 0.0
inner_offset = 0.1
truncation = 10.0

[grid]
n_points = 40
spacing = uniform_x
order = 12

[lagrangian]
density = 0.5*g_1^2 - 0.5*phi^2
sector = right

[field]
expression = cos(2*x_1^0.5)

[generator]
kind = scaling
beta = 1e-3

[oscillator]
m = 1.0
xi_d = 1.0
phi0 = 1.0
v0 = 1.0
tolerance = 1e-10
samples = 201
mode = integrated

[point]
x = 1.0

[integrate]
lower = 0.5
upper = 5.0

[output]
directory = out

[verify]
seed = 0
"""

SECTIONS = ("space", "grid", "lagrangian", "field", "generator", "oscillator", "point", "integrate", "output", "verify")


def _split(value: Any) -> Any:
    if isinstance(value, str):
        return [v.strip() for v in value.split(",") if v.strip()]
    return value


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class SpaceSection(_Section):
    dimension: int = Field(1, ge=1)
    alpha: float
    sides: List[Side] = [Side.RIGHT]
    endpoints: List[float] = [0.0]
    inner_offset: List[PositiveFloat] = [1e-3]
    truncation: List[PositiveFloat] = [10.0]

    @field_validator("alpha", mode="before")
    @classmethod
    def _single_alpha(cls, value: Any) -> float:
        if isinstance(value, str) and "," in value:
            raise ValueError("alpha takes a single value; lists are not supported")
        return check_alpha(float(value))

    @field_validator("sides", "endpoints", "inner_offset", "truncation", mode="before")
    @classmethod
    def _lists(cls, value: Any) -> Any:
        value = _split(value)
        return value if isinstance(value, (list, tuple)) else [value]

    def build(self) -> SpaceSpec:
        sides = _per_axis(self.sides, self.dimension, "sides")
        endpoints = _per_axis(self.endpoints, self.dimension, "endpoints")
        offsets = _per_axis(self.inner_offset, self.dimension, "inner_offset")
        truncations = _per_axis(self.truncation, self.dimension, "truncation")
        axes = tuple(
            AxisDomain(side, float(e), float(d), float(t))
            for side, e, d, t in zip(sides, endpoints, offsets, truncations)
        )
        return SpaceSpec(axes, self.alpha)


class GridSection(_Section):
    n_points: List[int] = [40]
    spacing: Spacing = Spacing.UNIFORM_X
    order: int = Field(12, ge=2)

    @field_validator("n_points", mode="before")
    @classmethod
    def _lists(cls, value: Any) -> Any:
        return _split(value)

    def build(self, dimension: int) -> GridSpec:
        return GridSpec(tuple(_per_axis(self.n_points, dimension, "n_points")), self.spacing, self.order)


class LagrangianSection(_Section):
    density: str
    sector: Optional[Side] = None


class FieldSection(_Section):
    expression: Optional[str] = None
    samples: Optional[str] = None

    @model_validator(mode="after")
    def _exactly_one(self) -> "FieldSection":
        if (self.expression is None) == (self.samples is None):
            raise ValueError("give exactly one of 'expression' or 'samples'")
        return self


class GeneratorSection(BaseModel):
    """``kind`` plus, for custom generators, ``f_<σ>`` and ``c_<σ>`` keys."""

    model_config = ConfigDict(extra="allow", frozen=True)

    kind: Literal["translation", "rotation", "scaling", "field_shift", "custom"] = "translation"
    beta: List[float] = []

    @field_validator("beta", mode="before")
    @classmethod
    def _lists(cls, value: Any) -> Any:
        return _split(value)

    def custom_texts(self, dimension: int) -> Tuple[List[List[str]], List[str]]:
        extra = dict(self.model_extra or {})
        unknown = [k for k in extra if not (k.startswith("f_") or k.startswith("c_"))]
        if unknown:
            raise ConfigurationError(f"[generator] unknown keys: {', '.join(sorted(unknown))}")
        count = len([k for k in extra if k.startswith("f_")])
        if count == 0:
            raise ConfigurationError("[generator] custom kind needs f_1 (and optionally c_1)")
        f_texts, c_texts = [], []
        for sigma in range(1, count + 1):
            if f"f_{sigma}" not in extra:
                raise ConfigurationError(f"[generator] f_ keys must be numbered 1..{count}; f_{sigma} is missing")
            parts = [p.strip() for p in str(extra[f"f_{sigma}"]).split(";")]
            if len(parts) != dimension:
                raise ConfigurationError(f"[generator] f_{sigma} needs {dimension} ';'-separated components")
            f_texts.append(parts)
            c_texts.append(str(extra.get(f"c_{sigma}", "0")))
        return f_texts, c_texts

    def build(self, space: SpaceSpec) -> SymmetryGenerator:
        if self.kind == "custom":
            return SymmetryGenerator.custom(space, *self.custom_texts(space.dimension))
        return getattr(SymmetryGenerator, self.kind)(space)


class OscillatorSection(_Section):
    m: float = Field(1.0, gt=0)
    xi_d: float = Field(1.0, gt=0)
    A: Optional[float] = None
    B: Optional[float] = None
    t0: Optional[float] = Field(None, gt=0)
    phi0: float = 1.0
    v0: float = 1.0
    t_end: Optional[float] = Field(None, gt=0)
    tolerance: float = Field(1e-10, gt=0)
    samples: int = Field(201, ge=2)
    mode: Literal["integrated", "analytic"] = "integrated"

    def params(self, alpha: float) -> OscillatorParams:
        return OscillatorParams(self.m, self.xi_d, alpha, self.A, self.B)

    def start(self, alpha: float) -> float:
        return self.t0 if self.t0 is not None else anchor_time(alpha, self.m)

    def end(self, alpha: float) -> float:
        return self.t_end if self.t_end is not None else self.start(alpha) + 10.0


class PointSection(_Section):
    x: List[float]

    @field_validator("x", mode="before")
    @classmethod
    def _lists(cls, value: Any) -> Any:
        return _split(value)


class IntegrateSection(_Section):
    lower: Optional[List[float]] = None
    upper: Optional[List[float]] = None

    @field_validator("lower", "upper", mode="before")
    @classmethod
    def _lists(cls, value: Any) -> Any:
        return _split(value)

    def bounds(self, space: SpaceSpec) -> Optional[List[Tuple[float, float]]]:
        if self.lower is None and self.upper is None:
            return None
        box = space.box()
        lower = _per_axis(self.lower, space.dimension, "lower") if self.lower else [lo for lo, _ in box]
        upper = _per_axis(self.upper, space.dimension, "upper") if self.upper else [hi for _, hi in box]
        return list(zip(lower, upper))


class OutputSection(_Section):
    directory: str = "out"
    trajectory: str = "trajectory.csv"
    energy: str = "energy.csv"
    noether: str = "noether.csv"
    emt: str = "emt.csv"
    amt: str = "amt.csv"
    el: str = "el.csv"
    verify: str = "verify.csv"


class VerifySection(_Section):
    seed: int = Field(0, ge=0)
    suites: List[str] = []

    @field_validator("suites", mode="before")
    @classmethod
    def _lists(cls, value: Any) -> Any:
        return _split(value)


_MODELS: Dict[str, Type[BaseModel]] = {
    "space": SpaceSection,
    "grid": GridSection,
    "lagrangian": LagrangianSection,
    "field": FieldSection,
    "generator": GeneratorSection,
    "oscillator": OscillatorSection,
    "point": PointSection,
    "integrate": IntegrateSection,
    "output": OutputSection,
    "verify": VerifySection,
}

M = TypeVar("M", bound=BaseModel)


def _per_axis(values: List[Any], dimension: int, name: str) -> List[Any]:
    if len(values) == 1:
        return list(values) * dimension
    if len(values) != dimension:
        raise ConfigurationError(f"'{name}' needs 1 or {dimension} values, got {len(values)}")
    return list(values)


def _validate(name: str, model: Type[M], raw: Dict[str, str]) -> M:
    try:
        return model.model_validate(raw)
    except ValidationError as exc:
        first = exc.errors()[0]
        loc = ".".join(str(p) for p in first["loc"]) or "section"
        raise ConfigurationError(f"[{name}] {loc}: {first['msg']}") from None


# ---------------------------------------------------------------------------
# Assembled scenario
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class ScenarioConfig:
    space: SpaceSpec
    grid: GridSpec
    lagrangian: LagrangianSpec
    field: FieldSource
    generator: SymmetryGenerator
    beta: Tuple[float, ...]
    oscillator: OscillatorSection
    point: Tuple[float, ...]
    bounds: Optional[Tuple[Tuple[float, float], ...]]
    output: OutputSection
    verify: VerifySection
    source: Optional[Path] = None
    sections: Dict[str, BaseModel] = dc_field(default_factory=dict, compare=False)

    @property
    def oscillator_params(self) -> OscillatorParams:
        return self.oscillator.params(self.space.alpha)

    @property
    def output_dir(self) -> Path:
        return Path(self.output.directory)

    def output_path(self, name: str) -> Path:
        return self.output_dir / getattr(self.output, name)

    def with_overrides(self, *, out: Optional[str] = None, seed: Optional[int] = None) -> "ScenarioConfig":
        output = self.output if out is None else self.output.model_copy(update={"directory": out})
        verify = self.verify if seed is None else self.verify.model_copy(update={"seed": seed})
        return ScenarioConfig(
            self.space, self.grid, self.lagrangian, self.field, self.generator, self.beta,
            self.oscillator, self.point, self.bounds, output, verify, self.source, self.sections,
        )


def _read_sections(text: str, origin: str) -> Dict[str, Dict[str, str]]:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"), interpolation=None)
    parser.optionxform = str  # keep key case (A, B)
    try:
        parser.read_string(text, source=origin)
    except configparser.Error as exc:
        raise ConfigurationError(f"{origin}: {exc}") from None
    unknown = [s for s in parser.sections() if s not in SECTIONS]
    if unknown:
        raise ConfigurationError(f"{origin}: unknown section(s) {', '.join(unknown)}")
    return {s: dict(parser.items(s)) for s in parser.sections()}


def load_config(path: Optional[Union[str, Path]] = None) -> ScenarioConfig:
    """Load a scenario file (or the built-in default) and build every object it names."""
    defaults = _read_sections(DEFAULT_CONFIG, "<default>")
    if path is None:
        raw, base = defaults, Path.cwd()
        source = None
    else:
        source = Path(path)
        if not source.is_file():
            raise ConfigurationError(f"config file not found: {source}")
        raw = {**defaults, **_read_sections(source.read_text(encoding="utf-8"), str(source))}
        base = source.parent
    sections = {name: _validate(name, model, raw.get(name, {})) for name, model in _MODELS.items()}
    logger.debug("config sections loaded from %s", source or "<default>")

    space_cfg: SpaceSection = sections["space"]  # type: ignore[assignment]
    space = space_cfg.build()
    grid = sections["grid"].build(space.dimension)  # type: ignore[attr-defined]

    lag_cfg: LagrangianSection = sections["lagrangian"]  # type: ignore[assignment]
    sector = lag_cfg.sector or space.sector
    if sector is None:
        raise ConfigurationError("[lagrangian] sector is required when the axes are in different sectors")
    lagrangian = LagrangianSpec.parse(lag_cfg.density, sector, space.dimension)

    field_cfg: FieldSection = sections["field"]  # type: ignore[assignment]
    if field_cfg.expression is not None:
        coords = space.var_space.with_roles(VarRole.COORDINATE)
        field_source: FieldSource = ClosedForm(parse(field_cfg.expression, coords), space.dimension)
    else:
        samples = Path(field_cfg.samples)  # type: ignore[arg-type]
        field_source = Sampled.from_csv(samples if samples.is_absolute() else base / samples, space.dimension)

    gen_cfg: GeneratorSection = sections["generator"]  # type: ignore[assignment]
    generator = gen_cfg.build(space)
    beta = tuple(gen_cfg.beta) if gen_cfg.beta else (1e-3,) * generator.M
    if len(beta) == 1 and generator.M > 1:
        beta = beta * generator.M
    if len(beta) != generator.M:
        raise ConfigurationError(f"[generator] beta needs 1 or {generator.M} values, got {len(beta)}")

    point_cfg: PointSection = sections["point"]  # type: ignore[assignment]
    point = tuple(_per_axis(point_cfg.x, space.dimension, "x"))
    bounds = sections["integrate"].bounds(space)  # type: ignore[attr-defined]

    return ScenarioConfig(
        space=space,
        grid=grid,
        lagrangian=lagrangian,
        field=field_source,
        generator=generator,
        beta=beta,
        oscillator=sections["oscillator"],  # type: ignore[arg-type]
        point=point,
        bounds=None if bounds is None else tuple(bounds),
        output=sections["output"],  # type: ignore[arg-type]
        verify=sections["verify"],  # type: ignore[arg-type]
        source=source,
        sections=sections,
    )
