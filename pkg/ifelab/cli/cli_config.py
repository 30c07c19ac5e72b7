"""
Scenario configuration
======================
JSON scenario files validated with pydantic. Layering is
settings defaults < scenario file < command-line flags.
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from config.settings import (
    DEFAULT_SAMPLES,
    DEFAULT_SEED,
    DEFAULT_T_MAX,
    DEFAULT_TOLERANCE,
    DEFAULT_TRIALS,
)
from ifelab.core.schema import HamiltonianDocument, Pair

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1

# Eigen-coefficients may be given as plain reals or [re, im] pairs
Coefficient = Union[float, Pair]


class FamilySource(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: str
    params: Dict[str, Any] = {}


class HamiltonianSource(BaseModel):
    """Exactly one of inline document, file path or family generator"""
    model_config = ConfigDict(extra="forbid")

    inline: Optional[HamiltonianDocument] = None
    file: Optional[str] = None
    family: Optional[FamilySource] = None

    @model_validator(mode="after")
    def exactly_one(self):
        given = [name for name in ("inline", "file", "family") if getattr(self, name) is not None]
        if len(given) != 1:
            raise ValueError(f"hamiltonian needs exactly one of inline/file/family, got {given or 'none'}")
        return self


class Expectation(BaseModel):
    model_config = ConfigDict(extra="forbid")

    isIfe: Optional[bool] = None
    isGife: Optional[bool] = None
    isProperGife: Optional[bool] = None

    def requested(self) -> Dict[str, bool]:
        return {k: v for k, v in self.model_dump().items() if v is not None}


class StateSpec(BaseModel):
    model_config = ConfigDict(extra="forbid", allow_inf_nan=False)

    label: Optional[str] = None
    amplitudes: Optional[List[Pair]] = None
    coefficients: Optional[List[Coefficient]] = None
    # path to a state document, relative to the scenario file
    file: Optional[str] = None
    normalize: bool = False
    expect: Optional[Expectation] = None

    @model_validator(mode="after")
    def one_representation(self):
        given = [name for name in ("amplitudes", "coefficients", "file") if getattr(self, name) is not None]
        if len(given) != 1:
            raise ValueError(f"state needs exactly one of amplitudes/coefficients/file, got {given or 'none'}")
        return self

    def coefficient_values(self) -> List[complex]:
        return [complex(*c) if isinstance(c, list) else complex(c) for c in self.coefficients]


class GridConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", allow_inf_nan=False)

    tMax: float = Field(DEFAULT_T_MAX, gt=0.0)
    samples: int = Field(DEFAULT_SAMPLES, ge=2)


class ScenarioConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", allow_inf_nan=False, populate_by_name=True)

    schema_version: Literal[1] = Field(SCHEMA_VERSION, alias="schema")
    hamiltonian: HamiltonianSource
    # "known": the family's listed states; "search": one draw per maximal GIFE support
    states: Union[Literal["known", "search"], List[StateSpec]] = "known"
    dfsBases: List[List[List[Pair]]] = []
    grid: GridConfig = GridConfig()
    tolerance: float = Field(DEFAULT_TOLERANCE, gt=0.0)
    kMax: Optional[int] = Field(None, ge=1)
    seed: int = DEFAULT_SEED
    trials: int = Field(DEFAULT_TRIALS, ge=1)
    algebraic: Literal["auto", "always", "never"] = "auto"

    @field_validator("states")
    @classmethod
    def non_empty(cls, v):
        if isinstance(v, list) and not v:
            raise ValueError("state list is empty")
        return v

    def echo(self) -> Dict[str, Any]:
        return self.model_dump(mode="json", by_alias=True)


def load_config(path: Union[str, Path]) -> ScenarioConfig:
    """
    Raises:
        OSError: unreadable file.
        json.JSONDecodeError: malformed JSON.
        pydantic.ValidationError: schema violation.
    """
    with open(path, "r", encoding="utf-8") as f:
        raw = json.load(f)
    config = ScenarioConfig.model_validate(raw)
    # relative Hamiltonian and state paths resolve against the scenario file
    base = Path(path).parent
    source = config.hamiltonian
    if source.file is not None and not Path(source.file).is_absolute():
        source.file = str(base / source.file)
    if isinstance(config.states, list):
        for spec in config.states:
            if spec.file is not None and not Path(spec.file).is_absolute():
                spec.file = str(base / spec.file)
    logger.debug(f"[CONFIG] loaded {path}")
    return config


def apply_overrides(config: ScenarioConfig, t_max: Optional[float] = None, samples: Optional[int] = None,
                    tolerance: Optional[float] = None, k_max: Optional[int] = None,
                    seed: Optional[int] = None) -> ScenarioConfig:
    """Flag values win over the file; the merged document is validated again"""
    merged = config.echo()
    grid = merged["grid"]
    for key, value in (("tMax", t_max), ("samples", samples)):
        if value is not None:
            grid[key] = value
    for key, value in (("tolerance", tolerance), ("kMax", k_max), ("seed", seed)):
        if value is not None:
            merged[key] = value
    return ScenarioConfig.model_validate(merged)
