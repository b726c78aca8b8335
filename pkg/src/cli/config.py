"""
Pipeline configuration.

One PipelineConfig drives every stage. It loads from a YAML or TOML file
(sectioned or flat keys), then takes ``section.key=value`` overrides from the
command line.
"""

import os
import tomllib
from pathlib import Path
from typing import Any, Dict, Iterable, List, Literal, Mapping, Optional, Union

import yaml
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..community.partition import ALGORITHMS
from ..community.walktrap import DEFAULT_WALK_LENGTH
from ..lexicon.dictionary import DEFAULT_TOPICS


def _default_output_dir() -> Path:
    return Path(os.getenv("NARRATIVE_MINER_OUTPUT_DIR", "output"))


class PathSettings(BaseModel):
    model_config = ConfigDict(extra="forbid")

    corpus: Path
    dictionary: Path
    output_dir: Path = Field(default_factory=_default_output_dir, validate_default=True)

    @field_validator("output_dir")
    @classmethod
    def _writable(cls, value: Path) -> Path:
        value.mkdir(parents=True, exist_ok=True)
        if not os.access(value, os.W_OK):
            raise ValueError(f"output directory is not writable: {value}")
        return value


class LexiconSettings(BaseModel):
    model_config = ConfigDict(extra="forbid")

    min_occurrences: int = Field(default=500, ge=1)
    min_confidence: float = Field(default=0.9, ge=0.0, le=1.0)
    label_mode: Literal["presence", "occurrence"] = "presence"
    on_empty: Literal["error", "empty"] = "error"
    fold_accents: bool = False
    merge_phrases: bool = True


class BackboneSettings(BaseModel):
    model_config = ConfigDict(extra="forbid")

    alpha: float = Field(default=0.05, gt=0.0, lt=1.0)
    mode: Literal["either", "both"] = "either"
    sweep: List[float] = Field(default_factory=lambda: [0.01, 0.05, 0.1, 0.5])

    @field_validator("sweep")
    @classmethod
    def _sweep_range(cls, value: List[float]) -> List[float]:
        for a in value:
            if not 0.0 < a < 1.0:
                raise ValueError(f"sweep alphas must be in (0, 1), got {a}")
        return sorted(set(value))


class CommunitySettings(BaseModel):
    model_config = ConfigDict(extra="forbid")

    algorithms: List[str] = Field(default_factory=lambda: list(ALGORITHMS))
    walk_length: int = Field(default=DEFAULT_WALK_LENGTH, ge=1)

    @field_validator("algorithms")
    @classmethod
    def _known(cls, value: List[str]) -> List[str]:
        if not value:
            raise ValueError("at least one community algorithm is required")
        unknown = [a for a in value if a not in ALGORITHMS]
        if unknown:
            raise ValueError(f"unknown algorithms {unknown}; expected a subset of {list(ALGORITHMS)}")
        return list(dict.fromkeys(value))


class AttributionSettings(BaseModel):
    model_config = ConfigDict(extra="forbid")

    threshold: float = Field(default=0.95, gt=0.5, le=1.0)
    eligible_category: Optional[str] = None
    min_likes: int = Field(default=4, ge=1)
    restrict_polarized: bool = False


class TailfitSettings(BaseModel):
    model_config = ConfigDict(extra="forbid")

    bootstrap: int = Field(default=0, ge=0, description="KS bootstrap replicates per fit; 0 disables")


class SurvivalSettings(BaseModel):
    model_config = ConfigDict(extra="forbid")

    censor_horizon: Optional[float] = Field(default=None, ge=0.0)
    exclude_zero: bool = False
    weighting: Literal["gehan", "peto", "logrank"] = "gehan"
    method: Literal["asymptotic", "permutation"] = "asymptotic"
    n_permutations: int = Field(default=10_000, ge=1)


class PomSettings(BaseModel):
    model_config = ConfigDict(extra="forbid")

    K: Optional[int] = Field(default=None, ge=2, description="Categories; defaults to the topic count")
    log_transform: bool = False
    max_iter: int = Field(default=200, ge=1)
    tol: float = Field(default=1e-8, gt=0.0)


SECTIONS = {
    "paths": PathSettings,
    "lexicon": LexiconSettings,
    "backbone": BackboneSettings,
    "community": CommunitySettings,
    "attribution": AttributionSettings,
    "tailfit": TailfitSettings,
    "survival": SurvivalSettings,
    "pom": PomSettings,
}


class PipelineConfig(BaseModel):
    """Settings of one pipeline run."""
    model_config = ConfigDict(extra="forbid")

    paths: PathSettings
    topics: List[str] = Field(default_factory=lambda: list(DEFAULT_TOPICS))
    seed: int = Field(default=0, ge=0)
    lexicon: LexiconSettings = Field(default_factory=LexiconSettings)
    backbone: BackboneSettings = Field(default_factory=BackboneSettings)
    community: CommunitySettings = Field(default_factory=CommunitySettings)
    attribution: AttributionSettings = Field(default_factory=AttributionSettings)
    tailfit: TailfitSettings = Field(default_factory=TailfitSettings)
    survival: SurvivalSettings = Field(default_factory=SurvivalSettings)
    pom: PomSettings = Field(default_factory=PomSettings)

    @model_validator(mode="after")
    def _check_topics(self) -> "PipelineConfig":
        if len(self.topics) < 2 or len(set(self.topics)) != len(self.topics):
            raise ValueError(f"need at least 2 distinct topics, got {self.topics}")
        if self.pom.K is not None and self.pom.K != len(self.topics):
            raise ValueError(f"pom.K={self.pom.K} does not match {len(self.topics)} topics")
        return self

    @property
    def output_dir(self) -> Path:
        return self.paths.output_dir

    def section(self, name: str) -> Dict[str, Any]:
        """JSON-ready dump of one section, used in cache keys."""
        return getattr(self, name).model_dump(mode="json")


def _flat_key_section(key: str) -> Optional[str]:
    for name, model in SECTIONS.items():
        if key in model.model_fields:
            return name
    return None


def nest_mapping(data: Mapping[str, Any]) -> Dict[str, Any]:
    """
    Accept sectioned or flat keys.

    Flat keys are placed into the section declaring them, so
    ``{"alpha": 0.1}`` and ``{"backbone": {"alpha": 0.1}}`` are the same.
    Dotted keys (``backbone.alpha``) are split.
    """
    nested: Dict[str, Any] = {}
    for key, value in data.items():
        if "." in key:
            head, tail = key.split(".", 1)
            if head not in SECTIONS:
                raise ValueError(f"unknown configuration section '{head}'")
            nested.setdefault(head, {})[tail] = value
            continue
        if key in SECTIONS or key in ("topics", "seed"):
            if isinstance(value, Mapping) and key in SECTIONS:
                nested.setdefault(key, {}).update(value)
            else:
                nested[key] = value
            continue
        section = _flat_key_section(key)
        if section is None:
            raise ValueError(f"unknown configuration key '{key}'")
        nested.setdefault(section, {})[key] = value
    return nested


def read_config_file(path: Union[str, Path]) -> Dict[str, Any]:
    """Parse a YAML (.yaml/.yml) or TOML (.toml) config file."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Config file not found: {path}")
    if path.suffix in (".yaml", ".yml"):
        with open(path, "r", encoding="utf-8") as f:
            data = yaml.safe_load(f) or {}
    elif path.suffix == ".toml":
        with open(path, "rb") as f:
            data = tomllib.load(f)
    else:
        raise ValueError(f"unsupported config format '{path.suffix}'; use .yaml, .yml or .toml")
    if not isinstance(data, Mapping):
        raise ValueError(f"config file must hold a mapping: {path}")
    return nest_mapping(data)


def parse_overrides(pairs: Iterable[str]) -> Dict[str, Any]:
    """
    ``section.key=value`` strings to a nested mapping.

    Values are parsed as YAML scalars or lists, so ``0.1``, ``true`` and
    ``[walktrap, multilevel]`` get their natural types.
    """
    flat: Dict[str, Any] = {}
    for pair in pairs:
        if "=" not in pair:
            raise ValueError(f"override must look like key=value, got '{pair}'")
        key, raw = pair.split("=", 1)
        flat[key.strip()] = yaml.safe_load(raw)
    return nest_mapping(flat)


def _merge(base: Dict[str, Any], update: Mapping[str, Any]) -> Dict[str, Any]:
    out = dict(base)
    for key, value in update.items():
        if isinstance(value, Mapping) and isinstance(out.get(key), Mapping):
            out[key] = _merge(dict(out[key]), value)
        else:
            out[key] = value
    return out


def load_config(
    path: Optional[Union[str, Path]] = None,
    overrides: Iterable[str] = (),
    **updates: Any,
) -> PipelineConfig:
    """
    Build a PipelineConfig from a file, ``--set`` overrides and keyword
    updates (applied in that order; later wins).

    Args:
        path: Optional YAML/TOML config file
        overrides: ``section.key=value`` strings
        **updates: Flat or dotted keys with non-None values, e.g. from CLI flags

    Returns:
        Validated PipelineConfig
    """
    data: Dict[str, Any] = read_config_file(path) if path is not None else {}
    data = _merge(data, parse_overrides(overrides))
    data = _merge(data, nest_mapping({k: v for k, v in updates.items() if v is not None}))
    return PipelineConfig.model_validate(data)
