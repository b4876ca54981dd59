import configparser
import json
import os
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from processors.errors import ConfigError
from processors.scatter_core import Number, ParameterName, Quantity, SystemParams

DEFAULT_CONFIG: Dict[str, Any] = {
    "app_config": {
        "name": "wgm-scatter",
        "description": "Nonreciprocal single-photon scattering in two Zeeman-QD WGM resonators",
        "version": "1.0.0",
    },
    "defaults": {
        "resolution": 601,
        "band": [-6.0, 6.0],
        "tau_R": 0.2,
        "tau_T": 0.2,
        "min_prominence": 0.1,
        "match_tolerance": 0.15,
        "dip_depth": 0.05,
        "dip_margin": 0.3,
        "chunk_size": 64,
    },
}


class ConfigManager:
    """Tool-wide defaults stored in utils/config.json"""

    def __init__(self, config_file: Optional[str] = None):
        if config_file is None:
            config_file = os.path.join(os.path.dirname(__file__), "config.json")
        self.config_file = config_file
        self.config = self._load_config()

    def _load_config(self) -> Dict[str, Any]:
        """Load configuration from JSON file, falling back to built-in defaults"""
        config = {section: dict(values) for section, values in DEFAULT_CONFIG.items()}
        try:
            if os.path.exists(self.config_file):
                with open(self.config_file, "r") as f:
                    stored = json.load(f)
                for section, values in stored.items():
                    config.setdefault(section, {}).update(values)
            else:
                print(f"⚠️  {self.config_file} not found, using built-in defaults")
        except Exception as e:
            print(f"⚠️  Error loading config: {e}")
        return config

    def get_app_config(self) -> Dict[str, Any]:
        return self.config.get("app_config", {})

    def get_version(self) -> str:
        return str(self.get_app_config().get("version", "0.0.0"))

    def get_tool_name(self) -> str:
        return str(self.get_app_config().get("name", "wgm-scatter"))

    def get_defaults(self) -> Dict[str, Any]:
        return self.config.get("defaults", {})

    def default(self, key: str) -> Any:
        defaults = self.get_defaults()
        if key not in defaults:
            return DEFAULT_CONFIG["defaults"][key]
        return defaults[key]


# Global config manager instance
config_manager = ConfigManager()


class _Section(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False)


class SweepSection(_Section):
    axis: ParameterName = "delta"
    start: Number = Field(default_factory=lambda: config_manager.default("band")[0])
    stop: Number = Field(default_factory=lambda: config_manager.default("band")[1])
    count: int = Field(default_factory=lambda: config_manager.default("resolution"))
    # Fixed detuning used when no axis scans delta
    delta: Number = 0.0
    axis2: Optional[ParameterName] = None
    start2: Optional[Number] = None
    stop2: Optional[Number] = None
    count2: int = Field(default_factory=lambda: config_manager.default("resolution"))
    quantity: Quantity = "R_f"


class AnalysisSection(_Section):
    input: Optional[str] = None
    min_prominence: float = Field(
        default_factory=lambda: config_manager.default("min_prominence"), gt=0.0
    )
    tolerance: float = Field(default_factory=lambda: config_manager.default("match_tolerance"), gt=0.0)
    tau_R: float = Field(default_factory=lambda: config_manager.default("tau_R"), gt=0.0)
    tau_T: float = Field(default_factory=lambda: config_manager.default("tau_T"), gt=0.0)
    band_start: Number = Field(default_factory=lambda: config_manager.default("band")[0])
    band_stop: Number = Field(default_factory=lambda: config_manager.default("band")[1])
    resolution: int = Field(default_factory=lambda: config_manager.default("resolution"), ge=2)

    @model_validator(mode="after")
    def _band_nonempty(self):
        if not self.band_stop > self.band_start:
            raise ValueError("band_stop must be greater than band_start")
        return self

    @property
    def band(self):
        return (self.band_start, self.band_stop)


class VerifySection(_Section):
    draws: int = Field(default=1000, ge=1)
    seed: int


class WindowSection(_Section):
    parameter: ParameterName
    start: Number
    stop: Number
    count: int = 41


class OutputSection(_Section):
    csv: Optional[str] = None
    svg: Optional[str] = None
    png: Optional[str] = None
    # INI key stays "json"; the attribute name must not shadow BaseModel.json
    json_path: Optional[str] = Field(default=None, alias="json")
    stamp: bool = False


class RunConfig(_Section):
    """One run: [system] plus the command-specific sections"""

    system: Optional[SystemParams] = None
    sweep: SweepSection = Field(default_factory=SweepSection)
    analysis: AnalysisSection = Field(default_factory=AnalysisSection)
    verify: Optional[VerifySection] = None
    window: Optional[WindowSection] = None
    output: OutputSection = Field(default_factory=OutputSection)

    def require_system(self) -> SystemParams:
        if self.system is None:
            raise ConfigError("Missing [system] section", key="system")
        return self.system


def _describe(error: ValidationError) -> str:
    parts = []
    for item in error.errors():
        location = ".".join(str(piece) for piece in item.get("loc", ()))
        parts.append(f"{location}: {item.get('msg')}")
    return "; ".join(parts)


def _apply_overrides(raw: Dict[str, Dict[str, str]], overrides: List[str]) -> None:
    for override in overrides:
        if "=" not in override:
            raise ConfigError(f"Override '{override}' is not of the form key=value", key=override)
        key, value = override.split("=", 1)
        key = key.strip()
        section, _, option = key.rpartition(".")
        raw.setdefault(section or "system", {})[option] = value.strip()


def parse_run_config(text: str, overrides: Optional[List[str]] = None, source: str = "<config>") -> RunConfig:
    """Parse INI text (plus key=value overrides) into a validated RunConfig"""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"), interpolation=None)
    parser.optionxform = str
    try:
        parser.read_string(text, source=source)
    except configparser.Error as e:
        raise ConfigError(f"{source}: {e}")

    raw: Dict[str, Dict[str, str]] = {section: dict(parser[section]) for section in parser.sections()}
    _apply_overrides(raw, overrides or [])

    try:
        return RunConfig(**raw)
    except ValidationError as e:
        first = e.errors()[0].get("loc", ()) if e.errors() else ()
        key = str(first[-1]) if first else None
        raise ConfigError(f"{source}: invalid configuration: {_describe(e)}", key=key)


def load_run_config(path: str, overrides: Optional[List[str]] = None) -> RunConfig:
    try:
        with open(path, "r", encoding="utf-8") as f:
            text = f.read()
    except OSError as e:
        raise ConfigError(f"Cannot read config '{path}': {e}", key="config")
    return parse_run_config(text, overrides, source=path)
