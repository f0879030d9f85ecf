"""
Configuration management for the MTSS toolkit.
Provides centralized configuration handling with presets.
"""

import json
from dataclasses import dataclass, field, asdict
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional

import yaml

OUTPUT_FORMATS = ("text", "lines")
_TRUTHY = ("1", "true", "yes")


@dataclass
class EvalConfig:
    """Configuration for script-vs-script evaluation."""

    unmatched_penalty: float = 1.0      # Seconds charged per unmatched boundary
    match_threshold: float = 0.1        # Pairs scoring <= this are never matched
    exhaustive_boundary_limit: int = 8  # Brute-force boundary assignment up to N
    exhaustive_match_limit: int = 6     # Brute-force stream matching up to N

    def to_dict(self) -> Dict[str, Any]:
        """Convert config to dictionary."""
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "EvalConfig":
        """Create config from dictionary."""
        valid_fields = {f.name for f in cls.__dataclass_fields__.values()}
        filtered_data = {k: v for k, v in data.items() if k in valid_fields}
        return cls(**filtered_data)


@dataclass
class ToolConfig:
    """Configuration shared by the library entry points and the CLI."""

    # Lint
    strict: bool = False                 # Promote warnings to errors
    disabled_rules: List[str] = field(default_factory=list)

    # Output
    output_format: str = "text"          # text, lines

    # Rendering
    expand_first_mention: bool = True

    # Evaluation
    min_f1: float = 0.0                  # eval exits 1 when any F1 is below this
    eval: EvalConfig = field(default_factory=EvalConfig)

    # Corpus scanning
    include_patterns: List[str] = field(default_factory=lambda: ["*.mtss.json"])
    exclude_patterns: List[str] = field(default_factory=list)
    max_depth: int = -1                  # Max recursion depth (-1 = unlimited)

    log_level: str = "WARNING"

    def __post_init__(self):
        if isinstance(self.eval, dict):
            self.eval = EvalConfig.from_dict(self.eval)
        if self.output_format not in OUTPUT_FORMATS:
            raise ValueError(f"Unknown output format: {self.output_format}. "
                             f"Available: {list(OUTPUT_FORMATS)}")

    def to_dict(self) -> Dict[str, Any]:
        """Convert config to dictionary."""
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ToolConfig":
        """Create config from dictionary."""
        valid_fields = {f.name for f in cls.__dataclass_fields__.values()}
        filtered_data = {k: v for k, v in data.items() if k in valid_fields}
        return cls(**filtered_data)

    def merged(self, data: Dict[str, Any]) -> "ToolConfig":
        """Copy of this config with the keys in data overriding it."""
        base = self.to_dict()
        for key, value in data.items():
            if key == "eval" and isinstance(value, dict):
                base["eval"].update(value)
            else:
                base[key] = value
        return ToolConfig.from_dict(base)

    def apply_environment(self, env: Mapping[str, str]) -> "ToolConfig":
        """Apply MTSS_* environment variables."""
        if env.get("MTSS_STRICT", "").strip().lower() in _TRUTHY:
            self.strict = True
        return self

    def save(self, filepath: Path) -> None:
        """Save configuration to JSON, or YAML for .yaml/.yml files."""
        filepath = Path(filepath)
        with open(filepath, 'w', encoding='utf-8') as f:
            if _is_yaml(filepath):
                yaml.safe_dump(self.to_dict(), f, sort_keys=False)
            else:
                json.dump(self.to_dict(), f, indent=2)

    @classmethod
    def load(cls, filepath: Path) -> "ToolConfig":
        """Load configuration; a missing file yields the defaults."""
        return cls().merged(read_config_file(filepath))


def _is_yaml(filepath: Path) -> bool:
    return filepath.suffix.lower() in (".yaml", ".yml")


def read_config_file(filepath: Optional[Path]) -> Dict[str, Any]:
    """Raw key/value pairs from a JSON or YAML config file ({} when missing)."""
    if filepath is None:
        return {}
    filepath = Path(filepath)
    if not filepath.exists():
        return {}
    with open(filepath, 'r', encoding='utf-8') as f:
        data = yaml.safe_load(f) if _is_yaml(filepath) else json.load(f)
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ValueError(f"{filepath}: configuration must be a mapping")
    return data


# Built-in presets
PRESETS = {
    "default": ToolConfig(),
    "strict": ToolConfig(
        strict=True,
    ),
    "curation": ToolConfig(
        disabled_rules=["W104"],
    ),
    "generation": ToolConfig(
        strict=True,
        min_f1=0.5,
    ),
}


def get_preset(name: str) -> ToolConfig:
    """Get a preset configuration by name."""
    if name not in PRESETS:
        raise ValueError(f"Unknown preset: {name}. Available: {list(PRESETS.keys())}")
    # Return a copy to avoid modifying the original
    return ToolConfig.from_dict(PRESETS[name].to_dict())
