#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Configuration module for the shallow water solver.

Provides run configuration management with support for YAML/JSON files,
command-line overrides and programmatic configuration. Fields left as
``None`` are filled from the selected benchmark when a run is resolved.
"""

import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, List, Optional, Type, TypeVar, Union

from .errors import ConfigurationError

try:
    import yaml

    YAML_AVAILABLE = True
except ImportError:
    YAML_AVAILABLE = False

HEADER_PREFIX = "# "

S = TypeVar("S", bound="_Section")


class _Section:
    """Shared dictionary conversion for configuration sections."""

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary."""
        return asdict(self)  # type: ignore[call-overload, no-any-return]

    @classmethod
    def from_dict(cls: Type[S], data: Dict[str, Any]) -> S:
        """Create from dictionary, ignoring unknown keys."""
        names = {f.name for f in fields(cls)}  # type: ignore[arg-type]
        return cls(**{k: v for k, v in (data or {}).items() if k in names})


@dataclass
class MeshConfig(_Section):
    """Mesh parameter configuration."""

    n_elements: Optional[int] = None  # benchmark default when None
    x_left: Optional[float] = None  # custom problems only
    x_right: Optional[float] = None
    resolutions: List[int] = field(default_factory=list)  # convergence


@dataclass
class ProblemConfig(_Section):
    """Problem selection: a named benchmark or a custom expression block."""

    benchmark: str = "wet-dam-break"  # or 'custom'
    gravity: Optional[float] = None
    bathymetry: str = "0"  # expression in x, custom problems only
    initial_h: str = ""  # expression in x, custom problems only
    initial_hv: str = "0"


@dataclass
class SchemeConfig(_Section):
    """Spatial discretization options."""

    scheme: str = "MCL-SDE"  # 'LOW', 'MCL' or 'MCL-SDE'
    raw_flux_mode: Optional[str] = None  # 'full', 'steady' or 'simple'
    wave_speed: str = "nodal"  # 'nodal' or 'gms'
    entropy_fix_viscosity: bool = True
    alpha_entropy_fix: bool = False


@dataclass
class TimeConfig(_Section):
    """Time stepping parameter configuration."""

    rk_order: int = 2  # 1, 2 or 3
    nu: Optional[float] = None  # CFL parameter
    t_end: Optional[float] = None
    steady: Optional[bool] = None
    steady_tol: float = 1e-12
    max_steps: int = 1_000_000
    max_halvings: int = 20


@dataclass
class WetDryConfig(_Section):
    """Wetting and drying treatment."""

    strategy: Optional[str] = None
    epsilon: Optional[float] = None  # strategy default when None
    sigma: float = 10.0  # bottom friction coefficient
    delta: float = 1e-3  # boundary layer thickness
    overwrite_discharge: bool = True


@dataclass
class BoundaryConfig(_Section):
    """Boundary specification; empty kinds mean benchmark default."""

    left: str = ""
    left_h_in: Optional[float] = None
    left_hv_in: Optional[float] = None
    right: str = ""
    right_h_in: Optional[float] = None
    right_hv_in: Optional[float] = None


@dataclass
class OutputConfig(_Section):
    """Output configuration."""

    out_dir: str = "results"
    output_times: List[float] = field(default_factory=list)
    diagnostics: bool = True
    entropy_diagnostics: bool = False
    write_exact: bool = True
    log_every: int = 100


@dataclass
class SolverConfig:
    """Main configuration class combining all sections."""

    mesh: MeshConfig = field(default_factory=MeshConfig)
    problem: ProblemConfig = field(default_factory=ProblemConfig)
    scheme: SchemeConfig = field(default_factory=SchemeConfig)
    time: TimeConfig = field(default_factory=TimeConfig)
    wetdry: WetDryConfig = field(default_factory=WetDryConfig)
    boundary: BoundaryConfig = field(default_factory=BoundaryConfig)
    output: OutputConfig = field(default_factory=OutputConfig)

    SECTIONS = (
        "mesh",
        "problem",
        "scheme",
        "time",
        "wetdry",
        "boundary",
        "output",
    )

    def to_dict(self) -> Dict[str, Any]:
        """Convert to nested dictionary."""
        return {name: getattr(self, name).to_dict() for name in self.SECTIONS}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SolverConfig":
        """Create from nested dictionary."""
        data = data or {}
        return cls(
            mesh=MeshConfig.from_dict(data.get("mesh", {})),
            problem=ProblemConfig.from_dict(data.get("problem", {})),
            scheme=SchemeConfig.from_dict(data.get("scheme", {})),
            time=TimeConfig.from_dict(data.get("time", {})),
            wetdry=WetDryConfig.from_dict(data.get("wetdry", {})),
            boundary=BoundaryConfig.from_dict(data.get("boundary", {})),
            output=OutputConfig.from_dict(data.get("output", {})),
        )

    @classmethod
    def from_yaml(cls, file_path: Union[str, Path]) -> "SolverConfig":
        """
        Load configuration from YAML file.

        Args:
            file_path: Path to YAML configuration file

        Returns:
            SolverConfig instance

        Raises:
            ImportError: If PyYAML is not installed
            FileNotFoundError: If file doesn't exist
        """
        if not YAML_AVAILABLE:
            raise ImportError(
                "PyYAML is required to load YAML config files. "
                "Install with: pip install pyyaml"
            )

        path = Path(file_path)
        if not path.exists():
            msg = f"Configuration file not found: {file_path}"
            raise FileNotFoundError(msg)

        with open(path, "r", encoding="utf-8") as f:
            data = yaml.safe_load(f)

        return cls.from_dict(data or {})

    @classmethod
    def from_json(cls, file_path: Union[str, Path]) -> "SolverConfig":
        """
        Load configuration from JSON file.

        Args:
            file_path: Path to JSON configuration file

        Returns:
            SolverConfig instance
        """
        path = Path(file_path)
        if not path.exists():
            msg = f"Configuration file not found: {file_path}"
            raise FileNotFoundError(msg)

        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)

        return cls.from_dict(data)

    @classmethod
    def from_artifact(cls, file_path: Union[str, Path]) -> "SolverConfig":
        """
        Recover the configuration stored in a CSV artifact header.

        Args:
            file_path: Solution, diagnostics or EOC CSV written by a run

        Returns:
            SolverConfig instance the artifact was produced with
        """
        if not YAML_AVAILABLE:
            raise ImportError(
                "PyYAML is required to read artifact headers. "
                "Install with: pip install pyyaml"
            )

        path = Path(file_path)
        if not path.exists():
            raise FileNotFoundError(f"文件不存在: {file_path}")

        lines = []
        with open(path, "r", encoding="utf-8") as f:
            for line in f:
                if not line.startswith(HEADER_PREFIX.rstrip()):
                    break
                lines.append(line[len(HEADER_PREFIX) :].rstrip("\n"))

        if not lines:
            raise ConfigurationError(f"文件缺少配置头: {file_path}")
        return cls.from_dict(yaml.safe_load("\n".join(lines)) or {})

    def to_header(self) -> str:
        """Render the configuration as commented YAML header lines."""
        if not YAML_AVAILABLE:
            raise ImportError(
                "PyYAML is required to write artifact headers. "
                "Install with: pip install pyyaml"
            )
        text = yaml.safe_dump(
            self.to_dict(), default_flow_style=False, sort_keys=True
        )
        return "".join(
            f"{HEADER_PREFIX}{line}\n" for line in text.splitlines()
        )

    def save_yaml(self, file_path: Union[str, Path]) -> None:
        """
        Save configuration to YAML file.

        Args:
            file_path: Output path for YAML file
        """
        if not YAML_AVAILABLE:
            raise ImportError(
                "PyYAML is required to save YAML config files. "
                "Install with: pip install pyyaml"
            )

        with open(file_path, "w", encoding="utf-8") as f:
            yaml.safe_dump(
                self.to_dict(),
                f,
                default_flow_style=False,
                allow_unicode=True,
            )

    def save_json(self, file_path: Union[str, Path], indent: int = 2) -> None:
        """
        Save configuration to JSON file.

        Args:
            file_path: Output path for JSON file
            indent: JSON indentation level
        """
        with open(file_path, "w", encoding="utf-8") as f:
            json.dump(self.to_dict(), f, indent=indent, ensure_ascii=False)

    def merge(self, other: "SolverConfig") -> "SolverConfig":
        """
        Merge with another configuration (other's non-None values win).

        Args:
            other: Configuration to merge with

        Returns:
            New merged configuration
        """
        merged_dict = self.to_dict()
        for section, values in other.to_dict().items():
            merged_dict[section].update(
                {k: v for k, v in values.items() if v is not None}
            )

        return SolverConfig.from_dict(merged_dict)


def load_config(
    config_file: Optional[Union[str, Path]] = None, **overrides: Any
) -> SolverConfig:
    """
    Load configuration with optional overrides.

    Args:
        config_file: Optional path to YAML/JSON config file
        **overrides: ``section__param`` keys overriding config values

    Returns:
        SolverConfig instance

    Raises:
        ConfigurationError: For unknown file formats or override keys

    Example:
        >>> config = load_config("run.yaml", time__nu=0.25)
    """
    config = SolverConfig()

    if config_file:
        path = Path(config_file)
        if path.suffix in [".yaml", ".yml"]:
            config = SolverConfig.from_yaml(config_file)
        elif path.suffix == ".json":
            config = SolverConfig.from_json(config_file)
        else:
            raise ConfigurationError(f"不支持的配置文件格式: {path.suffix}")

    return apply_overrides(config, overrides)


def apply_overrides(
    config: SolverConfig, overrides: Dict[str, Any]
) -> SolverConfig:
    """
    Set ``section__param`` values on ``config`` in place.

    Raises:
        ConfigurationError: For unknown sections or parameters
    """
    # e.g. time__nu=0.25 -> config.time.nu = 0.25
    for key, value in overrides.items():
        if "__" not in key:
            raise ConfigurationError(f"无效的配置项: {key}")
        section, param = key.split("__", 1)
        section_obj = getattr(config, section, None)
        if section_obj is None or not hasattr(section_obj, param):
            raise ConfigurationError(f"未知的配置项: {section}.{param}")
        setattr(section_obj, param, value)
    return config
