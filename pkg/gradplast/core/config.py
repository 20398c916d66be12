"""
Typed run configuration for GradPlast.

A run is described by a JSON document with the sections ``case``,
``material``, ``model``, ``geometry``, ``grain_boundary``, ``loading``,
``solver`` and ``output``. Every section maps onto a dataclass; unknown keys
are rejected, values are checked by the field validators and case dependent
defaults are resolved here, so the rest of the package only ever sees a fully
populated :class:`CaseConfig`.

Units are MPa, mm and s throughout. Angles are given in degrees.
"""

import copy
import json
import math
from dataclasses import asdict, dataclass, field, fields
from typing import Any, Dict, List, Optional

from .errorhandler import ConfigError, ErrorCode, ValidationError
from .tools import read_json
from .validator import (
    is_in_range, is_non_negative_number, is_numeric, is_positive_number,
    is_valid_choice, reject_unknown_keys
)

CASE_KINDS = ("shear_layer", "bicrystal_shear", "bicrystal_tension")
MODEL_KINDS = ("proposed", "gurtin-energetic", "gurtin-dissipative")
GB_MODES = ("proposed", "micro-free", "micro-hard")
LOADING_KINDS = ("monotonic", "cyclic", "nonproportional")
MICRO_BCS = ("hard", "free")
SERIES = ("stress_strain", "averages", "profiles", "fields")
DISSIPATIVE_LENGTH_RATIO = 0.2

PRESETS = {
    "table1": {"E": 260000.0, "nu": 0.3, "d0_dot": 0.02, "m_rate": 0.05, "S0": 50.0},
    "table2": {"E": 60840.0, "nu": 0.3, "d0_dot": 0.001, "m_rate": 0.05, "S0": 60.84},
}

# Per case defaults for values the user did not give
CASE_DEFAULTS = {
    "shear_layer": {
        "preset": "table1", "Lstar_ratio": 2.0,
        "H": 1.0, "nx": 1, "ny": 100, "angles_A": [60.0, -60.0],
        "rate": 0.01, "max_strain": 0.025,
    },
    "bicrystal_shear": {
        "preset": "table2", "Lstar_ratio": 2.0,
        "W": 1.0, "nx": 200, "ny": 1, "angles_A": [10.0], "angles_B": [-10.0],
        "rate": 0.001, "max_strain": 0.02,
    },
    "bicrystal_tension": {
        "preset": "table2", "Lstar_ratio": 10.0,
        "W": 0.05, "H": 0.05, "nx": 90, "ny": 40,
        "angles_A": [30.0, -45.0], "angles_B": [-30.0, -45.0],
        "rate": 0.001, "max_strain": 0.05,
    },
}


@dataclass
class MaterialConfig:
    """Bulk material constants (Table-style block)."""
    preset: Optional[str] = None
    E: Optional[float] = None
    nu: Optional[float] = None
    S0: Optional[float] = None
    d0_dot: Optional[float] = None
    m_rate: Optional[float] = None
    omega: float = 0.01
    zeta: float = 0.0
    q_latent: float = 1.0
    h_self: float = 0.0


@dataclass
class ModelConfig:
    """Model selector and length scales, absolute (mm) or as ratios to the reference length."""
    kind: str = "proposed"
    Lstar: Optional[float] = None
    Lstar_ratio: Optional[float] = None
    L_en: Optional[float] = None
    L_en_ratio: Optional[float] = None
    L_d: Optional[float] = None
    L_d_ratio: Optional[float] = None


@dataclass
class GeometryConfig:
    H: Optional[float] = None
    W: Optional[float] = None
    nx: Optional[int] = None
    ny: Optional[int] = None
    angles_A: Optional[List[float]] = None
    angles_B: Optional[List[float]] = None
    micro_bc: Optional[str] = None


@dataclass
class GrainBoundaryConfig:
    mode: str = "proposed"
    c_s: float = 0.0
    zeta_s: float = 0.0


@dataclass
class LoadingConfig:
    kind: str = "monotonic"
    rate: Optional[float] = None
    max_strain: Optional[float] = None
    amplitude: float = 0.01
    period: float = 4.0
    cycles: int = 1
    switch_strain: float = 0.01


@dataclass
class SolverConfig:
    """Time stepping and Newton controls."""
    t_end: Optional[float] = None
    dt_initial: Optional[float] = None
    dt_min: Optional[float] = None
    dt_max: Optional[float] = None
    newton_tol_rel: float = 1e-8
    newton_tol_abs: float = 1e-10
    max_newton_iter: int = 25
    cutback_factor: float = 0.5
    growth_factor: float = 1.5
    growth_delay: int = 3
    stall_window: int = 6
    stall_factor: float = 0.5


@dataclass
class OutputConfig:
    series: Optional[List[str]] = None
    profile_loads: List[float] = field(default_factory=list)
    profile_x2: Optional[float] = None


@dataclass
class CaseConfig:
    """Fully resolved configuration of one run."""
    kind: str
    name: str
    material: MaterialConfig
    model: ModelConfig
    geometry: GeometryConfig
    grain_boundary: GrainBoundaryConfig
    loading: LoadingConfig
    solver: SolverConfig
    output: OutputConfig

    @property
    def reference_length(self) -> float:
        """Length that the ``*_ratio`` entries are measured against."""
        if self.kind == "bicrystal_shear":
            return self.geometry.W
        return self.geometry.H

    def to_dict(self) -> Dict[str, Any]:
        """Serialize to the config file layout; ``None`` entries are omitted."""
        out = {"case": {"kind": self.kind, "name": self.name}}
        for section in SECTION_TYPES:
            values = asdict(getattr(self, section))
            out[section] = {k: v for k, v in values.items() if v is not None}
        return out


SECTION_TYPES = {
    "material": MaterialConfig,
    "model": ModelConfig,
    "geometry": GeometryConfig,
    "grain_boundary": GrainBoundaryConfig,
    "loading": LoadingConfig,
    "solver": SolverConfig,
    "output": OutputConfig,
}

_INT_FIELDS = {"nx", "ny", "cycles", "max_newton_iter", "growth_delay", "stall_window"}
_LIST_FIELDS = {"angles_A", "angles_B", "profile_loads"}


def _coerce(section: str, key: str, value: Any) -> Any:
    name = f"{section}.{key}"
    if value is None:
        return None
    if key in _LIST_FIELDS:
        if not isinstance(value, list):
            raise ValidationError(ErrorCode.VALID_INVALID_FORMAT, f"{name} must be a list of numbers")
        for v in value:
            is_numeric(v, name)
        return [float(v) for v in value]
    if key == "series":
        if not isinstance(value, list):
            raise ValidationError(ErrorCode.VALID_INVALID_FORMAT, f"{name} must be a list of names")
        for v in value:
            is_valid_choice(v, SERIES, name)
        return list(value)
    if key in _INT_FIELDS:
        is_numeric(value, name)
        if float(value) != int(float(value)):
            raise ValidationError(ErrorCode.VALID_INVALID_FORMAT, f"{name} must be an integer: {value}")
        return int(float(value))
    if key in ("kind", "mode", "micro_bc", "preset", "name"):
        if not isinstance(value, str):
            raise ValidationError(ErrorCode.VALID_INVALID_FORMAT, f"{name} must be a string")
        return value
    is_numeric(value, name)
    return float(value)


def _build_section(cls, data: Any, section: str):
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError(ErrorCode.CFG_PARSE_ERROR, f"Section '{section}' must be an object")
    allowed = [f.name for f in fields(cls)]
    reject_unknown_keys(data, allowed, section)
    values = {k: _coerce(section, k, v) for k, v in data.items()}
    return cls(**values)


def _resolve_length(model: ModelConfig, base: str, ref: float, fallback: Optional[float]) -> None:
    absolute = getattr(model, base)
    ratio = getattr(model, base + "_ratio")
    if absolute is not None and ratio is not None:
        if not math.isclose(absolute, ratio * ref, rel_tol=1e-12, abs_tol=1e-15):
            raise ConfigError(
                ErrorCode.CFG_INCOMPATIBLE_SETTINGS,
                f"model.{base} = {absolute} disagrees with model.{base}_ratio = {ratio}"
            )
    elif absolute is None and ratio is not None:
        setattr(model, base, ratio * ref)
    elif absolute is None:
        setattr(model, base, fallback)
    if ratio is None:
        setattr(model, base + "_ratio", getattr(model, base) / ref)
    is_non_negative_number(getattr(model, base), f"model.{base}")


def _resolve_defaults(cfg: CaseConfig) -> None:
    d = CASE_DEFAULTS[cfg.kind]
    mat, geo, load, sol, out = cfg.material, cfg.geometry, cfg.loading, cfg.solver, cfg.output

    # Material: preset first, explicit entries win
    if mat.preset is None:
        mat.preset = d["preset"]
    is_valid_choice(mat.preset, PRESETS, "material.preset")
    for key, value in PRESETS[mat.preset].items():
        if getattr(mat, key) is None:
            setattr(mat, key, value)

    # Geometry
    geo.nx = geo.nx if geo.nx is not None else d["nx"]
    geo.ny = geo.ny if geo.ny is not None else d["ny"]
    if cfg.kind == "shear_layer":
        geo.H = geo.H if geo.H is not None else d["H"]
        geo.W = geo.W if geo.W is not None else geo.H * geo.nx / geo.ny
    elif cfg.kind == "bicrystal_shear":
        geo.W = geo.W if geo.W is not None else d["W"]
        geo.H = geo.H if geo.H is not None else 2.0 * geo.W / geo.nx
    else:
        geo.W = geo.W if geo.W is not None else d["W"]
        geo.H = geo.H if geo.H is not None else d["H"]
    geo.angles_A = geo.angles_A if geo.angles_A is not None else list(d["angles_A"])
    if geo.angles_B is None:
        geo.angles_B = list(d.get("angles_B", geo.angles_A))
    if geo.micro_bc is None:
        geo.micro_bc = "free" if load.kind == "nonproportional" else "hard"

    # Loading
    load.rate = load.rate if load.rate is not None else d["rate"]
    if load.max_strain is None:
        load.max_strain = 0.02 if load.kind == "nonproportional" else d["max_strain"]

    # Solver
    if sol.t_end is None:
        if load.kind == "cyclic":
            sol.t_end = load.period * load.cycles
        else:
            sol.t_end = load.max_strain / load.rate
    if sol.dt_initial is None:
        sol.dt_initial = sol.t_end / (100.0 * (load.cycles if load.kind == "cyclic" else 1))
    sol.dt_max = sol.dt_max if sol.dt_max is not None else sol.dt_initial
    sol.dt_min = sol.dt_min if sol.dt_min is not None else sol.dt_initial * 1e-4

    # Output
    if out.series is None:
        out.series = ["stress_strain", "averages", "profiles"]
        if cfg.kind == "bicrystal_tension":
            out.series.append("fields")
    if out.profile_x2 is None:
        out.profile_x2 = 0.5 * geo.H

    # Length scales last, they depend on the reference length
    ref = cfg.reference_length
    _resolve_length(cfg.model, "Lstar", ref, d["Lstar_ratio"] * ref)
    _resolve_length(cfg.model, "L_en", ref, cfg.model.Lstar)
    dissipative = cfg.model.kind == "gurtin-dissipative"
    _resolve_length(cfg.model, "L_d", ref, DISSIPATIVE_LENGTH_RATIO * ref if dissipative else 0.0)


def _validate(cfg: CaseConfig) -> None:
    mat, geo, gb, load, sol = cfg.material, cfg.geometry, cfg.grain_boundary, cfg.loading, cfg.solver

    is_valid_choice(cfg.model.kind, MODEL_KINDS, "model.kind")
    is_valid_choice(gb.mode, GB_MODES, "grain_boundary.mode")
    is_valid_choice(load.kind, LOADING_KINDS, "loading.kind")
    is_valid_choice(geo.micro_bc, MICRO_BCS, "geometry.micro_bc")

    is_positive_number(mat.E, "material.E")
    is_in_range(mat.nu, -1.0, 0.5, "material.nu", min_inclusive=False)
    if mat.nu >= 0.5:
        raise ValidationError(ErrorCode.VALID_OUT_OF_RANGE, "material.nu must be below 0.5")
    is_positive_number(mat.S0, "material.S0")
    is_positive_number(mat.d0_dot, "material.d0_dot")
    is_in_range(mat.m_rate, 0.0, 1.0, "material.m_rate", min_inclusive=False)
    is_positive_number(mat.omega, "material.omega")
    is_non_negative_number(mat.zeta, "material.zeta")
    is_non_negative_number(mat.q_latent, "material.q_latent")
    is_non_negative_number(mat.h_self, "material.h_self")

    is_positive_number(geo.H, "geometry.H")
    is_positive_number(geo.W, "geometry.W")
    is_positive_number(geo.nx, "geometry.nx")
    is_positive_number(geo.ny, "geometry.ny")
    if not geo.angles_A:
        raise ValidationError(ErrorCode.VALID_EMPTY_FIELD, "geometry.angles_A cannot be empty")
    if len(geo.angles_A) != len(geo.angles_B):
        raise ConfigError(
            ErrorCode.CFG_INCOMPATIBLE_SETTINGS,
            "geometry.angles_A and geometry.angles_B must list the same number of slip systems"
        )

    is_non_negative_number(gb.c_s, "grain_boundary.c_s")
    is_non_negative_number(gb.zeta_s, "grain_boundary.zeta_s")
    if gb.mode == "proposed" and gb.c_s == 0.0 and gb.zeta_s > 0.0:
        raise ConfigError(
            ErrorCode.CFG_INCOMPATIBLE_SETTINGS,
            "grain_boundary.zeta_s > 0 requires grain_boundary.c_s > 0"
        )

    is_positive_number(load.rate, "loading.rate")
    is_positive_number(load.max_strain, "loading.max_strain")
    is_positive_number(load.amplitude, "loading.amplitude")
    is_positive_number(load.period, "loading.period")
    is_positive_number(load.cycles, "loading.cycles")
    if load.kind == "nonproportional":
        if cfg.kind != "shear_layer":
            raise ConfigError(
                ErrorCode.CFG_INCOMPATIBLE_SETTINGS,
                "nonproportional loading is only defined for the shear_layer case"
            )
        if geo.micro_bc != "free":
            raise ConfigError(
                ErrorCode.CFG_INCOMPATIBLE_SETTINGS,
                "nonproportional loading starts from geometry.micro_bc = 'free'"
            )
        is_in_range(load.switch_strain, 0.0, load.max_strain, "loading.switch_strain",
                    min_inclusive=False)

    is_positive_number(sol.t_end, "solver.t_end")
    is_positive_number(sol.dt_initial, "solver.dt_initial")
    is_positive_number(sol.dt_min, "solver.dt_min")
    is_positive_number(sol.dt_max, "solver.dt_max")
    if sol.dt_min > sol.dt_initial:
        raise ConfigError(ErrorCode.CFG_INCOMPATIBLE_SETTINGS, "solver.dt_min exceeds solver.dt_initial")
    is_positive_number(sol.newton_tol_rel, "solver.newton_tol_rel")
    is_positive_number(sol.newton_tol_abs, "solver.newton_tol_abs")
    is_positive_number(sol.max_newton_iter, "solver.max_newton_iter")
    is_in_range(sol.cutback_factor, 0.0, 1.0, "solver.cutback_factor", min_inclusive=False)
    if sol.cutback_factor >= 1.0:
        raise ValidationError(ErrorCode.VALID_OUT_OF_RANGE, "solver.cutback_factor must be below 1")
    is_in_range(sol.growth_factor, 1.0, 10.0, "solver.growth_factor")
    is_non_negative_number(sol.growth_delay, "solver.growth_delay")
    is_non_negative_number(sol.stall_window, "solver.stall_window")
    is_in_range(sol.stall_factor, 0.0, 1.0, "solver.stall_factor", min_inclusive=False)

    for value in cfg.output.profile_loads:
        is_non_negative_number(value, "output.profile_loads")


def config_from_dict(data: Dict[str, Any]) -> CaseConfig:
    """
    Build and validate a CaseConfig from an already parsed document.

    Raises:
        ConfigError: Unknown sections or keys, missing sections, conflicting settings
        ValidationError: A value out of range, naming the field
    """
    if not isinstance(data, dict):
        raise ConfigError(ErrorCode.CFG_PARSE_ERROR, "Configuration must be a JSON object")
    reject_unknown_keys(data, ["case", *SECTION_TYPES], "<root>")

    case = data.get("case")
    if not isinstance(case, dict) or "kind" not in case:
        raise ConfigError(ErrorCode.CFG_MISSING_SECTION, "Section 'case' with a 'kind' entry is required")
    reject_unknown_keys(case, ["kind", "name"], "case")
    kind = _coerce("case", "kind", case["kind"])
    is_valid_choice(kind, CASE_KINDS, "case.kind")

    if not data.get("loading"):
        raise ValidationError(ErrorCode.VALID_EMPTY_FIELD, "Section 'loading' cannot be empty")

    sections = {name: _build_section(cls, data.get(name), name) for name, cls in SECTION_TYPES.items()}
    cfg = CaseConfig(kind=kind, name=str(case.get("name", kind)), **sections)

    is_valid_choice(cfg.loading.kind, LOADING_KINDS, "loading.kind")
    _resolve_defaults(cfg)
    _validate(cfg)
    return cfg


def parse_config(text: str) -> CaseConfig:
    """
    Parse configuration text (JSON).

    Args:
        text: Content of a configuration file

    Returns:
        CaseConfig: Validated configuration with all defaults applied

    Raises:
        ConfigError: Syntax errors report line and column
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(
            ErrorCode.CFG_PARSE_ERROR,
            f"Invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}"
        )
    return config_from_dict(data)


def load_config(file_path: str) -> CaseConfig:
    """Read and parse a configuration file."""
    try:
        with open(file_path, 'r', encoding='utf-8') as f:
            text = f.read()
    except FileNotFoundError:
        raise ConfigError(ErrorCode.CFG_FILE_MISSING, f"Configuration file not found: {file_path}")
    return parse_config(text)


def load_raw_config(file_path: str) -> Dict[str, Any]:
    """Read a configuration file without validating it (used by the sweep driver)."""
    return read_json(file_path)


def apply_override(data: Dict[str, Any], dotted: str, value: Any) -> Dict[str, Any]:
    """
    Return a copy of a raw config document with one dotted entry replaced.

    Args:
        data: Raw config document
        dotted: ``section.key``, e.g. ``material.zeta``
        value: New value

    Raises:
        ConfigError: If the path is not ``section.key``
    """
    parts = dotted.split(".")
    if len(parts) != 2 or not all(parts):
        raise ConfigError(ErrorCode.CFG_INVALID_VALUE, f"Parameter must be 'section.key': {dotted}")
    section, key = parts
    out = copy.deepcopy(data)
    out.setdefault(section, {})
    if not isinstance(out[section], dict):
        raise ConfigError(ErrorCode.CFG_PARSE_ERROR, f"Section '{section}' must be an object")
    out[section][key] = value
    return out
