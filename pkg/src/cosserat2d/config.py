"""Scenario configuration: strict JSON schema with typed sections.

The file layout mirrors the run ingredients: material constants, model
selection, grid geometry, time-integration settings, dispersion-sweep range,
initial condition, and verification options.  Unknown keys anywhere are
rejected (with their full path) rather than silently ignored, and the Lamé
constant is spelled ``lambda`` / ``lambda_s`` in JSON (it is a reserved word
in Python, so the dataclass fields are ``lam`` / ``lam_s``).
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .errors import ConfigError, IoError
from .fields import Grid
from .materials import MaterialParams, ModelSelector

INITIAL_KINDS = ("zero", "random_smooth", "plane_wave")


@dataclass(frozen=True)
class SimSettings:
    """Time-integration controls."""

    dt: float = 0.01
    steps: int = 100
    output_every: int = 10
    eps_reg: float = 1e-8

    def __post_init__(self):
        if not self.dt > 0:
            raise ConfigError(f"sim.dt must be positive, got {self.dt}")
        if self.steps < 0:
            raise ConfigError(f"sim.steps must be nonnegative, got {self.steps}")
        if self.output_every < 1:
            raise ConfigError(
                f"sim.output_every must be at least 1, got {self.output_every}")
        if self.eps_reg < 0:
            raise ConfigError(
                f"sim.eps_reg must be nonnegative, got {self.eps_reg}")


@dataclass(frozen=True)
class WaveSweep:
    """Wavenumber range for the dispersion sweep."""

    k_min: float = 0.1
    k_max: float = 10.0
    k_steps: int = 50

    def __post_init__(self):
        if not 0 < self.k_min <= self.k_max:
            raise ConfigError(
                f"wave range must satisfy 0 < k_min <= k_max, got "
                f"[{self.k_min}, {self.k_max}]")
        if self.k_steps < 1:
            raise ConfigError(
                f"wave.k_steps must be at least 1, got {self.k_steps}")


@dataclass(frozen=True)
class InitialCondition:
    """Initial state selector; fields beyond `kind` apply to the kinds that
    use them (seed/amplitude/modes for random_smooth, k/branch for
    plane_wave) and are carried inertly otherwise."""

    kind: str = "zero"
    seed: int = 1234
    amplitude: float = 0.01
    modes: int = 3
    k: float = 1.0
    branch: int = 0

    def __post_init__(self):
        if self.kind not in INITIAL_KINDS:
            raise ConfigError(
                f"initial.kind must be one of {INITIAL_KINDS}, got "
                f"{self.kind!r}")
        if self.modes < 0:
            raise ConfigError(
                f"initial.modes must be nonnegative, got {self.modes}")
        if not self.amplitude >= 0:
            raise ConfigError(
                f"initial.amplitude must be nonnegative, got {self.amplitude}")
        if not self.k > 0:
            raise ConfigError(f"initial.k must be positive, got {self.k}")
        if not 0 <= self.branch <= 2:
            raise ConfigError(
                f"initial.branch must be 0, 1 or 2, got {self.branch}")


@dataclass(frozen=True)
class VerifySettings:
    tolerance_scale: float = 1.0

    def __post_init__(self):
        if not self.tolerance_scale >= 0:
            raise ConfigError(
                f"verify.tolerance_scale must be nonnegative, got "
                f"{self.tolerance_scale}")


@dataclass(frozen=True)
class ScenarioConfig:
    material: MaterialParams
    model: ModelSelector
    grid: Grid
    sim: SimSettings
    wave: WaveSweep
    initial: InitialCondition
    verify: VerifySettings

    @classmethod
    def default(cls) -> "ScenarioConfig":
        return cls(material=MaterialParams(), model=ModelSelector(),
                   grid=Grid(nx=32, ny=32), sim=SimSettings(),
                   wave=WaveSweep(), initial=InitialCondition(),
                   verify=VerifySettings())

    def to_dict(self) -> dict:
        m = self.material
        return {
            "material": {
                "mu": m.mu, "lambda": m.lam, "mu_c": m.mu_c, "L_c": m.L_c,
                "chi": m.chi, "rho": m.rho, "rho_rot": m.rho_rot,
                "mu_s": m.mu_s, "lambda_s": m.lam_s, "mu_c_s": m.mu_c_s,
                "m1": m.m1, "m2": m.m2, "m3": m.m3,
            },
            "model": {"kind": self.model.kind,
                      "coupling": self.model.coupling},
            "grid": {"nx": self.grid.nx, "ny": self.grid.ny,
                     "lx": self.grid.lx, "ly": self.grid.ly},
            "sim": {"dt": self.sim.dt, "steps": self.sim.steps,
                    "output_every": self.sim.output_every,
                    "eps_reg": self.sim.eps_reg},
            "wave": {"k_min": self.wave.k_min, "k_max": self.wave.k_max,
                     "k_steps": self.wave.k_steps},
            "initial": {"kind": self.initial.kind, "seed": self.initial.seed,
                        "amplitude": self.initial.amplitude,
                        "modes": self.initial.modes, "k": self.initial.k,
                        "branch": self.initial.branch},
            "verify": {"tolerance_scale": self.verify.tolerance_scale},
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ScenarioConfig":
        if not isinstance(data, dict):
            raise ConfigError("configuration root must be a JSON object")
        _reject_unknown(data, ("material", "model", "grid", "sim", "wave",
                               "initial", "verify"), path="")
        material = _build(
            MaterialParams, data.get("material", {}), "material",
            floats=("mu", "mu_c", "L_c", "chi", "rho", "rho_rot", "mu_s",
                    "mu_c_s", "m1", "m2", "m3"),
            renamed_floats={"lambda": "lam", "lambda_s": "lam_s"})
        model = _build(ModelSelector, data.get("model", {}), "model",
                       strings=("kind", "coupling"))
        # The core Grid class requires explicit sizes; the scenario layer
        # defaults to the 32x32 square used by ScenarioConfig.default().
        grid_section = data.get("grid", {})
        if isinstance(grid_section, dict):
            grid_section = {"nx": 32, "ny": 32, **grid_section}
        grid = _build(Grid, grid_section, "grid",
                      ints=("nx", "ny"), floats=("lx", "ly"))
        sim = _build(SimSettings, data.get("sim", {}), "sim",
                     ints=("steps", "output_every"), floats=("dt", "eps_reg"))
        wave = _build(WaveSweep, data.get("wave", {}), "wave",
                      ints=("k_steps",), floats=("k_min", "k_max"))
        initial = _build(InitialCondition, data.get("initial", {}), "initial",
                         ints=("seed", "modes", "branch"),
                         floats=("amplitude", "k"), strings=("kind",))
        verify = _build(VerifySettings, data.get("verify", {}), "verify",
                        floats=("tolerance_scale",))
        return cls(material=material, model=model, grid=grid, sim=sim,
                   wave=wave, initial=initial, verify=verify)


def _reject_unknown(section: dict, allowed, path: str) -> None:
    for key in section:
        if key not in allowed:
            where = f"{path}.{key}" if path else key
            raise ConfigError(f"unknown configuration key: {where!r}")


def _coerce_float(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where!r} must be a number, got {value!r}")
    return float(value)


def _coerce_int(value, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{where!r} must be an integer, got {value!r}")
    return value


def _coerce_str(value, where: str) -> str:
    if not isinstance(value, str):
        raise ConfigError(f"{where!r} must be a string, got {value!r}")
    return value


def _build(factory, section, path, *, ints=(), floats=(), strings=(),
           renamed_floats=None):
    """Construct a section dataclass from its JSON object, enforcing key
    and scalar-type strictness; value-range validation lives in the
    dataclasses themselves."""
    renamed_floats = renamed_floats or {}
    if not isinstance(section, dict):
        raise ConfigError(f"section {path!r} must be a JSON object")
    _reject_unknown(section, tuple(ints) + tuple(floats) + tuple(strings)
                    + tuple(renamed_floats), path)
    kwargs = {}
    for key, value in section.items():
        where = f"{path}.{key}"
        if key in renamed_floats:
            kwargs[renamed_floats[key]] = _coerce_float(value, where)
        elif key in ints:
            kwargs[key] = _coerce_int(value, where)
        elif key in floats:
            kwargs[key] = _coerce_float(value, where)
        else:
            kwargs[key] = _coerce_str(value, where)
    try:
        return factory(**kwargs)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid section {path!r}: {exc}") from exc


def load_config(path: str) -> ScenarioConfig:
    """Read and validate a JSON scenario file."""
    try:
        with open(path, "r", encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise IoError(f"cannot read configuration {path!r}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"configuration {path!r} is not valid JSON: {exc}")
    return ScenarioConfig.from_dict(data)


def save_config(config: ScenarioConfig, path: str) -> None:
    try:
        with open(path, "w", encoding="utf-8") as handle:
            json.dump(config.to_dict(), handle, indent=2, sort_keys=True)
            handle.write("\n")
    except OSError as exc:
        raise IoError(f"cannot write configuration {path!r}: {exc}") from exc
