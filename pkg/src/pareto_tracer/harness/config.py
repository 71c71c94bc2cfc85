"""Experiment configuration: TOML loading, method labels and CLI overrides.

A minimal file names only the problem and the method::

    method = "pc-gn-cg"

    [problem]
    name = "quadratic"

Every other field has a default. Method blocks (``[explore]``, ``[smgd]``,
``[scalarization]``) are optional, but a block that does not belong to the
chosen method is rejected.
"""

from __future__ import annotations

import dataclasses
import enum
import hashlib
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from ..continuation import ExploreConfig
from ..hvp import HvpMode
from ..krylov import Solver, SolverConfig
from ..mgd import MgdConfig
from ..problems import PROBLEM_NAMES, make_problem

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib


class ConfigError(ValueError):
    """Invalid or inconsistent experiment configuration."""


# label -> (curvature model, solver); "minres" labels use conjugate residuals,
# "lanczos" labels the Lanczos-based MINRES backend
PC_METHODS: dict[str, tuple[HvpMode, Solver]] = {
    "pc-hessian-cg": (HvpMode.EXACT, Solver.CG),
    "pc-hessian-minres": (HvpMode.EXACT, Solver.CR),
    "pc-hessian-lanczos": (HvpMode.EXACT, Solver.MINRES),
    "pc-gn-cg": (HvpMode.GN_SUM, Solver.CG),
    "pc-gn-minres": (HvpMode.GN_SUM, Solver.CR),
    "pc-gn-lanczos": (HvpMode.GN_SUM, Solver.MINRES),
}
METHODS = ("smgd", "scalarization", "pc", *PC_METHODS)


@dataclass(frozen=True)
class ProblemSpec:
    name: str = "quadratic"
    options: dict[str, Any] = field(default_factory=dict)

    def build(self):
        try:
            return make_problem(self.name, **dict(self.options))
        except (TypeError, ValueError, OSError) as exc:
            raise ConfigError(f"cannot build problem {self.name!r}: {exc}") from exc


@dataclass(frozen=True)
class SmgdBaselineConfig:
    init_count: int = 10
    epochs: int = 75
    mgd: MgdConfig = MgdConfig()

    def __post_init__(self):
        if self.init_count < 1:
            raise ValueError("init_count must be >= 1")
        if self.epochs < 0:
            raise ValueError("epochs must be >= 0")


@dataclass(frozen=True)
class ScalarizationConfig:
    lambdas: tuple[float, ...] = (0.0, 0.1, 0.25, 0.5, 1.0, 2.0, 4.0, 10.0)
    inner: MgdConfig = MgdConfig(step_size=0.1, max_iters=500)

    def __post_init__(self):
        lambdas = tuple(float(v) for v in self.lambdas)
        if not lambdas or any(v < 0 for v in lambdas):
            raise ValueError("lambdas must be a non-empty list of non-negative numbers")
        object.__setattr__(self, "lambdas", lambdas)


@dataclass(frozen=True)
class ExperimentConfig:
    method: str
    problem: ProblemSpec = ProblemSpec()
    seed: int = 0
    out: str | None = None
    # SMGD warm start that produces the PC root
    warm_start: MgdConfig = MgdConfig()
    explore: ExploreConfig | None = None
    smgd: SmgdBaselineConfig | None = None
    scalarization: ScalarizationConfig | None = None
    # wall_ms_cum in points.csv breaks byte-identical reruns, so it is opt-in
    timing: bool = False
    # ground-truth resolution for generational distance
    front_resolution: int = 200000

    def __post_init__(self):
        if self.method not in METHODS:
            raise ConfigError(f"unknown method {self.method!r}; choose from {', '.join(METHODS)}")
        if self.problem.name not in PROBLEM_NAMES:
            raise ConfigError(f"unknown problem {self.problem.name!r}")
        blocks = {
            "explore": self.explore is not None,
            "smgd": self.smgd is not None,
            "scalarization": self.scalarization is not None,
        }
        wanted = self.block_name
        extra = [name for name, present in blocks.items() if present and name != wanted]
        if extra:
            raise ConfigError(f"method {self.method!r} does not accept block(s) {extra}")
        # fill the method block with defaults so exactly one is present
        if not blocks[wanted]:
            default = {"explore": ExploreConfig, "smgd": SmgdBaselineConfig, "scalarization": ScalarizationConfig}
            object.__setattr__(self, wanted, default[wanted]())
        if self.method in PC_METHODS:
            mode, solver = PC_METHODS[self.method]
            object.__setattr__(
                self, "explore", dataclasses.replace(self.explore, hvp_mode=mode, solver=solver)
            )

    @property
    def block_name(self) -> str:
        if self.method == "smgd":
            return "smgd"
        if self.method == "scalarization":
            return "scalarization"
        return "explore"

    @property
    def is_pc(self) -> bool:
        return self.block_name == "explore"

    def to_dict(self) -> dict:
        return _plain(dataclasses.asdict(self))

    def digest(self) -> str:
        """Stable hash of every field that can change the results."""
        data = self.to_dict()
        data.pop("out", None)
        blob = json.dumps(data, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    def with_overrides(
        self,
        seed: int | None = None,
        max_iter: int | None = None,
        solver: str | None = None,
        hvp_mode: str | None = None,
        out: str | None = None,
    ) -> ExperimentConfig:
        """Apply command-line overrides; solver fields only exist for PC methods."""
        changes: dict[str, Any] = {}
        if seed is not None:
            changes["seed"] = seed
        if out is not None:
            changes["out"] = out
        explore = self.explore
        if any(v is not None for v in (max_iter, solver, hvp_mode)):
            if not self.is_pc:
                raise ConfigError(f"--max-iter/--solver/--hvp-mode need a PC method, not {self.method!r}")
            try:
                if max_iter is not None:
                    explore = dataclasses.replace(
                        explore, solver_config=dataclasses.replace(explore.solver_config, max_iter=max_iter)
                    )
                if solver is not None:
                    explore = dataclasses.replace(explore, solver=Solver(solver))
                if hvp_mode is not None:
                    explore = dataclasses.replace(explore, hvp_mode=HvpMode(hvp_mode))
            except ValueError as exc:
                raise ConfigError(str(exc)) from exc
            # an explicit solver or curvature choice turns a labelled method into plain "pc"
            if solver is not None or hvp_mode is not None:
                changes["method"] = "pc"
            changes["explore"] = explore
        return dataclasses.replace(self, **changes) if changes else self


def _plain(obj):
    """Enums to values and tuples to lists, recursively, for JSON echo."""
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, enum.Enum):
        return obj.value
    return obj


def _build(cls, data: dict, where: str):
    names = {f.name for f in dataclasses.fields(cls)}
    unknown = set(data) - names
    if unknown:
        raise ConfigError(f"[{where}] unknown key(s): {sorted(unknown)}")
    try:
        return cls(**data)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"[{where}] {exc}") from exc


def _explore_from(data: dict) -> ExploreConfig:
    data = dict(data)
    solver_data = data.pop("solver_config", {})
    for key in ("tol", "max_iter", "record_residuals"):
        if key in data:
            solver_data[key] = data.pop(key)
    if "beta_directions" in data:
        data["beta_directions"] = tuple(tuple(b) for b in data["beta_directions"])
    data["solver_config"] = _build(SolverConfig, solver_data, "explore.solver_config")
    return _build(ExploreConfig, data, "explore")


def config_from_dict(data: dict) -> ExperimentConfig:
    data = dict(data)
    if "method" not in data:
        raise ConfigError("config must name a method")
    kwargs: dict[str, Any] = {}
    problem = dict(data.pop("problem", {}))
    if "name" not in problem:
        raise ConfigError("[problem] must have a name")
    kwargs["problem"] = ProblemSpec(problem.pop("name"), problem)
    if "warm_start" in data:
        kwargs["warm_start"] = _build(MgdConfig, data.pop("warm_start"), "warm_start")
    if "explore" in data:
        block = data.pop("explore")
        if data["method"] in PC_METHODS and {"solver", "hvp_mode"} & set(block):
            raise ConfigError(f"method {data['method']!r} fixes solver and hvp_mode; use method = \"pc\"")
        kwargs["explore"] = _explore_from(block)
    if "smgd" in data:
        block = dict(data.pop("smgd"))
        mgd = {k: block.pop(k) for k in ("step_size", "stationarity_tol") if k in block}
        block["mgd"] = _build(MgdConfig, mgd, "smgd")
        kwargs["smgd"] = _build(SmgdBaselineConfig, block, "smgd")
    if "scalarization" in data:
        block = dict(data.pop("scalarization"))
        inner = {k: block.pop(k) for k in ("step_size", "max_iters", "stationarity_tol") if k in block}
        if inner:
            block["inner"] = _build(MgdConfig, {**dataclasses.asdict(ScalarizationConfig().inner), **inner},
                                    "scalarization")
        kwargs["scalarization"] = _build(ScalarizationConfig, block, "scalarization")
    kwargs.update(data)
    return _build(ExperimentConfig, kwargs, "top level")


def load_config(path: str | Path) -> ExperimentConfig:
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return config_from_dict(data)
