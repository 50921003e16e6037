"""Pipeline configuration: one JSON file drives both models end to end."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .dynamics import IntegratorConfig
from .errors import ConfigError
from .models import ModelParams, ThreePopParams, TwoPopParams
from .separatrix import DEFAULT_MAX_ITER, default_tol_bis

__all__ = ["PipelineConfig", "load_config", "BETA_RANGES"]

#: Validated shape-parameter ranges per model; values outside only warn.
BETA_RANGES = {"two_pop": (0.001, 0.04), "three_pop": (0.001, 0.03)}

_PARAM_FIELDS = {
    "two_pop": ("p", "r", "a", "c", "u", "z", "b"),
    "three_pop": ("p", "q", "r", "a", "c", "f", "g", "u", "v", "z", "b", "e"),
}

_TOP_KEYS = {
    "model", "params", "gamma", "n", "L", "H", "beta", "d", "overlap",
    "integrator", "bisection", "out_dir", "seed", "initial_conditions",
}


@dataclass(frozen=True)
class PipelineConfig:
    """Everything one run needs: model, domain, stage settings, output dir."""

    model: str
    params: ModelParams
    gamma: float
    n: int
    L: int
    H: Optional[int]
    beta: float
    d: int
    overlap: float = 1.5
    integrator: IntegratorConfig = IntegratorConfig()
    tol_bis: Optional[float] = None
    max_iter: int = DEFAULT_MAX_ITER
    out_dir: str = "out"
    seed: int = 0  # reserved; the core math is deterministic
    initial_conditions: tuple = ()

    def __post_init__(self):
        if self.model not in _PARAM_FIELDS:
            raise ConfigError(f"unknown model {self.model!r}")
        if self.gamma <= 0:
            raise ConfigError(f"gamma must be positive, got {self.gamma}")
        if self.n < 2:
            raise ConfigError(f"n must be >= 2, got {self.n}")
        if self.L < 1:
            raise ConfigError(f"L must be >= 1, got {self.L}")
        if self.model == "three_pop":
            if self.H is None or self.H < 1:
                raise ConfigError("three_pop requires H >= 1")
        if self.beta <= 0:
            raise ConfigError(f"beta must be positive, got {self.beta}")
        if self.d < 1:
            raise ConfigError(f"d must be >= 1, got {self.d}")
        if self.overlap <= 1.0:
            raise ConfigError(f"overlap must exceed 1, got {self.overlap}")
        if self.tol_bis is not None and self.tol_bis <= 0:
            raise ConfigError(f"tol_bis must be positive, got {self.tol_bis}")
        if self.max_iter < 1:
            raise ConfigError(f"max_iter must be >= 1, got {self.max_iter}")
        for x0 in self.initial_conditions:
            if len(x0) != self.dim:
                raise ConfigError(
                    f"initial condition {x0} has wrong dimension for {self.model}"
                )

    @property
    def dim(self) -> int:
        return 2 if self.model == "two_pop" else 3

    @property
    def effective_tol_bis(self) -> float:
        return self.tol_bis if self.tol_bis is not None else default_tol_bis(self.gamma)

    def beta_warnings(self) -> list:
        lo, hi = BETA_RANGES[self.model]
        if not (lo <= self.beta <= hi):
            return [
                f"beta={self.beta:g} is outside the validated range "
                f"[{lo:g}, {hi:g}] for {self.model}"
            ]
        return []

    @classmethod
    def from_dict(cls, data: dict) -> "PipelineConfig":
        if not isinstance(data, dict):
            raise ConfigError("config root must be a JSON object")
        unknown = set(data) - _TOP_KEYS
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        for key in ("model", "params", "gamma", "n", "L", "beta", "d"):
            if key not in data:
                raise ConfigError(f"missing required config key {key!r}")
        model = data["model"]
        if model not in _PARAM_FIELDS:
            raise ConfigError(f"unknown model {model!r}")
        fields = _PARAM_FIELDS[model]
        raw_params = data["params"]
        if set(raw_params) != set(fields):
            raise ConfigError(
                f"{model} params must be exactly {sorted(fields)}, "
                f"got {sorted(raw_params)}"
            )
        try:
            params = (TwoPopParams if model == "two_pop" else ThreePopParams)(
                **{k: float(raw_params[k]) for k in fields}
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        integ = data.get("integrator", {})
        if not isinstance(integ, dict):
            raise ConfigError("integrator must be an object")
        try:
            integrator = IntegratorConfig(
                step=float(integ.get("step", 0.01)),
                abs_tol=float(integ.get("abs_tol", 1e-8)),
                rel_tol=float(integ.get("rel_tol", 1e-8)),
                t_max=float(integ.get("t_max", 1000.0)),
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        bis = data.get("bisection", {})
        if not isinstance(bis, dict):
            raise ConfigError("bisection must be an object")
        tol_bis = bis.get("tol_bis")
        return cls(
            model=model,
            params=params,
            gamma=float(data["gamma"]),
            n=int(data["n"]),
            L=int(data["L"]),
            H=None if data.get("H") is None else int(data["H"]),
            beta=float(data["beta"]),
            d=int(data["d"]),
            overlap=float(data.get("overlap", 1.5)),
            integrator=integrator,
            tol_bis=None if tol_bis is None else float(tol_bis),
            max_iter=int(bis.get("max_iter", DEFAULT_MAX_ITER)),
            out_dir=str(data.get("out_dir", "out")),
            seed=int(data.get("seed", 0)),
            initial_conditions=tuple(
                tuple(float(v) for v in x0)
                for x0 in data.get("initial_conditions", ())
            ),
        )

    def to_dict(self) -> dict:
        return {
            "model": self.model,
            "params": {
                k: getattr(self.params, k) for k in _PARAM_FIELDS[self.model]
            },
            "gamma": self.gamma,
            "n": self.n,
            "L": self.L,
            "H": self.H,
            "beta": self.beta,
            "d": self.d,
            "overlap": self.overlap,
            "integrator": {
                "step": self.integrator.step,
                "abs_tol": self.integrator.abs_tol,
                "rel_tol": self.integrator.rel_tol,
                "t_max": self.integrator.t_max,
            },
            "bisection": {"tol_bis": self.tol_bis, "max_iter": self.max_iter},
            "out_dir": self.out_dir,
            "seed": self.seed,
            "initial_conditions": [list(x0) for x0 in self.initial_conditions],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def sha256(self) -> str:
        canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode()).hexdigest()


def load_config(path) -> PipelineConfig:
    """Parse and validate a JSON config file."""
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    return PipelineConfig.from_dict(data)
