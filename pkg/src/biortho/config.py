"""Strict JSON scenario configuration.

Top-level keys::

    {
      "scenario": "products",            # see ``biortho list``
      "lattice": {"n": 16, "dx": 1.0},
      "units": {"hbar": 1, "c": 1, "eps0": 1, "mass": 1},   # optional
      "seed": 42,                        # optional, default 0
      "params": {...},                   # optional, scenario specific
      "output_dir": "out"                # optional, default "out"
    }

Unknown keys at any level are rejected.  Photon and emission scenarios always
run on a massless lattice regardless of ``units.mass``.
"""

from __future__ import annotations

import json
import re
from pathlib import Path
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

__all__ = ["ConfigError", "ScenarioConfig", "load_config", "parse_config", "PARAM_MODELS"]


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending key or line."""


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class LatticeCfg(_Strict):
    n: int = Field(16, ge=8)
    dx: float = Field(1.0, gt=0)

    @model_validator(mode="after")
    def _pow2(self):
        if self.n & (self.n - 1):
            raise ValueError(f"lattice.n must be a power of two, got {self.n}")
        return self


class UnitsCfg(_Strict):
    hbar: float = Field(1.0, gt=0)
    c: float = Field(1.0, gt=0)
    eps0: float = Field(1.0, gt=0)
    mass: float = Field(1.0, ge=0)


class ProductsParams(_Strict):
    n_fields: int = Field(100, ge=1)
    n_pairs: int = Field(50, ge=1)
    n_times: int = Field(21, ge=2)
    omega_t_max: float = Field(20.0, gt=0)
    continuity_dt: float = Field(0.01, gt=0)


class PositionParams(_Strict):
    block: int = Field(3, ge=1)
    n_random: int = Field(20, ge=1)
    t: float = 0.0
    nw_radius_cells: float = Field(4.0, gt=0)


class PhotonParams(_Strict):
    block: int = Field(2, ge=1)
    n_random: int = Field(5, ge=1)
    evolve_dt: float = 2.5
    t: float = 0.0


class EmitParams(_Strict):
    omega0: float = Field(1.0, gt=0)
    gamma: float = Field(0.0, ge=0)
    omega_ls: float = 0.0
    dipole: list[float] = Field(default_factory=lambda: [0.0, 0.0, 1.0], min_length=3, max_length=3)
    t_list: list[float] = Field(default_factory=lambda: [10.0, 50.0, 200.0], min_length=1)
    profile_t: float = Field(6.0, gt=0)
    profile_omega0: float = Field(2.0, gt=0)
    sigma_cells: float = Field(2.0, gt=0)


class PropagatorParams(_Strict):
    kinds: list[Literal["wightman_plus", "wightman_minus", "commutator", "hadamard"]] = Field(
        default_factory=lambda: ["wightman_plus", "wightman_minus", "commutator", "hadamard"])
    masses: list[float] = Field(default_factory=lambda: [0.0, 1.0], min_length=1)
    sigma: float = Field(0.3, ge=0)
    n_points: int = Field(50, ge=0)
    points: Optional[list[tuple[float, float]]] = None
    t_range: float = Field(3.0, gt=0)
    r_max: float = Field(5.0, gt=0)

    @model_validator(mode="after")
    def _sigma_required(self):
        pointwise = self.n_points > 0 or bool(self.points)
        if pointwise and self.sigma <= 0:
            raise ValueError("params.sigma must be > 0 for pointwise propagator requests")
        if self.points and any(r < 0 for _, r in self.points):
            raise ValueError("params.points: r must be >= 0")
        return self


class HegerfeldtParams(_Strict):
    mass: float = Field(0.0, ge=0)
    sigma: float = Field(0.5, gt=0)
    box: Optional[float] = Field(None, gt=0)
    ct_fractions: list[float] = Field(default_factory=lambda: [0.1, 0.2, 0.3], min_length=1)
    tail_fraction: float = Field(0.05, gt=0)
    n_r: int = Field(4001, ge=64)
    crossval_t: float = Field(3.0, gt=0)


class MicrocausalityParams(_Strict):
    t: float = 0.0
    n_pairs: int = Field(10, ge=1)


PARAM_MODELS = {
    "products": ProductsParams,
    "position": PositionParams,
    "photon": PhotonParams,
    "emit": EmitParams,
    "propagator": PropagatorParams,
    "hegerfeldt": HegerfeldtParams,
    "microcausality": MicrocausalityParams,
}


class ScenarioConfig(_Strict):
    scenario: Literal["products", "position", "photon", "emit", "propagator",
                      "hegerfeldt", "microcausality"]
    lattice: LatticeCfg = Field(default_factory=LatticeCfg)
    units: UnitsCfg = Field(default_factory=UnitsCfg)
    seed: int = 0
    params: dict = Field(default_factory=dict)
    output_dir: str = "out"

    def typed_params(self):
        return PARAM_MODELS[self.scenario].model_validate(self.params)


def _locate(text: str, key: str) -> str:
    m = re.search(r'"%s"\s*:' % re.escape(str(key)), text)
    if not m:
        return ""
    return f" (line {text.count(chr(10), 0, m.start()) + 1})"


def _describe(err: ValidationError, text: str, prefix: str = "") -> str:
    msgs = []
    for e in err.errors():
        loc = ".".join(str(p) for p in e["loc"])
        name = prefix + loc if loc else prefix.rstrip(".") or "config"
        where = _locate(text, e["loc"][-1]) if e["loc"] else ""
        if e["type"] == "extra_forbidden":
            msgs.append(f"unknown key '{name}'{where}")
        else:
            msgs.append(f"{name}: {e['msg']}{where}")
    return "; ".join(msgs)


def parse_config(text: str, overrides: dict | None = None) -> tuple[ScenarioConfig, BaseModel]:
    """Parse and validate JSON text; returns (config, typed scenario params)."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    raw.update({k: v for k, v in (overrides or {}).items() if v is not None})
    try:
        cfg = ScenarioConfig.model_validate(raw)
    except ValidationError as exc:
        raise ConfigError(_describe(exc, text)) from None
    try:
        params = cfg.typed_params()
    except ValidationError as exc:
        raise ConfigError(_describe(exc, text, "params.")) from None
    return cfg, params


def load_config(path, overrides: dict | None = None):
    text = Path(path).read_text()
    return parse_config(text, overrides)
