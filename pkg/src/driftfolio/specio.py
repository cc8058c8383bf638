"""Problem-spec files: a YAML document with market/profile/uncertainty sections.

Schema (all keys required unless noted)::

    market:
      d: 2            # number of risky assets
      m: 2            # Brownian dimension, m >= d
      r: 0.0          # risk-free rate
      T: 1.0          # horizon
      x0: 1.0         # initial wealth
      sigma:          # d rows of m entries
        - [1.0, 0.0]
        - [0.0, 1.0]
    profile:
      gamma: 0.0
      h: 1.0
    uncertainty:
      nu: [0.3, 0.3]
      Gamma:
        - [1.0, 0.0]
        - [0.0, 1.0]
      kappa: 0.1

Validation failures raise SpecError carrying the offending field path.
"""
from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np
import yaml

from .errors import SpecError, ValidationError
from .model import InvestorProfile, MarketModel, UncertaintySet

EXAMPLE_8ASSET = "example-8asset"


@dataclass(frozen=True)
class ProblemSpec:
    market: MarketModel
    profile: InvestorProfile
    uncertainty: UncertaintySet


def _section(doc, name):
    if not isinstance(doc, dict) or name not in doc:
        raise SpecError(name, "missing section")
    sec = doc[name]
    if not isinstance(sec, dict):
        raise SpecError(name, "must be a mapping")
    return sec


def _get(sec, section, key):
    if key not in sec:
        raise SpecError(f"{section}.{key}", "missing field")
    return sec[key]


def _build(cls, section, **kwargs):
    try:
        return cls(**kwargs)
    except ValidationError as exc:
        raise SpecError(section, str(exc)) from None


def problem_spec_from_dict(doc, gamma_override: float | None = None) -> ProblemSpec:
    mk = _section(doc, "market")
    market = _build(
        MarketModel,
        "market",
        d=int(_get(mk, "market", "d")),
        m=int(_get(mk, "market", "m")),
        r=float(_get(mk, "market", "r")),
        sigma=np.array(_get(mk, "market", "sigma"), dtype=float),
        T=float(_get(mk, "market", "T")),
        x0=float(_get(mk, "market", "x0")),
    )
    pr = _section(doc, "profile")
    gamma = float(_get(pr, "profile", "gamma"))
    if gamma_override is not None:
        gamma = float(gamma_override)
    profile = _build(
        InvestorProfile, "profile", gamma=gamma, h=float(_get(pr, "profile", "h"))
    )
    un = _section(doc, "uncertainty")
    uncertainty = _build(
        UncertaintySet,
        "uncertainty",
        nu=np.array(_get(un, "uncertainty", "nu"), dtype=float),
        Gamma=np.array(_get(un, "uncertainty", "Gamma"), dtype=float),
        kappa=float(_get(un, "uncertainty", "kappa")),
    )
    if uncertainty.d != market.d:
        raise SpecError("uncertainty.nu", f"dimension {uncertainty.d} != market.d {market.d}")
    return ProblemSpec(market=market, profile=profile, uncertainty=uncertainty)


def bundled_spec_path(name: str = EXAMPLE_8ASSET) -> Path:
    """Filesystem path of a bundled spec (currently only the 8-asset example)."""
    if name != EXAMPLE_8ASSET:
        raise SpecError("spec", f"unknown bundled spec {name!r}")
    return Path(str(resources.files("driftfolio").joinpath("data/example_8asset.yaml")))


def load_problem_spec(path, gamma_override: float | None = None) -> ProblemSpec:
    """Load a spec file; the literal name 'example-8asset' selects the bundled one."""
    if str(path) == EXAMPLE_8ASSET:
        path = bundled_spec_path()
    path = Path(path)
    if not path.exists():
        raise SpecError("spec", f"file not found: {path}")
    try:
        doc = yaml.safe_load(path.read_text())
    except yaml.YAMLError as exc:
        raise SpecError("spec", f"not valid YAML: {exc}") from None
    return problem_spec_from_dict(doc, gamma_override=gamma_override)
