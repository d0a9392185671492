"""Metric presets and expression-table fields."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from . import expr as X
from . import jets as J
from .clifford import Signature
from .fields import MetricField, TensorField, connection_field
from .jets import Jet


def metric_from_table(table, sig: Signature, scope: X.Scope, params: Mapping[str, float], name: str = "") -> MetricField:
    n = sig.n
    params = dict(params)
    X.bind(scope, [0.0] * n, params)  # fail early on missing parameters

    def fn(x):
        env = X.bind(scope, Jet.variables(x), params)
        return J.tensor(X.evaluate_table(table, env), n)

    return MetricField(n, (n, n), fn, name, sig)


def connection_from_table(table, n: int, scope: X.Scope, params: Mapping[str, float], name: str = "") -> TensorField:
    params = dict(params)
    X.bind(scope, [0.0] * n, params)

    def fn(x):
        env = X.bind(scope, Jet.variables(x), params)
        return J.tensor(X.evaluate_table(table, env), n)

    return connection_field(n, fn, name)


@dataclass(frozen=True)
class Preset:
    name: str
    dimension: int | None  # None: taken from the requested signature
    signature: Signature | None
    diagonal: Callable[[Signature], list[str]]
    defaults: Mapping[str, float] = field(default_factory=dict)
    box: Callable[[Mapping[str, float], int], list[tuple[float, float]]] = None
    expected_einstein: Callable[[Mapping[str, float]], float] = lambda p: 0.0
    description: str = ""

    def resolve_signature(self, requested: Signature | None) -> Signature:
        if self.signature is None:
            if requested is None:
                raise ValueError(f"preset {self.name!r} needs --signature")
            return requested
        if requested is not None and requested != self.signature:
            raise ValueError(f"preset {self.name!r} has signature {self.signature}, not {requested}")
        return self.signature

    def parameters(self, given: Mapping[str, float]) -> dict[str, float]:
        unknown = set(given) - set(self.defaults)
        if unknown:
            raise ValueError(f"preset {self.name!r} has no parameters {sorted(unknown)}; known: {sorted(self.defaults)}")
        params = {**self.defaults, **given}
        for k, v in params.items():
            if not math.isfinite(v) or v <= 0:
                raise ValueError(f"parameter {k} must be positive, got {v}")
        return params

    def metric(self, sig: Signature | None = None, params: Mapping[str, float] | None = None) -> MetricField:
        sig = self.resolve_signature(sig)
        params = self.parameters(params or {})
        scope = X.Scope.standard(sig.n, list(params))
        table = X.parse_metric_table(self.diagonal(sig), sig.n, scope)
        return metric_from_table(table, sig, scope, params, self.name)

    def sample(self, sig: Signature, params: Mapping[str, float], count: int, rng: np.random.Generator) -> np.ndarray:
        bounds = np.array(self.box(self.parameters(params), sig.n))
        return rng.uniform(bounds[:, 0], bounds[:, 1], size=(count, sig.n))


def _flat_box(p, n):
    return [(-1.0, 1.0)] * n


def _sphere_box(p, n):
    return [(0.3, math.pi - 0.3), (0.0, 2 * math.pi)]


def _schwarzschild_box(p, n):
    M = p["M"]
    return [(-1.0, 1.0), (3.0 * M, 10.0 * M), (0.3, math.pi - 0.3), (0.0, 2 * math.pi)]


def _de_sitter_box(p, n):
    H = p["H"]
    return [(-1.0, 1.0), (0.1 / H, 0.8 / H), (0.3, math.pi - 0.3), (0.0, 2 * math.pi)]


PRESETS: dict[str, Preset] = {
    "flat": Preset(
        "flat",
        None,
        None,
        lambda sig: ["1" if s > 0 else "-1" for s in sig.eta],
        box=_flat_box,
        description="constant diagonal eta of any signature",
    ),
    "sphere": Preset(
        "sphere",
        2,
        Signature(2, 0),
        lambda sig: ["1", "sin(theta)^2"],
        box=_sphere_box,
        description="unit 2-sphere in (theta, phi)",
    ),
    "schwarzschild": Preset(
        "schwarzschild",
        4,
        Signature(1, 3),
        lambda sig: ["1 - 2*M/r", "-1/(1 - 2*M/r)", "-r^2", "-r^2*sin(theta)^2"],
        {"M": 1.0},
        _schwarzschild_box,
        description="exterior Schwarzschild in (t, r, theta, phi), r in [3M, 10M]",
    ),
    "de_sitter": Preset(
        "de_sitter",
        4,
        Signature(1, 3),
        lambda sig: ["1 - H^2*r^2", "-1/(1 - H^2*r^2)", "-r^2", "-r^2*sin(theta)^2"],
        {"H": 1.0},
        _de_sitter_box,
        # Levi-Civita residual E_{ab} = -3 H^2 sigma_{ab} in this sign convention
        lambda p: -3.0 * p["H"] ** 2,
        "static de Sitter patch, r < 0.8/H",
    ),
}


def get_preset(name: str) -> Preset:
    try:
        return PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown metric preset {name!r}; available: {', '.join(PRESETS)}") from None
