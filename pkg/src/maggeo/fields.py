"""Tensor fields on coordinate patches, evaluated as jets at points.

A field is a callable ``x -> Jet``.  Metric fields return the lowered
components g_{mu nu}; connection fields return K[lam, mu, nu] = K_lam^mu_nu.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import jets as J
from .clifford import Signature
from .jets import Jet

DEGENERACY_THRESHOLD = 1e-12


class DegenerateMetric(ValueError):
    pass


@dataclass(frozen=True)
class TensorField:
    n: int
    shape: tuple[int, ...]
    fn: Callable[[np.ndarray], Jet] = field(repr=False)
    name: str = ""

    def jet(self, x) -> Jet:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n,):
            raise ValueError(f"point has shape {x.shape}, expected ({self.n},)")
        out = self.fn(x)
        if not isinstance(out, Jet):
            out = J.tensor(out, self.n) if not isinstance(out, np.ndarray) else Jet.constant(out, self.n)
        if out.shape != self.shape or out.n != self.n:
            raise ValueError(f"field {self.name!r} produced shape {out.shape}, expected {self.shape}")
        if not np.all(np.isfinite(out.value)):
            raise ValueError(f"field {self.name!r} is not finite at {x.tolist()}")
        return out

    def at(self, x) -> np.ndarray:
        return self.jet(x).value


@dataclass(frozen=True)
class MetricField(TensorField):
    signature: Signature | None = None

    def jet(self, x) -> Jet:
        g = super().jet(x)
        if g.order < 2:
            raise ValueError("metric fields must provide second-order jets")
        check_metric(g.value, self.signature)
        return g

    def inverse_jet(self, x) -> Jet:
        return J.inv(self.jet(x))


def check_metric(g: np.ndarray, sig: Signature | None = None, where: str = "") -> None:
    if np.max(np.abs(g - g.T)) > 1e-12 * max(1.0, np.max(np.abs(g))):
        raise ValueError(f"metric is not symmetric{where}")
    d = np.linalg.det(g)
    if abs(d) < DEGENERACY_THRESHOLD:
        raise DegenerateMetric(f"degenerate metric (|det g| = {abs(d):.3g}){where}")
    if sig is not None:
        lam = np.linalg.eigvalsh(g)
        m = int(np.sum(lam > 0))
        if (m, len(lam) - m) != (sig.m, sig.k):
            raise ValueError(f"metric has signature ({m},{len(lam) - m}), declared {sig}{where}")


def metric_field(sig: Signature, fn: Callable[[list[Jet]], object], name: str = "") -> MetricField:
    """Metric from a function of the coordinate jets returning an n x n nested list."""
    n = sig.n
    return MetricField(n, (n, n), lambda x: J.tensor(fn(Jet.variables(x)), n), name, sig)


def flat_metric(sig: Signature) -> MetricField:
    eta = sig.metric().astype(float)
    return MetricField(sig.n, (sig.n, sig.n), lambda x: Jet.constant(eta, sig.n), f"flat{sig}", sig)


def connection_field(n: int, fn: Callable[[np.ndarray], Jet], name: str = "") -> TensorField:
    return TensorField(n, (n, n, n), fn, name)


def zero_connection(n: int) -> TensorField:
    return connection_field(n, lambda x: Jet.constant(np.zeros((n, n, n)), n), "zero")


def constant_connection(K: np.ndarray) -> TensorField:
    K = np.asarray(K, dtype=float)
    n = K.shape[0]
    return connection_field(n, lambda x: Jet.constant(K, n), "constant")


def levi_civita_field(metric: MetricField) -> TensorField:
    from .geometry import levi_civita

    return connection_field(metric.n, lambda x: levi_civita(metric.jet(x)), f"levi_civita({metric.name})")


def metric_connection_field(metric: MetricField, torsion: TensorField) -> TensorField:
    from .geometry import metric_connection_from

    def fn(x):
        return metric_connection_from(metric.jet(x), torsion.jet(x))

    return connection_field(metric.n, fn, f"metric_connection({metric.name})")


@dataclass(frozen=True)
class Polynomial:
    """Quadratic tensor polynomial c0 + c1.x + 1/2 x.c2.x about ``center``."""

    c0: np.ndarray
    c1: np.ndarray
    c2: np.ndarray
    center: np.ndarray

    def __call__(self, x) -> Jet:
        d = np.asarray(x, dtype=float) - self.center
        grad = self.c1 + self.c2 @ d
        value = self.c0 + self.c1 @ d + 0.5 * (self.c2 @ d) @ d
        return Jet(value, grad, self.c2)

    @classmethod
    def random(cls, shape, n, rng: np.random.Generator, scale=1.0, center=None):
        shape = tuple(shape)
        c2 = rng.normal(size=shape + (n, n))
        c2 = 0.5 * (c2 + np.swapaxes(c2, -1, -2))
        return cls(
            scale * rng.normal(size=shape),
            scale * rng.normal(size=shape + (n,)),
            scale * c2,
            np.zeros(n) if center is None else np.asarray(center, dtype=float),
        )


def random_metric(sig: Signature, rng: np.random.Generator, scale=0.1) -> MetricField:
    """eta + scale * (symmetric random quadratic); keeps the signature on the unit box for small ``scale``."""
    n = sig.n
    p = Polynomial.random((n, n), n, rng, scale)
    sym = Polynomial(
        0.5 * (p.c0 + p.c0.T),
        0.5 * (p.c1 + p.c1.transpose(1, 0, 2)),
        0.5 * (p.c2 + p.c2.transpose(1, 0, 2, 3)),
        p.center,
    )
    eta = sig.metric().astype(float)

    def fn(x):
        j = sym(x)
        return Jet(eta + j.value, j.grad, j.hess)

    return MetricField(n, (n, n), fn, "random_polynomial", sig)


def random_connection(n: int, rng: np.random.Generator, scale=1.0) -> TensorField:
    return connection_field(n, Polynomial.random((n, n, n), n, rng, scale), "random_polynomial")


def random_torsion(n: int, rng: np.random.Generator, scale=1.0) -> TensorField:
    """T_mu^nu_lam antisymmetric in mu <-> lam."""
    p = Polynomial.random((n, n, n), n, rng, scale)

    def fn(x):
        j = p(x)
        return j - j.transpose(2, 1, 0)

    return connection_field(n, fn, "random_torsion")


@dataclass(frozen=True)
class PolynomialVectorField:
    """tau^mu(x) up to cubic order with exact derivatives to third order."""

    c0: np.ndarray  # [mu]
    c1: np.ndarray  # [mu, a]
    c2: np.ndarray  # [mu, a, b], symmetric in a, b
    c3: np.ndarray  # [mu, a, b, c], fully symmetric in a, b, c

    @property
    def n(self) -> int:
        return self.c0.shape[0]

    @classmethod
    def zero(cls, n: int) -> "PolynomialVectorField":
        return cls(np.zeros(n), np.zeros((n, n)), np.zeros((n, n, n)), np.zeros((n, n, n, n)))

    @classmethod
    def constant(cls, v) -> "PolynomialVectorField":
        v = np.asarray(v, dtype=float)
        z = cls.zero(v.size)
        return cls(v, z.c1, z.c2, z.c3)

    @classmethod
    def linear(cls, a) -> "PolynomialVectorField":
        a = np.asarray(a, dtype=float)
        z = cls.zero(a.shape[0])
        return cls(z.c0, a, z.c2, z.c3)

    @classmethod
    def random(cls, n: int, rng: np.random.Generator, degree: int = 3, scale: float = 1.0) -> "PolynomialVectorField":
        z = cls.zero(n)
        parts = [scale * rng.normal(size=(n,) + (n,) * d) if d <= degree else getattr(z, f"c{d}") for d in range(4)]
        c2 = (parts[2] + parts[2].transpose(0, 2, 1)) / 2
        c3 = parts[3]
        c3 = sum(c3.transpose((0,) + p) for p in _PERMS3) / 6
        return cls(parts[0], parts[1], c2, c3)

    def value(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return (
            self.c0
            + self.c1 @ x
            + 0.5 * np.einsum("mab,a,b->m", self.c2, x, x)
            + np.einsum("mabc,a,b,c->m", self.c3, x, x, x) / 6
        )

    def jacobian_jet(self, x) -> Jet:
        """d_a tau^mu as a jet: value [mu, a], grad [mu, a, b], hess [mu, a, b, c]."""
        x = np.asarray(x, dtype=float)
        value = self.c1 + self.c2 @ x + 0.5 * np.einsum("mabc,b,c->ma", self.c3, x, x)
        grad = self.c2 + self.c3 @ x
        return Jet(value, grad, self.c3.copy())

    def jet(self, x) -> Jet:
        jac = self.jacobian_jet(x)
        return Jet(self.value(x), jac.value, jac.grad)


_PERMS3 = ((1, 2, 3), (1, 3, 2), (2, 1, 3), (2, 3, 1), (3, 1, 2), (3, 2, 1))


def ldl_coframe(g: Jet, sig: Signature | None = None) -> Jet:
    """Coframe jet h^a_mu (rows a) with g = h^T eta h, from an LDL^T factorization.

    Rows are ordered with positive pivots first.  Raises when a pivot is
    (numerically) zero; the eigendecomposition in :func:`spin.tetrad_from_metric`
    is the pointwise fallback without jets.
    """
    n = g.shape[0]
    L = [[None] * n for _ in range(n)]
    D = [None] * n
    scale = max(1.0, float(np.max(np.abs(g.value))))
    for j in range(n):
        dj = g[j, j]
        for k in range(j):
            dj = dj - L[j][k] * L[j][k] * D[k]
        if abs(float(dj.value)) < 1e-10 * scale:
            raise DegenerateMetric("vanishing pivot in LDL factorization of the metric")
        D[j] = dj
        L[j][j] = 1.0
        for i in range(j + 1, n):
            acc = g[i, j]
            for k in range(j):
                acc = acc - L[i][k] * L[j][k] * D[k]
            L[i][j] = acc / dj
    signs = [1.0 if float(d.value) > 0 else -1.0 for d in D]
    order = [a for a in range(n) if signs[a] > 0] + [a for a in range(n) if signs[a] < 0]
    if sig is not None and sum(s > 0 for s in signs) != sig.m:
        raise ValueError(f"metric signature does not match {sig}")
    rows = []
    for a in order:
        root = J.sqrt(D[a] * signs[a])
        rows.append([root * L[mu][a] if mu >= a else 0.0 for mu in range(n)])
    return J.tensor(rows, g.n)


@dataclass(frozen=True)
class TetradField:
    """Tetrad field of a metric field from the jet LDL^T factorization."""

    metric: MetricField

    def coframe_jet(self, x) -> Jet:
        return ldl_coframe(self.metric.jet(x), self.metric.signature)

    def frame_jet(self, x) -> Jet:
        """[a, mu] = h^mu_a."""
        return J.inv(self.coframe_jet(x)).transpose(1, 0)
