"""Forward-mode second-order jets of tensor-valued functions.

A :class:`Jet` carries the value of a tensor together with its gradient and
Hessian with respect to ``n`` coordinates.  Derivative axes are always
trailing: ``grad[..., lam]`` is d_lam of ``value[...]`` and
``hess[..., lam, mu]`` is d_lam d_mu.

A jet whose ``hess`` is ``None`` is of order 1.  This is what one gets by
differentiating an order-2 jet (:meth:`Jet.partial`), e.g. connection
coefficients built from first derivatives of a metric.  Mixing orders
truncates to the lower one.

All functions here accept plain ndarrays/floats wherever a jet is accepted
and treat them as constants, so tensor formulas can be written once and run
on either.
"""
from __future__ import annotations

import math
import string
from typing import Sequence

import numpy as np


class Jet:
    __slots__ = ("value", "grad", "hess")
    __array_ufunc__ = None

    def __init__(self, value, grad, hess=None):
        self.value = np.asarray(value, dtype=float)
        self.grad = np.asarray(grad, dtype=float)
        if self.grad.shape[:-1] != self.value.shape:
            raise ValueError(f"gradient shape {self.grad.shape} does not extend value shape {self.value.shape}")
        if hess is not None:
            hess = np.asarray(hess, dtype=float)
            if hess.shape != self.grad.shape + (self.n,):
                raise ValueError(f"hessian shape {hess.shape} does not match gradient {self.grad.shape}")
            # accumulation order can differ between (y, z) and (z, y); averaging makes symmetry exact
            hess = 0.5 * (hess + np.swapaxes(hess, -1, -2))
        self.hess = hess

    @property
    def n(self) -> int:
        return self.grad.shape[-1]

    @property
    def order(self) -> int:
        return 1 if self.hess is None else 2

    @property
    def shape(self) -> tuple[int, ...]:
        return self.value.shape

    @property
    def ndim(self) -> int:
        return self.value.ndim

    @classmethod
    def constant(cls, value, n: int, order: int = 2) -> "Jet":
        value = np.asarray(value, dtype=float)
        grad = np.zeros(value.shape + (n,))
        hess = np.zeros(value.shape + (n, n)) if order == 2 else None
        return cls(value, grad, hess)

    @classmethod
    def variables(cls, x: Sequence[float]) -> list["Jet"]:
        """Coordinate functions x^0..x^{n-1} as scalar jets at the point ``x``."""
        x = np.asarray(x, dtype=float)
        n = x.size
        eye = np.eye(n)
        zero = np.zeros((n, n))
        return [cls(x[i], eye[i], zero) for i in range(n)]

    def partial(self) -> "Jet":
        """First derivatives as an order-1 jet of shape ``value.shape + (n,)``."""
        if self.hess is None:
            raise ValueError("an order-1 jet has no derivative jet")
        return Jet(self.grad, self.hess)

    def truncate(self) -> "Jet":
        return Jet(self.value, self.grad)

    def __getitem__(self, idx) -> "Jet":
        if not isinstance(idx, tuple):
            idx = (idx,)
        if any(i is Ellipsis or i is None for i in idx):
            raise IndexError("jets support integer and slice indexing only")
        return Jet(self.value[idx], self.grad[idx], None if self.hess is None else self.hess[idx])

    def __repr__(self):
        return f"Jet(shape={self.shape}, n={self.n}, order={self.order})"

    # arithmetic
    def __neg__(self):
        return Jet(-self.value, -self.grad, None if self.hess is None else -self.hess)

    def __pos__(self):
        return self

    def __add__(self, other):
        a, b = _coerce(self, other)
        hess = None if a.hess is None or b.hess is None else a.hess + b.hess
        return Jet(a.value + b.value, a.grad + b.grad, hess)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-_as_jet(other, self))

    def __rsub__(self, other):
        return _as_jet(other, self) + (-self)

    def __mul__(self, other):
        a, b = _coerce(self, other)
        av, bv = a.value[..., None], b.value[..., None]
        grad = av * b.grad + a.grad * bv
        hess = None
        if a.hess is not None and b.hess is not None:
            ag, bg = a.grad, b.grad
            hess = (
                av[..., None] * b.hess
                + a.hess * bv[..., None]
                + ag[..., :, None] * bg[..., None, :]
                + ag[..., None, :] * bg[..., :, None]
            )
        return Jet(a.value * b.value, grad, hess)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self * reciprocal(_as_jet(other, self))

    def __rtruediv__(self, other):
        return _as_jet(other, self) * reciprocal(self)

    def __pow__(self, p):
        if isinstance(p, Jet):
            raise TypeError("jet exponents are not supported")
        return power(self, p)

    def transpose(self, *axes) -> "Jet":
        axes = tuple(axes) or tuple(reversed(range(self.ndim)))
        k = self.ndim
        g_axes = axes + (k,)
        h_axes = axes + (k, k + 1)
        return Jet(
            self.value.transpose(axes),
            self.grad.transpose(g_axes),
            None if self.hess is None else self.hess.transpose(h_axes),
        )


def _as_jet(x, like: Jet) -> Jet:
    if isinstance(x, Jet):
        return x
    return Jet.constant(x, like.n, like.order)


def _coerce(a, b) -> tuple[Jet, Jet]:
    like = a if isinstance(a, Jet) else b
    a, b = _as_jet(a, like), _as_jet(b, like)
    if a.n != b.n:
        raise ValueError("jets over different numbers of coordinates")
    shape = np.broadcast_shapes(a.shape, b.shape)
    return _broadcast(a, shape), _broadcast(b, shape)


def _broadcast(j: Jet, shape) -> Jet:
    if j.shape == shape:
        return j
    n = j.n
    return Jet(
        np.broadcast_to(j.value, shape),
        np.broadcast_to(j.grad, shape + (n,)),
        None if j.hess is None else np.broadcast_to(j.hess, shape + (n, n)),
    )


def compose(f: Jet, v, d1, d2) -> Jet:
    """Chain rule for an elementwise function with value ``v``, first and second derivative ``d1``, ``d2``."""
    d1 = np.asarray(d1, dtype=float)
    grad = d1[..., None] * f.grad
    hess = None
    if f.hess is not None:
        d2 = np.asarray(d2, dtype=float)
        hess = d2[..., None, None] * f.grad[..., :, None] * f.grad[..., None, :] + d1[..., None, None] * f.hess
    return Jet(v, grad, hess)


def reciprocal(f):
    if not isinstance(f, Jet):
        return 1.0 / np.asarray(f, dtype=float)
    v = f.value
    if np.any(v == 0):
        raise ZeroDivisionError("division by a jet with zero value")
    inv = 1.0 / v
    return compose(f, inv, -inv * inv, 2 * inv * inv * inv)


def power(f, p):
    if not isinstance(f, Jet):
        return np.power(np.asarray(f, dtype=float), p)
    if p == 0:
        return Jet.constant(np.ones(f.shape), f.n, f.order)
    if p == 1:
        return f
    p_int = float(p).is_integer()
    v = f.value
    if not p_int and np.any(v < 0):
        raise ValueError("non-integer power of a negative value")
    if p_int:
        p = int(p)
    val = v**p
    d1 = p * v ** (p - 1) if (p_int and p - 1 >= 0) or not p_int else p * np.power(v, float(p - 1))
    d2 = p * (p - 1) * (v ** (p - 2) if (p_int and p - 2 >= 0) or not p_int else np.power(v, float(p - 2)))
    return compose(f, val, d1, d2)


def _unary(name, fn, d1, d2):
    def wrapped(f):
        if not isinstance(f, Jet):
            return fn(np.asarray(f, dtype=float))
        v = f.value
        return compose(f, fn(v), d1(v), d2(v))

    wrapped.__name__ = name
    return wrapped


def _check_positive(name):
    def guard(v):
        if np.any(v <= 0):
            raise ValueError(f"{name} of a non-positive value")
        return v

    return guard


sin = _unary("sin", np.sin, np.cos, lambda v: -np.sin(v))
cos = _unary("cos", np.cos, lambda v: -np.sin(v), lambda v: -np.cos(v))
tan = _unary("tan", np.tan, lambda v: 1 / np.cos(v) ** 2, lambda v: 2 * np.tan(v) / np.cos(v) ** 2)
exp = _unary("exp", np.exp, np.exp, np.exp)
sinh = _unary("sinh", np.sinh, np.cosh, np.sinh)
cosh = _unary("cosh", np.cosh, np.sinh, np.cosh)
log = _unary(
    "log",
    lambda v: np.log(_check_positive("log")(v)),
    lambda v: 1 / v,
    lambda v: -1 / v**2,
)
sqrt = _unary(
    "sqrt",
    lambda v: np.sqrt(_check_positive("sqrt")(v)),
    lambda v: 0.5 / np.sqrt(v),
    lambda v: -0.25 / v**1.5,
)

FUNCTIONS = {"sin": sin, "cos": cos, "tan": tan, "exp": exp, "log": log, "sqrt": sqrt, "sinh": sinh, "cosh": cosh}
FLOAT_FUNCTIONS = {
    "sin": math.sin,
    "cos": math.cos,
    "tan": math.tan,
    "exp": math.exp,
    "log": math.log,
    "sqrt": math.sqrt,
    "sinh": math.sinh,
    "cosh": math.cosh,
}


def _spare_letters(subscripts: str, count: int) -> list[str]:
    free = [c for c in string.ascii_letters if c not in subscripts]
    return free[:count]


def einsum(subscripts: str, *operands):
    """``np.einsum`` with the Leibniz rule applied to every jet operand.

    ``subscripts`` must name the output explicitly (``'ij,jk->ik'``).
    Returns an ndarray when no operand is a jet.
    """
    if "->" not in subscripts:
        raise ValueError("einsum subscripts must contain an explicit output")
    inputs, output = subscripts.replace(" ", "").split("->")
    terms = inputs.split(",")
    if len(terms) != len(operands):
        raise ValueError("operand count does not match subscripts")
    jet_ids = [i for i, op in enumerate(operands) if isinstance(op, Jet)]
    values = [op.value if isinstance(op, Jet) else np.asarray(op, dtype=float) for op in operands]
    value = np.einsum(subscripts, *values)
    if not jet_ids:
        return value
    n = operands[jet_ids[0]].n
    order = min(operands[i].order for i in jet_ids)
    y, z = _spare_letters(subscripts, 2)

    def spec(extra: dict[int, str], out_extra: str) -> str:
        return ",".join(t + extra.get(i, "") for i, t in enumerate(terms)) + "->" + output + out_extra

    grad = np.zeros(value.shape + (n,))
    for i in jet_ids:
        ops = list(values)
        ops[i] = operands[i].grad
        grad = grad + np.einsum(spec({i: z}, z), *ops)
    hess = None
    if order == 2:
        hess = np.zeros(value.shape + (n, n))
        for i in jet_ids:
            ops = list(values)
            ops[i] = operands[i].hess
            hess = hess + np.einsum(spec({i: y + z}, y + z), *ops)
            for j in jet_ids:
                if j == i:
                    continue
                ops = list(values)
                ops[i] = operands[i].grad
                ops[j] = operands[j].grad
                hess = hess + np.einsum(spec({i: y, j: z}, y + z), *ops)
    return Jet(value, grad, hess)


def inv(a):
    """Inverse of a square matrix jet (last two value axes)."""
    if not isinstance(a, Jet):
        return np.linalg.inv(a)
    g = np.linalg.inv(a.value)
    d = a.grad
    gd = np.einsum("...ij,...jkz->...ikz", g, d)
    grad = -np.einsum("...ikz,...kl->...ilz", gd, g)
    hess = None
    if a.hess is not None:
        gdg = -grad  # G D_z G
        hess = (
            np.einsum("...ijy,...jlz->...ilyz", gd, gdg)
            + np.einsum("...ijz,...jly->...ilyz", gd, gdg)
            - np.einsum("...ij,...jkyz,...kl->...ilyz", g, a.hess, g)
        )
    return Jet(g, grad, hess)


def det(a):
    """Determinant of a square matrix jet."""
    if not isinstance(a, Jet):
        return np.linalg.det(a)
    val = np.linalg.det(a.value)
    g = np.linalg.inv(a.value)
    gd = np.einsum("...ij,...jkz->...ikz", g, a.grad)
    tr = np.einsum("...iiz->...z", gd)
    grad = val[..., None] * tr
    hess = None
    if a.hess is not None:
        cross = np.einsum("...ijy,...jiz->...yz", gd, gd)
        second = np.einsum("...ij,...jiyz->...yz", g, a.hess)
        hess = val[..., None, None] * (tr[..., :, None] * tr[..., None, :] - cross + second)
    return Jet(val, grad, hess)


def stack(items: Sequence, axis: int = 0, n: int | None = None):
    """Stack jets (and constants) along a new value axis."""
    if n is None:
        jets = [j for j in items if isinstance(j, Jet)]
        if not jets:
            return np.stack([np.asarray(i, dtype=float) for i in items], axis=axis)
        n, order = jets[0].n, min(j.order for j in jets)
    else:
        order = min((j.order for j in items if isinstance(j, Jet)), default=2)
    if axis < 0:
        raise ValueError("stack axis must be non-negative")
    jets = [_as_jet(j, Jet.constant(0.0, n, order)) for j in items]
    hess = None if order == 1 else np.stack([j.hess for j in jets], axis=axis)
    return Jet(np.stack([j.value for j in jets], axis=axis), np.stack([j.grad for j in jets], axis=axis), hess)


def tensor(nested, n: int):
    """Build a jet from a nested list of scalar jets and numbers."""
    if isinstance(nested, (list, tuple)):
        return stack([tensor(item, n) for item in nested], axis=0, n=n)
    if isinstance(nested, Jet):
        return nested
    return Jet.constant(float(nested), n)


def value_of(x):
    return x.value if isinstance(x, Jet) else np.asarray(x, dtype=float)
