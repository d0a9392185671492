"""Real and complexified Clifford algebras over a diagonal pseudo-Euclidean space.

Elements are sparse maps from blade bitmasks to scalars.  Bit ``i`` of a mask
stands for the generator ``v^{i+1}``; a blade is the product of its generators
in increasing order.  The first ``m`` generators square to ``+e`` and the
remaining ``k`` to ``-e``.

Integer (or ``Fraction``) coefficients stay exact under every ring operation
because all structure constants are ``+1`` or ``-1``.
"""
from __future__ import annotations

import functools
import numbers
from fractions import Fraction
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy.linalg import expm

MAX_DIMENSION = 8
NULL_VECTOR_THRESHOLD = 1e-9


class SignatureMismatch(ValueError):
    pass


@dataclass(frozen=True)
class Signature:
    """Counts of positive (``m``) and negative (``k``) diagonal entries of eta."""

    m: int
    k: int

    def __post_init__(self):
        if self.m < 0 or self.k < 0 or self.m + self.k < 1:
            raise ValueError(f"invalid signature ({self.m},{self.k})")
        if self.m + self.k > MAX_DIMENSION:
            raise ValueError(f"dimension {self.m + self.k} exceeds supported maximum {MAX_DIMENSION}")

    @property
    def n(self) -> int:
        return self.m + self.k

    @property
    def eta(self) -> tuple[int, ...]:
        return (1,) * self.m + (-1,) * self.k

    @property
    def negative_mask(self) -> int:
        return ((1 << self.k) - 1) << self.m

    def metric(self) -> np.ndarray:
        return np.diag(np.array(self.eta, dtype=float))

    @classmethod
    def parse(cls, text: str) -> "Signature":
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 2:
            raise ValueError(f"signature must look like 'm,k', got {text!r}")
        return cls(int(parts[0]), int(parts[1]))

    def __str__(self) -> str:
        return f"({self.m},{self.k})"


def blade_sign(a: int, b: int, negative_mask: int = 0) -> int:
    """Sign of ``blade(a) * blade(b)`` relative to ``blade(a ^ b)``."""
    swaps = 0
    x = a >> 1
    while x:
        swaps += bin(x & b).count("1")
        x >>= 1
    swaps += bin(a & b & negative_mask).count("1")
    return -1 if swaps & 1 else 1


@functools.lru_cache(maxsize=None)
def sign_table(sig: Signature) -> np.ndarray:
    size = 1 << sig.n
    neg = sig.negative_mask
    table = np.empty((size, size), dtype=np.int8)
    for a in range(size):
        for b in range(size):
            table[a, b] = blade_sign(a, b, neg)
    table.setflags(write=False)
    return table


def grade_of(mask: int) -> int:
    return bin(mask).count("1")


def _clean(value):
    if isinstance(value, complex) and value.imag == 0:
        value = value.real
    if isinstance(value, np.generic):
        value = value.item()
    return value


class Multivector:
    """Sparse element of Cl(m, k), optionally with complex coefficients."""

    __slots__ = ("signature", "_coeffs")

    def __init__(self, signature: Signature, coeffs: Mapping[int, numbers.Number] | None = None):
        size = 1 << signature.n
        clean = {}
        for mask, c in (coeffs or {}).items():
            if not 0 <= mask < size:
                raise ValueError(f"blade mask {mask} out of range for n={signature.n}")
            c = _clean(c)
            if c != 0:
                clean[int(mask)] = c
        self.signature = signature
        self._coeffs = clean

    # construction helpers
    @classmethod
    def scalar(cls, sig: Signature, value=1) -> "Multivector":
        return cls(sig, {0: value})

    @classmethod
    def blade(cls, sig: Signature, mask: int, value=1) -> "Multivector":
        return cls(sig, {mask: value})

    @classmethod
    def vector(cls, sig: Signature, components: Sequence) -> "Multivector":
        if len(components) != sig.n:
            raise ValueError("vector length does not match signature dimension")
        return cls(sig, {1 << i: c for i, c in enumerate(components)})

    @classmethod
    def from_dense(cls, sig: Signature, dense: np.ndarray, atol: float = 0.0) -> "Multivector":
        coeffs = {}
        for mask, c in enumerate(np.asarray(dense)):
            if abs(c) > atol:
                c = complex(c)
                coeffs[mask] = c.real if c.imag == 0 else c
        return cls(sig, coeffs)

    # views
    @property
    def coeffs(self) -> dict[int, numbers.Number]:
        return dict(self._coeffs)

    def __getitem__(self, mask: int):
        return self._coeffs.get(mask, 0)

    def items(self):
        return sorted(self._coeffs.items())

    @property
    def real_only(self) -> bool:
        return all(not isinstance(c, complex) for c in self._coeffs.values())

    @property
    def is_exact(self) -> bool:
        return all(isinstance(c, numbers.Rational) for c in self._coeffs.values())

    def grades(self) -> set[int]:
        return {grade_of(m) for m in self._coeffs}

    def to_dense(self) -> np.ndarray:
        out = np.zeros(1 << self.signature.n, dtype=complex)
        for mask, c in self._coeffs.items():
            out[mask] = c
        return out

    def max_abs(self) -> float:
        return max((abs(c) for c in self._coeffs.values()), default=0.0)

    def vector_part(self) -> np.ndarray:
        return np.array([self[1 << i] for i in range(self.signature.n)])

    # ring structure
    def _check(self, other: "Multivector"):
        if other.signature != self.signature:
            raise SignatureMismatch(f"signature {self.signature} vs {other.signature}")

    def __add__(self, other):
        if isinstance(other, numbers.Number):
            other = Multivector.scalar(self.signature, other)
        self._check(other)
        out = dict(self._coeffs)
        for mask, c in other._coeffs.items():
            out[mask] = out.get(mask, 0) + c
        return Multivector(self.signature, out)

    __radd__ = __add__

    def __neg__(self):
        return Multivector(self.signature, {m: -c for m, c in self._coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, numbers.Number):
            return Multivector(self.signature, {m: c * other for m, c in self._coeffs.items()})
        return geometric_product(self, other)

    def __rmul__(self, other):
        if isinstance(other, numbers.Number):
            return Multivector(self.signature, {m: other * c for m, c in self._coeffs.items()})
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, numbers.Number):
            return Multivector(self.signature, {m: c / other for m, c in self._coeffs.items()})
        return self * inverse(other)

    def __eq__(self, other):
        if isinstance(other, numbers.Number):
            other = Multivector.scalar(self.signature, other)
        if not isinstance(other, Multivector):
            return NotImplemented
        return self.signature == other.signature and self._coeffs == other._coeffs

    def __hash__(self):
        return hash((self.signature, tuple(sorted(self._coeffs.items()))))

    def isclose(self, other: "Multivector", atol: float = 1e-12) -> bool:
        return (self - other).max_abs() <= atol

    def __repr__(self):
        if not self._coeffs:
            return "0"
        terms = []
        for mask, c in self.items():
            name = "e" if mask == 0 else "v" + "".join(str(i + 1) for i in range(self.signature.n) if mask >> i & 1)
            terms.append(f"{c}*{name}")
        return " + ".join(terms)


def geometric_product(a: Multivector, b: Multivector) -> Multivector:
    a._check(b)
    neg = a.signature.negative_mask
    out: dict[int, numbers.Number] = {}
    for ma, ca in a._coeffs.items():
        for mb, cb in b._coeffs.items():
            s = blade_sign(ma, mb, neg)
            r = ma ^ mb
            term = ca * cb if s > 0 else -(ca * cb)
            out[r] = out.get(r, 0) + term
    return Multivector(a.signature, out)


def construct_algebra(sig: Signature) -> list[Multivector]:
    """The generators ``v^1 .. v^n``; the algebra they span has dimension ``2^n``."""
    return [Multivector.blade(sig, 1 << i) for i in range(sig.n)]


def relation_defect(gens: Sequence[Multivector], eta: Sequence[Sequence] | None = None):
    """Largest |v^a v^b + v^b v^a - 2 eta^{ab} e| coefficient over all pairs.

    Exact (an ``int``) when the generators carry integer coefficients.
    """
    sig = gens[0].signature
    if eta is None:
        eta = np.diag(sig.eta)
    worst = 0
    for a, va in enumerate(gens):
        for b, vb in enumerate(gens):
            d = va * vb + vb * va - Multivector.scalar(sig, 2 * eta[a][b])
            worst = max(worst, d.max_abs())
    return worst


def reachable_blades(gens: Sequence[Multivector], even: bool = False) -> set[int]:
    """Blade masks reached by repeated products of the generators (or of generator pairs)."""
    sig = gens[0].signature
    steps = [g * h for g in gens for h in gens] if even else list(gens)
    frontier = {0: Multivector.scalar(sig)}
    seen = {0}
    while frontier:
        nxt = {}
        for elem in frontier.values():
            for s in steps:
                prod = elem * s
                for mask in prod.coeffs:
                    if mask not in seen:
                        seen.add(mask)
                        nxt[mask] = Multivector.blade(sig, mask)
        frontier = nxt
    return seen


def grade_project(a: Multivector, r: int) -> Multivector:
    return Multivector(a.signature, {m: c for m, c in a.coeffs.items() if grade_of(m) == r})


def reverse(a: Multivector) -> Multivector:
    out = {}
    for m, c in a.coeffs.items():
        r = grade_of(m)
        out[m] = -c if (r * (r - 1) // 2) & 1 else c
    return Multivector(a.signature, out)


def even_part(a: Multivector) -> Multivector:
    return Multivector(a.signature, {m: c for m, c in a.coeffs.items() if grade_of(m) % 2 == 0})


def conjugate(a: Multivector) -> Multivector:
    return Multivector(a.signature, {m: c.conjugate() for m, c in a.coeffs.items()})


def star(a: Multivector) -> Multivector:
    """Hermitian involution: reversion, complex conjugation, and a sign per negative-square generator.

    Under the matrix representations built in :mod:`maggeo.spin` this is the
    Hermitian adjoint.
    """
    neg = a.signature.negative_mask
    out = {}
    for m, c in reverse(a).coeffs.items():
        c = c.conjugate()
        out[m] = -c if grade_of(m & neg) & 1 else c
    return Multivector(a.signature, out)


def left_matrix(a: Multivector) -> np.ndarray:
    """Dense matrix of ``x -> a x`` on the blade basis."""
    table = sign_table(a.signature)
    size = table.shape[0]
    dense = a.to_dense()
    i = np.arange(size)[:, None]
    j = np.arange(size)[None, :]
    mat = np.zeros((size, size), dtype=complex)
    mat[i ^ j, np.broadcast_to(j, (size, size))] = dense[:, None] * table
    return mat


def dense_product(a: np.ndarray, b: np.ndarray, sig: Signature) -> np.ndarray:
    return left_matrix(Multivector.from_dense(sig, a)) @ b


def inverse(a: Multivector, rcond: float = 1e-12) -> Multivector:
    mat = left_matrix(a)
    unit = np.zeros(mat.shape[0], dtype=complex)
    unit[0] = 1
    s = np.linalg.svd(mat, compute_uv=False)
    if s[-1] <= rcond * s[0]:
        raise ValueError("element is not invertible")
    sol = np.linalg.solve(mat, unit)
    return Multivector.from_dense(a.signature, sol, atol=1e-15)


def exp(a: Multivector) -> Multivector:
    mat = left_matrix(a)
    unit = np.zeros(mat.shape[0], dtype=complex)
    unit[0] = 1
    return Multivector.from_dense(a.signature, expm(mat) @ unit, atol=1e-15)


def eta_norm(v: Multivector) -> float:
    """eta(v, v) of a grade-1 element."""
    return sum(s * c * c for s, c in zip(v.signature.eta, v.vector_part()))


@dataclass(frozen=True)
class GroupElement:
    """Element of the Clifford group recorded as a product of non-null vectors."""

    value: Multivector
    certificate: tuple[Multivector, ...]

    @classmethod
    def from_vectors(cls, vectors: Iterable[Multivector]) -> "GroupElement":
        vectors = tuple(vectors)
        if not vectors:
            raise ValueError("empty certificate; use GroupElement.identity")
        value = Multivector.scalar(vectors[0].signature)
        for v in vectors:
            if v.grades() - {1}:
                raise ValueError("certificate entries must be grade-1")
            if abs(eta_norm(v)) < NULL_VECTOR_THRESHOLD:
                raise ValueError("null vector in certificate")
            value = value * v
        return cls(value, vectors)

    @classmethod
    def identity(cls, sig: Signature) -> "GroupElement":
        return cls(Multivector.scalar(sig), ())

    @property
    def signature(self) -> Signature:
        return self.value.signature

    @property
    def is_spin(self) -> bool:
        return len(self.certificate) % 2 == 0

    def inverse(self) -> Multivector:
        out = Multivector.scalar(self.signature)
        for v in reversed(self.certificate):
            out = out * (v / eta_norm(v))
        return out

    def __neg__(self) -> "GroupElement":
        if not self.certificate:
            raise ValueError("-e has no vector certificate in dimension-free form")
        first, *rest = self.certificate
        return GroupElement(-self.value, (-first, *rest))

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(self.value * other.value, self.certificate + other.certificate)


def adjoint_action(g: GroupElement | Multivector, a: Multivector) -> Multivector:
    """``g a g^{-1}``; untwisted, so odd elements act on vectors as minus-reflections."""
    if isinstance(g, GroupElement):
        ginv = g.inverse() if g.certificate else Multivector.scalar(g.signature)
        g = g.value
    else:
        ginv = inverse(g)
    return g * a * ginv


def zeta_matrix(g: GroupElement, atol: float = 1e-10) -> np.ndarray:
    """Matrix of ``v -> g v g^{-1}`` on the grade-1 subspace (columns are images)."""
    sig = g.signature
    n = sig.n
    mat = np.zeros((n, n))
    for j, v in enumerate(construct_algebra(sig)):
        image = adjoint_action(g, v)
        off = Multivector(sig, {m: c for m, c in image.coeffs.items() if grade_of(m) != 1})
        scale = max(1.0, image.max_abs())
        if off.max_abs() > atol * scale:
            raise ValueError("adjoint action left the vector subspace; certificate is corrupt")
        comps = image.vector_part()
        if np.max(np.abs(np.imag(comps.astype(complex)))) > atol * scale:
            raise ValueError("adjoint action produced complex vector components")
        mat[:, j] = np.real(comps.astype(complex))
    return mat


def random_spin_element(sig: Signature, seed: int | np.random.Generator | None = None) -> GroupElement:
    """Product of 2 or 4 random vectors with eta(v, v) = +-1."""
    rng = np.random.default_rng(seed)
    count = int(rng.choice([2, 4]))
    vectors = []
    eta = np.array(sig.eta)
    while len(vectors) < count:
        comps = rng.normal(size=sig.n)
        q = float(np.sum(eta * comps**2))
        if abs(q) < NULL_VECTOR_THRESHOLD:
            continue
        comps = comps / np.sqrt(abs(q))
        vectors.append(Multivector.vector(sig, [float(c) for c in comps]))
    return GroupElement.from_vectors(vectors)


def complexify_map(sig_from: Signature, n: int | None = None) -> list[Multivector]:
    """Images of ``v^1..v^n`` of Cl(m, k) inside the complex algebra generated by ``e^1..e^n``.

    The target is represented as Cl(n, 0) with complex coefficients.
    """
    n = sig_from.n if n is None else n
    if n != sig_from.n:
        raise ValueError("source signature dimension does not match n")
    target = Signature(n, 0)
    return [Multivector.blade(target, 1 << a, 1 if a < sig_from.m else 1j) for a in range(n)]


def complexify(a: Multivector) -> Multivector:
    """Transport an element of Cl(m, k) into the complex algebra along :func:`complexify_map`."""
    sig = a.signature
    target = Signature(sig.n, 0)
    out = {}
    for mask, c in a.coeffs.items():
        # each blade factor picks up i per negative generator; reordering signs agree
        phase = 1j ** grade_of(mask & sig.negative_mask)
        out[mask] = c * phase
    return Multivector(target, out)


def primitive_idempotent(n: int) -> Multivector:
    """Hermitian idempotent generating a minimal left ideal of the complex algebra of rank n."""
    sig = Signature(n, 0)
    one = Multivector.scalar(sig)
    half = Fraction(1, 2)
    p = (one + Multivector.blade(sig, 1)) * half
    # commuting Hermitian involutions i e^{2j} e^{2j+1} (0-based bits 2j-1, 2j)
    for j in range(1, n // 2):
        s = Multivector.blade(sig, (1 << (2 * j - 1)) | (1 << (2 * j)), 1j)
        p = p * ((one + s) * half)
    return p


def is_hermitian_idempotent(p: Multivector, atol: float = 1e-12) -> bool:
    return (p * p - p).max_abs() <= atol and (star(p) - p).max_abs() <= atol


@dataclass(frozen=True)
class LeftIdeal:
    generator: Multivector
    basis: tuple[Multivector, ...]
    minimal: bool

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def basis_matrix(self) -> np.ndarray:
        return np.column_stack([b.to_dense() for b in self.basis])

    def represent(self, a: Multivector, atol: float = 1e-10) -> np.ndarray:
        """Matrix of left multiplication by ``a`` in the ideal basis."""
        w = self.basis_matrix()
        images = left_matrix(a) @ w
        coeffs, *_ = np.linalg.lstsq(w, images, rcond=None)
        if np.max(np.abs(w @ coeffs - images), initial=0.0) > atol:
            raise ValueError("left multiplication left the ideal")
        return coeffs


def minimal_left_ideal(p: Multivector, rtol: float = 1e-10) -> LeftIdeal:
    """Basis of ``A p`` built from the products ``blade * p`` that raise the rank."""
    if (p * p - p).max_abs() > 1e-12:
        raise ValueError("p is not idempotent")
    if (star(p) - p).max_abs() > 1e-12:
        raise ValueError("p is not Hermitian")
    sig = p.signature
    chosen: list[Multivector] = []
    q = np.zeros((1 << sig.n, 0), dtype=complex)
    for mask in range(1 << sig.n):
        w = Multivector.blade(sig, mask) * p
        vec = w.to_dense()
        norm = np.linalg.norm(vec)
        if norm == 0:
            continue
        resid = vec - q @ (q.conj().T @ vec)
        if np.linalg.norm(resid) > rtol * norm:
            chosen.append(w)
            q = np.column_stack([q, resid / np.linalg.norm(resid)])
    minimal = len(chosen) == 2 ** (sig.n // 2)
    return LeftIdeal(p, tuple(chosen), minimal)


def multiplication_table(sig: Signature) -> list[list[tuple[int, int]]]:
    """``table[a][b] = (sign, a ^ b)`` for all blade pairs."""
    table = sign_table(sig)
    size = 1 << sig.n
    return [[(int(table[a, b]), a ^ b) for b in range(size)] for a in range(size)]


def blade_name(mask: int) -> str:
    if mask == 0:
        return "e"
    return "v" + ".".join(str(i + 1) for i in range(MAX_DIMENSION) if mask >> i & 1)


def eta_orthogonality_defect(mat: np.ndarray, sig: Signature) -> float:
    """max |M^T eta M - eta|, scaled by max(1, max|M|^2) so large boosts are judged at working precision."""
    eta = sig.metric()
    scale = max(1.0, float(np.max(np.abs(mat))) ** 2)
    return float(np.max(np.abs(mat.T @ eta @ mat - eta))) / scale
