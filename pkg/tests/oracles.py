"""Independent reference computations used by the test-suite.

Nothing here imports the jet engine or the geometry module.  General
relativity quantities use the textbook conventions

    Gamma^a_{bc} = 1/2 g^{ad} (d_b g_{dc} + d_c g_{db} - d_d g_{bc})
    Riem^a_{bcd} = d_c Gamma^a_{db} - d_d Gamma^a_{cb} + Gamma^a_{ce} Gamma^e_{db} - Gamma^a_{de} Gamma^e_{cb}
    Ric_{bd} = Riem^a_{bad},  G_{ab} = Ric_{ab} - 1/2 g_{ab} R

and the sign map to the package's conventions is

    {_mu nu alpha}          = -g_{nu beta} Gamma^beta_{mu alpha}
    K_lam^mu_nu             = -Gamma^mu_{lam nu}
    R_{lam mu}^alpha_beta   = -Riem^alpha_{beta lam mu}
    Ricci-like R_{alpha beta} = -Ric_{alpha beta},  scalar = -R,  E_{alpha beta} = -G_{alpha beta}
"""
from __future__ import annotations

import functools
import itertools

import numpy as np
import sympy as sp

T, R, TH, PH = sp.symbols("t r theta phi", real=True)
M, H = sp.symbols("M H", positive=True)


def sphere():
    return [TH, PH], sp.diag(1, sp.sin(TH) ** 2)


def schwarzschild():
    f = 1 - 2 * M / R
    return [T, R, TH, PH], sp.diag(f, -1 / f, -(R**2), -(R**2) * sp.sin(TH) ** 2)


def de_sitter():
    f = 1 - H**2 * R**2
    return [T, R, TH, PH], sp.diag(f, -1 / f, -(R**2), -(R**2) * sp.sin(TH) ** 2)


@functools.lru_cache(maxsize=None)
def standard_tensors(name: str):
    """Symbolic (coords, g, Gamma, Riemann, Ricci, scalar, Einstein) for a named metric."""
    coords, g = {"sphere": sphere, "schwarzschild": schwarzschild, "de_sitter": de_sitter}[name]()
    n = len(coords)
    ginv = sp.simplify(g.inv())
    gamma = [
        [
            [
                sp.simplify(
                    sum(ginv[a, d] * (sp.diff(g[d, c], coords[b]) + sp.diff(g[d, b], coords[c]) - sp.diff(g[b, c], coords[d])) for d in range(n))
                    / 2
                )
                for c in range(n)
            ]
            for b in range(n)
        ]
        for a in range(n)
    ]
    riem = sp.MutableDenseNDimArray.zeros(n, n, n, n)
    for a, b, c, d in itertools.product(range(n), repeat=4):
        expr = sp.diff(gamma[a][d][b], coords[c]) - sp.diff(gamma[a][c][b], coords[d])
        expr += sum(gamma[a][c][e] * gamma[e][d][b] - gamma[a][d][e] * gamma[e][c][b] for e in range(n))
        riem[a, b, c, d] = sp.simplify(expr)
    ric = sp.Matrix(n, n, lambda b, d: sp.simplify(sum(riem[a, b, a, d] for a in range(n))))
    scal = sp.simplify(sum(ginv[a, b] * ric[a, b] for a in range(n) for b in range(n)))
    einstein = sp.simplify(ric - g * scal / 2)
    return coords, g, gamma, riem, ric, scal, einstein


def _numeric(expr, coords, point, params):
    subs = dict(zip(coords, point))
    subs.update({sp.Symbol(k, positive=True): v for k, v in params.items()})
    return np.array(sp.N(sp.sympify(expr).subs(subs)), dtype=float)


def _lambdified(name: str, which: int, params: tuple):
    coords = standard_tensors(name)[0]
    obj = standard_tensors(name)[which]
    if isinstance(obj, list):
        obj = sp.Array(obj)
    par = {sp.Symbol(k, positive=True): v for k, v in params}
    obj = sp.Array(obj).subs(par) if not isinstance(obj, sp.Expr) else obj.subs(par)
    return sp.lambdify(coords, obj, "numpy")


@functools.lru_cache(maxsize=None)
def _fn(name: str, which: int, params: tuple):
    return _lambdified(name, which, params)


def evaluate(name: str, which: str, point, **params) -> np.ndarray:
    """Numeric value of ``which`` in {metric, gamma, riemann, ricci, scalar, einstein} at ``point``."""
    idx = {"metric": 1, "gamma": 2, "riemann": 3, "ricci": 4, "scalar": 5, "einstein": 6}[which]
    f = _fn(name, idx, tuple(sorted(params.items())))
    return np.array(f(*point), dtype=float)


# sign map to the package conventions


def mapped_christoffel(name, point, **params):
    g = evaluate(name, "metric", point, **params)
    gamma = evaluate(name, "gamma", point, **params)  # [a, b, c] = Gamma^a_{bc}
    return -np.einsum("nb,bma->mna", g, gamma)


def mapped_connection(name, point, **params):
    return -np.einsum("mln->lmn", evaluate(name, "gamma", point, **params))


def mapped_curvature(name, point, **params):
    riem = evaluate(name, "riemann", point, **params)  # [a, b, c, d]
    return -np.einsum("abcd->cdab", riem)


def mapped_einstein(name, point, **params):
    return -evaluate(name, "einstein", point, **params)


# Clifford product by explicit reordering of generator words


def word_product(a: tuple[int, ...], b: tuple[int, ...], eta) -> tuple[int, tuple[int, ...]]:
    """Product of two blades given as increasing index tuples, by bubble sort and contraction."""
    word = list(a) + list(b)
    sign = 1
    changed = True
    while changed:
        changed = False
        for i in range(len(word) - 1):
            if word[i] > word[i + 1]:
                word[i], word[i + 1] = word[i + 1], word[i]
                sign = -sign
                changed = True
    out = []
    i = 0
    while i < len(word):
        if i + 1 < len(word) and word[i] == word[i + 1]:
            sign *= eta[word[i]]
            i += 2
        else:
            out.append(word[i])
            i += 1
    return sign, tuple(out)


# Euler-Lagrange operator for the connection, derived symbolically


def connection_euler_lagrange(coords, g, point):
    """(dL/dk - d_lam dL/dk_lam) at ``point`` as an array [nu, alpha, beta] for symbolic k.

    Returns a function of the numeric connection value ``k[lam, mu, nu]``.
    The jet variables enter L linearly, so their derivative depends on sigma
    only and its total derivative is an ordinary x-derivative.
    """
    n = len(coords)
    k = sp.Array(sp.symbols(f"k0:{n**3}")).reshape(n, n, n)
    kj = sp.Array(sp.symbols(f"j0:{n**4}")).reshape(n, n, n, n)
    ginv = g.inv()
    root = sp.sqrt(sp.Abs(g.det()))
    lag = 0
    for lam, mu, beta in itertools.product(range(n), repeat=3):
        if ginv[mu, beta] == 0:
            continue
        curv = kj[lam, mu, lam, beta] - kj[mu, lam, lam, beta]
        curv += sum(k[lam, c, beta] * k[mu, lam, c] - k[mu, c, beta] * k[lam, lam, c] for c in range(n))
        lag += ginv[mu, beta] * curv
    lag = lag * root
    subs = dict(zip(coords, point))
    algebraic = sp.Array(
        [[[sp.diff(lag, k[nu, a, b]) for b in range(n)] for a in range(n)] for nu in range(n)]
    )
    total = sp.Array(
        [
            [
                [
                    sum(sp.diff(sp.diff(lag, kj[lam, nu, a, b]), coords[lam]) for lam in range(n))
                    for b in range(n)
                ]
                for a in range(n)
            ]
            for nu in range(n)
        ]
    )
    ksyms = list(sp.flatten(k))
    alg_at = sp.lambdify(ksyms, algebraic.subs(subs).tolist(), "numpy")
    tot_at = np.array(total.subs(subs).tolist(), dtype=float)

    def at(kval):
        return np.array(alg_at(*np.asarray(kval, dtype=float).ravel()), dtype=float) - tot_at

    return at
