"""Command-line front end: ``maggeo <command> [options]``.

Every command writes one JSON report::

    {"schema": "maggeo/1", "command": ..., "config": {...},
     "results": [{"point": [...] | null, "values": {...}, "defects": {...}}],
     "summary": {"max_defect": ..., "pass": ..., "violations": [...]}}

Exit status: 0 when every defect is below its tolerance, 1 on a tolerance
violation, 2 on a configuration error.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from . import clifford as C
from . import expr as X
from . import field_eqs as FE
from . import fields as F
from . import geometry as G
from . import spin as S
from .presets import PRESETS, connection_from_table, get_preset, metric_from_table

SCHEMA = "maggeo/1"
DEFAULT_POINTS = 5

TOLERANCES = {
    "relation_defect": 0.0,
    "dimension_defect": 0.0,
    "clifford_defect": 1e-12,
    "commutant_defect": 0.0,
    "intertwiner_defect": 0.0,
    "generator_defect": 1e-12,
    "generator_antisymmetry": 0.0,
    "anticommutator_defect": 1e-10,
    "metricity_identity": 1e-12,
    "curvature_antisymmetry": 0.0,
    "splitting_defect": 1e-12,
    "reconstruction_defect": 1e-10,
    "contorsion_antisymmetry": 1e-12,
    "nonmetricity_symmetry": 0.0,
    "metric_connection_metricity": 1e-12,
    "torsion_roundtrip": 1e-12,
    "metric_residual": 1e-8,
    "connection_residual": 1e-9,
    "reduced_identity": 1e-9,
    "onshell_nonmetricity": 1e-8,
    "onshell_torsion": 1e-8,
    "onshell_contorsion": 1e-8,
    "onshell_levi_civita": 1e-8,
    "first_order_covariance": 1e-8,
    "utiyama": 1e-12,
    "tetrad_antisymmetry": 1e-10,
    "restriction_defect": 1e-10,
    "gamma_compatibility": 1e-10,
}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    signature: C.Signature | None = None
    metric: str | None = None
    params: dict[str, float] = field(default_factory=dict)
    connection: str = "levi_civita"
    points: int = DEFAULT_POINTS
    at: list[list[float]] | None = None
    seed: int = 0
    tol: float | None = None
    compare_metric: str | None = None
    json_path: str | None = None

    def tolerance(self, name: str) -> float:
        return self.tol if self.tol is not None else TOLERANCES[name]

    def describe(self) -> dict:
        return {
            "signature": str(self.signature) if self.signature else None,
            "metric": self.metric,
            "params": dict(sorted(self.params.items())),
            "connection": self.connection,
            "points": self.points if self.at is None else len(self.at),
            "at": self.at,
            "seed": self.seed,
            "tol": self.tol,
            "compare_metric": self.compare_metric,
        }


# configuration resolution


def _parse_param(text: str) -> tuple[str, float]:
    name, sep, value = text.partition("=")
    if not sep or not name.strip():
        raise argparse.ArgumentTypeError(f"expected NAME=VALUE, got {text!r}")
    try:
        return name.strip(), float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"parameter value {value!r} is not a number") from None


def _parse_signature(text: str) -> C.Signature:
    try:
        return C.Signature.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _parse_point(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"point {text!r} must be comma-separated numbers") from None


@dataclass
class Geometry:
    metric: F.MetricField
    connection: F.TensorField
    connection_kind: str
    points: np.ndarray
    expected_einstein: float = 0.0


def _read_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise ConfigError(f"file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc}") from None


def _metric_source(cfg: RunConfig, rng: np.random.Generator):
    """Returns (metric field, sampler, expected Einstein factor)."""
    name = cfg.metric or "flat"
    if name in PRESETS:
        preset = get_preset(name)
        sig = preset.resolve_signature(cfg.signature)
        params = preset.parameters(cfg.params)
        g = preset.metric(sig, params)
        return g, (lambda count: preset.sample(sig, params, count, rng)), preset.expected_einstein(params)
    if name == "random":
        if cfg.signature is None:
            raise ConfigError("--metric random needs --signature")
        sig = cfg.signature
        g = F.random_metric(sig, rng)
        return g, (lambda count: rng.uniform(-0.5, 0.5, size=(count, sig.n))), 0.0
    if not Path(name).exists():
        raise ConfigError(f"--metric {name!r} is neither a preset ({', '.join(PRESETS)}, random) nor a file")
    data = _read_json(name)
    try:
        sig = C.Signature.parse(str(data["signature"])) if "signature" in data else cfg.signature
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if sig is None:
        raise ConfigError("metric file needs a signature (in the file or via --signature)")
    if cfg.signature is not None and cfg.signature != sig:
        raise ConfigError(f"metric file signature {sig} differs from --signature {cfg.signature}")
    params = {**data.get("parameters", {}), **cfg.params}
    scope = X.Scope.standard(sig.n, list(params))
    if "metric" not in data:
        raise ConfigError("metric file has no 'metric' entry")
    table = X.parse_metric_table(data["metric"], sig.n, scope)
    g = metric_from_table(table, sig, scope, params, Path(name).stem)
    bounds = np.array(data.get("box", [[-1.0, 1.0]] * sig.n), dtype=float)
    if bounds.shape != (sig.n, 2):
        raise ConfigError(f"metric file 'box' must be {sig.n} [lo, hi] pairs")
    return g, (lambda count: rng.uniform(bounds[:, 0], bounds[:, 1], size=(count, sig.n))), float(
        data.get("expected_einstein", 0.0)
    )


def _connection_source(cfg: RunConfig, g: F.MetricField, rng: np.random.Generator) -> F.TensorField:
    n = g.n
    kind = cfg.connection
    if kind == "levi_civita":
        return F.levi_civita_field(g)
    if kind == "zero":
        return F.zero_connection(n)
    if kind == "random":
        return F.random_connection(n, rng)
    if kind == "metric_random":
        return F.metric_connection_field(g, F.random_torsion(n, rng))
    if not Path(kind).exists():
        raise ConfigError(f"--connection {kind!r} is not levi_civita, zero, random, metric_random or a file")
    data = _read_json(kind)
    params = {**data.get("parameters", {}), **cfg.params}
    scope = X.Scope.standard(n, list(params))
    if "connection" not in data:
        raise ConfigError("connection file has no 'connection' entry")
    table = X.parse_tensor_table(data["connection"], (n, n, n), scope)
    return connection_from_table(table, n, scope, params, Path(kind).stem)


def resolve_geometry(cfg: RunConfig) -> Geometry:
    rng = np.random.default_rng(cfg.seed)
    g, sampler, expected = _metric_source(cfg, rng)
    conn = _connection_source(cfg, g, rng)
    if cfg.at is not None:
        pts = np.array(cfg.at, dtype=float)
        if pts.shape[1] != g.n:
            raise ConfigError(f"--at points need {g.n} coordinates")
    else:
        if cfg.points < 1:
            raise ConfigError("--points must be positive")
        pts = sampler(cfg.points)
    g.jet(pts[0])  # signature and degeneracy check at the first point
    return Geometry(g, conn, cfg.connection, pts, expected)


# commands


Result = dict
Values = dict


def _max(a) -> float:
    a = np.asarray(a)
    return float(np.max(np.abs(a))) if a.size else 0.0


def _cplx(m: np.ndarray) -> list:
    return [np.real(m).tolist(), np.imag(m).tolist()]


def cmd_clifford_table(cfg: RunConfig) -> list[Result]:
    sig = cfg.signature
    if sig is None:
        raise ConfigError("clifford-table needs --signature")
    gens = C.construct_algebra(sig)
    table = C.multiplication_table(sig)
    names = [C.blade_name(m) for m in range(1 << sig.n)]
    rendered = [[("-" if s < 0 else "") + names[m] for s, m in row] for row in table]
    full = len(C.reachable_blades(gens))
    even = len(C.reachable_blades(gens, even=True))
    defects = {
        "relation_defect": float(C.relation_defect(gens)),
        "dimension_defect": float(abs(full - 2**sig.n) + abs(even - 2 ** (sig.n - 1))),
    }
    values = {"blades": names, "table": rendered, "dimension": full, "even_dimension": even}
    return [{"point": None, "values": values, "defects": defects}]


def _gamma_of_metric(rep: S.GammaRep, g: np.ndarray) -> list[np.ndarray]:
    return S.covector_gammas(rep, S.tetrad_from_metric(g, rep.signature))


def cmd_gamma_check(cfg: RunConfig) -> list[Result]:
    sig = cfg.signature
    if sig is None:
        raise ConfigError("gamma-check needs --signature")
    if sig.n % 2:
        raise ConfigError("gamma-check needs an even dimension")
    rep = S.gamma_matrices(sig)
    gens = S.spin_generators(rep)
    commutant = S.commutant_dimension(rep)
    ideal_dim, _ = S.intertwiner_space(S.left_ideal_gammas(sig), rep.gammas)
    L = S.vector_generators(sig)
    gam = np.array(rep.gammas)
    comm = np.einsum("baij,cjk->bacik", gens.I, gam) - np.einsum("cij,bajk->bacik", gam, gens.I)
    generator_defect = _max(comm + np.einsum("bacd,dij->bacij", L, gam))
    low = gens.lowered()
    values = {
        "dimension": rep.dim,
        "commutant_dimension": commutant,
        "direct_sum_commutant_dimension": S.commutant_dimension(S.direct_sum(rep)),
        "left_ideal_intertwiner_dimension": ideal_dim,
    }
    defects = {
        "clifford_defect": rep.clifford_defect(),
        "commutant_defect": float(abs(commutant - 1)),
        "intertwiner_defect": float(abs(ideal_dim - 1)),
        "generator_defect": generator_defect,
        "generator_antisymmetry": _max(low + low.transpose(1, 0, 2, 3)),
    }
    if cfg.compare_metric is not None:
        eta = sig.metric().astype(float)
        other = _constant_metric(cfg.compare_metric, sig)
        dim, _ = S.intertwiner_space(_gamma_of_metric(rep, eta), _gamma_of_metric(rep, other))
        same = bool(np.allclose(eta, other, rtol=0, atol=1e-12))
        values["compare_metric"] = other.tolist()
        values["metrics_equal"] = same
        values["compare_intertwiner_dimension"] = dim
        defects["intertwiner_defect"] = max(defects["intertwiner_defect"], float(abs(dim - (1 if same else 0))))
        gg = _gamma_of_metric(rep, other)
        defects["anticommutator_defect"] = S.clifford_defect(gg, np.linalg.inv(other))
    return [{"point": None, "values": values, "defects": defects}]


def _constant_metric(text: str, sig: C.Signature) -> np.ndarray:
    scope = X.Scope([], [])
    table = X.parse_metric_table(text, sig.n, scope)
    g = np.array([[X.evaluate(e, {}) for e in row] for row in table], dtype=float)
    F.check_metric(g, sig, " in --compare-metric")
    return g


def cmd_curvature(cfg: RunConfig) -> list[Result]:
    geo = resolve_geometry(cfg)
    out = []
    for x in geo.points:
        gj = geo.metric.jet(x)
        K = geo.connection.jet(x)
        chris = G.christoffel_lower_from(gj.grad)
        R = G.curvature_from(K.value, K.grad)
        R_part, _ = G.jet_splitting(K.value, G.jets_of(K))
        metricity = np.einsum("nam->mna", gj.grad) + chris + chris.transpose(0, 2, 1)
        values = {
            "christoffel": chris.tolist(),
            "curvature": R.tolist(),
            "ricci": G.ricci(R).tolist(),
            "scalar": float(G.scalar_curvature(gj.value, R)),
        }
        defects = {
            "metricity_identity": _max(metricity),
            "curvature_antisymmetry": _max(R + R.transpose(1, 0, 2, 3)),
            "splitting_defect": _max(R_part - R),
        }
        out.append({"point": x.tolist(), "values": values, "defects": defects})
    return out


def cmd_decompose(cfg: RunConfig) -> list[Result]:
    geo = resolve_geometry(cfg)
    out = []
    for x in geo.points:
        dec = G.decompose_reconstruct(geo.metric, geo.connection, x)
        T = G.torsion(geo.connection, x)
        Kg = G.metric_connection(geo.metric, T, x)
        gj = geo.metric.jet(x)
        values = {
            "christoffel": dec.christoffel.tolist(),
            "contorsion": dec.contorsion.tolist(),
            "nonmetricity": dec.nonmetricity.tolist(),
            "torsion": T.tolist(),
        }
        defects = {
            "reconstruction_defect": dec.reconstruction_defect,
            "contorsion_antisymmetry": _max(dec.contorsion + dec.contorsion.transpose(0, 2, 1)),
            "nonmetricity_symmetry": _max(dec.nonmetricity - dec.nonmetricity.transpose(0, 2, 1)),
            "metric_connection_metricity": _max(G.nonmetricity_from(gj.value, gj.grad, Kg)),
            "torsion_roundtrip": _max(G.torsion_from(Kg) - T),
        }
        out.append({"point": x.tolist(), "values": values, "defects": defects})
    return out


def cmd_residual(cfg: RunConfig) -> list[Result]:
    geo = resolve_geometry(cfg)
    fc = FE.FieldConfiguration(geo.metric, geo.connection)
    on_shell = geo.connection_kind == "levi_civita"
    out = []
    for x in geo.points:
        rep = FE.residual_report(
            fc,
            x,
            tol_metric=cfg.tolerance("metric_residual"),
            tol_conn=cfg.tolerance("connection_residual"),
            tol_identity=cfg.tolerance("reduced_identity"),
            expected_einstein=geo.expected_einstein,
        )
        d = rep.to_dict()
        d["values"]["lagrangian"] = FE.lagrangian_density(fc, x)
        d["values"]["expected_einstein"] = geo.expected_einstein
        defects = d["defects"]
        if not on_shell:
            # residuals of an arbitrary connection are values, not defects
            for key in [k for k in defects if k != "reduced_identity"]:
                d["values"][key] = defects.pop(key)
        d.pop("tolerances")
        out.append(d)
    return out


def cmd_covariance(cfg: RunConfig) -> list[Result]:
    geo = resolve_geometry(cfg)
    fc = FE.FieldConfiguration(geo.metric, geo.connection)
    rng = np.random.default_rng([cfg.seed, 1])
    out = []
    for i, x in enumerate(geo.points):
        tau = F.PolynomialVectorField.random(geo.metric.n, rng, degree=3, scale=0.5)
        values = {
            "lagrangian": FE.lagrangian_density(fc, x),
            "scaled_defect": FE.covariance_invariance_defect(fc, tau, x),
            "tau": tau.value(x).tolist(),
            "utiyama_antisymmetric": FE.utiyama_factorization_check(fc, x, seed=cfg.seed + i, symmetric=False),
        }
        defects = {
            # relative to the magnitude of the summed terms, so large fields are judged at working precision
            "first_order_covariance": FE.first_order_covariance_defect(fc, tau, x)
            / max(1.0, FE.lagrangian_scale(fc, x)),
            "utiyama": FE.utiyama_factorization_check(fc, x, seed=cfg.seed + i),
        }
        out.append({"point": x.tolist(), "values": values, "defects": defects})
    return out


def cmd_spin_connection(cfg: RunConfig) -> list[Result]:
    geo = resolve_geometry(cfg)
    sig = geo.metric.signature
    if sig.n % 2:
        raise ConfigError("spin-connection needs an even dimension")
    if geo.connection_kind not in ("levi_civita", "metric_random"):
        raise ConfigError("spin-connection needs a metric connection (levi_civita or metric_random)")
    rep = S.gamma_matrices(sig)
    gens = S.spin_generators(rep)
    rng = np.random.default_rng([cfg.seed, 2])
    out = []
    for x in geo.points:
        pt = S.spin_connection_at(rep, gens, geo.metric, geo.connection, x, rng)
        gam = S.covector_gammas(rep, S.tetrad_from_metric(geo.metric.at(x), sig))
        values = {"A": pt.A.tolist(), "omega": [_cplx(o) for o in pt.omega]}
        defects = {
            "tetrad_antisymmetry": pt.antisymmetry_defect,
            "restriction_defect": pt.restriction_defect,
            "gamma_compatibility": pt.compatibility_defect,
            "anticommutator_defect": S.clifford_defect(gam, np.linalg.inv(geo.metric.at(x))),
        }
        out.append({"point": x.tolist(), "values": values, "defects": defects})
    return out


COMMANDS: dict[str, Callable[[RunConfig], list[Result]]] = {
    "clifford-table": cmd_clifford_table,
    "gamma-check": cmd_gamma_check,
    "curvature": cmd_curvature,
    "decompose": cmd_decompose,
    "residual": cmd_residual,
    "covariance": cmd_covariance,
    "spin-connection": cmd_spin_connection,
}


def _summarize(cfg: RunConfig, results: list[Result]) -> dict:
    worst = 0.0
    violations = []
    for i, r in enumerate(results):
        for name, v in r["defects"].items():
            if not math.isfinite(v):
                violations.append(f"{i}:{name}")
                continue
            worst = max(worst, v)
            tol = cfg.tolerance(name)
            if v > tol:
                violations.append(f"{i}:{name}")
    return {"max_defect": worst, "pass": not violations, "violations": violations}


def run(cfg: RunConfig) -> tuple[int, dict | None, str | None]:
    """Execute a command; returns (exit code, report, error message)."""
    try:
        results = COMMANDS[cfg.command](cfg)
    except (ConfigError, ValueError) as exc:
        return 2, None, str(exc)
    except ArithmeticError as exc:
        # a sample point outside the domain of the metric or connection expressions
        return 2, None, f"evaluation failed: {exc}"
    summary = _summarize(cfg, results)
    report = {
        "schema": SCHEMA,
        "command": cfg.command,
        "config": cfg.describe(),
        "results": results,
        "summary": summary,
    }
    return (0 if summary["pass"] else 1), report, None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="maggeo", description="Metric-affine geometry verification runs.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--signature", type=_parse_signature, help="m,k: counts of +1 and -1 entries")
        p.add_argument("--metric", help=f"preset ({', '.join(PRESETS)}, random) or JSON file")
        p.add_argument("--param", type=_parse_param, action="append", default=[], metavar="NAME=VAL")
        p.add_argument("--connection", default="levi_civita", help="levi_civita, zero, random, metric_random or JSON file")
        group = p.add_mutually_exclusive_group()
        group.add_argument("--points", type=int, default=DEFAULT_POINTS)
        group.add_argument("--at", type=_parse_point, action="append", metavar="X0,X1,...")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--tol", type=float, help="override every tolerance")
        p.add_argument("--json", dest="json_path", metavar="PATH", help="write the report here instead of stdout")
        if name == "gamma-check":
            p.add_argument("--compare-metric", help='constant metric such as "diag(1,-4,-1,-1)"')
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    params = dict(args.param)
    cfg = RunConfig(
        command=args.command,
        signature=args.signature,
        metric=args.metric,
        params=params,
        connection=args.connection,
        points=args.points,
        at=args.at,
        seed=args.seed,
        tol=args.tol,
        compare_metric=getattr(args, "compare_metric", None),
        json_path=args.json_path,
    )
    code, report, error = run(cfg)
    if error is not None:
        print(f"maggeo: error: {error}", file=sys.stderr)
        return code
    text = json.dumps(report, indent=2) + "\n"
    if cfg.json_path:
        Path(cfg.json_path).write_text(text)
        s = report["summary"]
        print(f"{cfg.command}: {'pass' if s['pass'] else 'FAIL'} (max defect {s['max_defect']:.3e})")
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
