"""Field-equation residuals of the Levi-Civita connection on each metric preset.

Prints the largest metric and connection residuals, how far the metric residual
is from c * sigma with the preset's expected factor, and the reduced-identity defect.
"""
import argparse
from dataclasses import dataclass, field

import numpy as np

from maggeo import field_eqs as F
from maggeo.clifford import Signature
from maggeo.fields import levi_civita_field
from maggeo.presets import PRESETS, get_preset


@dataclass
class Config:
    presets: list[str] = field(default_factory=lambda: ["flat", "sphere", "schwarzschild", "de_sitter"])
    points: int = 50
    seed: int = 0
    params: dict[str, float] = field(default_factory=dict)


def sweep(cfg: Config) -> list[dict]:
    rows = []
    for name in cfg.presets:
        preset = get_preset(name)
        sig = preset.signature or Signature(1, 3)
        params = preset.parameters({k: v for k, v in cfg.params.items() if k in preset.defaults})
        metric = preset.metric(sig, params)
        fc = F.FieldConfiguration(metric, levi_civita_field(metric))
        expected = preset.expected_einstein(params)
        rng = np.random.default_rng(cfg.seed)
        worst = dict(metric=0.0, connection=0.0, cosmological=0.0, identity=0.0)
        for x in preset.sample(sig, params, cfg.points, rng):
            E = F.el_metric_residual(fc, x)
            worst["metric"] = max(worst["metric"], float(np.max(np.abs(E))))
            worst["cosmological"] = max(worst["cosmological"], float(np.max(np.abs(E - expected * metric.at(x)))))
            worst["connection"] = max(worst["connection"], float(np.max(np.abs(F.el_connection_residual(fc, x)))))
            worst["identity"] = max(worst["identity"], F.reduced_identity_defect(fc, x))
        rows.append({"preset": name, "params": params, "expected": expected, **worst})
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--preset", action="append", choices=sorted(PRESETS))
    ap.add_argument("--points", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--M", type=float)
    ap.add_argument("--H", type=float)
    args = ap.parse_args()
    cfg = Config(points=args.points, seed=args.seed)
    if args.preset:
        cfg.presets = args.preset
    cfg.params = {k: v for k, v in (("M", args.M), ("H", args.H)) if v is not None}
    print(f"{'preset':<14}{'params':<12}{'c':>8}{'max|E|':>12}{'max|E-c s|':>12}{'max|E_conn|':>13}{'identity':>11}")
    for r in sweep(cfg):
        p = ",".join(f"{k}={v:g}" for k, v in r["params"].items()) or "-"
        print(
            f"{r['preset']:<14}{p:<12}{r['expected']:>8.3g}{r['metric']:>12.2e}"
            f"{r['cosmological']:>12.2e}{r['connection']:>13.2e}{r['identity']:>11.2e}"
        )


if __name__ == "__main__":
    main()
