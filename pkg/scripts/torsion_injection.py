"""Inject torsion of growing amplitude into the Levi-Civita connection of a preset.

The connection stays metric (zero non-metricity) with prescribed torsion a T.
Residuals should grow from roundoff at a = 0, linearly in a for the connection
equation, while the reduced identity holds at every amplitude.
"""
import argparse
from dataclasses import dataclass

import numpy as np

from maggeo import field_eqs as F
from maggeo import geometry as G
from maggeo.fields import metric_connection_field, random_torsion
from maggeo.presets import get_preset


@dataclass
class Config:
    preset: str = "schwarzschild"
    amplitudes: tuple[float, ...] = (0.0, 1e-8, 1e-6, 1e-4, 1e-2, 1.0)
    points: int = 10
    seed: int = 0


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--preset", default="schwarzschild", choices=["sphere", "schwarzschild", "de_sitter"])
    ap.add_argument("--points", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    cfg = Config(preset=args.preset, points=args.points, seed=args.seed)
    preset = get_preset(cfg.preset)
    sig = preset.resolve_signature(None)
    params = preset.parameters({})
    metric = preset.metric(sig, params)
    pts = preset.sample(sig, params, cfg.points, np.random.default_rng(cfg.seed))
    print(f"{cfg.preset} {params}, {cfg.points} points")
    print(f"{'a':>8}{'max|E_conn|':>13}{'/a':>10}{'max|E-c s|':>12}{'max|C|':>10}{'max|T|':>10}{'identity':>10}  on shell")
    expected = preset.expected_einstein(params)
    for a in cfg.amplitudes:
        # the same torsion direction for every amplitude
        conn = metric_connection_field(metric, random_torsion(sig.n, np.random.default_rng(cfg.seed + 1), scale=a))
        fc = F.FieldConfiguration(metric, conn)
        e_conn = e_metric = nonmet = tors = ident = 0.0
        onshell = True
        for x in pts:
            e_conn = max(e_conn, float(np.max(np.abs(F.el_connection_residual(fc, x)))))
            e_metric = max(e_metric, float(np.max(np.abs(F.el_metric_residual(fc, x) - expected * metric.at(x)))))
            nonmet = max(nonmet, float(np.max(np.abs(G.nonmetricity(metric, conn, x)))))
            tors = max(tors, float(np.max(np.abs(G.torsion(conn, x)))))
            ident = max(ident, F.reduced_identity_defect(fc, x))
            try:
                onshell &= F.onshell_reduction_check(fc, x).passed
            except F.OnShellPreconditionError:
                onshell = False
        ratio = f"{e_conn / a:>10.2e}" if a else f"{'-':>10}"
        print(f"{a:>8.0e}{e_conn:>13.2e}{ratio}{e_metric:>12.2e}{nonmet:>10.1e}{tors:>10.2e}{ident:>10.1e}  {onshell}")


if __name__ == "__main__":
    main()
