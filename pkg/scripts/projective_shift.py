"""Counterexample: the connection equation does not force the Levi-Civita connection.

k = Levi-Civita + xi_mu delta^alpha_beta solves the connection equation for any
covector xi, yet has non-metricity 2 xi_mu sigma_{nu alpha} and torsion
xi_mu sigma_{nu alpha} - xi_alpha sigma_{nu mu}.  The density is unchanged.
"""
import argparse
from dataclasses import dataclass

import numpy as np

from maggeo import field_eqs as F
from maggeo import geometry as G
from maggeo.clifford import Signature
from maggeo.fields import connection_field, levi_civita_field, random_metric
from maggeo.jets import Jet


@dataclass
class Config:
    signature: Signature = Signature(1, 3)
    amplitudes: tuple[float, ...] = (0.0, 1e-3, 1e-1, 1.0, 10.0)
    seed: int = 0


def projective(metric, xi):
    n = metric.n
    shift = np.einsum("m,ab->mab", xi, np.eye(n))
    return connection_field(n, lambda x: G.levi_civita(metric.jet(x)) + Jet.constant(shift, n, order=1), "projective")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--signature", type=Signature.parse, default=Signature(1, 3))
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    cfg = Config(signature=args.signature, seed=args.seed)
    rng = np.random.default_rng(cfg.seed)
    metric = random_metric(cfg.signature, rng)
    direction = rng.normal(size=cfg.signature.n)
    direction /= np.linalg.norm(direction)
    x = rng.uniform(-0.5, 0.5, cfg.signature.n)
    base = F.lagrangian_density(F.FieldConfiguration(metric, levi_civita_field(metric)), x)
    g = metric.at(x)
    print(f"signature {cfg.signature}, point {np.round(x, 3).tolist()}")
    print(f"{'|xi|':>8}{'max|E_conn|':>13}{'max|c|':>10}{'max|t|':>10}{'max|s|':>10}{'c formula':>11}{'dL':>10}{'identity':>10}")
    for a in cfg.amplitudes:
        xi = a * direction
        fc = F.FieldConfiguration(metric, projective(metric, xi))
        red = F.reduction_variables(fc, x)
        c_formula = float(np.max(np.abs(red.c - 2 * np.einsum("m,na->mna", xi, g))))
        print(
            f"{a:>8.0e}{np.max(np.abs(F.el_connection_residual(fc, x))):>13.1e}"
            f"{np.max(np.abs(red.c)):>10.2e}{np.max(np.abs(red.t)):>10.2e}{np.max(np.abs(red.s)):>10.1e}"
            f"{c_formula:>11.1e}{abs(F.lagrangian_density(fc, x) - base):>10.1e}{F.reduced_identity_defect(fc, x):>10.1e}"
        )


if __name__ == "__main__":
    main()
