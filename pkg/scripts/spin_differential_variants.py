"""Two readings of the coefficient in the vertical spinor covariant differential.

The implemented form contracts the coframe with the frame jets; the variant
contracts the coframe jets with the frame, which flips the sign of the jet term.
Both are compared with d y + Omega y on the tetrad section.  For diagonal
metrics (sphere, Schwarzschild) the frame-jet term is diagonal in the frame
indices, so the antisymmetric generators hide the difference; a generic
metric exposes it.
"""
import argparse
from dataclasses import dataclass

import numpy as np

from maggeo import spin as S
from maggeo.clifford import Signature
from maggeo.fields import TetradField, levi_civita_field, random_metric
from maggeo.presets import get_preset


@dataclass
class Config:
    samples: int = 5
    seed: int = 0


def coframe_jet_variant(gens, coframe, coframe_jets, Kg, y, y_jets):
    frame = np.linalg.inv(coframe)
    jet_term = np.einsum("bml,ma->lba", coframe_jets, frame)
    conn_term = np.einsum("lmn,bm,na->lba", Kg, coframe, frame)
    return y_jets + np.einsum("lba,baij,j->li", 0.5 * (jet_term - conn_term), gens.I, y)


def compare(metric, x, rng):
    sig = metric.signature
    rep = S.gamma_matrices(sig)
    gens = S.spin_generators(rep)
    lc = levi_civita_field(metric)
    co = TetradField(metric).coframe_jet(x)
    y = rng.normal(size=rep.dim) + 1j * rng.normal(size=rep.dim)
    dy = rng.normal(size=(sig.n, rep.dim)) + 1j * rng.normal(size=(sig.n, rep.dim))
    pt = S.spin_connection_at(rep, gens, metric, lc, x, rng)
    direct = dy + np.einsum("lij,j->li", pt.omega, y)
    frame_jets = S.vertical_covariant_differential(rep, gens, co.value, co.grad, lc.at(x), y, dy)
    variant = coframe_jet_variant(gens, co.value, co.grad, lc.at(x), y, dy)
    return float(np.max(np.abs(frame_jets - direct))), float(np.max(np.abs(variant - direct)))


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--samples", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    cfg = Config(args.samples, args.seed)
    rng = np.random.default_rng(cfg.seed)
    cases = [("sphere", get_preset("sphere").metric(), lambda: [rng.uniform(0.3, 2.8), rng.uniform(0, 6)])]
    cases.append(("schwarzschild", get_preset("schwarzschild").metric(), lambda: [0.0, rng.uniform(3, 10), rng.uniform(0.3, 2.8), 1.0]))
    for sig in (Signature(2, 0), Signature(1, 3), Signature(2, 2)):
        g = random_metric(sig, rng)
        cases.append((f"random {sig}", g, lambda n=sig.n: rng.uniform(-0.5, 0.5, n)))
    print(f"{'metric':<18}{'frame jets':>12}{'coframe jets':>14}")
    for name, metric, sample in cases:
        worst = np.zeros(2)
        for _ in range(cfg.samples):
            worst = np.maximum(worst, compare(metric, np.array(sample(), dtype=float), rng))
        print(f"{name:<18}{worst[0]:>12.1e}{worst[1]:>14.1e}")


if __name__ == "__main__":
    main()
