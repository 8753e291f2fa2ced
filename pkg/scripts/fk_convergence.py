"""Zeros of F_K: counts, residuals and Hausdorff distance to the zeros of L as K grows."""

import argparse

from hyperell.characters import QuadraticCharacter
from hyperell.ensemble import EnsembleConfig, sample_stream
from hyperell.fmodel import find_fk_zeros, hausdorff_circle
from hyperell.lfunction import lpoly


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--q", type=int, default=3)
    ap.add_argument("--g", type=int, default=3)
    ap.add_argument("--samples", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--Ks", type=int, nargs="+", default=[4, 8, 16, 32, 64, 128])
    args = ap.parse_args()
    cfg = EnsembleConfig(args.q, args.g, sample_count=args.samples, seed=args.seed)
    print("D  K  count  max_residual  hausdorff")
    for D in sample_stream(cfg):
        ld = lpoly(QuadraticCharacter(D))
        for K in args.Ks:
            z = find_fk_zeros(ld, K)
            h = hausdorff_circle(z.phis, ld.theta_array())
            print(f"{D.coeffs} {K:4d} {z.count:4d} {z.residuals.max():12.2e} {h:10.3e}")


if __name__ == "__main__":
    main()
