"""Sup errors of L/P_K and F/F_K on the disk and circle sets as K doubles.

Also prints the nested series, where the disk radius stays fixed at the
smallest K.
"""

import argparse
import math

from hyperell.characters import QuadraticCharacter
from hyperell.ensemble import EnsembleConfig, sample_stream
from hyperell.fmodel import fk_truncation_profile
from hyperell.hybrid import profile_series, weakly_decreasing
from hyperell.lfunction import lpoly


def show(name, profs):
    errs = " ".join(f"{p.sup_error:.3e}" for p in profs)
    tag = "monotone" if weakly_decreasing([p.sup_error for p in profs]) else "NOT monotone"
    print(f"  {name:<14} {errs}  max ratio {max(p.ratio for p in profs):.3f}  {tag}")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--q", type=int, default=3)
    ap.add_argument("--g", type=int, default=3)
    ap.add_argument("--samples", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--C", type=float, default=1.0)
    ap.add_argument("--c", type=float, default=0.5)
    args = ap.parse_args()
    g = args.g
    Kd = [math.ceil(2 * args.C * math.log(g)) * 2**i for i in range(5)]
    Kc = [math.ceil(g * g / args.c) * 2**i for i in range(4)]
    cfg = EnsembleConfig(args.q, g, sample_count=args.samples, seed=args.seed)
    for D in sample_stream(cfg):
        ld = lpoly(QuadraticCharacter(D))
        print(f"D = {D.coeffs}  disk K {Kd}  circle K {Kc}")
        show("L disk", profile_series(ld, Kd, C=args.C))
        show("L disk nested", profile_series(ld, Kd, nested=True, C=args.C))
        show("L circle", profile_series(ld, Kc, c=args.c))
        show("F disk", [fk_truncation_profile(ld, K, C=args.C) for K in Kd])
        show("F circle", [fk_truncation_profile(ld, K, c=args.c) for K in Kc])


if __name__ == "__main__":
    main()
