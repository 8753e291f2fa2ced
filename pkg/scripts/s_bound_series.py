"""sup |S| and sup |S_K| against g / log_q g for a range of genera."""

import argparse
import json

from hyperell.argument import s_bound_scan
from hyperell.characters import QuadraticCharacter
from hyperell.ensemble import EnsembleConfig, sample_stream
from hyperell.lfunction import lpoly


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--q", type=int, default=3)
    ap.add_argument("--genera", type=int, nargs="+", default=[2, 3, 4, 5, 6, 8])
    ap.add_argument("--samples", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--grid", type=int, default=4096)
    args = ap.parse_args()
    print("g  K  mean_ratio_S  max_ratio_S  max_ratio_S_K")
    rows = []
    for g in args.genera:
        cfg = EnsembleConfig(args.q, g, sample_count=args.samples, seed=args.seed)
        scans = [s_bound_scan(lpoly(QuadraticCharacter(D)), grid=args.grid) for D in sample_stream(cfg)]
        rs = [s["ratio_S"] for s in scans]
        rsk = [s["ratio_S_K"] for s in scans]
        rows.append({"g": g, "K": scans[0]["K"], "ratio_S": rs, "ratio_S_K": rsk})
        print(f"{g:<2} {scans[0]['K']:<2} {sum(rs) / len(rs):12.4f} {max(rs):12.4f} {max(rsk):13.4f}")
    print(json.dumps({"q": args.q, "rows": rows}))


if __name__ == "__main__":
    main()
