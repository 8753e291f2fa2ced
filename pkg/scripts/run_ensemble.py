"""Run batch ensembles for several (q, g) and write a markdown report."""

import argparse
from pathlib import Path

from hyperell.ensemble import EnsembleConfig, batch_run
from hyperell.report import build_report, render


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=Path("results/ensemble"))
    ap.add_argument("--q", type=int, default=3)
    ap.add_argument("--genera", type=int, nargs="+", default=[2, 3, 4])
    ap.add_argument("--samples", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    paths = []
    for g in args.genera:
        cfg = EnsembleConfig(args.q, g, sample_count=args.samples, seed=args.seed, K_list=(4, 8, 16, 64))
        path = args.out / f"q{args.q}_g{g}_seed{args.seed}.jsonl"
        recs = batch_run(cfg, path, workers=args.workers)
        print(f"{path}: {len(recs)} new records")
        paths.append(path)
    text = render(build_report(paths), "markdown")
    (args.out / "report.md").write_text(text)
    print(text)


if __name__ == "__main__":
    main()
