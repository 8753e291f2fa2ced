"""Aggregate batch JSON-lines files into per-(q, g, K) tables.

Every aggregate is a max, min, count or an fsum over sorted values, so the
result does not depend on the order of records or files.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

from .ensemble import SCHEMA as RUN_SCHEMA
from .ensemble import read_batch

SCHEMA = "hyperell.report/1"

COLUMNS = [
    "q", "g", "K", "records", "errors", "breaches",
    "rh_defect_max", "trace_defect_max", "hybrid_defect_max", "counting_defect_max",
    "f_eq_l_defect_max", "f_interior_margin_min",
    "fk_count_min", "fk_count_over_2g_min", "fk_residual_max",
    "clustering_pass", "clustering_applicable", "simple_fraction_mean", "simple_fraction_min",
    "hausdorff_mean", "sup_S_max", "s_ratio_mean", "s_ratio_max", "seeds",
]


@dataclass
class Report:
    rows: list[dict] = field(default_factory=list)
    sources: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"schema": SCHEMA, "sources": self.sources, "rows": self.rows}


def _max(vals):
    vals = [v for v in vals if v is not None]
    return max(vals) if vals else None


def _min(vals):
    vals = [v for v in vals if v is not None]
    return min(vals) if vals else None


def _mean(vals):
    vals = sorted(v for v in vals if v is not None)
    return math.fsum(vals) / len(vals) if vals else None


def build_report(paths) -> Report:
    groups: dict[tuple[int, int], list] = {}
    seeds: dict[tuple[int, int], set] = {}
    sources = []
    for path in paths:
        header, records = read_batch(path)
        if header is None:
            if records:
                raise ValueError(f"{path}: records without a header")
            continue
        if header.get("schema") != RUN_SCHEMA:
            raise ValueError(f"{path}: schema {header.get('schema')!r}, expected {RUN_SCHEMA!r}")
        key = (header["q"], header["g"])
        groups.setdefault(key, []).extend(records)
        seeds.setdefault(key, set()).add(header["seed"])
        sources.append(str(path))

    rows = []
    for (q, g) in sorted(groups):
        recs = sorted(groups[(q, g)], key=lambda r: (r.D, r.index))
        Ks = sorted({int(k) for r in recs for k in r.fk_zero_counts})
        for K in Ks or [None]:
            k = str(K)
            counts = [r.fk_zero_counts.get(k) for r in recs]
            clus = [r.clustering.get(k) for r in recs]
            rows.append({
                "q": q, "g": g, "K": K,
                "records": len(recs),
                "errors": sum(r.status == "error" for r in recs),
                "breaches": sum(r.status == "breach" for r in recs),
                "rh_defect_max": _max(r.rh_defect for r in recs),
                "trace_defect_max": _max(r.trace_defect_max for r in recs),
                "hybrid_defect_max": _max(r.hybrid_defect_max for r in recs),
                "counting_defect_max": _max(r.counting_defect_max for r in recs),
                "f_eq_l_defect_max": _max(r.f_eq_l_defect for r in recs),
                "f_interior_margin_min": _min(r.f_interior_margin for r in recs),
                "fk_count_min": _min(counts),
                "fk_count_over_2g_min": None if _min(counts) is None else _min(counts) / (2 * g),
                "fk_residual_max": _max(r.fk_residual_max.get(k) for r in recs),
                "clustering_pass": sum(c is True for c in clus),
                "clustering_applicable": sum(c is not None for c in clus),
                "simple_fraction_mean": _mean(r.simple_fraction.get(k) for r in recs),
                "simple_fraction_min": _min(r.simple_fraction.get(k) for r in recs),
                "hausdorff_mean": _mean(r.hausdorff.get(k) for r in recs),
                "sup_S_max": _max(r.sup_S for r in recs),
                "s_ratio_mean": _mean(r.s_ratio for r in recs),
                "s_ratio_max": _max(r.s_ratio for r in recs),
                "seeds": " ".join(str(s) for s in sorted(seeds[(q, g)])),
            })
    return Report(rows, sorted(sources))


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return f"{v:.3g}"
    return str(v)


def render(report: Report, fmt: str = "markdown") -> str:
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=COLUMNS, lineterminator="\n")
        w.writeheader()
        for row in report.rows:
            w.writerow({c: ("" if row[c] is None else row[c]) for c in COLUMNS})
        return buf.getvalue()
    if fmt != "markdown":
        raise ValueError(f"unknown format {fmt!r}")
    if not report.rows:
        return "# Verification report\n\nNo records.\n"
    out = ["# Verification report", "", f"Sources: {', '.join(report.sources)}", ""]
    tables = {
        "Identity defects": ["q", "g", "records", "errors", "breaches", "rh_defect_max",
                             "trace_defect_max", "hybrid_defect_max", "counting_defect_max",
                             "f_eq_l_defect_max", "f_interior_margin_min"],
        "F_K zeros": ["q", "g", "K", "fk_count_min", "fk_count_over_2g_min", "fk_residual_max",
                      "clustering_pass", "clustering_applicable", "simple_fraction_mean",
                      "simple_fraction_min", "hausdorff_mean"],
        "Argument bound": ["q", "g", "sup_S_max", "s_ratio_mean", "s_ratio_max", "seeds"],
    }
    for title, cols in tables.items():
        out += [f"## {title}", "", "| " + " | ".join(cols) + " |",
                "|" + "---|" * len(cols)]
        seen = set()
        for row in report.rows:
            cells = tuple(_fmt(row[c]) for c in cols)
            if "K" not in cols and cells in seen:
                continue  # K-independent tables get one row per (q, g)
            seen.add(cells)
            out.append("| " + " | ".join(cells) + " |")
        out.append("")
    return "\n".join(out)


__all__ = ["Report", "build_report", "render", "COLUMNS", "SCHEMA"]
