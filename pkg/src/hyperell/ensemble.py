"""Sampling and enumeration of H_{2g+1,q}, and batch pipelines writing JSON lines.

A batch file starts with one header line and then holds one record per
sampled D, in sample order.  Re-running the same configuration on an
existing file skips the indices already present.
"""

from __future__ import annotations

import json
import os
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from importlib import metadata
from pathlib import Path
from typing import Iterator

import numpy as np

from . import argument, fmodel, hybrid
from .characters import QuadraticCharacter
from .lfunction import LData, lpoly, trace_check
from .poly import Poly, _is_squarefree, _monic_tuples, check_budget

SCHEMA = "hyperell.run/1"
RNG_ID = "numpy.PCG64"
MAX_TRIES = 10**4

TOLERANCES = {
    "rh": 1e-8,
    "trace": 1e-8,
    "hybrid": 1e-9,
    "counting": 1e-8,
    "f_eq_l": 1e-10,
    "fk_residual": 1e-9,
}


def code_version() -> str:
    try:
        return metadata.version("hyperell")
    except metadata.PackageNotFoundError:
        return "unknown"


@dataclass(frozen=True)
class EnsembleConfig:
    q: int
    g: int
    sample_count: int = 10
    seed: int = 0
    K_list: tuple[int, ...] = (4, 8, 16)
    budget: int | None = None
    delta: float = 0.02
    hybrid_points: int = 16
    grid: int = 1024

    def __post_init__(self) -> None:
        from .ff_core import is_prime

        if self.q < 3 or not is_prime(self.q):
            raise ValueError(f"q must be an odd prime, got {self.q}")
        if self.g < 1:
            raise ValueError("g must be at least 1")
        if self.sample_count < 1:
            raise ValueError("sample_count must be at least 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        object.__setattr__(self, "K_list", tuple(int(k) for k in self.K_list))

    def header(self) -> dict:
        return {
            "type": "header", "schema": SCHEMA, "q": self.q, "g": self.g, "seed": self.seed,
            "rng_id": RNG_ID, "code_version": code_version(), "tolerances": TOLERANCES,
            "K_list": list(self.K_list), "sample_count": self.sample_count, "delta": self.delta,
        }


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def sample_D(cfg: EnsembleConfig, rng: np.random.Generator, stats: dict | None = None) -> Poly:
    """Uniform member of H_{2g+1,q} by rejection on square-freeness."""
    q, n = cfg.q, 2 * cfg.g + 1
    for tries in range(1, MAX_TRIES + 1):
        low = tuple(int(v) for v in rng.integers(0, q, n))
        c = low + (1,)
        if _is_squarefree(c, q):
            if stats is not None:
                stats["tries"] = stats.get("tries", 0) + tries
                stats["accepted"] = stats.get("accepted", 0) + 1
            return Poly(c, q)
    raise RuntimeError(f"no square-free sample after {MAX_TRIES} draws")


def sample_stream(cfg: EnsembleConfig) -> Iterator[Poly]:
    rng = make_rng(cfg.seed)
    for _ in range(cfg.sample_count):
        yield sample_D(cfg, rng)


def h_size(q: int, g: int) -> int:
    return q ** (2 * g + 1) - q ** (2 * g)


def enumerate_H(q: int, g: int, budget: int | None = None) -> Iterator[Poly]:
    """Every monic square-free D of degree 2g+1."""
    check_budget(q ** (2 * g + 1), f"enumerating H_{{{2 * g + 1},{q}}}", budget)
    for c in _monic_tuples(q, 2 * g + 1):
        if _is_squarefree(c, q):
            yield Poly(c, q)


# ---------------------------------------------------------------- per-D pipeline

@dataclass
class RunRecord:
    index: int
    D: list[int]
    status: str = "ok"
    reason: str | None = None
    coeffs: list[str] = field(default_factory=list)
    thetas: list[float] = field(default_factory=list)
    flags: list[str] = field(default_factory=list)
    rh_defect: float | None = None
    trace_defect_max: float | None = None
    hybrid_defect_max: float | None = None
    counting_defect_max: float | None = None
    f_eq_l_defect: float | None = None
    f_interior_margin: float | None = None
    sup_S: float | None = None
    s_ratio: float | None = None
    min_zero_gap: float | None = None
    fk_zero_counts: dict = field(default_factory=dict)
    fk_residual_max: dict = field(default_factory=dict)
    simple_fraction: dict = field(default_factory=dict)
    hausdorff: dict = field(default_factory=dict)
    clustering: dict = field(default_factory=dict)
    breaches: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"type": "record", **asdict(self)}

    @classmethod
    def from_json(cls, obj: dict) -> "RunRecord":
        obj = {k: v for k, v in obj.items() if k != "type"}
        return cls(**obj)


def run_one(cfg: EnsembleConfig, index: int, D: Poly) -> RunRecord:
    rec = RunRecord(index, list(D.coeffs))
    try:
        _pipeline(cfg, D, rec)
    except Exception as exc:  # recorded, batch continues
        rec.status = "error"
        rec.reason = f"{type(exc).__name__}: {exc}"
        rec.breaches.append("exception")
        if os.environ.get("HYPERELL_DEBUG"):
            traceback.print_exc()
    return rec


def _pipeline(cfg: EnsembleConfig, D: Poly, rec: RunRecord) -> None:
    ld: LData = lpoly(QuadraticCharacter(D))
    g = ld.g
    rec.coeffs = [str(c) for c in ld.coeffs]
    rec.thetas = [float(t) for t in ld.thetas]
    rec.flags = list(ld.flags)
    rec.rh_defect = float(max(abs(d) for d in ld.root_magnitude_defects))
    rec.trace_defect_max = max(trace_check(ld, n) for n in range(1, 2 * g + 1))

    rng = np.random.Generator(np.random.PCG64([cfg.seed, rec.index]))
    us = np.concatenate([hybrid.interior_points(ld, cfg.hybrid_points, rng),
                         hybrid.separated_circle_points(ld, cfg.hybrid_points)])
    rec.hybrid_defect_max = max(float(np.max(hybrid.hybrid_grid(ld, us, K))) for K in (0, 1, 2, 5, 10))

    th = np.concatenate([rng.uniform(0, 1, 256), ld.theta_array(), [0.0, 1.0]])
    if "zero_at_theta_0" not in ld.flags:
        rec.counting_defect_max = float(np.max(argument.counting_defect(ld, th)))
    scan = argument.s_bound_scan(ld, grid=cfg.grid)
    rec.sup_S, rec.s_ratio = scan["sup_S"], scan["ratio_S"]

    feq = fmodel.f_zero_equivalence(ld, grid=cfg.grid)
    rec.f_eq_l_defect = feq["F_eq_L_defect"]
    rec.f_interior_margin = feq["interior_margin"]
    rec.min_zero_gap = fmodel.min_zero_gap(ld)

    for K in cfg.K_list:
        z = fmodel.find_fk_zeros(ld, K)
        key = str(K)
        rec.fk_zero_counts[key] = z.count
        rec.fk_residual_max[key] = float(z.residuals.max()) if z.count else 0.0
        rec.simple_fraction[key] = 1.0 - fmodel.simplicity_stats(z)
        rec.hausdorff[key] = fmodel.hausdorff_circle(z.phis, ld.theta_array())
        try:
            rec.clustering[key] = fmodel.clustering_check(ld, K, cfg.delta, zeros=z)
        except fmodel.PreconditionError:
            rec.clustering[key] = None
        if z.count < 2 * g:
            rec.breaches.append(f"fk_count[{K}]")
        if rec.clustering[key] is False:
            rec.breaches.append(f"clustering[{K}]")

    checks = {
        "rh": rec.rh_defect, "trace": rec.trace_defect_max, "hybrid": rec.hybrid_defect_max,
        "counting": rec.counting_defect_max, "f_eq_l": rec.f_eq_l_defect,
        "fk_residual": max(rec.fk_residual_max.values(), default=0.0),
    }
    for name, value in checks.items():
        if value is not None and not value < TOLERANCES[name]:
            rec.breaches.append(name)
    if not rec.f_interior_margin > 0:
        rec.breaches.append("f_interior_margin")
    if rec.breaches:
        rec.status = "breach"


# ---------------------------------------------------------------- batch driver

def read_batch(path: str | os.PathLike) -> tuple[dict | None, list[RunRecord]]:
    header, records = None, []
    p = Path(path)
    if not p.exists():
        return None, []
    with p.open() as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError:
                break  # torn final line after a kill
            if obj.get("type") == "header":
                if obj.get("schema") != SCHEMA:
                    raise ValueError(f"{path}: unsupported schema {obj.get('schema')!r}")
                header = obj
            elif obj.get("type") == "record":
                records.append(RunRecord.from_json(obj))
    return header, records


def _job(args):
    cfg, index, coeffs = args
    return run_one(cfg, index, Poly(tuple(coeffs), cfg.q))


def _compatible(header: dict, cfg: EnsembleConfig) -> bool:
    keys = ("q", "g", "seed", "rng_id", "K_list", "delta")
    mine = cfg.header()
    return all(header.get(k) == mine[k] for k in keys)


def batch_run(cfg: EnsembleConfig, out: str | os.PathLike, workers: int = 1,
              Ds: list[Poly] | None = None) -> list[RunRecord]:
    """Run the pipeline for each sampled (or given) D and append records to ``out``.

    Returns the records written by this call, in input order.
    """
    out = Path(out)
    header, done = read_batch(out)
    if header is not None and not _compatible(header, cfg):
        raise ValueError(f"{out} was written with a different configuration")
    seen = {r.index for r in done}
    if header is None:
        # drop any torn content and start fresh
        out.write_text(json.dumps(cfg.header()) + "\n")
    else:
        _rewrite_clean(out, header, done)
    todo = list(enumerate(Ds if Ds is not None else sample_stream(cfg)))
    jobs = [(cfg, i, list(D.coeffs)) for i, D in todo if i not in seen]
    written: list[RunRecord] = []
    with out.open("a") as fh:
        if workers > 1 and len(jobs) > 1:
            with ProcessPoolExecutor(max_workers=workers) as ex:
                results = ex.map(_job, jobs)  # yields in submission order
                for rec in results:
                    fh.write(json.dumps(rec.to_json()) + "\n")
                    fh.flush()
                    written.append(rec)
        else:
            for job in jobs:
                rec = _job(job)
                fh.write(json.dumps(rec.to_json()) + "\n")
                fh.flush()
                written.append(rec)
    return written


def _rewrite_clean(path: Path, header: dict, records: list[RunRecord]) -> None:
    lines = [json.dumps(header)] + [json.dumps(r.to_json()) for r in records]
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text("\n".join(lines) + "\n")
    tmp.replace(path)


def acceptance_ratio(q: int, g: int, draws: int, seed: int = 0) -> float:
    cfg = EnsembleConfig(q, g, seed=seed)
    rng = make_rng(seed)
    hits = 0
    for _ in range(draws):
        c = tuple(int(v) for v in rng.integers(0, q, 2 * g + 1)) + (1,)
        hits += _is_squarefree(c, cfg.q)
    return hits / draws


def square_free_density(q: int) -> float:
    return 1 - 1 / q


__all__ = [
    "EnsembleConfig", "RunRecord", "TOLERANCES", "SCHEMA", "RNG_ID",
    "sample_D", "sample_stream", "enumerate_H", "h_size", "batch_run", "read_batch",
    "run_one", "acceptance_ratio", "square_free_density", "make_rng",
]
