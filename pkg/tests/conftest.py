from __future__ import annotations

from functools import lru_cache

import numpy as np
import pytest

from hyperell.characters import QuadraticCharacter
from hyperell.ensemble import EnsembleConfig, make_rng, sample_D
from hyperell.lfunction import LData, lpoly
from hyperell.poly import Poly, parse_poly


@lru_cache(maxsize=None)
def sampled_Ds(q: int, g: int, count: int, seed: int = 2024) -> tuple[Poly, ...]:
    cfg = EnsembleConfig(q, g, seed=seed)
    rng = make_rng(seed)
    return tuple(sample_D(cfg, rng) for _ in range(count))


@lru_cache(maxsize=None)
def ldata_for(D: Poly) -> LData:
    return lpoly(QuadraticCharacter(D))


def sampled_ldata(q: int, g: int, count: int, seed: int = 2024) -> list[LData]:
    return [ldata_for(D) for D in sampled_Ds(q, g, count, seed)]


@pytest.fixture(scope="session")
def genus_one() -> LData:
    return ldata_for(parse_poly("x^3+2*x+1", 3))


@pytest.fixture(scope="session")
def small_family() -> list[LData]:
    """A handful of D over F_3 and F_5 with g = 2, 3, 4."""
    out = []
    for q, g, n in ((3, 2, 3), (3, 3, 3), (5, 2, 2), (3, 4, 2)):
        out += sampled_ldata(q, g, n, seed=11)
    return out


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)


ACCEPTANCE_LINES: dict[int, str] = {}


def record_criterion(number: int, ok: bool, detail: str) -> bool:
    line = f"CRITERION {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES[number] = line
    print(line, flush=True)
    return ok


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[n])
