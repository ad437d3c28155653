"""Shared generators for the tests."""

import numpy as np

from smoothfrechet import PiecewiseCurve


def random_curve(rng, pieces, degree, dim=2, step=1.0):
    start = rng.normal(size=dim)
    out = []
    for _ in range(pieces):
        cp = np.vstack([start, start + np.cumsum(rng.normal(scale=step / degree,
                                                            size=(degree, dim)), axis=0)])
        out.append(cp)
        start = cp[-1]
    return PiecewiseCurve(out)


def mixed_curve(rng, pieces: int, dim: int = 2, max_degree: int = 3) -> PiecewiseCurve:
    """C0 chain of pieces with random degrees in ``1..max_degree``."""
    start = rng.normal(size=dim)
    out = []
    for _ in range(pieces):
        k = int(rng.integers(1, max_degree + 1))
        cp = np.vstack([start, start + np.cumsum(rng.normal(scale=1.0 / k, size=(k, dim)), axis=0)])
        out.append(cp)
        start = cp[-1]
    return PiecewiseCurve(out)


# one line per acceptance criterion, printed in the terminal summary
ACCEPTANCE: list[str] = []


def record(number: int, ok: bool, detail: str) -> bool:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}"
    ACCEPTANCE.append(line)
    print(line)
    return ok
