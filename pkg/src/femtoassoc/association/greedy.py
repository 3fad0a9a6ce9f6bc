from __future__ import annotations

import numpy as np

from ..model import ServiceTimeProblem
from .assignment import Assignment


def greedy(problem: ServiceTimeProblem) -> Assignment:
    """Least-loaded BS takes its fastest remaining user, N times.

    Only BSs that some remaining user may still join compete for the
    minimum load. Ties go to the lowest BS index, then the lowest user.
    """
    t = problem.t
    M, N = t.shape
    loads = np.zeros(M)
    remaining = np.ones(N, dtype=bool)
    bs_of = [-1] * N
    for _ in range(N):
        wanted = np.isfinite(t[:, remaining]).any(axis=1)
        if not wanted.any():
            raise RuntimeError("users remain but no BS can serve them")
        m = int(np.argmin(np.where(wanted, loads, np.inf)))
        row = np.where(remaining, t[m], np.inf)
        n = int(np.argmin(row))
        bs_of[n] = m
        loads[m] += t[m, n]
        remaining[n] = False
    return Assignment.from_bs_of(problem, bs_of, "greedy")
