"""Exhaustive optimum and the simple lower bounds on it."""
from __future__ import annotations

import math

import numpy as np

from ..model import ServiceTimeProblem
from .assignment import Assignment

MAX_ENUMERATION = 10**7


class InstanceTooLargeError(ValueError):
    pass


def brute_force_optimal(problem: ServiceTimeProblem) -> Assignment:
    """Minimum-makespan assignment by exhaustive search.

    Assignments are explored in lexicographic order of the ``bs_of`` vector
    and a branch is cut once its partial makespan reaches the incumbent, so
    the lexicographically smallest optimum is returned.
    """
    cands = [list(c) for c in problem.candidate_bs]
    size = math.prod(len(c) for c in cands)
    if size > MAX_ENUMERATION:
        raise InstanceTooLargeError(f"{size} candidate assignments exceed {MAX_ENUMERATION}")
    t = problem.t.tolist()
    N = problem.num_users
    loads = [0.0] * problem.num_bs
    choice = [0] * N
    best = [math.inf, None]

    def visit(n: int, partial: float) -> None:
        if n == N:
            if partial < best[0]:
                best[0] = partial
                best[1] = list(choice)
            return
        for m in cands[n]:
            old = loads[m]
            span = max(partial, old + t[m][n])
            if span >= best[0]:
                continue
            loads[m] = old + t[m][n]
            choice[n] = m
            visit(n + 1, span)
            loads[m] = old

    visit(0, 0.0)
    return Assignment.from_bs_of(problem, best[1], "optimal")


def lower_bounds(problem: ServiceTimeProblem) -> tuple[float, float]:
    """(mean bound, max bound): sum(t_min) / M and max(t_min)."""
    t_min = problem.t_min
    return float(t_min.sum() / problem.num_bs), float(np.max(t_min))
