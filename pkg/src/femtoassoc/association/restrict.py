"""Candidate-set restrictions applied before the approximation schemes."""
from __future__ import annotations

import numpy as np

from ..model import MBS, ServiceTimeProblem


def _ratio(problem: ServiceTimeProblem) -> np.ndarray:
    return problem.t / problem.t_min[None, :]


def restrict_by_ratio(problem: ServiceTimeProblem, rho: float) -> ServiceTimeProblem:
    """Keep pairs with t[m, n] / t_min[n] <= rho (the fastest BS always survives)."""
    if not rho >= 1:
        raise ValueError(f"rho must be >= 1, got {rho}")
    return problem.masked(problem.allowed & (_ratio(problem) <= rho))


def restrict_by_ratio_with_mbs(problem: ServiceTimeProblem, gamma: float) -> ServiceTimeProblem:
    """Ratio restriction that always keeps the MBS when the user may use it."""
    if not gamma >= 1:
        raise ValueError(f"gamma must be >= 1, got {gamma}")
    keep = _ratio(problem) <= gamma
    keep[MBS] = True
    return problem.masked(problem.allowed & keep)


def restrict_by_time(problem: ServiceTimeProblem, lam: float) -> ServiceTimeProblem:
    """Keep pairs with t[m, n] <= lam, plus the MBS."""
    if not lam > 0:
        raise ValueError(f"lambda must be positive, got {lam}")
    keep = problem.t <= lam
    keep[MBS] = True
    return problem.masked(problem.allowed & keep)
