from __future__ import annotations

import numpy as np

from ..model import ServiceTimeProblem
from .assignment import Assignment


def selfish(problem: ServiceTimeProblem) -> Assignment:
    """Every user joins its best-channel BS, i.e. the one with the smallest t."""
    return Assignment.from_bs_of(problem, np.argmin(problem.t, axis=0).tolist(), "selfish")
