"""Evaluation quantities: makespan, waiting time, Jain fairness, bounds."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .association.assignment import Assignment
from .association.oracle import lower_bounds
from .model import Scenario, ServiceTimeProblem, capacity_matrix
from .scheduling import Schedule


def jain_index(throughputs: Sequence[float]) -> float:
    """(sum C)^2 / (N sum C^2); 1/N for a single active user, 1 when all equal."""
    c = np.asarray(throughputs, dtype=float)
    if c.size == 0 or np.any(c < 0):
        raise ValueError("throughputs must be a nonempty nonnegative sequence")
    top = float(c.max())
    if top == 0:
        raise ValueError("all throughputs are zero")
    c = c / top  # scale-free; avoids under/overflow in the squares
    return float(c.sum() ** 2 / (c.size * np.sum(c * c)))


@dataclass(frozen=True)
class RunReport:
    algorithm: str
    makespan: float
    waiting_time: float
    jain: float
    mean_bound: float
    max_bound: float
    runtime: float = field(default=0.0, compare=False)
    seed: Optional[int] = None
    scenario: str = ""


def evaluate(
    assignment: Assignment,
    schedule: Schedule,
    problem: ServiceTimeProblem,
    scenario: Scenario,
    *,
    runtime: float = 0.0,
    seed: Optional[int] = None,
    descriptor: str = "",
    makespan: Optional[float] = None,
) -> RunReport:
    """Roll one algorithm run up into a report.

    Per-user throughput is the link capacity of the serving BS, evaluated
    before any time sharing. ``makespan`` overrides the assignment's own
    value (used for the randomized scheme's expected maximum load).
    """
    cap = capacity_matrix(scenario)
    throughput = cap[list(assignment.bs_of), np.arange(problem.num_users)]
    mean_lb, max_lb = lower_bounds(problem)
    return RunReport(
        algorithm=assignment.algorithm,
        makespan=assignment.makespan if makespan is None else float(makespan),
        waiting_time=schedule.average,
        jain=jain_index(throughput),
        mean_bound=mean_lb,
        max_bound=max_lb,
        runtime=runtime,
        seed=seed,
        scenario=descriptor,
    )
