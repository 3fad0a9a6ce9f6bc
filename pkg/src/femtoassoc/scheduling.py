"""Per-BS service order and waiting-time statistics.

"Waiting time" here is the completion time of a user's packet: the sum of
the service times of everyone served before it *and its own*.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .association.assignment import Assignment
from .model import ServiceTimeProblem


def waiting_time(order: Sequence[int], times: Sequence[float]) -> float:
    """Average completion time when ``times`` (aligned with ``order``) are served in sequence."""
    if len(order) != len(times):
        raise ValueError(f"order has {len(order)} users but {len(times)} service times")
    if not len(times):
        return 0.0
    return float(np.cumsum(np.asarray(times, dtype=float)).mean())


@dataclass(frozen=True)
class Schedule:
    orders: tuple[tuple[int, ...], ...]
    completion: np.ndarray
    bs_average: np.ndarray
    average: float
    policy: str

    def __post_init__(self):
        self.completion.setflags(write=False)
        self.bs_average.setflags(write=False)


def _build(assignment: Assignment, problem: ServiceTimeProblem, orders, policy: str) -> Schedule:
    t = problem.t
    completion = np.zeros(problem.num_users)
    bs_avg = np.zeros(problem.num_bs)
    for m, order in enumerate(orders):
        if order:
            done = np.cumsum(t[m, list(order)])
            completion[list(order)] = done
            bs_avg[m] = done.mean()
    return Schedule(
        orders=tuple(tuple(o) for o in orders),
        completion=completion,
        bs_average=bs_avg,
        average=float(completion.mean()),
        policy=policy,
    )


def spt_schedule(assignment: Assignment, problem: ServiceTimeProblem) -> Schedule:
    """Shortest service time first at every BS; ties by user index."""
    t = problem.t
    orders = [sorted(assignment.users_of(m), key=lambda n: (t[m, n], n)) for m in range(problem.num_bs)]
    return _build(assignment, problem, orders, "spt")


def random_order(assignment: Assignment, problem: ServiceTimeProblem, seed: int) -> Schedule:
    """Uniformly random service order at every BS."""
    rng = np.random.default_rng(seed)
    orders = []
    for m in range(problem.num_bs):
        users = assignment.users_of(m)
        orders.append([users[i] for i in rng.permutation(len(users))])
    return _build(assignment, problem, orders, "random")
