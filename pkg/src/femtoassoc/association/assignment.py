from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..model import ServiceTimeProblem


class InfeasibleAssignmentError(ValueError):
    pass


@dataclass(frozen=True)
class Assignment:
    """Integral user -> BS map with the resulting per-BS loads (seconds)."""

    bs_of: tuple[int, ...]
    loads: np.ndarray = field(compare=False)  # derived from bs_of
    makespan: float
    algorithm: str

    @classmethod
    def from_bs_of(cls, problem: ServiceTimeProblem, bs_of: Sequence[int], algorithm: str) -> "Assignment":
        bs_of = tuple(int(m) for m in bs_of)
        if len(bs_of) != problem.num_users:
            raise InfeasibleAssignmentError(f"{len(bs_of)} assignments for {problem.num_users} users")
        t = problem.t
        loads = np.zeros(problem.num_bs)
        for n, m in enumerate(bs_of):
            if not (0 <= m < problem.num_bs) or not np.isfinite(t[m, n]):
                raise InfeasibleAssignmentError(f"user {n} cannot connect to BS {m}")
            loads[m] += t[m, n]
        loads.setflags(write=False)
        return cls(bs_of=bs_of, loads=loads, makespan=float(loads.max()), algorithm=algorithm)

    def users_of(self, m: int) -> list[int]:
        return [n for n, b in enumerate(self.bs_of) if b == m]

    def max_ratio(self, problem: ServiceTimeProblem) -> float:
        """Largest t[m, n] / t_min[n] over the assigned pairs."""
        idx = np.arange(problem.num_users)
        return float((problem.t[list(self.bs_of), idx] / problem.t_min).max())

    def to_records(self, problem: ServiceTimeProblem) -> list[dict]:
        """One record per user: 1-based user id, 1-based BS id (1 = MBS), service time."""
        return [
            {"user_id": n + 1, "bs_id": m + 1, "service_time_s": float(problem.t[m, n])}
            for n, m in enumerate(self.bs_of)
        ]

    @classmethod
    def from_records(cls, problem: ServiceTimeProblem, records, algorithm: str) -> "Assignment":
        bs_of = [0] * problem.num_users
        for rec in records:
            bs_of[int(rec["user_id"]) - 1] = int(rec["bs_id"]) - 1
        return cls.from_bs_of(problem, bs_of, algorithm)
