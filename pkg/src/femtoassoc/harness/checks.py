"""Randomized oracle campaign: small instances checked against exhaustive search."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..association import (
    brute_force_optimal,
    greedy,
    lower_bounds,
    randomized_reduce,
    rounding_approximation,
    selfish,
    sequential_fixing,
)
from ..lpcore import FEAS_TOL, solve_rlp
from ..model import ServiceTimeProblem
from ..scheduling import waiting_time

REL = 1e-9


def random_problem(
    rng: np.random.Generator,
    num_bs: int,
    num_users: int,
    low: float = 1e-4,
    high: float = 1e-2,
    closed_prob: Optional[float] = None,
) -> ServiceTimeProblem:
    """Service times log-uniform on [low, high]; optional closed-access lists (BS 0 always allowed)."""
    t = np.exp(rng.uniform(np.log(low), np.log(high), size=(num_bs, num_users)))
    if closed_prob is not None:
        keep = rng.random((num_bs, num_users)) < closed_prob
        keep[0] = True
        t = np.where(keep, t, np.inf)
    return ServiceTimeProblem(t)


def lp_violations(problem: ServiceTimeProblem, sol) -> int:
    x, t = sol.x, problem.t
    bad = 0
    bad += int(np.any(np.abs(x.sum(axis=0) - 1.0) > FEAS_TOL))
    bad += int(np.any(x < -FEAS_TOL))
    bad += int(np.any(x[~problem.allowed] != 0.0))
    loads = (np.where(problem.allowed, t, 0.0) * x).sum(axis=1)
    bad += int(np.any(loads > sol.T + FEAS_TOL))
    return bad


def spt_is_optimal(times) -> bool:
    spt = waiting_time(range(len(times)), sorted(times))
    best = min(waiting_time(range(len(times)), list(p)) for p in itertools.permutations(times))
    return spt == best


@dataclass
class CampaignReport:
    trials: int = 0
    violations: dict[str, int] = field(default_factory=dict)

    def add(self, name: str, failed: bool) -> None:
        self.violations[name] = self.violations.get(name, 0) + int(bool(failed))

    @property
    def ok(self) -> bool:
        return not any(self.violations.values())


def run_oracle_campaign(trials: int, max_users: int = 8, seed: int = 0, rho: float = 5.0) -> CampaignReport:
    rng = np.random.default_rng(seed)
    report = CampaignReport()
    for _ in range(trials):
        M = int(rng.integers(2, 4))
        N = int(rng.integers(min(4, max_users), max_users + 1))
        problem = random_problem(rng, M, N)
        opt = brute_force_optimal(problem).makespan
        tol = REL * opt
        g = greedy(problem)
        report.add("greedy <= 2 rho T*", g.makespan > 2 * g.max_ratio(problem) * opt + tol)
        report.add("rounding <= (rho+1) T*", rounding_approximation(problem, rho).makespan > (rho + 1) * opt + tol)

        mean_lb, max_lb = lower_bounds(problem)
        lp = solve_rlp(problem)
        report.add("mean bound <= T*", mean_lb > opt + tol)
        report.add("max bound <= T*", max_lb > opt + tol)
        report.add("RLP T <= T*", lp.T > opt + tol)
        report.add("RLP T >= mean bound", lp.T < mean_lb - tol)
        report.add("LP constraints", lp_violations(problem, lp) > 0)
        for algo in (g, sequential_fixing(problem), selfish(problem), rounding_approximation(problem, rho)):
            report.add("algorithms >= T*", algo.makespan < opt - tol)

        state = randomized_reduce(problem, float(np.median(problem.t)))
        p = state.p
        report.add("sum p = 1", np.any(np.abs(p.sum(axis=0) - 1.0) > 1e-9))
        pt = np.where(state.mask, p * problem.t, np.nan)
        spread = np.nanmax(pt, axis=0) - np.nanmin(pt, axis=0)
        report.add("p t constant", np.any(spread > 1e-9 * state.H))
        report.add("phase II monotone", np.any(np.diff(state.history) > 1e-12 * state.history[0]))
        report.add("expected-load bound", state.max_expected_load > state.load_bound() * (1 + REL))

        times = rng.uniform(0.1, 10.0, size=int(rng.integers(1, 8))).tolist()
        report.add("SPT optimal", not spt_is_optimal(times))
        report.trials += 1
    return report
