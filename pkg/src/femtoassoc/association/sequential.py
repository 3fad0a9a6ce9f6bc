from __future__ import annotations

from ..lpcore import FEAS_TOL, Fixings, solve_rlp
from ..model import ServiceTimeProblem
from .assignment import Assignment


class InfeasibleProblemError(RuntimeError):
    pass


def sequential_fixing(problem: ServiceTimeProblem, *, rule: str = "dantzig") -> Assignment:
    """Solve the relaxation, round the fractional variable nearest an integer, repeat.

    Only strictly fractional variables of unfixed users are rounded; once the
    relaxation is integral on every unfixed user, its support is the answer.
    A variable at exactly 0.5 rounds up. Near-ties (1e-12) go to the lowest
    BS index, then the lowest user index.
    """
    fixings = Fixings()
    N = problem.num_users
    while len(fixings.one) < N:
        sol = solve_rlp(problem, fixings, rule=rule)
        if not sol.optimal:
            raise InfeasibleProblemError("relaxation infeasible under current fixings")
        x = sol.x
        best = None
        for n in range(N):
            if n in fixings.one:
                continue
            for m in problem.candidate_bs[n]:
                v = x[m, n]
                if FEAS_TOL < v < 1.0 - FEAS_TOL:
                    key = (round(min(v, 1.0 - v), 12), m, n)
                    if best is None or key < best:
                        best = key
        if best is None:
            for n in range(N):
                if n not in fixings.one:
                    m = max(problem.candidate_bs[n], key=lambda k: (x[k, n], -k))
                    fixings = fixings.with_one(m, n)
            break
        _, m, n = best
        fixings = fixings.with_one(m, n) if x[m, n] >= 0.5 - 1e-12 else fixings.with_zero(m, n)
    bs_of = [fixings.one[n] for n in range(N)]
    return Assignment.from_bs_of(problem, bs_of, "sequential_fixing")
