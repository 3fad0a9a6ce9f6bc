"""Relaxed linear program for min-makespan association, on a dense simplex.

The LP over variables (T, x[m, n]) is

    min T
    s.t. sum_m x[m, n] = 1            for every unfixed user n
         sum_n t[m, n] x[m, n] + c_m <= T   for every BS m
         x >= 0, x = 0 off the candidate pairs

where ``c_m`` is the load already committed to BS m by users fixed to it.
"""
from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import Mapping, Optional

import numpy as np

from .model import ServiceTimeProblem

FEAS_TOL = 1e-9
_PIVOT_TOL = 1e-11


class LPError(RuntimeError):
    pass


class NumericalFailure(LPError):
    """The simplex loop exceeded its iteration guard or lost feasibility."""


class UnboundedError(LPError):
    pass


@dataclass
class SimplexResult:
    x: np.ndarray
    objective: float
    basis: list[int]
    iterations: int


def _pivot(tab: np.ndarray, row: int, col: int) -> None:
    tab[row] /= tab[row, col]
    factor = tab[:, col].copy()
    factor[row] = 0.0
    tab -= np.outer(factor, tab[row])


def _canonical_tableau(c, A, b, basis):
    m, n = A.shape
    B = A[:, basis]
    body = np.linalg.solve(B, np.hstack([A, b[:, None]]))
    tab = np.empty((m + 1, n + 1))
    tab[:m] = body
    tab[m, :n] = c - c[basis] @ body[:, :n]
    tab[m, n] = -c[basis] @ body[:, n]
    return tab


def _iterate(tab, basis, max_iter, rule):
    """Primal simplex pivots on a canonical tableau, in place."""
    m = tab.shape[0] - 1
    n = tab.shape[1] - 1
    iterations = 0
    degenerate_run = 0
    while True:
        reduced = tab[m, :n]
        negative = np.flatnonzero(reduced < -_PIVOT_TOL)
        if negative.size == 0:
            return iterations
        if iterations >= max_iter:
            raise NumericalFailure(f"simplex did not converge in {max_iter} pivots")
        use_bland = rule == "bland" or degenerate_run >= 8
        if use_bland:
            col = int(negative[0])
        else:
            col = int(negative[np.argmin(reduced[negative])])
        column = tab[:m, col]
        rows = np.flatnonzero(column > _PIVOT_TOL)
        if rows.size == 0:
            raise UnboundedError("objective unbounded below")
        ratios = tab[rows, n] / column[rows]
        best = ratios.min()
        ties = rows[ratios <= best + 1e-12 * max(1.0, abs(best))]
        # leaving variable: smallest basic index among ties (Bland)
        row = int(min(ties, key=lambda r: basis[r]))
        degenerate_run = degenerate_run + 1 if best <= 1e-12 else 0
        _pivot(tab, row, col)
        basis[row] = col
        iterations += 1


def simplex(
    c: np.ndarray,
    A: np.ndarray,
    b: np.ndarray,
    basis: Optional[list[int]] = None,
    *,
    rule: str = "dantzig",
    max_iter: Optional[int] = None,
) -> SimplexResult:
    """Minimize ``c @ x`` subject to ``A @ x == b``, ``x >= 0``.

    ``basis`` may name a feasible starting basis (one column per row);
    otherwise a phase-one problem with artificial columns finds one.
    The ``"dantzig"`` rule uses most-negative reduced cost and switches to
    Bland's smallest-index rule after a run of degenerate pivots, which
    keeps the anti-cycling guarantee. ``"bland"`` uses Bland throughout.
    """
    c = np.asarray(c, dtype=float)
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    m, n = A.shape
    if c.shape != (n,) or b.shape != (m,):
        raise ValueError(f"shape mismatch: A is {A.shape}, c {c.shape}, b {b.shape}")
    if max_iter is None:
        max_iter = 50 * (m + n) + 1000

    if basis is None:
        sign = np.where(b < 0, -1.0, 1.0)
        A1 = np.hstack([A * sign[:, None], np.eye(m)])
        b1 = b * sign
        c1 = np.concatenate([np.zeros(n), np.ones(m)])
        basis = list(range(n, n + m))
        tab = _canonical_tableau(c1, A1, b1, basis)
        _iterate(tab, basis, max_iter, rule)
        if -tab[m, -1] > FEAS_TOL * max(1.0, np.abs(b1).max()):
            raise LPError("infeasible")
        # drive remaining artificials out of the basis where possible
        for r in range(m):
            if basis[r] >= n:
                candidates = np.flatnonzero(np.abs(tab[r, :n]) > 1e-9)
                if candidates.size:
                    _pivot(tab, r, int(candidates[0]))
                    basis[r] = int(candidates[0])
        keep = [r for r in range(m) if basis[r] < n]
        A, b = A[keep] * sign[keep, None], b[keep] * sign[keep]
        basis = [basis[r] for r in keep]
        m = len(keep)
    else:
        basis = list(basis)
        if len(basis) != m:
            raise ValueError("basis must have one column per constraint row")

    tab = _canonical_tableau(c, A, b, basis)
    if np.any(tab[:m, n] < -1e-9):
        raise NumericalFailure("starting basis is not primal feasible")
    iterations = _iterate(tab, basis, max_iter, rule)

    # recompute the basic solution from the original data to shed pivot drift
    x = np.zeros(n)
    x[basis] = np.linalg.solve(A[:, basis], b)
    x[np.abs(x) < 1e-13] = 0.0
    if np.any(x < -1e-9):
        raise NumericalFailure("final basis lost primal feasibility")
    x = np.maximum(x, 0.0)
    return SimplexResult(x=x, objective=float(c @ x), basis=basis, iterations=iterations)


@dataclass(frozen=True)
class Fixings:
    """Variables pinned by sequential fixing.

    ``one`` maps a user to the BS it is fixed to (all its other variables are
    then implicitly zero); ``zero`` holds (m, n) pairs pinned to zero.
    """

    zero: frozenset = frozenset()
    one: Mapping[int, int] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "zero", frozenset(self.zero))
        object.__setattr__(self, "one", dict(self.one))
        for n, m in self.one.items():
            if (m, n) in self.zero:
                raise ValueError(f"x[{m}, {n}] fixed to both 0 and 1")

    def with_zero(self, m: int, n: int) -> "Fixings":
        return Fixings(self.zero | {(m, n)}, self.one)

    def with_one(self, m: int, n: int) -> "Fixings":
        one = dict(self.one)
        one[n] = m
        return Fixings(self.zero, one)


@dataclass
class RlpInstance:
    """Standard-form data of the relaxed LP with fixings applied.

    Column order is ``[T, x vars (by user, then BS), slacks]``; rows are the
    per-user assignment constraints followed by the per-BS load rows.
    """

    problem: ServiceTimeProblem
    fixings: Fixings
    free_users: list[int]
    pairs: list[tuple[int, int]]
    offsets: np.ndarray
    scale: float
    A: np.ndarray
    b: np.ndarray
    c: np.ndarray

    @property
    def num_vars(self) -> int:
        return self.A.shape[1]

    def initial_basis(self) -> list[int]:
        """Each user on its fastest remaining BS, T on the heaviest BS row."""
        M = self.problem.num_bs
        t = self.problem.t
        loads = self.offsets.copy()
        basis = []
        col_of = {p: 1 + i for i, p in enumerate(self.pairs)}
        by_user: dict[int, list[int]] = {}
        for m, n in self.pairs:
            by_user.setdefault(n, []).append(m)
        for n in self.free_users:
            m = min(by_user[n], key=lambda k: (t[k, n], k))
            loads[m] += t[m, n] / self.scale
            basis.append(col_of[(m, n)])
        heaviest = int(np.argmax(loads))
        slack0 = 1 + len(self.pairs)
        for m in range(M):
            basis.append(0 if m == heaviest else slack0 + m)
        return basis

    def to_lp_text(self) -> str:
        """Render in CPLEX LP text format (times in seconds, unscaled)."""
        t = self.problem.t
        out = io.StringIO()
        out.write("\\ relaxed min-makespan association\nMinimize\n obj: T\nSubject To\n")
        by_user: dict[int, list[int]] = {}
        by_bs: dict[int, list[int]] = {}
        for m, n in self.pairs:
            by_user.setdefault(n, []).append(m)
            by_bs.setdefault(m, []).append(n)
        for n in self.free_users:
            terms = " + ".join(f"x_{m}_{n}" for m in by_user[n])
            out.write(f" assign_{n}: {terms} = 1\n")
        for m in range(self.problem.num_bs):
            terms = "".join(f" + {t[m, n]!r} x_{m}_{n}" for n in by_bs.get(m, []))
            rhs = -self.offsets[m] * self.scale
            out.write(f" load_{m}:{terms} - T <= {rhs!r}\n")
        out.write("Bounds\n T >= 0\nEnd\n")
        return out.getvalue()


def build_rlp(problem: ServiceTimeProblem, fixings: Optional[Fixings] = None) -> RlpInstance:
    fixings = fixings or Fixings()
    t = problem.t
    M, N = problem.num_bs, problem.num_users
    allowed = problem.allowed
    for n, m in fixings.one.items():
        if not (0 <= n < N and 0 <= m < M) or not allowed[m, n]:
            raise InfeasibleFixings(f"user {n} fixed to non-candidate BS {m}")

    free_users = [n for n in range(N) if n not in fixings.one]
    pairs = [(m, n) for n in free_users for m in range(M) if allowed[m, n] and (m, n) not in fixings.zero]
    covered = {n for _, n in pairs}
    stranded = [n for n in free_users if n not in covered]
    if stranded:
        raise InfeasibleFixings(f"users with every candidate fixed to zero: {stranded}")

    finite = t[np.isfinite(t)]
    scale = float(np.median(finite)) if finite.size else 1.0
    offsets = np.zeros(M)
    for n, m in fixings.one.items():
        offsets[m] += t[m, n] / scale

    U = len(free_users)
    P = len(pairs)
    row_of_user = {n: i for i, n in enumerate(free_users)}
    A = np.zeros((U + M, 1 + P + M))
    A[U:, 0] = 1.0
    for j, (m, n) in enumerate(pairs):
        A[row_of_user[n], 1 + j] = 1.0
        A[U + m, 1 + j] = -t[m, n] / scale
    A[U:, 1 + P :] = -np.eye(M)
    b = np.concatenate([np.ones(U), offsets])
    c = np.zeros(1 + P + M)
    c[0] = 1.0
    return RlpInstance(problem, fixings, free_users, pairs, offsets, scale, A, b, c)


class InfeasibleFixings(LPError):
    pass


@dataclass(frozen=True)
class FractionalSolution:
    x: Optional[np.ndarray]
    T: float
    status: str
    iterations: int = 0

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"

    def loads(self, problem: ServiceTimeProblem) -> np.ndarray:
        return (np.where(self.x > 0, problem.t, 0.0) * self.x).sum(axis=1)


def solve_rlp(problem: ServiceTimeProblem, fixed: Optional[Fixings] = None, *, rule: str = "dantzig") -> FractionalSolution:
    """Optimal basic solution of the relaxed LP under the given fixings.

    Returns a solution with ``status == "infeasible"`` when the fixings leave
    some user without a candidate BS.
    """
    try:
        inst = build_rlp(problem, fixed)
    except InfeasibleFixings:
        return FractionalSolution(x=None, T=float("inf"), status="infeasible")

    M, N = problem.num_bs, problem.num_users
    x = np.zeros((M, N))
    for n, m in inst.fixings.one.items():
        x[m, n] = 1.0
    iterations = 0
    if inst.free_users:
        res = simplex(inst.c, inst.A, inst.b, inst.initial_basis(), rule=rule)
        iterations = res.iterations
        for j, (m, n) in enumerate(inst.pairs):
            x[m, n] = res.x[1 + j]
        # each assignment row sums to 1 up to solve round-off; renormalise
        col = x[:, inst.free_users]
        x[:, inst.free_users] = col / col.sum(axis=0)
        T = res.objective * inst.scale
    else:
        T = 0.0
    x.setflags(write=False)
    loads = (np.where(x > 0, problem.t, 0.0) * x).sum(axis=1)
    T = max(T, float(loads.max()))
    return FractionalSolution(x=x, T=T, status="optimal", iterations=iterations)


def count_fractional(sol: FractionalSolution, tol: float = FEAS_TOL) -> int:
    """Number of entries of ``sol.x`` strictly inside (tol, 1 - tol)."""
    if sol.x is None:
        return 0
    x = sol.x
    return int(np.count_nonzero((x > tol) & (x < 1.0 - tol)))
