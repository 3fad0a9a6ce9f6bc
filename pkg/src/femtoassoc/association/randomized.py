"""Randomized association: equalized expected service time and list pruning."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..model import ServiceTimeProblem
from .assignment import Assignment
from .restrict import restrict_by_time


@dataclass
class ExpectedLoadState:
    """Reduced candidate lists and the expected loads they induce.

    ``mask[m, n]`` is membership of m in the reduced list of user n.
    ``H[n]`` is the per-user expected service time (identical on every BS of
    its list), ``expected_load[m]`` the expected BS load and ``p`` the
    connection probabilities. ``history`` holds the global maximum expected
    load after Phase I and after every accepted removal.
    """

    t: np.ndarray
    mask: np.ndarray
    H: np.ndarray
    expected_load: np.ndarray
    history: list[float] = field(default_factory=list)
    removals: list[tuple[int, int]] = field(default_factory=list)

    @property
    def p(self) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(self.mask, self.H[None, :] / self.t, 0.0)

    @property
    def max_expected_load(self) -> float:
        return float(self.expected_load.max())

    def recomputed(self) -> tuple[np.ndarray, np.ndarray]:
        """(H, expected_load) rebuilt from scratch out of the reduced lists."""
        return _equalize(self.t, self.mask)

    def load_bound(self) -> float:
        """max_m |A''_m| / min_n |B''_n| * largest listed service time."""
        a = self.mask.sum(axis=1).max()
        b = self.mask.sum(axis=0).min()
        return float(a / b * self.t[self.mask].max())


def _equalize(t: np.ndarray, mask: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    inv = np.where(mask, 1.0 / t, 0.0)
    H = 1.0 / inv.sum(axis=0)
    return H, (mask * H[None, :]).sum(axis=1)


def randomized_reduce(problem: ServiceTimeProblem, lam: float) -> ExpectedLoadState:
    """Phase I restricts lists by absolute service time; Phase II greedily
    drops (BS, user) pairs from the most-loaded BS while that lowers (or
    keeps) the largest expected load."""
    restricted = restrict_by_time(problem, lam)
    t = problem.t
    mask = restricted.allowed.copy()
    M, N = mask.shape
    inv_sum = np.where(mask, 1.0 / t, 0.0).sum(axis=0)
    H = 1.0 / inv_sum
    load = (mask * H[None, :]).sum(axis=1)
    state = ExpectedLoadState(t=t, mask=mask, H=H, expected_load=load, history=[float(load.max())])

    working = {n for n in range(N) if mask[:, n].sum() > 1}
    while working:
        top = int(np.argmax(load))
        cands = sorted(n for n in working if mask[top, n])
        if not cands:
            break
        best_n, best_max, best_delta = -1, np.inf, 0.0
        for n in cands:
            reduced = inv_sum[n] - 1.0 / t[top, n]
            delta = 1.0 / reduced - 1.0 / inv_sum[n]
            profile = load.copy()
            others = mask[:, n].copy()
            others[top] = False
            profile[top] -= H[n]
            profile[others] += delta
            peak = profile.max()
            if peak < best_max:
                best_n, best_max, best_delta = n, peak, delta
        if load[top] < best_max:
            break
        n = best_n
        others = mask[:, n].copy()
        others[top] = False
        load[top] -= H[n]
        load[others] += best_delta
        mask[top, n] = False
        inv_sum[n] -= 1.0 / t[top, n]
        H[n] = 1.0 / inv_sum[n]
        state.removals.append((top, n))
        state.history.append(float(load.max()))
        if mask[:, n].sum() == 1:
            working.discard(n)
    return state


def randomized_assign(state: ExpectedLoadState, seed: int) -> Assignment:
    """Each user independently samples a BS from its connection probabilities."""
    p = state.p
    rng = np.random.default_rng(seed)
    u = rng.random(p.shape[1])
    cum = np.cumsum(p, axis=0)
    # last listed BS absorbs rounding so the cumulative sum reaches 1
    last = state.mask.shape[0] - 1 - np.argmax(state.mask[::-1], axis=0)
    cum[last, np.arange(p.shape[1])] = np.inf
    bs_of = np.argmax(cum > u[None, :], axis=0)
    problem = ServiceTimeProblem(np.where(state.mask, state.t, np.inf))
    return Assignment.from_bs_of(problem, bs_of.tolist(), "randomized")


def randomized(problem: ServiceTimeProblem, lam: float, seed: int) -> tuple[Assignment, ExpectedLoadState]:
    state = randomized_reduce(problem, lam)
    sampled = randomized_assign(state, seed)
    return Assignment.from_bs_of(problem, sampled.bs_of, "randomized"), state
