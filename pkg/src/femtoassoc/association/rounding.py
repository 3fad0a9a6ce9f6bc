"""LP rounding through a slot graph and a maximum bipartite matching."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..lpcore import FEAS_TOL, FractionalSolution, solve_rlp
from ..model import ServiceTimeProblem
from .assignment import Assignment
from .matching import hopcroft_karp
from .restrict import restrict_by_ratio


class MatchingConstructionError(RuntimeError):
    """A user was left unmatched; the slot graph was built incorrectly."""


@dataclass
class RoundingGraph:
    """Users on one side, BS slots ``(m, k)`` (k = 1..k_m) on the other.

    ``weights[(n, (m, k))]`` is the adjusted fractional weight x' of the edge.
    ``groups[(m, k)]`` lists the users adjacent to the slot in the BS's
    non-increasing service-time order.
    """

    num_users: int
    slots: list[tuple[int, int]] = field(default_factory=list)
    groups: dict[tuple[int, int], list[int]] = field(default_factory=dict)
    weights: dict[tuple[int, tuple[int, int]], float] = field(default_factory=dict)

    def adjacency(self) -> dict[int, list[tuple[int, int]]]:
        """Slots per user, heaviest fractional weight first (then slot order)."""
        adj: dict[int, list[tuple[int, int]]] = {n: [] for n in range(self.num_users)}
        for slot in self.slots:
            for n in self.groups[slot]:
                adj[n].append(slot)
        for n, slots in adj.items():
            slots.sort(key=lambda s: (-self.weights[(n, s)], s))
        return adj

    def slot_weight(self, slot) -> float:
        return sum(self.weights[(n, slot)] for n in self.groups[slot])

    def slot_load(self, slot, t: np.ndarray) -> float:
        """Fractional service time sitting on the slot before matching."""
        m = slot[0]
        return sum(self.weights[(n, slot)] * t[m, n] for n in self.groups[slot])

    def slot_max_time(self, slot, t: np.ndarray) -> float:
        m = slot[0]
        return max((t[m, n] for n in self.groups[slot]), default=0.0)


def _snap(v: float) -> float:
    r = round(v)
    return float(r) if abs(v - r) <= FEAS_TOL else v


def build_rounding_graph(problem: ServiceTimeProblem, sol: FractionalSolution) -> RoundingGraph:
    t = problem.t
    x = sol.x
    graph = RoundingGraph(num_users=problem.num_users)
    for m in range(problem.num_bs):
        users = [n for n in range(problem.num_users) if x[m, n] > FEAS_TOL]
        if not users:
            continue
        users.sort(key=lambda n: (-t[m, n], n))
        k_m = max(1, math.ceil(_snap(sum(x[m, n] for n in users))))
        for k in range(1, k_m + 1):
            graph.slots.append((m, k))
            graph.groups[(m, k)] = []
        prev = 0.0
        for n in users:
            cum = _snap(prev + x[m, n])
            first = min(math.floor(prev) + 1, k_m)
            last = max(min(math.ceil(cum), k_m), first)
            if first == last:
                graph.groups[(m, first)].append(n)
                graph.weights[(n, (m, first))] = float(x[m, n])
            else:
                upper = cum - (last - 1)
                graph.groups[(m, first)].append(n)
                graph.groups[(m, last)].append(n)
                graph.weights[(n, (m, last))] = upper
                graph.weights[(n, (m, first))] = float(x[m, n]) - upper
            prev = cum
    return graph


def max_bipartite_matching(graph: RoundingGraph) -> dict[int, tuple[int, int]]:
    return hopcroft_karp(graph.adjacency())


def rounding_approximation(problem: ServiceTimeProblem, rho: float) -> Assignment:
    restricted = restrict_by_ratio(problem, rho)
    sol = solve_rlp(restricted)
    graph = build_rounding_graph(restricted, sol)
    matching = max_bipartite_matching(graph)
    unmatched = [n for n in range(problem.num_users) if n not in matching]
    if unmatched:
        raise MatchingConstructionError(f"users left unmatched: {unmatched}")
    return Assignment.from_bs_of(problem, [matching[n][0] for n in range(problem.num_users)], "rounding")
