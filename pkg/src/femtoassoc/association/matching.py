"""Maximum-cardinality bipartite matching (Hopcroft-Karp)."""
from __future__ import annotations

from collections import deque
from typing import Hashable, Mapping, Sequence

_INF = float("inf")


def hopcroft_karp(adjacency: Mapping[Hashable, Sequence[Hashable]]) -> dict:
    """Return a maximum matching as a ``{left: right}`` dict.

    Left vertices are visited in the mapping's iteration order and each
    neighbour list in its given order, so the result is deterministic.
    """
    left = list(adjacency)
    pair_left: dict = {}
    pair_right: dict = {}
    dist: dict = {}

    def bfs() -> bool:
        queue = deque()
        for u in left:
            if u in pair_left:
                dist[u] = _INF
            else:
                dist[u] = 0
                queue.append(u)
        found = False
        while queue:
            u = queue.popleft()
            for v in adjacency[u]:
                w = pair_right.get(v)
                if w is None:
                    found = True
                elif dist[w] == _INF:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        return found

    def dfs(u) -> bool:
        # iterative DFS along layered edges
        stack = [(u, iter(adjacency[u]))]
        path = []
        while stack:
            node, it = stack[-1]
            advanced = False
            for v in it:
                w = pair_right.get(v)
                if w is None:
                    path.append((node, v))
                    for a, b in path:
                        pair_left[a] = b
                        pair_right[b] = a
                    return True
                if dist[w] == dist[node] + 1:
                    path.append((node, v))
                    stack.append((w, iter(adjacency[w])))
                    advanced = True
                    break
            if not advanced:
                dist[node] = _INF
                stack.pop()
                if path:
                    path.pop()
        return False

    while bfs():
        for u in left:
            if u not in pair_left:
                dfs(u)
    return dict(pair_left)
