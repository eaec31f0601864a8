"""Exact max-flow (Dinic) over rational capacities."""
from __future__ import annotations

from collections import deque
from fractions import Fraction


class FlowNetwork:
    def __init__(self, n: int):
        self.n = n
        # edge: [to, rev_index, cap]
        self.g: list[list[list]] = [[] for _ in range(n)]
        self._edges: list[tuple[int, int, Fraction]] = []

    def add_edge(self, u: int, v: int, cap) -> int:
        """Add u->v with capacity ``cap``; returns a handle for :meth:`flow_on`."""
        cap = Fraction(cap)
        self.g[u].append([v, len(self.g[v]), cap])
        self.g[v].append([u, len(self.g[u]) - 1, Fraction(0)])
        self._edges.append((u, len(self.g[u]) - 1, cap))
        return len(self._edges) - 1

    def flow_on(self, handle: int) -> Fraction:
        u, i, cap = self._edges[handle]
        return cap - self.g[u][i][2]

    def _levels(self, s: int, t: int):
        level = [-1] * self.n
        level[s] = 0
        q = deque([s])
        while q:
            u = q.popleft()
            for v, _, cap in self.g[u]:
                if cap > 0 and level[v] < 0:
                    level[v] = level[u] + 1
                    q.append(v)
        return level if level[t] >= 0 else None

    def _push(self, u, t, f, level, it):
        if u == t:
            return f
        edges = self.g[u]
        while it[u] < len(edges):
            e = edges[it[u]]
            v, rev, cap = e
            if cap > 0 and level[v] == level[u] + 1:
                pushed = self._push(v, t, cap if f is None or cap < f else f, level, it)
                if pushed:
                    e[2] -= pushed
                    self.g[v][rev][2] += pushed
                    return pushed
            it[u] += 1
        return Fraction(0)

    def max_flow(self, s: int, t: int) -> Fraction:
        total = Fraction(0)
        while True:
            level = self._levels(s, t)
            if level is None:
                return total
            it = [0] * self.n
            while True:
                pushed = self._push(s, t, None, level, it)
                if not pushed:
                    break
                total += pushed
