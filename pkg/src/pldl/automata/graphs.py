"""Graph search utilities: SCCs and accepting-lasso search."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Callable, Hashable, Iterable, Sequence


def sccs(nodes: Iterable[Hashable], succ: Callable) -> list[list]:
    """Tarjan's algorithm, iterative. Components come out in reverse topological order."""
    index: dict = {}
    low: dict = {}
    on_stack: set = set()
    stack: list = []
    out: list[list] = []
    counter = 0
    for root in nodes:
        if root in index:
            continue
        work = [(root, iter(succ(root)))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(succ(w))))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                out.append(comp)
    return out


@dataclass(frozen=True)
class LassoPath:
    """An ultimately periodic path: stem then cycle repeated forever.

    Entries are (node, label) where label marks the edge leaving the node.
    The cycle's last edge leads back to its first node.
    """

    stem: tuple
    cycle: tuple

    def nodes(self) -> list:
        return [n for n, _ in self.stem] + [n for n, _ in self.cycle]

    def labels(self) -> tuple[list, list]:
        return [l for _, l in self.stem], [l for _, l in self.cycle]


def explore(initial, succ: Callable) -> dict:
    """Reachable graph as node -> list of (label, node), in BFS order."""
    adj: dict = {}
    queue = deque([initial])
    adj[initial] = None
    while queue:
        v = queue.popleft()
        edges = list(succ(v))
        adj[v] = edges
        for _, w in edges:
            if w not in adj:
                adj[w] = None
                queue.append(w)
    return adj


def find_lasso(initial, succ: Callable, accepting: Sequence[Callable]) -> LassoPath | None:
    """Reachable cycle visiting every acceptance predicate (generalized Buchi)."""
    adj = explore(initial, succ)
    nodes = list(adj)
    comps = sccs(nodes, lambda v: [w for _, w in adj[v]])
    order = {v: i for i, v in enumerate(nodes)}
    comps.sort(key=lambda c: min(order[v] for v in c))
    for comp in comps:
        members = set(comp)
        if len(comp) == 1:
            v = comp[0]
            if not any(w == v for _, w in adj[v]):
                continue
        if not all(any(acc(v) for v in comp) for acc in accepting):
            continue
        ordered = sorted(comp, key=order.__getitem__)
        anchor = next(v for v in ordered if accepting[0](v)) if accepting else ordered[0]
        stem, _ = _segment(adj, initial, lambda v: v == anchor, None)
        cycle = []
        cur = anchor
        for acc in list(accepting[1:]):
            seg, cur = _segment(adj, cur, acc, members)
            cycle += seg
        seg, cur = _segment(adj, cur, lambda v: v == anchor, members, force=True)
        cycle += seg
        return LassoPath(tuple(stem), tuple(cycle))
    return None


def _segment(adj, start, goal, members, force=False):
    """BFS path (inside members, if given) from start to a goal node.

    With ``force`` the path takes at least one edge.
    """
    if not force and goal(start):
        return [], start
    parent = {}
    queue = deque([start])
    seen = set()
    while queue:
        v = queue.popleft()
        for label, w in adj[v]:
            if (members is not None and w not in members) or w in seen:
                continue
            seen.add(w)
            parent[w] = (v, label)
            if goal(w):
                path = []
                cur = w
                while True:
                    pv, pl = parent[cur]
                    path.append((pv, pl))
                    cur = pv
                    if cur == start:
                        break
                path.reverse()
                return path, w
            queue.append(w)
    raise AssertionError("goal unreachable")
