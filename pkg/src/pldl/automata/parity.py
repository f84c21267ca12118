"""Deterministic parity automata and Safra-style determinization.

Trees are stored as tuples of (parent index, label) sorted by age, so the
index of a node is its rank among living nodes. That rank doubles as the
node's name when colors are assigned: an event on an older node dominates
events on younger ones, and removing a node counts as an event on every
younger name because their ranks shift.

Acceptance is max-parity: the largest color seen infinitely often must be
even.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from ..oracle import LassoWord
from .buchi import Nba


@dataclass
class Dpa:
    props: tuple
    letters: tuple
    initial: int
    delta: list         # state -> {letter: state}, total
    colors: list        # state -> color
    names: list = field(default_factory=list)

    @property
    def states(self) -> range:
        return range(len(self.delta))

    def __len__(self) -> int:
        return len(self.delta)

    @property
    def propset(self) -> frozenset:
        return frozenset(self.props)

    def step(self, q: int, letter) -> int:
        return self.delta[q][frozenset(letter) & self.propset]


def dpa_accepts(dpa: Dpa, w: LassoWord) -> bool:
    keep = dpa.propset
    letters = [a & keep for a in w.letters()]
    seen: dict = {}
    trace = []
    q, i = dpa.initial, 0
    while (q, i) not in seen:
        seen[(q, i)] = len(trace)
        trace.append(q)
        q = dpa.delta[q][letters[i]]
        i = w.succ(i)
    loop = trace[seen[(q, i)]:]
    return max(dpa.colors[s] for s in loop) % 2 == 0


def _step_tree(nba: Nba, tree: tuple, a, n: int):
    """One Safra step; returns (new tree, color of the transition)."""
    F = nba.accepting

    def post(label):
        out = set()
        for q in label:
            out.update(nba.delta[q].get(a, ()))
        return frozenset(out)

    nodes = [[parent, post(label)] for parent, label in tree]
    old = len(nodes)
    for idx in range(old):
        spawn = nodes[idx][1] & F
        if spawn:
            nodes.append([idx, spawn])

    children: dict[int, list[int]] = {i: [] for i in range(len(nodes))}
    for idx, (parent, _) in enumerate(nodes):
        if parent >= 0:
            children[parent].append(idx)

    # horizontal merge: a state stays only in the oldest branch holding it
    def prune(v: int, allowed: frozenset):
        nodes[v][1] = nodes[v][1] & allowed
        taken: set = set()
        for c in children[v]:
            prune(c, nodes[v][1] - taken)
            taken |= nodes[c][1]

    if nodes:
        prune(0, nodes[0][1])

    alive = [bool(label) for _, label in nodes]
    green: set[int] = set()

    # vertical merge: a node covered by its children absorbs them
    def mark_dead(v: int):
        alive[v] = False
        for c in children[v]:
            mark_dead(c)

    def collapse(v: int):
        if not alive[v]:
            return
        kids = [c for c in children[v] if alive[c]]
        covered = frozenset().union(*(nodes[c][1] for c in kids)) if kids else frozenset()
        if kids and covered == nodes[v][1]:
            green.add(v)
            for c in kids:
                mark_dead(c)
        else:
            for c in kids:
                collapse(c)

    if nodes and alive[0]:
        collapse(0)
    elif nodes:
        mark_dead(0)

    survivors = [v for v in range(len(nodes)) if alive[v]]
    rank = {v: k for k, v in enumerate(survivors)}
    new_tree = tuple((rank[nodes[v][0]] if nodes[v][0] >= 0 else -1, nodes[v][1])
                     for v in survivors)

    color = 1
    for v in range(old):
        if not alive[v]:
            color = max(color, 2 * (n - v) + 1)
    for v in green:
        color = max(color, 2 * (n - rank[v]))
    return new_tree, color


def determinize(nba: Nba) -> Dpa:
    """Deterministic parity automaton with the same language.

    States pair a Safra tree with the color of the step that produced it,
    which turns the transition coloring into a state coloring.
    """
    n = max(len(nba), 1)
    start = ((-1, frozenset([nba.initial])),)
    init = (start, 0)
    ids = {init: 0}
    order = [init]
    delta: list[dict] = []
    i = 0
    while i < len(order):
        tree, _ = order[i]
        i += 1
        row = {}
        for a in nba.letters:
            key = _step_tree(nba, tree, a, n) if tree else ((), 1)
            if key not in ids:
                ids[key] = len(order)
                order.append(key)
            row[a] = ids[key]
        delta.append(row)
    colors = [c for _, c in order]
    names = [_tree_name(t) + f" c{c}" for t, c in order]
    return Dpa(nba.props, nba.letters, 0, delta, colors, names)


def _tree_name(tree) -> str:
    if not tree:
        return "[]"
    return "[" + " ".join(f"{p}:{{{','.join(map(str, sorted(l)))}}}" for p, l in tree) + "]"
