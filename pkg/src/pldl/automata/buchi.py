"""Nondeterministic Buchi automata: emptiness, lasso membership, trimming."""
from __future__ import annotations

from dataclasses import dataclass, field

from ..oracle import LassoWord
from .graphs import explore, find_lasso, sccs


@dataclass
class Nba:
    props: tuple
    letters: tuple
    initial: int
    delta: list               # state -> {letter: tuple of successors}
    accepting: frozenset
    names: list = field(default_factory=list)

    @property
    def states(self) -> range:
        return range(len(self.delta))

    def __len__(self) -> int:
        return len(self.delta)

    def step(self, q: int, letter) -> tuple:
        return self.delta[q].get(frozenset(letter) & self.propset, ())

    @property
    def propset(self) -> frozenset:
        return frozenset(self.props)

    def edges(self, q: int):
        for a in self.letters:
            for t in self.delta[q].get(a, ()):
                yield a, t


def nba_emptiness(nba: Nba) -> LassoWord | None:
    """An accepted lasso word, or None when the language is empty."""
    path = find_lasso(nba.initial, nba.edges, [lambda q: q in nba.accepting])
    if path is None:
        return None
    stem, cycle = path.labels()
    return LassoWord(tuple(stem), tuple(cycle))


def nba_accepts(nba: Nba, w: LassoWord) -> bool:
    keep = nba.propset
    letters = [a & keep for a in w.letters()]

    def succ(node):
        q, i = node
        j = w.succ(i)
        return [(None, (t, j)) for t in nba.delta[q].get(letters[i], ())]

    return find_lasso((nba.initial, 0), succ, [lambda n: n[0] in nba.accepting]) is not None


def trim(nba: Nba) -> Nba:
    """Drop states that are unreachable or cannot reach an accepting cycle."""
    adj = explore(nba.initial, nba.edges)
    reach = list(adj)
    comps = sccs(reach, lambda q: [t for _, t in adj[q]])
    good: set[int] = set()
    # components arrive in reverse topological order, so successors come first
    for comp in comps:
        cyclic = len(comp) > 1 or any(t == comp[0] for _, t in adj[comp[0]])
        if (cyclic and any(q in nba.accepting for q in comp)) or \
                any(t in good for q in comp for _, t in adj[q]):
            good.update(comp)
    if nba.initial not in good:
        return Nba(nba.props, nba.letters, 0, [{}], frozenset(), ["empty"])
    order = [q for q in reach if q in good]
    index = {q: i for i, q in enumerate(order)}
    delta = []
    for q in order:
        row = {}
        for a, targets in nba.delta[q].items():
            kept = tuple(index[t] for t in targets if t in good)
            if kept:
                row[a] = kept
        delta.append(row)
    names = [nba.names[q] if q < len(nba.names) else str(q) for q in order]
    return Nba(nba.props, nba.letters, 0, delta,
               frozenset(index[q] for q in order if q in nba.accepting), names)
