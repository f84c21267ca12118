"""Marked epsilon-NFAs for regular expressions with tests."""
from __future__ import annotations

from dataclasses import dataclass

from ..formula import Concat, Formula, Prop, PropFormula, Regex, Star, Test, Union, prop_holds


@dataclass(frozen=True)
class MarkedNfa:
    """Epsilon-NFA whose test states carry a marking formula.

    Letter edges are labelled with propositional formulas and stand for every
    letter satisfying the label.
    """

    size: int
    initial: int
    final: int
    eps: tuple           # state -> tuple of epsilon successors
    edges: tuple         # state -> tuple of (PropFormula, target)
    marking: dict        # state -> Formula, test states only

    @property
    def states(self) -> range:
        return range(self.size)

    def step(self, q: int, letter) -> list[int]:
        return [t for (pf, t) in self.edges[q] if prop_holds(pf, letter)]


class _Builder:
    def __init__(self):
        self.eps: list[list[int]] = []
        self.edges: list[list[tuple[PropFormula, int]]] = []
        self.marking: dict[int, Formula] = {}

    def new(self) -> int:
        self.eps.append([])
        self.edges.append([])
        return len(self.eps) - 1

    def build(self, r: Regex) -> tuple[int, int]:
        if isinstance(r, Prop):
            a, b = self.new(), self.new()
            self.edges[a].append((r.formula, b))
            return a, b
        if isinstance(r, Test):
            a = self.new()
            self.marking[a] = r.formula
            return a, a
        if isinstance(r, Union):
            u0 = self.new()
            i0, f0 = self.build(r.left)
            i1, f1 = self.build(r.right)
            u1 = self.new()
            self.eps[u0] += [i0, i1]
            self.eps[f0].append(u1)
            self.eps[f1].append(u1)
            return u0, u1
        if isinstance(r, Concat):
            u0 = self.new()
            i0, f0 = self.build(r.left)
            i1, f1 = self.build(r.right)
            u1 = self.new()
            self.eps[u0].append(i0)
            self.eps[f0].append(i1)
            self.eps[f1].append(u1)
            return u0, u1
        if isinstance(r, Star):
            c0 = self.new()
            i0, f0 = self.build(r.inner)
            c1 = self.new()
            self.eps[c0] += [i0, c1]
            self.eps[f0] += [i0, c1]
            return c0, c1
        raise TypeError(f"not a regex: {r!r}")


def thompson(r: Regex) -> MarkedNfa:
    b = _Builder()
    init, final = b.build(r)
    return MarkedNfa(
        size=len(b.eps),
        initial=init,
        final=final,
        eps=tuple(tuple(e) for e in b.eps),
        edges=tuple(tuple(e) for e in b.edges),
        marking=dict(b.marking),
    )


def epsilon_paths(nfa: MarkedNfa, q: int, include_target: bool = True):
    """Distinct (target, markings) pairs over simple epsilon paths from q.

    The markings of a path are those of all its states. With
    ``include_target=False`` the last state's marking is left out, which is
    the other reading of the definition; it is kept only so tests can show
    that it disagrees with the semantics.
    """
    out: set[tuple[int, frozenset]] = set()

    def mark(s):
        return (nfa.marking[s],) if s in nfa.marking else ()

    def walk(s: int, seen: frozenset, marks: frozenset):
        here = marks | frozenset(mark(s)) if include_target else marks
        out.add((s, here))
        inner = marks | frozenset(mark(s))
        for t in nfa.eps[s]:
            if t not in seen:
                walk(t, seen | {t}, inner)

    walk(q, frozenset([q]), frozenset())
    return sorted(out, key=lambda x: (x[0], sorted(map(repr, x[1]))))


def minimal_paths(paths) -> dict[int, list[frozenset]]:
    """Per target, the subset-minimal marking sets."""
    by_target: dict[int, list[frozenset]] = {}
    for t, marks in paths:
        by_target.setdefault(t, []).append(marks)
    return {t: [m for m in ms if not any(o < m for o in ms)] for t, ms in by_target.items()}
