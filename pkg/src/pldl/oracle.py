"""Brute-force semantics of PLDL on ultimately periodic words.

Nothing here touches the automata code. The match relation of a regular
expression is computed straight from its inductive definition over the
finite graph of lasso positions, with a small weight monoid attached to
each match when the operator needs more than the end position (the exact
length for bounded operators, a changepoint summary for cp operators).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping

from .formula import (
    And, Atom, Bottom, Box, BoxCp, BoxLe, Concat, Diamond, DiamondCp, DiamondLe,
    Formula, NegAtom, Or, Prop, Regex, Star, Test, Top, Union, prop_holds,
)

Letter = frozenset


@dataclass(frozen=True)
class LassoWord:
    """The word prefix . cycle^omega."""

    prefix: tuple
    cycle: tuple

    def __post_init__(self):
        if not self.cycle:
            raise ValueError("cycle must be nonempty")
        object.__setattr__(self, "prefix", tuple(frozenset(a) for a in self.prefix))
        object.__setattr__(self, "cycle", tuple(frozenset(a) for a in self.cycle))

    def __len__(self) -> int:
        return len(self.prefix) + len(self.cycle)

    def reduce(self, n: int) -> int:
        k = len(self.prefix)
        if n < k:
            return n
        return k + (n - k) % len(self.cycle)

    def letter(self, n: int) -> frozenset:
        n = self.reduce(n)
        k = len(self.prefix)
        return self.prefix[n] if n < k else self.cycle[n - k]

    def succ(self, i: int) -> int:
        """Successor of a reduced position."""
        return i + 1 if i + 1 < len(self) else len(self.prefix)

    def letters(self) -> tuple:
        return self.prefix + self.cycle

    def props(self) -> frozenset:
        return frozenset().union(*self.letters())

    def canonical(self) -> LassoWord:
        """Shortest representation of the same infinite word."""
        cyc = self.cycle
        for d in range(1, len(cyc) + 1):
            if len(cyc) % d == 0 and cyc[:d] * (len(cyc) // d) == cyc:
                cyc = cyc[:d]
                break
        pre = self.prefix
        while pre and pre[-1] == cyc[-1]:
            pre = pre[:-1]
            cyc = (cyc[-1],) + cyc[:-1]
        return LassoWord(pre, cyc)

    def project(self, props: Iterable[str]) -> LassoWord:
        keep = frozenset(props)
        return LassoWord(tuple(a & keep for a in self.prefix),
                         tuple(a & keep for a in self.cycle))


def all_lassos(props: Iterable[str], max_len: int, canonical: bool = True):
    """All lassos with |prefix| + |cycle| <= max_len over the given props."""
    props = sorted(props)
    alphabet = [frozenset(c) for k in range(len(props) + 1)
                for c in itertools.combinations(props, k)]
    seen = set()
    for total in range(1, max_len + 1):
        for word in itertools.product(alphabet, repeat=total):
            for k in range(total):
                w = LassoWord(word[:k], word[k:])
                if canonical:
                    w = w.canonical()
                    if w in seen:
                        continue
                    seen.add(w)
                yield w


# ---------------------------------------------------------------------------
# Weight monoids for matches


class _Plain:
    """Only end positions matter."""

    unit = 0

    def letter(self, word, i):
        return 0

    def combine(self, a, b):
        return 0


class _Length:
    """Exact match length, discarded beyond a cap."""

    unit = 0

    def __init__(self, cap: int):
        self.cap = cap

    def letter(self, word, i):
        return 1 if self.cap >= 1 else None

    def combine(self, a, b):
        s = a + b
        return s if s <= self.cap else None


class _Changes:
    """Summary (first color, last color, flips) of the consumed infix.

    Flips count indices i inside the infix where the color differs from the
    previous letter; summaries with two or more flips are discarded.
    """

    unit = ()

    def __init__(self, color: str):
        self.color = color

    def letter(self, word, i):
        c = self.color in word.letter(i)
        return (c, c, 0)

    def combine(self, a, b):
        if a == ():
            return b
        if b == ():
            return a
        flips = a[2] + b[2] + (a[1] != b[0])
        return (a[0], b[1], flips) if flips <= 1 else None


# ---------------------------------------------------------------------------
# Evaluation


class Evaluator:
    """Memoized evaluation of formulas on one lasso under one valuation."""

    def __init__(self, word: LassoWord, alpha: Mapping[str, int] | None = None):
        self.word = word
        self.alpha = dict(alpha or {})
        self._truth: dict = {}
        self._rel: dict = {}

    def bound(self, var: str) -> int:
        return self.alpha.get(var, 0)

    def holds(self, phi: Formula, n: int = 0) -> bool:
        return self.word.reduce(n) in self.truth_set(phi)

    def truth_set(self, phi: Formula) -> frozenset:
        """Reduced positions where phi holds."""
        got = self._truth.get(phi)
        if got is None:
            got = frozenset(self._compute(phi))
            self._truth[phi] = got
        return got

    def _compute(self, phi: Formula):
        positions = range(len(self.word))
        if isinstance(phi, Top):
            return positions
        if isinstance(phi, Bottom):
            return ()
        if isinstance(phi, Atom):
            return [i for i in positions if phi.prop in self.word.letter(i)]
        if isinstance(phi, NegAtom):
            return [i for i in positions if phi.prop not in self.word.letter(i)]
        if isinstance(phi, And):
            return self.truth_set(phi.left) & self.truth_set(phi.right)
        if isinstance(phi, Or):
            return self.truth_set(phi.left) | self.truth_set(phi.right)
        body = self.truth_set(phi.body)
        if isinstance(phi, (Diamond, Box)):
            rel = self.relation(phi.regex, _Plain())
        elif isinstance(phi, (DiamondLe, BoxLe)):
            rel = self.relation(phi.regex, _Length(self.bound(phi.var)))
        else:
            rel = self.relation(phi.regex, _Changes(phi.color))
        if isinstance(phi, (Diamond, DiamondLe, DiamondCp)):
            return [i for i in positions if any(j in body for (j, _) in rel.get(i, ()))]
        return [i for i in positions if all(j in body for (j, _) in rel.get(i, ()))]

    def relation(self, r: Regex, monoid) -> dict:
        """Map reduced start -> set of (reduced end, weight) for matches of r."""
        key = (r, type(monoid), getattr(monoid, "cap", None), getattr(monoid, "color", None))
        got = self._rel.get(key)
        if got is None:
            got = self._relation(r, monoid)
            self._rel[key] = got
        return got

    def _relation(self, r: Regex, m) -> dict:
        word = self.word
        positions = range(len(word))
        if isinstance(r, Prop):
            out = {}
            for i in positions:
                if prop_holds(r.formula, word.letter(i)):
                    w = m.letter(word, i)
                    if w is None:
                        continue
                    out[i] = {(word.succ(i), w)}
            return out
        if isinstance(r, Test):
            good = self.truth_set(r.formula)
            return {i: {(i, m.unit)} for i in positions if i in good}
        if isinstance(r, Union):
            a, b = self.relation(r.left, m), self.relation(r.right, m)
            return {i: a.get(i, set()) | b.get(i, set()) for i in set(a) | set(b)}
        if isinstance(r, Concat):
            return _compose(self.relation(r.left, m), self.relation(r.right, m), m)
        if isinstance(r, Star):
            step = self.relation(r.inner, m)
            out = {i: {(i, m.unit)} for i in positions}
            frontier = {i: set(s) for i, s in out.items()}
            while frontier:
                new = _compose(frontier, step, m)
                frontier = {}
                for i, pairs in new.items():
                    fresh = pairs - out[i]
                    if fresh:
                        out[i] |= fresh
                        frontier[i] = fresh
            return out
        raise TypeError(f"not a regex: {r!r}")


def _compose(a: dict, b: dict, m) -> dict:
    out: dict = {}
    for i, pairs in a.items():
        acc = set()
        for (j, w1) in pairs:
            for (k, w2) in b.get(j, ()):
                w = m.combine(w1, w2)
                if w is None:
                    continue
                acc.add((k, w))
        if acc:
            out[i] = acc
    return out


def eval_at(w: LassoWord, n: int, alpha: Mapping[str, int] | None, phi: Formula) -> bool:
    return Evaluator(w, alpha).holds(phi, w.reduce(n))


def models(w: LassoWord, alpha: Mapping[str, int] | None, phi: Formula) -> bool:
    return Evaluator(w, alpha).holds(phi, 0)


@dataclass(frozen=True)
class MatchSet:
    """Matches of a regex from a fixed start position.

    ``ends`` holds the reduced end positions. Membership of an absolute end
    position is exact: the length of the match is checked, not only where
    it lands on the lasso.
    """

    word: LassoWord
    start: int
    ends: frozenset
    _evaluator: Evaluator
    _regex: Regex

    def __contains__(self, m: int) -> bool:
        j = m - self.start
        if j < 0:
            return False
        rel = self._evaluator.relation(self._regex, _Length(j))
        return any(w == j for (_, w) in rel.get(self.word.reduce(self.start), ()))

    def offsets(self, limit: int) -> list[int]:
        """All match lengths j <= limit."""
        rel = self._evaluator.relation(self._regex, _Length(limit))
        return sorted({w for (_, w) in rel.get(self.word.reduce(self.start), ())})


def match_ends(w: LassoWord, n: int, alpha: Mapping[str, int] | None, r: Regex) -> MatchSet:
    ev = Evaluator(w, alpha)
    rel = ev.relation(r, _Plain())
    ends = frozenset(j for (j, _) in rel.get(w.reduce(n), ()))
    return MatchSet(w, n, ends, ev, r)
