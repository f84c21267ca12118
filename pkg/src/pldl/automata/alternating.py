"""Alternating Buchi automata for LDL with changepoint-bounded operators.

Transition formulas are positive boolean formulas over states, kept in
disjunctive normal form as antichains of state sets: ``frozenset()`` is
false, ``frozenset({frozenset()})`` is true. The antichain is exactly the
set of minimal models, which is what the breakpoint construction needs.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from ..formula import (
    And, Atom, Bottom, Box, BoxCp, BoxLe, Diamond, DiamondCp, DiamondLe, Formula,
    NegAtom, Or, Top, colors, negate, propositions,
)
from .thompson import epsilon_paths, minimal_paths, thompson

TRUE = frozenset([frozenset()])
FALSE = frozenset()


def _minimize(clauses) -> frozenset:
    clauses = sorted(set(clauses), key=len)
    kept: list[frozenset] = []
    for c in clauses:
        if not any(k <= c for k in kept):
            kept.append(c)
    return frozenset(kept)


def dnf_or(a: frozenset, b: frozenset) -> frozenset:
    if a == TRUE or b == TRUE:
        return TRUE
    return _minimize(a | b)


def dnf_and(a: frozenset, b: frozenset) -> frozenset:
    if not a or not b:
        return FALSE
    if a == TRUE:
        return b
    if b == TRUE:
        return a
    return _minimize(x | y for x in a for y in b)


def dnf_state(q: int) -> frozenset:
    return frozenset([frozenset([q])])


def all_letters(props) -> tuple:
    props = sorted(props)
    return tuple(frozenset(c) for k in range(len(props) + 1)
                 for c in itertools.combinations(props, k))


# ---------------------------------------------------------------------------
# Changepoint tracker


CP_STATES = ("e", "b", "y", "by", "yb", "s")
CP_SINK = "s"


def cp_step(c: str, has_color: bool) -> str:
    if c == "e":
        return "b" if has_color else "y"
    if c == "b":
        return "b" if has_color else "by"
    if c == "y":
        return "yb" if has_color else "y"
    if c == "by":
        return "s" if has_color else "by"
    if c == "yb":
        return "yb" if has_color else "s"
    return "s"


@dataclass(frozen=True)
class ChangepointDfa:
    """Finite-word automaton accepting words with at most one color change."""

    color: str
    states: tuple = CP_STATES
    initial: str = "e"
    accepting: frozenset = frozenset(CP_STATES[:-1])

    def step(self, c: str, letter) -> str:
        return cp_step(c, self.color in letter)


# ---------------------------------------------------------------------------
# Automaton


@dataclass(frozen=True)
class Region:
    """The regex states serving one parameterized operator."""

    var: str
    kind: str            # "diamond" or "box"
    formula: Formula


@dataclass
class Aba:
    props: tuple
    letters: tuple
    initial: int
    delta: list          # state -> {letter: DNF}
    accepting: frozenset
    names: list
    region_of: dict = field(default_factory=dict)   # state -> region id
    regions: dict = field(default_factory=dict)     # region id -> Region

    @property
    def states(self) -> range:
        return range(len(self.delta))

    def successors(self, q: int) -> set[int]:
        out = set()
        for dnf in self.delta[q].values():
            for clause in dnf:
                out |= clause
        return out


class _Builder:
    def __init__(self, props, allow_params: bool, include_target: bool):
        self.props = tuple(sorted(props))
        self.letters = all_letters(self.props)
        self.allow_params = allow_params
        self.include_target = include_target
        self.delta: list[dict] = []
        self.accepting: set[int] = set()
        self.names: list[str] = []
        self.memo: dict[Formula, int] = {}
        self.region_of: dict[int, int] = {}
        self.regions: dict[int, Region] = {}

    def new_state(self, name: str, accepting: bool = False) -> int:
        self.delta.append({})
        self.names.append(name)
        q = len(self.delta) - 1
        if accepting:
            self.accepting.add(q)
        return q

    def build(self, phi: Formula) -> int:
        q = self.memo.get(phi)
        if q is None:
            q = self._build(phi)
            self.memo[phi] = q
        return q

    def _build(self, phi: Formula) -> int:
        if isinstance(phi, (Top, Bottom)):
            q = self.new_state(repr(phi))
            value = TRUE if isinstance(phi, Top) else FALSE
            self.delta[q] = {a: value for a in self.letters}
            return q
        if isinstance(phi, (Atom, NegAtom)):
            q = self.new_state(("" if isinstance(phi, Atom) else "!") + phi.prop)
            want = isinstance(phi, Atom)
            self.delta[q] = {a: TRUE if (phi.prop in a) == want else FALSE for a in self.letters}
            return q
        if isinstance(phi, (And, Or)):
            left, right = self.build(phi.left), self.build(phi.right)
            q = self.new_state("and" if isinstance(phi, And) else "or")
            op = dnf_and if isinstance(phi, And) else dnf_or
            self.delta[q] = {a: op(self.delta[left][a], self.delta[right][a]) for a in self.letters}
            return q
        if isinstance(phi, (DiamondLe, BoxLe)) and not self.allow_params:
            raise ValueError("parameterized operators need a counter construction")
        return self._modal(phi)

    def _modal(self, phi) -> int:
        diamond = isinstance(phi, (Diamond, DiamondLe, DiamondCp))
        color = phi.color if isinstance(phi, (DiamondCp, BoxCp)) else None
        nfa = thompson(phi.regex)
        body = self.build(phi.body)
        tests = {}
        for marks in nfa.marking.values():
            tests[marks] = self.build(marks if diamond else negate(marks))
        paths = {q: minimal_paths(epsilon_paths(nfa, q, self.include_target)) for q in nfa.states}

        region = None
        if isinstance(phi, (DiamondLe, BoxLe)):
            region = len(self.regions)
            self.regions[region] = Region(phi.var, "diamond" if diamond else "box", phi)

        ids: dict[tuple, int] = {}
        todo: list[tuple] = []

        def state_of(key) -> int:
            q = ids.get(key)
            if q is None:
                label = f"r{key[0]}" + (f"/{key[1]}" if color else "")
                q = self.new_state(label, accepting=not diamond)
                if region is not None:
                    self.region_of[q] = region
                ids[key] = q
                todo.append(key)
            return q

        root = state_of((nfa.initial, "e" if color else None))
        while todo:
            key = todo.pop()
            q_nfa, c = key
            me = ids[key]
            row = {}
            for a in self.letters:
                row[a] = self._row(nfa, paths[q_nfa], c, a, diamond, color, body, tests, state_of)
            self.delta[me] = row
        return root

    def _row(self, nfa, paths, c, a, diamond, color, body, tests, state_of):
        acc = FALSE if diamond else TRUE
        join = dnf_or if diamond else dnf_and
        for target, mark_sets in paths.items():
            for marks in mark_sets:
                if diamond:
                    side = TRUE
                    for m in marks:
                        side = dnf_and(side, self.delta[tests[m]][a])
                    if side == FALSE:
                        continue
                else:
                    side = FALSE
                    for m in marks:
                        side = dnf_or(side, self.delta[tests[m]][a])
                    if side == TRUE:
                        continue
                combine = dnf_and if diamond else dnf_or
                if target == nfa.final:
                    acc = join(acc, combine(self.delta[body][a], side))
                for nxt in nfa.step(target, a):
                    c2 = cp_step(c, color in a) if color else None
                    if c2 == CP_SINK:
                        continue
                    acc = join(acc, combine(dnf_state(state_of((nxt, c2))), side))
        return acc


def _build(phi: Formula, props, allow_params: bool, include_target: bool) -> Aba:
    universe = set(propositions(phi)) | set(colors(phi)) | set(props or ())
    b = _Builder(universe, allow_params, include_target)
    init = b.build(phi)
    return Aba(
        props=b.props, letters=b.letters, initial=init, delta=b.delta,
        accepting=frozenset(b.accepting), names=b.names,
        region_of=b.region_of, regions=b.regions,
    )


def build_aba(phi: Formula, props=None, include_target: bool = True) -> Aba:
    """Alternating automaton for a variable-free formula."""
    return _build(phi, props, False, include_target)


def build_parametric_aba(phi: Formula, props=None) -> Aba:
    """Alternating automaton treating bounded operators as unbounded ones.

    The regex states of each bounded operator are tagged with a region so a
    counter construction can enforce the bound afterwards.
    """
    return _build(phi, props, True, True)


def region_bounds(aba: Aba, alpha) -> dict[int, int]:
    missing = {r.var for r in aba.regions.values()} - set(alpha)
    if missing:
        raise ValueError(f"unassigned variables: {sorted(missing)}")
    return {rid: alpha[r.var] for rid, r in aba.regions.items()}


def is_weak(aba: Aba) -> bool:
    """Every SCC is entirely accepting or entirely non-accepting."""
    from .graphs import sccs

    comps = sccs(list(aba.states), lambda q: sorted(aba.successors(q)))
    for comp in comps:
        kinds = {q in aba.accepting for q in comp}
        if len(kinds) > 1:
            return False
    return True
