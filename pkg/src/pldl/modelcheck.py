"""Model checking PLDL against finite transition systems.

The deciders work on colored Buchi graphs: products of an automaton with a
system in which every step also guesses the value of fresh coloring
propositions. A system violates a formula for every valuation iff the
product has a fair path whose color blocks can all be pumped.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping

from .automata.alternating import build_aba, build_parametric_aba, region_bounds
from .automata.breakpoint import counter_breakpoint, mh_to_nba
from .automata.buchi import Nba, trim
from .automata.graphs import LassoPath, find_lasso, sccs
from .formula import (
    DEFAULT_COLOR, And, Formula, FragmentTag, all_variables, chi_inf, classify,
    color_transform, eliminate_boxes, fix_all_but_one_box, is_pldl_box, is_pldl_diamond,
    is_well_formed, negate, propositions, rel, rename_vars, variables,
)
from .oracle import LassoWord
from .syntax import SystemDescription, make_system


class _Infinity:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "INFINITY"

    def __str__(self) -> str:
        return "inf"


INFINITY = _Infinity()


def fresh_prop(base: str, taken) -> str:
    name = base
    while name in taken:
        name += "'"
    return name


# ---------------------------------------------------------------------------
# Colored Buchi graphs


@dataclass
class ColoredGraph:
    """Finite graph whose vertices carry a set of coloring propositions.

    ``colors`` lists the coloring propositions: one for degree one, two
    (block color first) for degree two. ``accepting`` holds one Buchi set
    per degree. ``trace`` maps a vertex to the system letter it emits.
    """

    initial: object
    succ: dict
    label: dict
    accepting: tuple
    colors: tuple
    trace: dict = field(default_factory=dict)

    @property
    def vertices(self) -> list:
        return list(self.succ)

    @property
    def degree(self) -> int:
        return len(self.colors)


def build_product(nba: Nba, sys: SystemDescription, color: str = DEFAULT_COLOR) -> ColoredGraph:
    if color not in nba.props:
        raise ValueError(f"automaton alphabet lacks the coloring proposition {color!r}")
    choices = [frozenset(), frozenset([color])]
    succ, label, trace = {}, {}, {}
    for q in nba.states:
        for s in sys.states:
            for C in choices:
                v = (q, s, C)
                letter = sys.label(s) | C
                succ[v] = [(q2, s2, C2) for q2 in nba.step(q, letter)
                           for s2 in sys.successors(s) for C2 in choices]
                label[v] = C
                trace[v] = sys.label(s)
    F = frozenset(v for v in succ if v[0] in nba.accepting)
    return ColoredGraph((nba.initial, sys.init, frozenset()), succ, label, (F,), (color,), trace)


def build_ag_product(nba_a: Nba, nba_g: Nba, sys: SystemDescription,
                     p: str = "_p", q: str = "_q") -> ColoredGraph:
    """Degree-two product; p colors the assumption, q the guarantee."""
    if p not in nba_a.props or q not in nba_g.props:
        raise ValueError("automata alphabets lack the coloring propositions")
    choices = [frozenset(c) for k in range(3) for c in itertools.combinations((p, q), k)]
    succ, label, trace = {}, {}, {}
    for qa in nba_a.states:
        for qg in nba_g.states:
            for s in sys.states:
                for C in choices:
                    v = (qa, qg, s, C)
                    letter = sys.label(s) | C
                    succ[v] = [(a2, g2, s2, C2)
                               for a2 in nba_a.step(qa, letter)
                               for g2 in nba_g.step(qg, letter)
                               for s2 in sys.successors(s) for C2 in choices]
                    label[v] = C
                    trace[v] = sys.label(s)
    F0 = frozenset(v for v in succ if v[0] in nba_a.accepting)
    F1 = frozenset(v for v in succ if v[1] in nba_g.accepting)
    init = (nba_a.initial, nba_g.initial, sys.init, frozenset())
    # block color q first, inner color p second
    return ColoredGraph(init, succ, label, (F0, F1), (q, p), trace)


# ---------------------------------------------------------------------------
# Pumpable nonemptiness


def _has(g: ColoredGraph, v, color: str) -> bool:
    return color in g.label[v]


def pumpable_nonempty(g: ColoredGraph) -> LassoPath | None:
    """A fair lasso path in g whose blocks all contain a suitable repetition.

    Degree one: every block (maximal run of equal color) repeats a vertex.
    Degree two: every block of the first color repeats a vertex with a
    change of the second color strictly in between.

    A vertex is a valid repetition point iff it lies on a cycle inside its
    block subgraph (with a change of the inner color for degree two), so
    the search runs on vertices tagged (done, entered-by-color-change) and
    takes a detour around such a cycle when switching to done.
    """
    block = g.colors[0]
    inner = g.colors[1] if g.degree == 2 else None
    same = lambda v: [w for w in g.succ[v] if _has(g, w, block) == _has(g, v, block)]
    comp_of = {}
    for comp in sccs(list(g.succ), same):
        cid = len(comp_of)
        for v in comp:
            comp_of[v] = (cid, comp)
    good = {}
    for v, (cid, comp) in comp_of.items():
        if inner is None:
            good[v] = len(comp) > 1 or v in g.succ[v]
        else:
            good[v] = any(_has(g, w, inner) != _has(g, v, inner) for w in comp)

    def succ(node):
        v, done, _ = node
        out = []
        if not done and good[v]:
            out.append(("detour", (v, True, node[2])))
        for w in g.succ[v]:
            if _has(g, w, block) == _has(g, v, block):
                out.append((None, (w, done, False)))
            elif done:
                out.append((None, (w, False, True)))
        return out

    acc = [lambda n, F=F: n[0] in F for F in g.accepting] + [lambda n: n[2]]
    path = find_lasso((g.initial, False, False), succ, acc)
    if path is None:
        return None

    def detour(v):
        members = set(comp_of[v][1])
        if inner is None:
            return _walk(g, v, lambda w: w == v, members, same)
        flip = _has(g, v, inner)
        there = _walk(g, v, lambda w: _has(g, w, inner) != flip, members, same)
        back = _walk(g, there[-1], lambda w: w == v, members, same)
        return there[:-1] + back

    def expand(entries):
        out = []
        for node, lab in entries:
            v = node[0]
            if lab == "detour":
                out.extend(detour(v)[:-1])
            else:
                out.append(v)
        return out

    stem = expand(path.stem)
    cycle = expand(path.cycle)
    return LassoPath(tuple((v, None) for v in stem), tuple((v, None) for v in cycle))


def _walk(g, start, goal, members, succ):
    """Vertices of a shortest nonempty path start -> goal inside members (both ends included)."""
    from collections import deque
    parent = {}
    queue = deque([start])
    while queue:
        v = queue.popleft()
        for w in succ(v):
            if w not in members or w in parent:
                continue
            parent[w] = v
            if goal(w):
                path = [w]
                cur = w
                while True:
                    cur = parent[cur]
                    path.append(cur)
                    if cur == start:
                        break
                return path[::-1]
            queue.append(w)
    raise AssertionError("no path inside the component")


def pumpable_nonempty1(g: ColoredGraph) -> LassoPath | None:
    if g.degree != 1:
        raise ValueError("expected a degree-one graph")
    return pumpable_nonempty(g)


def pumpable_nonempty2(g: ColoredGraph) -> LassoPath | None:
    if g.degree != 2:
        raise ValueError("expected a degree-two graph")
    return pumpable_nonempty(g)


def _blocks(vertices, color_of):
    out, cur = [], []
    for v in vertices:
        if cur and color_of(v) != color_of(cur[-1]):
            out.append(cur)
            cur = []
        cur.append(v)
    if cur:
        out.append(cur)
    return out


def align_to_blocks(g: ColoredGraph, path: LassoPath) -> tuple[list, list]:
    """Rotate a lasso so that its cycle starts at a block boundary."""
    color = g.colors[0]
    stem = [v for v, _ in path.stem]
    cycle = [v for v, _ in path.cycle]
    unrolled = stem + cycle + cycle
    c = lambda v: _has(g, v, color)
    for t in range(len(stem), len(stem) + len(cycle)):
        prev = unrolled[t - 1] if t > 0 else cycle[-1]
        if c(prev) != c(unrolled[t]):
            return unrolled[:t], unrolled[t:t + len(cycle)]
    raise ValueError("path cycle has no color change")


def _repetition(g: ColoredGraph, block: list) -> tuple[int, int]:
    """First pair j < j2 with block[j] == block[j2] (and an inner color change between, degree two)."""
    inner = g.colors[1] if g.degree == 2 else None
    for jj in range(len(block)):
        for j in range(jj):
            if block[j] != block[jj]:
                continue
            if inner is None or len({_has(g, v, inner) for v in block[j:jj + 1]}) == 2:
                return j, jj
    raise ValueError("path is not pumpable")


def pump_witness(g: ColoredGraph, path: LassoPath, k: int) -> LassoWord:
    """The trace of path with each block's first repetition pumped k extra times."""
    stem, cycle = align_to_blocks(g, path)
    c = lambda v: _has(g, v, g.colors[0])

    def pump(vertices):
        out = []
        for block in _blocks(vertices, c):
            j, jj = _repetition(g, block)
            out += block[:jj] + block[j:jj] * k + block[jj:]
        return out

    return LassoWord(tuple(g.trace[v] for v in pump(stem)),
                     tuple(g.trace[v] for v in pump(cycle)))


def path_trace(g: ColoredGraph, path: LassoPath) -> LassoWord:
    return LassoWord(tuple(g.trace[v] for v, _ in path.stem),
                     tuple(g.trace[v] for v, _ in path.cycle))


# ---------------------------------------------------------------------------
# Deciders


@dataclass
class McVerdict:
    satisfied: bool
    valuation: dict | None = None
    witness: LassoPath | None = None
    graph: ColoredGraph | None = field(default=None, repr=False)
    automaton_size: int = 0

    @property
    def trace(self) -> LassoWord | None:
        if self.witness is None or self.graph is None:
            return None
        return path_trace(self.graph, self.witness)


def _require_well_formed(phi: Formula):
    if not is_well_formed(phi):
        raise ValueError("formula is not well-formed")


def violation_automaton(phi: Formula, color: str, extra_props=()) -> Nba:
    """Buchi automaton for !rel(phi) & chi(color) & chi(!color), phi PLDL-diamond."""
    target = And(And(negate(rel(phi, color)), chi_inf(color)), chi_inf(color, False))
    return trim(mh_to_nba(build_aba(target, extra_props)))


def model_check(sys: SystemDescription, phi: Formula) -> McVerdict:
    _require_well_formed(phi)
    dia_phi = eliminate_boxes(phi)
    color = fresh_prop(DEFAULT_COLOR, set(sys.props) | propositions(phi))
    nba = violation_automaton(dia_phi, color, [color])
    g = build_product(nba, sys, color)
    path = pumpable_nonempty1(g)
    if path is not None:
        return McVerdict(False, None, path, g, len(nba))
    bound = 2 * len(nba) * len(sys.states) + 2
    dia, box = variables(phi)
    alpha = {z: bound for z in dia}
    alpha.update({y: 0 for y in box})
    return McVerdict(True, alpha, None, g, len(nba))


def mc_query(sys: SystemDescription, phi: Formula, alpha: Mapping[str, int]) -> bool:
    """Does every trace of sys satisfy phi under exactly this valuation?"""
    missing = all_variables(phi) - set(alpha)
    if missing:
        raise ValueError(f"unassigned variables: {sorted(missing)}")
    aba = build_parametric_aba(negate(phi))
    nba = counter_breakpoint(aba, region_bounds(aba, alpha))

    def succ(node):
        q, s = node
        return [(None, (q2, s2)) for q2 in nba.step(q, sys.label(s)) for s2 in sys.successors(s)]

    bad = find_lasso((nba.initial, sys.init), succ, [lambda n: n[0] in nba.accepting])
    return bad is None


def ag_check(sys: SystemDescription, phi_a: Formula, phi_g: Formula) -> McVerdict:
    """Assume-guarantee check: if sys (in any context) meets phi_a it meets phi_g."""
    _require_well_formed(phi_a)
    _require_well_formed(phi_g)
    a = eliminate_boxes(phi_a)
    gf = eliminate_boxes(phi_g)
    taken = set(sys.props) | propositions(phi_a) | propositions(phi_g)
    p = fresh_prop(DEFAULT_COLOR, taken)
    q = fresh_prop("_q", taken | {p})
    assume = And(And(chi_inf(p), chi_inf(p, False)), rel(a, p))
    guarantee = And(And(chi_inf(q), chi_inf(q, False)), negate(rel(gf, q)))
    nba_a = trim(mh_to_nba(build_aba(assume, [p])))
    nba_g = trim(mh_to_nba(build_aba(guarantee, [q])))
    g = build_ag_product(nba_a, nba_g, sys, p, q)
    path = pumpable_nonempty2(g)
    if path is None:
        return McVerdict(True, {}, None, g, len(nba_a) * len(nba_g))
    return McVerdict(False, None, path, g, len(nba_a) * len(nba_g))


def universal_system(props, initial_letter) -> SystemDescription:
    props = sorted(props)
    letters = [frozenset(c) for k in range(len(props) + 1)
               for c in itertools.combinations(props, k)]
    names = {a: "u" + "".join(f"_{x}" for x in sorted(a)) for a in letters}
    labels = {names[a]: a for a in letters}
    edges = [(names[a], names[b]) for a in letters for b in letters]
    return make_system(props, labels, names[frozenset(initial_letter)], edges)


def implication(phi_a: Formula, phi_g: Formula, props=None) -> bool:
    """Does every system satisfying phi_a (for some valuation) satisfy phi_g?"""
    if props is None:
        props = propositions(phi_a) | propositions(phi_g)
    props = sorted(props)
    for k in range(len(props) + 1):
        for first in itertools.combinations(props, k):
            if not ag_check(universal_system(props, first), phi_a, phi_g).satisfied:
                return False
    return True


# ---------------------------------------------------------------------------
# Optimization


@dataclass
class OptResult:
    value: object            # int, INFINITY or None
    valuation: dict | None = None
    bound: int = 0           # the search bound that was used


def _lowest(pred, lo: int, hi: int) -> int | None:
    """Smallest v in [lo, hi] with pred(v), for monotone pred."""
    if not pred(hi):
        return None
    while lo < hi:
        mid = (lo + hi) // 2
        if pred(mid):
            hi = mid
        else:
            lo = mid + 1
    return lo


def _highest(pred, lo: int, hi: int) -> int | None:
    """Largest v in [lo, hi] with pred(v), for antitone pred."""
    if not pred(lo):
        return None
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if pred(mid):
            lo = mid
        else:
            hi = mid - 1
    return lo


OBJECTIVES = ("minmin", "minmax", "maxmax", "maxmin")


def min_bound(sys: SystemDescription, phi: Formula) -> int:
    """Valuation bound beyond which a PLDL-diamond formula cannot become true."""
    color = fresh_prop(DEFAULT_COLOR, set(sys.props) | propositions(phi))
    nba = violation_automaton(phi, color, [color])
    return 2 * len(nba) * len(sys.states) + 2


def max_bound(sys: SystemDescription, phi: Formula) -> int:
    """k* for a PLDL-box formula: satisfied there means satisfied everywhere."""
    neg = negate(phi)
    color = fresh_prop(DEFAULT_COLOR, set(sys.props) | propositions(phi))
    nba = trim(mh_to_nba(build_aba(color_transform(neg, color), [color])))
    return 4 * len(nba) * len(sys.states) + 2


def mc_optimize(sys: SystemDescription, phi: Formula, objective: str) -> OptResult:
    objective = objective.lower()
    if objective not in OBJECTIVES:
        raise ValueError(f"unknown objective {objective!r}")
    dia, box = variables(phi)
    if objective.startswith("min"):
        if classify(phi) is not FragmentTag.PLDL_DIAMOND:
            raise ValueError("min objectives need a PLDL-diamond formula with variables")
        if objective == "minmax":
            z = "z"
            single = rename_vars(phi, z)
            bound = min_bound(sys, single)
            v = _lowest(lambda k: mc_query(sys, single, {z: k}), 0, bound)
            return OptResult(v, None if v is None else {x: v for x in dia}, bound)
        bound = min_bound(sys, phi)
        best = None
        for x in sorted(dia):
            others = {y: bound for y in dia if y != x}
            v = _lowest(lambda k: mc_query(sys, phi, {**others, x: k}), 0, bound)
            if v is not None and (best is None or v < best[0]):
                best = (v, {**others, x: v})
        if best is None:
            return OptResult(None, None, bound)
        return OptResult(best[0], best[1], bound)

    if classify(phi) is not FragmentTag.PLDL_BOX:
        raise ValueError("max objectives need a PLDL-box formula with variables")
    if objective == "maxmin":
        z = "z"
        single = rename_vars(phi, z)
        value, k_star = _max_single(sys, single, z)
        val = None if value is None else {y: (k_star if value is INFINITY else value) for y in box}
        return OptResult(value, val, k_star)
    best, best_val, k_used = None, None, 0
    for y in sorted(box):
        single = fix_all_but_one_box(phi, y)
        value, k_star = _max_single(sys, single, y)
        k_used = max(k_used, k_star)
        if value is None:
            continue
        if best is None or value is INFINITY or (best is not INFINITY and value > best):
            best = value
            best_val = {w: 0 for w in box}
            best_val[y] = k_star if value is INFINITY else value
        if best is INFINITY:
            break
    return OptResult(best, best_val, k_used)


def _max_single(sys, phi, y):
    k_star = max_bound(sys, phi)
    if mc_query(sys, phi, {y: k_star}):
        return INFINITY, k_star
    return _highest(lambda k: mc_query(sys, phi, {y: k}), 0, k_star), k_star


# ---------------------------------------------------------------------------
# Reports


def format_verdict(v: McVerdict) -> str:
    from .syntax import format_lasso, format_valuation
    lines = ["RESULT " + ("sat" if v.satisfied else "unsat")]
    if v.valuation:
        lines.append("VALUATION " + format_valuation(v.valuation))
    if v.trace is not None:
        lines.append("WITNESS " + format_lasso(v.trace))
    return "\n".join(lines)
