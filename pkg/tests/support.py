"""Shared corpora, fixtures and independent checkers for the test suite."""
from __future__ import annotations

from collections import deque
from functools import lru_cache

from pldl.formula import FragmentTag, all_variables, classify
from pldl.generate import corpus
from pldl.oracle import all_lassos
from pldl.syntax import make_system, parse_formula

AB = ("a", "b")


@lru_cache(maxsize=None)
def lassos(props=AB, max_len=4):
    return tuple(all_lassos(props, max_len))


@lru_cache(maxsize=None)
def ldl_cp_corpus(count=220):
    """Variable-free formulas with changepoint operators over color b, size <= 10."""
    return tuple(corpus(count, seed=7, max_size=10, cp_color="b"))


@lru_cache(maxsize=None)
def single_variable_corpus():
    """(formula, kind) pairs with exactly the variable x, kind 'diamond' or 'box'."""
    out = []
    for phi in corpus(400, seed=11, allow_params=True, max_size=7):
        if not all_variables(phi):
            continue
        tag = classify(phi)
        if tag is FragmentTag.PLDL_DIAMOND:
            out.append((phi, "diamond"))
        elif tag is FragmentTag.PLDL_BOX:
            out.append((phi, "box"))
    return tuple(out)


def system(text: str):
    """Compact system notation: 'a{req} b{} c{resp} ; a>b b>c c>a', first state initial."""
    states, _, edges = text.partition(";")
    labels = {}
    for tok in states.split():
        name, _, rest = tok.partition("{")
        labels[name] = frozenset(x for x in rest.rstrip("}").split(",") if x)
    props = set().union(*labels.values()) | {"p", "q", "req", "resp"}
    pairs = [tuple(e.split(">")) for e in edges.split()]
    return make_system(props, labels, next(iter(labels)), pairs)


RR = "[ tt* ]( req -> < tt* >{<= x} resp )"

# (name, system, formula, expected model-checking verdict)
MC_FIXTURES = [
    ("instant-response", "s{req,resp} ; s>s", RR, True),
    ("never-respond", "s{req} ; s>s", RR, False),
    ("delayed-response", "a{req} b{} c{resp} ; a>b b>c c>a", RR, True),
    ("branch-to-silence", "a{req} b{} c{resp} ; a>b a>c b>b c>c", RR, False),
    ("unbounded-wait", "a{req} b{} c{resp} ; a>b b>b b>c c>a", RR, False),
    ("two-delays", "a{req} b{} c{resp} d{req} e{} f{resp} ; a>b b>c c>d d>e e>f f>a c>a",
     RR, True),
    ("alternating-p", "s{p} t{} ; s>t t>s", "[ tt* ] < tt* >{<= x} p", True),
    ("may-stall", "s{} t{p} ; s>s s>t t>t", "< tt* >{<= x} p", False),
    ("late-p", "s{} t{} u{p} ; s>t t>u u>u", "< tt* >{<= x} p", True),
    ("always-p-box", "s{p} ; s>s", "[ tt* ][ tt* ]{<= y} p", True),
    ("p-twice-box", "s{p} t{p} u{} ; s>t t>u u>u", "[ tt* ]{<= y} p", True),
    ("p-fails-at-once", "s{} ; s>s", "[ tt* ]{<= y} p", False),
    ("mixed-operators", "s{p} t{p,q} ; s>t t>s", "< tt* >{<= x} q & [ tt* ]{<= y} p", True),
    ("universal-p", "s{} t{p} ; s>s s>t t>s t>t", "< tt* >{<= x} p", False),
    ("universal-fair", "s{} t{p} ; s>s s>t t>s t>t", "[ tt* ] < tt* > p", False),
    ("recurring-p", "s{} t{p} ; s>t t>s", "[ tt* ] < tt* >{<= x} p", True),
    ("sparse-p", "s{} t{p} ; s>s s>t t>s", "[ tt* ] < tt* >{<= x} p", False),
    ("even-steps", "s{p} t{} ; s>t t>s", "[ (tt ; tt)* ] p", True),
    ("odd-steps", "s{} t{p} ; s>t t>s", "[ (tt ; tt)* ] p", False),
    ("p-until-q", "s{p} t{p} u{q} ; s>t t>u u>u", "< p* >{<= x} q", True),
    ("p-forever", "s{p} u{q} ; s>s s>u u>u", "< p* >{<= x} q", False),
    ("next-step", "s{p} t{q} ; s>t t>s", "[ tt* ]( p -> < tt > q )", True),
    ("while-loop", "s{q} t{} ; s>t t>t", "[ ({q}? ; tt)* ; {!q}? ] !p", True),
    ("test-bounded", "s{} t{p} u{q} ; s>t t>u u>u", "< {< tt* >{<= x} p}? ; tt* > q", True),
    # two variables whose objectives disagree
    ("two-diamonds", "s{p} t{} u{q} ; s>t t>u u>s", "< tt* >{<= x} p & < tt* >{<= z} q", True),
    ("two-boxes", "s{p,q} t{p} u{} ; s>t t>u u>u", "[ tt* ]{<= y} p & [ tt* ]{<= w} q", True),
]


PREDICT = "(resp & < tt > req) | (!resp & < tt > !req)"

# (formula, valuation) pairs with input req and output resp
DUALITY = [
    (RR, {"x": 0}),
    (RR, {"x": 1}),
    ("[ tt* ]( req -> < tt >{<= x} resp )", {"x": 0}),
    ("[ tt* ]( req -> < tt >{<= x} resp )", {"x": 1}),
    ("< tt* >{<= x} resp", {"x": 0}),
    ("< tt* >{<= x} (req & resp)", {"x": 2}),
    ("[ tt* ]((req & resp) | (!req & !resp))", {}),
    (PREDICT, {}),
    ("[ tt* ]{<= x} resp", {"x": 2}),
    ("[ tt* ]{<= x} req", {"x": 1}),
    ("< tt* >{<= x} [ tt* ] (resp | req)", {"x": 1}),
    ("[ tt* ] < tt* >{<= x} (req & resp)", {"x": 1}),
    ("< resp* >{<= x} req", {"x": 1}),
    ("[ (req ; tt)* ]{<= x} resp", {"x": 1}),
]

# (formula, inputs, outputs) for realizability optimization
REAL_FIXTURES = [
    (RR, "req", "resp"),
    ("[ tt* ]( req -> < tt >{<= x} resp )", "req", "resp"),
    ("< tt* >{<= x} resp", "req", "resp"),
    ("< tt* >{<= x} (req & resp)", "req", "resp"),
    ("!resp & < tt* >{<= x} resp", "req", "resp"),
    ("< tt* >{<= x} [ tt* ] (resp | req)", "req", "resp"),
    ("[ tt* ] < tt* >{<= x} (req & resp)", "req", "resp"),
    ("< resp* >{<= x} req", "req", "resp"),
    ("< tt* >{<= x} resp & < tt* >{<= z} (!resp & < tt > resp)", "req", "resp"),
    ("[ tt* ]{<= y} resp", "req", "resp"),
    ("[ tt* ]{<= y} req", "req", "resp"),
    ("< tt ; tt > resp & [ tt* ]{<= y} !resp", "req", "resp"),
    ("< tt > resp & [ tt* ]{<= y} !resp", "req", "resp"),
    ("[ (req ; tt)* ]{<= y} resp", "req", "resp"),
    ("< tt ; tt > resp & [ tt* ]{<= y} !resp & < tt > ack & [ tt* ]{<= w} !ack", "req",
     "resp ack"),
]


def mc_fixtures():
    return [(name, system(s), parse_formula(f), exp) for name, s, f, exp in MC_FIXTURES]


# ---------------------------------------------------------------------------
# Independent pumpability checker: the watcher construction


def watcher_pumpable(g) -> bool:
    """Does g have a fair pumpable path? Decided on a watcher-augmented graph.

    A status is 'fresh', ('watch', u, flipped) or 'done'. From 'fresh' the
    search may start watching the current vertex; revisiting the watched
    vertex (after an inner color change, for degree two) finishes the block.
    Leaving a block is only allowed when it is done. Fairness asks for a
    reachable cycle through an accepting vertex of every set and through a
    block change.
    """
    block = g.colors[0]
    inner = g.colors[1] if len(g.colors) == 2 else None
    has = lambda v, c: c in g.label[v]

    def moves(node):
        v, status, _ = node
        out = []
        starts = [status]
        if status == "fresh":
            starts.append(("watch", v, False))
        for st in starts:
            for w in g.succ[v]:
                if has(w, block) != has(v, block):
                    if st == "done":
                        out.append((w, "fresh", True))
                    continue
                if st in ("fresh", "done"):
                    out.append((w, st, False))
                    continue
                _, u, flipped = st
                if inner is not None and has(w, inner) != has(u, inner):
                    flipped = True
                if w == u and (inner is None or flipped):
                    out.append((w, "done", False))
                else:
                    out.append((w, ("watch", u, flipped), False))
        return out

    start = (g.initial, "fresh", False)
    reach = _reach(start, moves)
    accepting = [lambda n, F=F: n[0] in F for F in g.accepting] + [lambda n: n[2]]
    for n in reach:
        if not accepting[0](n):
            continue
        forward = _reach_strict(n, moves)
        if n not in forward:
            continue
        loop = {m for m in forward if n in _reach(m, moves)}
        if all(any(acc(m) for m in loop) for acc in accepting):
            return True
    return False


def _reach(start, moves):
    seen = {start}
    queue = deque([start])
    while queue:
        v = queue.popleft()
        for w in moves(v):
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return seen


def _reach_strict(start, moves):
    """Nodes reachable by a nonempty path."""
    seen = set()
    queue = deque(moves(start))
    while queue:
        v = queue.popleft()
        if v in seen:
            continue
        seen.add(v)
        queue.extend(moves(v))
    return seen


def is_pumpable_path(g, stem, cycle) -> bool:
    """Direct check of the pumpability definition on a concrete lasso of vertices."""
    block = g.colors[0]
    inner = g.colors[1] if len(g.colors) == 2 else None
    color = lambda v: block in g.label[v]
    seq = list(stem) + list(cycle)
    for v, w in zip(seq, seq[1:] + [cycle[0]]):
        if w not in g.succ[v]:
            return False
    if all(color(v) == color(cycle[0]) for v in cycle):
        return False
    # rotate so the cycle starts a block
    unrolled = list(stem) + list(cycle) * 2
    for t in range(len(stem), len(stem) + len(cycle)):
        prev = unrolled[t - 1] if t > 0 else cycle[-1]
        if color(prev) != color(unrolled[t]):
            break
    stem2, cyc2 = unrolled[:t], unrolled[t:t + len(cycle)]
    for part in (stem2, cyc2):
        for b in _split_blocks(part, color):
            ok = False
            for j in range(len(b)):
                for k in range(j + 1, len(b)):
                    if b[j] == b[k] and (inner is None or
                                         len({inner in g.label[x] for x in b[j:k + 1]}) == 2):
                        ok = True
            if not ok:
                return False
    return True


def _split_blocks(seq, color):
    out = []
    for v in seq:
        if out and color(out[-1][-1]) == color(v):
            out[-1].append(v)
        else:
            out.append([v])
    return out


# ---------------------------------------------------------------------------
# Hypothesis strategies

from hypothesis import strategies as st

from pldl.formula import (
    And, Atom, Bottom, Box, BoxCp, BoxLe, Concat, Diamond, DiamondCp, DiamondLe,
    NegAtom, Or, PAnd, PFalse, PNot, POr, PTrue, PVar, Prop, Star, Test, Top, Union,
)


def prop_formulas(props=AB):
    leaf = st.one_of(st.just(PTrue()), st.just(PFalse()), st.sampled_from(props).map(PVar))
    return st.recursive(leaf, lambda c: st.one_of(
        c.map(PNot), st.builds(PAnd, c, c), st.builds(POr, c, c)), max_leaves=3)


def formulas(props=AB, cp_color=None, variables=(), max_leaves=6):
    leaf = st.one_of(st.just(Top()), st.just(Bottom()),
                     st.sampled_from(props).map(Atom), st.sampled_from(props).map(NegAtom))

    def extend(children):
        regex = st.recursive(
            st.one_of(prop_formulas(props).map(Prop), children.map(Test)),
            lambda r: st.one_of(st.builds(Union, r, r), st.builds(Concat, r, r), r.map(Star)),
            max_leaves=3)
        options = [st.builds(And, children, children), st.builds(Or, children, children),
                   st.builds(Diamond, regex, children), st.builds(Box, regex, children)]
        if cp_color:
            options += [st.builds(DiamondCp, regex, children, st.just(cp_color)),
                        st.builds(BoxCp, regex, children, st.just(cp_color))]
        if variables:
            v = st.sampled_from(variables)
            options += [st.builds(DiamondLe, regex, v, children),
                        st.builds(BoxLe, regex, v, children)]
        return st.one_of(*options)

    return st.recursive(leaf, extend, max_leaves=max_leaves)
