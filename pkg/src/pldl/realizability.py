"""Realizability: parity games, strategy extraction and optimal valuations.

Each round the environment picks the input letter first and the system
answers with an output letter. The game is played on a deterministic parity
automaton: environment vertices are automaton states, system vertices pair
a state with the input just chosen.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

from .automata.alternating import all_letters, build_aba, build_parametric_aba, region_bounds
from .automata.breakpoint import counter_breakpoint, mh_to_nba
from .automata.buchi import trim
from .automata.graphs import sccs
from .automata.parity import Dpa, determinize
from .formula import (
    DEFAULT_COLOR, TT, And, Atom, Box, BoxCp, BoxLe, Concat, Diamond, DiamondCp,
    DiamondLe, Formula, FragmentTag, NegAtom, Or, Prop, Regex, Star, Test, Union,
    all_variables, classify, color_transform, eliminate_boxes, fix_all_but_one_box,
    is_well_formed, negate, prop_atoms, prop_to_formula, propositions, rename_vars, variables,
)
from .modelcheck import INFINITY, fresh_prop
from .oracle import LassoWord
from .syntax import ParseError, format_letter

ENV, SYS = "I", "O"


# ---------------------------------------------------------------------------
# Games


@dataclass
class ParityGame:
    """Max-parity game; the system player wins plays whose top recurring color is even."""

    owner: dict          # vertex -> ENV or SYS
    succ: dict           # vertex -> list of vertices
    color: dict          # vertex -> int
    initial: object
    inputs: tuple = ()
    outputs: tuple = ()
    dpa: Dpa | None = field(default=None, repr=False)

    @property
    def vertices(self) -> list:
        return list(self.succ)

    def __len__(self) -> int:
        return len(self.succ)


def build_arena(dpa: Dpa, inputs, outputs) -> ParityGame:
    """Game on dpa where the environment owns states and the system owns (state, input)."""
    inputs, outputs = tuple(sorted(inputs)), tuple(sorted(outputs))
    extra = set(dpa.props) - set(inputs) - set(outputs)
    if extra or set(inputs) & set(outputs):
        raise ValueError(f"automaton alphabet does not match the partition: {sorted(extra)}")
    ins, outs = all_letters(inputs), all_letters(outputs)
    owner, succ, color = {}, {}, {}
    for q in dpa.states:
        owner[q] = ENV
        color[q] = dpa.colors[q]
        succ[q] = [(q, i) for i in ins]
        for i in ins:
            v = (q, i)
            owner[v] = SYS
            color[v] = dpa.colors[q]
            succ[v] = sorted({dpa.step(q, i | o) for o in outs})
    return ParityGame(owner, succ, color, dpa.initial, inputs, outputs, dpa)


def _attractor(game: ParityGame, region: set, target: set, player: str, rank: dict):
    """Vertices of region from which player forces a visit to target, with a strategy."""
    attr = set(target)
    strategy = {}
    members = sorted(region, key=rank.__getitem__)
    preds: dict = {v: [] for v in members}
    for v in members:
        for w in game.succ[v]:
            if w in region:
                preds[w].append(v)
    count = {v: sum(1 for w in game.succ[v] if w in region) for v in members}
    queue = sorted(target, key=rank.__getitem__, reverse=True)
    while queue:
        w = queue.pop()
        for v in preds[w]:
            if v in attr:
                continue
            if game.owner[v] == player:
                attr.add(v)
                strategy[v] = w
                queue.append(v)
            else:
                count[v] -= 1
                if count[v] == 0:
                    attr.add(v)
                    queue.append(v)
    return attr, strategy


def _zielonka(game: ParityGame, region: set, rank: dict):
    if not region:
        return {ENV: set(), SYS: set()}, {}
    top = max(game.color[v] for v in region)
    player = SYS if top % 2 == 0 else ENV
    other = ENV if player == SYS else SYS
    tops = {v for v in region if game.color[v] == top}
    attr, attr_strat = _attractor(game, region, tops, player, rank)
    win, strat = _zielonka(game, region - attr, rank)
    if not win[other]:
        strategy = dict(strat)
        strategy.update(attr_strat)
        for v in tops:
            if game.owner[v] == player:
                strategy[v] = next(w for w in game.succ[v] if w in region)
        return {player: set(region), other: set()}, strategy
    battr, battr_strat = _attractor(game, region, win[other], other, rank)
    win2, strat2 = _zielonka(game, region - battr, rank)
    strategy = dict(strat2)
    for v in win[other]:
        if v in strat and game.owner[v] == other:
            strategy[v] = strat[v]
    strategy.update(battr_strat)
    return {player: win2[player], other: win2[other] | battr}, strategy


def solve_parity(game: ParityGame) -> tuple[dict, dict]:
    """Winning regions per player and a positional strategy for each player on its region.

    Sets are always traversed in the game's vertex order, so the strategy
    does not depend on hash randomization.
    """
    rank = {v: k for k, v in enumerate(game.succ)}
    win, strategy = _zielonka(game, set(game.succ), rank)
    strategy = {v: w for v, w in strategy.items()
                if (game.owner[v] == SYS and v in win[SYS]) or
                   (game.owner[v] == ENV and v in win[ENV])}
    return win, strategy


def strategy_is_winning(game: ParityGame, strategy: dict, player: str = SYS, start=None) -> bool:
    """Every play from start that follows strategy is won by player.

    Checked on the strategy-restricted reachable graph: for the system, no
    cycle may have an odd maximum color (and dually for the environment).
    """
    start = game.initial if start is None else start
    seen, stack = {start}, [start]
    adj = {}
    while stack:
        v = stack.pop()
        if game.owner[v] == player:
            if v not in strategy:
                return False
            adj[v] = [strategy[v]]
        else:
            adj[v] = list(game.succ[v])
        for w in adj[v]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    losing_parity = 1 if player == SYS else 0
    for c in sorted({game.color[v] for v in seen}):
        if c % 2 != losing_parity:
            continue
        low = [v for v in seen if game.color[v] <= c]
        lowset = set(low)
        for comp in sccs(low, lambda v: [w for w in adj[v] if w in lowset]):
            cyclic = len(comp) > 1 or comp[0] in adj[comp[0]]
            if cyclic and any(game.color[v] == c for v in comp):
                return False
    return True


# ---------------------------------------------------------------------------
# Transducers


@dataclass
class Transducer:
    """Moore machine: reading an input moves to a state whose output is emitted."""

    inputs: tuple
    outputs: tuple
    initial: int
    delta: list          # state -> {input letter: state}
    out: list            # state -> output letter
    names: list = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.delta)

    @property
    def states(self) -> range:
        return range(len(self.delta))

    def run(self, inputs) -> list:
        """Outputs emitted for a finite input sequence."""
        t, res = self.initial, []
        for i in inputs:
            t = self.delta[t][frozenset(i) & frozenset(self.inputs)]
            res.append(self.out[t])
        return res


def extract_transducer(game: ParityGame, strategy: dict) -> Transducer:
    """Moore machine for a winning system strategy from the game's initial vertex."""
    dpa = game.dpa
    ins, outs = all_letters(game.inputs), all_letters(game.outputs)

    def output_for(v):
        q, i = v
        target = strategy[v]
        return next(o for o in outs if dpa.step(q, i | o) == target)

    ids = {"init": 0}
    order = ["init"]
    delta, out = [], []
    k = 0
    while k < len(order):
        node = order[k]
        k += 1
        q = game.initial if node == "init" else strategy[node]
        row = {}
        for i in ins:
            v = (q, i)
            if v not in ids:
                ids[v] = len(order)
                order.append(v)
            row[i] = ids[v]
        delta.append(row)
        out.append(frozenset() if node == "init" else output_for(node))
    names = ["init"] + [f"q{v[0]}{format_letter(v[1])}" for v in order[1:]]
    return Transducer(game.inputs, game.outputs, 0, delta, out, names)


def minimize(t: Transducer) -> Transducer:
    """Merge states with equal output behaviour (Moore partition refinement)."""
    ins = all_letters(t.inputs)
    reach, stack = {t.initial}, [t.initial]
    while stack:
        s = stack.pop()
        for i in ins:
            n = t.delta[s][i]
            if n not in reach:
                reach.add(n)
                stack.append(n)
    states = sorted(reach)
    block = {s: t.out[s] for s in states}
    while True:
        sig = {s: (block[s], tuple(block[t.delta[s][i]] for i in ins)) for s in states}
        ids: dict = {}
        for s in states:
            ids.setdefault(sig[s], len(ids))
        new = {s: ids[sig[s]] for s in states}
        if len(set(new.values())) == len(set(block.values())):
            block = new
            break
        block = new
    # renumber by first appearance in BFS from the initial state
    order, seen = [], set()
    queue = [t.initial]
    while queue:
        s = queue.pop(0)
        b = block[s]
        if b in seen:
            continue
        seen.add(b)
        order.append(s)
        queue.extend(t.delta[s][i] for i in ins)
    index = {block[s]: k for k, s in enumerate(order)}
    delta = [{i: index[block[t.delta[s][i]]] for i in ins} for s in order]
    out = [t.out[s] for s in order]
    names = [f"s{k}" for k in range(len(order))]
    return Transducer(t.inputs, t.outputs, 0, delta, out, names)


def strip_outputs(t: Transducer, keep) -> Transducer:
    keep = frozenset(keep)
    return Transducer(t.inputs, tuple(o for o in t.outputs if o in keep), t.initial,
                      [dict(row) for row in t.delta], [o & keep for o in t.out], list(t.names))


def outcome(t: Transducer, inputs: LassoWord) -> LassoWord:
    """The closed-loop word produced by t against an ultimately periodic input."""
    seen: dict = {}
    letters = []
    state, i = t.initial, 0
    keep = frozenset(t.inputs)
    while (state, i) not in seen:
        seen[(state, i)] = len(letters)
        a = inputs.letter(i) & keep
        state = t.delta[state][a]
        letters.append(a | t.out[state])
        i = inputs.succ(i)
    start = seen[(state, i)]
    return LassoWord(tuple(letters[:start]), tuple(letters[start:]))


def format_transducer(t: Transducer) -> str:
    lines = [f"inputs {' '.join(t.inputs)}".rstrip(), f"outputs {' '.join(t.outputs)}".rstrip(),
             f"init s_{t.initial}"]
    for s in t.states:
        for i, n in t.delta[s].items():
            lines.append(f"s_{s} on {format_letter(i)} -> goto s_{n} emit {format_letter(t.out[n])}")
    return "\n".join(lines) + "\n"


_LINE = re.compile(r"s_(\d+) on \{([^}]*)\} -> goto s_(\d+) emit \{([^}]*)\}")


def parse_transducer(text: str) -> Transducer:
    inputs, outputs, init = (), (), 0
    rows: dict = {}
    outs: dict = {}
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("inputs"):
            inputs = tuple(line.split()[1:])
        elif line.startswith("outputs"):
            outputs = tuple(line.split()[1:])
        elif line.startswith("init"):
            init = int(line.split()[1].removeprefix("s_"))
        else:
            m = _LINE.fullmatch(line)
            if not m:
                raise ParseError(f"bad transducer line {line!r}")
            s, n = int(m.group(1)), int(m.group(3))
            rows.setdefault(s, {})[frozenset(m.group(2).split())] = n
            o = frozenset(m.group(4).split())
            if outs.setdefault(n, o) != o:
                raise ParseError(f"state s_{n} emits two different letters")
    size = max(list(rows) + [n for r in rows.values() for n in r.values()] + [init]) + 1
    delta = [rows.get(s, {}) for s in range(size)]
    out = [outs.get(s, frozenset()) for s in range(size)]
    return Transducer(inputs, outputs, init, delta, out, [f"s{k}" for k in range(size)])


# ---------------------------------------------------------------------------
# Deciders


@dataclass
class RealVerdict:
    realizable: bool
    valuation: dict | None = None
    strategy: Transducer | None = None
    colored_size: int = 0       # states of the transducer before the color is dropped
    game: ParityGame | None = field(default=None, repr=False)


def _check_partition(phi: Formula, inputs, outputs, reserved=()):
    inputs, outputs = set(inputs), set(outputs)
    if inputs & outputs:
        raise ValueError("inputs and outputs overlap")
    missing = propositions(phi) - inputs - outputs - set(reserved)
    if missing:
        raise ValueError(f"propositions not assigned to a player: {sorted(missing)}")


def _play(dpa: Dpa, inputs, outputs):
    game = build_arena(dpa, inputs, outputs)
    win, strategy = solve_parity(game)
    if game.initial not in win[SYS]:
        return game, None
    return game, minimize(extract_transducer(game, strategy))


def realize(phi: Formula, inputs, outputs) -> RealVerdict:
    if not is_well_formed(phi):
        raise ValueError("formula is not well-formed")
    _check_partition(phi, inputs, outputs)
    dia_phi = eliminate_boxes(phi)
    color = fresh_prop(DEFAULT_COLOR, set(inputs) | set(outputs))
    universe = set(inputs) | set(outputs) | {color}
    nba = trim(mh_to_nba(build_aba(color_transform(dia_phi, color), universe)))
    game, t = _play(determinize(nba), inputs, set(outputs) | {color})
    if t is None:
        return RealVerdict(False, game=game)
    n = len(t)
    dia, box = variables(phi)
    alpha = {x: 2 * n + 2 for x in dia}
    alpha.update({y: 0 for y in box})
    stripped = minimize(strip_outputs(t, outputs))
    return RealVerdict(True, alpha, stripped, n, game)


def real_query(phi: Formula, inputs, outputs, alpha) -> RealVerdict:
    """Realizability with respect to exactly this valuation."""
    missing = all_variables(phi) - set(alpha)
    if missing:
        raise ValueError(f"unassigned variables: {sorted(missing)}")
    _check_partition(phi, inputs, outputs)
    universe = set(inputs) | set(outputs)
    aba = build_parametric_aba(phi, universe)
    nba = trim(counter_breakpoint(aba, region_bounds(aba, alpha)))
    game, t = _play(determinize(nba), inputs, outputs)
    if t is None:
        return RealVerdict(False, game=game)
    used = {x: alpha[x] for x in all_variables(phi)}
    return RealVerdict(True, used, t, len(t), game)


def shift_outputs(phi: Formula, outputs) -> Formula:
    """Read every output proposition one position later.

    Literals over outputs go under a one-step diamond; a consuming regex
    atom that mentions an output becomes a test of its shifted condition
    followed by an unconstrained step.
    """
    outputs = frozenset(outputs)

    def lit(node):
        return Diamond(TT, node) if node.prop in outputs else node

    def go(node: Formula) -> Formula:
        if isinstance(node, (Atom, NegAtom)):
            return lit(node)
        if isinstance(node, (And, Or)):
            return type(node)(go(node.left), go(node.right))
        if isinstance(node, (Diamond, Box)):
            return type(node)(reg(node.regex), go(node.body))
        if isinstance(node, (DiamondLe, BoxLe)):
            return type(node)(reg(node.regex), node.var, go(node.body))
        if isinstance(node, (DiamondCp, BoxCp)):
            return type(node)(reg(node.regex), go(node.body), node.color)
        return node

    def reg(r: Regex) -> Regex:
        if isinstance(r, Prop):
            if prop_atoms(r.formula) & outputs:
                return Concat(Test(go(prop_to_formula(r.formula))), TT)
            return r
        if isinstance(r, Test):
            return Test(go(r.formula))
        if isinstance(r, (Union, Concat)):
            return type(r)(reg(r.left), reg(r.right))
        return Star(reg(r.inner))

    return go(phi)


def dualize(phi: Formula, inputs, outputs) -> Formula:
    """Formula realizable over (outputs, inputs) iff phi is not realizable over (inputs, outputs).

    In the swapped game the old output player moves first each round, so the
    old outputs are read one position later to restore the original order
    of moves.
    """
    return shift_outputs(negate(phi), outputs)


# ---------------------------------------------------------------------------
# Optimization


@dataclass
class RealOptResult:
    value: object                 # int, INFINITY or None
    valuation: dict | None = None
    strategy: Transducer | None = None
    bound: int = 0


def _lowest(pred, lo, hi):
    if not pred(hi):
        return None
    while lo < hi:
        mid = (lo + hi) // 2
        if pred(mid):
            hi = mid
        else:
            lo = mid + 1
    return lo


def real_min_bound(phi: Formula, inputs, outputs) -> int | None:
    """2n+2 for the transducer realize() finds, or None when unrealizable."""
    v = realize(phi, inputs, outputs)
    return 2 * v.colored_size + 2 if v.realizable else None


OBJECTIVES = ("minmin", "minmax", "maxmax", "maxmin")


def real_optimize(phi: Formula, inputs, outputs, objective: str) -> RealOptResult:
    objective = objective.lower()
    if objective not in OBJECTIVES:
        raise ValueError(f"unknown objective {objective!r}")
    dia, box = variables(phi)
    if objective.startswith("min"):
        if classify(phi) is not FragmentTag.PLDL_DIAMOND:
            raise ValueError("min objectives need a PLDL-diamond formula with variables")
        if objective == "minmax":
            return _min_single(rename_vars(phi, "z"), inputs, outputs, "z", dia)
        bound = real_min_bound(phi, inputs, outputs)
        if bound is None:
            return RealOptResult(None)
        best = None
        for x in sorted(dia):
            others = {y: bound for y in dia if y != x}
            q = lambda k: real_query(phi, inputs, outputs, {**others, x: k}).realizable
            v = _lowest(q, 0, bound)
            if v is not None and (best is None or v < best[0]):
                best = (v, {**others, x: v})
        if best is None:
            return RealOptResult(None, bound=bound)
        strat = real_query(phi, inputs, outputs, best[1]).strategy
        return RealOptResult(best[0], best[1], strat, bound)

    if classify(phi) is not FragmentTag.PLDL_BOX:
        raise ValueError("max objectives need a PLDL-box formula with variables")
    if objective == "maxmin":
        single = rename_vars(phi, "z")
        value, bound = _max_single(single, inputs, outputs, "z")
        return _max_result(phi, inputs, outputs, value, {y: value for y in box}, bound)
    best, best_val, bound = None, None, 0
    for y in sorted(box):
        value, b = _max_single(fix_all_but_one_box(phi, y), inputs, outputs, y)
        bound = max(bound, b)
        if value is None:
            continue
        if best is None or value is INFINITY or (best is not INFINITY and value > best):
            best = value
            best_val = {w: 0 for w in box}
            best_val[y] = value
        if best is INFINITY:
            break
    return _max_result(phi, inputs, outputs, best, best_val, bound)


def _max_result(phi, inputs, outputs, value, valuation, bound):
    if value is None:
        return RealOptResult(None, bound=bound)
    if value is INFINITY:
        return RealOptResult(INFINITY, None, None, bound)
    return RealOptResult(value, valuation, real_query(phi, inputs, outputs, valuation).strategy, bound)


def _min_single(single, inputs, outputs, z, names) -> RealOptResult:
    bound = real_min_bound(single, inputs, outputs)
    if bound is None:
        return RealOptResult(None)
    v = _lowest(lambda k: real_query(single, inputs, outputs, {z: k}).realizable, 0, bound)
    if v is None:
        return RealOptResult(None, bound=bound)
    strat = real_query(single, inputs, outputs, {z: v}).strategy
    return RealOptResult(v, {x: v for x in names}, strat, bound)


def _max_single(phi, inputs, outputs, y):
    """Largest value of y at which phi is realizable, via the dual minimum."""
    dual = dualize(phi, inputs, outputs)
    bound = real_min_bound(dual, outputs, inputs)
    if bound is None:
        return INFINITY, 0
    m = _lowest(lambda k: real_query(dual, outputs, inputs, {y: k}).realizable, 0, bound)
    if m is None:
        raise AssertionError("dual realizable but not within its own bound")
    if m == 0:
        return None, bound
    return m - 1, bound
