"""Breakpoint translations from alternating to nondeterministic Buchi automata.

A state of the result is (T, O, gamma): the current level of a run DAG, the
states still owing a visit to an accepting state since the last breakpoint,
and a counter for every regex state that serves a bounded operator.

Counters count the letters a regex region may still consume. A state that
enters a region from outside gets ``bound - 1``, because the letter that
moved it there was already consumed by the region's (copied) initial
state. Diamond regions keep the most urgent counter and block a transition
that would go negative; box regions keep the most generous counter and
simply drop a state whose counter runs out, ending that run branch.
"""
from __future__ import annotations

from ..automata.alternating import Aba
from .buchi import Nba


def mh_to_nba(aba: Aba) -> Nba:
    return _breakpoint(aba, {})


def counter_breakpoint(aba: Aba, bounds: dict, mode: str | None = None) -> Nba:
    """Breakpoint construction with per-region counters.

    ``mode`` may be given to assert that every bounded region is of that kind.
    """
    for rid in bounds:
        if rid not in aba.regions:
            raise ValueError(f"unknown region {rid!r}")
    if mode is not None:
        for rid in bounds:
            if aba.regions[rid].kind != mode:
                raise ValueError(f"region {rid} is a {aba.regions[rid].kind} region")
    return _breakpoint(aba, dict(bounds))


def _breakpoint(aba: Aba, bounds: dict) -> Nba:
    region_of = {q: r for q, r in aba.region_of.items() if r in bounds}
    box = {r for r in bounds if aba.regions[r].kind == "box"}
    F = aba.accepting

    init_gamma = ()
    if aba.initial in region_of:
        init_gamma = ((aba.initial, bounds[region_of[aba.initial]]),)
    init = (frozenset([aba.initial]), frozenset(), init_gamma)

    ids = {init: 0}
    order = [init]
    delta: list[dict] = []
    i = 0
    while i < len(order):
        T, O, gamma = order[i]
        i += 1
        row = {}
        for a in aba.letters:
            succs = _successors(aba, T, O, dict(gamma), a, region_of, bounds, box, F)
            targets = []
            for s in succs:
                if s not in ids:
                    ids[s] = len(order)
                    order.append(s)
                targets.append(ids[s])
            if targets:
                row[a] = tuple(sorted(set(targets)))
        delta.append(row)

    accepting = frozenset(ids[s] for s in order if not s[1])
    names = [_name(aba, s) for s in order]
    return Nba(aba.props, aba.letters, 0, delta, accepting, names)


def _name(aba, s) -> str:
    T, O, gamma = s
    g = dict(gamma)
    def one(q):
        return f"{q}" + (f":{g[q]}" if q in g else "")
    return "{" + ",".join(map(one, sorted(T))) + "}|{" + ",".join(map(str, sorted(O))) + "}"


def _successors(aba, T, O, gamma, a, region_of, bounds, box, F):
    # fold over T, choosing one minimal model per state; partial results are
    # deduplicated, which keeps the product of choices small in practice
    partial = {(frozenset(), frozenset(), ())}
    for q in sorted(T):
        models = aba.delta[q][a]
        if not models:
            return set()
        nxt = set()
        for (tp, op, contrib) in partial:
            for m in models:
                c = dict(contrib)
                for t in m:
                    r = region_of.get(t)
                    if r is None:
                        continue
                    src = gamma[q] if region_of.get(q) == r else bounds[r]
                    val = src - 1
                    if t in c:
                        val = max(c[t], val) if r in box else min(c[t], val)
                    c[t] = val
                nxt.add((tp | m, op | m if q in O else op, tuple(sorted(c.items()))))
        partial = nxt
    out = set()
    for (tp, op, contrib) in partial:
        c = dict(contrib)
        dead = set()
        blocked = False
        for t, v in c.items():
            if v < 0:
                if region_of[t] in box:
                    dead.add(t)
                else:
                    blocked = True
                    break
        if blocked:
            continue
        tp = tp - dead
        op = op - dead
        newO = (tp if not O else op) - F
        g = tuple(sorted((t, v) for t, v in c.items() if t not in dead))
        out.add((tp, newO, g))
    return out
