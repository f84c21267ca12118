"""Graphviz DOT export for automata, product graphs, games and transducers."""
from __future__ import annotations

from .automata.alternating import FALSE, TRUE, Aba, ChangepointDfa, cp_step
from .automata.buchi import Nba
from .automata.parity import Dpa
from .modelcheck import ColoredGraph
from .realizability import SYS, ParityGame, Transducer
from .syntax import format_letter


def _q(text) -> str:
    return '"' + str(text).replace("\\", "\\\\").replace('"', '\\"') + '"'


def _init(flag: bool) -> str:
    """Initial nodes are drawn bold."""
    return ", style=bold" if flag else ""


def _vertex(v) -> str:
    """Readable text for product and game vertices (tuples of states and letters)."""
    if isinstance(v, frozenset):
        return format_letter(v)
    if isinstance(v, tuple):
        return "(" + ", ".join(_vertex(x) for x in v) + ")"
    return str(v)


def _letters(letters) -> str:
    return " ".join(format_letter(a) for a in letters)


def _grouped(edges: dict) -> list[str]:
    """One edge per (source, target) with all letters on its label."""
    return [f"  {s} -> {t} [label={_q(_letters(ls))}];" for (s, t), ls in edges.items()]


def export_dot(obj) -> str:
    if isinstance(obj, Aba):
        return _aba(obj)
    if isinstance(obj, Nba):
        return _nba(obj)
    if isinstance(obj, Dpa):
        return _dpa(obj)
    if isinstance(obj, ChangepointDfa):
        return _cp(obj)
    if isinstance(obj, ColoredGraph):
        return _colored(obj)
    if isinstance(obj, ParityGame):
        return _game(obj)
    if isinstance(obj, Transducer):
        return _transducer(obj)
    raise TypeError(f"no DOT export for {type(obj).__name__}")


def _aba(a: Aba) -> str:
    """Conjunctions become small junction nodes; true and false are sink nodes."""
    lines = ["digraph aba {", "  rankdir=LR;"]
    for q in a.states:
        shape = "doublecircle" if q in a.accepting else "circle"
        lines.append(f"  q{q} [shape={shape}, label={_q(a.names[q])}{_init(q == a.initial)}];")
    lines += ["  tt [shape=box];", "  ff [shape=box];"]
    edges: dict = {}
    junctions: dict = {}
    for q in a.states:
        for letter, dnf in a.delta[q].items():
            if dnf == TRUE:
                targets = ["tt"]
            elif dnf == FALSE:
                targets = ["ff"]
            else:
                targets = []
                for clause in sorted(dnf, key=sorted):
                    if len(clause) == 1:
                        targets.append(f"q{next(iter(clause))}")
                    else:
                        key = tuple(sorted(clause))
                        if key not in junctions:
                            junctions[key] = f"j{len(junctions)}"
                        targets.append(junctions[key])
            for t in targets:
                edges.setdefault((f"q{q}", t), []).append(letter)
    for key, name in junctions.items():
        lines.append(f"  {name} [shape=point];")
        lines += [f"  {name} -> q{t} [arrowhead=none];" for t in key]
    lines += _grouped(edges)
    lines.append("}")
    return "\n".join(lines) + "\n"


def _nba(n: Nba) -> str:
    lines = ["digraph nba {", "  rankdir=LR;"]
    for q in n.states:
        shape = "doublecircle" if q in n.accepting else "circle"
        name = n.names[q] if q < len(n.names) else q
        lines.append(f"  q{q} [shape={shape}, label={_q(name)}{_init(q == n.initial)}];")
    edges: dict = {}
    for q in n.states:
        for a, t in n.edges(q):
            edges.setdefault((f"q{q}", f"q{t}"), []).append(a)
    lines += _grouped(edges)
    lines.append("}")
    return "\n".join(lines) + "\n"


def _dpa(d: Dpa) -> str:
    lines = ["digraph dpa {", "  rankdir=LR;"]
    for q in d.states:
        lines.append(f"  q{q} [label={_q(f'q{q} / {d.colors[q]}')}{_init(q == d.initial)}];")
    edges: dict = {}
    for q in d.states:
        for a, t in d.delta[q].items():
            edges.setdefault((f"q{q}", f"q{t}"), []).append(a)
    lines += _grouped(edges)
    lines.append("}")
    return "\n".join(lines) + "\n"


def _cp(c: ChangepointDfa) -> str:
    lines = ["digraph changepoints {", "  rankdir=LR;"]
    for s in c.states:
        shape = "doublecircle" if s in c.accepting else "circle"
        lines.append(f"  {s} [shape={shape}{_init(s == c.initial)}];")
    for s in c.states:
        for has in (True, False):
            lit = c.color if has else "!" + c.color
            lines.append(f"  {s} -> {cp_step(s, has)} [label={_q(lit)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _colored(g: ColoredGraph) -> str:
    ids = {v: f"v{k}" for k, v in enumerate(g.succ)}
    lines = ["digraph product {"]
    for v, name in ids.items():
        acc = [k for k, F in enumerate(g.accepting) if v in F]
        label = f"{_vertex(v)} {format_letter(g.label[v])}"
        shape = "doublecircle" if acc else "circle"
        lines.append(f"  {name} [shape={shape}, label={_q(label)}{_init(v == g.initial)}];")
    for v, ws in g.succ.items():
        lines += [f"  {ids[v]} -> {ids[w]};" for w in ws]
    lines.append("}")
    return "\n".join(lines) + "\n"


def _game(g: ParityGame) -> str:
    ids = {v: f"v{k}" for k, v in enumerate(g.succ)}
    lines = ["digraph game {"]
    for v, name in ids.items():
        shape = "box" if g.owner[v] == SYS else "diamond"
        label = _q(f"{_vertex(v)} / {g.color[v]}")
        lines.append(f"  {name} [shape={shape}, label={label}{_init(v == g.initial)}];")
    for v, ws in g.succ.items():
        lines += [f"  {ids[v]} -> {ids[w]};" for w in ws]
    lines.append("}")
    return "\n".join(lines) + "\n"


def _transducer(t: Transducer) -> str:
    lines = ["digraph transducer {", "  rankdir=LR;"]
    for s in t.states:
        label = _q(f"s{s} / {format_letter(t.out[s])}")
        lines.append(f"  s{s} [label={label}{_init(s == t.initial)}];")
    edges: dict = {}
    for s in t.states:
        for i, n in t.delta[s].items():
            edges.setdefault((f"s{s}", f"s{n}"), []).append(i)
    lines += _grouped(edges)
    lines.append("}")
    return "\n".join(lines) + "\n"
