"""ASCII concrete syntax for formulas, transition systems, lassos and valuations.

Formula grammar (lowest precedence first)::

    formula := disj ['->' formula]          (antecedent must be propositional)
    disj    := conj ('|' conj)*
    conj    := unary ('&' unary)*
    unary   := '!' unary | '<' regex '>' [bound] unary | '[' regex ']' [bound] unary
             | IDENT | 'tt' | 'ff' | '(' formula ')'
    bound   := '{' '<=' IDENT '}' | '{' 'cp' [IDENT] '}'

    regex   := cat ('+' cat)*
    cat     := post (';' post)*
    post    := pdisj '*'*
    pdisj   := pconj ('|' pconj)*            (operands must be propositional)
    pconj   := pnot ('&' pnot)*
    pnot    := '!' pnot | '(' regex ')' | IDENT | 'tt' | 'ff' | '{' formula '}' '?'
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Mapping

from .formula import (
    DEFAULT_COLOR, And, Atom, Bottom, Box, BoxCp, BoxLe, Concat, Diamond, DiamondCp,
    DiamondLe, Formula, NegAtom, Or, PAnd, PFalse, PNot, POr, Prop, PropFormula, PTrue,
    PVar, Regex, Star, Test, Top, Union, is_propositional, negate,
)
from .oracle import LassoWord


class ParseError(ValueError):
    def __init__(self, message: str, pos: int | None = None, text: str | None = None):
        self.pos = pos
        if pos is not None:
            message = f"{message} at position {pos}"
            if text is not None:
                message += f": ...{text[pos:pos + 20]!r}"
        super().__init__(message)


_TOKEN = re.compile(r"\s*(?:(->|<=|[<>\[\]{}()?*;+&|!,=])|([A-Za-z_][A-Za-z0-9_']*)|(\d+))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    toks = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            start = len(text) - len(text[pos:].lstrip())
            raise ParseError("unexpected character", start, text)
        start = m.start(m.lastindex)
        if m.group(1):
            toks.append(("sym", m.group(1), start))
        elif m.group(2):
            toks.append(("id", m.group(2), start))
        else:
            toks.append(("num", m.group(3), start))
        pos = m.end()
    toks.append(("eof", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str, allow_cp: bool):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.allow_cp = allow_cp

    def peek(self) -> tuple[str, str, int]:
        return self.toks[self.i]

    def at(self, value: str) -> bool:
        kind, val, _ = self.peek()
        return kind == "sym" and val == value

    def take(self) -> tuple[str, str, int]:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, val, pos = self.take()
        if kind != "sym" or val != value:
            raise ParseError(f"expected {value!r}", pos, self.text)

    def ident(self) -> str:
        kind, val, pos = self.take()
        if kind != "id" or val in ("tt", "ff"):
            raise ParseError("expected identifier", pos, self.text)
        return val

    def fail(self, msg: str):
        raise ParseError(msg, self.peek()[2], self.text)

    # formulas

    def formula(self) -> Formula:
        pos = self.peek()[2]
        left = self.disj()
        if self.at("->"):
            self.take()
            if not is_propositional(left):
                raise ParseError("implication needs a propositional antecedent", pos, self.text)
            return Or(negate(left), self.formula())
        return left

    def disj(self) -> Formula:
        phi = self.conj()
        while self.at("|"):
            self.take()
            phi = Or(phi, self.conj())
        return phi

    def conj(self) -> Formula:
        phi = self.unary()
        while self.at("&"):
            self.take()
            phi = And(phi, self.unary())
        return phi

    def unary(self) -> Formula:
        kind, val, pos = self.peek()
        if kind == "sym" and val == "!":
            self.take()
            return negate(self.unary())
        if kind == "sym" and val in ("<", "["):
            self.take()
            r = self.regex()
            self.expect(">" if val == "<" else "]")
            bound = self.bound()
            body = self.unary()
            diamond = val == "<"
            if bound is None:
                return Diamond(r, body) if diamond else Box(r, body)
            tag, name = bound
            if tag == "le":
                return DiamondLe(r, name, body) if diamond else BoxLe(r, name, body)
            return DiamondCp(r, body, name) if diamond else BoxCp(r, body, name)
        if kind == "sym" and val == "(":
            self.take()
            phi = self.formula()
            self.expect(")")
            return phi
        if kind == "id":
            self.take()
            if val == "tt":
                return Top()
            if val == "ff":
                return Bottom()
            return Atom(val)
        self.fail("expected a formula")

    def bound(self):
        if not self.at("{"):
            return None
        self.take()
        kind, val, pos = self.peek()
        if kind == "sym" and val == "<=":
            self.take()
            name = self.ident()
            self.expect("}")
            return ("le", name)
        if kind == "id" and val == "cp":
            if not self.allow_cp:
                raise ParseError("changepoint operators need allow_cp", pos, self.text)
            self.take()
            color = DEFAULT_COLOR if self.at("}") else self.ident()
            self.expect("}")
            return ("cp", color)
        self.fail("expected '<=' or 'cp'")

    # regexes

    def regex(self) -> Regex:
        r = self.cat()
        while self.at("+"):
            self.take()
            r = Union(r, self.cat())
        return r

    def cat(self) -> Regex:
        r = self.post()
        while self.at(";"):
            self.take()
            r = Concat(r, self.post())
        return r

    def post(self) -> Regex:
        r = self.pdisj()
        while self.at("*"):
            self.take()
            r = Star(r)
        return r

    def _prop(self, r: Regex, pos: int) -> PropFormula:
        if not isinstance(r, Prop):
            raise ParseError("boolean connective applied to a non-propositional regex", pos, self.text)
        return r.formula

    def pdisj(self) -> Regex:
        pos = self.peek()[2]
        r = self.pconj()
        while self.at("|"):
            self.take()
            rhs = self.pconj()
            r = Prop(POr(self._prop(r, pos), self._prop(rhs, pos)))
        return r

    def pconj(self) -> Regex:
        pos = self.peek()[2]
        r = self.pnot()
        while self.at("&"):
            self.take()
            rhs = self.pnot()
            r = Prop(PAnd(self._prop(r, pos), self._prop(rhs, pos)))
        return r

    def pnot(self) -> Regex:
        kind, val, pos = self.peek()
        if kind == "sym" and val == "!":
            self.take()
            return Prop(PNot(self._prop(self.pnot(), pos)))
        if kind == "sym" and val == "(":
            self.take()
            r = self.regex()
            self.expect(")")
            return r
        if kind == "sym" and val == "{":
            self.take()
            phi = self.formula()
            self.expect("}")
            self.expect("?")
            return Test(phi)
        if kind == "id":
            self.take()
            if val == "tt":
                return Prop(PTrue())
            if val == "ff":
                return Prop(PFalse())
            return Prop(PVar(val))
        self.fail("expected a regular expression")


def parse_formula(text: str, allow_cp: bool = False) -> Formula:
    p = _Parser(text, allow_cp)
    phi = p.formula()
    kind, _, pos = p.peek()
    if kind != "eof":
        raise ParseError("trailing input", pos, text)
    return phi


def parse_regex(text: str, allow_cp: bool = False) -> Regex:
    p = _Parser(text, allow_cp)
    r = p.regex()
    kind, _, pos = p.peek()
    if kind != "eof":
        raise ParseError("trailing input", pos, text)
    return r


# ---------------------------------------------------------------------------
# Printing


def print_formula(phi: Formula) -> str:
    return _fmt(phi, 0)


def _fmt(phi: Formula, need: int) -> str:
    if isinstance(phi, Top):
        return "tt"
    if isinstance(phi, Bottom):
        return "ff"
    if isinstance(phi, Atom):
        return phi.prop
    if isinstance(phi, NegAtom):
        return "!" + phi.prop
    if isinstance(phi, (And, Or)):
        level, op = (2, "&") if isinstance(phi, And) else (1, "|")
        text = f"{_fmt(phi.left, level)} {op} {_fmt(phi.right, level + 1)}"
        return f"({text})" if level < need else text
    if isinstance(phi, (Diamond, DiamondLe, DiamondCp)):
        head = f"< {print_regex(phi.regex)} >"
    else:
        head = f"[ {print_regex(phi.regex)} ]"
    if isinstance(phi, (DiamondLe, BoxLe)):
        head += "{<= " + phi.var + "}"
    elif isinstance(phi, (DiamondCp, BoxCp)):
        head += "{cp}" if phi.color == DEFAULT_COLOR else "{cp " + phi.color + "}"
    return f"{head} {_fmt(phi.body, 3)}"


def print_regex(r: Regex) -> str:
    return _rfmt(r, 0)


def _rfmt(r: Regex, need: int) -> str:
    if isinstance(r, Prop):
        text = print_prop(r.formula)
        return f"({text})" if isinstance(r.formula, (PAnd, POr)) else text
    if isinstance(r, Test):
        return "{" + print_formula(r.formula) + "}?"
    if isinstance(r, Star):
        return _rfmt(r.inner, 3) + "*"
    level, op = (1, "+") if isinstance(r, Union) else (2, ";")
    text = f"{_rfmt(r.left, level)} {op} {_rfmt(r.right, level + 1)}"
    return f"({text})" if level < need else text


def print_prop(pf: PropFormula, need: int = 0) -> str:
    if isinstance(pf, PTrue):
        return "tt"
    if isinstance(pf, PFalse):
        return "ff"
    if isinstance(pf, PVar):
        return pf.name
    if isinstance(pf, PNot):
        return "!" + print_prop(pf.arg, 3)
    level, op = (2, "&") if isinstance(pf, PAnd) else (1, "|")
    text = f"{print_prop(pf.left, level)} {op} {print_prop(pf.right, level + 1)}"
    return f"({text})" if level < need else text


# ---------------------------------------------------------------------------
# Transition systems


@dataclass(frozen=True)
class SystemDescription:
    props: tuple
    states: tuple
    init: str
    edges: frozenset
    labels: Mapping = field(hash=False)

    def successors(self, s: str) -> list[str]:
        return self._succ[s]

    def __post_init__(self):
        succ = {s: [] for s in self.states}
        for (a, b) in sorted(self.edges):
            succ[a].append(b)
        object.__setattr__(self, "_succ", succ)

    def label(self, s: str) -> frozenset:
        return self.labels[s]


class SystemFormatError(ValueError):
    pass


def make_system(props, labels: Mapping[str, object], init: str, edges) -> SystemDescription:
    """Build and validate a system from plain Python data."""
    props = tuple(sorted(set(props)))
    states = tuple(labels)
    lab = {s: frozenset(v) for s, v in labels.items()}
    edges = frozenset((a, b) for a, b in edges)
    if init not in lab:
        raise SystemFormatError(f"initial state {init!r} is not declared")
    for a, b in edges:
        for s in (a, b):
            if s not in lab:
                raise SystemFormatError(f"unknown state {s!r} in edge")
    for s, l in lab.items():
        extra = l - set(props)
        if extra:
            raise SystemFormatError(f"label of {s!r} uses undeclared props {sorted(extra)}")
    sources = {a for a, _ in edges}
    for s in states:
        if s not in sources:
            raise SystemFormatError(f"not left-total: state {s!r} has no successor")
    return SystemDescription(props, states, init, edges, lab)


def parse_system(text: str) -> SystemDescription:
    props: list[str] = []
    labels: dict[str, frozenset] = {}
    init = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(" ")
        rest = rest.strip()
        if head == "props":
            props.extend(rest.split())
        elif head == "state":
            m = re.fullmatch(r"(\S+)\s*(?:\{([^}]*)\})?", rest)
            if not m:
                raise SystemFormatError(f"line {lineno}: bad state declaration")
            if m.group(1) in labels:
                raise SystemFormatError(f"line {lineno}: duplicate state {m.group(1)!r}")
            labels[m.group(1)] = frozenset((m.group(2) or "").replace(",", " ").split())
        elif head == "init":
            if init is not None:
                raise SystemFormatError(f"line {lineno}: second init declaration")
            init = rest
        elif head == "edge":
            parts = rest.split()
            if len(parts) != 2:
                raise SystemFormatError(f"line {lineno}: edge needs two states")
            edges.append(tuple(parts))
        else:
            raise SystemFormatError(f"line {lineno}: unknown directive {head!r}")
    if init is None:
        raise SystemFormatError("missing init declaration")
    return make_system(props, labels, init, edges)


def print_system(sys: SystemDescription) -> str:
    lines = ["props " + " ".join(sys.props)]
    for s in sys.states:
        lines.append(f"state {s} {format_letter(sys.labels[s])}")
    lines.append(f"init {sys.init}")
    for a, b in sorted(sys.edges):
        lines.append(f"edge {a} {b}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Lassos and valuations


def format_letter(letter) -> str:
    return "{" + " ".join(sorted(letter)) + "}"


def parse_lasso(text: str) -> LassoWord:
    text = text.strip()
    if text.count("|") != 1:
        raise ParseError("lasso needs exactly one '|' between prefix and cycle")
    pre, cyc = text.split("|")

    def letters(part: str):
        part = part.strip()
        out = []
        pos = 0
        for m in re.finditer(r"\s*\{([^{}]*)\}\s*", part):
            if m.start() != pos:
                raise ParseError("malformed letter", m.start(), part)
            out.append(frozenset(m.group(1).replace(",", " ").split()))
            pos = m.end()
        if pos != len(part):
            raise ParseError("malformed letter", pos, part)
        return tuple(out)

    cycle = letters(cyc)
    if not cycle:
        raise ParseError("lasso cycle must be nonempty")
    return LassoWord(letters(pre), cycle)


def format_lasso(w: LassoWord) -> str:
    return "".join(map(format_letter, w.prefix)) + "|" + "".join(map(format_letter, w.cycle))


def parse_valuation(text: str) -> dict[str, int]:
    out: dict[str, int] = {}
    text = text.strip()
    if not text:
        return out
    for item in text.split(","):
        m = re.fullmatch(r"\s*([A-Za-z_][A-Za-z0-9_']*)\s*=\s*(\d+)\s*", item)
        if not m:
            raise ParseError(f"bad valuation entry {item.strip()!r}")
        out[m.group(1)] = int(m.group(2))
    return out


def format_valuation(alpha: Mapping[str, int]) -> str:
    return ",".join(f"{k}={alpha[k]}" for k in sorted(alpha))
