"""Abstract syntax of PLDL and the source-to-source rewritings on it.

Formulas are kept in negation normal form: negation only appears on atoms.
All nodes are frozen dataclasses, so structural equality and hashing come
for free and formulas can be used as dictionary keys.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, Iterator

DEFAULT_COLOR = "_p"


# ---------------------------------------------------------------------------
# Propositional formulas (the letter-consuming atoms of regular expressions)


class PropFormula:
    pass


@dataclass(frozen=True)
class PTrue(PropFormula):
    pass


@dataclass(frozen=True)
class PFalse(PropFormula):
    pass


@dataclass(frozen=True)
class PVar(PropFormula):
    name: str


@dataclass(frozen=True)
class PNot(PropFormula):
    arg: PropFormula


@dataclass(frozen=True)
class PAnd(PropFormula):
    left: PropFormula
    right: PropFormula


@dataclass(frozen=True)
class POr(PropFormula):
    left: PropFormula
    right: PropFormula


def prop_holds(pf: PropFormula, letter) -> bool:
    """A |= pf for the proposition set ``letter``."""
    if isinstance(pf, PTrue):
        return True
    if isinstance(pf, PFalse):
        return False
    if isinstance(pf, PVar):
        return pf.name in letter
    if isinstance(pf, PNot):
        return not prop_holds(pf.arg, letter)
    if isinstance(pf, PAnd):
        return prop_holds(pf.left, letter) and prop_holds(pf.right, letter)
    if isinstance(pf, POr):
        return prop_holds(pf.left, letter) or prop_holds(pf.right, letter)
    raise TypeError(f"not a propositional formula: {pf!r}")


def prop_atoms(pf: PropFormula) -> frozenset[str]:
    if isinstance(pf, PVar):
        return frozenset([pf.name])
    if isinstance(pf, PNot):
        return prop_atoms(pf.arg)
    if isinstance(pf, (PAnd, POr)):
        return prop_atoms(pf.left) | prop_atoms(pf.right)
    return frozenset()


# ---------------------------------------------------------------------------
# Formulas and regular expressions


class Formula:
    pass


class Regex:
    pass


@dataclass(frozen=True)
class Top(Formula):
    pass


@dataclass(frozen=True)
class Bottom(Formula):
    pass


@dataclass(frozen=True)
class Atom(Formula):
    prop: str


@dataclass(frozen=True)
class NegAtom(Formula):
    prop: str


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Diamond(Formula):
    regex: Regex
    body: Formula


@dataclass(frozen=True)
class Box(Formula):
    regex: Regex
    body: Formula


@dataclass(frozen=True)
class DiamondLe(Formula):
    regex: Regex
    var: str
    body: Formula


@dataclass(frozen=True)
class BoxLe(Formula):
    regex: Regex
    var: str
    body: Formula


@dataclass(frozen=True)
class DiamondCp(Formula):
    regex: Regex
    body: Formula
    color: str = DEFAULT_COLOR


@dataclass(frozen=True)
class BoxCp(Formula):
    regex: Regex
    body: Formula
    color: str = DEFAULT_COLOR


@dataclass(frozen=True)
class Prop(Regex):
    formula: PropFormula


@dataclass(frozen=True)
class Test(Regex):
    formula: Formula


@dataclass(frozen=True)
class Union(Regex):
    left: Regex
    right: Regex


@dataclass(frozen=True)
class Concat(Regex):
    left: Regex
    right: Regex


@dataclass(frozen=True)
class Star(Regex):
    inner: Regex


MODAL = (Diamond, Box, DiamondLe, BoxLe, DiamondCp, BoxCp)
DIAMONDS = (Diamond, DiamondLe, DiamondCp)
BOXES = (Box, BoxLe, BoxCp)

TT = Prop(PTrue())


def tt_star() -> Regex:
    return Star(TT)


def is_propositional(phi: Formula) -> bool:
    """True for boolean combinations of literals (no modal operators)."""
    if isinstance(phi, (Top, Bottom, Atom, NegAtom)):
        return True
    if isinstance(phi, (And, Or)):
        return is_propositional(phi.left) and is_propositional(phi.right)
    return False


# ---------------------------------------------------------------------------
# Traversal helpers


def _children(phi: Formula) -> tuple[Formula, ...]:
    if isinstance(phi, (And, Or)):
        return (phi.left, phi.right)
    if isinstance(phi, MODAL):
        return tuple(regex_tests(phi.regex)) + (phi.body,)
    return ()


def regex_tests(r: Regex) -> Iterator[Formula]:
    """Formulas of the tests in r, left to right, with multiplicity."""
    if isinstance(r, Test):
        yield r.formula
    elif isinstance(r, (Union, Concat)):
        yield from regex_tests(r.left)
        yield from regex_tests(r.right)
    elif isinstance(r, Star):
        yield from regex_tests(r.inner)


def occurrences(phi: Formula) -> Iterator[Formula]:
    """Every subformula occurrence (tests included), preorder."""
    stack = [phi]
    while stack:
        cur = stack.pop()
        yield cur
        stack.extend(reversed(_children(cur)))


def closure(phi: Formula) -> frozenset[Formula]:
    return frozenset(occurrences(phi))


def regex_length(r: Regex) -> int:
    # a test costs nothing here; its formula is already counted in the closure
    if isinstance(r, Prop):
        return 1
    if isinstance(r, Test):
        return 0
    if isinstance(r, (Union, Concat)):
        return 1 + regex_length(r.left) + regex_length(r.right)
    if isinstance(r, Star):
        return 1 + regex_length(r.inner)
    raise TypeError(f"not a regex: {r!r}")


def size_of(phi: Formula) -> int:
    """Closure size plus regex lengths, both counted per occurrence."""
    total = 0
    for sub in occurrences(phi):
        total += 1
        if isinstance(sub, MODAL):
            total += regex_length(sub.regex)
    return total


def regex_props(r: Regex) -> frozenset[str]:
    if isinstance(r, Prop):
        return prop_atoms(r.formula)
    if isinstance(r, (Union, Concat)):
        return regex_props(r.left) | regex_props(r.right)
    if isinstance(r, Star):
        return regex_props(r.inner)
    return frozenset()


def propositions(phi: Formula) -> frozenset[str]:
    """Atomic propositions read by phi, excluding changepoint colors."""
    out: set[str] = set()
    for sub in occurrences(phi):
        if isinstance(sub, (Atom, NegAtom)):
            out.add(sub.prop)
        elif isinstance(sub, MODAL):
            out |= regex_props(sub.regex)
    return frozenset(out)


def colors(phi: Formula) -> frozenset[str]:
    return frozenset(sub.color for sub in occurrences(phi)
                     if isinstance(sub, (DiamondCp, BoxCp)))


def has_cp(phi: Formula) -> bool:
    return any(isinstance(sub, (DiamondCp, BoxCp)) for sub in occurrences(phi))


def variables(phi: Formula) -> tuple[frozenset[str], frozenset[str]]:
    dia, box = set(), set()
    for sub in occurrences(phi):
        if isinstance(sub, DiamondLe):
            dia.add(sub.var)
        elif isinstance(sub, BoxLe):
            box.add(sub.var)
    return frozenset(dia), frozenset(box)


def all_variables(phi: Formula) -> frozenset[str]:
    dia, box = variables(phi)
    return dia | box


# ---------------------------------------------------------------------------
# Negation


def negate(phi: Formula) -> Formula:
    """Push a negation through phi using operator dualities. Tests are kept."""
    if isinstance(phi, Top):
        return Bottom()
    if isinstance(phi, Bottom):
        return Top()
    if isinstance(phi, Atom):
        return NegAtom(phi.prop)
    if isinstance(phi, NegAtom):
        return Atom(phi.prop)
    if isinstance(phi, And):
        return Or(negate(phi.left), negate(phi.right))
    if isinstance(phi, Or):
        return And(negate(phi.left), negate(phi.right))
    if isinstance(phi, Diamond):
        return Box(phi.regex, negate(phi.body))
    if isinstance(phi, Box):
        return Diamond(phi.regex, negate(phi.body))
    if isinstance(phi, DiamondLe):
        return BoxLe(phi.regex, phi.var, negate(phi.body))
    if isinstance(phi, BoxLe):
        return DiamondLe(phi.regex, phi.var, negate(phi.body))
    if isinstance(phi, DiamondCp):
        return BoxCp(phi.regex, negate(phi.body), phi.color)
    if isinstance(phi, BoxCp):
        return DiamondCp(phi.regex, negate(phi.body), phi.color)
    raise TypeError(f"not a formula: {phi!r}")


# ---------------------------------------------------------------------------
# Fragments


class FragmentTag(enum.Enum):
    LDL = "ldl"
    PLDL_DIAMOND = "pldl-diamond"
    PLDL_BOX = "pldl-box"
    WELL_FORMED = "well-formed"
    NOT_WELL_FORMED = "not-well-formed"


def is_well_formed(phi: Formula) -> bool:
    dia, box = variables(phi)
    return not (dia & box)


def classify(phi: Formula) -> FragmentTag:
    dia, box = variables(phi)
    if dia & box:
        return FragmentTag.NOT_WELL_FORMED
    if not dia and not box:
        return FragmentTag.LDL
    if not box:
        return FragmentTag.PLDL_DIAMOND
    # the negation must be a diamond formula; box variables inside tests survive negation
    if not dia and not variables(negate(phi))[1]:
        return FragmentTag.PLDL_BOX
    return FragmentTag.WELL_FORMED


def is_pldl_diamond(phi: Formula) -> bool:
    return classify(phi) in (FragmentTag.LDL, FragmentTag.PLDL_DIAMOND)


def is_pldl_box(phi: Formula) -> bool:
    return classify(phi) in (FragmentTag.LDL, FragmentTag.PLDL_BOX)


# ---------------------------------------------------------------------------
# Structural rewriting


def rewrite(phi: Formula, fn: Callable[[Formula], Formula]) -> Formula:
    """Rebuild phi bottom-up (tests included), applying fn to every node."""
    if isinstance(phi, (And, Or)):
        phi = type(phi)(rewrite(phi.left, fn), rewrite(phi.right, fn))
    elif isinstance(phi, (Diamond, Box)):
        phi = type(phi)(rewrite_regex(phi.regex, fn), rewrite(phi.body, fn))
    elif isinstance(phi, (DiamondLe, BoxLe)):
        phi = type(phi)(rewrite_regex(phi.regex, fn), phi.var, rewrite(phi.body, fn))
    elif isinstance(phi, (DiamondCp, BoxCp)):
        phi = type(phi)(rewrite_regex(phi.regex, fn), rewrite(phi.body, fn), phi.color)
    return fn(phi)


def rewrite_regex(r: Regex, fn: Callable[[Formula], Formula]) -> Regex:
    if isinstance(r, Test):
        return Test(rewrite(r.formula, fn))
    if isinstance(r, (Union, Concat)):
        return type(r)(rewrite_regex(r.left, fn), rewrite_regex(r.right, fn))
    if isinstance(r, Star):
        return Star(rewrite_regex(r.inner, fn))
    return r


def regex_hat(r: Regex) -> Regex:
    """A single test matching exactly the empty (n, n) pairs of r."""
    r = _drop_stars(r)
    r = _drop_consuming(r)
    if isinstance(r, Prop):
        return Test(Bottom())
    return _merge_tests(r)


def _drop_stars(r: Regex) -> Regex:
    if isinstance(r, Star):
        return Test(Top())
    if isinstance(r, (Union, Concat)):
        return type(r)(_drop_stars(r.left), _drop_stars(r.right))
    return r


def _drop_consuming(r: Regex) -> Regex:
    if isinstance(r, Concat):
        left, right = _drop_consuming(r.left), _drop_consuming(r.right)
        if isinstance(left, Prop) or isinstance(right, Prop):
            return Test(Bottom())
        return Concat(left, right)
    if isinstance(r, Union):
        left, right = _drop_consuming(r.left), _drop_consuming(r.right)
        if isinstance(left, Prop):
            return right
        if isinstance(right, Prop):
            return left
        return Union(left, right)
    return r


def _merge_tests(r: Regex) -> Regex:
    if isinstance(r, Test):
        return r
    left, right = _merge_tests(r.left), _merge_tests(r.right)
    if isinstance(r, Union):
        return Test(Or(left.formula, right.formula))
    return Test(And(left.formula, right.formula))


def eliminate_boxes(phi: Formula) -> Formula:
    """Replace every parameterized box [r]<=y psi by [hat r] psi."""
    if not is_well_formed(phi):
        raise ValueError("formula is not well-formed")

    def step(node: Formula) -> Formula:
        if isinstance(node, BoxLe):
            return Box(regex_hat(node.regex), node.body)
        return node

    return rewrite(phi, step)


def chi_inf(color: str, positive: bool = True) -> Formula:
    """[tt*]<tt*>p, or its variant for !p."""
    lit = Atom(color) if positive else NegAtom(color)
    return Box(tt_star(), Diamond(tt_star(), lit))


def rel(phi: Formula, color: str = DEFAULT_COLOR) -> Formula:
    """Swap every parameterized diamond for a changepoint-bounded one."""
    if not is_pldl_diamond(phi):
        raise ValueError("rel expects a PLDL-diamond formula")

    def step(node: Formula) -> Formula:
        if isinstance(node, DiamondLe):
            return DiamondCp(node.regex, node.body, color)
        return node

    return rewrite(phi, step)


def color_transform(phi: Formula, color: str = DEFAULT_COLOR) -> Formula:
    if color in propositions(phi):
        raise ValueError(f"color {color!r} already occurs in the formula")
    return And(And(rel(phi, color), chi_inf(color)), chi_inf(color, False))


def rename_all_vars_to(phi: Formula, z: str) -> Formula:
    if not is_pldl_diamond(phi):
        raise ValueError("renaming expects a PLDL-diamond formula")
    return _rename(phi, z)


def rename_vars(phi: Formula, z: str) -> Formula:
    """Rename every variable to z, regardless of fragment."""
    return _rename(phi, z)


def _rename(phi: Formula, z: str) -> Formula:
    def step(node: Formula) -> Formula:
        if isinstance(node, DiamondLe):
            return DiamondLe(node.regex, z, node.body)
        if isinstance(node, BoxLe):
            return BoxLe(node.regex, z, node.body)
        return node

    return rewrite(phi, step)


def fix_all_but_one_box(phi: Formula, y: str) -> Formula:
    if not is_pldl_box(phi):
        raise ValueError("expects a PLDL-box formula")

    def step(node: Formula) -> Formula:
        if isinstance(node, BoxLe) and node.var != y:
            return Box(regex_hat(node.regex), node.body)
        return node

    return rewrite(phi, step)


def deparameterize(phi: Formula) -> Formula:
    """Drop every bound, keeping the operator shape."""
    def step(node: Formula) -> Formula:
        if isinstance(node, DiamondLe):
            return Diamond(node.regex, node.body)
        if isinstance(node, BoxLe):
            return Box(node.regex, node.body)
        return node

    return rewrite(phi, step)


def prop_to_formula(pf: PropFormula) -> Formula:
    """NNF formula equivalent to a propositional formula at a single position."""
    return _prop_nnf(pf, True)


def _prop_nnf(pf: PropFormula, pos: bool) -> Formula:
    if isinstance(pf, PTrue):
        return Top() if pos else Bottom()
    if isinstance(pf, PFalse):
        return Bottom() if pos else Top()
    if isinstance(pf, PVar):
        return Atom(pf.name) if pos else NegAtom(pf.name)
    if isinstance(pf, PNot):
        return _prop_nnf(pf.arg, not pos)
    left, right = _prop_nnf(pf.left, pos), _prop_nnf(pf.right, pos)
    if isinstance(pf, PAnd) == pos:
        return And(left, right)
    return Or(left, right)
