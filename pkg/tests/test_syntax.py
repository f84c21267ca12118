import pytest
from hypothesis import given

from pldl.formula import (
    TT, Atom, Box, BoxCp, Concat, DiamondCp, DiamondLe, NegAtom, Or, PAnd, PNot, PVar, Prop,
    Star, tt_star,
)
from pldl.formula import Test as Check
from pldl.oracle import LassoWord
from pldl.syntax import (
    ParseError, SystemFormatError, format_lasso, format_valuation, parse_formula, parse_lasso,
    parse_regex, parse_system, parse_valuation, print_formula, print_system,
)
from support import formulas


class TestFormulas:
    def test_while_loop(self):
        got = parse_formula("[ ({q}? ; a)* ; {!q}? ] p")
        loop = Star(Concat(Check(Atom("q")), Prop(PVar("a"))))
        assert got == Box(Concat(loop, Check(NegAtom("q"))), Atom("p"))

    def test_request_response(self):
        got = parse_formula("[ tt* ]( req -> < tt* >{<= x} resp )")
        body = Or(NegAtom("req"), DiamondLe(tt_star(), "x", Atom("resp")))
        assert got == Box(tt_star(), body)

    def test_printing(self):
        assert print_formula(Atom("p")) == "p"
        assert print_formula(DiamondLe(Star(TT), "x", Atom("p"))) == "< tt* >{<= x} p"

    @pytest.mark.parametrize("text", [
        "< (tt ; tt)* > p",
        "[ tt* ]( req -> < tt* >{<= x} resp )",
        "a & (b | !c)",
        "< a & !b ; (a | b)* > tt",
        "[ {< a >{<= x} b}? + b ]{<= y} ff",
    ])
    def test_round_trip(self, text):
        phi = parse_formula(text)
        assert parse_formula(print_formula(phi)) == phi
        assert print_formula(parse_formula(print_formula(phi))) == print_formula(phi)

    @given(formulas(cp_color="c", variables=("x", "y")))
    def test_round_trip_generated(self, phi):
        assert parse_formula(print_formula(phi), allow_cp=True) == phi

    def test_propositional_regex_atoms(self):
        r = parse_regex("a & !b")
        assert r == Prop(PAnd(PVar("a"), PNot(PVar("b"))))

    def test_changepoint_needs_flag(self):
        with pytest.raises(ParseError):
            parse_formula("< tt* >{cp} p")
        assert parse_formula("< tt* >{cp} p", allow_cp=True) == DiamondCp(tt_star(), Atom("p"))
        assert parse_formula("[ tt ]{cp c} p", allow_cp=True) == BoxCp(TT, Atom("p"), "c")

    @pytest.mark.parametrize("text", ["< tt* p", "p &", "[ a ]{<= } p", "(p", "< <= > p"])
    def test_errors_carry_position(self, text):
        with pytest.raises(ParseError) as info:
            parse_formula(text)
        assert info.value.pos is not None

    def test_implication_needs_propositional_antecedent(self):
        with pytest.raises(ParseError):
            parse_formula("< tt > p -> q")


SYSTEM = """
# two states that alternate
props p q
state s0 {p}
state s1 {q}
init s0
edge s0 s1
edge s1 s0
"""


class TestSystems:
    def test_parse(self):
        sys = parse_system(SYSTEM)
        assert sys.init == "s0"
        assert sys.successors("s0") == ["s1"]
        assert sys.label("s1") == {"q"}
        assert parse_system(print_system(sys)) == sys

    def test_self_loop(self):
        sys = parse_system("props p\nstate s {p}\ninit s\nedge s s\n")
        assert sys.successors("s") == ["s"]

    @pytest.mark.parametrize("text,message", [
        ("props p\nstate s {p}\nstate t {}\ninit s\nedge s t\n", "not left-total"),
        ("props p\nstate s {p}\ninit s\nedge s u\n", "unknown state"),
        ("props p\nstate s {p}\nedge s s\n", "missing init"),
        ("props p\nstate s {r}\ninit s\nedge s s\n", "undeclared"),
        ("props p\nstate s {p}\ninit t\nedge s s\n", "not declared"),
    ])
    def test_rejects(self, text, message):
        with pytest.raises(SystemFormatError, match=message):
            parse_system(text)


class TestLassosAndValuations:
    def test_lasso(self):
        w = parse_lasso("{p}{p q}|{q}")
        assert w == LassoWord(({"p"}, {"p", "q"}), ({"q"},))
        assert format_lasso(w) == "{p}{p q}|{q}"

    def test_lasso_errors(self):
        with pytest.raises(ParseError):
            parse_lasso("{p}{q}")
        with pytest.raises(ParseError):
            parse_lasso("{p}|")

    def test_valuation(self):
        assert parse_valuation("x=3,y=0") == {"x": 3, "y": 0}
        assert format_valuation({"y": 0, "x": 3}) == "x=3,y=0"
        with pytest.raises(ParseError):
            parse_valuation("x=-1")
