import pytest
from hypothesis import given

from condlog.parser import ParseError, parse_formula, parse_formula_file, print_formula
from condlog.syntax import (
    And,
    Atom,
    Bot,
    Box,
    Cond,
    Dia,
    EPred,
    Eq,
    Exists,
    F,
    Forall,
    Imp,
    Iff,
    Lang,
    Not,
    Or,
    Predicate,
    Top,
    Variable,
    alpha_equal,
    build_ds,
)

from test_syntax import formulas

x, y, z = Variable(0), Variable(1), Variable(2)
G2 = Predicate(1, 2)


def test_parse_conditional_with_negation():
    got = parse_formula("F(x) > ~G(x,y)", Lang.L)
    assert got == Cond(Atom(F, (x,)), Not(Atom(G2, (x, y))))


def test_parse_dia_abbreviation():
    got = parse_formula("forall x (dia F(x))", Lang.L)
    assert got == Forall(x, Not(Cond(Atom(F, (x,)), Bot())))


def test_parse_rejects_identity_outside_leq():
    with pytest.raises(ParseError):
        parse_formula("x = y", Lang.L)
    assert parse_formula("x = y", Lang.LEQ) == Eq(x, y)


def test_parse_rejects_e_outside_le():
    with pytest.raises(ParseError):
        parse_formula("E(x)", Lang.L)
    assert parse_formula("E(x)", Lang.LE) == EPred(x)
    # under L= the existence predicate abbreviates an identity quantification
    assert parse_formula("E(x)", Lang.LEQ) == Exists(y, Eq(x, y))


def test_parse_derived_connectives():
    assert parse_formula("F(x) & G(y)", Lang.L) == And(
        Atom(F, (x,)), Atom(Predicate(1, 1), (y,))
    )
    assert parse_formula("top", Lang.L) == Top()
    assert parse_formula("bot", Lang.L) == Bot()
    assert parse_formula("box F(x)", Lang.L) == Box(Atom(F, (x,)))
    assert parse_formula("exists y. F(y)", Lang.L) == Exists(y, Atom(F, (y,)))


def test_parse_precedence():
    got = parse_formula("~F(x) & G(y) | H(z) -> F(x)", Lang.L)
    want = Imp(
        Or(And(Not(Atom(F, (x,))), Atom(Predicate(1, 1), (y,))), Atom(Predicate(2, 1), (z,))),
        Atom(F, (x,)),
    )
    assert got == want


def test_parse_imp_right_associative():
    got = parse_formula("A -> B -> C", Lang.L)
    a, b, c = (Atom(Predicate(i, 0)) for i in range(3))
    assert got == Imp(a, Imp(b, c))


def test_conditional_chains_need_parens():
    with pytest.raises(ParseError):
        parse_formula("A > B > C", Lang.L)
    with pytest.raises(ParseError):
        parse_formula("A -> B > C", Lang.L)
    a, b, c = (Atom(Predicate(i, 0)) for i in range(3))
    assert parse_formula("A > (B > C)", Lang.L) == Cond(a, Cond(b, c))


def test_quantifier_extends_right():
    got = parse_formula("forall x. F(x) -> G(x)", Lang.L)
    assert got == Forall(x, Imp(Atom(F, (x,)), Atom(Predicate(1, 1), (x,))))


def test_variable_and_predicate_spelling():
    assert parse_formula("P7(x12)", Lang.L) == Atom(Predicate(7, 1), (Variable(12),))
    assert parse_formula("F(x0)", Lang.L) == Atom(F, (x,))


def test_parse_error_has_span():
    with pytest.raises(ParseError) as err:
        parse_formula("F(x) >", Lang.L)
    assert err.value.span.start >= 5


def test_print_nested_conditional_parenthesized():
    a, b, c = (Atom(Predicate(i, 0)) for i in range(3))
    assert print_formula(Cond(a, Cond(b, c))) == "A > (B > C)"
    assert print_formula(Cond(Cond(a, b), c)) == "(A > B) > C"


def test_print_precedence_minimal_parens():
    a, b, c = (Atom(Predicate(i, 0)) for i in range(3))
    assert print_formula(Imp(And(a, b), c)) == "A & B -> C"
    assert print_formula(And(a, Or(b, c))) == "A & (B | C)"
    assert print_formula(Not(And(a, b))) == "~(A & B)"
    assert print_formula(Iff(a, Imp(b, c))) == "A <-> B -> C"


def test_print_sugar():
    assert print_formula(Top()) == "top"
    assert print_formula(Bot()) == "bot"
    assert print_formula(Box(Atom(F, (x,)))) == "box F(x)"
    assert print_formula(Dia(Atom(F, (x,)))) == "dia F(x)"
    assert print_formula(Exists(x, Atom(F, (x,)))) == "exists x. F(x)"


def test_roundtrip_ds():
    ds = build_ds()
    assert alpha_equal(parse_formula(print_formula(ds), Lang.L), ds)


def test_roundtrip_quantifier_in_left_position():
    phi = And(Forall(x, Atom(F, (x,))), Atom(Predicate(1, 0)))
    assert alpha_equal(parse_formula(print_formula(phi), Lang.L), phi)


def test_formula_file():
    text = "# corpus\nF(x) > G(x)\n\n~F(y)  # trailing\n"
    got = parse_formula_file(text, Lang.L)
    assert len(got) == 2


@given(formulas())
def test_roundtrip_property(phi):
    assert alpha_equal(parse_formula(print_formula(phi), Lang.L), phi)


@given(formulas(lang=Lang.LEQ))
def test_roundtrip_property_identity(phi):
    assert alpha_equal(parse_formula(print_formula(phi), Lang.LEQ), phi)
