"""Axiom-schema instance recognition and Hilbert proof verification.

Seven logics share a pool of schema and rule matchers:

* the quantified conditional logic of Stalnaker and Thomason (``QST``,
  in the identity language, items 1-17);
* the constant-domain base logic ``QC2`` (items 18-27) and its identity
  extension ``QC2=`` (28-30);
* variable-domain variants ``QC2vE``/``QC2v=`` (23v, 27v in place of 23,
  27) and locally-constant variants ``QC2cE``/``QC2c=`` (adding 31c, 32c).

Schemas are matched structurally: patterns are ordinary formula trees
containing metavariable leaves, built with the same derived-connective
constructors as real formulas, so box/diamond/conjunction patterns expand
exactly as instances do.  Substitution schemas search for a witnessing
substitution and compare up to renaming of bound variables.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence

from .syntax import (
    And,
    Atom,
    Box,
    Cond,
    Dia,
    EPred,
    Eq,
    Exists,
    F,
    Forall,
    Formula,
    FormulaError,
    Iff,
    Imp,
    Lang,
    Not,
    Or,
    Predicate,
    Variable,
    alpha_equal,
    free_variables,
    language,
    nested_cond,
    substitute,
)


class ProofError(Exception):
    pass


# ---------------------------------------------------------------------------
# Patterns.


@dataclass(frozen=True, repr=False, eq=False)
class FMeta(Formula):
    """Formula metavariable."""

    name: str

    def __repr__(self) -> str:
        return f"?{self.name}"


@dataclass(frozen=True, repr=False)
class VMeta(Variable):
    """Variable metavariable; matches individual variables only."""

    name: str = ""

    def __post_init__(self) -> None:
        pass  # the placeholder index needs no validation

    def __repr__(self) -> str:
        return f"?{self.name}"


def fmeta(name: str) -> FMeta:
    return FMeta(name)

def vmeta(name: str) -> VMeta:
    return VMeta(-1, name)


@dataclass
class Bindings:
    formulas: dict[str, Formula]
    variables: dict[str, Variable]

    @staticmethod
    def empty() -> "Bindings":
        return Bindings({}, {})


def match(pattern: Formula, target: Formula, b: Optional[Bindings] = None) -> Optional[Bindings]:
    """Structural match binding metavariables; None when there is none."""
    if b is None:
        b = Bindings.empty()
    if _match(pattern, target, b):
        return b
    return None


def _match_var(pattern: Variable, target: Variable, b: Bindings) -> bool:
    if isinstance(pattern, VMeta):
        if isinstance(target, VMeta):
            return False
        bound = b.variables.get(pattern.name)
        if bound is None:
            b.variables[pattern.name] = target
            return True
        return bound == target
    return pattern == target


def _match(pattern: Formula, target: Formula, b: Bindings) -> bool:
    if isinstance(pattern, FMeta):
        bound = b.formulas.get(pattern.name)
        if bound is None:
            b.formulas[pattern.name] = target
            return True
        return bound == target
    if type(pattern) is not type(target):
        return False
    if isinstance(pattern, Atom):
        assert isinstance(target, Atom)
        return pattern.pred == target.pred and all(
            _match_var(p, t, b) for p, t in zip(pattern.args, target.args)
        )
    if isinstance(pattern, Eq):
        assert isinstance(target, Eq)
        return _match_var(pattern.left, target.left, b) and _match_var(
            pattern.right, target.right, b
        )
    if isinstance(pattern, EPred):
        assert isinstance(target, EPred)
        return _match_var(pattern.arg, target.arg, b)
    if isinstance(pattern, Not):
        assert isinstance(target, Not)
        return _match(pattern.body, target.body, b)
    if isinstance(pattern, (Imp, Cond)):
        assert isinstance(target, (Imp, Cond))
        return _match(pattern.left, target.left, b) and _match(
            pattern.right, target.right, b
        )
    if isinstance(pattern, Forall):
        assert isinstance(target, Forall)
        return _match_var(pattern.var, target.var, b) and _match(
            pattern.body, target.body, b
        )
    raise ProofError(f"bad pattern node {pattern!r}")


# ---------------------------------------------------------------------------
# Tautology recognition: truth-table over maximal non-truth-functional
# subformulas (negation and material implication are the only core
# truth-functional connectives).

MAX_TAUTOLOGY_ATOMS = 16


def _boolean_atoms(phi: Formula, acc: list[Formula]) -> None:
    if isinstance(phi, Not):
        _boolean_atoms(phi.body, acc)
    elif isinstance(phi, Imp):
        _boolean_atoms(phi.left, acc)
        _boolean_atoms(phi.right, acc)
    else:
        if phi not in acc:
            acc.append(phi)


def is_tautology_instance(phi: Formula) -> bool:
    atoms: list[Formula] = []
    _boolean_atoms(phi, atoms)
    if len(atoms) > MAX_TAUTOLOGY_ATOMS:
        raise ProofError(f"tautology check ceiling: {len(atoms)} boolean atoms")
    index = {a: i for i, a in enumerate(atoms)}

    def value(psi: Formula, row: int) -> bool:
        if isinstance(psi, Not):
            return not value(psi.body, row)
        if isinstance(psi, Imp):
            return not value(psi.left, row) or value(psi.right, row)
        return bool(row & (1 << index[psi]))

    return all(value(phi, row) for row in range(1 << len(atoms)))


# ---------------------------------------------------------------------------
# Schema checkers.

a_, b_, c_ = fmeta("a"), fmeta("b"), fmeta("c")
x_, y_, t_, s_ = vmeta("x"), vmeta("y"), vmeta("t"), vmeta("s")


def _pattern_checker(pattern: Formula, *, distinct: Sequence[tuple[str, str]] = ()):
    def check(phi: Formula) -> bool:
        b = match(pattern, phi)
        if b is None:
            return False
        for left, right in distinct:
            if b.variables.get(left) == b.variables.get(right):
                return False
        return True

    return check


def _existence_forms(v: VMeta) -> list[tuple[Formula, Optional[tuple[str, str]]]]:
    """E(v) as a primitive, or its identity-language expansion."""
    w = vmeta(f"_ewitness_{v.name}")
    return [
        (EPred(v), None),
        (Exists(w, Eq(v, w)), (v.name, w.name)),
    ]


def _check_ui_consequent(
    quantified: Formula, var: Variable, consequent: Formula, candidates: Iterable[Variable]
) -> bool:
    """Does some y give consequent = quantified[y/var], up to renaming?"""
    seen = set()
    for y in candidates:
        if y in seen:
            continue
        seen.add(y)
        try:
            expected = substitute(quantified, [(var, y)])
        except FormulaError:
            continue
        if alpha_equal(expected, consequent):
            return True
    return False


def _ui_candidates(consequent: Formula, var: Variable) -> list[Variable]:
    return [var] + sorted(free_variables(consequent), key=lambda v: v.index)


def _check_axiom_23(phi: Formula) -> bool:
    # forall x phi -> phi[y/x]
    if not (isinstance(phi, Imp) and isinstance(phi.left, Forall)):
        return False
    body = phi.left.body
    var = phi.left.var
    return _check_ui_consequent(body, var, phi.right, _ui_candidates(phi.right, var))


def _check_axiom_23v(phi: Formula) -> bool:
    # (forall x phi & E(y)) -> phi[y/x]
    for e_form, distinct in _existence_forms(y_):
        pattern = Imp(And(FMeta("q"), e_form), FMeta("c"))
        b = match(pattern, phi)
        if b is None:
            continue
        if distinct and b.variables.get(distinct[0]) == b.variables.get(distinct[1]):
            continue
        quantified = b.formulas["q"]
        if not isinstance(quantified, Forall):
            continue
        yy = b.variables["y"]
        if alpha_equal(
            substitute(quantified.body, [(quantified.var, yy)]), b.formulas["c"]
        ):
            return True
    return False


def _check_axiom_24(phi: Formula) -> bool:
    # forall x (a > b) -> (a > forall x b), x not free in a
    pattern = Imp(Forall(x_, Cond(a_, b_)), Cond(FMeta("a2"), Forall(x_, FMeta("b2"))))
    b = match(pattern, phi)
    if b is None:
        return False
    if b.formulas["a"] != b.formulas["a2"] or b.formulas["b"] != b.formulas["b2"]:
        return False
    return b.variables["x"] not in free_variables(b.formulas["a"])


def _check_axiom_8(phi: Formula) -> bool:
    # forall x phi -> (exists x box x=t -> phi[t/x])
    pattern = Imp(
        Forall(x_, FMeta("q")), Imp(Exists(x_, Box(Eq(x_, t_))), FMeta("c"))
    )
    b = match(pattern, phi)
    if b is None:
        return False
    var, t = b.variables["x"], b.variables["t"]
    if var == t:
        return False
    return _check_ui_consequent(b.formulas["q"], var, b.formulas["c"], [t])


def _check_axiom_9(phi: Formula) -> bool:
    # forall x (exists y box y=x -> phi) -> forall x phi
    pattern = Imp(
        Forall(x_, Imp(Exists(y_, Box(Eq(y_, x_))), a_)),
        Forall(x_, FMeta("a2")),
    )
    b = match(pattern, phi)
    if b is None:
        return False
    if b.variables["x"] == b.variables["y"]:
        return False
    return b.formulas["a"] == b.formulas["a2"]


def _check_axiom_29(phi: Formula) -> bool:
    # x=y -> (phi <-> phi[y/x])
    pattern = Imp(Eq(x_, y_), Iff(a_, b_))
    b = match(pattern, phi)
    if b is None:
        return False
    var, y = b.variables["x"], b.variables["y"]
    return alpha_equal(substitute(b.formulas["a"], [(var, y)]), b.formulas["b"])


QST11_REPLACE_S_BY_T = True
"""Default reading of the substitution axiom: the right formula results
from the left by replacing free occurrences of the first identity argument
with the second, never inside a conditional.  The published wording is
garbled; the reverse direction is available via the checker argument."""


def _check_axiom_11(phi: Formula, replace_s_by_t: Optional[bool] = None) -> bool:
    if replace_s_by_t is None:
        replace_s_by_t = QST11_REPLACE_S_BY_T
    pattern = Imp(Eq(s_, t_), Imp(a_, b_))
    b = match(pattern, phi)
    if b is None:
        return False
    s, t = b.variables["s"], b.variables["t"]
    old, new = (s, t) if replace_s_by_t else (t, s)
    return _replaceable_outside_conditionals(
        b.formulas["a"], b.formulas["b"], old, new
    )


def _replaceable_outside_conditionals(
    before: Formula, after: Formula, old: Variable, new: Variable
) -> bool:
    """after arises from before by swapping old for new at zero or more free
    occurrences, none inside either argument of a conditional, with the
    replacement never captured."""

    def walk(p: Formula, q: Formula, frozen: bool, bound: frozenset[Variable]) -> bool:
        if type(p) is not type(q):
            return False
        if isinstance(p, Atom):
            if p.pred != q.pred:
                return False
            return all(
                _arg_ok(pa, qa, frozen, bound) for pa, qa in zip(p.args, q.args)
            )
        if isinstance(p, Eq):
            return _arg_ok(p.left, q.left, frozen, bound) and _arg_ok(
                p.right, q.right, frozen, bound
            )
        if isinstance(p, EPred):
            return _arg_ok(p.arg, q.arg, frozen, bound)
        if isinstance(p, Not):
            return walk(p.body, q.body, frozen, bound)
        if isinstance(p, Imp):
            return walk(p.left, q.left, frozen, bound) and walk(
                p.right, q.right, frozen, bound
            )
        if isinstance(p, Cond):
            # inside the scope of a modal: no replacements allowed
            return walk(p.left, q.left, True, bound) and walk(
                p.right, q.right, True, bound
            )
        if isinstance(p, Forall):
            if p.var != q.var:
                return False
            return walk(p.body, q.body, frozen, bound | {p.var})
        return False

    def _arg_ok(pa: Variable, qa: Variable, frozen: bool, bound: frozenset) -> bool:
        if pa == qa:
            return True
        return (
            not frozen
            and pa == old
            and qa == new
            and old not in bound  # the occurrence must be free
            and new not in bound  # and the replacement not captured
        )

    return walk(before, after, False, frozenset())


def _schema_table() -> dict[str, Callable[[Formula], bool]]:
    modus = {
        # -- Stalnaker-Thomason logic ------------------------------------
        "1": is_tautology_instance,
        "2": _pattern_checker(Imp(Box(Imp(a_, b_)), Imp(Box(a_), Box(b_)))),
        "3": _pattern_checker(Imp(Box(Imp(a_, b_)), Cond(a_, b_))),
        "4": _pattern_checker(
            Imp(Dia(a_), Imp(Cond(a_, b_), Not(Cond(a_, Not(b_)))))
        ),
        "5": _pattern_checker(
            Imp(Cond(a_, Or(b_, c_)), Or(Cond(a_, b_), Cond(a_, c_)))
        ),
        "6": _pattern_checker(Imp(Cond(a_, b_), Imp(a_, b_))),
        "7": _pattern_checker(
            Imp(And(Cond(a_, b_), Cond(b_, a_)), Imp(Cond(a_, c_), Cond(b_, c_)))
        ),
        "8": _check_axiom_8,
        "9": _check_axiom_9,
        "10": _pattern_checker(Eq(s_, s_)),
        "11": _check_axiom_11,
        "12": _pattern_checker(Imp(Dia(Eq(x_, y_)), Box(Eq(x_, y_)))),
        # -- base conditional logic ---------------------------------------
        "18": is_tautology_instance,
        "19": _pattern_checker(Cond(a_, a_)),
        "20": _pattern_checker(
            Imp(And(Cond(a_, b_), And(Cond(b_, a_), Cond(a_, c_))), Cond(b_, c_))
        ),
        "21": _pattern_checker(Imp(Cond(a_, b_), Imp(a_, b_))),
        "22": _pattern_checker(Or(Cond(a_, b_), Cond(a_, Not(b_)))),
        "23": _check_axiom_23,
        "24": _check_axiom_24,
        # -- identity -----------------------------------------------------
        "28": _pattern_checker(Eq(x_, x_)),
        "29": _check_axiom_29,
        "30": _pattern_checker(Imp(Not(Eq(x_, y_)), Box(Not(Eq(x_, y_))))),
        # -- variable and locally constant domains ------------------------
        "23v": _check_axiom_23v,
        "31c": _existence_box_checker(negated=False),
        "32c": _existence_box_checker(negated=True),
    }
    return modus


def _existence_box_checker(negated: bool):
    def check(phi: Formula) -> bool:
        for e_form, distinct in _existence_forms(x_):
            wrapped = Not(e_form) if negated else e_form
            b = match(Imp(wrapped, Box(wrapped)), phi)
            if b is None:
                continue
            if distinct and b.variables.get(distinct[0]) == b.variables.get(distinct[1]):
                continue
            return True
        return False

    return check


SCHEMAS: dict[str, Callable[[Formula], bool]] = {}


def is_axiom_instance(schema: str, phi: Formula) -> bool:
    """True when phi instantiates the schema (purely structurally)."""
    checker = SCHEMAS.get(schema)
    if checker is None:
        raise ProofError(f"unknown schema id {schema!r}")
    return checker(phi)


# ---------------------------------------------------------------------------
# Rules.


def _and_readings(node: Formula) -> list[tuple[list[Formula], Formula]]:
    """Splits of a right-nested conjunction spine: ([e1..ek-1], tail)."""
    parts: list[Formula] = []
    tails: list[Formula] = [node]
    cur = node
    while (
        isinstance(cur, Not)
        and isinstance(cur.body, Imp)
        and isinstance(cur.body.right, Not)
    ):
        parts.append(cur.body.left)
        cur = cur.body.right.body
        tails.append(cur)
    readings = []
    for k in range(len(parts) + 1):
        readings.append((parts[:k], tails[k]))
    return readings


def _cond_spine_readings(node: Formula) -> list[tuple[list[Formula], Formula]]:
    """Splits of a right-nested conditional spine: ([a1..ak], core)."""
    antecedents: list[Formula] = []
    readings = [([], node)]
    cur = node
    while isinstance(cur, Cond):
        antecedents.append(cur.left)
        cur = cur.right
        readings.append((list(antecedents), cur))
    return readings


def check_rule(rule: str, premises: Sequence[Formula], conclusion: Formula) -> bool:
    """Does the conclusion follow from the premises by the rule, with all
    freeness side conditions?"""
    if rule in ("13", "25"):  # modus ponens
        if len(premises) != 2:
            return False
        p, q = premises
        return q == Imp(p, conclusion) or p == Imp(q, conclusion)

    if rule == "14":  # from phi infer psi > phi
        return (
            len(premises) == 1
            and isinstance(conclusion, Cond)
            and conclusion.right == premises[0]
        )

    if rule == "15":  # from psi -> phi infer psi -> forall x phi
        if len(premises) != 1:
            return False
        if not (isinstance(conclusion, Imp) and isinstance(conclusion.right, Forall)):
            return False
        psi = conclusion.left
        quant = conclusion.right
        if quant.var in free_variables(psi):
            return False
        return premises[0] == Imp(psi, quant.body)

    if rule == "16":  # from alphas > phi infer alphas > forall x phi
        if len(premises) != 1:
            return False
        for alphas, core in _cond_spine_readings(conclusion):
            if not isinstance(core, Forall):
                continue
            if any(core.var in free_variables(alpha) for alpha in alphas):
                continue
            if premises[0] == nested_cond(alphas, core.body):
                return True
        return False

    if rule == "17":  # from alphas > (phi > t != x) infer alphas > ~phi
        if len(premises) != 1:
            return False
        for alphas, core in _cond_spine_readings(conclusion):
            if not isinstance(core, Not):
                continue
            phi = core.body
            for p_alphas, p_core in _cond_spine_readings(premises[0]):
                if len(p_alphas) != len(alphas) or p_alphas != alphas:
                    continue
                if not (
                    isinstance(p_core, Cond)
                    and p_core.left == phi
                    and isinstance(p_core.right, Not)
                    and isinstance(p_core.right.body, Eq)
                ):
                    continue
                var = p_core.right.body.right
                if var in free_variables(phi):
                    continue
                if any(var in free_variables(alpha) for alpha in alphas):
                    continue
                return True
        return False

    if rule == "26":  # conditional closure
        if len(premises) != 1:
            return False
        if not (isinstance(conclusion, Imp) and isinstance(conclusion.right, Cond)):
            return False
        phi = conclusion.right.left
        chi = conclusion.right.right
        for parts, tail in _and_readings(conclusion.left):
            conds = parts + [tail]
            if not all(isinstance(c, Cond) and c.left == phi for c in conds):
                continue
            psis = [c.right for c in conds]
            spine = psis[-1]
            for psi in reversed(psis[:-1]):
                spine = And(psi, spine)
            if premises[0] == Imp(spine, chi):
                return True
        return False

    if rule == "27":  # universal introduction with a fresh witness
        if len(premises) != 1:
            return False
        if not (isinstance(conclusion, Imp) and isinstance(conclusion.right, Forall)):
            return False
        psi = conclusion.left
        quant = conclusion.right
        if not (isinstance(premises[0], Imp) and premises[0].left == psi):
            return False
        body = premises[0].right
        for yy in _ui_candidates(body, quant.var):
            if yy in free_variables(psi) or yy in free_variables(quant):
                continue
            if alpha_equal(substitute(quant.body, [(quant.var, yy)]), body):
                return True
        return False

    if rule == "27v":  # variable-domain universal introduction
        if len(premises) != 1:
            return False
        if not isinstance(conclusion, Imp):
            return False
        psi = conclusion.left
        if not (isinstance(premises[0], Imp) and premises[0].left == psi):
            return False
        for alphas, core in _cond_spine_readings(conclusion.right):
            if not isinstance(core, Forall):
                continue
            for p_alphas, p_core in _cond_spine_readings(premises[0].right):
                if p_alphas != alphas:
                    continue
                got = _match_existence_implication(p_core)
                if got is None:
                    continue
                yy, sub_body = got
                if yy in free_variables(psi) or yy in free_variables(core):
                    continue
                if any(yy in free_variables(alpha) for alpha in alphas):
                    continue
                if alpha_equal(
                    substitute(core.body, [(core.var, yy)]), sub_body
                ):
                    return True
        return False

    raise ProofError(f"unknown rule id {rule!r}")


def _match_existence_implication(phi: Formula) -> Optional[tuple[Variable, Formula]]:
    """Decompose E(y) -> body, accepting both existence spellings."""
    if not isinstance(phi, Imp):
        return None
    head = phi.left
    if isinstance(head, EPred):
        return head.arg, phi.right
    b = match(Exists(vmeta("w"), Eq(vmeta("v"), vmeta("w"))), head)
    if b is not None and b.variables["v"] != b.variables["w"]:
        return b.variables["v"], phi.right
    return None


# ---------------------------------------------------------------------------
# Logics and proof scripts.


@dataclass(frozen=True)
class Logic:
    name: str
    lang: Lang
    axioms: frozenset[str]
    rules: frozenset[str]


def _mk_logics() -> dict[str, Logic]:
    qst = Logic(
        "QST",
        Lang.LEQ,
        frozenset(str(i) for i in range(1, 13)),
        frozenset(str(i) for i in range(13, 18)),
    )
    qc2_axioms = frozenset({"18", "19", "20", "21", "22", "23", "24"})
    qc2_rules = frozenset({"25", "26", "27"})
    ident = frozenset({"28", "29", "30"})
    v_axioms = (qc2_axioms - {"23"}) | {"23v"}
    v_rules = (qc2_rules - {"27"}) | {"27v"}
    return {
        "QST": qst,
        "QC2": Logic("QC2", Lang.L, qc2_axioms, qc2_rules),
        "QC2=": Logic("QC2=", Lang.LEQ, qc2_axioms | ident, qc2_rules),
        "QC2vE": Logic("QC2vE", Lang.LE, v_axioms, v_rules),
        "QC2v=": Logic("QC2v=", Lang.LEQ, v_axioms | ident, v_rules),
        "QC2cE": Logic("QC2cE", Lang.LE, v_axioms | {"31c", "32c"}, v_rules),
        "QC2c=": Logic(
            "QC2c=", Lang.LEQ, v_axioms | ident | {"31c", "32c"}, v_rules
        ),
    }


LOGICS = _mk_logics()


@dataclass(frozen=True)
class AxiomInstance:
    schema: str


@dataclass(frozen=True)
class RuleApplication:
    rule: str
    premises: tuple[int, ...]  # 1-based indices of earlier lines


@dataclass(frozen=True)
class ProofLine:
    formula: Formula
    justification: "AxiomInstance | RuleApplication"


@dataclass(frozen=True)
class ProofScript:
    logic: str
    lines: tuple[ProofLine, ...]

    def __post_init__(self) -> None:
        if self.logic not in LOGICS:
            raise ProofError(f"unknown logic {self.logic!r}")
        for i, line in enumerate(self.lines, start=1):
            just = line.justification
            if isinstance(just, RuleApplication):
                for p in just.premises:
                    if not 1 <= p < i:
                        raise ProofError(
                            f"line {i} cites line {p}, which is not an earlier line"
                        )


@dataclass(frozen=True)
class Verdict:
    accepted: bool
    line: Optional[int] = None
    reason: Optional[str] = None

    def __bool__(self) -> bool:
        return self.accepted

    def to_json(self) -> dict:
        return {"accepted": self.accepted, "line": self.line, "reason": self.reason}


def verify_proof(script: ProofScript) -> Verdict:
    """Accept when every line is an axiom instance of the declared logic or
    follows from cited earlier lines by one of its rules."""
    logic = LOGICS[script.logic]
    for i, line in enumerate(script.lines, start=1):
        try:
            actual = language(line.formula)
        except FormulaError as err:
            return Verdict(False, i, str(err))
        if not actual <= logic.lang:
            return Verdict(
                False, i, f"formula language {actual} outside {logic.lang}"
            )
        just = line.justification
        if isinstance(just, AxiomInstance):
            if just.schema not in logic.axioms:
                return Verdict(
                    False, i, f"schema {just.schema} is not in {logic.name}"
                )
            if not is_axiom_instance(just.schema, line.formula):
                return Verdict(
                    False, i, f"line is not an instance of schema {just.schema}"
                )
        else:
            if just.rule not in logic.rules:
                return Verdict(False, i, f"rule {just.rule} is not in {logic.name}")
            premises = [script.lines[p - 1].formula for p in just.premises]
            if not check_rule(just.rule, premises, line.formula):
                return Verdict(
                    False, i, f"line does not follow by rule {just.rule}"
                )
    return Verdict(True)


# ---------------------------------------------------------------------------
# The derivation of the necessity-to-conditional theorem in the base logic,
# from order transfer and the excluded middle, machine-checked end to end.


def mod_theorem_proof() -> ProofScript:
    """box phi -> (psi > phi) for phi = F(x), psi = G(y).

    The derivation first proves the top sentence (so bottom-implications
    become available by detachment), then runs excluded middle against the
    order-transfer axiom.
    """
    x, y, y1 = Variable(0), Variable(1), Variable(1)
    fx = Atom(F, (x,))
    gy = Atom(Predicate(1, 1), (y,))
    u = Forall(x, Imp(fx, fx))  # the top sentence
    bot = Not(u)
    fx0 = Imp(fx, fx)
    fx1 = Imp(Atom(F, (y1,)), Atom(F, (y1,)))

    lines = [
        # establish top
        ProofLine(Imp(fx0, fx1), AxiomInstance("18")),
        ProofLine(Imp(fx0, u), RuleApplication("27", (1,))),
        ProofLine(fx0, AxiomInstance("18")),
        ProofLine(u, RuleApplication("25", (3, 2))),
        # bottom implies anything, conditionally lifted
        ProofLine(Imp(u, Imp(bot, gy)), AxiomInstance("18")),
        ProofLine(Imp(bot, gy), RuleApplication("25", (4, 5))),
        ProofLine(
            Imp(Cond(Not(fx), bot), Cond(Not(fx), gy)), RuleApplication("26", (6,))
        ),
        ProofLine(Imp(u, Imp(bot, fx)), AxiomInstance("18")),
        ProofLine(Imp(bot, fx), RuleApplication("25", (4, 8))),
        ProofLine(Imp(Cond(gy, bot), Cond(gy, fx)), RuleApplication("26", (9,))),
        # order transfer and excluded middle
        ProofLine(
            Imp(
                And(Cond(Not(fx), gy), And(Cond(gy, Not(fx)), Cond(Not(fx), bot))),
                Cond(gy, bot),
            ),
            AxiomInstance("20"),
        ),
        ProofLine(Or(Cond(gy, fx), Cond(gy, Not(fx))), AxiomInstance("22")),
        # propositional assembly
        ProofLine(
            Imp(
                Imp(Cond(Not(fx), bot), Cond(Not(fx), gy)),
                Imp(
                    Imp(Cond(gy, bot), Cond(gy, fx)),
                    Imp(
                        Imp(
                            And(
                                Cond(Not(fx), gy),
                                And(Cond(gy, Not(fx)), Cond(Not(fx), bot)),
                            ),
                            Cond(gy, bot),
                        ),
                        Imp(
                            Or(Cond(gy, fx), Cond(gy, Not(fx))),
                            Imp(Cond(Not(fx), bot), Cond(gy, fx)),
                        ),
                    ),
                ),
            ),
            AxiomInstance("18"),
        ),
        ProofLine(
            Imp(
                Imp(Cond(gy, bot), Cond(gy, fx)),
                Imp(
                    Imp(
                        And(
                            Cond(Not(fx), gy),
                            And(Cond(gy, Not(fx)), Cond(Not(fx), bot)),
                        ),
                        Cond(gy, bot),
                    ),
                    Imp(
                        Or(Cond(gy, fx), Cond(gy, Not(fx))),
                        Imp(Cond(Not(fx), bot), Cond(gy, fx)),
                    ),
                ),
            ),
            RuleApplication("25", (7, 13)),
        ),
        ProofLine(
            Imp(
                Imp(
                    And(
                        Cond(Not(fx), gy), And(Cond(gy, Not(fx)), Cond(Not(fx), bot))
                    ),
                    Cond(gy, bot),
                ),
                Imp(
                    Or(Cond(gy, fx), Cond(gy, Not(fx))),
                    Imp(Cond(Not(fx), bot), Cond(gy, fx)),
                ),
            ),
            RuleApplication("25", (10, 14)),
        ),
        ProofLine(
            Imp(
                Or(Cond(gy, fx), Cond(gy, Not(fx))),
                Imp(Cond(Not(fx), bot), Cond(gy, fx)),
            ),
            RuleApplication("25", (11, 15)),
        ),
        ProofLine(
            Imp(Cond(Not(fx), bot), Cond(gy, fx)), RuleApplication("25", (12, 16))
        ),
    ]
    return ProofScript("QC2", tuple(lines))


def mutate_script(script: ProofScript, line_no: int) -> ProofScript:
    """Negate one line's formula; used to confirm single-line perturbations
    are rejected."""
    lines = list(script.lines)
    old = lines[line_no - 1]
    lines[line_no - 1] = ProofLine(Not(old.formula), old.justification)
    return ProofScript(script.logic, tuple(lines))


# ---------------------------------------------------------------------------
# Random instance generation (self-consistency of the matchers).


def generate_instance(
    schema: str, rng: random.Random, pool: Sequence[Formula]
) -> Formula:
    """A random instance of the schema drawn from a formula pool."""
    def pick() -> Formula:
        return rng.choice(pool)

    def var(exclude: frozenset[Variable] = frozenset()) -> Variable:
        options = [Variable(i) for i in range(4) if Variable(i) not in exclude]
        return rng.choice(options)

    a, b, c = pick(), pick(), pick()
    x = var()
    y = var()
    t = var(exclude=frozenset([x]))
    if schema in ("1", "18"):
        return rng.choice(
            [Imp(a, Imp(b, a)), Or(a, Not(a)), Imp(Not(Not(a)), a), Imp(a, a)]
        )
    if schema == "2":
        return Imp(Box(Imp(a, b)), Imp(Box(a), Box(b)))
    if schema == "3":
        return Imp(Box(Imp(a, b)), Cond(a, b))
    if schema == "4":
        return Imp(Dia(a), Imp(Cond(a, b), Not(Cond(a, Not(b)))))
    if schema == "5":
        return Imp(Cond(a, Or(b, c)), Or(Cond(a, b), Cond(a, c)))
    if schema in ("6", "21"):
        return Imp(Cond(a, b), Imp(a, b))
    if schema == "7":
        return Imp(And(Cond(a, b), Cond(b, a)), Imp(Cond(a, c), Cond(b, c)))
    if schema == "8":
        return Imp(
            Forall(x, a), Imp(Exists(x, Box(Eq(x, t))), substitute(a, [(x, t)]))
        )
    if schema == "9":
        yy = var(exclude=frozenset([x]))
        return Imp(Forall(x, Imp(Exists(yy, Box(Eq(yy, x))), a)), Forall(x, a))
    if schema in ("10", "28"):
        return Eq(x, x)
    if schema == "11":
        # replace every free occurrence outside conditionals: built directly
        safe = Atom(F, (x,))
        before = And(safe, Cond(safe, safe))
        after = And(Atom(F, (t,)), Cond(safe, safe))
        return Imp(Eq(x, t), Imp(before, after))
    if schema == "12":
        return Imp(Dia(Eq(x, y)), Box(Eq(x, y)))
    if schema == "19":
        return Cond(a, a)
    if schema == "20":
        return Imp(And(Cond(a, b), And(Cond(b, a), Cond(a, c))), Cond(b, c))
    if schema == "22":
        return Or(Cond(a, b), Cond(a, Not(b)))
    if schema == "23":
        return Imp(Forall(x, a), substitute(a, [(x, y)]))
    if schema == "23v":
        return Imp(And(Forall(x, a), EPred(y)), substitute(a, [(x, y)]))
    if schema == "24":
        if x in free_variables(a):
            a2 = Forall(x, a)
        else:
            a2 = a
        return Imp(Forall(x, Cond(a2, b)), Cond(a2, Forall(x, b)))
    if schema == "29":
        return Imp(Eq(x, y), Iff(a, substitute(a, [(x, y)])))
    if schema == "30":
        return Imp(Not(Eq(x, y)), Box(Not(Eq(x, y))))
    if schema == "31c":
        return Imp(EPred(x), Box(EPred(x)))
    if schema == "32c":
        return Imp(Not(EPred(x)), Box(Not(EPred(x))))
    raise ProofError(f"no generator for schema {schema!r}")


SCHEMAS.update(_schema_table())
