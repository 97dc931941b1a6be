"""Derivation checking for Pp, Pp^c, Pd, Pd^c, Pd[=], HA, PA, B and FIM.

The kernel does no proof search: it matches axiom-schema instances,
applies inference rules with their variable side conditions, and keeps a
static per-system membership table for auditability.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Union

from . import syntax as S
from .syntax import (
    And, Eq, Exists, FnApp, ForAll, Formula, FunctorApp, FunctorVar, Implies,
    Lambda, Not, Or, Pred, Sort, Succ, Term, TermVar, Var, Zero, ZERO,
)


class SystemId(Enum):
    PP = "Pp"
    PPC = "PpC"
    PD = "Pd"
    PDC = "PdC"
    PDEQ = "PdEq"
    HA = "HA"
    PA = "PA"
    B = "B"
    FIM = "FIM"


_SYSTEM_ALIASES = {
    "pp": SystemId.PP, "ppc": SystemId.PPC, "pp^c": SystemId.PPC,
    "pd": SystemId.PD, "pdc": SystemId.PDC, "pd^c": SystemId.PDC,
    "pdeq": SystemId.PDEQ, "pd[=]": SystemId.PDEQ,
    "ha": SystemId.HA, "pa": SystemId.PA, "b": SystemId.B, "fim": SystemId.FIM,
}


def system_from_name(name: str) -> SystemId:
    key = name.strip().lower()
    if key not in _SYSTEM_ALIASES:
        raise ValueError(f"unknown system {name!r}")
    return _SYSTEM_ALIASES[key]


_PROP = tuple(f"X{i}" for i in range(1, 10))
_XN = tuple(f"XN{i}" for i in range(1, 8))

SYSTEM_AXIOMS: dict[SystemId, frozenset[str]] = {
    SystemId.PP: frozenset(_PROP + ("X10",)),
    SystemId.PPC: frozenset(_PROP + ("X10C",)),
    SystemId.PD: frozenset(_PROP + ("X10", "X11", "X12")),
    SystemId.PDC: frozenset(_PROP + ("X10C", "X11", "X12")),
    SystemId.PDEQ: frozenset(_PROP + ("X10", "X11", "X12", "XE1", "XE2", "XE3")),
    SystemId.HA: frozenset(_PROP + ("X10", "X11", "X12", "XE1", "XIND") + _XN),
    SystemId.PA: frozenset(_PROP + ("X10C", "X11", "X12", "XE1", "XIND") + _XN),
    SystemId.B: frozenset(
        _PROP
        + ("X10", "X11", "X12", "X13", "X14", "XE1", "XE2", "XE3", "XIND")
        + _XN
        + ("XF1", "XF2", "XF3", "BI")
    ),
    SystemId.FIM: frozenset(
        _PROP
        + ("X10", "X11", "X12", "X13", "X14", "XE1", "XE2", "XE3", "XIND")
        + _XN
        + ("XF1", "XF2", "XF3", "BI", "BP")
    ),
}

SYSTEM_RULES: dict[SystemId, frozenset[str]] = {
    SystemId.PP: frozenset({"mp"}),
    SystemId.PPC: frozenset({"mp"}),
    SystemId.PD: frozenset({"mp", "r2", "r3"}),
    SystemId.PDC: frozenset({"mp", "r2", "r3"}),
    SystemId.PDEQ: frozenset({"mp", "r2", "r3"}),
    SystemId.HA: frozenset({"mp", "r2", "r3"}),
    SystemId.PA: frozenset({"mp", "r2", "r3"}),
    SystemId.B: frozenset({"mp", "r2", "r3", "r4", "r5"}),
    SystemId.FIM: frozenset({"mp", "r2", "r3", "r4", "r5"}),
}

SYSTEM_PROFILE: dict[SystemId, S.LanguageProfile] = {
    SystemId.PP: S.PROFILE_PP,
    SystemId.PPC: S.PROFILE_PP,
    SystemId.PD: S.PROFILE_PD,
    SystemId.PDC: S.PROFILE_PD,
    SystemId.PDEQ: S.PROFILE_PDEQ,
    SystemId.HA: S.PROFILE_HA,
    SystemId.PA: S.PROFILE_HA,
    SystemId.B: S.PROFILE_FIM,
    SystemId.FIM: S.PROFILE_FIM,
}

# systems whose derivations may cite catalog defining axioms
_DEF_SYSTEMS = {SystemId.B, SystemId.FIM}


# ---------------------------------------------------------------------------
# Justifications and derivations

@dataclass(frozen=True)
class AxiomStep:
    schema: str
    hint: object = None  # optional instantiation witness for X11-X14


@dataclass(frozen=True)
class HypStep:
    index: int  # 0-based into the hypothesis list


@dataclass(frozen=True)
class RuleStep:
    rule: str  # mp | r2 | r3 | r4 | r5
    premises: tuple[int, ...]  # 0-based earlier step indices


@dataclass(frozen=True)
class DefStep:
    fn: str
    index: int  # which stored defining axiom


Justification = Union[AxiomStep, HypStep, RuleStep, DefStep]


@dataclass(frozen=True)
class Step:
    formula: Formula
    just: Justification


@dataclass(frozen=True)
class Derivation:
    system: SystemId
    hyps: tuple[Formula, ...]
    steps: tuple[Step, ...]

    @property
    def conclusion(self) -> Formula:
        return self.steps[-1].formula


@dataclass(frozen=True)
class Verdict:
    ok: bool
    step: Optional[int] = None  # 1-based step number when rejected
    reason: Optional[str] = None

    def __bool__(self):
        return self.ok


ACCEPTED = Verdict(True)


# ---------------------------------------------------------------------------
# Axiom schema matching

class _NoMatch(Exception):
    pass


def _fail(reason: str):
    raise _NoMatch(reason)


def match_substitution(A: Formula, x: Var, B: Formula):
    """Find r with substitute(A, x, r) == B.

    Returns (True, r) on success where r is None when x is not free in A
    (any witness works); raises _NoMatch otherwise.
    """
    found: list = []

    def fm(a, b, bound):
        if type(a) is not type(b):
            _fail(f"shape mismatch: {type(a).__name__} vs {type(b).__name__}")
        if isinstance(a, Eq):
            tm(a.left, b.left, bound)
            tm(a.right, b.right, bound)
        elif isinstance(a, Pred):
            if a.name != b.name or len(a.terms) != len(b.terms):
                _fail("predicate mismatch")
            for s, t in zip(a.terms, b.terms):
                tm(s, t, bound)
        elif isinstance(a, (And, Or, Implies)):
            fm(a.left, b.left, bound)
            fm(a.right, b.right, bound)
        elif isinstance(a, Not):
            fm(a.body, b.body, bound)
        elif isinstance(a, (ForAll, Exists)):
            if a.var != b.var:
                _fail("bound variable mismatch")
            if a.var == x:
                if a.body != b.body:
                    _fail("mismatch under rebinding quantifier")
            else:
                fm(a.body, b.body, bound | {a.var})
        else:
            _fail("unsupported formula node")

    def tm(s, t, bound):
        if isinstance(s, TermVar) and s.var == x and x not in bound:
            found.append(t)
            return
        if type(s) is not type(t):
            _fail(f"term mismatch: {type(s).__name__} vs {type(t).__name__}")
        if isinstance(s, TermVar):
            if s.var != t.var:
                _fail(f"variable mismatch {s.var} vs {t.var}")
        elif isinstance(s, Zero):
            pass
        elif isinstance(s, Succ):
            tm(s.arg, t.arg, bound)
        elif isinstance(s, (S.Plus, S.Times)):
            tm(s.left, t.left, bound)
            tm(s.right, t.right, bound)
        elif isinstance(s, FnApp):
            if s.fn != t.fn or len(s.terms) != len(t.terms) or len(s.functors) != len(t.functors):
                _fail("function constant mismatch")
            for a2, b2 in zip(s.terms, t.terms):
                tm(a2, b2, bound)
            for a2, b2 in zip(s.functors, t.functors):
                fn(a2, b2, bound)
        elif isinstance(s, FunctorApp):
            fn(s.functor, t.functor, bound)
            tm(s.arg, t.arg, bound)
        else:
            _fail("unsupported term node")

    def fn(u, v, bound):
        if isinstance(u, FunctorVar) and u.var == x and x not in bound:
            found.append(v)
            return
        if type(u) is not type(v):
            _fail("functor mismatch")
        if isinstance(u, FunctorVar):
            if u.var != v.var:
                _fail("function variable mismatch")
        elif isinstance(u, S.FnConstFunctor):
            if u.fn != v.fn:
                _fail("function constant mismatch")
        elif isinstance(u, Lambda):
            if u.var != v.var:
                _fail("lambda variable mismatch")
            if u.var == x:
                if u.body != v.body:
                    _fail("mismatch under rebinding lambda")
            else:
                tm(u.body, v.body, bound | {u.var})
        else:
            _fail("unsupported functor node")

    fm(A, B, frozenset())
    if not found:
        return True, None
    r = found[0]
    for other in found[1:]:
        if other != r:
            _fail("inconsistent instantiation of the substituted variable")
    return True, r


def _m_implies(e, what="implication"):
    if not isinstance(e, Implies):
        _fail(f"expected {what}")
    return e.left, e.right


def _m_var_term(t, what="a variable"):
    if not isinstance(t, TermVar):
        _fail(f"expected {what}")
    return t.var


def _match_x1(e):
    a, rest = _m_implies(e)
    b, a2 = _m_implies(rest, "B -> A part")
    if a2 != a:
        _fail("consequent is not the first antecedent")
    return {"A": a, "B": b}


def _match_x2(e):
    ab, rest = _m_implies(e)
    a, b = _m_implies(ab, "A -> B antecedent")
    abc, ac = _m_implies(rest)
    a2, bc = _m_implies(abc)
    b2, c = _m_implies(bc)
    a3, c2 = _m_implies(ac)
    if a2 != a or a3 != a or b2 != b or c2 != c:
        _fail("components disagree")
    return {"A": a, "B": b, "C": c}


def _match_x3(e):
    a, rest = _m_implies(e)
    b, conj = _m_implies(rest)
    if not isinstance(conj, And) or conj.left != a or conj.right != b:
        _fail("conclusion is not A & B")
    return {"A": a, "B": b}


def _match_x4(e):
    conj, a = _m_implies(e)
    if not isinstance(conj, And) or conj.left != a:
        _fail("not A & B -> A")
    return {"A": conj.left, "B": conj.right}


def _match_x5(e):
    conj, b = _m_implies(e)
    if not isinstance(conj, And) or conj.right != b:
        _fail("not A & B -> B")
    return {"A": conj.left, "B": conj.right}


def _match_x6(e):
    a, disj = _m_implies(e)
    if not isinstance(disj, Or) or disj.left != a:
        _fail("not A -> A | B")
    return {"A": disj.left, "B": disj.right}


def _match_x7(e):
    b, disj = _m_implies(e)
    if not isinstance(disj, Or) or disj.right != b:
        _fail("not B -> A | B")
    return {"A": disj.left, "B": disj.right}


def _match_x8(e):
    ac, rest = _m_implies(e)
    a, c = _m_implies(ac)
    bc, disj_c = _m_implies(rest)
    b, c2 = _m_implies(bc)
    disj, c3 = _m_implies(disj_c)
    if not isinstance(disj, Or) or disj.left != a or disj.right != b or c2 != c or c3 != c:
        _fail("components disagree")
    return {"A": a, "B": b, "C": c}


def _match_x9(e):
    ab, rest = _m_implies(e)
    a, b = _m_implies(ab)
    anb, na = _m_implies(rest)
    a2, nb = _m_implies(anb)
    if a2 != a or nb != Not(b) or na != Not(a):
        _fail("components disagree")
    return {"A": a, "B": b}


def _match_x10(e):
    na, rest = _m_implies(e)
    if not isinstance(na, Not):
        _fail("antecedent is not a negation")
    a, b = _m_implies(rest)
    if a != na.body:
        _fail("negated formula differs")
    return {"A": a, "B": b}


def _match_x10c(e):
    nna, a = _m_implies(e)
    if not isinstance(nna, Not) or not isinstance(nna.body, Not) or nna.body.body != a:
        _fail("not ~~A -> A")
    return {"A": a}


def _match_x11(e, hint=None):
    left, right = _m_implies(e)
    if not isinstance(left, ForAll):
        _fail("antecedent is not a universal formula")
    x, a = left.var, left.body
    if hint is not None:
        if S.substitute(a, x, hint) != right:
            _fail("hinted witness does not produce the consequent")
        t = hint
    else:
        _, t = match_substitution(a, x, right)
        if t is None:
            t = TermVar(x) if x.sort is Sort.NUMBER else FunctorVar(x)
    if not S.free_for(t, x, a):
        _fail(f"witness {t} not free for {x} in the matrix")
    return {"x": x, "A": a, "t": t}


def _match_x12(e, hint=None):
    left, right = _m_implies(e)
    if not isinstance(right, Exists):
        _fail("consequent is not an existential formula")
    x, a = right.var, right.body
    if hint is not None:
        if S.substitute(a, x, hint) != left:
            _fail("hinted witness does not produce the antecedent")
        t = hint
    else:
        _, t = match_substitution(a, x, left)
        if t is None:
            t = TermVar(x) if x.sort is Sort.NUMBER else FunctorVar(x)
    if not S.free_for(t, x, a):
        _fail(f"witness {t} not free for {x} in the matrix")
    return {"x": x, "A": a, "t": t}


def _match_x13(e, hint=None):
    inst = _match_x11(e, hint)
    if inst["x"].sort is not Sort.FUNCTION:
        _fail("X13 requires a function variable")
    return inst


def _match_x14(e, hint=None):
    inst = _match_x12(e, hint)
    if inst["x"].sort is not Sort.FUNCTION:
        _fail("X14 requires a function variable")
    return inst


def _number_var(v: Var):
    if v.sort is not Sort.NUMBER:
        _fail("expected a number variable")
    return v


def _match_xe1(e):
    xy, rest = _m_implies(e)
    xz, yz = _m_implies(rest)
    if not (isinstance(xy, Eq) and isinstance(xz, Eq) and isinstance(yz, Eq)):
        _fail("expected a chain of equations")
    x = _number_var(_m_var_term(xy.left))
    y = _number_var(_m_var_term(xy.right))
    z = _number_var(_m_var_term(xz.right))
    if xz.left != TermVar(x) or yz.left != TermVar(y) or yz.right != TermVar(z):
        _fail("equation variables disagree")
    if len({x, y, z}) != 3:
        _fail("XE1 requires three distinct variables")
    return {"x": x, "y": y, "z": z}


def _match_xe2(e):
    if not isinstance(e, Eq):
        _fail("expected an equation")
    x = _number_var(_m_var_term(e.left))
    if e.right != TermVar(x):
        _fail("not x = x")
    return {"x": x}


def _match_xe3(e, system: Optional[SystemId] = None):
    xy, rest = _m_implies(e)
    if not isinstance(xy, Eq):
        _fail("antecedent is not an equation")
    x = _number_var(_m_var_term(xy.left))
    y = _number_var(_m_var_term(xy.right))
    if x == y:
        _fail("XE3 requires distinct variables")
    ax, ay = _m_implies(rest)
    if not S.is_prime_formula(ax):
        _fail("XE3 requires a prime formula")
    if system in (SystemId.PDEQ, SystemId.PD, SystemId.PDC) and not isinstance(ax, Pred):
        _fail("XE3 in Pd[=] ranges over predicate-letter primes")
    if not S.free_for(TermVar(y), x, ax):
        _fail("y not free for x in the prime formula")
    if S.substitute(ax, x, TermVar(y)) != ay:
        _fail("consequent is not the substituted prime formula")
    return {"x": x, "y": y, "A": ax}


def _match_xn(n: int, e):
    # XN1: x=y -> x'=y'      XN2: x'=y' -> x=y        XN3: ~(x'=0)
    # XN4: x+0=x             XN5: x+(y') = (x+y)'     XN6: x*0=0
    # XN7: x*(y') = (x*y)+x
    if n == 1:
        xy, sxy = _m_implies(e)
        if not (isinstance(xy, Eq) and isinstance(sxy, Eq)):
            _fail("expected equations")
        x = _number_var(_m_var_term(xy.left))
        y = _number_var(_m_var_term(xy.right))
        if sxy != Eq(Succ(TermVar(x)), Succ(TermVar(y))):
            _fail("consequent is not x' = y'")
        return {"x": x, "y": y}
    if n == 2:
        sxy, xy = _m_implies(e)
        if not (isinstance(xy, Eq) and isinstance(sxy, Eq)):
            _fail("expected equations")
        x = _number_var(_m_var_term(xy.left))
        y = _number_var(_m_var_term(xy.right))
        if sxy != Eq(Succ(TermVar(x)), Succ(TermVar(y))):
            _fail("antecedent is not x' = y'")
        return {"x": x, "y": y}
    if n == 3:
        if not isinstance(e, Not) or not isinstance(e.body, Eq):
            _fail("expected a negated equation")
        eq = e.body
        if not isinstance(eq.left, Succ) or eq.right != ZERO:
            _fail("not ~(x' = 0)")
        x = _number_var(_m_var_term(eq.left.arg))
        return {"x": x}
    if not isinstance(e, Eq):
        _fail("expected an equation")
    if n == 4:
        if not isinstance(e.left, S.Plus) or e.left.right != ZERO:
            _fail("not x + 0 = x")
        x = _number_var(_m_var_term(e.left.left))
        if e.right != TermVar(x):
            _fail("not x + 0 = x")
        return {"x": x}
    if n == 5:
        if not (isinstance(e.left, S.Plus) and isinstance(e.left.right, Succ)):
            _fail("not x + y' on the left")
        x = _number_var(_m_var_term(e.left.left))
        y = _number_var(_m_var_term(e.left.right.arg))
        if e.right != Succ(S.Plus(TermVar(x), TermVar(y))):
            _fail("right side is not (x + y)'")
        return {"x": x, "y": y}
    if n == 6:
        if not isinstance(e.left, S.Times) or e.left.right != ZERO or e.right != ZERO:
            _fail("not x * 0 = 0")
        x = _number_var(_m_var_term(e.left.left))
        return {"x": x}
    if n == 7:
        if not (isinstance(e.left, S.Times) and isinstance(e.left.right, Succ)):
            _fail("not x * y' on the left")
        x = _number_var(_m_var_term(e.left.left))
        y = _number_var(_m_var_term(e.left.right.arg))
        if e.right != S.Plus(S.Times(TermVar(x), TermVar(y)), TermVar(x)):
            _fail("right side is not (x * y) + x")
        return {"x": x, "y": y}
    raise ValueError(n)


def _match_xind(e):
    ant, conc = _m_implies(e)
    if not isinstance(ant, And) or not isinstance(conc, ForAll):
        _fail("shape is not A(0) & all x.(A(x) -> A(x')) -> all x. A(x)")
    base, stepq = ant.left, ant.right
    if not isinstance(stepq, ForAll):
        _fail("induction step is not universally quantified")
    x = _number_var(stepq.var)
    step = stepq.body
    if not isinstance(step, Implies):
        _fail("induction step is not an implication")
    a = step.left
    if conc != ForAll(x, a):
        _fail("conclusion does not generalize the step hypothesis")
    if step.right != S.substitute(a, x, Succ(TermVar(x))):
        _fail("step conclusion is not A(x')")
    if base != S.substitute(a, x, ZERO):
        _fail("base is not A(0)")
    return {"x": x, "A": a}


def _match_xf1(e):
    if not isinstance(e, Eq) or not isinstance(e.left, FunctorApp):
        _fail("not a lambda-application equation")
    app = e.left
    if not isinstance(app.functor, Lambda):
        _fail("left side does not apply a lambda functor")
    x, body, t = app.functor.var, app.functor.body, app.arg
    if e.right != S.substitute_term(body, x, t):
        _fail("right side is not the reduced body")
    # capture check: t must be free for x in the body term
    if not S.free_for(t, x, Eq(body, ZERO)):
        _fail("argument not free for the lambda variable")
    return {"x": x, "r": body, "t": t}


def _match_xf2(e):
    ab, rest = _m_implies(e)
    if not isinstance(ab, Eq) or not isinstance(rest, Eq):
        _fail("expected equations")
    a = _number_var(_m_var_term(ab.left))
    b = _number_var(_m_var_term(ab.right))
    if a == b:
        _fail("XF2 requires distinct variables")
    left, right = rest.left, rest.right
    if not (isinstance(left, FunctorApp) and isinstance(right, FunctorApp)):
        _fail("consequent does not apply a function variable")
    if not (isinstance(left.functor, FunctorVar) and left.functor == right.functor):
        _fail("function variables disagree")
    if left.arg != TermVar(a) or right.arg != TermVar(b):
        _fail("arguments disagree with the antecedent")
    return {"a": a, "b": b, "beta": left.functor.var}


def _xf3_functor(beta: Var, x: Var, y: Var):
    two = S.numeral(2)
    three = S.numeral(3)
    inner = S.Times(FnApp("exp", (two, TermVar(x))), FnApp("exp", (three, TermVar(y))))
    return Lambda(y, FunctorApp(FunctorVar(beta), inner))


def _match_xf3(e):
    ant, conc = _m_implies(e)
    if not (isinstance(ant, ForAll) and isinstance(ant.body, Exists)):
        _fail("antecedent is not all x. ex @b. A")
    x = _number_var(ant.var)
    beta = ant.body.var
    if beta.sort is not Sort.FUNCTION:
        _fail("inner quantifier is not over a function variable")
    a = ant.body.body
    if not (isinstance(conc, Exists) and conc.var == beta and isinstance(conc.body, ForAll)
            and conc.body.var == x):
        _fail("conclusion shape is not ex @b. all x. A(...)")
    target = conc.body.body
    # discover the lambda variable by trying candidates found in the target
    candidates = []

    def collect(t):
        if isinstance(t, Lambda):
            candidates.append(t.var)
            collect_term(t.body)

    def collect_term(t):
        if isinstance(t, (Succ,)):
            collect_term(t.arg)
        elif isinstance(t, (S.Plus, S.Times)):
            collect_term(t.left)
            collect_term(t.right)
        elif isinstance(t, FnApp):
            for s in t.terms:
                collect_term(s)
            for u in t.functors:
                collect(u)
        elif isinstance(t, FunctorApp):
            collect(t.functor)
            collect_term(t.arg)

    def collect_formula(f):
        if isinstance(f, Eq):
            collect_term(f.left)
            collect_term(f.right)
        elif isinstance(f, Pred):
            for t in f.terms:
                collect_term(t)
        elif isinstance(f, (And, Or, Implies)):
            collect_formula(f.left)
            collect_formula(f.right)
        elif isinstance(f, Not):
            collect_formula(f.body)
        elif isinstance(f, (ForAll, Exists)):
            collect_formula(f.body)

    collect_formula(target)
    avoid = S.free_vars(a) | {x, beta}
    candidates.append(S.fresh_var("y", avoid))
    for y in candidates:
        if y == x or y == beta:
            continue
        u = _xf3_functor(beta, x, y)
        if S.substitute(a, beta, u) == target:
            if not S.free_for(u, beta, a):
                _fail("choice functor not free for the function variable")
            return {"x": x, "beta": beta, "y": y, "A": a}
    _fail("conclusion is not the countable-choice instance of the antecedent")


def _seq_formula(t: Term) -> Formula:
    return Eq(FnApp("sq", (t,)), ZERO)


def _bar_term(x: Var, beta: Var) -> Term:
    return FnApp("bar", (TermVar(x),), (FunctorVar(beta),))


def _ext_term(a: Var, s: Var) -> Term:
    # a * 2^{s+1}
    return FnApp("cc", (TermVar(a), FnApp("exp", (S.numeral(2), Succ(TermVar(s))))))


def _match_bi(e):
    ant, conc = _m_implies(e)
    if not isinstance(ant, And):
        _fail("antecedent is not a conjunction")
    c123, c4 = ant.left, ant.right
    if not isinstance(c123, And):
        _fail("antecedent is not a 4-way conjunction")
    c12, c3 = c123.left, c123.right
    if not isinstance(c12, And):
        _fail("antecedent is not a 4-way conjunction")
    c1, c2 = c12.left, c12.right
    # C1: all a. sq(a)=0 -> R(a) | ~R(a)
    if not isinstance(c1, ForAll):
        _fail("first conjunct is not universal")
    a = _number_var(c1.var)
    body = c1.body
    if not isinstance(body, Implies) or body.left != _seq_formula(TermVar(a)):
        _fail("first conjunct does not guard with the sequence predicate")
    if not isinstance(body.right, Or) or body.right.right != Not(body.right.left):
        _fail("first conjunct is not a decidability statement")
    r = body.right.left
    # C2: all @b. ex x. R(bar(x; @b))
    if not (isinstance(c2, ForAll) and c2.var.sort is Sort.FUNCTION and isinstance(c2.body, Exists)):
        _fail("second conjunct is not all-function/exists-number")
    beta, xv = c2.var, c2.body.var
    if c2.body.body != S.substitute(r, a, _bar_term(xv, beta)):
        _fail("second conjunct is not the bar-hitting statement for R")
    # C3: all a. sq(a)=0 & R(a) -> A(a)
    if not isinstance(c3, ForAll) or c3.var != a or not isinstance(c3.body, Implies):
        _fail("third conjunct has the wrong shape")
    if c3.body.left != And(_seq_formula(TermVar(a)), r):
        _fail("third conjunct does not restrict to barred sequence numbers")
    aa = c3.body.right
    # C4: all a. sq(a)=0 & all s. A(a*2^{s+1}) -> A(a)
    if not isinstance(c4, ForAll) or c4.var != a or not isinstance(c4.body, Implies):
        _fail("fourth conjunct has the wrong shape")
    lhs = c4.body.left
    if not isinstance(lhs, And) or lhs.left != _seq_formula(TermVar(a)):
        _fail("fourth conjunct does not guard with the sequence predicate")
    if not isinstance(lhs.right, ForAll):
        _fail("fourth conjunct lacks the successor quantifier")
    s = _number_var(lhs.right.var)
    if lhs.right.body != S.substitute(aa, a, _ext_term(a, s)):
        _fail("fourth conjunct is not backwards transmission for A")
    if c4.body.right != aa:
        _fail("fourth conjunct does not conclude A(a)")
    if conc != S.substitute(aa, a, S.numeral(1)):
        _fail("conclusion is not A(1)")
    return {"a": a, "R": r, "A": aa, "beta": beta, "x": xv, "s": s}


def _bp_query(tau: Var, t: Var, y: Var, beta: Var) -> Term:
    # tau(2^{t+1} * bar(y; beta))
    singleton = FnApp("exp", (S.numeral(2), Succ(TermVar(t))))
    return FunctorApp(FunctorVar(tau), FnApp("cc", (singleton, _bar_term(y, beta))))


def _match_bp(e):
    ant, conc = _m_implies(e)
    if not (isinstance(ant, ForAll) and ant.var.sort is Sort.FUNCTION
            and isinstance(ant.body, Exists) and ant.body.var.sort is Sort.FUNCTION):
        _fail("antecedent is not all @b. ex @c. A")
    beta, tauv = ant.var, ant.body.var
    a = ant.body.body
    if not (isinstance(conc, Exists) and conc.var.sort is Sort.FUNCTION):
        _fail("conclusion does not posit a modulus function")
    pi = conc.var
    if not (isinstance(conc.body, ForAll) and conc.body.var == beta):
        _fail("conclusion does not quantify over the same choice variable")
    body = conc.body.body
    if not isinstance(body, And):
        _fail("conclusion body is not a conjunction")
    k1, k2 = body.left, body.right
    # K1: all t. ex! y. ~(pi(2^{t+1} * bar(y;beta)) = 0)
    if not (isinstance(k1, ForAll) and isinstance(k1.body, Exists)):
        _fail("uniqueness conjunct has the wrong shape")
    t = _number_var(k1.var)
    y = _number_var(k1.body.var)
    inner = k1.body.body
    if not isinstance(inner, And):
        _fail("unique existence must expand to a conjunction")
    pos = Not(Eq(_bp_query(pi, t, y, beta), ZERO))
    if inner.left != pos:
        _fail("positivity condition differs from the canonical query")
    uniq = inner.right
    if not (isinstance(uniq, ForAll) and isinstance(uniq.body, Implies)):
        _fail("uniqueness quantifier has the wrong shape")
    w = _number_var(uniq.var)
    if uniq.body.left != Not(Eq(_bp_query(pi, t, w, beta), ZERO)):
        _fail("uniqueness hypothesis differs from the canonical query")
    if uniq.body.right != Eq(TermVar(w), TermVar(y)):
        _fail("uniqueness conclusion is not w = y")
    # K2: all @c. (all t. ex y. pi(...) = @c(t)') -> A
    if not (isinstance(k2, ForAll) and k2.var == tauv and isinstance(k2.body, Implies)):
        _fail("computation conjunct has the wrong shape")
    hyp = k2.body.left
    if not (isinstance(hyp, ForAll) and isinstance(hyp.body, Exists)):
        _fail("computation hypothesis has the wrong shape")
    t2 = _number_var(hyp.var)
    y2 = _number_var(hyp.body.var)
    if hyp.body.body != Eq(_bp_query(pi, t2, y2, beta), Succ(FunctorApp(FunctorVar(tauv), TermVar(t2)))):
        _fail("computation hypothesis is not the value equation")
    if k2.body.right != a:
        _fail("computation conjunct does not conclude A")
    return {"beta": beta, "tau": tauv, "pi": pi, "A": a, "t": t, "y": y, "w": w}


_MATCHERS = {
    "X1": _match_x1, "X2": _match_x2, "X3": _match_x3, "X4": _match_x4,
    "X5": _match_x5, "X6": _match_x6, "X7": _match_x7, "X8": _match_x8,
    "X9": _match_x9, "X10": _match_x10, "X10C": _match_x10c,
    "XE1": _match_xe1, "XE2": _match_xe2,
    "XN1": lambda e: _match_xn(1, e), "XN2": lambda e: _match_xn(2, e),
    "XN3": lambda e: _match_xn(3, e), "XN4": lambda e: _match_xn(4, e),
    "XN5": lambda e: _match_xn(5, e), "XN6": lambda e: _match_xn(6, e),
    "XN7": lambda e: _match_xn(7, e),
    "XIND": _match_xind, "XF1": _match_xf1, "XF2": _match_xf2, "XF3": _match_xf3,
    "BI": _match_bi, "BP": _match_bp,
}

_HINTED = {"X11": _match_x11, "X12": _match_x12, "X13": _match_x13, "X14": _match_x14}

ALL_SCHEMAS = tuple(_MATCHERS) + tuple(_HINTED)


def match_axiom(schema: str, e: Formula, system: Optional[SystemId] = None, hint=None):
    """Instantiation of metavariables making e an instance of the schema, or None.

    Side conditions (free-for, distinctness, primeness) are enforced here.
    """
    try:
        return match_axiom_explain(schema, e, system, hint)[0]
    except _NoMatch:
        return None


def match_axiom_explain(schema: str, e: Formula, system: Optional[SystemId] = None, hint=None):
    """Like match_axiom but raises _NoMatch with the first structural mismatch."""
    key = schema.upper()
    if key == "XE3":
        return _match_xe3(e, system), None
    if key in _HINTED:
        return _HINTED[key](e, hint), None
    if key in _MATCHERS:
        return _MATCHERS[key](e), None
    raise ValueError(f"unknown axiom schema {schema}")


# ---------------------------------------------------------------------------
# Derivation checking

_DEF_AXIOM_CACHE: dict[tuple[str, int], Formula] = {}


def defining_axiom(fn: str, index: int) -> Formula:
    entry = S.CATALOG.get(fn)
    if entry is None:
        raise ValueError(f"unknown function constant {fn}")
    if not (0 <= index < len(entry.axioms)):
        raise ValueError(f"{entry.name} has no defining axiom #{index}")
    key = (entry.name, index)
    if key not in _DEF_AXIOM_CACHE:
        _DEF_AXIOM_CACHE[key] = S.parse_formula(entry.axioms[index])
    return _DEF_AXIOM_CACHE[key]


def check_derivation(d: Derivation) -> Verdict:
    """Accepted iff every step is a legal axiom instance, hypothesis or rule application."""
    profile = SYSTEM_PROFILE[d.system]
    axioms = SYSTEM_AXIOMS[d.system]
    rules = SYSTEM_RULES[d.system]
    hyp_free = set()
    for h in d.hyps:
        hyp_free |= S.free_vars(h)

    def reject(i: int, reason: str) -> Verdict:
        return Verdict(False, i + 1, reason)

    for h in d.hyps:
        try:
            S.validate(h, profile)
        except (S.ProfileError, S.ArityError) as exc:
            return Verdict(False, 0, f"hypothesis outside the language: {exc}")

    for i, step in enumerate(d.steps):
        f, j = step.formula, step.just
        try:
            S.validate(f, profile)
        except (S.ProfileError, S.ArityError) as exc:
            return reject(i, f"formula outside the language: {exc}")

        if isinstance(j, AxiomStep):
            key = j.schema.upper()
            if key not in axioms:
                return reject(i, f"schema {j.schema} is not an axiom of {d.system.value}")
            try:
                match_axiom_explain(key, f, d.system, j.hint)
            except _NoMatch as exc:
                return reject(i, f"not an instance of {j.schema}: {exc}")
        elif isinstance(j, HypStep):
            if not (0 <= j.index < len(d.hyps)):
                return reject(i, f"hypothesis {j.index + 1} does not exist")
            if d.hyps[j.index] != f:
                return reject(i, f"formula differs from hypothesis {j.index + 1}")
        elif isinstance(j, DefStep):
            if d.system not in _DEF_SYSTEMS:
                return reject(i, f"defining axioms are not available in {d.system.value}")
            try:
                ax = defining_axiom(j.fn, j.index)
            except ValueError as exc:
                return reject(i, str(exc))
            if f != ax:
                return reject(i, f"formula differs from the stored defining axiom of {j.fn}")
        elif isinstance(j, RuleStep):
            if j.rule not in rules:
                return reject(i, f"rule {j.rule} is not available in {d.system.value}")
            if any(p < 0 or p >= i for p in j.premises):
                return reject(i, "rule premise is not an earlier step")
            if j.rule == "mp":
                if len(j.premises) != 2:
                    return reject(i, "mp takes two premises")
                minor = d.steps[j.premises[0]].formula
                major = d.steps[j.premises[1]].formula
                if major != Implies(minor, f):
                    return reject(i, "major premise is not minor -> conclusion")
            else:
                if len(j.premises) != 1:
                    return reject(i, f"{j.rule} takes one premise")
                prem = d.steps[j.premises[0]].formula
                want_fun = j.rule in ("r4", "r5")
                if j.rule in ("r2", "r4"):
                    if not (isinstance(f, Implies) and isinstance(f.right, ForAll)):
                        return reject(i, f"{j.rule} must conclude C -> all x. A")
                    c, x, a = f.left, f.right.var, f.right.body
                    if prem != Implies(c, a):
                        return reject(i, "premise is not C -> A(x)")
                else:
                    if not (isinstance(f, Implies) and isinstance(f.left, Exists)):
                        return reject(i, f"{j.rule} must conclude ex x. A -> C")
                    c, x, a = f.right, f.left.var, f.left.body
                    if prem != Implies(a, c):
                        return reject(i, "premise is not A(x) -> C")
                if want_fun and x.sort is not Sort.FUNCTION:
                    return reject(i, f"{j.rule} generalizes a function variable")
                if not want_fun and x.sort is not Sort.NUMBER:
                    return reject(i, f"{j.rule} generalizes a number variable")
                if x in S.free_vars(c):
                    return reject(i, f"variable {x} occurs free in the side formula")
                if d.hyps and x in hyp_free:
                    return reject(i, f"variable {x} occurs free in the hypotheses")
        else:
            return reject(i, f"unknown justification {j!r}")
    if not d.steps:
        return Verdict(False, None, "empty derivation")
    return ACCEPTED


# ---------------------------------------------------------------------------
# Almost-negative test (for ECT0 and the r-translation)

def quantifier_free(f: Formula) -> bool:
    if isinstance(f, (Eq, Pred)):
        return True
    if isinstance(f, (And, Or, Implies)):
        return quantifier_free(f.left) and quantifier_free(f.right)
    if isinstance(f, Not):
        return quantifier_free(f.body)
    return False


def almost_negative(f: Formula) -> bool:
    """No disjunction, and existentials only immediately in front of quantifier-free formulas."""
    if isinstance(f, (Eq, Pred)):
        return True
    if isinstance(f, Or):
        return False
    if isinstance(f, (And, Implies)):
        return almost_negative(f.left) and almost_negative(f.right)
    if isinstance(f, Not):
        return almost_negative(f.body)
    if isinstance(f, ForAll):
        return almost_negative(f.body)
    if isinstance(f, Exists):
        return quantifier_free(f.body)
    raise TypeError(f)


# ---------------------------------------------------------------------------
# Schema constructors

def make_schema(kind: str, **params) -> Formula:
    """Closed-form instance of XInd / CT0 / ECT0 / MP / BI / BP."""
    kind = kind.upper()
    if kind == "XIND":
        return make_xind(params["A"], params["x"])
    if kind == "CT0":
        return make_ct0(params["A"], params["x"], params["y"])
    if kind == "ECT0":
        return make_ect0(params["A"], params["B"], params["x"], params["y"])
    if kind == "MP":
        return make_mp(params["A"], params["x"])
    if kind == "BI":
        return make_bi(params["R"], params["a"], params["A"])
    if kind == "BP":
        return make_bp(params["A"], params["beta"], params["tau"])
    raise ValueError(f"unknown schema kind {kind}")


def make_xind(a: Formula, x: Var) -> Formula:
    base = S.substitute(a, x, ZERO)
    step = ForAll(x, Implies(a, S.substitute(a, x, Succ(TermVar(x)))))
    return Implies(And(base, step), ForAll(x, a))


def _t_u_parts(e: Var, x: Var, w: Var, z: Var):
    t = Eq(FnApp("trc", (TermVar(e), TermVar(x), TermVar(w))), ZERO)
    u = Eq(FnApp("uot", (TermVar(w),)), TermVar(z))
    return t, u


def make_ct0(a: Formula, x: Var, y: Var) -> Formula:
    avoid = S.free_vars(a) | {x, y}
    e = S.fresh_var("e", avoid)
    w = S.fresh_var("w", avoid | {e})
    z = S.fresh_var("z", avoid | {e, w})
    t, u = _t_u_parts(e, x, w, z)
    a_of_uw = ForAll(z, Implies(u, S.substitute(a, y, TermVar(z))))
    return Implies(
        ForAll(x, Exists(y, a)),
        Exists(e, ForAll(x, Exists(w, And(t, a_of_uw)))),
    )


def make_ect0(a: Formula, b: Formula, x: Var, y: Var) -> Formula:
    if not almost_negative(a):
        raise ValueError("ECT0 requires an almost negative hypothesis")
    avoid = S.free_vars(a) | S.free_vars(b) | {x, y}
    e = S.fresh_var("e", avoid)
    w = S.fresh_var("w", avoid | {e})
    z = S.fresh_var("z", avoid | {e, w})
    t, u = _t_u_parts(e, x, w, z)
    b_of_uw = ForAll(z, Implies(u, S.substitute(b, y, TermVar(z))))
    return Implies(
        ForAll(x, Implies(a, Exists(y, b))),
        Exists(e, ForAll(x, Implies(a, Exists(w, And(t, b_of_uw))))),
    )


def make_mp(a: Formula, x: Var) -> Formula:
    return Implies(
        ForAll(x, Or(a, Not(a))),
        Implies(Not(ForAll(x, Not(a))), Exists(x, a)),
    )


def make_bi(r: Formula, a: Var, aa: Formula) -> Formula:
    avoid = S.free_vars(r) | S.free_vars(aa) | {a}
    beta = S.fresh_var("b", avoid, Sort.FUNCTION)
    xv = S.fresh_var("x", avoid)
    s = S.fresh_var("s", avoid | {xv})
    c1 = ForAll(a, Implies(_seq_formula(TermVar(a)), Or(r, Not(r))))
    c2 = ForAll(beta, Exists(xv, S.substitute(r, a, _bar_term(xv, beta))))
    c3 = ForAll(a, Implies(And(_seq_formula(TermVar(a)), r), aa))
    c4 = ForAll(
        a,
        Implies(
            And(_seq_formula(TermVar(a)), ForAll(s, S.substitute(aa, a, _ext_term(a, s)))),
            aa,
        ),
    )
    return Implies(And(And(And(c1, c2), c3), c4), S.substitute(aa, a, S.numeral(1)))


def make_bp(a: Formula, beta: Var, tau: Var) -> Formula:
    if beta.sort is not Sort.FUNCTION or tau.sort is not Sort.FUNCTION:
        raise ValueError("BP parameters must be function variables")
    avoid = S.free_vars(a) | {beta, tau}
    pi = S.fresh_var("q", avoid, Sort.FUNCTION)
    t = S.fresh_var("t", avoid)
    y = S.fresh_var("y", avoid | {t})
    w = S.fresh_var("w", avoid | {t, y})
    pos_y = Not(Eq(_bp_query(pi, t, y, beta), ZERO))
    pos_w = Not(Eq(_bp_query(pi, t, w, beta), ZERO))
    k1 = ForAll(t, Exists(y, And(pos_y, ForAll(w, Implies(pos_w, Eq(TermVar(w), TermVar(y)))))))
    value_eq = Eq(_bp_query(pi, t, y, beta), Succ(FunctorApp(FunctorVar(tau), TermVar(t))))
    k2 = ForAll(tau, Implies(ForAll(t, Exists(y, value_eq)), a))
    return Implies(
        ForAll(beta, Exists(tau, a)),
        Exists(pi, ForAll(beta, And(k1, k2))),
    )


# ---------------------------------------------------------------------------
# Proof file format

def parse_justification(text: str):
    toks = text.strip().split()
    if not toks:
        raise ValueError("empty justification")
    head = toks[0]
    lower = head.lower()
    if lower == "hyp":
        return HypStep(int(toks[1]) - 1)
    if lower == "mp":
        return RuleStep("mp", (int(toks[1]) - 1, int(toks[2]) - 1))
    if lower in ("r2", "r3", "r4", "r5"):
        return RuleStep(lower, (int(toks[1]) - 1,))
    if lower == "def":
        return DefStep(toks[1], int(toks[2]))
    # axiom, possibly with a hint like X11[t:=y] or X13[u:=@b]
    hint = None
    name = head
    if "[" in head:
        name, rest = head.split("[", 1)
        if not rest.endswith("]"):
            raise ValueError(f"malformed hint in {text!r}")
        inner = rest[:-1]
        if ":=" not in inner:
            raise ValueError(f"malformed hint in {text!r}")
        kind, value = inner.split(":=", 1)
        kind = kind.strip()
        if kind == "u":
            hint = S._Parser(value.strip())._functor()
        else:
            hint = S.parse_term(value.strip())
    key = name.upper()
    if key not in set(ALL_SCHEMAS):
        raise ValueError(f"unknown justification {text!r}")
    return AxiomStep(key, hint)


def format_justification(j: Justification) -> str:
    if isinstance(j, HypStep):
        return f"hyp {j.index + 1}"
    if isinstance(j, RuleStep):
        return f"{j.rule} {' '.join(str(p + 1) for p in j.premises)}"
    if isinstance(j, DefStep):
        return f"def {j.fn} {j.index}"
    if isinstance(j, AxiomStep):
        pretty = {"X10C": "X10c", "XIND": "XInd"}.get(j.schema, j.schema)
        if j.hint is not None:
            if isinstance(j.hint, (FunctorVar, S.FnConstFunctor, Lambda)):
                return f"{pretty}[u:={S.format_functor(j.hint)}]"
            return f"{pretty}[t:={S.format_term(j.hint)}]"
        return pretty
    raise TypeError(j)


def parse_proof_text(text: str) -> Derivation:
    """Parse the line-oriented proof format (header, hyp lines, numbered steps)."""
    system = None
    hyps: list[Formula] = []
    steps: list[Step] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.lower().startswith("system:"):
            system = system_from_name(line.split(":", 1)[1])
            continue
        if system is None:
            raise ValueError(f"line {lineno}: proof must start with a system header")
        profile = SYSTEM_PROFILE[system]
        if line.lower().startswith("hyp:"):
            hyps.append(S.parse_formula(line.split(":", 1)[1], profile))
            continue
        if "." not in line or ";" not in line:
            raise ValueError(f"line {lineno}: expected 'n. formula ; justification'")
        num, rest = line.split(".", 1)
        try:
            n = int(num.strip())
        except ValueError:
            raise ValueError(f"line {lineno}: bad step number {num!r}")
        if n != len(steps) + 1:
            raise ValueError(f"line {lineno}: step number {n} out of order")
        ftext, jtext = rest.rsplit(";", 1)
        formula = S.parse_formula(ftext.strip(), profile)
        steps.append(Step(formula, parse_justification(jtext)))
    if system is None:
        raise ValueError("missing system header")
    return Derivation(system, tuple(hyps), tuple(steps))


def format_proof_text(d: Derivation) -> str:
    out = [f"system: {d.system.value}"]
    for h in d.hyps:
        out.append(f"hyp: {S.format_formula(h)}")
    for i, step in enumerate(d.steps, 1):
        out.append(f"{i}. {S.format_formula(step.formula)} ; {format_justification(step.just)}")
    return "\n".join(out) + "\n"


def load_proof_file(path) -> Derivation:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_proof_text(fh.read())
