"""Two-sorted abstract syntax shared by all the supported systems.

Terms denote naturals, functors denote total functions from naturals to
naturals.  One AST serves every system; a LanguageProfile gates which
constructors a given system's language actually admits.

Concrete grammar (ASCII, UTF-8 files):

    formulas   ~A   A & B   A | B   A -> B   A <-> B   all x. A   ex x. A
               all @b. A   ex @b. A   P3(t1,...,tn)   s = t
    terms      0   x   t'   s + t   s * t   f4(t1,...;u1,...)   @b(t)   (\\x. t)(s)
    functors   @b   f<i>        (unary, no function args)   \\x. t

Negation, quantifiers and lambda bind tightest; & binds tighter than |,
both tighter than ->; -> associates to the right; ' binds tighter than *
which binds tighter than +.  <-> is expanded at parse time.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional, Union

from . import seqnum


class Sort(Enum):
    NUMBER = "number"
    FUNCTION = "function"


class AstNode:
    """Structural equality with a cached hash (ASTs are compared and hashed heavily)."""

    _fieldnames: tuple[str, ...] = ()

    def __init_subclass__(cls, **kw):
        super().__init_subclass__(**kw)

    @classmethod
    def _names(cls):
        names = cls.__dict__.get("_resolved_fieldnames")
        if names is None:
            names = tuple(f.name for f in dataclasses.fields(cls))
            cls._resolved_fieldnames = names
        return names

    def __hash__(self):
        h = self.__dict__.get("_hash")
        if h is None:
            d = self.__dict__
            h = hash((self.__class__,) + tuple(d[n] for n in self._names()))
            object.__setattr__(self, "_hash", h)
        return h

    def __eq__(self, other):
        if self is other:
            return True
        if self.__class__ is not other.__class__:
            return False
        if hash(self) != hash(other):
            return False
        sd, od = self.__dict__, other.__dict__
        return all(sd[n] == od[n] for n in self._names())

    def __ne__(self, other):
        return not self.__eq__(other)


@dataclass(frozen=True, eq=False)
class Var(AstNode):
    name: str
    sort: Sort = Sort.NUMBER

    def __post_init__(self):
        if not self.name:
            raise ValueError("variable name must be nonempty")

    def __repr__(self):
        return f"@{self.name}" if self.sort is Sort.FUNCTION else self.name


def funvar(name: str) -> Var:
    return Var(name, Sort.FUNCTION)


# ---------------------------------------------------------------------------
# Terms and functors (simultaneous induction)

@dataclass(frozen=True, eq=False)
class TermVar(AstNode):
    var: Var  # number sort


@dataclass(frozen=True, eq=False)
class Zero(AstNode):
    pass


@dataclass(frozen=True, eq=False)
class Succ(AstNode):
    arg: "Term"


@dataclass(frozen=True, eq=False)
class Plus(AstNode):
    left: "Term"
    right: "Term"


@dataclass(frozen=True, eq=False)
class Times(AstNode):
    left: "Term"
    right: "Term"


@dataclass(frozen=True, eq=False)
class FnApp(AstNode):
    """Application of a catalog function constant to number and function arguments."""

    fn: str
    terms: tuple["Term", ...] = ()
    functors: tuple["Functor", ...] = ()


@dataclass(frozen=True, eq=False)
class FunctorApp(AstNode):
    """A functor applied to a number term, e.g. @b(t) or (\\x. t)(s)."""

    functor: "Functor"
    arg: "Term"


@dataclass(frozen=True, eq=False)
class FunctorVar(AstNode):
    var: Var  # function sort


@dataclass(frozen=True, eq=False)
class FnConstFunctor(AstNode):
    """A unary number->number catalog constant used as a functor."""

    fn: str


@dataclass(frozen=True, eq=False)
class Lambda(AstNode):
    var: Var  # number sort, bound
    body: "Term"


Term = Union[TermVar, Zero, Succ, Plus, Times, FnApp, FunctorApp]
Functor = Union[FunctorVar, FnConstFunctor, Lambda]

ZERO = Zero()


# ---------------------------------------------------------------------------
# Formulas

@dataclass(frozen=True, eq=False)
class Eq(AstNode):
    left: Term
    right: Term


@dataclass(frozen=True, eq=False)
class Pred(AstNode):
    name: str
    terms: tuple[Term, ...] = ()


@dataclass(frozen=True, eq=False)
class And(AstNode):
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True, eq=False)
class Or(AstNode):
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True, eq=False)
class Implies(AstNode):
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True, eq=False)
class Not(AstNode):
    body: "Formula"


@dataclass(frozen=True, eq=False)
class ForAll(AstNode):
    var: Var
    body: "Formula"


@dataclass(frozen=True, eq=False)
class Exists(AstNode):
    var: Var
    body: "Formula"


Formula = Union[Eq, Pred, And, Or, Implies, Not, ForAll, Exists]


def iff(a: Formula, b: Formula) -> Formula:
    """A <-> B is an abbreviation for (A -> B) & (B -> A)."""
    return And(Implies(a, b), Implies(b, a))


def is_prime_formula(f: Formula) -> bool:
    return isinstance(f, (Eq, Pred))


# ---------------------------------------------------------------------------
# Language profiles

class SyntaxError_(Exception):
    """Parse failure, with position information in the message."""


class SortError(Exception):
    pass


class ArityError(Exception):
    pass


class ProfileError(Exception):
    """Formula uses constructors outside the profile's language."""


@dataclass(frozen=True)
class FnConst:
    """Catalog entry: name, index, arities, semantics and defining axioms.

    `fn` takes (number-args tuple, function-args tuple of callables) -> natural.
    Defining axioms are stored lazily as formula text to avoid forward references.
    """

    name: str
    index: int
    k: int  # number arguments
    l: int  # function arguments
    fn: Callable
    axioms: tuple[str, ...] = ()


def _prf_pd(ts, fs):
    return ts[0] - 1 if ts[0] > 0 else 0


def _prf_rm(ts, fs):
    x, y = ts
    return x if y == 0 else x % y


def _prf_qt(ts, fs):
    x, y = ts
    return 0 if y == 0 else x // y


def _prf_exp(ts, fs):
    return ts[0] ** ts[1]


def _prf_pri(ts, fs):
    return seqnum.prime(ts[0])


def _prf_lh(ts, fs):
    return seqnum.seq_lh(ts[0])


def _prf_pj(ts, fs):
    return seqnum.proj(ts[0], ts[1])


def _prf_cc(ts, fs):
    return seqnum.seq_concat(ts[0], ts[1])


def _prf_sq(ts, fs):
    return 0 if seqnum.is_seq(ts[0]) else 1


def _prf_bar(ts, fs):
    x = ts[0]
    alpha = fs[0]
    return seqnum.seq_encode([alpha(i) for i in range(x)])


def _needs_recfun(name):
    def fail(ts, fs):
        raise RuntimeError(f"semantics of {name} are installed by the recfun module")

    return fail


CATALOG: dict[str, FnConst] = {}


def _register(entry: FnConst):
    CATALOG[entry.name] = entry
    CATALOG[f"f{entry.index}"] = entry


for _e in [
    FnConst("pd", 4, 1, 0, _prf_pd, ("f4(0) = 0", "f4(x') = x")),
    FnConst("rm", 5, 2, 0, _prf_rm, ("f5(0,y) = 0", "f5(x,0) = x")),
    FnConst("qt", 6, 2, 0, _prf_qt, ("f6(0,y) = 0", "f6(x,0) = 0")),
    FnConst("exp", 7, 2, 0, _prf_exp, ("f7(x,0) = 0'", "f7(x,y') = f7(x,y) * x")),
    FnConst("pri", 8, 1, 0, _prf_pri, ("f8(0) = 0''",)),
    FnConst("lh", 9, 1, 0, _prf_lh, ("f9(0') = 0",)),
    FnConst("pj", 10, 2, 0, _prf_pj, ("f10(0,y) = 0",)),
    FnConst("cc", 11, 2, 0, _prf_cc, ("f11(x,0') = x",)),
    FnConst("sq", 12, 1, 0, _prf_sq, ("f12(0') = 0",)),
    FnConst("trc", 13, 3, 0, _needs_recfun("trc"), ()),
    FnConst("uot", 14, 1, 0, _needs_recfun("uot"), ()),
    FnConst(
        "bar",
        15,
        1,
        1,
        _prf_bar,
        ("f15(0; @b) = 0'", "f15(x'; @b) = f11(f15(x; @b), f7(0'', (@b(x))'))"),
    ),
]:
    _register(_e)


def install_semantics(name: str, fn: Callable) -> None:
    """Late-bind semantics for catalog constants that depend on other modules."""
    entry = CATALOG[name]
    object.__setattr__(entry, "fn", fn)


@dataclass(frozen=True)
class LanguageProfile:
    name: str
    predicates: bool  # predicate letters allowed
    equality: bool
    arithmetic: bool  # 0, ', +, * constructors
    sorts: frozenset[Sort]
    catalog: tuple[str, ...] = ()  # catalog names admitted

    def has_fn(self, fn: str) -> bool:
        return fn in self.catalog or (fn in CATALOG and CATALOG[fn].name in self.catalog)


PROFILE_PP = LanguageProfile("Pp", True, False, False, frozenset(), ())
PROFILE_PD = LanguageProfile("Pd", True, False, False, frozenset({Sort.NUMBER}), ())
PROFILE_PDEQ = LanguageProfile("Pd[=]", True, True, False, frozenset({Sort.NUMBER}), ())
PROFILE_HA = LanguageProfile("HA", False, True, True, frozenset({Sort.NUMBER}), ())
PROFILE_HAX = LanguageProfile(
    "HA+", False, True, True, frozenset({Sort.NUMBER}), ("pj", "trc", "uot")
)
PROFILE_FIM = LanguageProfile(
    "FIM",
    False,
    True,
    True,
    frozenset({Sort.NUMBER, Sort.FUNCTION}),
    ("pd", "rm", "qt", "exp", "pri", "lh", "pj", "cc", "sq", "bar"),
)


# ---------------------------------------------------------------------------
# Free variables, substitution, free-for

def _fv_term(t: Term, out: set, bound: frozenset):
    if isinstance(t, TermVar):
        if t.var not in bound:
            out.add(t.var)
    elif isinstance(t, Succ):
        _fv_term(t.arg, out, bound)
    elif isinstance(t, (Plus, Times)):
        _fv_term(t.left, out, bound)
        _fv_term(t.right, out, bound)
    elif isinstance(t, FnApp):
        for s in t.terms:
            _fv_term(s, out, bound)
        for u in t.functors:
            _fv_functor(u, out, bound)
    elif isinstance(t, FunctorApp):
        _fv_functor(t.functor, out, bound)
        _fv_term(t.arg, out, bound)


def _fv_functor(u: Functor, out: set, bound: frozenset):
    if isinstance(u, FunctorVar):
        if u.var not in bound:
            out.add(u.var)
    elif isinstance(u, Lambda):
        _fv_term(u.body, out, bound | {u.var})


def _fv_formula(f: Formula, out: set, bound: frozenset):
    if isinstance(f, Eq):
        _fv_term(f.left, out, bound)
        _fv_term(f.right, out, bound)
    elif isinstance(f, Pred):
        for t in f.terms:
            _fv_term(t, out, bound)
    elif isinstance(f, (And, Or, Implies)):
        _fv_formula(f.left, out, bound)
        _fv_formula(f.right, out, bound)
    elif isinstance(f, Not):
        _fv_formula(f.body, out, bound)
    elif isinstance(f, (ForAll, Exists)):
        _fv_formula(f.body, out, bound | {f.var})


def free_vars(x) -> set[Var]:
    """Free variables of a formula, term or functor (lambda binds its number variable)."""
    out: set[Var] = set()
    if isinstance(x, (Eq, Pred, And, Or, Implies, Not, ForAll, Exists)):
        _fv_formula(x, out, frozenset())
    elif isinstance(x, (FunctorVar, FnConstFunctor, Lambda)):
        _fv_functor(x, out, frozenset())
    else:
        _fv_term(x, out, frozenset())
    return out


def closed(x) -> bool:
    return not free_vars(x)


def all_vars(x) -> set[Var]:
    """Every variable occurring anywhere (free, bound, or as a binder)."""
    out: set[Var] = set()

    def ft(t):
        if isinstance(t, TermVar):
            out.add(t.var)
        elif isinstance(t, Succ):
            ft(t.arg)
        elif isinstance(t, (Plus, Times)):
            ft(t.left)
            ft(t.right)
        elif isinstance(t, FnApp):
            for s in t.terms:
                ft(s)
            for u in t.functors:
                ff(u)
        elif isinstance(t, FunctorApp):
            ff(t.functor)
            ft(t.arg)

    def ff(u):
        if isinstance(u, FunctorVar):
            out.add(u.var)
        elif isinstance(u, Lambda):
            out.add(u.var)
            ft(u.body)

    def fm(f):
        if isinstance(f, Eq):
            ft(f.left)
            ft(f.right)
        elif isinstance(f, Pred):
            for t in f.terms:
                ft(t)
        elif isinstance(f, (And, Or, Implies)):
            fm(f.left)
            fm(f.right)
        elif isinstance(f, Not):
            fm(f.body)
        elif isinstance(f, (ForAll, Exists)):
            out.add(f.var)
            fm(f.body)

    if isinstance(x, (Eq, Pred, And, Or, Implies, Not, ForAll, Exists)):
        fm(x)
    elif isinstance(x, (FunctorVar, FnConstFunctor, Lambda)):
        ff(x)
    else:
        ft(x)
    return out


def _subst_term(t: Term, x: Var, r) -> Term:
    if isinstance(t, TermVar):
        if t.var == x:
            return r  # r is a Term (number sort substitution)
        return t
    if isinstance(t, Zero):
        return t
    if isinstance(t, Succ):
        return Succ(_subst_term(t.arg, x, r))
    if isinstance(t, Plus):
        return Plus(_subst_term(t.left, x, r), _subst_term(t.right, x, r))
    if isinstance(t, Times):
        return Times(_subst_term(t.left, x, r), _subst_term(t.right, x, r))
    if isinstance(t, FnApp):
        return FnApp(
            t.fn,
            tuple(_subst_term(s, x, r) for s in t.terms),
            tuple(_subst_functor(u, x, r) for u in t.functors),
        )
    if isinstance(t, FunctorApp):
        return FunctorApp(_subst_functor(t.functor, x, r), _subst_term(t.arg, x, r))
    raise TypeError(t)


def _subst_functor(u: Functor, x: Var, r) -> Functor:
    if isinstance(u, FunctorVar):
        if u.var == x:
            return r  # r is a Functor (function sort substitution)
        return u
    if isinstance(u, FnConstFunctor):
        return u
    if isinstance(u, Lambda):
        if u.var == x:
            return u
        return Lambda(u.var, _subst_term(u.body, x, r))
    raise TypeError(u)


def substitute(f: Formula, x: Var, r) -> Formula:
    """Replace every free occurrence of x in f by r (a Term or Functor matching x's sort).

    Capture is not repaired here; free_for detects it.
    """
    if isinstance(r, (FunctorVar, FnConstFunctor, Lambda)):
        if x.sort is not Sort.FUNCTION:
            raise SortError(f"substituting functor for number variable {x}")
    elif x.sort is not Sort.NUMBER:
        raise SortError(f"substituting term for function variable {x}")
    return _subst_formula(f, x, r)


def _subst_formula(f: Formula, x: Var, r) -> Formula:
    if isinstance(f, Eq):
        return Eq(_subst_term(f.left, x, r), _subst_term(f.right, x, r))
    if isinstance(f, Pred):
        return Pred(f.name, tuple(_subst_term(t, x, r) for t in f.terms))
    if isinstance(f, And):
        return And(_subst_formula(f.left, x, r), _subst_formula(f.right, x, r))
    if isinstance(f, Or):
        return Or(_subst_formula(f.left, x, r), _subst_formula(f.right, x, r))
    if isinstance(f, Implies):
        return Implies(_subst_formula(f.left, x, r), _subst_formula(f.right, x, r))
    if isinstance(f, Not):
        return Not(_subst_formula(f.body, x, r))
    if isinstance(f, (ForAll, Exists)):
        if f.var == x:
            return f
        cls = type(f)
        return cls(f.var, _subst_formula(f.body, x, r))
    raise TypeError(f)


def substitute_term(t: Term, x: Var, r) -> Term:
    return _subst_term(t, x, r)


def free_for(r, x: Var, f: Formula) -> bool:
    """True iff no free variable of r becomes bound when r replaces free x in f."""
    rv = free_vars(r)
    if not rv:
        return True

    # lambda binders inside prime formulas also capture
    def prime_ok(g: Formula, binders: frozenset) -> bool:
        def twalk(t, bs) -> bool:
            if isinstance(t, TermVar):
                return t.var != x or not (rv & bs)
            if isinstance(t, (Zero,)):
                return True
            if isinstance(t, Succ):
                return twalk(t.arg, bs)
            if isinstance(t, (Plus, Times)):
                return twalk(t.left, bs) and twalk(t.right, bs)
            if isinstance(t, FnApp):
                return all(twalk(s, bs) for s in t.terms) and all(fwalk(u, bs) for u in t.functors)
            if isinstance(t, FunctorApp):
                return fwalk(t.functor, bs) and twalk(t.arg, bs)
            raise TypeError(t)

        def fwalk(u, bs) -> bool:
            if isinstance(u, FunctorVar):
                return u.var != x or not (rv & bs)
            if isinstance(u, FnConstFunctor):
                return True
            if isinstance(u, Lambda):
                if u.var == x:
                    return True
                return twalk(u.body, bs | {u.var})
            raise TypeError(u)

        if isinstance(g, Eq):
            return twalk(g.left, binders) and twalk(g.right, binders)
        return all(twalk(t, binders) for t in g.terms)

    def walk(g: Formula, binders: frozenset) -> bool:
        if isinstance(g, (Eq, Pred)):
            return prime_ok(g, binders)
        if isinstance(g, (And, Or, Implies)):
            return walk(g.left, binders) and walk(g.right, binders)
        if isinstance(g, Not):
            return walk(g.body, binders)
        if isinstance(g, (ForAll, Exists)):
            if g.var == x:
                return True
            return walk(g.body, binders | {g.var})
        raise TypeError(g)

    return walk(f, frozenset())


def fresh_var(base: str, avoid: set[Var], sort: Sort = Sort.NUMBER) -> Var:
    """A variable named after `base` not clashing with anything in `avoid`."""
    names = {v.name for v in avoid}
    if base not in names:
        return Var(base, sort)
    i = 0
    while f"{base}{i}" in names:
        i += 1
    return Var(f"{base}{i}", sort)


# ---------------------------------------------------------------------------
# Numerals and evaluation

def numeral(n: int) -> Term:
    t: Term = ZERO
    for _ in range(n):
        t = Succ(t)
    return t


def numeral_value(t: Term) -> Optional[int]:
    """n if t is the numeral for n, else None."""
    n = 0
    while isinstance(t, Succ):
        n += 1
        t = t.arg
    return n if isinstance(t, Zero) else None


class NonClosedError(Exception):
    pass


def eval_term(t: Term, env: dict[Var, object] | None = None) -> int:
    """Value of a term; env maps number vars to ints and function vars to callables."""
    env = env or {}

    def ev(t: Term) -> int:
        if isinstance(t, Zero):
            return 0
        if isinstance(t, TermVar):
            if t.var not in env:
                raise NonClosedError(f"unbound variable {t.var}")
            return env[t.var]  # type: ignore[return-value]
        if isinstance(t, Succ):
            return ev(t.arg) + 1
        if isinstance(t, Plus):
            return ev(t.left) + ev(t.right)
        if isinstance(t, Times):
            return ev(t.left) * ev(t.right)
        if isinstance(t, FnApp):
            entry = CATALOG.get(t.fn)
            if entry is None:
                raise ProfileError(f"unknown function constant {t.fn}")
            ts = tuple(ev(s) for s in t.terms)
            fs = tuple(evf(u) for u in t.functors)
            return entry.fn(ts, fs)
        if isinstance(t, FunctorApp):
            return evf(t.functor)(ev(t.arg))
        raise TypeError(t)

    def evf(u: Functor) -> Callable[[int], int]:
        if isinstance(u, FunctorVar):
            if u.var not in env:
                raise NonClosedError(f"unbound function variable {u.var}")
            return env[u.var]  # type: ignore[return-value]
        if isinstance(u, FnConstFunctor):
            entry = CATALOG[u.fn]
            return lambda n: entry.fn((n,), ())
        if isinstance(u, Lambda):
            return lambda n: eval_term(u.body, {**env, u.var: n})
        raise TypeError(u)

    return ev(t)


def eval_closed_term(t: Term) -> int:
    """Value of a closed term under the intended interpretation (XN4-XN7 and catalog)."""
    if free_vars(t):
        raise NonClosedError(f"term has free variables: {free_vars(t)}")
    return eval_term(t, {})


def eval_formula(f: Formula, env: dict[Var, object] | None = None) -> bool:
    """Classical truth of a quantifier-free formula under env (used for prime checks)."""
    if isinstance(f, Eq):
        return eval_term(f.left, env) == eval_term(f.right, env)
    if isinstance(f, And):
        return eval_formula(f.left, env) and eval_formula(f.right, env)
    if isinstance(f, Or):
        return eval_formula(f.left, env) or eval_formula(f.right, env)
    if isinstance(f, Implies):
        return (not eval_formula(f.left, env)) or eval_formula(f.right, env)
    if isinstance(f, Not):
        return not eval_formula(f.body, env)
    raise ValueError(f"cannot evaluate {type(f).__name__} by truth tables")


# ---------------------------------------------------------------------------
# Printing

_TERM_ATOM, _TERM_MUL, _TERM_ADD = 0, 1, 2


def format_term(t: Term) -> str:
    def fmt(t: Term, ctx: int) -> str:
        if isinstance(t, Zero):
            return "0"
        if isinstance(t, TermVar):
            return t.var.name
        if isinstance(t, Succ):
            return fmt(t.arg, _TERM_ATOM) + "'"
        if isinstance(t, Plus):
            s = f"{fmt(t.left, _TERM_ADD)} + {fmt(t.right, _TERM_MUL)}"
            return f"({s})" if ctx < _TERM_ADD else s
        if isinstance(t, Times):
            s = f"{fmt(t.left, _TERM_MUL)} * {fmt(t.right, _TERM_ATOM)}"
            return f"({s})" if ctx < _TERM_MUL else s
        if isinstance(t, FnApp):
            entry = CATALOG[t.fn]
            args = ",".join(fmt(s, _TERM_ADD) for s in t.terms)
            if t.functors:
                fargs = ",".join(format_functor(u) for u in t.functors)
                return f"f{entry.index}({args}; {fargs})"
            return f"f{entry.index}({args})"
        if isinstance(t, FunctorApp):
            if isinstance(t.functor, FunctorVar):
                head = f"@{t.functor.var.name}"
            elif isinstance(t.functor, FnConstFunctor):
                head = f"f{CATALOG[t.functor.fn].index}"
            else:
                head = f"({format_functor(t.functor)})"
            return f"{head}({fmt(t.arg, _TERM_ADD)})"
        raise TypeError(t)

    return fmt(t, _TERM_ADD)


def format_functor(u: Functor) -> str:
    if isinstance(u, FunctorVar):
        return f"@{u.var.name}"
    if isinstance(u, FnConstFunctor):
        return f"f{CATALOG[u.fn].index}"
    if isinstance(u, Lambda):
        return f"\\{u.var.name}. {format_term(u.body)}"
    raise TypeError(u)


_F_UNARY, _F_AND, _F_OR, _F_IMP = 0, 1, 2, 3


def format_formula(f: Formula) -> str:
    def fmt(f: Formula, ctx: int) -> str:
        if isinstance(f, Eq):
            return f"{format_term(f.left)} = {format_term(f.right)}"
        if isinstance(f, Pred):
            if not f.terms:
                return f.name
            return f"{f.name}({','.join(format_term(t) for t in f.terms)})"
        if isinstance(f, Not):
            return "~" + fmt(f.body, _F_UNARY)
        if isinstance(f, ForAll):
            v = f"@{f.var.name}" if f.var.sort is Sort.FUNCTION else f.var.name
            return f"all {v}. {fmt(f.body, _F_UNARY)}"
        if isinstance(f, Exists):
            v = f"@{f.var.name}" if f.var.sort is Sort.FUNCTION else f.var.name
            return f"ex {v}. {fmt(f.body, _F_UNARY)}"
        if isinstance(f, And):
            s = f"{fmt(f.left, _F_AND)} & {fmt(f.right, _F_UNARY)}"
            return f"({s})" if ctx < _F_AND else s
        if isinstance(f, Or):
            s = f"{fmt(f.left, _F_OR)} | {fmt(f.right, _F_AND)}"
            return f"({s})" if ctx < _F_OR else s
        if isinstance(f, Implies):
            s = f"{fmt(f.left, _F_OR)} -> {fmt(f.right, _F_IMP)}"
            return f"({s})" if ctx < _F_IMP else s
        raise TypeError(f)

    return fmt(f, _F_IMP)


# ---------------------------------------------------------------------------
# Parsing

_KEYWORDS = {"all", "ex"}


class _Lexer:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.toks: list[tuple[str, str, int]] = []
        self._lex()
        self.i = 0

    def _lex(self):
        t, i, n = self.text, 0, len(self.text)
        while i < n:
            c = t[i]
            if c.isspace():
                i += 1
                continue
            if t.startswith("->", i):
                self.toks.append(("ARROW", "->", i))
                i += 2
                continue
            if t.startswith("<->", i):
                self.toks.append(("IFF", "<->", i))
                i += 3
                continue
            if c in "()&|~=+*',;.\\":
                kind = {
                    "(": "LP", ")": "RP", "&": "AND", "|": "OR", "~": "NOT",
                    "=": "EQ", "+": "PLUS", "*": "TIMES", "'": "PRIME",
                    ",": "COMMA", ";": "SEMI", ".": "DOT", "\\": "LAM",
                }[c]
                self.toks.append((kind, c, i))
                i += 1
                continue
            if c == "@":
                j = i + 1
                while j < n and (t[j].isalnum() or t[j] == "_"):
                    j += 1
                if j == i + 1:
                    raise SyntaxError_(f"bare @ at position {i}")
                self.toks.append(("FVAR", t[i + 1 : j], i))
                i = j
                continue
            if c == "0":
                self.toks.append(("ZERO", "0", i))
                i += 1
                continue
            if c.isdigit():
                raise SyntaxError_(f"numeric literals other than 0 are not terms (position {i})")
            if c.isalpha() or c == "_":
                j = i
                while j < n and (t[j].isalnum() or t[j] == "_"):
                    j += 1
                word = t[i:j]
                if word in _KEYWORDS:
                    self.toks.append((word.upper(), word, i))
                elif word[0] == "f" and word[1:].isdigit():
                    self.toks.append(("FCONST", word, i))
                elif word[0].isupper():
                    self.toks.append(("PRED", word, i))
                else:
                    self.toks.append(("VAR", word, i))
                i = j
                continue
            raise SyntaxError_(f"unexpected character {c!r} at position {i}")
        self.toks.append(("EOF", "", n))

    def peek(self, k=0):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def next(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, kind):
        tok = self.next()
        if tok[0] != kind:
            raise SyntaxError_(f"expected {kind}, found {tok[1]!r} at position {tok[2]}")
        return tok


class _Parser:
    """Recursive descent over the grammar in the module docstring."""

    def __init__(self, text: str):
        self.lx = _Lexer(text)

    def parse_formula(self) -> Formula:
        f = self._implication()
        self.lx.expect("EOF")
        return f

    def parse_term(self) -> Term:
        t = self._term()
        self.lx.expect("EOF")
        return t

    def _implication(self) -> Formula:
        left = self._disjunction()
        tok = self.lx.peek()
        if tok[0] == "ARROW":
            self.lx.next()
            return Implies(left, self._implication())
        if tok[0] == "IFF":
            self.lx.next()
            return iff(left, self._implication())
        return left

    def _disjunction(self) -> Formula:
        f = self._conjunction()
        while self.lx.peek()[0] == "OR":
            self.lx.next()
            f = Or(f, self._conjunction())
        return f

    def _conjunction(self) -> Formula:
        f = self._unary()
        while self.lx.peek()[0] == "AND":
            self.lx.next()
            f = And(f, self._unary())
        return f

    def _unary(self) -> Formula:
        tok = self.lx.peek()
        if tok[0] == "NOT":
            self.lx.next()
            return Not(self._unary())
        if tok[0] in ("ALL", "EX"):
            self.lx.next()
            vtok = self.lx.next()
            if vtok[0] == "VAR":
                v = Var(vtok[1], Sort.NUMBER)
            elif vtok[0] == "FVAR":
                v = Var(vtok[1], Sort.FUNCTION)
            else:
                raise SyntaxError_(f"expected variable after quantifier at position {vtok[2]}")
            self.lx.expect("DOT")
            body = self._unary()
            return ForAll(v, body) if tok[0] == "ALL" else Exists(v, body)
        return self._atom_formula()

    def _atom_formula(self) -> Formula:
        tok = self.lx.peek()
        if tok[0] == "PRED":
            self.lx.next()
            terms: tuple[Term, ...] = ()
            if self.lx.peek()[0] == "LP":
                self.lx.next()
                ts = [self._term()]
                while self.lx.peek()[0] == "COMMA":
                    self.lx.next()
                    ts.append(self._term())
                self.lx.expect("RP")
                terms = tuple(ts)
            return Pred(tok[1], terms)
        if tok[0] == "LP":
            # could be a parenthesized formula OR a term in an equation
            save = self.lx.i
            try:
                self.lx.next()
                f = self._implication()
                self.lx.expect("RP")
                if self.lx.peek()[0] in ("EQ",):
                    raise SyntaxError_("equation")  # backtrack: it was a term
                return f
            except SyntaxError_:
                self.lx.i = save
        # otherwise an equation s = t
        left = self._term()
        self.lx.expect("EQ")
        right = self._term()
        return Eq(left, right)

    # terms -------------------------------------------------------------
    def _term(self) -> Term:
        t = self._mul()
        while self.lx.peek()[0] == "PLUS":
            self.lx.next()
            t = Plus(t, self._mul())
        return t

    def _mul(self) -> Term:
        t = self._postfix()
        while self.lx.peek()[0] == "TIMES":
            self.lx.next()
            t = Times(t, self._postfix())
        return t

    def _postfix(self) -> Term:
        t = self._term_atom()
        while self.lx.peek()[0] == "PRIME":
            self.lx.next()
            t = Succ(t)
        return t

    def _functor(self) -> Functor:
        tok = self.lx.peek()
        if tok[0] == "FVAR":
            self.lx.next()
            return FunctorVar(Var(tok[1], Sort.FUNCTION))
        if tok[0] == "LAM":
            self.lx.next()
            vtok = self.lx.expect("VAR")
            self.lx.expect("DOT")
            return Lambda(Var(vtok[1], Sort.NUMBER), self._term())
        if tok[0] == "FCONST":
            self.lx.next()
            entry = CATALOG.get(tok[1])
            if entry is None:
                raise SyntaxError_(f"unknown function constant {tok[1]} at position {tok[2]}")
            if not (entry.k == 1 and entry.l == 0):
                raise ArityError(f"{tok[1]} is not unary number-to-number; cannot be a functor")
            return FnConstFunctor(entry.name)
        if tok[0] == "LP":
            self.lx.next()
            u = self._functor()
            self.lx.expect("RP")
            return u
        raise SyntaxError_(f"expected functor, found {tok[1]!r} at position {tok[2]}")

    def _term_atom(self) -> Term:
        tok = self.lx.peek()
        if tok[0] == "ZERO":
            self.lx.next()
            return ZERO
        if tok[0] == "VAR":
            self.lx.next()
            return TermVar(Var(tok[1], Sort.NUMBER))
        if tok[0] == "FVAR":
            self.lx.next()
            self.lx.expect("LP")
            arg = self._term()
            self.lx.expect("RP")
            return FunctorApp(FunctorVar(Var(tok[1], Sort.FUNCTION)), arg)
        if tok[0] == "FCONST":
            self.lx.next()
            entry = CATALOG.get(tok[1])
            if entry is None:
                raise SyntaxError_(f"unknown function constant {tok[1]} at position {tok[2]}")
            self.lx.expect("LP")
            ts: list[Term] = []
            fs: list[Functor] = []
            if entry.k:
                ts.append(self._term())
                for _ in range(entry.k - 1):
                    self.lx.expect("COMMA")
                    ts.append(self._term())
            if entry.l:
                self.lx.expect("SEMI")
                fs.append(self._functor())
                for _ in range(entry.l - 1):
                    self.lx.expect("COMMA")
                    fs.append(self._functor())
            self.lx.expect("RP")
            if entry.index <= 3:
                # aliases for the built-in constructors
                if entry.index == 0:
                    return ZERO
                if entry.index == 1:
                    return Succ(ts[0])
                if entry.index == 2:
                    return Plus(ts[0], ts[1])
                return Times(ts[0], ts[1])
            return FnApp(entry.name, tuple(ts), tuple(fs))
        if tok[0] == "LP":
            # parenthesized term, or parenthesized functor applied to a term
            save = self.lx.i
            try:
                self.lx.next()
                t = self._term()
                self.lx.expect("RP")
                return t
            except (SyntaxError_, ArityError):
                self.lx.i = save
            self.lx.next()
            u = self._functor()
            self.lx.expect("RP")
            self.lx.expect("LP")
            arg = self._term()
            self.lx.expect("RP")
            return FunctorApp(u, arg)
        if tok[0] == "LAM":
            raise SyntaxError_(
                f"lambda functor must be parenthesized to be applied, at position {tok[2]}"
            )
        raise SyntaxError_(f"expected term, found {tok[1]!r} at position {tok[2]}")


def parse_formula(text: str, profile: LanguageProfile | None = None) -> Formula:
    """Parse a formula; when a profile is given, also validate it against the language."""
    f = _Parser(text).parse_formula()
    if profile is not None:
        validate(f, profile)
    return f


def parse_term(text: str, profile: LanguageProfile | None = None) -> Term:
    t = _Parser(text).parse_term()
    if profile is not None:
        validate_term(t, profile)
    return t


# ---------------------------------------------------------------------------
# Profile validation

def validate_term(t: Term, profile: LanguageProfile, in_formula: bool = False) -> None:
    if isinstance(t, (Zero, Succ, Plus, Times)):
        if not profile.arithmetic:
            raise ProfileError(f"arithmetic term {format_term(t)} outside {profile.name}")
        if isinstance(t, Succ):
            validate_term(t.arg, profile)
        elif isinstance(t, (Plus, Times)):
            validate_term(t.left, profile)
            validate_term(t.right, profile)
        return
    if isinstance(t, TermVar):
        if Sort.NUMBER not in profile.sorts and profile.sorts:
            raise ProfileError(f"number variable in {profile.name}")
        if not profile.sorts:
            raise ProfileError(f"terms are not part of {profile.name}")
        return
    if isinstance(t, FnApp):
        entry = CATALOG.get(t.fn)
        if entry is None or entry.name not in profile.catalog:
            raise ProfileError(f"function constant {t.fn} outside {profile.name}")
        if len(t.terms) != entry.k or len(t.functors) != entry.l:
            raise ArityError(
                f"{entry.name} expects {entry.k} number / {entry.l} function args"
            )
        for s in t.terms:
            validate_term(s, profile)
        for u in t.functors:
            validate_functor(u, profile)
        return
    if isinstance(t, FunctorApp):
        if Sort.FUNCTION not in profile.sorts:
            raise ProfileError(f"functor application outside {profile.name}")
        validate_functor(t.functor, profile)
        validate_term(t.arg, profile)
        return
    raise TypeError(t)


def validate_functor(u: Functor, profile: LanguageProfile) -> None:
    if Sort.FUNCTION not in profile.sorts:
        raise ProfileError(f"functors are not part of {profile.name}")
    if isinstance(u, FunctorVar):
        return
    if isinstance(u, FnConstFunctor):
        entry = CATALOG[u.fn]
        if entry.name not in profile.catalog:
            raise ProfileError(f"function constant {u.fn} outside {profile.name}")
        return
    if isinstance(u, Lambda):
        validate_term(u.body, profile)
        return
    raise TypeError(u)


def validate(f: Formula, profile: LanguageProfile) -> None:
    """Raise ProfileError/ArityError when f is outside the profile's language."""
    if isinstance(f, Eq):
        if not profile.equality:
            raise ProfileError(f"equality outside {profile.name}")
        validate_term(f.left, profile)
        validate_term(f.right, profile)
        return
    if isinstance(f, Pred):
        if not profile.predicates:
            raise ProfileError(f"predicate letters outside {profile.name}")
        for t in f.terms:
            validate_term(t, profile)
        return
    if isinstance(f, (And, Or, Implies)):
        validate(f.left, profile)
        validate(f.right, profile)
        return
    if isinstance(f, Not):
        validate(f.body, profile)
        return
    if isinstance(f, (ForAll, Exists)):
        if f.var.sort not in profile.sorts:
            raise ProfileError(
                f"quantifier over {f.var.sort.value} variable outside {profile.name}"
            )
        validate(f.body, profile)
        return
    raise TypeError(f)
