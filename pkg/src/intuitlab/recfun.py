"""A concrete model of partial recursive functions with Gödel numbering.

Programs are first-order terms denoting unary partial functions on the
naturals; multiple arguments travel through the pairing (n,m) = 2^n * 3^m.
The term language:

    IDT            identity
    K(c)           constant c
    SUC            successor
    PROJ(i)        x -> (x)_i  (exponent of the i-th prime)
    PAIRC(p, q)    x -> 2^{p(x)} * 3^{q(x)}
    COMP(p, q)     p after q
    PRIM(b, s)     primitive recursion on pair(n, a): n = 0 -> b(a),
                   n+1 -> s(pair(n, pair(f(pair(n,a)), a)))
    MU(p)          x -> least y with p(pair(y, x)) = 0
    CLOS(p)        runtime s-m-n: x -> code of (m -> p(pair(x, m)))
    APPL(p, q)     universal application: x -> {p(x)}(q(x))
    TRACEOF(p)     x -> trace code of the halting run of {(p(x))_0}((p(x))_1)

Gödel numbers are assigned by an interning enumeration over a documented
canonical prelude (see PRELUDE); un-interned numbers denote the everywhere
undefined function, which the code invariant explicitly allows.  Realizer
values must survive as exponents of the 2^n*3^m pairing, which rules out
any structurally monotone numbering.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from . import seqnum
from . import syntax as S
from .syntax import Eq, FnApp, Formula, TermVar, Var, ZERO


@dataclass(frozen=True)
class Fuel:
    max_steps: int = 100_000

    def __post_init__(self):
        if self.max_steps <= 0:
            raise ValueError("fuel must be positive")


DEFAULT_FUEL = Fuel()


def _fuel_steps(fuel) -> int:
    if fuel is None:
        return DEFAULT_FUEL.max_steps
    if isinstance(fuel, Fuel):
        return fuel.max_steps
    return int(fuel)


# ---------------------------------------------------------------------------
# Program terms

@dataclass(frozen=True, eq=False)
class Prf(S.AstNode):
    pass


@dataclass(frozen=True, eq=False)
class IDT(Prf):
    pass


@dataclass(frozen=True, eq=False)
class K(Prf):
    value: int


@dataclass(frozen=True, eq=False)
class SUC(Prf):
    pass


@dataclass(frozen=True, eq=False)
class PROJ(Prf):
    index: int


@dataclass(frozen=True, eq=False)
class PAIRC(Prf):
    left: Prf
    right: Prf


@dataclass(frozen=True, eq=False)
class COMP(Prf):
    outer: Prf
    inner: Prf


@dataclass(frozen=True, eq=False)
class PRIM(Prf):
    base: Prf
    step: Prf


@dataclass(frozen=True, eq=False)
class MU(Prf):
    body: Prf


@dataclass(frozen=True, eq=False)
class CLOS(Prf):
    body: Prf


@dataclass(frozen=True, eq=False)
class APPL(Prf):
    fn: Prf
    arg: Prf


@dataclass(frozen=True, eq=False)
class TRACEOF(Prf):
    prog: Prf


# ---------------------------------------------------------------------------
# Pairing arithmetic (the paper's coding)

def pair(n: int, m: int) -> int:
    """(n, m) = 2^n * 3^m."""
    return 2 ** n * 3 ** m


def proj(n: int, i: int) -> int:
    """(n)_i: exponent of the i-th prime; (0)_i = 0 by convention."""
    return seqnum.proj(n, i)


# ---------------------------------------------------------------------------
# Gödel numbering: interning registry

_TABLE: list[Prf] = []
_INDEX: dict[Prf, int] = {}


def encode(p: Prf) -> int:
    """The code of a program term (stable within a session, prelude-stable across)."""
    got = _INDEX.get(p)
    if got is None:
        _TABLE.append(p)
        got = len(_TABLE) - 1
        _INDEX[p] = got
    return got


def decode(e: int) -> Optional[Prf]:
    """The program term for a code; None denotes the everywhere-undefined function."""
    if 0 <= e < len(_TABLE):
        return _TABLE[e]
    return None


# the canonical prelude pins small codes for the basket used in docs and the CLI
PRELUDE: tuple[tuple[str, Prf], ...] = (
    ("identity", IDT()),
    ("zero", K(0)),
    ("successor", SUC()),
    ("left", PROJ(0)),
    ("right", PROJ(1)),
    ("pairing", PAIRC(PROJ(0), PROJ(1))),
    ("diverge", MU(COMP(SUC(), IDT()))),
)

for _name, _p in PRELUDE:
    encode(_p)

PRELUDE_CODES = {name: encode(p) for name, p in PRELUDE}


class OutOfFuel(Exception):
    pass


class _Run:
    __slots__ = ("budget", "steps")

    def __init__(self, budget: int):
        self.budget = budget
        self.steps = 0

    def tick(self, n: int = 1):
        self.steps += n
        if self.steps > self.budget:
            raise OutOfFuel


def _eval(p: Prf, x: int, run: _Run) -> int:
    run.tick()
    if isinstance(p, IDT):
        return x
    if isinstance(p, K):
        return p.value
    if isinstance(p, SUC):
        return x + 1
    if isinstance(p, PROJ):
        return proj(x, p.index)
    if isinstance(p, PAIRC):
        return pair(_eval(p.left, x, run), _eval(p.right, x, run))
    if isinstance(p, COMP):
        return _eval(p.outer, _eval(p.inner, x, run), run)
    if isinstance(p, PRIM):
        n, a = proj(x, 0), proj(x, 1)
        acc = _eval(p.base, a, run)
        for k in range(n):
            run.tick()
            acc = _eval(p.step, pair(k, pair(acc, a)), run)
        return acc
    if isinstance(p, MU):
        y = 0
        while True:
            run.tick()
            if _eval(p.body, pair(y, x), run) == 0:
                return y
            y += 1
    if isinstance(p, CLOS):
        return encode(COMP(p.body, PAIRC(K(x), IDT())))
    if isinstance(p, APPL):
        code = _eval(p.fn, x, run)
        arg = _eval(p.arg, x, run)
        target = decode(code)
        if target is None:
            raise OutOfFuel  # undefined function: never halts
        return _eval(target, arg, run)
    if isinstance(p, TRACEOF):
        v = _eval(p.prog, x, run)
        e, m = proj(v, 0), proj(v, 1)
        target = decode(e)
        if target is None:
            raise OutOfFuel
        sub = _Run(run.budget - run.steps)
        try:
            out = _eval(target, m, sub)
        finally:
            run.tick(sub.steps)
        return trace_code(m, sub.steps, out)
    raise TypeError(p)


def apply(e: int, m: int, fuel=None) -> Optional[int]:
    """{e}(m) within the fuel bound; None means diverged-within-fuel."""
    p = decode(e)
    if p is None:
        return None
    run = _Run(_fuel_steps(fuel))
    try:
        return _eval(p, m, run)
    except OutOfFuel:
        return None


def apply_traced(e: int, m: int, fuel=None) -> Optional[tuple[int, int]]:
    """(value, exact step count) of a halting run, or None."""
    p = decode(e)
    if p is None:
        return None
    run = _Run(_fuel_steps(fuel))
    try:
        v = _eval(p, m, run)
    except OutOfFuel:
        return None
    return v, run.steps


def run_program(p: Prf, m: int, fuel=None) -> Optional[int]:
    return apply(encode(p), m, fuel)


# ---------------------------------------------------------------------------
# s-m-n

def smn(e: int, n: int) -> int:
    """A code for m -> {e}(pair(n, m)); agrees with the runtime CLOS primitive."""
    p = decode(e)
    if p is None:
        # still total: the returned code applies an undefined function
        p = MU(COMP(SUC(), IDT()))
    return encode(COMP(p, PAIRC(K(n), IDT())))


# ---------------------------------------------------------------------------
# Computation traces: w = 2^z * 3^{cantor(x, steps)}

def trace_code(x: int, steps: int, z: int) -> int:
    return 2 ** z * 3 ** seqnum.cantor_pair(x, steps)


def trace_parts(w: int) -> Optional[tuple[int, int, int]]:
    """(input, steps, output) when w has the trace shape with steps >= 1."""
    if w <= 0:
        return None
    z = seqnum.proj(w, 0)
    q = seqnum.proj(w, 1)
    if w != 2 ** z * 3 ** q:
        return None
    x, steps = seqnum.cantor_split(q)
    if steps < 1:
        return None
    return x, steps, z


def t_predicate(e: int, x: int, w: int) -> bool:
    """True iff w is the unique trace of a halting computation of {e}(x)."""
    parts = trace_parts(w)
    if parts is None:
        return False
    xw, steps, z = parts
    if xw != x:
        return False
    got = apply_traced(e, x, steps)
    return got is not None and got == (z, steps)


def u_value(w: int) -> int:
    """The output component of a trace; 0 on non-traces ("otherwise z = 0")."""
    parts = trace_parts(w)
    return parts[2] if parts else 0


def trace_of(e: int, x: int, fuel=None) -> Optional[int]:
    got = apply_traced(e, x, fuel)
    if got is None:
        return None
    v, steps = got
    return trace_code(x, steps, v)


def trace_bound(m: int, n: int, fuel=None) -> int:
    """A bound with: {e}(m) halts with value n within fuel f iff the unique
    trace w with t_predicate(e,m,w) and u_value(w) = n satisfies w <= bound.

    The output value must appear in the bound: a single PAIRC step can build
    values far larger than the step count, so no bound in f alone exists.
    """
    f = _fuel_steps(fuel)
    return 2 ** n * 3 ** seqnum.cantor_pair(m, f)


# ---------------------------------------------------------------------------
# Numeralwise expression of T and U in the conservative extension of HA

def _install_semantics():
    def trc(ts, fs):
        e, x, w = ts
        return 0 if t_predicate(e, x, w) else 1

    def uot(ts, fs):
        return u_value(ts[0])

    S.install_semantics("trc", trc)
    S.install_semantics("uot", uot)


_install_semantics()


def t_formula(e: Var = Var("e"), x: Var = Var("x"), w: Var = Var("w")) -> Formula:
    """T(e,x,w) as a quantifier-free prime formula of the extension language."""
    return Eq(FnApp("trc", (TermVar(e), TermVar(x), TermVar(w))), ZERO)


def u_formula(w: Var = Var("w"), z: Var = Var("z")) -> Formula:
    """U(w,z): z is the value computed by trace w, else 0."""
    return Eq(FnApp("uot", (TermVar(w),)), TermVar(z))


# ---------------------------------------------------------------------------
# Small program library used by extraction and the tests

def const_prog(c: int) -> Prf:
    return K(c)


PLUS = PRIM(IDT(), COMP(SUC(), COMP(PROJ(0), PROJ(1))))
TIMES = PRIM(K(0), COMP(PLUS, PROJ(1)))

# if-zero selector: pair(n, pair(u, v)) -> u when n = 0 else v
IFZ = PRIM(PROJ(0), COMP(PROJ(1), COMP(PROJ(1), PROJ(1))))
