"""Proof-transforming algorithms.

Every generator here returns derivations that go back through the kernel;
none of them bypasses checking.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from . import builder as B
from . import kernel as K
from . import syntax as S
from .syntax import (
    And, Eq, Exists, ForAll, Formula, Implies, Not, Or, Plus, Pred, Succ,
    Term, TermVar, Times, Var, ZERO,
)


class TransformError(Exception):
    pass


# ---------------------------------------------------------------------------
# Deduction theorem

def _require_accepted(d: K.Derivation, what: str) -> None:
    v = K.check_derivation(d)
    if not v:
        raise TransformError(f"{what}: input rejected at step {v.step}: {v.reason}")


def _import_lemma(system, a, c, dd) -> K.Derivation:
    """(A -> (C -> D)) -> (A & C -> D)."""
    b = B.ProofBuilder(system, [Implies(a, Implies(c, dd)), And(a, c)])
    h_imp, h_and = b.hyp(0), b.hyp(1)
    cd = b.mp(b.conj_left(h_and), h_imp)
    b.mp(b.conj_right(h_and), cd)
    return deduction_theorem(deduction_theorem(b.derivation(), 1, verify=False), 0, verify=False)


def _export_lemma(system, a, c, e) -> K.Derivation:
    """(A & C -> E) -> (A -> (C -> E))."""
    b = B.ProofBuilder(system, [Implies(And(a, c), e), a, c])
    h_imp, ha, hc = b.hyp(0), b.hyp(1), b.hyp(2)
    b.mp(b.conj(ha, hc), h_imp)
    d = b.derivation()
    return deduction_theorem(deduction_theorem(deduction_theorem(d, 2, verify=False), 1, verify=False), 0, verify=False)


def _commute_lemma(system, a, bb, c) -> K.Derivation:
    """(A -> (B -> C)) -> (B -> (A -> C))."""
    b = B.ProofBuilder(system, [Implies(a, Implies(bb, c)), bb, a])
    h_imp, hb, ha = b.hyp(0), b.hyp(1), b.hyp(2)
    b.mp(hb, b.mp(ha, h_imp))
    d = b.derivation()
    return deduction_theorem(deduction_theorem(deduction_theorem(d, 2, verify=False), 1, verify=False), 0, verify=False)


def deduction_theorem(d: K.Derivation, hyp_index: int | None = None,
                      verify: bool = True) -> K.Derivation:
    """Discharge one hypothesis: from Gamma u {A} |- B produce Gamma |- A -> B.

    Steps not depending on the discharged hypothesis are copied verbatim;
    only the dependent spine is wrapped under the antecedent.
    """
    if verify:
        _require_accepted(d, "deduction theorem")
    k = len(d.hyps) - 1 if hyp_index is None else hyp_index
    if not (0 <= k < len(d.hyps)):
        raise TransformError("no such hypothesis to discharge")
    a = d.hyps[k]
    new_hyps = d.hyps[:k] + d.hyps[k + 1 :]
    a_free = S.free_vars(a)
    b = B.ProofBuilder(d.system, new_hyps)

    depends: set[int] = set()
    for i, step in enumerate(d.steps):
        j = step.just
        if isinstance(j, K.HypStep) and j.index == k:
            depends.add(i)
        elif isinstance(j, K.RuleStep) and any(p in depends for p in j.premises):
            depends.add(i)

    plain: dict[int, int] = {}  # independent steps, copied verbatim
    wrapped: dict[int, int] = {}  # dependent steps, as A -> E

    def old_index(i: int) -> int:
        return i if i < k else i - 1

    def as_wrapped(i: int) -> int:
        if i in wrapped:
            return wrapped[i]
        return b.under(plain[i], a)

    for i, step in enumerate(d.steps):
        f, j = step.formula, step.just
        if i not in depends:
            if isinstance(j, K.HypStep):
                plain[i] = b.hyp(old_index(j.index))
            elif isinstance(j, K.RuleStep):
                plain[i] = b._add(f, K.RuleStep(j.rule, tuple(plain[p] for p in j.premises)))
            else:
                plain[i] = b._add(f, j)
            continue
        if isinstance(j, K.HypStep):
            wrapped[i] = b.identity(a)
        elif isinstance(j, K.RuleStep) and j.rule == "mp":
            pi, pj = j.premises
            ei = d.steps[pi].formula
            if pi in depends and pj not in depends:
                # A -> Ei and Ei -> f give A -> f by a syllogism
                wrapped[i] = b.syllogism(wrapped[pi], plain[pj])
            else:
                x2 = b.axiom(
                    "X2",
                    Implies(Implies(a, ei),
                            Implies(Implies(a, Implies(ei, f)), Implies(a, f))),
                )
                wrapped[i] = b.mp(as_wrapped(pj), b.mp(as_wrapped(pi), x2))
        elif isinstance(j, K.RuleStep) and j.rule in ("r2", "r4"):
            (pi,) = j.premises
            c, q = f.left, f.right  # f = C -> all x. D
            x, dd = q.var, q.body
            if x in a_free:
                raise TransformError(
                    f"{j.rule} generalizes {x}, which is free in the discharged hypothesis"
                )
            imp = b.splice(_import_lemma(d.system, a, c, dd))
            s1 = b.mp(wrapped[pi], imp)  # (A & C) -> D
            s2 = b.r2(s1, x)
            exp = b.splice(_export_lemma(d.system, a, c, ForAll(x, dd)))
            wrapped[i] = b.mp(s2, exp)
        elif isinstance(j, K.RuleStep) and j.rule in ("r3", "r5"):
            (pi,) = j.premises
            q, c = f.left, f.right  # f = ex x. D -> C
            x, dd = q.var, q.body
            if x in a_free:
                raise TransformError(
                    f"{j.rule} generalizes {x}, which is free in the discharged hypothesis"
                )
            com = b.splice(_commute_lemma(d.system, a, dd, c))
            s1 = b.mp(wrapped[pi], com)  # D -> (A -> C)
            s2 = b.r3(s1, x)
            com2 = b.splice(_commute_lemma(d.system, Exists(x, dd), a, c))
            wrapped[i] = b.mp(s2, com2)
        else:
            raise TransformError(f"cannot transform justification {j!r}")

    last = len(d.steps) - 1
    final = as_wrapped(last)
    if b.formula(final) != Implies(a, d.conclusion):
        raise TransformError("deduction theorem produced the wrong conclusion")
    if final != len(b.steps) - 1:
        # the conclusion must be the final step
        b.steps.append(b.steps[final])
    return b.derivation()


# ---------------------------------------------------------------------------
# Negative (double-negation) translation and Glivenko

@dataclass(frozen=True)
class TranslationResult:
    translated: Formula
    trace: tuple[tuple[Formula, Formula], ...]


def negative_translation(f: Formula, level: str = "prop") -> TranslationResult:
    """Prime formulas become double negations; | and ex are rewritten classically."""
    if level not in ("prop", "pred", "arith"):
        raise ValueError(f"unknown level {level!r}")
    trace: list[tuple[Formula, Formula]] = []

    def go(g: Formula) -> Formula:
        if isinstance(g, Pred):
            if level == "prop" and g.terms:
                raise TransformError("predicate letters with arguments need level pred")
            out: Formula = Not(Not(g))
        elif isinstance(g, Eq):
            if level != "arith":
                raise TransformError("equations need level arith")
            out = Not(Not(g))
        elif isinstance(g, And):
            out = And(go(g.left), go(g.right))
        elif isinstance(g, Implies):
            out = Implies(go(g.left), go(g.right))
        elif isinstance(g, Not):
            out = Not(go(g.body))
        elif isinstance(g, Or):
            out = Not(And(Not(go(g.left)), Not(go(g.right))))
        elif isinstance(g, ForAll):
            if level == "prop":
                raise TransformError("quantifiers need level pred or arith")
            out = ForAll(g.var, go(g.body))
        elif isinstance(g, Exists):
            if level == "prop":
                raise TransformError("quantifiers need level pred or arith")
            out = Not(ForAll(g.var, Not(go(g.body))))
        else:
            raise TypeError(g)
        trace.append((g, out))
        return out

    return TranslationResult(go(f), tuple(trace))


def replay_translation(tr: TranslationResult) -> bool:
    """Check the recorded trace: each rewrite is consistent and the last yields the output."""
    done: dict[Formula, Formula] = {}
    for src, out in tr.trace:
        if isinstance(src, (Pred, Eq)):
            expect: Formula = Not(Not(src))
        elif isinstance(src, And):
            expect = And(done[src.left], done[src.right])
        elif isinstance(src, Implies):
            expect = Implies(done[src.left], done[src.right])
        elif isinstance(src, Not):
            expect = Not(done[src.body])
        elif isinstance(src, Or):
            expect = Not(And(Not(done[src.left]), Not(done[src.right])))
        elif isinstance(src, ForAll):
            expect = ForAll(src.var, done[src.body])
        elif isinstance(src, Exists):
            expect = Not(ForAll(src.var, Not(done[src.body])))
        else:
            return False
        if expect != out:
            return False
        done[src] = out
    return bool(tr.trace) and tr.trace[-1][1] == tr.translated


def simplify_stable_primes(f: Formula) -> Formula:
    """Optional post-pass: collapse ~~(s = t) to s = t (equality is stable in HA)."""
    if isinstance(f, Not):
        if isinstance(f.body, Not) and isinstance(f.body.body, Eq):
            return f.body.body
        return Not(simplify_stable_primes(f.body))
    if isinstance(f, (And, Or, Implies)):
        return type(f)(simplify_stable_primes(f.left), simplify_stable_primes(f.right))
    if isinstance(f, (ForAll, Exists)):
        return type(f)(f.var, simplify_stable_primes(f.body))
    return f


def propositional(f: Formula) -> bool:
    if isinstance(f, Pred):
        return not f.terms
    if isinstance(f, (And, Or, Implies)):
        return propositional(f.left) and propositional(f.right)
    if isinstance(f, Not):
        return propositional(f.body)
    return False


def glivenko(f: Formula, classical_proof: K.Derivation | None = None) -> Formula:
    """~~A, which is Pp-provable whenever A is Pp^c-provable (propositional only)."""
    if not propositional(f):
        raise TransformError("the double-negation form holds only for propositional logic")
    if classical_proof is not None:
        if classical_proof.system != K.SystemId.PPC or classical_proof.conclusion != f:
            raise TransformError("supplied proof is not a Pp^c proof of the formula")
        _require_accepted(classical_proof, "glivenko")
    return Not(Not(f))


# ---------------------------------------------------------------------------
# Pp inside Pp^c: expanding X10 steps through the stored classical proof

_CLASSICAL_OF = {
    K.SystemId.PP: K.SystemId.PPC,
    K.SystemId.PD: K.SystemId.PDC,
    K.SystemId.HA: K.SystemId.PA,
}


def x10_classical_proof(a: Formula, bb: Formula, system: K.SystemId) -> K.Derivation:
    """A proof of ~A -> (A -> B) from X1-X9 and X10c."""
    b = B.ProofBuilder(system, [Not(a), a])
    h_na, h_a = b.hyp(0), b.hyp(1)
    nb = Not(bb)
    m1 = b.under(h_na, nb)  # ~B -> ~A
    m2 = b.under(h_a, nb)  # ~B -> A
    x9 = b.axiom("X9", Implies(Implies(nb, a), Implies(Implies(nb, Not(a)), Not(nb))))
    m4 = b.mp(m1, b.mp(m2, x9))  # ~~B
    x10c = b.axiom("X10C", Implies(Not(nb), bb))
    b.mp(m4, x10c)
    return deduction_theorem(deduction_theorem(b.derivation(), 1, verify=False), 0, verify=False)


def expand_x10(d: K.Derivation) -> K.Derivation:
    """Replace every X10 axiom step by its derivation from X10c, moving to the classical twin."""
    _require_accepted(d, "expand_x10")
    target = _CLASSICAL_OF.get(d.system)
    if target is None:
        raise TransformError(f"no classical counterpart for {d.system.value}")
    b = B.ProofBuilder(target, d.hyps)
    mapping: dict[int, int] = {}
    for i, step in enumerate(d.steps):
        j = step.just
        if isinstance(j, K.AxiomStep) and j.schema == "X10":
            inst = K.match_axiom("X10", step.formula)
            mapping[i] = b.splice(x10_classical_proof(inst["A"], inst["B"], target))
        elif isinstance(j, K.RuleStep):
            mapping[i] = b._add(
                step.formula, K.RuleStep(j.rule, tuple(mapping[p] for p in j.premises))
            )
        else:
            mapping[i] = b._add(step.formula, j)
    return b.derivation()


# ---------------------------------------------------------------------------
# Arithmetic lemma ladder (closed HA theorems, derived once and spliced)

def _v(n: str) -> Term:
    return TermVar(Var(n))


def _finish_induction(b: B.ProofBuilder, a: Formula, x: Var, base: int,
                      step_d: K.Derivation, extra_providers=()) -> int:
    """Close an XInd argument.

    step_d has hyps == b.hyps + (a,) + extras and concludes A(x'); the extras
    (typically closed lemma statements) are supplied by the b-steps in
    extra_providers.
    """
    imp = deduction_theorem(step_d, len(b.hyps), verify=False)
    providers = [b.hyp(i) for i in range(len(b.hyps))] + list(extra_providers)
    s = b.splice(imp, providers)
    gen = b.generalize(s, x)
    both = b.conj(base, gen)
    xind = b.axiom("XIND", K.make_xind(a, x))
    return b.mp(both, xind)


@lru_cache(maxsize=None)
def lemma_zero_left() -> K.Derivation:
    """all x. 0 + x = x."""
    x = Var("x")
    a = Eq(Plus(ZERO, _v("x")), _v("x"))
    b = B.ProofBuilder(K.SystemId.HA)
    base = b._xn_at("XN4", ZERO)
    sb = B.ProofBuilder(K.SystemId.HA, (a,))
    h = sb.hyp(0)
    s1 = sb._xn_at("XN5", ZERO, _v("x"))
    sb.eq_trans(s1, sb.eq_succ_cong(h))
    _finish_induction(b, a, x, base, sb.derivation())
    return b.derivation()


@lru_cache(maxsize=None)
def lemma_succ_left() -> K.Derivation:
    """all x. all y. x' + y = (x + y)'."""
    x, y = Var("x"), Var("y")
    a = Eq(Plus(Succ(_v("x")), _v("y")), Succ(Plus(_v("x"), _v("y"))))
    b = B.ProofBuilder(K.SystemId.HA)
    l1 = b._xn_at("XN4", Succ(_v("x")))
    l2 = b.eq_succ_cong(b._xn_at("XN4", _v("x")))
    base = b.eq_trans(l1, b.eq_sym(l2))
    sb = B.ProofBuilder(K.SystemId.HA, (a,))
    h = sb.hyp(0)
    s1 = sb._xn_at("XN5", Succ(_v("x")), _v("y"))
    s3 = sb.eq_trans(s1, sb.eq_succ_cong(h))
    s4 = sb.eq_succ_cong(sb._xn_at("XN5", _v("x"), _v("y")))
    sb.eq_trans(s3, sb.eq_sym(s4))
    inner = _finish_induction(b, a, y, base, sb.derivation())
    b.generalize(inner, x)
    return b.derivation()


def _closure(d: K.Derivation) -> Formula:
    return d.conclusion


@lru_cache(maxsize=None)
def lemma_plus_right_cong() -> K.Derivation:
    """all z. all x. all y. (x = y -> z + x = z + y)."""
    x, y, z = Var("x"), Var("y"), Var("z")
    eq = Eq(_v("x"), _v("y"))
    core = Implies(eq, Eq(Plus(_v("z"), _v("x")), Plus(_v("z"), _v("y"))))
    a = ForAll(x, ForAll(y, core))
    b = B.ProofBuilder(K.SystemId.HA)
    zl = b.splice(lemma_zero_left())
    zlc = _closure(lemma_zero_left())
    sl = b.splice(lemma_succ_left())
    slc = _closure(lemma_succ_left())

    # base: x = y -> 0 + x = 0 + y, with the zero-left closure as an assumption
    sb = B.ProofBuilder(K.SystemId.HA, (zlc, eq))
    h = sb.hyp(1)
    zl_x = sb.forall_elim_all(sb.hyp(0), [_v("x")])
    zl_y = sb.forall_elim_all(sb.hyp(0), [_v("y")])
    sb.eq_trans(sb.eq_trans(zl_x, h), sb.eq_sym(zl_y))
    d1 = deduction_theorem(sb.derivation(), 1, verify=False)  # (zlc,) |- x=y -> 0+x=0+y
    imp0 = b.splice(d1, [zl])
    base = b.generalize(b.generalize(imp0, y), x)

    # step: from A(z), prove A(z'), with the succ-left closure as an assumption
    sb2 = B.ProofBuilder(K.SystemId.HA, (a, slc, eq))
    ha, hsl, heq = sb2.hyp(0), sb2.hyp(1), sb2.hyp(2)
    ih = sb2.mp(heq, sb2.instantiate(sb2.instantiate(ha, _v("x")), _v("y")))
    sl_zx = sb2.forall_elim_all(hsl, [_v("z"), _v("x")])  # z' + x = (z + x)'
    sl_zy = sb2.forall_elim_all(hsl, [_v("z"), _v("y")])
    chain = sb2.eq_trans(sl_zx, sb2.eq_succ_cong(ih))
    sb2.eq_trans(chain, sb2.eq_sym(sl_zy))
    inner = deduction_theorem(sb2.derivation(), 2, verify=False)  # (a, slc) |- x=y -> z'+x=z'+y
    sb3 = B.ProofBuilder(K.SystemId.HA, (a, slc))
    sp = sb3.splice(inner, [sb3.hyp(0), sb3.hyp(1)])
    sb3.generalize(sb3.generalize(sp, y), x)  # A(z')
    _finish_induction(b, a, z, base, sb3.derivation(), [sl])
    return b.derivation()


@lru_cache(maxsize=None)
def lemma_plus_comm() -> K.Derivation:
    """all x. all y. x + y = y + x."""
    x, y = Var("x"), Var("y")
    a = Eq(Plus(_v("x"), _v("y")), Plus(_v("y"), _v("x")))
    b = B.ProofBuilder(K.SystemId.HA)
    zl = b.splice(lemma_zero_left())
    sl = b.splice(lemma_succ_left())
    slc = _closure(lemma_succ_left())
    base = b.eq_trans(b._xn_at("XN4", _v("x")), b.eq_sym(b.instantiate(zl, _v("x"))))
    sb = B.ProofBuilder(K.SystemId.HA, (a, slc))
    h = sb.hyp(0)
    s1 = sb._xn_at("XN5", _v("x"), _v("y"))  # x + y' = (x + y)'
    s2 = sb.eq_trans(s1, sb.eq_succ_cong(h))  # x + y' = (y + x)'
    s3 = sb.forall_elim_all(sb.hyp(1), [_v("y"), _v("x")])  # y' + x = (y + x)'
    sb.eq_trans(s2, sb.eq_sym(s3))
    inner = _finish_induction(b, a, y, base, sb.derivation(), [sl])
    b.generalize(inner, x)
    return b.derivation()


@lru_cache(maxsize=None)
def lemma_plus_assoc() -> K.Derivation:
    """all x. all y. all z. (x + y) + z = x + (y + z)."""
    x, y, z = Var("x"), Var("y"), Var("z")
    a = Eq(Plus(Plus(_v("x"), _v("y")), _v("z")), Plus(_v("x"), Plus(_v("y"), _v("z"))))
    b = B.ProofBuilder(K.SystemId.HA)
    rc = b.splice(lemma_plus_right_cong())
    rcc = _closure(lemma_plus_right_cong())

    base_l = b._xn_at("XN4", Plus(_v("x"), _v("y")))  # (x+y)+0 = x+y
    y0 = b._xn_at("XN4", _v("y"))  # y+0 = y
    base_r = b.mp(y0, b.forall_elim_all(rc, [_v("x"), Plus(_v("y"), ZERO), _v("y")]))
    base = b.eq_trans(base_l, b.eq_sym(base_r))

    sb = B.ProofBuilder(K.SystemId.HA, (a, rcc))
    h, hrc = sb.hyp(0), sb.hyp(1)
    s1 = sb._xn_at("XN5", Plus(_v("x"), _v("y")), _v("z"))  # (x+y)+z' = ((x+y)+z)'
    s2 = sb.eq_trans(s1, sb.eq_succ_cong(h))  # = (x+(y+z))'
    s3 = sb._xn_at("XN5", _v("x"), Plus(_v("y"), _v("z")))  # x+(y+z)' = (x+(y+z))'
    s4 = sb.eq_trans(s2, sb.eq_sym(s3))  # (x+y)+z' = x+((y+z)')
    yz = sb._xn_at("XN5", _v("y"), _v("z"))  # y+z' = (y+z)'
    s5 = sb.mp(yz, sb.forall_elim_all(
        hrc, [_v("x"), Plus(_v("y"), Succ(_v("z"))), Succ(Plus(_v("y"), _v("z")))]))
    sb.eq_trans(s4, sb.eq_sym(s5))
    inner = _finish_induction(b, a, z, base, sb.derivation(), [rc])
    b.generalize(b.generalize(inner, y), x)
    return b.derivation()


@lru_cache(maxsize=None)
def lemma_times_zero_left() -> K.Derivation:
    """all x. 0 * x = 0."""
    x = Var("x")
    a = Eq(Times(ZERO, _v("x")), ZERO)
    b = B.ProofBuilder(K.SystemId.HA)
    base = b._xn_at("XN6", ZERO)
    sb = B.ProofBuilder(K.SystemId.HA, (a,))
    h = sb.hyp(0)
    s1 = sb._xn_at("XN7", ZERO, _v("x"))  # 0*x' = 0*x + 0
    s2 = sb._xn_at("XN4", Times(ZERO, _v("x")))  # 0*x + 0 = 0*x
    sb.eq_trans(sb.eq_trans(s1, s2), h)
    _finish_induction(b, a, x, base, sb.derivation())
    return b.derivation()


@lru_cache(maxsize=None)
def lemma_times_succ_left() -> K.Derivation:
    """all x. all y. x' * y = (x * y) + y."""
    x, y = Var("x"), Var("y")
    a = Eq(Times(Succ(_v("x")), _v("y")), Plus(Times(_v("x"), _v("y")), _v("y")))
    b = B.ProofBuilder(K.SystemId.HA)
    rc = b.splice(lemma_plus_right_cong())
    comm = b.splice(lemma_plus_comm())
    assoc = b.splice(lemma_plus_assoc())
    rcc, commc, assocc = (_closure(lemma_plus_right_cong()),
                          _closure(lemma_plus_comm()),
                          _closure(lemma_plus_assoc()))
    l1 = b._xn_at("XN6", Succ(_v("x")))  # x'*0 = 0
    l2 = b._xn_at("XN4", Times(_v("x"), ZERO))  # x*0 + 0 = x*0
    l3 = b.eq_trans(l2, b._xn_at("XN6", _v("x")))  # x*0 + 0 = 0
    base = b.eq_trans(l1, b.eq_sym(l3))

    sb = B.ProofBuilder(K.SystemId.HA, (a, rcc, commc, assocc))
    h, hrc, hcm, has = sb.hyp(0), sb.hyp(1), sb.hyp(2), sb.hyp(3)
    xy = Times(_v("x"), _v("y"))

    def plus_left_cong(eq_idx, u):
        # from s = t conclude s + u = t + u, via comm and right-cong
        e = sb.formula(eq_idx)
        s, t = e.left, e.right
        c1 = sb.forall_elim_all(hcm, [s, u])  # s+u = u+s
        rcu = sb.mp(eq_idx, sb.forall_elim_all(hrc, [u, s, t]))
        c2 = sb.forall_elim_all(hcm, [u, t])  # u+t = t+u
        return sb.eq_trans(sb.eq_trans(c1, rcu), c2)

    s1 = sb._xn_at("XN7", Succ(_v("x")), _v("y"))  # x'*y' = x'*y + x'
    s2 = plus_left_cong(h, Succ(_v("x")))  # x'*y + x' = (x*y+y) + x'
    s3 = sb.eq_trans(s1, s2)
    s4 = sb._xn_at("XN5", Plus(xy, _v("y")), _v("x"))  # (x*y+y)+x' = ((x*y+y)+x)'
    s5 = sb.eq_trans(s3, s4)  # x'*y' = ((x*y+y)+x)'
    a1 = sb.forall_elim_all(has, [xy, _v("y"), _v("x")])
    cyx = sb.forall_elim_all(hcm, [_v("y"), _v("x")])
    a2 = sb.mp(cyx, sb.forall_elim_all(
        hrc, [xy, Plus(_v("y"), _v("x")), Plus(_v("x"), _v("y"))]))
    a3 = sb.forall_elim_all(has, [xy, _v("x"), _v("y")])
    inner_eq = sb.eq_trans(sb.eq_trans(a1, a2), sb.eq_sym(a3))  # (x*y+y)+x = (x*y+x)+y
    s6 = sb.eq_trans(s5, sb.eq_succ_cong(inner_eq))  # x'*y' = ((x*y+x)+y)'
    s7 = sb._xn_at("XN5", Plus(xy, _v("x")), _v("y"))  # (x*y+x)+y' = ((x*y+x)+y)'
    s8 = sb.eq_trans(s6, sb.eq_sym(s7))  # x'*y' = (x*y+x)+y'
    xn7 = sb._xn_at("XN7", _v("x"), _v("y"))  # x*y' = x*y + x
    s9 = plus_left_cong(xn7, Succ(_v("y")))  # x*y' + y' = (x*y+x) + y'
    sb.eq_trans(s8, sb.eq_sym(s9))
    inner = _finish_induction(b, a, y, base, sb.derivation(), [rc, comm, assoc])
    b.generalize(inner, x)
    return b.derivation()


@lru_cache(maxsize=None)
def lemma_times_left_cong() -> K.Derivation:
    """all z. all x. all y. (x = y -> x * z = y * z)."""
    x, y, z = Var("x"), Var("y"), Var("z")
    eq = Eq(_v("x"), _v("y"))
    core = Implies(eq, Eq(Times(_v("x"), _v("z")), Times(_v("y"), _v("z"))))
    a = ForAll(x, ForAll(y, core))
    b = B.ProofBuilder(K.SystemId.HA)
    rc = b.splice(lemma_plus_right_cong())
    comm = b.splice(lemma_plus_comm())
    rcc, commc = _closure(lemma_plus_right_cong()), _closure(lemma_plus_comm())

    sb = B.ProofBuilder(K.SystemId.HA, (eq,))
    sb.eq_trans(sb._xn_at("XN6", _v("x")), sb.eq_sym(sb._xn_at("XN6", _v("y"))))
    imp0 = b.splice(deduction_theorem(sb.derivation(), verify=False))
    base = b.generalize(b.generalize(imp0, y), x)

    sb2 = B.ProofBuilder(K.SystemId.HA, (a, rcc, commc, eq))
    ha, hrc, hcm, heq = sb2.hyp(0), sb2.hyp(1), sb2.hyp(2), sb2.hyp(3)
    ih = sb2.mp(heq, sb2.instantiate(sb2.instantiate(ha, _v("x")), _v("y")))
    s1 = sb2._xn_at("XN7", _v("x"), _v("z"))  # x*z' = x*z + x
    c1 = sb2.forall_elim_all(hcm, [Times(_v("x"), _v("z")), _v("x")])
    rc1 = sb2.mp(ih, sb2.forall_elim_all(
        hrc, [_v("x"), Times(_v("x"), _v("z")), Times(_v("y"), _v("z"))]))
    c2 = sb2.forall_elim_all(hcm, [_v("x"), Times(_v("y"), _v("z"))])
    lhs = sb2.eq_trans(sb2.eq_trans(sb2.eq_trans(s1, c1), rc1), c2)  # x*z' = y*z + x
    rc2 = sb2.mp(heq, sb2.forall_elim_all(
        hrc, [Times(_v("y"), _v("z")), _v("x"), _v("y")]))
    lhs2 = sb2.eq_trans(lhs, rc2)  # x*z' = y*z + y
    s2 = sb2._xn_at("XN7", _v("y"), _v("z"))  # y*z' = y*z + y
    sb2.eq_trans(lhs2, sb2.eq_sym(s2))
    inner = deduction_theorem(sb2.derivation(), 3, verify=False)
    sb3 = B.ProofBuilder(K.SystemId.HA, (a, rcc, commc))
    sp = sb3.splice(inner, [sb3.hyp(0), sb3.hyp(1), sb3.hyp(2)])
    sb3.generalize(sb3.generalize(sp, y), x)
    _finish_induction(b, a, z, base, sb3.derivation(), [rc, comm])
    return b.derivation()


# ---------------------------------------------------------------------------
# Numeral-equation proofs: |- t = numeral(eval(t))

def numeral_proof(t: Term) -> K.Derivation:
    """A kernel-checked HA proof of t = n where n is the numeral for t's value."""
    if S.free_vars(t):
        raise TransformError("numeral_proof needs a closed term")
    S.validate_term(t, S.PROFILE_HA)
    b = B.ProofBuilder(K.SystemId.HA)
    spliced: dict[str, int] = {}

    def lem(name: str, make) -> int:
        if name not in spliced:
            spliced[name] = b.splice(make())
        return spliced[name]

    def rc_at(zz: Term, eq_idx: int) -> int:
        """from s = t conclude zz + s = zz + t."""
        e = b.formula(eq_idx)
        rci = b.forall_elim_all(lem("rc", lemma_plus_right_cong), [zz, e.left, e.right])
        return b.mp(eq_idx, rci)

    def lc_at(eq_idx: int, u: Term) -> int:
        """from s = t conclude s + u = t + u."""
        e = b.formula(eq_idx)
        s, tt = e.left, e.right
        comm = lem("comm", lemma_plus_comm)
        c1 = b.forall_elim_all(comm, [s, u])
        mid = rc_at(u, eq_idx)
        c2 = b.forall_elim_all(comm, [u, tt])
        return b.eq_trans(b.eq_trans(c1, mid), c2)

    def tl_at(eq_idx: int, zz: Term) -> int:
        """from s = t conclude s * zz = t * zz."""
        e = b.formula(eq_idx)
        tli = b.forall_elim_all(lem("tl", lemma_times_left_cong), [zz, e.left, e.right])
        return b.mp(eq_idx, tli)

    def tr_numeral(m: int, eq_idx: int) -> int:
        """from s = t conclude m * s = m * t (meta-recursion over the numeral m)."""
        e = b.formula(eq_idx)
        s, tt = e.left, e.right
        if m == 0:
            ml = lem("ml", lemma_times_zero_left)
            return b.eq_trans(b.forall_elim_all(ml, [s]),
                              b.eq_sym(b.forall_elim_all(ml, [tt])))
        prev = tr_numeral(m - 1, eq_idx)  # m-1 * s = m-1 * t
        msl = lem("msl", lemma_times_succ_left)
        n1 = b.forall_elim_all(msl, [S.numeral(m - 1), s])  # m*s = (m-1)*s + s
        mid1 = lc_at(prev, s)  # (m-1)*s + s = (m-1)*t + s
        mid2 = rc_at(Times(S.numeral(m - 1), tt), eq_idx)  # (m-1)*t + s = (m-1)*t + t
        n2 = b.forall_elim_all(msl, [S.numeral(m - 1), tt])
        return b.eq_trans(b.eq_trans(b.eq_trans(n1, mid1), mid2), b.eq_sym(n2))

    def nl_add(m: int, k: int) -> int:
        """|- m + k = numeral(m + k)."""
        if k == 0:
            return b._xn_at("XN4", S.numeral(m))
        s1 = b._xn_at("XN5", S.numeral(m), S.numeral(k - 1))
        return b.eq_trans(s1, b.eq_succ_cong(nl_add(m, k - 1)))

    def nl_mul(m: int, k: int) -> int:
        """|- m * k = numeral(m * k)."""
        if k == 0:
            return b._xn_at("XN6", S.numeral(m))
        s1 = b._xn_at("XN7", S.numeral(m), S.numeral(k - 1))
        s2 = lc_at(nl_mul(m, k - 1), S.numeral(m))  # m*(k-1) + m = (m(k-1)) + m
        s3 = b.eq_trans(s1, s2)
        return b.eq_trans(s3, nl_add(m * (k - 1), m))

    memo: dict[Term, int] = {}

    def np(term: Term) -> int:
        if term in memo:
            return memo[term]
        if isinstance(term, S.Zero):
            out = b.eq_refl_at(ZERO)
        elif isinstance(term, Succ):
            out = b.eq_succ_cong(np(term.arg))
        elif isinstance(term, Plus):
            m, k = S.eval_closed_term(term.left), S.eval_closed_term(term.right)
            i, j = np(term.left), np(term.right)
            a1 = lc_at(i, term.right)  # u + v = m + v
            a2 = rc_at(S.numeral(m), j)  # m + v = m + k
            out = b.eq_trans(b.eq_trans(a1, a2), nl_add(m, k))
        elif isinstance(term, Times):
            m, k = S.eval_closed_term(term.left), S.eval_closed_term(term.right)
            i, j = np(term.left), np(term.right)
            a1 = tl_at(i, term.right)  # u * v = m * v
            a2 = tr_numeral(m, j)  # m * v = m * k
            out = b.eq_trans(b.eq_trans(a1, a2), nl_mul(m, k))
        else:
            raise TransformError(f"unsupported term {term!r}")
        memo[term] = out
        return out

    np(t)
    return b.derivation()


# ---------------------------------------------------------------------------
# Equality replacement: |- x = y -> (A(x) <-> A(y)) in Pd[=]

def replacement_proof(a: Formula, x: Var, y: Var) -> K.Derivation:
    """Structural-induction proof generator for the replacement property."""
    S.validate(a, S.PROFILE_PDEQ)
    if x.sort is not S.Sort.NUMBER or y.sort is not S.Sort.NUMBER:
        raise TransformError("replacement works on number variables")
    if not S.free_for(TermVar(y), x, a):
        raise TransformError("y is not free for x in the formula")
    if y != x and y in S.free_vars(a):
        raise TransformError("y must not occur free in the formula")

    if y == x:
        b = B.ProofBuilder(K.SystemId.PDEQ, (Eq(TermVar(x), TermVar(x)),))
        i = b.identity(a)
        b.conj(i, i)
        return deduction_theorem(b.derivation())

    hyp = Eq(TermVar(x), TermVar(y))
    b = B.ProofBuilder(K.SystemId.PDEQ, (hyp,))

    def eq_uv(bb: B.ProofBuilder) -> int:
        return bb.hyp(0)

    def eq_vu(bb: B.ProofBuilder) -> int:
        return bb.eq_sym(bb.hyp(0))

    def direction(bb: B.ProofBuilder, prove_eq, u: Var, v: Var, f: Formula) -> int:
        """A step in bb proving F -> F[u := v], given prove_eq deriving u = v."""
        fv = S.substitute(f, u, TermVar(v))
        if u not in S.free_vars(f):
            return bb.identity(f)
        if isinstance(f, Pred):
            ax = bb.axiom("XE3", Implies(Eq(TermVar(u), TermVar(v)), Implies(f, fv)))
            return bb.mp(prove_eq(bb), ax)
        if isinstance(f, Eq):
            s, tt = f.left, f.right
            if s == TermVar(u) and tt == TermVar(u):
                refl = bb.eq_refl_at(TermVar(v))
                return bb.under(refl, f)
            if s == TermVar(u):
                tr = bb.eq_transitivity_at(TermVar(u), TermVar(v), tt)
                return bb.mp(prove_eq(bb), tr)
            # tt == TermVar(u): discharge F as a hypothesis and chain
            sb = B.ProofBuilder(bb.system, bb.hyps + (f,))
            h = sb.hyp(len(bb.hyps))
            sb.eq_trans(h, prove_eq(sb))
            d = deduction_theorem(sb.derivation())
            return bb.splice(d, [bb.hyp(i) for i in range(len(bb.hyps))])
        if isinstance(f, And):
            i1 = direction(bb, prove_eq, u, v, f.left)
            i2 = direction(bb, prove_eq, u, v, f.right)
            pl, ql = f.left, f.right
            pv, qv = S.substitute(pl, u, TermVar(v)), S.substitute(ql, u, TermVar(v))
            sb = B.ProofBuilder(bb.system, bb.hyps + (Implies(pl, pv), Implies(ql, qv), f))
            n = len(bb.hyps)
            hpq = sb.hyp(n + 2)
            sb.conj(sb.mp(sb.conj_left(hpq), sb.hyp(n)), sb.mp(sb.conj_right(hpq), sb.hyp(n + 1)))
            d = deduction_theorem(sb.derivation())
            return bb.splice(d, [bb.hyp(i) for i in range(n)] + [i1, i2])
        if isinstance(f, Or):
            i1 = direction(bb, prove_eq, u, v, f.left)
            i2 = direction(bb, prove_eq, u, v, f.right)
            pv, qv = S.substitute(f.left, u, TermVar(v)), S.substitute(f.right, u, TermVar(v))
            c1 = bb.syllogism(i1, bb.axiom("X6", Implies(pv, Or(pv, qv))))
            c2 = bb.syllogism(i2, bb.axiom("X7", Implies(qv, Or(pv, qv))))
            x8 = bb.axiom("X8", Implies(Implies(f.left, Or(pv, qv)),
                                        Implies(Implies(f.right, Or(pv, qv)),
                                                Implies(f, Or(pv, qv)))))
            return bb.mp(c2, bb.mp(c1, x8))
        if isinstance(f, Implies):
            rev = direction(bb, lambda z: _swap(prove_eq, z), v, u,
                            S.substitute(f.left, u, TermVar(v)))
            i2 = direction(bb, prove_eq, u, v, f.right)
            pl, ql = f.left, f.right
            pv, qv = S.substitute(pl, u, TermVar(v)), S.substitute(ql, u, TermVar(v))
            sb = B.ProofBuilder(bb.system, bb.hyps + (Implies(pv, pl), Implies(ql, qv), f, pv))
            n = len(bb.hyps)
            p = sb.mp(sb.hyp(n + 3), sb.hyp(n))
            q = sb.mp(p, sb.hyp(n + 2))
            sb.mp(q, sb.hyp(n + 1))
            d = deduction_theorem(deduction_theorem(sb.derivation(), n + 3), n + 2)
            return bb.splice(d, [bb.hyp(i) for i in range(n)] + [rev, i2])
        if isinstance(f, Not):
            rev = direction(bb, lambda z: _swap(prove_eq, z), v, u,
                            S.substitute(f.body, u, TermVar(v)))
            pl = f.body
            pv = S.substitute(pl, u, TermVar(v))
            sb = B.ProofBuilder(bb.system, bb.hyps + (Implies(pv, pl), f))
            n = len(bb.hyps)
            x9 = sb.axiom("X9", Implies(Implies(pv, pl),
                                        Implies(Implies(pv, Not(pl)), Not(pv))))
            half = sb.mp(sb.hyp(n), x9)
            sb.mp(sb.under(sb.hyp(n + 1), pv), half)
            d = deduction_theorem(sb.derivation(), n + 1)
            return bb.splice(d, [bb.hyp(i) for i in range(n)] + [rev])
        if isinstance(f, ForAll):
            z, body = f.var, f.body
            ip = direction(bb, prove_eq, u, v, body)
            x11 = bb.axiom("X11", Implies(f, body), hint=TermVar(z))
            chain = bb.syllogism(x11, ip)
            return bb.r2(chain, z)
        if isinstance(f, Exists):
            z, body = f.var, f.body
            ip = direction(bb, prove_eq, u, v, body)
            bodyv = S.substitute(body, u, TermVar(v))
            x12 = bb.axiom("X12", Implies(bodyv, Exists(z, bodyv)), hint=TermVar(z))
            chain = bb.syllogism(ip, x12)
            return bb.r3(chain, z)
        raise TypeError(f)

    def _swap(prove_eq, bb):
        # reverse the available equation inside bb
        return bb.eq_sym(prove_eq(bb))

    av = S.substitute(a, x, TermVar(y))
    d1 = direction(b, eq_uv, x, y, a)
    d2 = direction(b, eq_vu, y, x, av)
    b.conj(d1, d2)
    return deduction_theorem(b.derivation())
