"""Forward proof construction helpers used by the proof-generating transforms.

A ProofBuilder accumulates kernel-checkable steps; every axiom step is
matched against its schema immediately, so ill-formed constructions fail
at the point of construction rather than at final checking.
"""

from __future__ import annotations

from typing import Optional

from . import kernel as K
from . import syntax as S
from .syntax import And, Eq, Exists, ForAll, Formula, Implies, Not, Pred, Sort, TermVar, Var, ZERO


class BuildError(Exception):
    pass


def trivial_true(system: K.SystemId) -> Formula:
    """A closed formula with a canned proof in the system (P0 -> P0 or 0=0 -> 0=0)."""
    profile = K.SYSTEM_PROFILE[system]
    base: Formula = Pred("P0") if profile.predicates else Eq(ZERO, ZERO)
    return Implies(base, base)


class ProofBuilder:
    def __init__(self, system: K.SystemId, hyps=()):
        self.system = system
        self.hyps: tuple[Formula, ...] = tuple(hyps)
        self.steps: list[K.Step] = []
        self._identity_cache: dict[Formula, int] = {}
        self._dedup: dict = {}
        self._prelude: dict[str, int] = {}
        self._hyp_free: set[Var] = set()
        for h in self.hyps:
            self._hyp_free |= S.free_vars(h)

    def formula(self, i: int) -> Formula:
        return self.steps[i].formula

    def _add(self, f: Formula, j) -> int:
        key = (f, j)
        if key in self._dedup:
            return self._dedup[key]
        self.steps.append(K.Step(f, j))
        idx = len(self.steps) - 1
        self._dedup[key] = idx
        return idx

    def hyp(self, index: int) -> int:
        return self._add(self.hyps[index], K.HypStep(index))

    def axiom(self, schema: str, f: Formula, hint=None) -> int:
        key = schema.upper()
        if K.match_axiom(key, f, self.system, hint) is None:
            raise BuildError(f"{S.format_formula(f)} is not an instance of {schema}")
        return self._add(f, K.AxiomStep(key, hint))

    def defax(self, fn: str, index: int) -> int:
        return self._add(K.defining_axiom(fn, index), K.DefStep(fn, index))

    def mp(self, minor: int, major: int) -> int:
        mj = self.formula(major)
        if not isinstance(mj, Implies) or mj.left != self.formula(minor):
            raise BuildError(
                f"mp mismatch: {S.format_formula(self.formula(minor))} vs {S.format_formula(mj)}"
            )
        return self._add(mj.right, K.RuleStep("mp", (minor, major)))

    def _gen_rule(self, rule: str, premise: int, x: Var) -> int:
        p = self.formula(premise)
        if not isinstance(p, Implies):
            raise BuildError(f"{rule} premise must be an implication")
        if rule in ("r2", "r4"):
            c, a = p.left, p.right
            concl: Formula = Implies(c, ForAll(x, a))
        else:
            a, c = p.left, p.right
            concl = Implies(Exists(x, a), c)
        if x in S.free_vars(c):
            raise BuildError(f"{x} free in the side formula of {rule}")
        return self._add(concl, K.RuleStep(rule, (premise,)))

    def r2(self, premise: int, x: Var) -> int:
        return self._gen_rule("r2" if x.sort is Sort.NUMBER else "r4", premise, x)

    def r3(self, premise: int, x: Var) -> int:
        return self._gen_rule("r3" if x.sort is Sort.NUMBER else "r5", premise, x)

    def derivation(self) -> K.Derivation:
        return K.Derivation(self.system, self.hyps, tuple(self.steps))

    def splice(self, d: K.Derivation, providers=()) -> int:
        """Inline another derivation; providers[i] is our step index proving d.hyps[i]."""
        if d.system != self.system:
            raise BuildError("cannot splice across systems")
        mapping: dict[int, int] = {}
        for idx, st in enumerate(d.steps):
            j = st.just
            if isinstance(j, K.HypStep):
                prov = providers[j.index]
                if self.formula(prov) != st.formula:
                    raise BuildError("provider formula does not match spliced hypothesis")
                mapping[idx] = prov
            elif isinstance(j, K.RuleStep):
                mapping[idx] = self._add(
                    st.formula, K.RuleStep(j.rule, tuple(mapping[p] for p in j.premises))
                )
            else:
                mapping[idx] = self._add(st.formula, j)
        return mapping[len(d.steps) - 1]

    # ------------------------------------------------------------------
    # derived moves

    def identity(self, a: Formula) -> int:
        """A -> A by the classic X1/X2 argument."""
        if a in self._identity_cache:
            return self._identity_cache[a]
        aa = Implies(a, a)
        s1 = self.axiom("X1", Implies(a, aa))
        s2 = self.axiom("X2", Implies(Implies(a, aa),
                                      Implies(Implies(a, Implies(aa, a)), aa)))
        s3 = self.mp(s1, s2)
        s4 = self.axiom("X1", Implies(a, Implies(aa, a)))
        out = self.mp(s4, s3)
        self._identity_cache[a] = out
        return out

    def under(self, i: int, c: Formula) -> int:
        """From a proved A, conclude C -> A."""
        a = self.formula(i)
        x1 = self.axiom("X1", Implies(a, Implies(c, a)))
        return self.mp(i, x1)

    def syllogism(self, i: int, j: int) -> int:
        """From A -> B and B -> C, conclude A -> C."""
        ab = self.formula(i)
        bc = self.formula(j)
        if not (isinstance(ab, Implies) and isinstance(bc, Implies) and ab.right == bc.left):
            raise BuildError("syllogism premises do not chain")
        a, b, c = ab.left, ab.right, bc.right
        s1 = self.under(j, a)  # A -> (B -> C)
        x2 = self.axiom("X2", Implies(Implies(a, b),
                                      Implies(Implies(a, Implies(b, c)), Implies(a, c))))
        s2 = self.mp(i, x2)
        return self.mp(s1, s2)

    def conj(self, i: int, j: int) -> int:
        """From A and B, conclude A & B."""
        a, b = self.formula(i), self.formula(j)
        x3 = self.axiom("X3", Implies(a, Implies(b, And(a, b))))
        return self.mp(j, self.mp(i, x3))

    def conj_left(self, i: int) -> int:
        f = self.formula(i)
        if not isinstance(f, And):
            raise BuildError("not a conjunction")
        return self.mp(i, self.axiom("X4", Implies(f, f.left)))

    def conj_right(self, i: int) -> int:
        f = self.formula(i)
        if not isinstance(f, And):
            raise BuildError("not a conjunction")
        return self.mp(i, self.axiom("X5", Implies(f, f.right)))

    def trivially_provable(self) -> int:
        return self.identity(trivial_true(self.system).left)

    def generalize(self, i: int, x: Var) -> int:
        """From a proved A, conclude all x. A (via the X1/R2 detour)."""
        a = self.formula(i)
        c = trivial_true(self.system)
        ci = self.identity(c.left)
        s = self.under(i, c)
        g = self.r2(s, x)
        return self.mp(ci, g)

    def instantiate(self, i: int, t) -> int:
        """From all x. A, conclude A(t)."""
        f = self.formula(i)
        if not isinstance(f, ForAll):
            raise BuildError("instantiate needs a universal formula")
        x, a = f.var, f.body
        if not S.free_for(t, x, a):
            raise BuildError(f"{t} not free for {x}")
        inst = S.substitute(a, x, t)
        sch = "X11" if x.sort is Sort.NUMBER else "X13"
        ax = self.axiom(sch, Implies(f, inst), hint=t)
        return self.mp(i, ax)

    def exists_intro(self, i: int, x: Var, a: Formula, t) -> int:
        """From a proved A(t), conclude ex x. A  (a is the matrix with x free)."""
        inst = S.substitute(a, x, t)
        if inst != self.formula(i):
            raise BuildError("witness instance differs from the proved formula")
        sch = "X12" if x.sort is Sort.NUMBER else "X14"
        ax = self.axiom(sch, Implies(inst, Exists(x, a)), hint=t)
        return self.mp(i, ax)

    def specialize(self, i: int, x: Var, t) -> int:
        """From a proved A with x free, conclude A[x := t]."""
        return self.instantiate(self.generalize(i, x), t)

    def forall_elim_all(self, i: int, terms) -> int:
        """Instantiate a block of leading universals, avoiding capture via fresh variables."""
        # fast path: plain nested instantiation when no capture can occur
        g = self.formula(i)
        ok = True
        for t in terms:
            if not isinstance(g, ForAll):
                raise BuildError("fewer universal quantifiers than instantiation terms")
            if not S.free_for(t, g.var, g.body):
                ok = False
                break
            g = S.substitute(g.body, g.var, t)
        if ok:
            cur = i
            for t in terms:
                cur = self.instantiate(cur, t)
            return cur

        f = self.formula(i)
        binders: list[Var] = []
        g = f
        for _ in terms:
            binders.append(g.var)
            g = g.body
        avoid = set(self._hyp_free) | S.all_vars(f)
        for t in terms:
            avoid |= S.all_vars(t) if not isinstance(t, Var) else {t}
        cur = i
        fresh: list[Var] = []
        for v in binders:
            v2 = S.fresh_var(v.name, avoid, v.sort)
            avoid.add(v2)
            fresh.append(v2)
            cur = self.instantiate(cur, TermVar(v2) if v2.sort is Sort.NUMBER else S.FunctorVar(v2))
        for v2, t in zip(fresh, terms):
            cur = self.specialize(cur, v2, t)
        return cur

    # equality helpers -------------------------------------------------

    _XN_SHAPES = {
        "XN1": (2, lambda x, y: Implies(Eq(TermVar(x), TermVar(y)),
                                        Eq(S.Succ(TermVar(x)), S.Succ(TermVar(y))))),
        "XN2": (2, lambda x, y: Implies(Eq(S.Succ(TermVar(x)), S.Succ(TermVar(y))),
                                        Eq(TermVar(x), TermVar(y)))),
        "XN3": (1, lambda x: Not(Eq(S.Succ(TermVar(x)), ZERO))),
        "XN4": (1, lambda x: Eq(S.Plus(TermVar(x), ZERO), TermVar(x))),
        "XN5": (2, lambda x, y: Eq(S.Plus(TermVar(x), S.Succ(TermVar(y))),
                                   S.Succ(S.Plus(TermVar(x), TermVar(y))))),
        "XN6": (1, lambda x: Eq(S.Times(TermVar(x), ZERO), ZERO)),
        "XN7": (2, lambda x, y: Eq(S.Times(TermVar(x), S.Succ(TermVar(y))),
                                   S.Plus(S.Times(TermVar(x), TermVar(y)), TermVar(x)))),
    }

    def closure_of(self, key: str) -> int:
        """The universal closure of a base axiom, derived once per builder.

        Keys: XE1, XE2, REFL, XN1..XN7.
        """
        if key in self._prelude:
            return self._prelude[key]
        avoid = set(self._hyp_free)
        if key == "XE1":
            a = S.fresh_var("qa", avoid)
            b = S.fresh_var("qb", avoid | {a})
            c = S.fresh_var("qc", avoid | {a, b})
            ax = self.axiom(
                "XE1",
                Implies(Eq(TermVar(a), TermVar(b)),
                        Implies(Eq(TermVar(a), TermVar(c)), Eq(TermVar(b), TermVar(c)))),
            )
            out = self.generalize(self.generalize(self.generalize(ax, c), b), a)
        elif key == "XE2":
            x = S.fresh_var("qa", avoid)
            out = self.generalize(self.axiom("XE2", Eq(TermVar(x), TermVar(x))), x)
        elif key == "REFL":
            if "XE2" in K.SYSTEM_AXIOMS[self.system]:
                out = self.closure_of("XE2")
            else:
                # HA: from x + 0 = x and XE1 conclude all x. x = x
                x = S.fresh_var("qa", avoid)
                xn4 = self.forall_elim_all(self.closure_of("XN4"), [TermVar(x)])
                tr = self.forall_elim_all(
                    self.closure_of("XE1"),
                    [S.Plus(TermVar(x), ZERO), TermVar(x), TermVar(x)],
                )
                out = self.generalize(self.mp(xn4, self.mp(xn4, tr)), x)
        elif key in self._XN_SHAPES:
            arity, shape = self._XN_SHAPES[key]
            xs = []
            for _ in range(arity):
                v = S.fresh_var("qa" if not xs else "qb", avoid | set(xs))
                xs.append(v)
            ax = self.axiom(key, shape(*xs))
            out = ax
            for v in reversed(xs):
                out = self.generalize(out, v)
        else:
            raise BuildError(f"no closure rule for {key}")
        self._prelude[key] = out
        return out

    def eq_transitivity_at(self, s, t, u) -> int:
        """s = t -> (s = u -> t = u) for arbitrary terms, via generalized XE1."""
        return self.forall_elim_all(self.closure_of("XE1"), [s, t, u])

    def eq_refl_at(self, t) -> int:
        """t = t (from XE2 when available, else from XN4 + XE1)."""
        return self.forall_elim_all(self.closure_of("REFL"), [t])

    def _xn_at(self, schema: str, *terms) -> int:
        """An XN axiom instantiated at arbitrary terms."""
        return self.forall_elim_all(self.closure_of(schema), list(terms))

    def eq_sym(self, i: int) -> int:
        """From s = t, conclude t = s."""
        e = self.formula(i)
        if not isinstance(e, Eq):
            raise BuildError("eq_sym needs an equation")
        s, t = e.left, e.right
        tr = self.eq_transitivity_at(s, t, s)  # s=t -> (s=s -> t=s)
        refl = self.eq_refl_at(s)
        return self.mp(refl, self.mp(i, tr))

    def eq_trans(self, i: int, j: int) -> int:
        """From s = t and t = u, conclude s = u."""
        e1, e2 = self.formula(i), self.formula(j)
        if not (isinstance(e1, Eq) and isinstance(e2, Eq) and e1.right == e2.left):
            raise BuildError("eq_trans premises do not chain")
        s, t, u = e1.left, e1.right, e2.right
        tr = self.eq_transitivity_at(t, s, u)  # t=s -> (t=u -> s=u)
        ts = self.eq_sym(i)
        return self.mp(j, self.mp(ts, tr))

    def eq_succ_cong(self, i: int) -> int:
        """From s = t, conclude s' = t'."""
        e = self.formula(i)
        xn1 = self._xn_at("XN1", e.left, e.right)
        return self.mp(i, xn1)
