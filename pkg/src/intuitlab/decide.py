"""Terminating decision procedures for propositional logic.

decide_int implements a contraction-free single-succedent sequent search
with the four-way split of left-implication rules, so no loop checking is
needed.  decide_classical is the truth-table method.  Both serve as
oracles for the rest of the test suite; decide_int can optionally emit a
kernel-checkable Hilbert derivation.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Optional

from . import builder as B
from . import kernel as K
from . import syntax as S
from . import transform as T
from .syntax import And, Formula, Implies, Not, Or, Pred


class NotPropositional(Exception):
    pass


# internal representation: ("atom", name) | ("false",) | ("and"|"or"|"imp", l, r)
_FALSE = ("false",)


def _encode(f: Formula):
    if isinstance(f, Pred):
        if f.terms:
            raise NotPropositional(f"predicate with arguments: {S.format_formula(f)}")
        return ("atom", f.name)
    if isinstance(f, And):
        return ("and", _encode(f.left), _encode(f.right))
    if isinstance(f, Or):
        return ("or", _encode(f.left), _encode(f.right))
    if isinstance(f, Implies):
        return ("imp", _encode(f.left), _encode(f.right))
    if isinstance(f, Not):
        return ("imp", _encode(f.body), _FALSE)
    raise NotPropositional(f"not a propositional formula: {type(f).__name__}")


def _decode(e) -> Formula:
    if e[0] == "atom":
        return Pred(e[1])
    if e[0] == "and":
        return And(_decode(e[1]), _decode(e[2]))
    if e[0] == "or":
        return Or(_decode(e[1]), _decode(e[2]))
    if e[0] == "imp":
        if e[2] == _FALSE:
            return Not(_decode(e[1]))
        return Implies(_decode(e[1]), _decode(e[2]))
    raise ValueError(e)


@dataclass(frozen=True)
class Sequent:
    antecedent: frozenset
    succedent: object


# ---------------------------------------------------------------------------
# Provability search (no proof object, memoized)

def _atom(e) -> bool:
    return e[0] in ("atom", "false")


def _prove(gamma: frozenset, goal, memo) -> bool:
    key = (gamma, goal)
    if key in memo:
        return memo[key]
    memo[key] = False  # guards against accidental cycles; calculus terminates anyway
    result = _prove_raw(gamma, goal, memo)
    memo[key] = result
    return result


def _prove_raw(gamma: frozenset, goal, memo) -> bool:
    if _FALSE in gamma:
        return True
    if goal in gamma and _atom(goal):
        return True
    # invertible left rules
    for h in gamma:
        rest = gamma - {h}
        if h[0] == "and":
            return _prove(rest | {h[1], h[2]}, goal, memo)
        if h[0] == "or":
            return (_prove(rest | {h[1]}, goal, memo)
                    and _prove(rest | {h[2]}, goal, memo))
        if h[0] == "imp":
            ant = h[1]
            if _atom(ant) and ant in gamma:
                return _prove(rest | {h[2]}, goal, memo)
            if ant[0] == "and":
                return _prove(rest | {("imp", ant[1], ("imp", ant[2], h[2]))}, goal, memo)
            if ant[0] == "or":
                return _prove(
                    rest | {("imp", ant[1], h[2]), ("imp", ant[2], h[2])}, goal, memo
                )
    # invertible right rules
    if goal != _FALSE:
        if goal[0] == "and":
            return _prove(gamma, goal[1], memo) and _prove(gamma, goal[2], memo)
        if goal[0] == "imp":
            return _prove(gamma | {goal[1]}, goal[2], memo)
    # choice points: right disjunction and implication-implication hypotheses
    if goal != _FALSE and goal[0] == "or":
        if _prove(gamma, goal[1], memo) or _prove(gamma, goal[2], memo):
            return True
    for h in gamma:
        if h[0] == "imp" and h[1][0] == "imp":
            c, dd, bb = h[1][1], h[1][2], h[2]
            rest = gamma - {h}
            if (_prove(rest | {("imp", dd, bb)}, ("imp", c, dd), memo)
                    and _prove(rest | {bb}, goal, memo)):
                return True
    return False


def decide_int(f: Formula, emit_proof: bool = False):
    """'provable'/'unprovable' for intuitionistic propositional logic.

    With emit_proof=True, returns (verdict, Derivation-or-None); the
    derivation is a kernel-checkable Pp proof of f.
    """
    goal = _encode(f)
    provable = _prove(frozenset(), goal, {})
    if not emit_proof:
        return "provable" if provable else "unprovable"
    if not provable:
        return "unprovable", None
    tree = _prove_tree((), goal)
    assert tree is not None, "search and elaboration disagree"
    b = B.ProofBuilder(K.SystemId.PP)
    idx = _elab(b, tree, {})
    if idx != len(b.steps) - 1:
        b.steps.append(b.steps[idx])
    d = b.derivation()
    assert d.conclusion == f, (
        f"elaborated proof concludes {S.format_formula(d.conclusion)}, wanted {S.format_formula(f)}"
    )
    return "provable", d


def decide_classical(f: Formula):
    """'valid' or ('invalid', falsifying valuation) by truth tables."""
    goal = _encode(f)
    atoms = sorted({a for a in _atoms(goal)})

    def ev(e, val) -> bool:
        if e == _FALSE:
            return False
        if e[0] == "atom":
            return val[e[1]]
        if e[0] == "and":
            return ev(e[1], val) and ev(e[2], val)
        if e[0] == "or":
            return ev(e[1], val) or ev(e[2], val)
        return (not ev(e[1], val)) or ev(e[2], val)

    for bits in product((False, True), repeat=len(atoms)):
        val = dict(zip(atoms, bits))
        if not ev(goal, val):
            return "invalid", val
    return "valid", None


def _atoms(e):
    if e == _FALSE:
        return
    if e[0] == "atom":
        yield e[1]
        return
    if e[0] in ("and", "or", "imp"):
        yield from _atoms(e[1])
        yield from _atoms(e[2])


# ---------------------------------------------------------------------------
# Proof-tree construction (same calculus, explicit tree for elaboration)

@dataclass(frozen=True)
class _Node:
    rule: str
    gamma: tuple  # antecedent formulas, in order
    goal: object
    principal: object = None
    children: tuple = ()


def _prove_tree(gamma: tuple, goal) -> Optional[_Node]:
    gset = frozenset(gamma)
    if _FALSE in gset:
        return _Node("from-false", gamma, goal, _FALSE)
    if goal in gset and _atom(goal):
        return _Node("axiom", gamma, goal, goal)
    for h in gamma:
        rest = tuple(x for x in gamma if x != h)
        if h[0] == "and":
            sub = _prove_tree(rest + (h[1], h[2]), goal)
            return sub and _Node("l-and", gamma, goal, h, (sub,))
        if h[0] == "or":
            s1 = _prove_tree(rest + (h[1],), goal)
            if s1 is None:
                return None
            s2 = _prove_tree(rest + (h[2],), goal)
            return s2 and _Node("l-or", gamma, goal, h, (s1, s2))
        if h[0] == "imp":
            ant = h[1]
            if _atom(ant) and ant in gset:
                sub = _prove_tree(rest + (h[2],), goal)
                return sub and _Node("l-imp-atom", gamma, goal, h, (sub,))
            if ant[0] == "and":
                sub = _prove_tree(rest + (("imp", ant[1], ("imp", ant[2], h[2])),), goal)
                return sub and _Node("l-imp-and", gamma, goal, h, (sub,))
            if ant[0] == "or":
                sub = _prove_tree(
                    rest + (("imp", ant[1], h[2]), ("imp", ant[2], h[2])), goal
                )
                return sub and _Node("l-imp-or", gamma, goal, h, (sub,))
    if goal != _FALSE:
        if goal[0] == "and":
            s1 = _prove_tree(gamma, goal[1])
            if s1 is None:
                return None
            s2 = _prove_tree(gamma, goal[2])
            return s2 and _Node("r-and", gamma, goal, None, (s1, s2))
        if goal[0] == "imp":
            sub = _prove_tree(gamma + (goal[1],), goal[2])
            return sub and _Node("r-imp", gamma, goal, None, (sub,))
        if goal[0] == "or":
            s1 = _prove_tree(gamma, goal[1])
            if s1 is not None:
                return _Node("r-or-left", gamma, goal, None, (s1,))
            s2 = _prove_tree(gamma, goal[2])
            if s2 is not None:
                return _Node("r-or-right", gamma, goal, None, (s2,))
    for h in gamma:
        if h[0] == "imp" and h[1][0] == "imp":
            c, dd, bb = h[1][1], h[1][2], h[2]
            rest = tuple(x for x in gamma if x != h)
            s1 = _prove_tree(rest + (("imp", dd, bb),), ("imp", c, dd))
            if s1 is None:
                continue
            s2 = _prove_tree(rest + (bb,), goal)
            if s2 is not None:
                return _Node("l-imp-imp", gamma, goal, h, (s1, s2))
    return None


# ---------------------------------------------------------------------------
# Elaboration to Hilbert derivations
#
# The goal FALSE is elaborated to the fixed absurdity ~(P0 -> P0); a
# hypothesis list in the sequent becomes real hypotheses, discharged with
# the deduction theorem as the tree is replayed.

_P0 = Pred("P0")
_TRIV = Implies(_P0, _P0)
_ABS = Not(_TRIV)


def _u(e) -> Formula:
    """Untranslate; FALSE as a consequent is negation, elsewhere the canonical absurdity."""
    if e == _FALSE:
        return _ABS
    if e[0] == "atom":
        return Pred(e[1])
    if e[0] == "and":
        return And(_u(e[1]), _u(e[2]))
    if e[0] == "or":
        return Or(_u(e[1]), _u(e[2]))
    if e[0] == "imp":
        if e[2] == _FALSE:
            return Not(_u(e[1]))
        return Implies(_u(e[1]), _u(e[2]))
    raise ValueError(e)


def _neg_apply(b: B.ProofBuilder, pos: int, neg: int) -> int:
    """From X and ~X, derive the canonical absurdity ~(P0 -> P0)."""
    ux = b.formula(pos)
    t1 = b.under(pos, _TRIV)
    t2 = b.under(neg, _TRIV)
    x9 = b.axiom("X9", Implies(Implies(_TRIV, ux),
                               Implies(Implies(_TRIV, Not(ux)), _ABS)))
    return b.mp(t2, b.mp(t1, x9))


def _neg_intro(b: B.ProofBuilder, imp_abs: int) -> int:
    """From X -> ~(P0 -> P0), derive ~X."""
    ux = b.formula(imp_abs).left
    triv = b.identity(_P0)
    a_triv = b.under(triv, ux)
    x9 = b.axiom("X9", Implies(Implies(ux, _TRIV), Implies(Implies(ux, _ABS), Not(ux))))
    return b.mp(imp_abs, b.mp(a_triv, x9))


def _elab(b: B.ProofBuilder, node: _Node, env: dict) -> int:
    """Emit steps deriving node's goal from provided hypothesis steps.

    env maps each antecedent entry (by position) to a step index in b.
    Returns the step index of U(goal).
    """
    rule = node.rule
    gamma, goal = node.gamma, node.goal

    def apply_imp(minor: int, imp_step: int, consequent) -> int:
        """Use an (imp, X, B) hypothesis: plain mp, or the negation gadget for B = false."""
        if consequent == _FALSE:
            return _neg_apply(b, minor, imp_step)
        return b.mp(minor, imp_step)

    if rule == "axiom":
        return env[_find(gamma, node.principal)]
    if rule == "from-false":
        # an antecedent is the absurdity itself
        i = env[_find(gamma, _FALSE)]
        return _absurdity_elim(b, i, _u(goal))
    if rule == "l-and":
        h = node.principal
        i = env[_find(gamma, h)]
        left = b.conj_left(i)
        right = b.conj_right(i)
        child = node.children[0]
        cenv = _reindex(gamma, h, child.gamma, env, [left, right])
        return _elab(b, child, cenv)
    if rule == "l-or":
        h = node.principal
        i = env[_find(gamma, h)]
        c1, c2 = node.children
        g = _u(goal)
        d1 = _under_hyp(b, c1, gamma, h, env, _u(h[1]))
        d2 = _under_hyp(b, c2, gamma, h, env, _u(h[2]))
        x8 = b.axiom("X8", Implies(Implies(_u(h[1]), g),
                                   Implies(Implies(_u(h[2]), g), Implies(_u(h), g))))
        imp = b.mp(d2, b.mp(d1, x8))
        return b.mp(i, imp)
    if rule == "l-imp-atom":
        h = node.principal
        i = env[_find(gamma, h)]
        minor = env[_find(gamma, h[1])]
        derived = apply_imp(minor, i, h[2])
        child = node.children[0]
        cenv = _reindex(gamma, h, child.gamma, env, [derived])
        return _elab(b, child, cenv)
    if rule == "l-imp-and":
        h = node.principal
        i = env[_find(gamma, h)]
        c, dd, bb = h[1][1], h[1][2], h[2]
        uc, ud = _u(c), _u(dd)
        # from (C & D) -> B (or ~(C & D)) derive U(C -> (D -> B))
        sb_hyps = b.hyps + (b.formula(i), uc, ud)
        sb = B.ProofBuilder(b.system, sb_hyps)
        n = len(b.hyps)
        both = sb.conj(sb.hyp(n + 1), sb.hyp(n + 2))
        if bb == _FALSE:
            _neg_apply(sb, both, sb.hyp(n))
        else:
            sb.mp(both, sb.hyp(n))
        d1 = T.deduction_theorem(sb.derivation(), n + 2, verify=False)
        # discharge D and, for B = false, turn D -> absurdity into ~D before discharging C
        sb2 = B.ProofBuilder(b.system, d1.hyps)
        got = sb2.splice(d1, [sb2.hyp(k) for k in range(len(d1.hyps))])
        if bb == _FALSE:
            got = _neg_intro(sb2, got)
        d2 = T.deduction_theorem(sb2.derivation(), n + 1, verify=False)
        exported = b.splice(d2, [b.hyp(k) for k in range(n)] + [i])
        child = node.children[0]
        cenv = _reindex(gamma, h, child.gamma, env, [exported])
        return _elab(b, child, cenv)
    if rule == "l-imp-or":
        h = node.principal
        i = env[_find(gamma, h)]
        c, dd = h[1][1], h[1][2]

        def inject(part, axname) -> int:
            # derive U(part -> B) from U((C|D) -> B)
            upart = _u(part)
            sb_hyps = b.hyps + (b.formula(i), upart)
            sb = B.ProofBuilder(b.system, sb_hyps)
            n = len(b.hyps)
            disj = sb.mp(sb.hyp(n + 1), sb.axiom(axname, Implies(upart, _u(h[1]))))
            if h[2] == _FALSE:
                _neg_apply(sb, disj, sb.hyp(n))
            else:
                sb.mp(disj, sb.hyp(n))
            d1 = T.deduction_theorem(sb.derivation(), n + 1, verify=False)
            sb2 = B.ProofBuilder(b.system, d1.hyps)
            got = sb2.splice(d1, [sb2.hyp(k) for k in range(len(d1.hyps))])
            if h[2] == _FALSE:
                got = _neg_intro(sb2, got)
                d2 = sb2.derivation()
                return b.splice(d2, [b.hyp(k) for k in range(n)] + [i])
            return b.splice(d1, [b.hyp(k) for k in range(n)] + [i])

        s1 = inject(c, "X6")
        s2 = inject(dd, "X7")
        child = node.children[0]
        cenv = _reindex(gamma, h, child.gamma, env, [s1, s2])
        return _elab(b, child, cenv)
    if rule == "l-imp-imp":
        h = node.principal
        i = env[_find(gamma, h)]
        c, dd, bb = h[1][1], h[1][2], h[2]
        # derive U((D -> B)) from U((C -> D) -> B)
        uc = _u(c)
        ucd = _u(h[1])
        sb_hyps = b.hyps + (b.formula(i), _u(dd))
        sb = B.ProofBuilder(b.system, sb_hyps)
        n = len(b.hyps)
        if dd == _FALSE:
            cd = _absurdity_elim(sb, sb.hyp(n + 1), ucd)
        else:
            cd = sb.under(sb.hyp(n + 1), uc)  # C -> D from D
        inner = _neg_apply(sb, cd, sb.hyp(n)) if bb == _FALSE else sb.mp(cd, sb.hyp(n))
        d1 = T.deduction_theorem(sb.derivation(), n + 1, verify=False)
        sb2 = B.ProofBuilder(b.system, d1.hyps)
        got = sb2.splice(d1, [sb2.hyp(k) for k in range(len(d1.hyps))])
        if bb == _FALSE:
            got = _neg_intro(sb2, got)
            d_to_b = b.splice(sb2.derivation(), [b.hyp(k) for k in range(n)] + [i])
        else:
            d_to_b = b.splice(d1, [b.hyp(k) for k in range(n)] + [i])
        child1, child2 = node.children
        cenv1 = _reindex(gamma, h, child1.gamma, env, [d_to_b])
        c_to_d = _elab(b, child1, cenv1)
        got_b = apply_imp(c_to_d, i, bb)
        if bb == _FALSE:
            return _absurdity_elim(b, got_b, _u(goal)) if goal != _FALSE else got_b
        cenv2 = _reindex(gamma, h, child2.gamma, env, [got_b])
        return _elab(b, child2, cenv2)
    if rule == "r-and":
        i1 = _elab(b, node.children[0], env)
        i2 = _elab(b, node.children[1], env)
        return b.conj(i1, i2)
    if rule == "r-or-left":
        i = _elab(b, node.children[0], env)
        return b.mp(i, b.axiom("X6", Implies(_u(goal[1]), _u(goal))))
    if rule == "r-or-right":
        i = _elab(b, node.children[0], env)
        return b.mp(i, b.axiom("X7", Implies(_u(goal[2]), _u(goal))))
    if rule == "r-imp":
        ant, con = goal[1], goal[2]
        imp = _under_hyp(b, node.children[0], gamma, None, env, _u(ant))
        if con != _FALSE:
            return imp
        # the goal was a negation: from A -> absurdity conclude ~A
        ua = _u(ant)
        triv = b.identity(_P0)
        a_triv = b.under(triv, ua)  # A -> (P0 -> P0)
        x9 = b.axiom("X9", Implies(Implies(ua, _TRIV),
                                   Implies(Implies(ua, _ABS), Not(ua))))
        return b.mp(imp, b.mp(a_triv, x9))
    raise ValueError(rule)


def _find(gamma: tuple, h) -> int:
    return gamma.index(h)


def _reindex(gamma: tuple, principal, child_gamma: tuple, env: dict, new_steps: list) -> dict:
    """Build the child's env: surviving hypotheses keep their steps, new ones get new_steps."""
    survivors = [k for k, g in enumerate(gamma) if g != principal]
    cenv = {}
    for pos, k in enumerate(survivors):
        cenv[pos] = env[k]
    base = len(survivors)
    for off, st in enumerate(new_steps):
        cenv[base + off] = st
    return cenv


def _under_hyp(b: B.ProofBuilder, child: _Node, gamma: tuple, principal, env: dict,
               extra: Formula) -> int:
    """Elaborate a child with one extra hypothesis, then discharge it."""
    survivors = [k for k, g in enumerate(gamma) if principal is None or g != principal]
    sb_hyps = b.hyps + tuple(b.formula(env[k]) for k in survivors) + (extra,)
    sb = B.ProofBuilder(b.system, sb_hyps)
    n = len(b.hyps)
    cenv = {pos: sb.hyp(n + pos) for pos in range(len(survivors))}
    cenv[len(survivors)] = sb.hyp(n + len(survivors))
    ret = _elab(sb, child, cenv)
    if ret != len(sb.steps) - 1:
        sb.steps.append(sb.steps[ret])
    d = T.deduction_theorem(sb.derivation(), len(sb_hyps) - 1, verify=False)
    providers = [b.hyp(k) for k in range(n)] + [env[k] for k in survivors]
    return b.splice(d, providers)


def _absurdity_elim(b: B.ProofBuilder, absurd: int, target: Formula) -> int:
    """From ~(P0 -> P0), derive anything via X10."""
    if b.formula(absurd) == target:
        return absurd
    triv = b.identity(_P0)
    x10 = b.axiom("X10", Implies(_ABS, Implies(_TRIV, target)))
    return b.mp(triv, b.mp(absurd, x10))


