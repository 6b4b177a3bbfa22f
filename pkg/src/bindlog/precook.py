"""Translation between the named binding layer and the sorted
explicit-substitution layer.

A term is translated against a context list of binder names, innermost
first: variables bound by enclosing symbols become de Bruijn indices,
remaining free variables are shielded by a shift chain so nothing can
capture them, and each symbol occurrence is tagged with the number of
binders it sits under. Propositions translate homomorphically; quantified
variables stay named. The inverse direction rebuilds named binders for
exactly the terms in the image of the translation.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from . import proofs, sigma, syntax
from .errors import InvalidSourceProof, NotAnFTerm
from .sigma import (
    Closure,
    FApp,
    FreeVar,
    Index,
    RewriteSystem,
    shift_chain,
)
from .syntax import And, Atom, Bottom, Exists, Forall, Imp, Or, Signature, Slot, Var


def precook(sig: Signature, t, ctx: tuple[str, ...] = ()):
    """Translate a term in a binder context (innermost name first). The
    result has sort len(ctx); lookup takes the leftmost occurrence.

    Indices past the first are emitted in their spelled-out normal form
    1[up ...]: the index-expansion rule makes the plain constants reducible,
    and the image of this translation must be normal.
    """
    if isinstance(t, Var):
        if t.name in ctx:
            return sigma.index_normal_form(ctx.index(t.name) + 1, len(ctx))
        if not ctx:
            return FreeVar(t.name)
        return Closure(FreeVar(t.name), shift_chain(0, len(ctx)))
    if isinstance(t, syntax.App):
        args = tuple(
            precook(sig, s.body, tuple(reversed(s.binders)) + ctx) for s in t.args
        )
        return FApp(t.symbol, len(ctx), args)
    raise TypeError(f"not a named term: {t!r}")


def precook_prop(sig: Signature, a):
    """Translate a proposition; atoms translate their arguments under the
    reversed binder lists, connectives and quantifiers are untouched."""
    if isinstance(a, Atom):
        return Atom(a.pred, tuple(
            Slot((), precook(sig, s.body, tuple(reversed(s.binders)))) for s in a.args
        ))
    if isinstance(a, (Imp, And, Or)):
        return type(a)(precook_prop(sig, a.a), precook_prop(sig, a.b))
    if isinstance(a, Bottom):
        return a
    if isinstance(a, (Forall, Exists)):
        return type(a)(a.var, precook_prop(sig, a.body))
    raise TypeError(f"not a proposition: {a!r}")


def _fresh_binder_namer(avoid: frozenset[str]):
    counter = itertools.count(1)

    def fresh() -> str:
        while True:
            cand = f"z{next(counter)}"
            if cand not in avoid:
                return cand

    return fresh


def uncook(sig: Signature, t):
    """Inverse of the term translation on its image: rebuilds named binders
    (freshly chosen) such that re-translating reproduces t exactly."""
    fresh = _fresh_binder_namer(sigma.all_names_l(t))
    return _uncook_term(sig, t, (), fresh)


def _uncook_term(sig, t, ctx: tuple[str, ...], fresh):
    if isinstance(t, Index):
        if t.n != len(ctx) or not (1 <= t.i <= t.n):
            raise NotAnFTerm(f"index {t.i}_{t.n} in a context of length {len(ctx)}")
        return Var(ctx[t.i - 1])
    if isinstance(t, FreeVar):
        if ctx:
            raise NotAnFTerm(f"unshielded variable {t.name!r} under {len(ctx)} binders")
        return Var(t.name)
    if isinstance(t, Closure):
        if isinstance(t.t, FreeVar) and ctx and t.s == shift_chain(0, len(ctx)):
            return Var(t.t.name)
        if isinstance(t.t, Index) and t.t.i == 1 and t.t.n < len(ctx) \
                and t.s == shift_chain(t.t.n, len(ctx) - t.t.n):
            # the spelled-out form of index len(ctx) - n + 1
            return Var(ctx[len(ctx) - t.t.n])
        raise NotAnFTerm(f"closure {sigma.print_lterm(t)} is not a variable reference here")
    if isinstance(t, FApp):
        if t.p != len(ctx):
            raise NotAnFTerm(f"{t.f}_{t.p} under {len(ctx)} binders")
        if t.f not in sig.functions or len(sig.functions[t.f]) != len(t.args):
            raise NotAnFTerm(f"bad application of {t.f!r}")
        slots = []
        for a, k in zip(t.args, sig.functions[t.f]):
            binders = tuple(fresh() for _ in range(k))
            body = _uncook_term(sig, a, tuple(reversed(binders)) + ctx, fresh)
            slots.append(Slot(binders, body))
        return syntax.App(t.f, tuple(slots))
    raise NotAnFTerm(f"{sigma.print_lterm(t)} is not in the image of the translation")


def uncook_prop(sig: Signature, a):
    # generated binders must dodge quantifier-bound names too, or a shielded
    # occurrence of a quantified variable could be captured
    fresh = _fresh_binder_namer(sigma.all_names_l(a))

    def go(a):
        if isinstance(a, Atom):
            if a.pred not in sig.predicates or len(sig.predicates[a.pred]) != len(a.args):
                raise NotAnFTerm(f"bad atom {a.pred!r}")
            slots = []
            for s, k in zip(a.args, sig.predicates[a.pred]):
                binders = tuple(fresh() for _ in range(k))
                body = _uncook_term(sig, s.body, tuple(reversed(binders)), fresh)
                slots.append(Slot(binders, body))
            return Atom(a.pred, tuple(slots))
        if isinstance(a, (Imp, And, Or)):
            return type(a)(go(a.a), go(a.b))
        if isinstance(a, Bottom):
            return a
        if isinstance(a, (Forall, Exists)):
            return type(a)(a.var, go(a.body))
        raise TypeError(f"not a proposition: {a!r}")

    return go(a)


# ---------------------------------------------------------------------------
# Substitution commutation (test utility)


def subst_commutes(sig: Signature, t, u, x: str,
                   rs: RewriteSystem | None = None,
                   budget: int = sigma.DEFAULT_BUDGET) -> bool:
    """Does substituting then translating agree with translating then
    substituting, up to normalization?

    For terms the right-hand side grafts (terms of the sorted layer carry no
    binders, so grafting and substitution coincide there); for propositions
    it substitutes, renaming quantified variables as needed.
    """
    if rs is None:
        rs = sigma.sigma_system(sig)
    tp = precook(sig, t)
    if isinstance(u, (Var, syntax.App)):
        lhs = precook(sig, syntax.substitute({x: t}, u))
        rhs = sigma.graft_l({x: tp}, precook(sig, u))
        return sigma.normalize(rs, lhs, budget=budget) == sigma.normalize(rs, rhs, budget=budget)
    lhs = precook_prop(sig, syntax.substitute({x: t}, u))
    rhs = sigma.substitute_l({x: tp}, precook_prop(sig, u))
    return sigma.alpha_eq_l(sigma.normalize(rs, lhs, budget=budget),
                            sigma.normalize(rs, rhs, budget=budget))


# ---------------------------------------------------------------------------
# Theories and proofs


@dataclass(frozen=True)
class TheoryModulo:
    axioms: tuple
    congruence: RewriteSystem


def translate_theory(sig: Signature, axioms) -> TheoryModulo:
    return TheoryModulo(tuple(precook_prop(sig, a) for a in axioms), sigma_system_for(sig))


def sigma_system_for(sig: Signature) -> RewriteSystem:
    return sigma.sigma_system(sig)


def translate_proof(sig: Signature, p: "proofs.ProofTree") -> "proofs.ProofTree":
    """Map a checked proof of the binding calculus to one of the calculus
    modulo the substitution congruence: same tree shape, pre-cooked
    sequents, quantifier nodes annotated with translated parameters."""
    res = proofs.check_binding_proof(sig, p)
    if not res.ok:
        raise InvalidSourceProof(str(res))

    def go(node: proofs.ProofTree) -> proofs.ProofTree:
        concl = proofs.Sequent(
            tuple(precook_prop(sig, a) for a in node.conclusion.left),
            tuple(precook_prop(sig, b) for b in node.conclusion.right),
        )
        app = node.rule
        x = a = t = None
        if app.rule in proofs.QUANTIFIER_RULES:
            qx, qa = proofs.principal_quantifier_parts(node)
            x = qx
            a = precook_prop(sig, qa)
            if app.rule in (proofs.Rule.ALL_L, proofs.Rule.EX_R):
                t = precook(sig, app.t)
        new_app = proofs.RuleApp(app.rule, principal=app.principal, x=x, a=a, t=t)
        return proofs.ProofTree(concl, new_app, tuple(go(q) for q in node.premises))

    return go(p)
