"""Hand-built derivations in the plain calculus, at least one per rule.

Shared between the proof-checker tests and the acceptance suite. Premises
follow the positional conventions of the checker: rule-introduced formulas
sit at the end of the left side and at the front of the right side.
"""

from bindlog.proofs import ProofTree, Rule, RuleApp, Sequent
from bindlog.syntax import Signature, parse_prop, parse_term

CORPUS_SIG = Signature(
    {"f": (0,), "Λ": (1,), "c": ()},
    {"=": (0, 0), "P": (0,), "Q": (), "R2": (0, 0)},
)


def P(s):
    return parse_prop(s, CORPUS_SIG)


def T(s):
    return parse_term(s, CORPUS_SIG)


def node(rule, left, right, *premises, principal=None, x=None, a=None, t=None):
    return ProofTree(Sequent(tuple(left), tuple(right)),
                     RuleApp(rule, principal=principal, x=x, a=a, t=t),
                     tuple(premises))


def axiom(p):
    return node(Rule.AXIOM, [p], [p])


def equality_compat_derivation():
    """The axiom-of-equality instance: from the compatibility axiom and a
    hypothesis y = z, derive the binder application equality. Uses all-left
    twice, imp-left, and weakenings to shed contexts before the axioms."""
    axiom_all = P("forall y. forall z. =(y, z) => =(Λ(x. y), Λ(x. z))")
    hyp = P("=(y, z)")
    goal = P("=(Λ(x. y), Λ(x. z))")
    inner = P("forall z1. =(y, z1) => =(Λ(x. y), Λ(x. z1))")
    impf = P("=(y, z) => =(Λ(x. y), Λ(x. z))")
    wr = node(Rule.WEAK_R, [hyp], [hyp, goal], axiom(hyp), principal=1)
    wl = node(Rule.WEAK_L, [hyp, goal], [goal], axiom(goal), principal=0)
    impl = node(Rule.IMP_L, [hyp, impf], [goal], wr, wl, principal=1)
    alll2 = node(Rule.ALL_L, [hyp, inner], [goal], impl, principal=1, t=T("z"))
    return node(Rule.ALL_L, [axiom_all, hyp], [goal], alll2, principal=0, t=T("y"))


def corpus():
    q = P("Q")
    px = P("P(x)")
    pc = P("P(c())")

    yield "axiom", axiom(q)

    yield "weak-left", node(Rule.WEAK_L, [q, px], [q], axiom(q), principal=1)
    yield "weak-right", node(Rule.WEAK_R, [q], [px, q], axiom(q), principal=0)

    yield "contr-left", node(
        Rule.CONTR_L, [q], [q],
        node(Rule.WEAK_L, [q, q], [q], axiom(q), principal=1),
        principal=0)
    yield "contr-right", node(
        Rule.CONTR_R, [q], [q],
        node(Rule.WEAK_R, [q], [q, q], axiom(q), principal=0),
        principal=0)

    yield "imp-right", node(Rule.IMP_R, [], [P("Q => Q")], axiom(q))

    yield "imp-left", node(
        Rule.IMP_L, [q, P("Q => P(x)")], [px],
        node(Rule.WEAK_R, [q], [q, px], axiom(q), principal=1),
        node(Rule.WEAK_L, [q, px], [px], axiom(px), principal=0),
        principal=1)

    yield "and-right", node(
        Rule.AND_R, [q, px], [P("Q /\\ P(x)")],
        node(Rule.WEAK_L, [q, px], [q], axiom(q), principal=1),
        node(Rule.WEAK_L, [q, px], [px], axiom(px), principal=0),
        principal=0)
    yield "and-left", node(
        Rule.AND_L, [P("Q /\\ P(x)")], [q],
        node(Rule.WEAK_L, [q, px], [q], axiom(q), principal=1),
        principal=0)

    yield "or-left", node(Rule.OR_L, [P("Q \\/ Q")], [q], axiom(q), axiom(q), principal=0)
    yield "or-right", node(
        Rule.OR_R, [q], [P("Q \\/ P(x)")],
        node(Rule.WEAK_R, [q], [q, px], axiom(q), principal=1),
        principal=0)

    yield "bot-left", node(Rule.BOT_L, [P("false")], [q], principal=0)

    yield "cut", node(
        Rule.CUT, [q], [q],
        node(Rule.WEAK_L, [q, pc], [q], axiom(q), principal=1),
        node(Rule.WEAK_R, [q], [pc, q], axiom(q), principal=0))

    yield "forall-chain", node(
        Rule.ALL_R, [P("forall x. P(x)")], [P("forall y. P(y)")],
        node(Rule.ALL_L, [P("forall x. P(x)")], [P("P(y)")],
             axiom(P("P(y)")), principal=0, t=T("y")),
        principal=0)

    yield "exists-chain", node(
        Rule.EX_L, [P("exists x. P(x)")], [P("exists y. P(y)")],
        node(Rule.EX_R, [px], [P("exists y. P(y)")],
             axiom(px), principal=0, t=T("x")),
        principal=0)

    all_xy = P("forall x. forall y. R2(x, y)")
    yield "quantifier-swap", node(
        Rule.ALL_R, [all_xy], [P("forall y. forall x. R2(x, y)")],
        node(Rule.ALL_R, [all_xy], [P("forall x. R2(x, y)")],
             node(Rule.ALL_L, [all_xy], [P("R2(x, y)")],
                  node(Rule.ALL_L, [P("forall y. R2(x, y)")], [P("R2(x, y)")],
                       axiom(P("R2(x, y)")), principal=0, t=T("y")),
                  principal=0, t=T("x")),
             principal=0),
        principal=0)

    # the wrong context for the inner all-left above: its left side must be
    # the instantiated axiom, produced by the outer all-left
    yield "nested-all-left", node(
        Rule.ALL_L, [P("forall x. forall y. R2(x, y)")], [P("R2(c(), c())")],
        node(Rule.ALL_L, [P("forall y. R2(c(), y)")], [P("R2(c(), c())")],
             axiom(P("R2(c(), c())")), principal=0, t=T("c()")),
        principal=0, t=T("c()"))

    # witness with structure under a binder: the translation exercises the
    # closure-pushing rules when this one goes through the pipeline
    yield "binder-witness", node(
        Rule.ALL_L, [P("forall x. R2(x, Λ(z. x))")], [P("R2(f(y), Λ(z. f(y)))")],
        axiom(P("R2(f(y), Λ(z. f(y)))")),
        principal=0, t=T("f(y)"))

    yield "equality-compat", equality_compat_derivation()
