"""Seeded random generators for terms, propositions, and sorted terms.

Used by the probe harnesses, the model validators, and the test suite; all
functions are deterministic given the Random instance they are handed.
"""

from __future__ import annotations

import random

from . import sigma
from .syntax import (
    And,
    App,
    Atom,
    Bottom,
    Exists,
    Forall,
    Imp,
    Or,
    Signature,
    Slot,
    Var,
)

# the pools deliberately include counter-suffixed names so that clashes with
# fresh-name schemes are exercised, not dodged
DEFAULT_FREE = ("x", "y", "z", "u", "v", "x1", "z1")
_BINDER_POOL = ("x", "y", "z", "w", "b", "x1", "z2")
_QUANT_POOL = ("x", "y", "z", "w1", "x2")


def random_term(rng: random.Random, sig: Signature, size: int,
                free=DEFAULT_FREE, scope: tuple[str, ...] = ()):
    """Well-formed term over sig with free variables drawn from `free`;
    binder names are reused on purpose to exercise shadowing."""
    pool = tuple(scope) + tuple(free)
    funs = list(sig.functions.items())
    if size <= 1 or not funs or rng.random() < 0.25:
        return Var(rng.choice(pool))
    name, arity = rng.choice(funs)
    if not arity:
        return App(name, ())
    per_arg = max(1, (size - 1) // len(arity))
    args = []
    for k in arity:
        binders = []
        for _ in range(k):
            cand = rng.choice(_BINDER_POOL)
            while cand in binders:
                cand = cand + "'"
            binders.append(cand)
        body = random_term(rng, sig, rng.randint(1, per_arg), free,
                           scope=tuple(binders) + tuple(scope))
        args.append(Slot(tuple(binders), body))
    return App(name, tuple(args))


def random_prop(rng: random.Random, sig: Signature, size: int, free=DEFAULT_FREE,
                scope: tuple[str, ...] = ()):
    preds = list(sig.predicates.items())
    if size <= 2 or rng.random() < 0.3:
        if not preds:
            return Bottom()
        name, arity = rng.choice(preds)
        args = []
        for k in arity:
            binders = tuple(f"b{j}" for j in range(k))
            body = random_term(rng, sig, max(1, size // max(1, len(arity))), free,
                               scope=binders + tuple(scope))
            args.append(Slot(binders, body))
        return Atom(name, tuple(args))
    pick = rng.random()
    if pick < 0.15:
        return Bottom()
    if pick < 0.45:
        var = rng.choice(_QUANT_POOL)
        cls = Forall if rng.random() < 0.5 else Exists
        return cls(var, random_prop(rng, sig, size - 1, free, scope))
    cls = rng.choice((Imp, And, Or))
    half = max(1, size // 2)
    return cls(random_prop(rng, sig, half, free, scope),
               random_prop(rng, sig, half, free, scope))


def random_subst_map(rng: random.Random, sig: Signature, size: int = 4,
                     domain=DEFAULT_FREE, free=DEFAULT_FREE) -> dict:
    n = rng.randint(1, min(3, len(domain)))
    chosen = rng.sample(list(domain), n)
    return {v: random_term(rng, sig, rng.randint(1, size), free) for v in chosen}


# ---------------------------------------------------------------------------
# Sorted layer


def random_sort(rng: random.Random, hi: int = 3):
    if rng.random() < 0.6:
        return sigma.TermSort(rng.randrange(0, hi + 1))
    return sigma.SubstSort(rng.randrange(0, hi + 1), rng.randrange(0, hi + 1))


def leaf_of_sort(sort, free=DEFAULT_FREE, rng: random.Random | None = None):
    """A smallest sort-correct term of the requested sort."""
    if isinstance(sort, sigma.TermSort):
        n = sort.n
        if n == 0:
            name = rng.choice(free) if rng else free[0]
            return sigma.FreeVar(name)
        i = rng.randint(1, n) if rng else 1
        return sigma.Index(i, n)
    n, p = sort.n, sort.p
    if n == p:
        return sigma.Id(n)
    if n > p:
        return sigma.shift_chain(p, n - p)
    # n < p: cons leaves onto a smaller substitution
    return sigma.Cons(leaf_of_sort(sigma.TermSort(n), free, rng),
                      leaf_of_sort(sigma.SubstSort(n, p - 1), free, rng))


def random_lterm(rng: random.Random, sig: Signature | None, sort, size: int,
                 free=DEFAULT_FREE):
    """Sort-correct random term of the sorted layer, of the given sort."""
    if sig is None:
        sig = Signature({}, {})
    if size <= 1:
        return leaf_of_sort(sort, free, rng)
    if isinstance(sort, sigma.TermSort):
        n = sort.n
        choices = ["closure", "closure", "leaf"]
        funs = list(sig.functions.items())
        if funs:
            choices += ["fapp", "fapp"]
        pick = rng.choice(choices)
        if pick == "leaf":
            return leaf_of_sort(sort, free, rng)
        if pick == "fapp":
            f, arity = rng.choice(funs)
            per = max(1, (size - 1) // max(1, len(arity)))
            args = tuple(random_lterm(rng, sig, sigma.TermSort(k + n), rng.randint(1, per), free)
                         for k in arity)
            return sigma.FApp(f, n, args)
        p = rng.randrange(0, 4)
        t = random_lterm(rng, sig, sigma.TermSort(p), (size - 1) // 2 or 1, free)
        s = random_lterm(rng, sig, sigma.SubstSort(n, p), (size - 1) // 2 or 1, free)
        return sigma.Closure(t, s)
    n, p = sort.n, sort.p
    options = ["cons"] if p >= 1 else []
    options.append("comp")
    if n == p:
        options.append("id")
    if n == p + 1:
        options.append("shift")
    pick = rng.choice(options)
    if pick == "id":
        return sigma.Id(n)
    if pick == "shift":
        return sigma.Shift(p)
    if pick == "cons":
        t = random_lterm(rng, sig, sigma.TermSort(n), (size - 1) // 2 or 1, free)
        s = random_lterm(rng, sig, sigma.SubstSort(n, p - 1), (size - 1) // 2 or 1, free)
        return sigma.Cons(t, s)
    m = rng.randrange(0, max(n, p) + 2)
    s1 = random_lterm(rng, sig, sigma.SubstSort(m, p), (size - 1) // 2 or 1, free)
    s2 = random_lterm(rng, sig, sigma.SubstSort(n, m), (size - 1) // 2 or 1, free)
    return sigma.Comp(s1, s2)


def sigma_rule_instances(rng: random.Random, sig: Signature, rule_name: str,
                         count: int, size: int = 5):
    """Concrete (lhs, rhs) instances of one substitution rule; both sides are
    sort-correct and rhs is the one-step reduct of lhs under that rule."""
    rs = sigma.sigma_system(sig)
    rule = rs.rule(rule_name)
    out = []
    tries = 0
    while len(out) < count and tries < count * 200:
        tries += 1
        lhs = _rule_lhs_candidate(rng, sig, rule_name, size)
        if lhs is None:
            break
        rhs = rule.apply(lhs, sig)
        if rhs is None:
            continue
        out.append((lhs, rhs))
    if len(out) < count:
        raise ValueError(f"could not build {count} instances of {rule_name}")
    return out


def _rule_lhs_candidate(rng, sig, rule_name, size):
    T, S = sigma.TermSort, sigma.SubstSort
    n = rng.randrange(0, 3)
    p = rng.randrange(0, 3)
    t = lambda srt: random_lterm(rng, sig, srt, rng.randint(1, size))
    if rule_name == "IndexExpand":
        hi = rng.randrange(2, 6)
        return sigma.Index(rng.randint(2, hi), hi)
    if rule_name == "VarCons":
        body = t(T(n))
        tail = t(S(n, p))
        return sigma.Closure(sigma.Index(1, p + 1), sigma.Cons(body, tail))
    if rule_name == "Id":
        return sigma.Closure(t(T(n)), sigma.Id(n))
    if rule_name == "Clos":
        q = rng.randrange(0, 3)
        inner = sigma.Closure(t(T(q)), t(S(p, q)))
        return sigma.Closure(inner, t(S(n, p)))
    if rule_name == "IdL":
        return sigma.Comp(sigma.Id(n), t(S(p, n)))
    if rule_name == "ShiftCons":
        head = t(T(n))
        tail = t(S(n, p))
        return sigma.Comp(sigma.Shift(p), sigma.Cons(head, tail))
    if rule_name == "AssEnv":
        q = rng.randrange(0, 3)
        m = rng.randrange(0, 3)
        return sigma.Comp(sigma.Comp(t(S(q, m)), t(S(p, q))), t(S(n, p)))
    if rule_name == "MapEnv":
        q = rng.randrange(0, 3)
        return sigma.Comp(sigma.Cons(t(T(p)), t(S(p, n))), t(S(q, p)))
    if rule_name == "IdR":
        return sigma.Comp(t(S(n, p)), sigma.Id(n))
    if rule_name == "VarShift":
        return sigma.Cons(sigma.Index(1, n + 1), sigma.Shift(n))
    if rule_name == "SCons":
        s = t(S(n, p + 1))
        return sigma.Cons(sigma.Closure(sigma.Index(1, p + 1), s),
                          sigma.Comp(sigma.Shift(p), s))
    if rule_name == "FPush":
        funs = list(sig.functions.items())
        if not funs:
            return None
        f, arity = rng.choice(funs)
        args = tuple(t(T(k + p)) for k in arity)
        return sigma.Closure(sigma.FApp(f, p, args), t(S(n, p)))
    raise KeyError(rule_name)
