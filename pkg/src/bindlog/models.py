"""Intensional functional structures, binding models, denotations, validity
sweeps, the built-in counter-models, and the adapters between binding models
and models of the sorted explicit-substitution layer.

Elements of the carrier at level n behave like n-argument intensional
functions; argument positions follow the evaluation context, innermost bound
variable first. Carriers may be finite and enumerated (the extensionality
counter-model, full function spaces over a finite set) or computable with
probe-based equality (the disjoint-sum counter-model over the naturals).
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Callable, Mapping

from . import gen, precook, sigma, syntax
from .errors import (
    BindLogError,
    InfiniteDomainExhaustionRequested,
    ParseError,
    UnboundVariable,
)
from .syntax import And, App, Atom, Bottom, Exists, Forall, Imp, Or, Signature, Var


@dataclass(frozen=True)
class Computable:
    """Carrier element given by a total function on tuples of naturals;
    compared on a declared probe set, so equality is approximate."""

    arity: int
    fn: Callable


@dataclass(frozen=True)
class IFS:
    """Carriers M0, M1, ... with projections and composition.

    carrier(n) returns the enumerated level or None when not enumerable;
    box(a, bs, p) composes a (at level len(bs)) with elements of level p;
    elem_eq compares two elements of one level; sample draws a random
    element for sampled sweeps over non-enumerable carriers.
    """

    carrier: Callable[[int], tuple | None]
    proj: Callable[[int, int], object]
    box: Callable[[object, tuple, int], object]
    elem_eq: Callable[[object, object, int], bool]
    sample: Callable[[int, random.Random], object] | None = None
    m0_samples: tuple = ()


@dataclass(frozen=True)
class BindingModel:
    name: str
    sig: Signature
    ifs: IFS
    fhat: Mapping[str, Callable[[int, tuple], object]]
    phat: Mapping[str, Callable[[tuple], int]]

    def __post_init__(self):
        object.__setattr__(self, "fhat", dict(self.fhat))
        object.__setattr__(self, "phat", dict(self.phat))


# ---------------------------------------------------------------------------
# Denotation


def eval_term(m: BindingModel, t, ctx: tuple[str, ...] = (), phi: Mapping | None = None):
    """Denotation of a term in a context of bound variables (innermost
    first); an element of the carrier at level len(ctx)."""
    phi = phi or {}
    if isinstance(t, Var):
        if t.name in ctx:
            return m.ifs.proj(ctx.index(t.name) + 1, len(ctx))
        if t.name not in phi:
            raise UnboundVariable(t.name)
        return m.ifs.box(phi[t.name], (), len(ctx))
    if isinstance(t, App):
        args = tuple(
            eval_term(m, s.body, tuple(reversed(s.binders)) + tuple(ctx), phi)
            for s in t.args
        )
        return m.fhat[t.symbol](len(ctx), args)
    raise TypeError(f"not a named term: {t!r}")


def _closed_term_values(m: BindingModel, a) -> list:
    vals: list = []

    def visit_term(t):
        if not syntax.free_vars(t):
            v = eval_term(m, t, (), {})
            if v not in vals:
                vals.append(v)
        if isinstance(t, App):
            for s in t.args:
                visit_term(s.body)

    def visit(a):
        if isinstance(a, Atom):
            for s in a.args:
                visit_term(s.body)
        elif isinstance(a, (Imp, And, Or)):
            visit(a.a)
            visit(a.b)
        elif isinstance(a, (Forall, Exists)):
            visit(a.body)

    visit(a)
    return vals


def _quantifier_domain(m: BindingModel, prop) -> tuple[tuple, bool]:
    dom = m.ifs.carrier(0)
    if dom is not None:
        return tuple(dom), True
    extra = [v for v in _closed_term_values(m, prop) if v not in m.ifs.m0_samples]
    return tuple(m.ifs.m0_samples) + tuple(extra), False


def eval_prop_report(m: BindingModel, a, phi: Mapping | None = None) -> tuple[int, bool]:
    """(truth value, exact). The value is exact unless it rests on a sampled
    quantifier sweep over a non-enumerable domain; a counterexample found in
    the samples still refutes exactly."""
    phi = dict(phi or {})
    domain, exhaustive = _quantifier_domain(m, a)

    def go(a, phi) -> tuple[int, bool]:
        if isinstance(a, Atom):
            vals = tuple(
                eval_term(m, s.body, tuple(reversed(s.binders)), phi) for s in a.args
            )
            return m.phat[a.pred](vals), True
        if isinstance(a, Bottom):
            return 0, True
        if isinstance(a, Imp):
            va, ea = go(a.a, phi)
            vb, eb = go(a.b, phi)
            if va == 1 and vb == 0:
                return 0, ea and eb
            return 1, (va == 0 and ea) or (vb == 1 and eb)
        if isinstance(a, And):
            va, ea = go(a.a, phi)
            vb, eb = go(a.b, phi)
            if va == 1 and vb == 1:
                return 1, ea and eb
            return 0, (va == 0 and ea) or (vb == 0 and eb)
        if isinstance(a, Or):
            va, ea = go(a.a, phi)
            vb, eb = go(a.b, phi)
            if va == 0 and vb == 0:
                return 0, ea and eb
            return 1, (va == 1 and ea) or (vb == 1 and eb)
        if isinstance(a, (Forall, Exists)):
            want_all = isinstance(a, Forall)
            all_exact = True
            for elem in domain:
                v, e = go(a.body, {**phi, a.var: elem})
                all_exact = all_exact and e
                if want_all and v == 0:
                    return 0, e
                if not want_all and v == 1:
                    return 1, e
            return (1 if want_all else 0), exhaustive and all_exact
        raise TypeError(f"not a proposition: {a!r}")

    return go(a, phi)


def eval_prop(m: BindingModel, a, phi: Mapping | None = None,
              require_exact: bool = False) -> int:
    v, exact = eval_prop_report(m, a, phi)
    if require_exact and not exact:
        raise InfiniteDomainExhaustionRequested(
            "verdict rests on a sampled quantifier domain")
    return v


def quantifier_witness(m: BindingModel, a, phi: Mapping | None = None) -> dict | None:
    """Best-effort witness assignment for the outermost quantifier prefix:
    the values refuting a universal chain, or satisfying an existential one.
    None when the prefix verdict needs no witness (or none was found)."""
    phi = dict(phi or {})
    domain, _ = _quantifier_domain(m, a)
    witness: dict = {}
    node = a
    while isinstance(node, (Forall, Exists)):
        want = 0 if isinstance(node, Forall) else 1
        found = None
        for elem in domain:
            v, _ = eval_prop_report(m, node.body, {**phi, node.var: elem})
            if v == want:
                found = elem
                break
        if found is None:
            return witness or None
        witness[node.var] = found
        phi[node.var] = found
        node = node.body
    return witness or None


# ---------------------------------------------------------------------------
# Structure sweeps


@dataclass
class SweepReport:
    checked: int = 0
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def merge(self, other: "SweepReport"):
        self.checked += other.checked
        self.violations.extend(other.violations)

    def summary(self) -> str:
        verdict = "ok" if self.ok else f"{len(self.violations)} violations"
        return f"{self.checked} instances checked, {verdict}"


def _level_elements(ifs: IFS, n: int, mode: str, samples: int, rng) -> tuple:
    dom = ifs.carrier(n)
    if mode == "exhaustive":
        if dom is None:
            raise InfiniteDomainExhaustionRequested(f"carrier {n} is not enumerable")
        return tuple(dom)
    if dom is not None:
        if len(dom) <= samples:
            return tuple(dom)
        return tuple(rng.choice(dom) for _ in range(samples))
    if ifs.sample is None:
        raise InfiniteDomainExhaustionRequested(f"carrier {n} has no sampler")
    return tuple(ifs.sample(n, rng) for _ in range(samples))


def _tuples_over(elems: tuple, k: int, mode: str, samples: int, rng):
    if mode == "exhaustive":
        return itertools.product(elems, repeat=k)
    return (tuple(rng.choice(elems) for _ in range(k)) for _ in range(samples)) \
        if k else iter([()])


def check_ifs(ifs: IFS, n_max: int, p_max: int, q_max: int,
              mode: str = "exhaustive", samples: int = 50, seed: int = 0) -> SweepReport:
    """Check the projection, identity, and associativity laws on every
    instance within the level bounds (or on samples)."""
    rng = random.Random(seed)
    rep = SweepReport()
    boxc: dict = {}

    def box(a, bs, p):
        key = (a, bs, p)
        v = boxc.get(key)
        if v is None:
            v = ifs.box(a, bs, p)
            boxc[key] = v
        return v

    # projections
    for n in range(1, n_max + 1):
        for p in range(0, p_max + 1):
            elems_p = _level_elements(ifs, p, mode, samples, rng)
            for bs in _tuples_over(elems_p, n, mode, samples, rng):
                for i in range(1, n + 1):
                    rep.checked += 1
                    if not ifs.elem_eq(box(ifs.proj(i, n), bs, p), bs[i - 1], p):
                        rep.violations.append(
                            f"proj law: {i}_{n} with {_fmt_tuple(bs)} at level {p}")
    # identity
    for n in range(0, n_max + 1):
        projs = tuple(ifs.proj(i + 1, n) for i in range(n))
        for a in _level_elements(ifs, n, mode, samples, rng):
            rep.checked += 1
            if not ifs.elem_eq(box(a, projs, n), a, n):
                rep.violations.append(f"identity law: {fmt_element(a)} at level {n}")
    # associativity
    for n in range(0, n_max + 1):
        for p in range(0, p_max + 1):
            for q in range(0, q_max + 1):
                elems_n = _level_elements(ifs, n, mode, samples, rng)
                elems_p = _level_elements(ifs, p, mode, samples, rng)
                elems_q = _level_elements(ifs, q, mode, samples, rng)
                cs_list = list(_tuples_over(elems_q, p, mode, samples, rng))
                # inner composition precomputed per (b, cs)
                inner: dict = {}
                for b in elems_p:
                    for cs in cs_list:
                        inner[(b, cs)] = box(b, cs, q)
                for a in elems_n:
                    for bs in _tuples_over(elems_p, n, mode, samples, rng):
                        ab = box(a, bs, p)
                        for cs in cs_list:
                            rep.checked += 1
                            lhs = box(ab, cs, q)
                            rhs = box(a, tuple(inner[(b, cs)] for b in bs), q)
                            if not ifs.elem_eq(lhs, rhs, q):
                                rep.violations.append(
                                    f"associativity: {fmt_element(a)} "
                                    f"{_fmt_tuple(bs)} {_fmt_tuple(cs)} (n={n},p={p},q={q})")
    return rep


def upstep(ifs: IFS, bs: tuple, q: int, k: int) -> tuple:
    """The lifted argument tuple: projections 1..k at level q+k, then each
    element shifted past them."""
    s = tuple(ifs.proj(k + j, q + k) for j in range(1, q + 1))
    return tuple(ifs.proj(j, q + k) for j in range(1, k + 1)) + \
        tuple(ifs.box(b, s, q + k) for b in bs)


def check_coherence(m: BindingModel, f: str, p_max: int, q_max: int,
                    mode: str = "exhaustive", samples: int = 30, seed: int = 0) -> SweepReport:
    """Check that the family interpreting f commutes with composition, and
    for unary-binder symbols the derived level-shift identity."""
    rng = random.Random(seed)
    rep = SweepReport()
    ifs = m.ifs
    arity = m.sig.functions[f]
    fh = m.fhat[f]
    for p in range(0, p_max + 1):
        for q in range(0, q_max + 1):
            arg_levels = [p + k for k in arity]
            arg_spaces = [_level_elements(ifs, lv, mode, samples, rng) for lv in arg_levels]
            elems_q = _level_elements(ifs, q, mode, samples, rng)
            for args in (itertools.product(*arg_spaces) if mode == "exhaustive"
                         else (tuple(rng.choice(sp) for sp in arg_spaces) for _ in range(samples))):
                for bs in _tuples_over(elems_q, p, mode, samples, rng):
                    rep.checked += 1
                    lhs = ifs.box(fh(p, args), bs, q)
                    lifted = tuple(
                        ifs.box(a, upstep(ifs, bs, q, k), q + k)
                        for a, k in zip(args, arity)
                    )
                    rhs = fh(q, lifted)
                    if not ifs.elem_eq(lhs, rhs, q):
                        rep.violations.append(
                            f"coherence of {f}: p={p} q={q} args={_fmt_tuple(args)} "
                            f"bs={_fmt_tuple(bs)}")
    if arity == (1,):
        # The derived level-shift identity; at p = 0 the lowering tuple has
        # no projections to draw from, so the check starts at 1.
        for p in range(1, p_max + 1):
            for a in _level_elements(ifs, p + 1, mode, samples, rng):
                rep.checked += 1
                i_args = (ifs.proj(1, p + 2),) + tuple(ifs.proj(j, p + 2) for j in range(3, p + 3))
                lifted = ifs.box(a, i_args, p + 2)
                d_args = (ifs.proj(1, p),) + tuple(ifs.proj(j, p) for j in range(1, p + 1))
                rhs = ifs.box(fh(p + 1, (lifted,)), d_args, p)
                if not ifs.elem_eq(fh(p, (a,)), rhs, p):
                    rep.violations.append(
                        f"level-shift identity of {f}: p={p} a={fmt_element(a)}")
    return rep


def check_unary_retraction(m: BindingModel, f: str, q_max: int) -> SweepReport:
    """In models where the unary-binder family absorbs the shift section:
    applying f at level q to (b composed past a fresh slot) gives back b."""
    rep = SweepReport()
    ifs = m.ifs
    fh = m.fhat[f]
    for q in range(0, q_max + 1):
        elems = ifs.carrier(q)
        if elems is None:
            raise InfiniteDomainExhaustionRequested(f"carrier {q} is not enumerable")
        s = tuple(ifs.proj(j, q + 1) for j in range(2, q + 2))
        for b in elems:
            rep.checked += 1
            if not ifs.elem_eq(fh(q, (ifs.box(b, s, q + 1),)), b, q):
                rep.violations.append(f"retraction of {f}: q={q} b={fmt_element(b)}")
    return rep


# ---------------------------------------------------------------------------
# Built-in models


def ext_counter_model(n_max: int = 4) -> BindingModel:
    """The finite model separating the equality axioms from the
    extensionality scheme. Level n holds k and l (constant-like elements),
    the n projections, and their barred twins which compose through an
    involution; the unary binder collapses projection 1 to k and its twin
    to l. Level n has 2n + 2 elements."""

    def carrier(n: int) -> tuple:
        return (("k", n), ("l", n)) + tuple(("p", i, n) for i in range(1, n + 1)) \
            + tuple(("b", i, n) for i in range(1, n + 1))

    def neg(a):
        tag = a[0]
        if tag == "p":
            return ("b", a[1], a[2])
        if tag == "b":
            return ("p", a[1], a[2])
        return a

    def box(a, bs, p):
        tag = a[0]
        if tag == "k":
            return ("k", p)
        if tag == "l":
            return ("l", p)
        if tag == "p":
            return bs[a[1] - 1]
        return neg(bs[a[1] - 1])

    def lam(a):
        tag = a[0]
        n = a[-1] - 1
        if tag == "k":
            return ("k", n)
        if tag == "l":
            return ("l", n)
        i = a[1]
        if tag == "p":
            return ("k", n) if i == 1 else ("p", i - 1, n)
        return ("l", n) if i == 1 else ("b", i - 1, n)

    sig = Signature({"f": (0,), "Λ": (1,)}, {"=": (0, 0)})
    ifs = IFS(
        carrier=carrier,
        proj=lambda i, n: ("p", i, n),
        box=box,
        elem_eq=lambda a, b, n: a == b,
    )
    return BindingModel(
        name=f"ext(n_max={n_max})",
        sig=sig,
        ifs=ifs,
        fhat={"f": lambda p, args: neg(args[0]), "Λ": lambda p, args: lam(args[0])},
        phat={"=": lambda args: int(args[0] == args[1])},
    )


def _delta_base(d: int, f, g) -> int:
    if d == 0 or d == 1:
        return 0
    return f((d - 2) // 2) if d % 2 == 0 else g((d - 3) // 2)


def delta_model(probe_budget: int = 289) -> BindingModel:
    """The model over the naturals refuting the collapsed disjoint-sum
    equation: one injection lands on the even numbers from 2 up, the other
    on the odd numbers from 3 up, the case split returns 0 on the two
    orphan values neither injection reaches, and the constant denotes the
    orphan 1. Higher levels are genuine function spaces; element equality
    is probe-based.

    The injections must skip the orphans: if they covered all the naturals
    there would be no value left for the constant to make the case-split
    equation fail while the injection axioms stay valid.
    """

    sig = Signature({"i": (0,), "j": (0,), "δ": (0, 1, 1), "a": ()}, {"=": (0, 0)})

    def carrier(n: int):
        return None

    def proj(i: int, n: int):
        return Computable(n, lambda *xs, i=i: xs[i - 1])

    def box(a, bs, p):
        if not bs:
            if p == 0:
                return a
            return Computable(p, lambda *xs, a=a: a)
        if p == 0:
            return a.fn(*bs)
        return Computable(p, lambda *xs, a=a, bs=bs: a.fn(*[b.fn(*xs) for b in bs]))

    probes: dict[int, list[tuple]] = {}

    def probe_points(arity: int) -> list[tuple]:
        pts = probes.get(arity)
        if pts is None:
            if arity <= 2:
                pts = list(itertools.product(range(17), repeat=arity))[:probe_budget]
            else:
                prng = random.Random(0xDE17A + arity)
                pts = [tuple(prng.randrange(17) for _ in range(arity))
                       for _ in range(probe_budget)]
            probes[arity] = pts
        return pts

    def elem_eq(a, b, n: int) -> bool:
        if n == 0:
            return a == b
        return all(a.fn(*pt) == b.fn(*pt) for pt in probe_points(n))

    def sample(n: int, rng: random.Random):
        if n == 0:
            return rng.randrange(0, 512)
        coeffs = [rng.randrange(0, 4) for _ in range(n)]
        c0 = rng.randrange(0, 8)
        return Computable(n, lambda *xs, cs=tuple(coeffs), c0=c0:
                          c0 + sum(c * x for c, x in zip(cs, xs)))

    def lift0(base: Callable[[int], int]):
        def fh(p: int, args: tuple):
            (d,) = args
            if p == 0:
                return base(d)
            return Computable(p, lambda *xs, d=d: base(d.fn(*xs)))
        return fh

    def delta_hat(p: int, args: tuple):
        d, f, g = args
        if p == 0:
            return _delta_base(d, f.fn, g.fn)
        return Computable(p, lambda *xs, d=d, f=f, g=g: _delta_base(
            d.fn(*xs),
            lambda y: f.fn(y, *xs),
            lambda y: g.fn(y, *xs),
        ))

    def const_one(p: int, args: tuple):
        if p == 0:
            return 1
        return Computable(p, lambda *xs: 1)

    ifs = IFS(carrier=carrier, proj=proj, box=box, elem_eq=elem_eq,
              sample=sample, m0_samples=tuple(range(257)))
    return BindingModel(
        name=f"delta(probe_budget={probe_budget})",
        sig=sig,
        ifs=ifs,
        fhat={
            "i": lift0(lambda d: 2 * d + 2),
            "j": lift0(lambda d: 2 * d + 3),
            "δ": delta_hat,
            "a": const_one,
        },
        phat={"=": lambda args: int(args[0] == args[1])},
    )


def full_function_ifs(universe) -> IFS:
    """Levels are the full function spaces A^n -> A over a finite set,
    stored as value tables; composition is pointwise."""
    A = tuple(universe)
    if not A:
        raise ValueError("empty universe")
    base = len(A)
    vidx = {v: i for i, v in enumerate(A)}

    def rank(args: tuple) -> int:
        r = 0
        for v in args:
            r = r * base + vidx[v]
        return r

    def carrier(n: int) -> tuple:
        count = base ** n
        if base ** count > 1 << 20:
            raise InfiniteDomainExhaustionRequested(
                f"level {n} of the function-space structure is too large to enumerate")
        return tuple(("fn", n, table) for table in itertools.product(A, repeat=count))

    def proj(i: int, n: int):
        table = tuple(args[i - 1] for args in itertools.product(A, repeat=n))
        return ("fn", n, table)

    def box(a, bs, p: int):
        table = tuple(
            a[2][rank(tuple(b[2][ridx] for b in bs))]
            for ridx in range(base ** p)
        )
        return ("fn", p, table)

    return IFS(carrier=carrier, proj=proj, box=box, elem_eq=lambda a, b, n: a == b)


# ---------------------------------------------------------------------------
# Adapters to and from models of the sorted layer


@dataclass(frozen=True)
class SigmaModel:
    """A model of the sorted layer: denotations for indices, identity,
    shift, closure, cons, and composition, plus the symbol families and
    predicates. Substitution values are whatever the cons/comp denotations
    build (tuples, in the adapter below)."""

    sig: Signature
    term_carrier: Callable[[int], tuple | None]
    index: Callable[[int, int], object]
    id_: Callable[[int], object]
    shift: Callable[[int], object]
    closure: Callable[[object, object, int], object]
    cons: Callable[[object, object], object]
    comp: Callable[[object, object, int], object]
    fsym: Callable[[str, int, tuple], object]
    pred: Callable[[str, tuple], int]
    elem_eq: Callable[[object, object, int], bool]
    sample: Callable[[int, random.Random], object] | None = None


def sigma_model_from_binding(m: BindingModel) -> SigmaModel:
    """Interpret the sorted layer inside a binding model: substitution
    values are tuples of elements, closure is composition, identity is the
    projection tuple, shift drops the first slot."""
    ifs = m.ifs
    return SigmaModel(
        sig=m.sig,
        term_carrier=ifs.carrier,
        index=ifs.proj,
        id_=lambda n: tuple(ifs.proj(i, n) for i in range(1, n + 1)),
        shift=lambda n: tuple(ifs.proj(i, n + 1) for i in range(2, n + 2)),
        closure=lambda a, s, n: ifs.box(a, s, n),
        cons=lambda a, s: (a,) + tuple(s),
        comp=lambda s1, s2, q: tuple(ifs.box(a, tuple(s2), q) for a in s1),
        fsym=lambda f, p, args: m.fhat[f](p, args),
        pred=lambda P, args: m.phat[P](args),
        elem_eq=ifs.elem_eq,
        sample=ifs.sample,
    )


def eval_lterm(nm: SigmaModel, t, phi: Mapping | None = None):
    """Denotation of a sorted term; free variables read from phi."""
    phi = phi or {}
    if isinstance(t, sigma.Index):
        return nm.index(t.i, t.n)
    if isinstance(t, sigma.FreeVar):
        if t.name not in phi:
            raise UnboundVariable(t.name)
        return phi[t.name]
    if isinstance(t, sigma.Id):
        return nm.id_(t.n)
    if isinstance(t, sigma.Shift):
        return nm.shift(t.n)
    if isinstance(t, sigma.FApp):
        return nm.fsym(t.f, t.p, tuple(eval_lterm(nm, a, phi) for a in t.args))
    if isinstance(t, sigma.Closure):
        n = sigma.sort_of(nm.sig, t).n
        return nm.closure(eval_lterm(nm, t.t, phi), eval_lterm(nm, t.s, phi), n)
    if isinstance(t, sigma.Cons):
        return nm.cons(eval_lterm(nm, t.t, phi), eval_lterm(nm, t.s, phi))
    if isinstance(t, sigma.Comp):
        q = sigma.sort_of(nm.sig, t).n
        return nm.comp(eval_lterm(nm, t.s1, phi), eval_lterm(nm, t.s2, phi), q)
    raise TypeError(f"not a sorted term: {t!r}")


def eval_lprop_report(nm: SigmaModel, a, phi: Mapping | None = None) -> tuple[int, bool]:
    phi = dict(phi or {})
    dom = nm.term_carrier(0)
    exhaustive = dom is not None
    if dom is None:
        dom = ()

    def go(a, phi):
        if isinstance(a, Atom):
            vals = tuple(eval_lterm(nm, s.body, phi) for s in a.args)
            return nm.pred(a.pred, vals), True
        if isinstance(a, Bottom):
            return 0, True
        if isinstance(a, (Imp, And, Or)):
            va, ea = go(a.a, phi)
            vb, eb = go(a.b, phi)
            if isinstance(a, Imp):
                v = 1 if (va == 0 or vb == 1) else 0
            elif isinstance(a, And):
                v = va and vb
            else:
                v = va or vb
            return v, ea and eb
        if isinstance(a, (Forall, Exists)):
            want_all = isinstance(a, Forall)
            all_exact = True
            for elem in dom:
                v, e = go(a.body, {**phi, a.var: elem})
                all_exact = all_exact and e
                if want_all and v == 0:
                    return 0, e
                if not want_all and v == 1:
                    return 1, e
            return (1 if want_all else 0), exhaustive and all_exact
        raise TypeError(f"not a proposition: {a!r}")

    return go(a, phi)


def binding_model_from_sigma(nm: SigmaModel, name: str = "") -> BindingModel:
    """Recover a binding model: composition closes an element over the cons
    of its arguments onto the denotation of the appropriate shift chain."""

    def shift_chain_value(p: int):
        if p == 0:
            return nm.id_(0)
        val = nm.shift(p - 1)
        for k in range(p - 2, -1, -1):
            val = nm.comp(nm.shift(k), val, p)
        return val

    def box(a, bs, p):
        sub = shift_chain_value(p)
        for b in reversed(bs):
            sub = nm.cons(b, sub)
        return nm.closure(a, sub, p)

    ifs = IFS(
        carrier=nm.term_carrier,
        proj=nm.index,
        box=box,
        elem_eq=nm.elem_eq,
    )
    return BindingModel(
        name=name or "from-sigma",
        sig=nm.sig,
        ifs=ifs,
        fhat={f: (lambda p, args, f=f: nm.fsym(f, p, args)) for f in nm.sig.functions},
        phat={P: (lambda args, P=P: nm.pred(P, args)) for P in nm.sig.predicates},
    )


def _random_phi(nm: SigmaModel, names, rng: random.Random) -> dict:
    dom = nm.term_carrier(0)
    if dom is not None:
        return {x: rng.choice(dom) for x in names}
    if nm.sample is None:
        raise InfiniteDomainExhaustionRequested("level 0 has neither enumeration nor sampler")
    return {x: nm.sample(0, rng) for x in names}


def validate_sigma_rules(nm: SigmaModel, instances_per_rule: int = 30,
                         seed: int = 0, size: int = 5) -> SweepReport:
    """Sample instances of every substitution rule and check both sides
    denote equal values (elementwise for substitution sorts)."""
    rng = random.Random(seed)
    rep = SweepReport()
    rs = sigma.sigma_system(nm.sig)

    def values_equal(lhs, rhs, sort) -> bool:
        vl = eval_lterm(nm, lhs, phi)
        vr = eval_lterm(nm, rhs, phi)
        if isinstance(sort, sigma.TermSort):
            return nm.elem_eq(vl, vr, sort.n)
        return len(vl) == len(vr) and all(
            nm.elem_eq(a, b, sort.n) for a, b in zip(vl, vr))

    for rule in rs.rules:
        pairs = gen.sigma_rule_instances(rng, nm.sig, rule.name, instances_per_rule, size)
        for lhs, rhs in pairs:
            names = sigma.free_vars_l(lhs) | sigma.free_vars_l(rhs)
            phi = _random_phi(nm, sorted(names), rng)
            rep.checked += 1
            if not values_equal(lhs, rhs, sigma.sort_of(nm.sig, lhs)):
                rep.violations.append(
                    f"{rule.name}: {sigma.print_lterm(lhs)} vs {sigma.print_lterm(rhs)}")
    return rep


def denotation_transport_check(m: BindingModel, nm: SigmaModel, samples: int = 200,
                               seed: int = 0, size: int = 8) -> SweepReport:
    """Sampled check that a term and its translation denote the same value."""
    rng = random.Random(seed)
    rep = SweepReport()
    for _ in range(samples):
        t = gen.random_term(rng, m.sig, rng.randint(1, size))
        phi = _random_phi(nm, sorted(syntax.free_vars(t)), rng)
        rep.checked += 1
        va = eval_term(m, t, (), phi)
        vb = eval_lterm(nm, precook.precook(m.sig, t), phi)
        if not m.ifs.elem_eq(va, vb, 0):
            rep.violations.append(syntax.print_term(t))
    return rep


# ---------------------------------------------------------------------------
# Element formatting and model table files


def fmt_element(e) -> str:
    if isinstance(e, tuple) and e:
        if e[0] == "k":
            return f"k{e[1]}"
        if e[0] == "l":
            return f"l{e[1]}"
        if e[0] == "p":
            return f"{e[1]}_{e[2]}"
        if e[0] == "b":
            return f"{e[1]}b_{e[2]}"
        if e[0] == "fn":
            return f"fn{e[1]}:{''.join(map(str, e[2]))}"
    if isinstance(e, Computable):
        return f"<fun/{e.arity}>"
    return str(e)


def dump_model(m: BindingModel, levels: int) -> str:
    """Write the finite levels of a model as a table file (carriers, the
    box table, symbol and predicate tables)."""
    lines = [f"model {m.name}", f"levels {levels}"]
    carriers = {}
    for n in range(levels + 1):
        dom = m.ifs.carrier(n)
        if dom is None:
            raise InfiniteDomainExhaustionRequested("cannot dump a non-enumerable carrier")
        carriers[n] = tuple(dom)
        lines.append(f"carrier {n}: " + " ".join(fmt_element(e) for e in dom))
    for n in range(1, levels + 1):
        for i in range(1, n + 1):
            lines.append(f"proj {i} {n} = {fmt_element(m.ifs.proj(i, n))}")
    for n in range(0, levels + 1):
        for p in range(0, levels + 1):
            for a in carriers[n]:
                for bs in itertools.product(carriers[p], repeat=n):
                    r = m.ifs.box(a, bs, p)
                    lines.append(
                        f"box {p} | {fmt_element(a)} | "
                        f"{' '.join(fmt_element(b) for b in bs)} = {fmt_element(r)}")
    for f, arity in m.sig.functions.items():
        for p in range(0, levels + 1):
            if any(p + k > levels for k in arity):
                continue
            spaces = [carriers[p + k] for k in arity]
            for args in itertools.product(*spaces):
                r = m.fhat[f](p, args)
                lines.append(
                    f"fun {f} {p} | {' '.join(fmt_element(x) for x in args)} "
                    f"= {fmt_element(r)}")
    for P, arity in m.sig.predicates.items():
        spaces = [carriers[k] for k in arity]
        for args in itertools.product(*spaces):
            r = m.phat[P](args)
            lines.append(
                f"pred {P} | {' '.join(fmt_element(x) for x in args)} = {r}")
    return "\n".join(lines) + "\n"


def load_model(text: str, sig: Signature, name: str = "table-model") -> BindingModel:
    """Load a finite model from a table file; elements are their tags."""
    carriers: dict[int, tuple] = {}
    projs: dict[tuple[int, int], str] = {}
    boxes: dict[tuple, str] = {}
    funs: dict[tuple, str] = {}
    preds: dict[tuple, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line or line.startswith(("model", "levels")):
            continue
        try:
            head, _, tail = line.partition(" ")
            if head == "carrier":
                n_txt, _, elems = tail.partition(":")
                carriers[int(n_txt)] = tuple(elems.split())
            elif head == "proj":
                # split on the rightmost ` = `: names like `=` are legal tags
                lhs, _, r = tail.rpartition(" = ")
                i_txt, n_txt = lhs.split()
                projs[(int(i_txt), int(n_txt))] = r.strip()
            elif head == "box":
                body, _, r = tail.rpartition(" = ")
                p_txt, a_txt, bs_txt = (s.strip() for s in body.split("|"))
                boxes[(a_txt, tuple(bs_txt.split()), int(p_txt))] = r.strip()
            elif head == "fun":
                body, _, r = tail.rpartition(" = ")
                fp, args_txt = (s.strip() for s in body.split("|"))
                fname, p_txt = fp.split()
                funs[(fname, int(p_txt), tuple(args_txt.split()))] = r.strip()
            elif head == "pred":
                body, _, r = tail.rpartition(" = ")
                pn, args_txt = (s.strip() for s in body.split("|"))
                preds[(pn.strip(), tuple(args_txt.split()))] = int(r.strip())
            else:
                raise ValueError(f"unknown entry {head!r}")
        except (ValueError, KeyError) as e:
            raise ParseError(f"bad model line: {raw!r} ({e})", line=lineno) from None

    def box(a, bs, p):
        key = (a, tuple(bs), p)
        if key not in boxes:
            raise BindLogError(f"model table has no box entry for {key}")
        return boxes[key]

    def proj(i, n):
        if (i, n) not in projs:
            raise BindLogError(f"model table has no projection {i}_{n}")
        return projs[(i, n)]

    ifs = IFS(
        carrier=lambda n: carriers.get(n),
        proj=proj,
        box=box,
        elem_eq=lambda a, b, n: a == b,
    )

    def fhat_for(f):
        def fh(p, args):
            key = (f, p, tuple(args))
            if key not in funs:
                raise BindLogError(f"model table has no entry for {key}")
            return funs[key]
        return fh

    def phat_for(P):
        def ph(args):
            key = (P, tuple(args))
            if key not in preds:
                raise BindLogError(f"model table has no entry for {key}")
            return preds[key]
        return ph

    return BindingModel(
        name=name,
        sig=sig,
        ifs=ifs,
        fhat={f: fhat_for(f) for f in sig.functions},
        phat={P: phat_for(P) for P in sig.predicates},
    )


def _fmt_tuple(xs) -> str:
    return "(" + ", ".join(fmt_element(x) for x in xs) + ")"
