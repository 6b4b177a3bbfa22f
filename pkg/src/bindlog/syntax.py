"""Named-binder syntax: signatures, terms, propositions, and the operations
the rest of the kernel builds on.

Function and predicate symbols carry a binding arity <k1,...,kn>: argument i
simultaneously binds ki variables in that argument. A symbol application is
therefore a list of slots, each pairing a (possibly empty) tuple of binder
names with a body.

The connective and quantifier nodes defined here are shared with the sorted
explicit-substitution layer (bindlog.sigma): a proposition over that layer
simply holds sorted terms in binder-free slots. The term-level operations in
this module (grafting, substitution, nameless forms) apply to the named
binding layer only; the sigma module has its own.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Callable, Mapping

from .errors import CheckResult, ParseError

# ---------------------------------------------------------------------------
# Types

BindingArity = tuple[int, ...]


@dataclass(frozen=True)
class Signature:
    """Symbol table mapping function and predicate names to binding arities."""

    functions: Mapping[str, BindingArity]
    predicates: Mapping[str, BindingArity]

    def __post_init__(self):
        object.__setattr__(self, "functions", dict(self.functions))
        object.__setattr__(self, "predicates", dict(self.predicates))
        for name, arity in [*self.functions.items(), *self.predicates.items()]:
            if not name:
                raise ValueError("empty symbol name")
            if any(k < 0 for k in arity):
                raise ValueError(f"negative binder count in arity of {name!r}")
        overlap = self.functions.keys() & self.predicates.keys()
        if overlap:
            raise ValueError(f"function/predicate name spaces overlap: {sorted(overlap)}")


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Slot:
    """One argument position: the variables bound there and the body."""

    binders: tuple[str, ...]
    body: object  # Term of this layer, or an LTerm when the slot belongs to the sorted layer


@dataclass(frozen=True)
class App:
    symbol: str
    args: tuple[Slot, ...]


Term = Var | App


@dataclass(frozen=True)
class Atom:
    pred: str
    args: tuple[Slot, ...]


@dataclass(frozen=True)
class Imp:
    a: object
    b: object


@dataclass(frozen=True)
class And:
    a: object
    b: object


@dataclass(frozen=True)
class Or:
    a: object
    b: object


@dataclass(frozen=True)
class Bottom:
    pass


@dataclass(frozen=True)
class Forall:
    var: str
    body: object


@dataclass(frozen=True)
class Exists:
    var: str
    body: object


Prop = Atom | Imp | And | Or | Bottom | Forall | Exists

SubstMap = Mapping[str, Term]


def slot(body) -> Slot:
    """Binder-free slot."""
    return Slot((), body)


# ---------------------------------------------------------------------------
# Free variables and name collection

def free_vars(x) -> frozenset[str]:
    """Variables with at least one occurrence not under a binder of that name."""
    if isinstance(x, Var):
        return frozenset((x.name,))
    if isinstance(x, (App, Atom)):
        acc: set[str] = set()
        for s in x.args:
            acc |= free_vars(s.body) - set(s.binders)
        return frozenset(acc)
    if isinstance(x, (Imp, And, Or)):
        return free_vars(x.a) | free_vars(x.b)
    if isinstance(x, Bottom):
        return frozenset()
    if isinstance(x, (Forall, Exists)):
        return free_vars(x.body) - {x.var}
    raise TypeError(f"not a binding-layer term or proposition: {x!r}")


def all_names(x) -> frozenset[str]:
    """Every variable name occurring in x, free or bound, binders included."""
    if isinstance(x, Var):
        return frozenset((x.name,))
    if isinstance(x, (App, Atom)):
        acc: set[str] = set()
        for s in x.args:
            acc |= set(s.binders) | all_names(s.body)
        return frozenset(acc)
    if isinstance(x, (Imp, And, Or)):
        return all_names(x.a) | all_names(x.b)
    if isinstance(x, Bottom):
        return frozenset()
    if isinstance(x, (Forall, Exists)):
        return all_names(x.body) | {x.var}
    raise TypeError(f"not a binding-layer term or proposition: {x!r}")


# ---------------------------------------------------------------------------
# Grafting: textual replacement, captures permitted

def graft(theta: SubstMap, x):
    """Replace free occurrences of the mapped variables, without renaming.

    The map is restricted under every binder to the variables it does not
    bind, so bound occurrences are never replaced; captures are allowed.
    """
    if not theta:
        return x
    if isinstance(x, Var):
        return theta.get(x.name, x)
    if isinstance(x, (App, Atom)):
        args = []
        for s in x.args:
            inner = {v: t for v, t in theta.items() if v not in s.binders}
            args.append(Slot(s.binders, graft(inner, s.body)))
        return type(x)(x.symbol if isinstance(x, App) else x.pred, tuple(args))
    if isinstance(x, (Imp, And, Or)):
        return type(x)(graft(theta, x.a), graft(theta, x.b))
    if isinstance(x, Bottom):
        return x
    if isinstance(x, (Forall, Exists)):
        inner = {v: t for v, t in theta.items() if v != x.var}
        return type(x)(x.var, graft(inner, x.body))
    raise TypeError(f"not a binding-layer term or proposition: {x!r}")


# ---------------------------------------------------------------------------
# Nameless canonical form and alpha-equivalence

def to_debruijn(x):
    """Canonical nameless form: bound occurrences become indices counting
    binders outward (the rightmost binder of a slot is index 1), free
    variables keep their names. Injective up to alpha-equivalence."""

    def go(x, ctx: tuple[str, ...]):
        if isinstance(x, Var):
            if x.name in ctx:
                return ("b", ctx.index(x.name) + 1)
            return ("f", x.name)
        if isinstance(x, App):
            return ("app", x.symbol, _go_slots(x.args, ctx))
        if isinstance(x, Atom):
            return ("atom", x.pred, _go_slots(x.args, ctx))
        if isinstance(x, Imp):
            return ("imp", go(x.a, ctx), go(x.b, ctx))
        if isinstance(x, And):
            return ("and", go(x.a, ctx), go(x.b, ctx))
        if isinstance(x, Or):
            return ("or", go(x.a, ctx), go(x.b, ctx))
        if isinstance(x, Bottom):
            return ("bot",)
        if isinstance(x, Forall):
            return ("all", go(x.body, (x.var,) + ctx))
        if isinstance(x, Exists):
            return ("ex", go(x.body, (x.var,) + ctx))
        raise TypeError(f"not a binding-layer term or proposition: {x!r}")

    def _go_slots(slots, ctx):
        return tuple(
            (len(s.binders), go(s.body, tuple(reversed(s.binders)) + ctx)) for s in slots
        )

    return go(x, ())


def alpha_eq(x, y) -> bool:
    return to_debruijn(x) == to_debruijn(y)


# ---------------------------------------------------------------------------
# Capture-avoiding substitution

def _fresh_namer(taken: set[str]) -> Callable[[str], str]:
    def fresh(base: str) -> str:
        for k in itertools.count(1):
            cand = f"{base}{k}"
            if cand not in taken:
                taken.add(cand)
                return cand
        raise AssertionError

    return fresh


def substitute(theta: SubstMap, x, fresh: Callable[[str], str] | None = None):
    """Capture-avoiding substitution.

    Every binder is renamed to a name occurring neither free nor bound in the
    argument nor in the map before the map is pushed under it. The result is
    then put into a canonical bound-name form, so the choice of fresh-name
    generator is unobservable.
    """
    if fresh is None:
        taken = set(all_names(x)) | set(theta)
        for t in theta.values():
            taken |= all_names(t)
        fresh = _fresh_namer(taken)

    def go(x):
        if isinstance(x, Var):
            return theta.get(x.name, x)
        if isinstance(x, (App, Atom)):
            args = []
            for s in x.args:
                ys = tuple(fresh(b) for b in s.binders)
                renamed = graft({b: Var(y) for b, y in zip(s.binders, ys)}, s.body)
                args.append(Slot(ys, go(renamed)))
            head = x.symbol if isinstance(x, App) else x.pred
            return type(x)(head, tuple(args))
        if isinstance(x, (Imp, And, Or)):
            return type(x)(go(x.a), go(x.b))
        if isinstance(x, Bottom):
            return x
        if isinstance(x, (Forall, Exists)):
            y = fresh(x.var)
            return type(x)(y, go(graft({x.var: Var(y)}, x.body)))
        raise TypeError(f"not a binding-layer term or proposition: {x!r}")

    return canonical_binders(go(x))


def canonical_binders(x):
    """Rename every bound variable deterministically (x1, x2, ... in preorder,
    skipping the free names of x). Output depends only on the alpha-class."""
    free = free_vars(x)
    counter = itertools.count(1)

    def next_name() -> str:
        while True:
            cand = f"x{next(counter)}"
            if cand not in free:
                return cand

    def go(x, env: dict[str, str]):
        if isinstance(x, Var):
            return Var(env.get(x.name, x.name))
        if isinstance(x, (App, Atom)):
            args = []
            for s in x.args:
                ys = tuple(next_name() for _ in s.binders)
                inner = {**env, **dict(zip(s.binders, ys))}
                args.append(Slot(ys, go(s.body, inner)))
            head = x.symbol if isinstance(x, App) else x.pred
            return type(x)(head, tuple(args))
        if isinstance(x, (Imp, And, Or)):
            return type(x)(go(x.a, env), go(x.b, env))
        if isinstance(x, Bottom):
            return x
        if isinstance(x, (Forall, Exists)):
            y = next_name()
            return type(x)(y, go(x.body, {**env, x.var: y}))
        raise TypeError(f"not a binding-layer term or proposition: {x!r}")

    return go(x, {})


# ---------------------------------------------------------------------------
# Well-formedness over a signature

def well_formed(sig: Signature, x) -> CheckResult:
    """Check symbol declarations, arities, binder counts, and binder
    distinctness. Error kinds: UnknownSymbol, ArityMismatch,
    BinderCountMismatch, DuplicateBinder."""

    def check_app(symbol, table, arity_kind, x, path):
        if symbol not in table:
            return CheckResult.failed("UnknownSymbol", path, f"{arity_kind} {symbol!r} not declared")
        arity = table[symbol]
        if len(x.args) != len(arity):
            return CheckResult.failed(
                "ArityMismatch", path,
                f"{symbol!r} expects {len(arity)} arguments, got {len(x.args)}")
        for i, (s, k) in enumerate(zip(x.args, arity)):
            if len(s.binders) != k:
                return CheckResult.failed(
                    "BinderCountMismatch", path + (i,),
                    f"argument {i} of {symbol!r} binds {k} variables, got {len(s.binders)}")
            if len(set(s.binders)) != len(s.binders):
                return CheckResult.failed(
                    "DuplicateBinder", path + (i,),
                    f"binder list {s.binders} of {symbol!r} has duplicates")
            r = go(s.body, path + (i,))
            if not r.ok:
                return r
        return CheckResult.passed()

    def go(x, path) -> CheckResult:
        if isinstance(x, Var):
            return CheckResult.passed()
        if isinstance(x, App):
            return check_app(x.symbol, sig.functions, "function", x, path)
        if isinstance(x, Atom):
            return check_app(x.pred, sig.predicates, "predicate", x, path)
        if isinstance(x, (Imp, And, Or)):
            r = go(x.a, path + (0,))
            return r if not r.ok else go(x.b, path + (1,))
        if isinstance(x, Bottom):
            return CheckResult.passed()
        if isinstance(x, (Forall, Exists)):
            return go(x.body, path + (0,))
        raise TypeError(f"not a binding-layer term or proposition: {x!r}")

    return go(x, ())


# ---------------------------------------------------------------------------
# Text grammar
#
# terms:         x | f(x y. t, u)        binder list before '.', none omits it
# propositions:  P(...) | A => B | A /\ B | A \/ B | false
#                | forall x. A | exists x. A
# precedence, weakest first: quantifiers, =>, \/, /\ ; parentheses override.
# Zero-argument function symbols print as c() so parsing needs no signature.

_TOKEN_RE = re.compile(
    r"""(?P<ws>\s+|\#[^\n]*)
      | (?P<imp>=>)
      | (?P<and>/\\)
      | (?P<or>\\/)
      | (?P<turnstile>\|-)
      | (?P<arrow>->)
      | (?P<lpar>\()
      | (?P<rpar>\))
      | (?P<comma>,)
      | (?P<dot>\.)
      | (?P<meta>\?\w+)
      | (?P<ident>[^\W\d]\w*'*|\d+)
      | (?P<sym>[=+*×<>])
    """,
    re.VERBOSE | re.UNICODE,
)

_KEYWORDS = {"forall", "exists", "false"}


def tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos=pos)
        kind = m.lastgroup
        if kind != "ws":
            if kind in ("ident", "sym"):
                val = m.group()
                kind = "kw" if val in _KEYWORDS else "name"
                tokens.append((kind, val, pos))
            else:
                tokens.append((kind, m.group(), pos))
        pos = m.end()
    tokens.append(("eof", "", pos))
    return tokens


class Parser:
    """Recursive-descent parser for terms, propositions, and sequents.

    When a signature is supplied, a bare identifier declared as a function
    symbol parses as a zero-argument application instead of a variable.
    """

    def __init__(self, text: str, sig: Signature | None = None):
        self.tokens = tokenize(text)
        self.pos = 0
        self.sig = sig

    def peek(self):
        return self.tokens[self.pos]

    def next(self):
        t = self.tokens[self.pos]
        self.pos += 1
        return t

    def expect(self, kind: str):
        t = self.next()
        if t[0] != kind:
            raise ParseError(f"expected {kind}, found {t[1]!r}", pos=t[2])
        return t

    def at_end(self) -> bool:
        return self.peek()[0] == "eof"

    def done(self):
        t = self.peek()
        if t[0] != "eof":
            raise ParseError(f"trailing input starting at {t[1]!r}", pos=t[2])

    # terms -----------------------------------------------------------------

    def term(self):
        kind, val, pos = self.next()
        if kind != "name":
            raise ParseError(f"expected a term, found {val!r}", pos=pos)
        if self.peek()[0] == "lpar":
            self.next()
            args = self.slot_list()
            self.expect("rpar")
            return App(val, tuple(args))
        if self.sig is not None and val in self.sig.functions:
            return App(val, ())
        return Var(val)

    def slot_list(self):
        if self.peek()[0] == "rpar":
            return []
        slots = [self.term_slot()]
        while self.peek()[0] == "comma":
            self.next()
            slots.append(self.term_slot())
        return slots

    def term_slot(self) -> Slot:
        save = self.pos
        binders = []
        while self.peek()[0] == "name":
            binders.append(self.next()[1])
        if binders and self.peek()[0] == "dot":
            self.next()
            return Slot(tuple(binders), self.term())
        self.pos = save
        return Slot((), self.term())

    # propositions ------------------------------------------------------------

    def prop(self):
        kind, val, pos = self.peek()
        if kind == "kw" and val in ("forall", "exists"):
            self.next()
            var = self.expect("name")[1]
            self.expect("dot")
            body = self.prop()
            return (Forall if val == "forall" else Exists)(var, body)
        return self.imp()

    def imp(self):
        left = self.disj()
        if self.peek()[0] == "imp":
            self.next()
            return Imp(left, self.prop())
        return left

    def disj(self):
        left = self.conj()
        if self.peek()[0] == "or":
            self.next()
            return Or(left, self.disj())
        return left

    def conj(self):
        left = self.prim()
        if self.peek()[0] == "and":
            self.next()
            return And(left, self.conj())
        return left

    def prim(self):
        kind, val, pos = self.peek()
        if kind == "kw" and val == "false":
            self.next()
            return Bottom()
        if kind == "lpar":
            self.next()
            p = self.prop()
            self.expect("rpar")
            return p
        if kind == "name":
            self.next()
            if self.peek()[0] == "lpar":
                self.next()
                args = self.slot_list()
                self.expect("rpar")
                return Atom(val, tuple(args))
            return Atom(val, ())
        raise ParseError(f"expected a proposition, found {val!r}", pos=pos)

    # sequents ----------------------------------------------------------------

    def sequent(self):
        left = self.prop_list(stop="turnstile")
        self.expect("turnstile")
        right = self.prop_list(stop="eof")
        return left, right

    def prop_list(self, stop: str):
        if self.peek()[0] == stop:
            return ()
        props = [self.prop()]
        while self.peek()[0] == "comma":
            self.next()
            props.append(self.prop())
        return tuple(props)


def parse_term(text: str, sig: Signature | None = None) -> Term:
    p = Parser(text, sig)
    t = p.term()
    p.done()
    return t


def parse_prop(text: str, sig: Signature | None = None) -> Prop:
    p = Parser(text, sig)
    a = p.prop()
    p.done()
    return a


# ---------------------------------------------------------------------------
# Printing

_ext_term_printer: Callable[[object], str] | None = None  # installed by bindlog.sigma


def _print_body(t) -> str:
    if isinstance(t, (Var, App)):
        return print_term(t)
    if _ext_term_printer is not None:
        return _ext_term_printer(t)
    return str(t)


def _print_slot(s: Slot) -> str:
    if s.binders:
        return f"{' '.join(s.binders)}. {_print_body(s.body)}"
    return _print_body(s.body)


def print_term(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    return f"{t.symbol}({', '.join(_print_slot(s) for s in t.args)})"


# precedence levels: prop body 0, => 1, \/ 2, /\ 3, primary 4
def _print_prop(p, level: int) -> str:
    if isinstance(p, (Forall, Exists)):
        kw = "forall" if isinstance(p, Forall) else "exists"
        s = f"{kw} {p.var}. {_print_prop(p.body, 0)}"
        return f"({s})" if level > 0 else s
    if isinstance(p, Imp):
        s = f"{_print_prop(p.a, 2)} => {_print_prop(p.b, 0)}"
        return f"({s})" if level > 1 else s
    if isinstance(p, Or):
        s = f"{_print_prop(p.a, 3)} \\/ {_print_prop(p.b, 2)}"
        return f"({s})" if level > 2 else s
    if isinstance(p, And):
        s = f"{_print_prop(p.a, 4)} /\\ {_print_prop(p.b, 3)}"
        return f"({s})" if level > 3 else s
    if isinstance(p, Bottom):
        return "false"
    if isinstance(p, Atom):
        if p.args:
            return f"{p.pred}({', '.join(_print_slot(s) for s in p.args)})"
        return p.pred
    raise TypeError(f"not a proposition: {p!r}")


def print_prop(p: Prop) -> str:
    return _print_prop(p, 0)


def print_sequent(left, right) -> str:
    return f"{', '.join(print_prop(a) for a in left)} |- {', '.join(print_prop(b) for b in right)}".strip()


# ---------------------------------------------------------------------------
# Signature files: lines `fun f : <k1,...,kn>` / `pred P : <k1,...,kn>`

_SIG_LINE_RE = re.compile(r"^(fun|pred)\s+(\S+)\s*:\s*<([\d,\s]*)>\s*$")


def parse_signature(text: str) -> Signature:
    functions: dict[str, BindingArity] = {}
    predicates: dict[str, BindingArity] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _SIG_LINE_RE.match(line)
        if m is None:
            raise ParseError(f"bad signature line: {raw!r}", line=lineno)
        kind, name, arity_txt = m.groups()
        arity = tuple(int(k) for k in arity_txt.replace(" ", "").split(",") if k != "")
        table = functions if kind == "fun" else predicates
        if name in table:
            raise ParseError(f"duplicate declaration of {name!r}", line=lineno)
        table[name] = arity
    return Signature(functions, predicates)


def print_signature(sig: Signature) -> str:
    lines = [f"fun {n} : <{','.join(map(str, a))}>" for n, a in sig.functions.items()]
    lines += [f"pred {n} : <{','.join(map(str, a))}>" for n, a in sig.predicates.items()]
    return "\n".join(lines) + "\n"


Var.__str__ = lambda self: print_term(self)  # type: ignore[assignment]
App.__str__ = lambda self: print_term(self)  # type: ignore[assignment]
for _cls in (Atom, Imp, And, Or, Bottom, Forall, Exists):
    _cls.__str__ = lambda self: _print_prop(self, 0)  # type: ignore[assignment]
