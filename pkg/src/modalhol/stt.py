"""Simply typed lambda calculus kernel.

Terms use a locally nameless representation: bound variables are de Bruijn
indices (`Bound`), free variables and constants are named `Const` nodes that
carry their type. Alpha-equivalence therefore coincides with structural
equality (binder name hints are ignored by comparison).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterator


class SttError(Exception):
    """Base class for kernel-level failures."""


class UnboundVariable(SttError):
    def __init__(self, what: str):
        super().__init__(f"unbound variable: {what}")


class TypeMismatch(SttError):
    def __init__(self, expected, found, position: str = ""):
        self.expected = expected
        self.found = found
        self.position = position
        at = f" at {position}" if position else ""
        super().__init__(f"type mismatch{at}: expected {show_type(expected)}, found {show_type(found)}")


# ---------------------------------------------------------------------------
# Types

@dataclass(frozen=True)
class Type:
    __slots__ = ()


@dataclass(frozen=True)
class BaseType(Type):
    name: str

    def __repr__(self):
        return self.name


@dataclass(frozen=True)
class FnType(Type):
    dom: Type
    cod: Type

    def __repr__(self):
        return f"({self.dom!r}>{self.cod!r})"


INDIV = BaseType("$i")
WORLD = BaseType("$w")
BOOL = BaseType("$o")

# A lifted proposition is a predicate on worlds; a property is a function
# from individuals to lifted propositions.
PROP = FnType(WORLD, BOOL)
PROPERTY = FnType(INDIV, PROP)


def show_type(ty: Type) -> str:
    if isinstance(ty, BaseType):
        return ty.name
    return f"({show_type(ty.dom)}>{show_type(ty.cod)})"


# ---------------------------------------------------------------------------
# Terms

@dataclass(frozen=True)
class Term:
    __slots__ = ()


@dataclass(frozen=True)
class Bound(Term):
    index: int


@dataclass(frozen=True)
class Const(Term):
    """A named constant or free variable, carrying its type."""
    name: str
    type: Type


@dataclass(frozen=True)
class App(Term):
    fn: Term
    arg: Term


@dataclass(frozen=True)
class Lam(Term):
    var_type: Type
    body: Term
    hint: str = field(default="x", compare=False)


# Logical constants. Quantifiers are a family: one constant per quantified
# type, generated on demand (the type is part of the constant's identity).
TRUE = Const("$true", BOOL)
FALSE = Const("$false", BOOL)
NOT = Const("$not", FnType(BOOL, BOOL))
AND = Const("$and", FnType(BOOL, FnType(BOOL, BOOL)))
OR = Const("$or", FnType(BOOL, FnType(BOOL, BOOL)))
IMP = Const("$imp", FnType(BOOL, FnType(BOOL, BOOL)))
IFF = Const("$iff", FnType(BOOL, FnType(BOOL, BOOL)))

CONNECTIVE_NAMES = {"$true", "$false", "$not", "$and", "$or", "$imp", "$iff"}
BINDER_NAMES = {"$forall", "$exists"}
LOGICAL_NAMES = CONNECTIVE_NAMES | BINDER_NAMES


def forall_const(ty: Type) -> Const:
    return Const("$forall", FnType(FnType(ty, BOOL), BOOL))


def exists_const(ty: Type) -> Const:
    return Const("$exists", FnType(FnType(ty, BOOL), BOOL))


def is_logical(c: Const) -> bool:
    return c.name in LOGICAL_NAMES


# ---------------------------------------------------------------------------
# Construction helpers

def app(fn: Term, *args: Term) -> Term:
    for a in args:
        fn = App(fn, a)
    return fn


def neg(a: Term) -> Term:
    return App(NOT, a)


def conj(a: Term, b: Term) -> Term:
    return app(AND, a, b)


def disj(a: Term, b: Term) -> Term:
    return app(OR, a, b)


def imp(a: Term, b: Term) -> Term:
    return app(IMP, a, b)


def iff(a: Term, b: Term) -> Term:
    return app(IFF, a, b)


def abstract(term: Term, var: Const) -> Term:
    """Close over `var`: replace its occurrences by the index bound at depth 0."""
    def go(t: Term, depth: int) -> Term:
        match t:
            case Const(name, ty):
                if name == var.name and ty == var.type:
                    return Bound(depth)
                return t
            case Bound(_):
                return t
            case App(f, a):
                return App(go(f, depth), go(a, depth))
            case Lam(vt, body):
                return Lam(vt, go(body, depth + 1), hint=t.hint)
        raise SttError(f"unexpected term: {t!r}")
    return go(term, 0)


def lam(var: Const, body: Term, hint: str | None = None) -> Lam:
    return Lam(var.type, abstract(body, var), hint=hint or var.name)


def forall(var: Const, body: Term, hint: str | None = None) -> Term:
    return App(forall_const(var.type), lam(var, body, hint))


def exists(var: Const, body: Term, hint: str | None = None) -> Term:
    return App(exists_const(var.type), lam(var, body, hint))


# ---------------------------------------------------------------------------
# Inspection

def subterms(t: Term) -> Iterator[Term]:
    yield t
    match t:
        case App(f, a):
            yield from subterms(f)
            yield from subterms(a)
        case Lam(_, body):
            yield from subterms(body)


def free_consts(t: Term) -> set[Const]:
    """All Const nodes except the logical family."""
    return {s for s in subterms(t) if isinstance(s, Const) and not is_logical(s)}


def binder_split(t: Term) -> tuple[str, Type, Term] | None:
    """Match a quantified formula `Q p`, returning (quantifier, bound type, predicate)."""
    match t:
        case App(Const(name, FnType(FnType(ty, _), _)), pred) if name in BINDER_NAMES:
            return name, ty, pred
    return None


# ---------------------------------------------------------------------------
# Typing

def typecheck(term: Term, context: tuple[tuple[str, Type], ...] = ()) -> Type:
    """Return the unique type of `term`.

    `context` pins types for named free variables: a Const whose name appears
    there must carry the recorded type. Constants absent from the context are
    accepted with their carried type (constants are self-describing here).
    """
    ctx = dict(context)

    def go(t: Term, stack: tuple[Type, ...], pos: str) -> Type:
        match t:
            case Bound(i):
                if i < 0 or i >= len(stack):
                    raise UnboundVariable(f"de Bruijn index {i} {('at ' + pos) if pos else ''}".strip())
                return stack[i]
            case Const(name, ty):
                if name in ctx and ctx[name] != ty:
                    raise TypeMismatch(ctx[name], ty, pos or name)
                return ty
            case App(f, a):
                fty = go(f, stack, pos + ".fn")
                aty = go(a, stack, pos + ".arg")
                if not isinstance(fty, FnType):
                    raise TypeMismatch(FnType(aty, BaseType("?")), fty, pos + ".fn")
                if fty.dom != aty:
                    raise TypeMismatch(fty.dom, aty, pos + ".arg")
                return fty.cod
            case Lam(vt, body):
                return FnType(vt, go(body, (vt,) + stack, pos + ".body"))
        raise SttError(f"unexpected term: {t!r}")

    return go(term, (), "")


def is_well_typed(term: Term) -> bool:
    try:
        typecheck(term)
        return True
    except SttError:
        return False


# ---------------------------------------------------------------------------
# Substitution and normalization

def shift(term: Term, by: int, cutoff: int = 0) -> Term:
    """Shift loose de Bruijn indices (those >= cutoff) by `by`."""
    match term:
        case Bound(i):
            return Bound(i + by) if i >= cutoff else term
        case Const(_, _):
            return term
        case App(f, a):
            return App(shift(f, by, cutoff), shift(a, by, cutoff))
        case Lam(vt, b):
            return Lam(vt, shift(b, by, cutoff + 1), hint=term.hint)
    raise SttError(f"unexpected term: {term!r}")


def instantiate(body: Term, value: Term) -> Term:
    """Replace the variable bound at depth 0 of a binder body by `value`.

    Loose indices in `value` are shifted as it crosses binders, so this is
    safe for open arguments arising during reduction under lambdas.
    """
    def go(t: Term, depth: int) -> Term:
        match t:
            case Bound(i):
                if i == depth:
                    return shift(value, depth) if depth else value
                if i > depth:
                    return Bound(i - 1)
                return t
            case Const(_, _):
                return t
            case App(f, a):
                return App(go(f, depth), go(a, depth))
            case Lam(vt, b):
                return Lam(vt, go(b, depth + 1), hint=t.hint)
        raise SttError(f"unexpected term: {t!r}")
    return go(body, 0)


def substitute(term: Term, var: Const, replacement: Term) -> Term:
    """Capture-avoiding substitution of a named free variable.

    Capture is impossible by representation (bound variables are indices),
    so this is a plain traversal. The replacement must be locally closed and
    match the variable's type.
    """
    rty = typecheck(replacement)
    if rty != var.type:
        raise TypeMismatch(var.type, rty, f"substitution for {var.name}")

    def go(t: Term) -> Term:
        match t:
            case Const(name, ty):
                if name == var.name and ty == var.type:
                    return replacement
                return t
            case Bound(_):
                return t
            case App(f, a):
                return App(go(f), go(a))
            case Lam(vt, b):
                return Lam(vt, go(b), hint=t.hint)
        raise SttError(f"unexpected term: {t!r}")

    return go(term)


def normalize(term: Term) -> Term:
    """Beta-normal form (normal-order reduction; eta is deliberately not done)."""
    match term:
        case App(f, a):
            nf = normalize(f)
            if isinstance(nf, Lam):
                return normalize(instantiate(nf.body, a))
            return App(nf, normalize(a))
        case Lam(vt, body):
            return Lam(vt, normalize(body), hint=term.hint)
        case _:
            return term


def alpha_eq(a: Term, b: Term) -> bool:
    """Alpha-equivalence: structural equality of the nameless representation."""
    return a == b


def alpha_beta_eq(a: Term, b: Term) -> bool:
    return normalize(a) == normalize(b)


# ---------------------------------------------------------------------------
# Rendering (for diagnostics and `check --embedded` dumps)

_PRETTY_CONNECTIVE = {"$and": "&", "$or": "|", "$imp": "->", "$iff": "<->"}


def show(term: Term, names: tuple[str, ...] = ()) -> str:
    """Readable rendering of a term; invents names for bound variables."""
    taken = {c.name for c in free_consts(term)}

    def fresh(hint: str, used: tuple[str, ...]) -> str:
        if hint not in used and hint not in taken:
            return hint
        k = 1
        while f"{hint}{k}" in used or f"{hint}{k}" in taken:
            k += 1
        return f"{hint}{k}"

    def go(t: Term, ns: tuple[str, ...], prec: int) -> str:
        match t:
            case Bound(i):
                return ns[i] if i < len(ns) else f"?{i}"
            case Const(name, _):
                return {"$true": "$true", "$false": "$false"}.get(name, name)
            case App(App(Const(cn, _), a), b) if cn in _PRETTY_CONNECTIVE:
                op = _PRETTY_CONNECTIVE[cn]
                level = {"&": 3, "|": 2, "->": 1, "<->": 0}[op]
                left = go(a, ns, level + 1)
                right = go(b, ns, level if op == "->" else level + 1)
                s = f"{left} {op} {right}"
                return f"({s})" if prec > level else s
            case App(Const("$not", _), a):
                return f"~{go(a, ns, 5)}"
            case App(Const(qn, _), Lam() as pred) if qn in BINDER_NAMES:
                q = "!" if qn == "$forall" else "?"
                v = fresh(pred.hint, ns)
                s = f"{q}[{v}:{show_type(pred.var_type)}]: {go(pred.body, (v,) + ns, 4)}"
                return f"({s})" if prec > 4 else s
            case App(f, a):
                return f"{go(f, ns, 6)}({go(a, ns, 0)})"
            case Lam() as lam_t:
                v = fresh(lam_t.hint, ns)
                s = f"^[{v}:{show_type(lam_t.var_type)}]: {go(lam_t.body, (v,) + ns, 4)}"
                return f"({s})" if prec > 4 else s
        raise SttError(f"unexpected term: {t!r}")

    return go(term, names, 0)
