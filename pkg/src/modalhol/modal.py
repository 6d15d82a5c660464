"""Quantified modal surface language and its possible-worlds compilation.

Modal formulas denote predicates on worlds: `embed` maps a formula to a
simply typed term of type world>bool, `valid` closes it under a universal
world quantifier. Box and diamond compile to guarded quantification over the
accessibility relation R; individual and property quantifiers range over a
single constant domain shared by all worlds; the positivity predicate P is
world-indexed so that its necessitation is a genuine axiom rather than a
triviality of the encoding.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

from . import stt
from .stt import (
    BOOL, INDIV, PROP, PROPERTY, WORLD, App, Const, FnType, Term, Type,
    app, conj, disj, exists, forall, iff, imp, lam, neg,
)


class ScopeError(Exception):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"unbound name: {name}")


class ModalTypeError(Exception):
    pass


# ---------------------------------------------------------------------------
# Modal types: individuals, world-predicates ("formulas"), and functions.

@dataclass(frozen=True)
class MType:
    __slots__ = ()


@dataclass(frozen=True)
class MBase(MType):
    name: str

    def __repr__(self):
        return self.name


@dataclass(frozen=True)
class MFn(MType):
    dom: MType
    cod: MType

    def __repr__(self):
        return f"({self.dom!r} > {self.cod!r})"


MINDIV = MBase("$i")
MFORM = MBase("$form")
MPROPERTY = MFn(MINDIV, MFORM)


def to_stt_type(mt: MType) -> Type:
    match mt:
        case MBase("$i"):
            return INDIV
        case MBase("$form"):
            return PROP
        case MFn(dom, cod):
            return FnType(to_stt_type(dom), to_stt_type(cod))
    raise ModalTypeError(f"unexpected modal type: {mt!r}")


def show_mtype(mt: MType) -> str:
    if isinstance(mt, MBase):
        return mt.name
    return f"({show_mtype(mt.dom)} > {show_mtype(mt.cod)})"


# ---------------------------------------------------------------------------
# AST

@dataclass(frozen=True)
class Formula:
    __slots__ = ()


@dataclass(frozen=True)
class PropTerm:
    __slots__ = ()


@dataclass(frozen=True)
class IndivTerm:
    __slots__ = ()


@dataclass(frozen=True)
class IndivVar(IndivTerm):
    name: str


@dataclass(frozen=True)
class IndivConst(IndivTerm):
    name: str


@dataclass(frozen=True)
class PropVar(PropTerm):
    name: str


@dataclass(frozen=True)
class DefinedProp(PropTerm):
    """A defined or declared symbol (G, NE, ess, ...) of any modal type."""
    name: str


@dataclass(frozen=True)
class PropLambda(PropTerm):
    """Abstraction forming a property (or property family) from a body."""
    var: str
    var_mtype: MType
    body: "Formula | PropTerm"


@dataclass(frozen=True)
class NegProp(PropTerm):
    """Pointwise complement of a property."""
    prop: PropTerm


@dataclass(frozen=True)
class PropApp(PropTerm):
    """Application of a property family, e.g. ess applied to a property."""
    fn: PropTerm
    arg: "PropTerm | IndivTerm"


@dataclass(frozen=True)
class Truth(Formula):
    pass


@dataclass(frozen=True)
class Falsity(Formula):
    pass


@dataclass(frozen=True)
class Not(Formula):
    body: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Iff(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Box(Formula):
    body: Formula


@dataclass(frozen=True)
class Dia(Formula):
    body: Formula


@dataclass(frozen=True)
class ForallIndiv(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class ExistsIndiv(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class ForallProp(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class ExistsProp(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class AtomApp(Formula):
    """Application of a property to an individual."""
    prop: PropTerm
    arg: IndivTerm


@dataclass(frozen=True)
class Positive(Formula):
    """The positivity predicate applied to a property."""
    prop: PropTerm


# Embedding-level constants: accessibility and positivity.
ACCESS = Const("R", FnType(WORLD, FnType(WORLD, BOOL)))
POSITIVE = Const("P", FnType(PROPERTY, PROP))

RESERVED_NAMES = {"R", "P"}


# ---------------------------------------------------------------------------
# Frame classes

class FrameClass(enum.Enum):
    K = "K"
    KB = "KB"
    S5 = "S5"


def _refl_axiom() -> Term:
    u = Const("u", WORLD)
    return forall(u, app(ACCESS, u, u))


def _sym_axiom() -> Term:
    u, v = Const("u", WORLD), Const("v", WORLD)
    return forall(u, forall(v, imp(app(ACCESS, u, v), app(ACCESS, v, u))))


def _trans_axiom() -> Term:
    u, v, t = Const("u", WORLD), Const("v", WORLD), Const("t", WORLD)
    return forall(u, forall(v, forall(t, imp(
        conj(app(ACCESS, u, v), app(ACCESS, v, t)), app(ACCESS, u, t)))))


def frame_axiom_table(fc: FrameClass) -> dict[str, Term]:
    """Named accessibility conditions available to proofs under `fc`."""
    if fc is FrameClass.K:
        return {}
    if fc is FrameClass.KB:
        return {"frame_sym": _sym_axiom()}
    return {
        "frame_refl": _refl_axiom(),
        "frame_sym": _sym_axiom(),
        "frame_trans": _trans_axiom(),
    }


def frame_axioms(fc: FrameClass) -> list[Term]:
    return list(frame_axiom_table(fc).values())


# ---------------------------------------------------------------------------
# The embedding

class _Embedder:
    def __init__(self, symbols: dict[str, MType], free: dict[str, Const]):
        self.symbols = symbols
        self.free = free
        self._counter = 0

    def fresh(self, ty: Type, hint: str) -> Const:
        # '%' is not a legal identifier character, so generated names can
        # never collide with user-written or eigenvariable constants.
        self._counter += 1
        return Const(f"%{hint}{self._counter}", ty)

    def formula(self, f: Formula, env: dict[str, Const]) -> Term:
        """Compile `f` to a term of type world>bool."""
        match f:
            case Truth():
                return self._lift_const(stt.TRUE)
            case Falsity():
                return self._lift_const(stt.FALSE)
            case Not(body):
                return self._pointwise1(stt.neg, body, env)
            case And(a, b):
                return self._pointwise2(conj, a, b, env)
            case Or(a, b):
                return self._pointwise2(disj, a, b, env)
            case Implies(a, b):
                return self._pointwise2(imp, a, b, env)
            case Iff(a, b):
                return self._pointwise2(iff, a, b, env)
            case Box(body):
                w = self.fresh(WORLD, "w")
                v = self.fresh(WORLD, "v")
                inner = imp(app(ACCESS, w, v), App(self.formula(body, env), v))
                return lam(w, forall(v, inner, hint="v"), hint="w")
            case Dia(body):
                w = self.fresh(WORLD, "w")
                v = self.fresh(WORLD, "v")
                inner = conj(app(ACCESS, w, v), App(self.formula(body, env), v))
                return lam(w, exists(v, inner, hint="v"), hint="w")
            case ForallIndiv(x, body):
                return self._quant(stt.forall, x, MINDIV, body, env)
            case ExistsIndiv(x, body):
                return self._quant(stt.exists, x, MINDIV, body, env)
            case ForallProp(x, body):
                return self._quant(stt.forall, x, MPROPERTY, body, env)
            case ExistsProp(x, body):
                return self._quant(stt.exists, x, MPROPERTY, body, env)
            case AtomApp(p, t):
                w = self.fresh(WORLD, "w")
                pe = self.prop(p, env)
                te = self.indiv(t, env)
                return lam(w, app(pe, te, w), hint="w")
            case Positive(p):
                w = self.fresh(WORLD, "w")
                pe = self.prop(p, env)
                if stt.typecheck(pe) != PROPERTY:
                    raise ModalTypeError("pos takes a property argument")
                return lam(w, app(POSITIVE, pe, w), hint="w")
        raise ModalTypeError(f"unexpected formula node: {f!r}")

    def prop(self, p: PropTerm, env: dict[str, Const]) -> Term:
        match p:
            case PropVar(name):
                c = env.get(name) or self.free.get(name)
                if c is None:
                    raise ScopeError(name)
                return c
            case DefinedProp(name):
                mt = self.symbols.get(name)
                if mt is None:
                    raise ScopeError(name)
                return Const(name, to_stt_type(mt))
            case PropLambda(var, var_mtype, body):
                c = self.fresh(to_stt_type(var_mtype), var)
                inner_env = dict(env)
                inner_env[var] = c
                if isinstance(body, Formula):
                    be = self.formula(body, inner_env)
                else:
                    be = self.prop(body, inner_env)
                return lam(c, be, hint=var)
            case NegProp(q):
                qe = self.prop(q, env)
                if stt.typecheck(qe) != PROPERTY:
                    raise ModalTypeError("non takes a property argument")
                x = self.fresh(INDIV, "x")
                w = self.fresh(WORLD, "w")
                return lam(x, lam(w, neg(app(qe, x, w)), hint="w"), hint="x")
            case PropApp(fn, arg):
                fe = self.prop(fn, env)
                fty = stt.typecheck(fe)
                if not isinstance(fty, FnType):
                    raise ModalTypeError(f"cannot apply non-function: {stt.show(fe)}")
                if isinstance(arg, IndivTerm):
                    ae = self.indiv(arg, env)
                else:
                    ae = self.prop(arg, env)
                if stt.typecheck(ae) != fty.dom:
                    raise ModalTypeError(
                        f"argument type {stt.show_type(stt.typecheck(ae))} does not "
                        f"match expected {stt.show_type(fty.dom)}")
                return App(fe, ae)
        raise ModalTypeError(f"unexpected property term: {p!r}")

    def indiv(self, t: IndivTerm, env: dict[str, Const]) -> Term:
        match t:
            case IndivVar(name):
                c = env.get(name) or self.free.get(name)
                if c is None:
                    raise ScopeError(name)
                if c.type != INDIV:
                    raise ModalTypeError(f"{name} is not an individual")
                return c
            case IndivConst(name):
                mt = self.symbols.get(name)
                if mt is None:
                    raise ScopeError(name)
                if mt != MINDIV:
                    raise ModalTypeError(f"{name} is not an individual constant")
                return Const(name, INDIV)
        raise ModalTypeError(f"unexpected individual term: {t!r}")

    def _lift_const(self, value: Term) -> Term:
        w = self.fresh(WORLD, "w")
        return lam(w, value, hint="w")

    def _pointwise1(self, op, body: Formula, env) -> Term:
        w = self.fresh(WORLD, "w")
        return lam(w, op(App(self.formula(body, env), w)), hint="w")

    def _pointwise2(self, op, a: Formula, b: Formula, env) -> Term:
        w = self.fresh(WORLD, "w")
        return lam(w, op(App(self.formula(a, env), w), App(self.formula(b, env), w)), hint="w")

    def _quant(self, binder, var: str, var_mtype: MType, body: Formula, env) -> Term:
        w = self.fresh(WORLD, "w")
        c = self.fresh(to_stt_type(var_mtype), var)
        inner_env = dict(env)
        inner_env[var] = c
        inner = App(self.formula(body, inner_env), w)
        return lam(w, binder(c, inner, hint=var), hint="w")


def embed(f: Formula, symbols: dict[str, MType] | None = None,
          free: dict[str, Const] | None = None) -> Term:
    """Compile a well-scoped modal formula to a term of type world>bool."""
    term = _Embedder(symbols or {}, free or {}).formula(f, {})
    stt.typecheck(term)
    return term


def embed_prop(p: PropTerm, symbols: dict[str, MType] | None = None,
               free: dict[str, Const] | None = None) -> Term:
    term = _Embedder(symbols or {}, free or {}).prop(p, {})
    stt.typecheck(term)
    return term


def valid(f: Formula, symbols: dict[str, MType] | None = None) -> Term:
    """Truth at all worlds, beta-normalized: the closed shape judged by proofs."""
    w = Const("%valid_w", WORLD)
    return stt.normalize(forall(w, App(embed(f, symbols), w), hint="w"))
