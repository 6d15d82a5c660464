"""Finite Kripke-Henkin models and the semantic evaluator.

A model fixes a world count, an individual count, an accessibility matrix,
and a positivity table indexed by property extensions. At finite size the
full function spaces are used, so Henkin and standard semantics coincide:
quantifiers at function types range over every table.

Canonical indexing (pinned for the file format and all test vectors): the
extension of a property is bit-packed row-major over (individual, world),
bit position i*W + w, least significant bit first. The generic enumeration
of an arrow type's domain below reproduces exactly this order.
"""
from __future__ import annotations

from dataclasses import dataclass

from .modal import FrameClass
from .stt import (
    BOOL, INDIV, WORLD, App, Bound, Const, FnType, Lam, Term, Type,
    SttError, UnboundVariable,
)


class EvalError(SttError):
    pass


@dataclass(frozen=True)
class FiniteModel:
    worlds: int
    indivs: int
    access: tuple[tuple[bool, ...], ...]
    positivity: tuple[tuple[bool, ...], ...]
    frame: FrameClass | None = None

    def __post_init__(self):
        w, d = self.worlds, self.indivs
        if w < 1 or d < 1:
            raise ValueError("world and individual counts must be positive")
        if len(self.access) != w or any(len(row) != w for row in self.access):
            raise ValueError(f"access matrix must be {w}x{w}")
        n_ext = 1 << (d * w)
        if len(self.positivity) != n_ext or any(len(row) != w for row in self.positivity):
            raise ValueError(f"positivity table must be {n_ext}x{w}")
        if self.frame is not None and not frame_condition_holds(self.access, self.frame):
            raise ValueError(f"access relation violates frame class {self.frame.value}")

    def extension_index(self, extension: tuple[tuple[bool, ...], ...]) -> int:
        """Canonical index of a property extension given as [indiv][world] bools."""
        idx = 0
        for i in range(self.indivs):
            for w in range(self.worlds):
                if extension[i][w]:
                    idx |= 1 << (i * self.worlds + w)
        return idx

    def extension_from_index(self, idx: int) -> tuple[tuple[bool, ...], ...]:
        return tuple(
            tuple(bool(idx >> (i * self.worlds + w) & 1) for w in range(self.worlds))
            for i in range(self.indivs))


def frame_condition_holds(access: tuple[tuple[bool, ...], ...], fc: FrameClass) -> bool:
    n = len(access)
    if fc is FrameClass.K:
        return True
    symmetric = all(access[u][v] == access[v][u] for u in range(n) for v in range(n))
    if fc is FrameClass.KB:
        return symmetric
    reflexive = all(access[u][u] for u in range(n))
    transitive = all(
        (not (access[u][v] and access[v][t])) or access[u][t]
        for u in range(n) for v in range(n) for t in range(n))
    return reflexive and symmetric and transitive


# ---------------------------------------------------------------------------
# Type domains

_domain_cache: dict[tuple[int, int, Type], tuple] = {}


def domain(ty: Type, worlds: int, indivs: int) -> tuple:
    """All semantic values of `ty`, in canonical order."""
    key = (worlds, indivs, ty)
    cached = _domain_cache.get(key)
    if cached is not None:
        return cached
    if ty == BOOL:
        result: tuple = (False, True)
    elif ty == INDIV:
        result = tuple(range(indivs))
    elif ty == WORLD:
        result = tuple(range(worlds))
    elif isinstance(ty, FnType):
        da = domain(ty.dom, worlds, indivs)
        db = domain(ty.cod, worlds, indivs)
        nb = len(db)
        size = nb ** len(da)
        result = tuple(
            tuple(db[(k // nb ** j) % nb] for j in range(len(da)))
            for k in range(size))
    else:
        raise EvalError(f"no finite domain for type {ty!r}")
    _domain_cache[key] = result
    return result


def domain_size(ty: Type, worlds: int, indivs: int) -> int:
    if ty == BOOL:
        return 2
    if ty == INDIV:
        return indivs
    if ty == WORLD:
        return worlds
    if isinstance(ty, FnType):
        return domain_size(ty.cod, worlds, indivs) ** domain_size(ty.dom, worlds, indivs)
    raise EvalError(f"no finite domain for type {ty!r}")


def canon_index(value, ty: Type, worlds: int, indivs: int) -> int:
    """Position of a semantic value in its type's canonical enumeration."""
    if ty == BOOL:
        return int(value)
    if ty == INDIV or ty == WORLD:
        return value
    if isinstance(ty, FnType):
        nb = domain_size(ty.cod, worlds, indivs)
        idx = 0
        stride = 1
        for component in value:
            idx += canon_index(component, ty.cod, worlds, indivs) * stride
            stride *= nb
        return idx
    raise EvalError(f"no finite domain for type {ty!r}")


# ---------------------------------------------------------------------------
# Evaluation

_CONNECTIVE_TABLES = {
    "$not": (True, False),
    "$and": ((False, False), (False, True)),
    "$or": ((False, True), (True, True)),
    "$imp": ((True, True), (False, True)),
    "$iff": ((True, False), (False, True)),
}


def eval_term(m: FiniteModel, term: Term, env: dict[str, object] | None = None):
    """Tarski-style evaluation; returns a bool, an index, or a function table.

    `env` assigns semantic values to named free variables. The constants R
    and P denote the model's accessibility matrix and positivity table; any
    other constant must be bound in `env` (definitions are expected to have
    been unfolded before evaluation).
    """
    env = env or {}
    w, d = m.worlds, m.indivs

    def const_value(c: Const):
        name = c.name
        if name == "$true":
            return True
        if name == "$false":
            return False
        if name in _CONNECTIVE_TABLES:
            return _CONNECTIVE_TABLES[name]
        if name in ("$forall", "$exists"):
            pred_ty = c.type.dom  # type: ignore[union-attr]
            preds = domain(pred_ty, w, d)
            agg = all if name == "$forall" else any
            return tuple(agg(p) for p in preds)
        if name == "R":
            return m.access
        if name == "P":
            return m.positivity
        if name in env:
            return env[name]
        raise UnboundVariable(name)

    def ev(t: Term, stack: tuple, tys: tuple[Type, ...]):
        """Returns (type, value); `stack`/`tys` hold bound-variable frames."""
        match t:
            case Bound(i):
                return tys[i], stack[i]
            case Const(_, ty):
                return ty, const_value(t)
            case App(App(Const(cn, _), a), b) if cn in ("$and", "$or", "$imp", "$iff"):
                _, av = ev(a, stack, tys)
                if cn == "$and" and not av:
                    return BOOL, False
                if cn == "$or" and av:
                    return BOOL, True
                if cn == "$imp" and not av:
                    return BOOL, True
                _, bv = ev(b, stack, tys)
                if cn == "$iff":
                    return BOOL, av == bv
                return BOOL, bool(bv)
            case App(Const("$not", _), a):
                _, av = ev(a, stack, tys)
                return BOOL, not av
            case App(Const(qn, _), pred) if qn in ("$forall", "$exists"):
                _, pv = ev(pred, stack, tys)
                agg = all if qn == "$forall" else any
                return BOOL, agg(pv)
            case App(f, a):
                fty, fv = ev(f, stack, tys)
                aty, av = ev(a, stack, tys)
                if not isinstance(fty, FnType) or fty.dom != aty:
                    raise EvalError(f"ill-typed application during evaluation: {t!r}")
                return fty.cod, fv[canon_index(av, aty, w, d)]
            case Lam(vt, body):
                values = domain(vt, w, d)
                results = []
                rty: Type | None = None
                for value in values:
                    rty, rv = ev(body, (value,) + stack, (vt,) + tys)
                    results.append(rv)
                if rty is None:  # empty domain cannot happen (all sizes >= 1)
                    raise EvalError("empty domain")
                return FnType(vt, rty), tuple(results)
        raise EvalError(f"unexpected term: {t!r}")

    return ev(term, (), ())[1]


def holds(m: FiniteModel, formula: Term, env: dict[str, object] | None = None) -> bool:
    value = eval_term(m, formula, env)
    if not isinstance(value, bool):
        raise EvalError("formula did not evaluate to a truth value")
    return value


def verify_model(m: FiniteModel, axioms: list[Term], fc: FrameClass,
                 conjecture: Term | None = None) -> bool:
    """Independent re-check of a search result using only the evaluator.

    True iff the access relation satisfies `fc`, every axiom (a closed
    bool-typed term, definitions already unfolded) holds, and, when given,
    the conjecture's validity formula is false (the model refutes it).
    """
    if not frame_condition_holds(m.access, fc):
        return False
    if not all(holds(m, a) for a in axioms):
        return False
    if conjecture is not None and holds(m, conjecture):
        return False
    return True


# ---------------------------------------------------------------------------
# Model file format

def write_model(m: FiniteModel) -> str:
    lines = [f"worlds {m.worlds}", f"indivs {m.indivs}", "access"]
    lines += ["".join("1" if b else "0" for b in row) for row in m.access]
    lines.append("positivity")
    lines += ["".join("1" if b else "0" for b in row) for row in m.positivity]
    return "\n".join(lines) + "\n"


def read_model(text: str) -> FiniteModel:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    try:
        if not lines[0].startswith("worlds ") or not lines[1].startswith("indivs "):
            raise ValueError("model file must start with 'worlds N' and 'indivs M'")
        w = int(lines[0].split()[1])
        d = int(lines[1].split()[1])
        if lines[2] != "access":
            raise ValueError("expected 'access' section")
        rows = lines[3:3 + w]
        if lines[3 + w] != "positivity":
            raise ValueError("expected 'positivity' section")
        pos_rows = lines[4 + w:]
    except IndexError as exc:
        raise ValueError("truncated model file") from exc
    n_ext = 1 << (d * w)
    if len(pos_rows) != n_ext:
        raise ValueError(f"expected {n_ext} positivity rows, found {len(pos_rows)}")

    def parse_row(row: str, width: int) -> tuple[bool, ...]:
        if len(row) != width or any(ch not in "01" for ch in row):
            raise ValueError(f"bad bit row: {row!r}")
        return tuple(ch == "1" for ch in row)

    return FiniteModel(
        worlds=w, indivs=d,
        access=tuple(parse_row(r, w) for r in rows),
        positivity=tuple(parse_row(r, w) for r in pos_rows))
