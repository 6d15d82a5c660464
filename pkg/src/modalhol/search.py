"""Bounded model and countermodel search.

The search space is exactly the accessibility bits and the positivity bits;
defined symbols never appear in goals (callers unfold them first). Access
matrices are enumerated in ascending canonical order (bit u*W+v of the
matrix integer, least significant first) filtered by the frame condition;
positivity bits are assigned depth-first in ascending canonical index order
(bit position e*W+w), false branch first. Two prunings: when the goal set
contains the positivity-complement pairing axiom, assigning one bit of a
complement pair forces the other; and after every assignment each still-live
goal is re-evaluated three-valuedly, dropping goals that became true and
abandoning the branch when one became false.

The first model reached by this discipline is the least one in the canonical
order, which makes results reproducible regardless of scheduling.
"""
from __future__ import annotations

import time
from dataclasses import dataclass

from . import modal, stt
from .modal import Formula, FrameClass, MType
from .models import FiniteModel, canon_index, domain, frame_condition_holds
from .stt import App, Bound, Const, FnType, Lam, Term

_TRI = bool | None


@dataclass(frozen=True)
class SearchBounds:
    max_worlds: int
    max_indivs: int
    node_budget: int = 10**8
    time_budget: float = 60.0

    def __post_init__(self):
        if min(self.max_worlds, self.max_indivs, self.node_budget) < 1 or self.time_budget <= 0:
            raise ValueError("search bounds must be positive")


@dataclass(frozen=True)
class SearchResult:
    status: str                    # 'found' | 'exhausted' | 'budget'
    model: FiniteModel | None
    nodes: int
    elapsed: float

    @property
    def found(self) -> bool:
        return self.status == "found"


class _Budget(Exception):
    pass


def _canonical_pairing_goal() -> Term:
    """The compiled complement-pairing axiom, used to enable pair propagation."""
    phi = modal.PropVar("Phi")
    a1 = modal.ForallProp("Phi", modal.Iff(
        modal.Positive(modal.NegProp(phi)), modal.Not(modal.Positive(phi))))
    return modal.valid(a1)


_PAIRING_GOAL = _canonical_pairing_goal()


# ---------------------------------------------------------------------------
# Three-valued evaluation over a partial positivity table

class _PartialEvaluator:
    """Kleene evaluation of closed bool terms over R (total) and P (partial)."""

    def __init__(self, worlds: int, indivs: int, access: tuple[tuple[bool, ...], ...],
                 positivity: list[list[_TRI]]):
        self.w = worlds
        self.d = indivs
        self.access = access
        self.positivity = positivity
        self._memo: dict[tuple[int, tuple], object] = {}
        self._p_free: dict[int, bool] = {}
        self._loose: dict[int, int] = {}
        self._keepalive: list[Term] = []

    def _analyze(self, t: Term) -> tuple[bool, int]:
        """(mentions P, loose index depth), cached by object identity."""
        key = id(t)
        if key in self._p_free:
            return self._p_free[key], self._loose[key]
        match t:
            case Bound(i):
                p, loose = False, i + 1
            case Const(name, _):
                p, loose = name == "P", 0
            case App(f, a):
                pf, lf = self._analyze(f)
                pa, la = self._analyze(a)
                p, loose = pf or pa, max(lf, la)
            case Lam(_, body):
                pb, lb = self._analyze(body)
                p, loose = pb, max(0, lb - 1)
            case _:
                raise stt.SttError(f"unexpected term: {t!r}")
        self._p_free[key] = p
        self._loose[key] = loose
        self._keepalive.append(t)
        return p, loose

    def eval(self, t: Term):
        return self._ev(t, (), ())

    def _ev(self, t: Term, stack: tuple, tys: tuple):
        mentions_p, loose = self._analyze(t)
        memo_key = None
        if not mentions_p:
            memo_key = (id(t), stack[:loose])
            hit = self._memo.get(memo_key, _MISS)
            if hit is not _MISS:
                return hit
        value = self._ev_raw(t, stack, tys)
        if memo_key is not None:
            self._memo[memo_key] = value
        return value

    def _ev_raw(self, t: Term, stack: tuple, tys: tuple):
        w, d = self.w, self.d
        match t:
            case Bound(i):
                return stack[i]
            case Const("$true", _):
                return True
            case Const("$false", _):
                return False
            case Const("R", _):
                return self.access
            case Const("P", _):
                return self.positivity
            case App(App(Const(cn, _), a), b) if cn in ("$and", "$or", "$imp", "$iff"):
                av = self._ev(a, stack, tys)
                if cn == "$and" and av is False:
                    return False
                if cn == "$or" and av is True:
                    return True
                if cn == "$imp" and av is False:
                    return True
                bv = self._ev(b, stack, tys)
                if cn == "$and":
                    return bv if av is True else (False if bv is False else None)
                if cn == "$or":
                    return bv if av is False else (True if bv is True else None)
                if cn == "$imp":
                    return bv if av is True else (True if bv is True else None)
                if av is None or bv is None:
                    return None
                return av == bv
            case App(Const("$not", _), a):
                av = self._ev(a, stack, tys)
                return None if av is None else not av
            case App(Const(qn, qty), pred) if qn in ("$forall", "$exists"):
                assert isinstance(qty, FnType)
                vty = qty.dom.dom  # type: ignore[union-attr]
                want_all = qn == "$forall"
                saw_unknown = False
                for value in domain(vty, w, d):
                    iv = self._apply(pred, value, vty, stack, tys)
                    if iv is None:
                        saw_unknown = True
                    elif iv is not want_all:
                        return not want_all
                return None if saw_unknown else want_all
            case App(f, a):
                fv = self._ev(f, stack, tys)
                if fv is None:
                    return None
                av = self._ev(a, stack, tys)
                if _has_unknown(av):
                    # Indexing by a value that still depends on unassigned
                    # positivity bits: undetermined.
                    return None
                aty = self._type_of(a, tys)
                return fv[canon_index(av, aty, w, d)]
            case Lam(vt, body):
                return tuple(self._ev(body, (value,) + stack, (vt,) + tys)
                             for value in domain(vt, w, d))
        raise stt.SttError(f"unexpected term during search evaluation: {t!r}")

    def _apply(self, pred: Term, value, vty, stack: tuple, tys: tuple):
        """Evaluate `pred value` without materializing pred's full table."""
        if isinstance(pred, Lam):
            return self._ev(pred.body, (value,) + stack, (vty,) + tys)
        fv = self._ev(pred, stack, tys)
        return fv[canon_index(value, vty, self.w, self.d)]

    def _type_of(self, t: Term, tys: tuple) -> stt.Type:
        match t:
            case Bound(i):
                return tys[i]
            case Const(_, ty):
                return ty
            case App(f, _):
                fty = self._type_of(f, tys)
                assert isinstance(fty, FnType)
                return fty.cod
            case Lam(vt, body):
                return FnType(vt, self._type_of(body, (vt,) + tys))
        raise stt.SttError(f"unexpected term: {t!r}")


_MISS = object()


def _has_unknown(value) -> bool:
    if value is None:
        return True
    if isinstance(value, tuple):
        return any(_has_unknown(v) for v in value)
    return False


# ---------------------------------------------------------------------------
# The search proper

def search_model(goals: list[Term], fc: FrameClass, bounds: SearchBounds) -> SearchResult:
    """Find the canonically least finite model satisfying all closed goals.

    Exhaustive within (max_worlds, max_indivs): an 'exhausted' result means
    no model of any size up to the bounds satisfies the goals. Sizes are
    tried in lexicographic (worlds, indivs) order.
    """
    start = time.monotonic()
    deadline = start + bounds.time_budget
    state = {"nodes": 0}
    pairing = any(g == _PAIRING_GOAL for g in goals)

    def tick():
        state["nodes"] += 1
        if state["nodes"] > bounds.node_budget or time.monotonic() > deadline:
            raise _Budget()

    try:
        for worlds in range(1, bounds.max_worlds + 1):
            for indivs in range(1, bounds.max_indivs + 1):
                model = _search_at_size(goals, fc, worlds, indivs, pairing, tick)
                if model is not None:
                    return SearchResult("found", model, state["nodes"], time.monotonic() - start)
    except _Budget:
        return SearchResult("budget", None, state["nodes"], time.monotonic() - start)
    return SearchResult("exhausted", None, state["nodes"], time.monotonic() - start)


def _search_at_size(goals: list[Term], fc: FrameClass, worlds: int, indivs: int,
                    pairing: bool, tick) -> FiniteModel | None:
    n_ext = 1 << (indivs * worlds)
    n_bits = n_ext * worlds
    mask = n_ext - 1

    if pairing:
        decisions = [e * worlds + w for e in range(n_ext) if e < mask - e
                     for w in range(worlds)]
        decisions.sort()
    else:
        decisions = list(range(n_bits))

    for access_code in range(1 << (worlds * worlds)):
        access = tuple(
            tuple(bool(access_code >> (u * worlds + v) & 1) for v in range(worlds))
            for u in range(worlds))
        if not frame_condition_holds(access, fc):
            continue
        positivity: list[list[_TRI]] = [[None] * worlds for _ in range(n_ext)]
        ev = _PartialEvaluator(worlds, indivs, access, positivity)

        def assign(pos: int, value: bool) -> list[tuple[int, int]]:
            e, w = divmod(pos, worlds)
            touched = [(e, w)]
            positivity[e][w] = value
            if pairing:
                ce = mask - e
                positivity[ce][w] = not value
                touched.append((ce, w))
            return touched

        def retract(touched: list[tuple[int, int]]):
            for e, w in touched:
                positivity[e][w] = None

        def dfs(level: int, live: tuple[int, ...]) -> FiniteModel | None:
            if not live:
                return _complete(worlds, indivs, access, positivity, pairing, mask)
            if level == len(decisions):
                return None  # some goal still undetermined yet all bits set: impossible
            for value in (False, True):
                touched = assign(decisions[level], value)
                tick()
                still: list[int] = []
                failed = False
                for gi in live:
                    gv = ev.eval(goals[gi])
                    if gv is False:
                        failed = True
                        break
                    if gv is None:
                        still.append(gi)
                if not failed:
                    result = dfs(level + 1, tuple(still))
                    if result is not None:
                        return result
                retract(touched)
            return None

        live0 = []
        failed0 = False
        for gi in range(len(goals)):
            gv = ev.eval(goals[gi])
            if gv is False:
                failed0 = True
                break
            if gv is None:
                live0.append(gi)
        if failed0:
            continue
        found = dfs(0, tuple(live0))
        if found is not None:
            return found
    return None


def _complete(worlds: int, indivs: int, access: tuple[tuple[bool, ...], ...],
              positivity: list[list[_TRI]], pairing: bool, mask: int) -> FiniteModel:
    """Fill unassigned bits canonically (false; complements true under pairing)."""
    n_ext = len(positivity)
    filled = [row[:] for row in positivity]
    for e in range(n_ext):
        for w in range(worlds):
            if filled[e][w] is None:
                filled[e][w] = False
                if pairing:
                    filled[mask - e][w] = True
    return FiniteModel(
        worlds=worlds, indivs=indivs, access=access,
        positivity=tuple(tuple(bool(b) for b in row) for row in filled))


# ---------------------------------------------------------------------------
# Modal-level entry points

def _unfold_with(term: Term, definitions: dict[str, Term]) -> Term:
    for name in reversed(list(definitions)):
        defn = definitions[name]
        term = stt.substitute(term, Const(name, stt.typecheck(defn)), defn)
    return stt.normalize(term)


def find_model(axioms: list[Formula], fc: FrameClass, bounds: SearchBounds,
               symbols: dict[str, MType] | None = None,
               definitions: dict[str, Term] | None = None) -> SearchResult:
    """Search for a model of the axioms under the frame class.

    `definitions` (compiled definientia in declaration order) are unfolded
    out of the goals: defined symbols are computed, never searched over.
    """
    goals = [_unfold_with(modal.valid(a, symbols), definitions or {}) for a in axioms]
    return search_model(goals, fc, bounds)


def find_countermodel(axioms: list[Formula], conjecture: Formula, fc: FrameClass,
                      bounds: SearchBounds,
                      symbols: dict[str, MType] | None = None,
                      definitions: dict[str, Term] | None = None) -> SearchResult:
    """Search for a model of the axioms in which the conjecture is not valid."""
    goals = [_unfold_with(modal.valid(a, symbols), definitions or {}) for a in axioms]
    refuted = stt.neg(_unfold_with(modal.valid(conjecture, symbols), definitions or {}))
    return search_model(goals + [stt.normalize(refuted)], fc, bounds)
