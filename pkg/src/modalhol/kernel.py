"""Fitch-style natural deduction checker for the embedded logic.

Proof steps carry bool-typed terms of the embedded language; there are no
modal rules because box and diamond are compiled away before proofs are
written. Formula matching throughout is up to alpha-beta equivalence (eta is
excluded on purpose: beta suffices and keeps the trusted base small).
Classicality enters through double negation elimination only.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from . import modal, stt
from .modal import FrameClass, frame_axiom_table
from .stt import (
    BOOL, App, Const, FnType, Lam, Term, SttError,
    free_consts, normalize,
)

RULES = {
    "hyp", "axiom", "unfold", "beta",
    "imp_intro", "imp_elim", "and_intro", "and_elim_l", "and_elim_r",
    "or_intro_l", "or_intro_r", "or_elim", "not_intro", "not_elim",
    "falsity_elim", "iff_intro", "iff_elim_l", "iff_elim_r",
    "forall_intro", "forall_elim", "exists_intro", "exists_elim",
    "dneg_elim",
}


@dataclass(frozen=True)
class Just:
    rule: str
    refs: tuple[int, ...] = ()
    name: str | None = None
    term: Term | None = None
    # Surface form of the witness term, kept for printing only.
    surface: object = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Step:
    number: int
    formula: Term
    just: Just
    # Surface form of the formula, kept for printing only.
    surface: object = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Subproof:
    number: int
    fixed: tuple[Const, ...]
    items: tuple["Step | Subproof", ...]


@dataclass(frozen=True)
class Proof:
    name: str
    frame: FrameClass
    premises: tuple[str, ...]
    items: tuple[Step | Subproof, ...]
    conclusion: Term


@dataclass(frozen=True)
class Verdict:
    ok: bool
    step: int | None = None
    reason: str | None = None

    def __bool__(self):
        return self.ok

    def describe(self) -> str:
        if self.ok:
            return "ok"
        return f"step {self.step}: {self.reason}"


class _Fail(Exception):
    def __init__(self, number: int, reason: str):
        self.number = number
        self.reason = reason


@dataclass
class _BoxSummary:
    hyp: Term | None          # normalized hypothesis, if any
    fixed: tuple[Const, ...]
    last: Term                # normalized final formula


# ---------------------------------------------------------------------------
# Formula decomposition (on beta-normal forms)

def _dest_binary(t: Term, cname: str) -> tuple[Term, Term] | None:
    match t:
        case App(App(Const(n, _), a), b) if n == cname:
            return a, b
    return None


def _dest_not(t: Term) -> Term | None:
    match t:
        case App(Const("$not", _), a):
            return a
    return None


def _dest_quant(t: Term, qname: str) -> tuple[stt.Type, Term] | None:
    split = stt.binder_split(t)
    if split and split[0] == qname:
        return split[1], split[2]
    return None


def _body_at(pred: Term, value: Term) -> Term:
    return normalize(App(pred, value))


def _unfold_candidates(t: Term, target: Const, defn: Term) -> list[Term]:
    """All terms obtained by rewriting exactly one occurrence of `target`."""
    out: list[Term] = []

    def go(s: Term) -> list[Term]:
        results: list[Term] = []
        match s:
            case Const(name, ty):
                if name == target.name and ty == target.type:
                    results.append(defn)
            case App(f, a):
                results += [App(f2, a) for f2 in go(f)]
                results += [App(f, a2) for a2 in go(a)]
            case Lam(vt, body):
                results += [Lam(vt, b2, hint=s.hint) for b2 in go(body)]
        return results

    out = go(t)
    return out


# ---------------------------------------------------------------------------
# The checker

def check_proof(proof: Proof, premises: dict[str, Term],
                definitions: dict[str, Term]) -> Verdict:
    """Check every step of `proof`.

    `premises` resolves names to closed bool-typed terms; a step may cite
    only names in the proof's declared premise list plus the frame axioms of
    the proof's frame class (this is what makes the axiom-direction audit
    meaningful). `definitions` maps defined constant names to their compiled
    definientia for use by the unfold rule.
    """
    citable = {name: premises[name] for name in proof.premises if name in premises}
    unresolved = {name for name in proof.premises if name not in premises}
    for fname, fterm in frame_axiom_table(proof.frame).items():
        citable[fname] = fterm

    used_numbers: set[int] = set()
    # Names an eigenvariable must avoid: everything visible anywhere.
    taken_names: set[str] = set(definitions) | {"R", "P"}
    for t in citable.values():
        taken_names |= {c.name for c in free_consts(t)}

    def fresh_check(number: int, c: Const):
        if c.name in taken_names:
            raise _Fail(number, f"eigenvariable {c.name} is not fresh")
        taken_names.add(c.name)

    def check_items(items: tuple[Step | Subproof, ...],
                    lines: dict[int, Term],
                    boxes: dict[int, _BoxSummary],
                    in_subproof: bool) -> tuple[Term | None, Term]:
        """Returns (normalized hypothesis or None, normalized last formula)."""
        if not items:
            raise _Fail(0, "empty subproof")
        hyp: Term | None = None
        last: Term | None = None
        for pos, item in enumerate(items):
            if item.number in used_numbers:
                raise _Fail(item.number, "duplicate step number")
            used_numbers.add(item.number)
            if isinstance(item, Subproof):
                for c in item.fixed:
                    fresh_check(item.number, c)
                sub_hyp, sub_last = check_items(
                    item.items, dict(lines), dict(boxes), True)
                boxes[item.number] = _BoxSummary(sub_hyp, item.fixed, sub_last)
                last = None
                continue
            taken_names.update(c.name for c in free_consts(item.formula))
            try:
                ty = stt.typecheck(item.formula)
            except SttError as exc:
                raise _Fail(item.number, f"formula does not typecheck: {exc}")
            if ty != BOOL:
                raise _Fail(item.number, f"step formula has type {stt.show_type(ty)}, expected $o")
            if item.just.rule == "hyp":
                if not (in_subproof and pos == 0):
                    raise _Fail(item.number, "hypothesis must open a subproof")
                hyp = normalize(item.formula)
            else:
                check_step(item, lines, boxes)
            last = normalize(item.formula)
            lines[item.number] = last
        if last is None:
            raise _Fail(items[-1].number, "subproof must end with a step, not a nested subproof")
        return hyp, last

    def get_line(number: int, ref: int, lines: dict[int, Term]) -> Term:
        if ref not in lines:
            raise _Fail(number, f"reference to unavailable step {ref}")
        return lines[ref]

    def get_box(number: int, ref: int, boxes: dict[int, _BoxSummary]) -> _BoxSummary:
        if ref not in boxes:
            raise _Fail(number, f"reference to unavailable subproof {ref}")
        return boxes[ref]

    def expect(number: int, cond: bool, reason: str):
        if not cond:
            raise _Fail(number, reason)

    def check_step(step: Step, lines: dict[int, Term], boxes: dict[int, _BoxSummary]):
        n = step.number
        just = step.just
        rule = just.rule
        claim = normalize(step.formula)
        if rule not in RULES:
            raise _Fail(n, f"unknown rule {rule!r}")

        if rule == "axiom":
            name = just.name or ""
            if name in unresolved:
                raise _Fail(n, f"missing axiom: premise {name!r} cannot be resolved")
            if name not in citable:
                raise _Fail(n, f"missing axiom: {name!r} is not among this proof's premises")
            expect(n, claim == normalize(citable[name]),
                   f"formula does not match premise {name}")
        elif rule == "unfold":
            name = just.name or ""
            if name not in definitions:
                raise _Fail(n, f"unknown definition {name!r}")
            defn = definitions[name]
            const = Const(name, stt.typecheck(defn))
            src = get_line(n, just.refs[0], lines)
            fwd = any(normalize(c) == claim for c in _unfold_candidates(src, const, defn))
            bwd = any(normalize(c) == src for c in _unfold_candidates(claim, const, defn))
            expect(n, fwd or bwd,
                   f"not obtainable from step {just.refs[0]} by unfolding {name} once")
        elif rule == "beta":
            src = get_line(n, just.refs[0], lines)
            expect(n, claim == src, f"not alpha-beta-equal to step {just.refs[0]}")
        elif rule == "imp_intro":
            box = get_box(n, just.refs[0], boxes)
            expect(n, box.fixed == (), "implication introduction over a subproof with fixed variables")
            expect(n, box.hyp is not None, "subproof has no hypothesis")
            parts = _dest_binary(claim, "$imp")
            expect(n, parts is not None, "conclusion is not an implication")
            a, b = parts  # type: ignore[misc]
            expect(n, a == box.hyp, "antecedent does not match the subproof hypothesis")
            expect(n, b == box.last, "consequent does not match the subproof conclusion")
        elif rule == "imp_elim":
            src = get_line(n, just.refs[0], lines)
            minor = get_line(n, just.refs[1], lines)
            parts = _dest_binary(src, "$imp")
            expect(n, parts is not None, f"step {just.refs[0]} is not an implication")
            a, b = parts  # type: ignore[misc]
            expect(n, a == minor, f"step {just.refs[1]} does not match the antecedent")
            expect(n, b == claim, "conclusion does not match the consequent")
        elif rule == "and_intro":
            a = get_line(n, just.refs[0], lines)
            b = get_line(n, just.refs[1], lines)
            parts = _dest_binary(claim, "$and")
            expect(n, parts is not None, "conclusion is not a conjunction")
            expect(n, parts == (a, b), "conjuncts do not match the cited steps")
        elif rule in ("and_elim_l", "and_elim_r"):
            src = get_line(n, just.refs[0], lines)
            parts = _dest_binary(src, "$and")
            expect(n, parts is not None, f"step {just.refs[0]} is not a conjunction")
            want = parts[0] if rule == "and_elim_l" else parts[1]  # type: ignore[index]
            expect(n, claim == want, "conclusion does not match the conjunct")
        elif rule in ("or_intro_l", "or_intro_r"):
            src = get_line(n, just.refs[0], lines)
            parts = _dest_binary(claim, "$or")
            expect(n, parts is not None, "conclusion is not a disjunction")
            want = parts[0] if rule == "or_intro_l" else parts[1]  # type: ignore[index]
            expect(n, src == want, "cited step does not match the chosen disjunct")
        elif rule == "or_elim":
            src = get_line(n, just.refs[0], lines)
            parts = _dest_binary(src, "$or")
            expect(n, parts is not None, f"step {just.refs[0]} is not a disjunction")
            a, b = parts  # type: ignore[misc]
            left = get_box(n, just.refs[1], boxes)
            right = get_box(n, just.refs[2], boxes)
            for box, branch in ((left, a), (right, b)):
                expect(n, box.fixed == (), "case subproof must not fix variables")
                expect(n, box.hyp == branch, "case hypothesis does not match the disjunct")
                expect(n, box.last == claim, "case conclusion does not match")
        elif rule == "not_intro":
            box = get_box(n, just.refs[0], boxes)
            expect(n, box.fixed == (), "negation introduction over a subproof with fixed variables")
            expect(n, box.hyp is not None, "subproof has no hypothesis")
            expect(n, box.last == Const("$false", BOOL), "subproof does not end in $false")
            inner = _dest_not(claim)
            expect(n, inner is not None and normalize(inner) == box.hyp,
                   "conclusion is not the negation of the hypothesis")
        elif rule == "not_elim":
            neg_t = get_line(n, just.refs[0], lines)
            pos_t = get_line(n, just.refs[1], lines)
            inner = _dest_not(neg_t)
            expect(n, inner is not None, f"step {just.refs[0]} is not a negation")
            expect(n, normalize(inner) == pos_t, "steps are not contradictory")
            expect(n, claim == Const("$false", BOOL), "conclusion must be $false")
        elif rule == "falsity_elim":
            src = get_line(n, just.refs[0], lines)
            expect(n, src == Const("$false", BOOL), f"step {just.refs[0]} is not $false")
        elif rule == "iff_intro":
            fwd = get_line(n, just.refs[0], lines)
            bwd = get_line(n, just.refs[1], lines)
            parts = _dest_binary(claim, "$iff")
            expect(n, parts is not None, "conclusion is not a biconditional")
            a, b = parts  # type: ignore[misc]
            expect(n, _dest_binary(fwd, "$imp") == (a, b), "first step is not the forward implication")
            expect(n, _dest_binary(bwd, "$imp") == (b, a), "second step is not the backward implication")
        elif rule in ("iff_elim_l", "iff_elim_r"):
            src = get_line(n, just.refs[0], lines)
            parts = _dest_binary(src, "$iff")
            expect(n, parts is not None, f"step {just.refs[0]} is not a biconditional")
            a, b = parts  # type: ignore[misc]
            want = stt.imp(a, b) if rule == "iff_elim_l" else stt.imp(b, a)
            expect(n, claim == normalize(want), "conclusion does not match the implication")
        elif rule == "forall_intro":
            box = get_box(n, just.refs[0], boxes)
            expect(n, box.hyp is None, "universal introduction over a hypothetical subproof")
            expect(n, len(box.fixed) == 1, "universal introduction needs exactly one fixed variable")
            c = box.fixed[0]
            quant = _dest_quant(claim, "$forall")
            expect(n, quant is not None, "conclusion is not universally quantified")
            ty, pred = quant  # type: ignore[misc]
            expect(n, ty == c.type, "quantified type does not match the fixed variable")
            expect(n, _body_at(pred, c) == box.last,
                   "subproof conclusion does not match the instantiated body")
            expect(n, all(fc.name != c.name for fc in free_consts(claim)),
                   f"eigenvariable {c.name} occurs in the conclusion")
        elif rule == "forall_elim":
            src = get_line(n, just.refs[0], lines)
            quant = _dest_quant(src, "$forall")
            expect(n, quant is not None, f"step {just.refs[0]} is not universally quantified")
            ty, pred = quant  # type: ignore[misc]
            expect(n, just.term is not None, "missing witness term")
            try:
                wty = stt.typecheck(just.term)
            except SttError as exc:
                raise _Fail(n, f"witness does not typecheck: {exc}")
            expect(n, wty == ty,
                   f"witness type {stt.show_type(wty)} does not match {stt.show_type(ty)}")
            expect(n, claim == _body_at(pred, just.term),
                   "conclusion does not match the instantiated body")
        elif rule == "exists_intro":
            src = get_line(n, just.refs[0], lines)
            quant = _dest_quant(claim, "$exists")
            expect(n, quant is not None, "conclusion is not existentially quantified")
            ty, pred = quant  # type: ignore[misc]
            expect(n, just.term is not None, "missing witness term")
            try:
                wty = stt.typecheck(just.term)
            except SttError as exc:
                raise _Fail(n, f"witness does not typecheck: {exc}")
            expect(n, wty == ty,
                   f"witness type {stt.show_type(wty)} does not match {stt.show_type(ty)}")
            expect(n, _body_at(pred, just.term) == src,
                   f"step {just.refs[0]} does not match the instantiated body")
        elif rule == "exists_elim":
            src = get_line(n, just.refs[0], lines)
            quant = _dest_quant(src, "$exists")
            expect(n, quant is not None, f"step {just.refs[0]} is not existentially quantified")
            ty, pred = quant  # type: ignore[misc]
            box = get_box(n, just.refs[1], boxes)
            expect(n, len(box.fixed) == 1, "existential elimination needs exactly one fixed variable")
            c = box.fixed[0]
            expect(n, c.type == ty, "fixed variable type does not match the quantifier")
            expect(n, box.hyp is not None and box.hyp == _body_at(pred, c),
                   "subproof hypothesis does not match the instantiated body")
            expect(n, box.last == claim, "conclusion does not match the subproof conclusion")
            expect(n, all(fc.name != c.name for fc in free_consts(claim)),
                   f"eigenvariable {c.name} occurs in the conclusion")
        elif rule == "dneg_elim":
            src = get_line(n, just.refs[0], lines)
            inner = _dest_not(src)
            inner2 = _dest_not(inner) if inner is not None else None
            expect(n, inner2 is not None, f"step {just.refs[0]} is not a double negation")
            expect(n, normalize(inner2) == claim, "conclusion does not match the doubly negated formula")
        else:  # pragma: no cover - exhaustive above
            raise _Fail(n, f"unhandled rule {rule!r}")

    try:
        _, last = check_items(proof.items, {}, {}, False)
        if last != normalize(proof.conclusion):
            last_step = proof.items[-1]
            raise _Fail(last_step.number, "final step does not match the declared conclusion")
    except _Fail as exc:
        return Verdict(False, exc.number, exc.reason)
    return Verdict(True)


def axioms_used(proof: Proof) -> set[str]:
    """Exact set of premise names cited by axiom justifications."""
    names: set[str] = set()

    def walk(items):
        for item in items:
            if isinstance(item, Subproof):
                walk(item.items)
            elif item.just.rule == "axiom" and item.just.name:
                names.add(item.just.name)

    walk(proof.items)
    return names


# ---------------------------------------------------------------------------
# Biconditional splitting (direction audit support)

class NotBiconditional(Exception):
    pass


def split_biconditional(f: modal.Formula) -> tuple[modal.Formula, modal.Formula]:
    """Split `forall ... (lhs <-> rhs)` into its two implication directions."""
    prefix: list[tuple[type, str]] = []
    body = f
    while isinstance(body, (modal.ForallProp, modal.ForallIndiv)):
        prefix.append((type(body), body.var))
        body = body.body
    if not isinstance(body, modal.Iff):
        raise NotBiconditional(f"axiom body is not a biconditional: {body!r}")

    def rebuild(core: modal.Formula) -> modal.Formula:
        for cls, var in reversed(prefix):
            core = cls(var, core)
        return core

    forward = rebuild(modal.Implies(body.left, body.right))
    backward = rebuild(modal.Implies(body.right, body.left))
    return forward, backward
