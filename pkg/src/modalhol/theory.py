"""Theory files: declarations, definitions, axioms, conjectures, proofs,
experiments, and the glue that resolves them into checkable/evaluable terms.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field

from . import kernel, modal, stt
from .kernel import Proof, Verdict
from .modal import (
    Formula, FrameClass, MFORM, MType, PropTerm, RESERVED_NAMES,
    embed_prop, to_stt_type, valid,
)
from .stt import Const, FnType, Term, WORLD


class TheoryError(Exception):
    pass


@dataclass(frozen=True)
class Declaration:
    name: str
    mtype: MType


@dataclass(frozen=True)
class Definition:
    name: str
    body: "Formula | PropTerm"


@dataclass(frozen=True)
class Axiom:
    name: str
    formula: Formula


@dataclass(frozen=True)
class Conjecture:
    name: str
    formula: Formula


DEFAULT_NODE_BUDGET = 10**8
DEFAULT_TIME_BUDGET = 60.0


@dataclass(frozen=True)
class ExperimentSpec:
    name: str
    kind: str                      # 'check' | 'find_model' | 'countermodel'
    target: str | None = None      # proof name / conjecture name
    frame: FrameClass | None = None
    max_worlds: int = 1
    max_indivs: int = 1
    node_budget: int = DEFAULT_NODE_BUDGET
    time_budget: float = DEFAULT_TIME_BUDGET
    expected: str = "ok"           # 'ok' | 'found' | 'exhausted'


Item = Declaration | Definition | Axiom | Conjecture | Proof | ExperimentSpec


@dataclass
class TheoryFile:
    name: str
    frame: FrameClass = FrameClass.K
    items: tuple[Item, ...] = ()
    _symbols: dict[str, MType] = field(default_factory=dict, compare=False, repr=False)
    _def_terms: dict[str, Term] = field(default_factory=dict, compare=False, repr=False)
    _axiom_terms: dict[str, Term] = field(default_factory=dict, compare=False, repr=False)
    _conj_terms: dict[str, Term] = field(default_factory=dict, compare=False, repr=False)
    _resolved: bool = field(default=False, compare=False, repr=False)

    # -- accessors by section ------------------------------------------------

    @property
    def declarations(self) -> list[Declaration]:
        return [i for i in self.items if isinstance(i, Declaration)]

    @property
    def definitions(self) -> list[Definition]:
        return [i for i in self.items if isinstance(i, Definition)]

    @property
    def axioms(self) -> list[Axiom]:
        return [i for i in self.items if isinstance(i, Axiom)]

    @property
    def conjectures(self) -> list[Conjecture]:
        return [i for i in self.items if isinstance(i, Conjecture)]

    @property
    def proofs(self) -> list[Proof]:
        return [i for i in self.items if isinstance(i, Proof)]

    @property
    def experiments(self) -> list[ExperimentSpec]:
        return [i for i in self.items if isinstance(i, ExperimentSpec)]

    # -- resolution ----------------------------------------------------------

    def resolve(self) -> "TheoryFile":
        """Check names and compile definitions/axioms/conjectures to terms.

        Enforces the file-level invariants: unique names per section, no
        forward references, reserved names untouched, proof premises naming
        axioms or previously stated conjectures, experiment targets existing.
        """
        if self._resolved:
            return self
        seen: dict[str, set[str]] = {k: set() for k in
                                     ("decl", "def", "axiom", "conjecture", "proof", "experiment")}
        symbols: dict[str, MType] = {}
        named_premises: set[str] = set()

        def claim(section: str, name: str):
            if name in RESERVED_NAMES or name.startswith("frame_") or name.startswith("$"):
                raise TheoryError(f"{name!r} is a reserved name")
            if name in seen[section]:
                raise TheoryError(f"duplicate {section} name {name!r}")
            seen[section].add(name)

        for item in self.items:
            match item:
                case Declaration(name, mtype):
                    claim("decl", name)
                    if name in symbols:
                        raise TheoryError(f"{name!r} already names a symbol")
                    symbols[name] = mtype
                case Definition(name, body):
                    claim("def", name)
                    if name in symbols:
                        raise TheoryError(f"{name!r} already names a symbol")
                    if isinstance(body, Formula):
                        term = modal.embed(body, symbols)
                        mtype: MType = MFORM
                    else:
                        term = embed_prop(body, symbols)
                        mtype = _mtype_of_stt(stt.typecheck(term))
                    symbols[name] = mtype
                    self._def_terms[name] = stt.normalize(term)
                case Axiom(name, formula):
                    claim("axiom", name)
                    self._axiom_terms[name] = valid(formula, symbols)
                    named_premises.add(name)
                case Conjecture(name, formula):
                    claim("conjecture", name)
                    self._conj_terms[name] = valid(formula, symbols)
                case Proof() as proof:
                    claim("proof", proof.name)
                    if proof.name not in seen["conjecture"]:
                        raise TheoryError(f"proof {proof.name!r} has no matching conjecture")
                    for premise in proof.premises:
                        if premise not in named_premises:
                            raise TheoryError(
                                f"proof {proof.name!r} cites {premise!r}, which is not an "
                                f"axiom or previously stated conjecture")
                case ExperimentSpec() as exp:
                    claim("experiment", exp.name)
                    if exp.kind == "check":
                        if exp.target not in seen["proof"]:
                            raise TheoryError(f"experiment {exp.name!r} targets unknown proof {exp.target!r}")
                    elif exp.kind == "countermodel":
                        if exp.target not in seen["conjecture"]:
                            raise TheoryError(
                                f"experiment {exp.name!r} targets unknown conjecture {exp.target!r}")
                    elif exp.kind != "find_model":
                        raise TheoryError(f"unknown experiment kind {exp.kind!r}")
                case _:
                    raise TheoryError(f"unexpected theory item: {item!r}")
            if isinstance(item, Conjecture):
                # A conjecture becomes citable once stated (its use before its
                # own proof is checked is reported by the checker run order).
                named_premises.add(item.name)
        self._symbols = symbols
        self._resolved = True
        return self

    def symbols(self) -> dict[str, MType]:
        self.resolve()
        return dict(self._symbols)

    def definition_terms(self) -> dict[str, Term]:
        self.resolve()
        return dict(self._def_terms)

    def axiom_terms(self) -> dict[str, Term]:
        self.resolve()
        return dict(self._axiom_terms)

    def conjecture_terms(self) -> dict[str, Term]:
        self.resolve()
        return dict(self._conj_terms)

    def premises_for(self, proof: Proof) -> dict[str, Term]:
        """Name resolution map for a proof: axioms and earlier conjectures."""
        self.resolve()
        out: dict[str, Term] = {}
        for item in self.items:
            if isinstance(item, Proof) and item.name == proof.name:
                break
            if isinstance(item, Axiom):
                out[item.name] = self._axiom_terms[item.name]
            elif isinstance(item, Conjecture):
                out[item.name] = self._conj_terms[item.name]
        return out

    # -- semantics -----------------------------------------------------------

    def unfold(self, term: Term) -> Term:
        """Replace defined constants by their definientia and beta-normalize."""
        self.resolve()
        for definition in reversed(self.definitions):
            defn = self._def_terms[definition.name]
            const = Const(definition.name, stt.typecheck(defn))
            term = stt.substitute(term, const, defn)
        return stt.normalize(term)

    def definition_equations(self) -> dict[str, Term]:
        """Definitional biconditionals as closed validity formulas."""
        self.resolve()
        out: dict[str, Term] = {}
        for definition in self.definitions:
            defn = self._def_terms[definition.name]
            ty = stt.typecheck(defn)
            const = Const(definition.name, ty)
            out[definition.name] = _pointwise_iff(const, defn, ty)
        return out

    def model_goals(self) -> list[tuple[str, Term]]:
        """Closed, definition-free goals: axioms plus definitional equations."""
        self.resolve()
        goals = [(a.name, self.unfold(self._axiom_terms[a.name])) for a in self.axioms]
        goals += [(f"def {n}", self.unfold(eq)) for n, eq in self.definition_equations().items()]
        for name, goal in goals:
            extra = {c.name for c in stt.free_consts(goal)} - {"R", "P"}
            if extra:
                raise TheoryError(
                    f"goal {name} mentions uninterpreted constants {sorted(extra)}; "
                    f"model search interprets only R and P")
        return goals

    def negated_validity(self, conjecture: str) -> Term:
        self.resolve()
        if conjecture not in self._conj_terms:
            raise TheoryError(f"unknown conjecture {conjecture!r}")
        return stt.neg(self.unfold(self._conj_terms[conjecture]))

    # -- proof checking ------------------------------------------------------

    def check(self, proof: Proof, frame: FrameClass | None = None) -> Verdict:
        self.resolve()
        if frame is not None and frame is not proof.frame:
            proof = Proof(proof.name, frame, proof.premises, proof.items, proof.conclusion)
        return kernel.check_proof(proof, self.premises_for(proof), self._def_terms)

    def check_all(self) -> dict[str, Verdict]:
        self.resolve()
        return {p.name: self.check(p) for p in self.proofs}


def _mtype_of_stt(ty: stt.Type) -> MType:
    """Inverse of to_stt_type for the types definitions can have."""
    if ty == stt.INDIV:
        return modal.MINDIV
    if ty == stt.PROP:
        return MFORM
    if isinstance(ty, FnType):
        return modal.MFn(_mtype_of_stt(ty.dom), _mtype_of_stt(ty.cod))
    raise TheoryError(f"definition has unsupported type {stt.show_type(ty)}")


def _pointwise_iff(lhs: Term, rhs: Term, ty: stt.Type) -> Term:
    """Build `forall args, w. lhs(args)(w) <-> rhs(args)(w)` for a world-predicate type."""
    args: list[Const] = []
    k = 0
    while isinstance(ty, FnType) and ty != stt.PROP:
        args.append(Const(f"%dq{k}", ty.dom))
        ty = ty.cod
        k += 1
    if ty != stt.PROP:
        raise TheoryError("definition does not end in a world predicate")
    w = Const("%dqw", WORLD)
    left = stt.app(lhs, *args, w)
    right = stt.app(rhs, *args, w)
    body = stt.iff(left, right)
    term = stt.forall(w, body, hint="w")
    for c in reversed(args):
        term = stt.forall(c, term, hint="x")
    return stt.normalize(term)


# ---------------------------------------------------------------------------
# Experiments

@dataclass(frozen=True)
class ExperimentResult:
    experiment: str
    kind: str
    outcome: str
    expected: str
    match: bool
    bounds: tuple[int, int] | None
    elapsed: float
    detail: str = ""

    def row(self) -> dict:
        return {
            "experiment": self.experiment,
            "kind": self.kind,
            "outcome": self.outcome,
            "expected": self.expected,
            "match": self.match,
            "bounds": list(self.bounds) if self.bounds else None,
            "elapsed": round(self.elapsed, 6),
        }


def run_experiment(theory: TheoryFile, exp: ExperimentSpec) -> ExperimentResult:
    from . import search  # local import: search depends on models only
    from .models import verify_model

    theory.resolve()
    start = time.monotonic()
    frame = exp.frame or theory.frame
    if exp.kind == "check":
        proof = next(p for p in theory.proofs if p.name == exp.target)
        verdict = theory.check(proof, frame=exp.frame)
        outcome = "ok" if verdict.ok else "failed"
        detail = "" if verdict.ok else verdict.describe()
        bounds = None
    else:
        bounds = (exp.max_worlds, exp.max_indivs)
        sb = search.SearchBounds(exp.max_worlds, exp.max_indivs,
                                 exp.node_budget, exp.time_budget)
        goals = [g for _, g in theory.model_goals()]
        if exp.kind == "countermodel":
            refuted = theory.negated_validity(exp.target)  # type: ignore[arg-type]
            result = search.search_model(goals + [refuted], frame, sb)
        else:
            result = search.search_model(goals, frame, sb)
        outcome = result.status
        detail = f"nodes={result.nodes}"
        if result.status == "found":
            assert result.model is not None
            conj_valid = None
            if exp.kind == "countermodel":
                conj_valid = theory.unfold(theory.conjecture_terms()[exp.target])  # type: ignore[index]
            # Independent replay through the plain evaluator.
            if not verify_model(result.model, goals, frame, conjecture=conj_valid):
                outcome = "found-unverified"
            bounds = (result.model.worlds, result.model.indivs)
    elapsed = time.monotonic() - start
    return ExperimentResult(
        experiment=exp.name, kind=exp.kind, outcome=outcome,
        expected=exp.expected, match=(outcome == exp.expected),
        bounds=bounds, elapsed=elapsed, detail=detail)


def run_experiments(theory: TheoryFile) -> list[ExperimentResult]:
    return [run_experiment(theory, exp) for exp in theory.experiments]
