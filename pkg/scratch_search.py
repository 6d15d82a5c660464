# Scratch: early search validation + timing, before corpus authoring.
import time

from modalhol.modal import *
from modalhol import modal, stt
from modalhol.search import SearchBounds, find_model, find_countermodel
from modalhol.models import verify_model, write_model

pv = PropVar
IV = IndivVar

symbols = {"G": MPROPERTY, "ess": MFn(MPROPERTY, MPROPERTY), "NE": MPROPERTY}

a1 = ForallProp("Phi", Iff(Positive(NegProp(pv("Phi"))), Not(Positive(pv("Phi")))))
a1a = ForallProp("Phi", Implies(Positive(NegProp(pv("Phi"))), Not(Positive(pv("Phi")))))
a2 = ForallProp("Phi", ForallProp("Psi", Implies(
    And(Positive(pv("Phi")),
        Box(ForallIndiv("x", Implies(AtomApp(pv("Phi"), IV("x")), AtomApp(pv("Psi"), IV("x")))))),
    Positive(pv("Psi")))))
a3 = Positive(DefinedProp("G"))
a4 = ForallProp("Phi", Implies(Positive(pv("Phi")), Box(Positive(pv("Phi")))))
a5 = Positive(DefinedProp("NE"))

g_def = PropLambda("x", MINDIV, ForallProp("Phi", Implies(Positive(pv("Phi")), AtomApp(pv("Phi"), IV("x")))))


def ess_def(with_first_conjunct: bool):
    rest = ForallProp("Psi", Implies(AtomApp(pv("Psi"), IV("x")),
        Box(ForallIndiv("y", Implies(AtomApp(pv("Phi"), IV("y")), AtomApp(pv("Psi"), IV("y")))))))
    body = And(AtomApp(pv("Phi"), IV("x")), rest) if with_first_conjunct else rest
    return PropLambda("Phi", MPROPERTY, PropLambda("x", MINDIV, body))


ne_def = PropLambda("x", MINDIV, ForallProp("Phi", Implies(
    AtomApp(PropApp(DefinedProp("ess"), pv("Phi")), IV("x")),
    Box(ExistsIndiv("y", AtomApp(pv("Phi"), IV("y")))))))


def make_defs(broken=False):
    out = {}
    out["G"] = stt.normalize(modal.embed_prop(g_def, symbols))
    out["ess"] = stt.normalize(modal.embed_prop(ess_def(not broken), symbols))
    out["NE"] = stt.normalize(modal.embed_prop(ne_def, symbols))
    return out


scott = [a1, a2, a3, a4, a5]
t3 = Box(ExistsIndiv("x", AtomApp(DefinedProp("G"), IV("x"))))
t2 = ForallIndiv("x", Implies(AtomApp(DefinedProp("G"), IV("x")),
                              AtomApp(PropApp(DefinedProp("ess"), DefinedProp("G")), IV("x"))))

defs = make_defs()
defs_broken = make_defs(broken=True)

t0 = time.monotonic()
r = find_model(scott, FrameClass.KB, SearchBounds(1, 1), symbols, defs)
print(f"scott (1,1) KB: {r.status} nodes={r.nodes} {time.monotonic()-t0:.3f}s")
assert r.found
print(write_model(r.model))
goals = [stt.normalize(modal.valid(a, symbols)) for a in scott]
from modalhol.search import _unfold_with
goals = [_unfold_with(g, defs) for g in goals]
print("verify:", verify_model(r.model, goals, FrameClass.KB))

t0 = time.monotonic()
r = find_model([Falsity()], FrameClass.K, SearchBounds(2, 2))
print(f"falsity (2,2): {r.status} nodes={r.nodes} {time.monotonic()-t0:.3f}s")

# countermodel to T3 under K
for mw, md in [(2, 1), (2, 2), (3, 1)]:
    t0 = time.monotonic()
    r = find_countermodel(scott, t3, FrameClass.K, SearchBounds(mw, md, time_budget=120), symbols, defs)
    print(f"T3 counter K ({mw},{md}): {r.status} nodes={r.nodes} {time.monotonic()-t0:.3f}s")
    if r.found:
        print(write_model(r.model))
        break

# countermodel to T2 with a1a only
a1a_set = [a1a, a2, a3, a4, a5]
for mw, md in [(1, 1), (1, 2), (2, 1), (2, 2)]:
    t0 = time.monotonic()
    r = find_countermodel(a1a_set, t2, FrameClass.K, SearchBounds(mw, md, time_budget=120), symbols, defs)
    print(f"T2 counter a1a-only K ({mw},{md}): {r.status} nodes={r.nodes} {time.monotonic()-t0:.3f}s")
    if r.found:
        print(write_model(r.model))
        break

# the big one: broken D2 set must be EXHAUSTED at (2,2)
t0 = time.monotonic()
r = find_model(scott, FrameClass.K, SearchBounds(2, 2, time_budget=300), symbols, defs_broken)
print(f"broken D2 (2,2): {r.status} nodes={r.nodes} {time.monotonic()-t0:.3f}s")
