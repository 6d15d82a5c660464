# Scratch: hand-check of the (1,1) candidate models, done before freezing
# test vectors. Not part of the package.
from modalhol.modal import *
from modalhol import stt, modal
from modalhol.models import FiniteModel, holds

P = PropVar
IV = IndivVar


def pv(n): return PropVar(n)


symbols = {"G": MPROPERTY, "ess": MFn(MPROPERTY, MPROPERTY), "NE": MPROPERTY}

a1 = ForallProp("Phi", Iff(Positive(NegProp(pv("Phi"))), Not(Positive(pv("Phi")))))
a2 = ForallProp("Phi", ForallProp("Psi", Implies(
    And(Positive(pv("Phi")),
        Box(ForallIndiv("x", Implies(AtomApp(pv("Phi"), IV("x")), AtomApp(pv("Psi"), IV("x")))))),
    Positive(pv("Psi")))))
a3 = Positive(DefinedProp("G"))
a4 = ForallProp("Phi", Implies(Positive(pv("Phi")), Box(Positive(pv("Phi")))))
a5 = Positive(DefinedProp("NE"))

g_def = PropLambda("x", MINDIV, ForallProp("Phi", Implies(Positive(pv("Phi")), AtomApp(pv("Phi"), IV("x")))))
ess_def = PropLambda("Phi", MPROPERTY, PropLambda("x", MINDIV, And(
    AtomApp(pv("Phi"), IV("x")),
    ForallProp("Psi", Implies(AtomApp(pv("Psi"), IV("x")),
        Box(ForallIndiv("y", Implies(AtomApp(pv("Phi"), IV("y")), AtomApp(pv("Psi"), IV("y"))))))))))
ne_def = PropLambda("x", MINDIV, ForallProp("Phi", Implies(
    AtomApp(PropApp(DefinedProp("ess"), pv("Phi")), IV("x")),
    Box(ExistsIndiv("y", AtomApp(pv("Phi"), IV("y")))))))

defs = [("G", g_def), ("ess", ess_def), ("NE", ne_def)]
def_terms = {}
for name, body in defs:
    def_terms[name] = modal.embed_prop(body, symbols)


def unfold(t):
    for name in ("NE", "ess", "G"):
        c = stt.Const(name, stt.typecheck(def_terms[name]))
        t = stt.substitute(t, c, def_terms[name])
    return stt.normalize(t)


axioms = {"a1": a1, "a2": a2, "a3": a3, "a4": a4, "a5": a5}
goals = {n: unfold(valid(f, symbols)) for n, f in axioms.items()}

empty = FiniteModel(1, 1, ((False,),), ((False,), (True,)))
refl = FiniteModel(1, 1, ((True,),), ((False,), (True,)))
flipped = FiniteModel(1, 1, ((True,),), ((True,), (False,)))

for label, m in [("empty", empty), ("refl", refl), ("refl-flipped", flipped)]:
    vals = {n: holds(m, g) for n, g in goals.items()}
    print(label, vals)

# Definitional biconditionals should be trivially valid once unfolded.
d1_bicond = ForallIndiv("x", Iff(AtomApp(DefinedProp("G"), IV("x")),
    ForallProp("Phi", Implies(Positive(pv("Phi")), AtomApp(pv("Phi"), IV("x"))))))
print("D1 bicond on refl:", holds(refl, unfold(valid(d1_bicond, symbols))))
