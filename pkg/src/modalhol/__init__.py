"""Quantified modal logic workbench.

Compiles a quantified modal language into simply typed higher-order logic
over possible worlds, checks Fitch-style natural deduction proofs of the
embedded formulas, and searches for finite Kripke-Henkin models and
countermodels under configurable frame classes (K, KB, S5).
"""

__version__ = "0.1.0"
