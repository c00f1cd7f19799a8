"""The critical-point gate.

For finite lattices K and L, the least cardinality of a congruence lattice
realized over Var K but not over Var L is either at most aleph-two or
infinite, and the two cases are decidable: the critical point is infinite
exactly when Var K lands in Var L or its dual, which reduces to finitely
many HS membership checks by Jonsson's Lemma.

Run:  python demos/06_crit_gate.py
"""

from critlat import builtin, conc_class_report, crit_gate

# Moving down the M-family keeps the variety: M3 is a sublattice of M4.
v = crit_gate(builtin("M:3"), builtin("M:4"))
print("crit(Var M3, Var M4):", v.verdict)
print("   ", v.justification)

# Moving up separates: M4 generates identities that M3's variety cannot
# satisfy, and no lattice of M3's variety repairs that.
v = crit_gate(builtin("M:4"), builtin("M:3"))
print("crit(Var M4, Var M3):", v.verdict)
print("    separating SI quotient has",
      v.separating_si.lattice.n, "elements")

# M3 against the distributive variety: still bounded by aleph-two (the
# exact value happens to be countable; the gate answers the dichotomy only).
v = crit_gate(builtin("M:3"), builtin("2"))
print("crit(Var M3, Var 2):", v.verdict)

# The congruence class can coincide without the generators being isomorphic:
# all chains generate the distributive variety.
rep = conc_class_report(builtin("chain:2"), builtin("chain:3"))
print("chain:2 vs chain:3 -> conc classes equal:", rep.conc_equal,
      ", isomorphic:", rep.isomorphic)

# The same decisions are scriptable:  critlat crit-gate M:4 M:3 --json
# (exit code 0 marks an infinite critical point, 3 marks at-most-aleph-two).
