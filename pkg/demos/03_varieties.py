"""Variety containment for finite lattices, with certificates.

Var K is the class of all lattices satisfying the identities of K.  For
finite K and L the containment Var K <= Var L is decidable: lattice varieties
are congruence-distributive, so by Jonsson's Lemma every subdirectly
irreducible member of Var L already lies in HS(L), and it suffices to check
the (finitely many) subdirectly irreducible quotients of K there.

Run:  python demos/03_varieties.py
"""

from critlat import (
    builtin,
    hs_member,
    si_pair_classifier,
    si_quotients,
    subdirect_decomposition,
    var_leq,
)

# Subdirectly irreducible quotients: the square collapses onto the
# two-element lattice twice; the pentagon is itself SI and also has a
# two-element quotient.
for name in ("bool:2", "N5", "M:3"):
    sis = si_quotients(builtin(name))
    print(f"SI quotients of {name}:",
          [f"{s.lattice.n} elements" for s in sis])

# Birkhoff decomposition: every finite lattice embeds into the product of
# its SI quotients (without deduplication).
thetas, P, emb = subdirect_decomposition(builtin("bool:2"))
print("bool:2 subdirectly embeds into a product of size", P.n)

# HS membership with an explicit witness: a sublattice and a congruence.
w = hs_member(builtin("M:3"), builtin("M:4"))
print("M3 in HS(M4) via sublattice", list(w.sublattice.labels))
print("M3 in HS(N5):", hs_member(builtin("M:3"), builtin("N5")) is not None)

# The containment decision and its certificate.
holds, cert = var_leq(builtin("chain:3"), builtin("chain:2"))
print("Var(chain:3) <= Var(chain:2):", holds,
      "- all chains generate the distributive variety")
holds, cert = var_leq(builtin("M:4"), builtin("M:3"))
print("Var(M4) <= Var(M3):", holds,
      "- failing SI quotient has", cert.failing_si.lattice.n, "elements")

# For subdirectly irreducible generators, equal congruence classes force
# isomorphism or dual isomorphism.
print("classify (M3, N5):", si_pair_classifier(builtin("M:3"), builtin("N5"))[0])
print("classify (M3, M3):", si_pair_classifier(builtin("M:3"), builtin("M:3"))[0])
