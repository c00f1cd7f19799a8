"""Variety containment for finite lattices via subdirectly irreducible quotients.

For finite lattices K, L the containment Var K <= Var L reduces to checking
that every subdirectly irreducible quotient of K is a quotient of a sublattice
of L (Jonsson's Lemma for congruence-distributive varieties; lattice varieties
are congruence-distributive).  All searches are exhaustive within explicit
budgets and produce replayable certificates.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .congruence import ConLattice, Congruence, con_lattice
from .errors import BudgetExceeded, NotSubdirectlyIrreducible
from .lattice import (
    Homomorphism,
    dual,
    enumerate_subuniverses,
    is_isomorphic,
    product,
    quotient,
    _sublattice_from_indices,
)

HS_SIZE_BUDGET = 8


@dataclass(frozen=True)
class SIQuotient:
    """A subdirectly irreducible quotient K/theta with its monolith."""
    parent: object
    theta: Congruence
    lattice: object
    monolith: Congruence

    def to_json(self):
        return {
            "theta": self.theta.label_blocks(),
            "elements": list(self.lattice.labels),
            "monolith": self.monolith.label_blocks(),
        }


@dataclass(frozen=True)
class HSWitness:
    """M isomorphic to S/theta for a sublattice S of L."""
    sublattice: object
    inclusion: Homomorphism
    theta: Congruence
    iso: Homomorphism  # S/theta -> M

    def to_json(self):
        return {
            "sublattice": list(self.sublattice.labels),
            "theta": self.theta.label_blocks(),
            "iso": self.iso.as_label_dict(),
        }


def _subdirectly_irreducible(conQ: ConLattice) -> Optional[Congruence]:
    """Monolith of a finite lattice given its Con, or None if not SI.

    Finite case: SI iff Con has exactly one atom (it then sits below every
    nonzero congruence).
    """
    if len(conQ.atoms) != 1:
        return None
    return conQ.cons[conQ.atoms[0]]


def si_quotients(K, max_size=HS_SIZE_BUDGET):
    """All subdirectly irreducible quotients of K, deduplicated up to isomorphism.

    Deterministic: congruences are tried in the canonical Con order and the
    first representative of each isomorphism class is kept.
    """
    if K.n > max_size:
        raise BudgetExceeded(f"|K| = {K.n} exceeds the SI budget {max_size}")
    conK = con_lattice(K)
    out = []
    for theta in conK.cons:
        if theta.is_one:
            continue
        Q, _proj = quotient(K, theta)
        mono = _subdirectly_irreducible(con_lattice(Q))
        if mono is None:
            continue
        if any(is_isomorphic(prev.lattice, Q) is not None for prev in out):
            continue
        out.append(SIQuotient(K, theta, Q, mono))
    return out


def subdirect_decomposition(K, max_size=HS_SIZE_BUDGET):
    """Congruences with SI quotient meeting to zero, plus the (undeduplicated)
    embedding of K into the product of the corresponding quotients."""
    if K.n > max_size:
        raise BudgetExceeded(f"|K| = {K.n} exceeds the SI budget {max_size}")
    conK = con_lattice(K)
    thetas = []
    quotients = []
    projs = []
    for theta in conK.cons:
        if theta.is_one:
            continue
        Q, proj = quotient(K, theta)
        if _subdirectly_irreducible(con_lattice(Q)) is None:
            continue
        thetas.append(theta)
        quotients.append(Q)
        projs.append(proj)
    if not quotients:
        return thetas, None, None
    P = product(*quotients, allow_lazy=True) if len(quotients) > 1 else quotients[0]
    if len(quotients) == 1:
        mapping = projs[0].mapping
    else:
        mapping = np.array(
            [P.encode([int(p.mapping[i]) for p in projs]) for i in range(K.n)]
            if hasattr(P, "encode") else
            [_encode_dense(P, [int(p.mapping[i]) for p in projs]) for i in range(K.n)],
            dtype=np.int32)
    emb = Homomorphism(K, P, mapping, check="full" if K.n * K.n <= 10_000 else "sample")
    return thetas, P, emb


def _encode_dense(P, coords):
    radix = [1] * len(P.factors)
    for k in range(len(P.factors) - 2, -1, -1):
        radix[k] = radix[k + 1] * P.factors[k + 1].n
    return sum(c * r for c, r in zip(coords, radix))


def hs_member(M, L, max_size=HS_SIZE_BUDGET, max_subuniverses=None,
              threads=None) -> Optional[HSWitness]:
    """Exhaustive search for M in HS(L): a quotient of a sublattice of L.

    Subuniverses are scanned in canonical order, congruences in canonical Con
    order, so the returned witness is deterministic.  `threads` is a
    parallelism hint only.
    """
    if L.n > max_size:
        raise BudgetExceeded(f"|L| = {L.n} exceeds the HS budget {max_size}")
    if M.n > L.n:
        return None
    for key in enumerate_subuniverses(L, max_count=max_subuniverses,
                                      max_size=max_size):
        if len(key) < M.n:
            continue
        S, incl = _sublattice_from_indices(L, list(key))
        for theta in con_lattice(S).cons:
            if len(theta.blocks) != M.n:
                continue
            Q, _ = quotient(S, theta)
            iso = is_isomorphic(Q, M)
            if iso is not None:
                return HSWitness(S, incl, theta, iso)
    return None


@dataclass(frozen=True)
class VarCertificate:
    """Evidence for a Var K <= Var L decision."""
    holds: bool
    si_list: tuple
    witnesses: tuple  # HSWitness per SI quotient when holds
    failing_si: Optional[SIQuotient]

    def to_json(self):
        out = {"holds": self.holds,
               "si_quotients": [s.to_json() for s in self.si_list]}
        if self.holds:
            out["witnesses"] = [w.to_json() for w in self.witnesses]
        else:
            out["failing_si"] = self.failing_si.to_json()
        return out


def var_leq(K, L, max_size=HS_SIZE_BUDGET, max_subuniverses=None):
    """Decide Var K <= Var L: every SI quotient of K must lie in HS(L).

    Returns (bool, VarCertificate).  The reduction is Jonsson's Lemma for
    finitely generated congruence-distributive varieties; see the README for
    the two-line argument.
    """
    sis = si_quotients(K, max_size=max_size)
    witnesses = []
    for s in sis:
        w = hs_member(s.lattice, L, max_size=max_size,
                      max_subuniverses=max_subuniverses)
        if w is None:
            return False, VarCertificate(False, tuple(sis), (), s)
        witnesses.append(w)
    return True, VarCertificate(True, tuple(sis), tuple(witnesses), None)


def find_separating_si(K, L, max_size=HS_SIZE_BUDGET,
                       max_subuniverses=None) -> Optional[SIQuotient]:
    """An SI quotient of K lying in neither HS(L) nor HS(dual L), if any."""
    Ld = dual(L)
    for s in si_quotients(K, max_size=max_size):
        if hs_member(s.lattice, L, max_size=max_size,
                     max_subuniverses=max_subuniverses) is None \
                and hs_member(s.lattice, Ld, max_size=max_size,
                              max_subuniverses=max_subuniverses) is None:
            return s
    return None


def si_pair_classifier(K, L, max_size=HS_SIZE_BUDGET) -> tuple:
    """Compare two finite SI lattices by the varieties they generate.

    Returns (verdict, witness) with verdict one of "Isomorphic",
    "DuallyIsomorphic", "DistinctConcClasses", "Indeterminate".  Equal
    compact-congruence classes force one of the first two outcomes for SI
    generators; plain isomorphism is tried before dual isomorphism.
    """
    for X in (K, L):
        if _subdirectly_irreducible(con_lattice(X)) is None:
            raise NotSubdirectlyIrreducible(f"{X!r} is not subdirectly irreducible")
    Ld = dual(L)
    try:
        a, _ = var_leq(K, L, max_size=max_size)
        b, _ = var_leq(L, K, max_size=max_size)
        c, _ = var_leq(K, Ld, max_size=max_size)
        d, _ = var_leq(Ld, K, max_size=max_size)
    except BudgetExceeded:
        return "Indeterminate", None
    conc_equal = (a or c) and (b or d)
    if not conc_equal:
        return "DistinctConcClasses", None
    iso = is_isomorphic(K, L)
    if iso is not None:
        return "Isomorphic", iso
    iso = is_isomorphic(K, Ld)
    if iso is not None:
        return "DuallyIsomorphic", iso
    # equal Conc classes without either isomorphism would contradict the
    # classification of SI pairs; surface it rather than guessing
    return "Indeterminate", None
