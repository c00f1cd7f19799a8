"""The end-to-end decision: is the critical point between the varieties
generated by two finite lattices infinite, or at most aleph-two?

Containment of the generated varieties (in either orientation) forces the
compact congruence classes to nest, so the critical point is infinite.
Otherwise the dichotomy for lattice varieties whose simple members have a
prime interval (automatic for finitely generated ones) caps the critical
point at aleph-two, and a separating subdirectly irreducible quotient is
reported when one exists.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .lattice import dual, is_isomorphic
from .variety import (
    HS_SIZE_BUDGET,
    SIQuotient,
    VarCertificate,
    find_separating_si,
    var_leq,
)

INFINITE = "Infinite"
AT_MOST_ALEPH2 = "AtMostAleph2"


@dataclass
class CritVerdict:
    verdict: str
    contain_plain: bool
    contain_dual: bool
    cert_plain: VarCertificate
    cert_dual: VarCertificate
    separating_si: Optional[SIQuotient]
    justification: str

    def to_json(self):
        out = {
            "schema": 1,
            "verdict": self.verdict,
            "var_leq": self.cert_plain.to_json(),
            "var_leq_dual": self.cert_dual.to_json(),
            "justification": self.justification,
        }
        if self.separating_si is not None:
            out["separating_si"] = self.separating_si.to_json()
        return out


def crit_gate(K, L, max_size=HS_SIZE_BUDGET, max_subuniverses=None) -> CritVerdict:
    """Classify the critical point between Var K and Var L as infinite or at
    most aleph-two.

    Infinite exactly when Var K lands in Var L or its dual; the certificates
    replay through hs_member.  The separating SI quotient (one outside both
    HS(L) and HS(dual L)) backs the aleph-two verdict; it can be absent when
    distinct SI quotients fail on the two orientations separately.
    """
    Ld = dual(L)
    a, cert_a = var_leq(K, L, max_size=max_size, max_subuniverses=max_subuniverses)
    b, cert_b = var_leq(K, Ld, max_size=max_size, max_subuniverses=max_subuniverses)
    if a or b:
        side = "Var L" if a else "the dual of Var L"
        return CritVerdict(
            INFINITE, a, b, cert_a, cert_b, None,
            f"Var K is contained in {side}; compact congruence classes "
            "transfer along containment and dualization, so every member's "
            "congruence lattice already occurs over Var L.")
    sep = find_separating_si(K, L, max_size=max_size,
                             max_subuniverses=max_subuniverses)
    return CritVerdict(
        AT_MOST_ALEPH2, a, b, cert_a, cert_b, sep,
        "Var K lies in neither Var L nor its dual; by the dichotomy for "
        "finitely generated lattice varieties the compact congruence classes "
        "separate at cardinality at most aleph-two.")


@dataclass
class ConcReport:
    k_in_l: bool
    l_in_k: bool
    k_in_dual_l: bool
    l_in_dual_k: bool
    conc_forward: bool       # Conc(Var K) subset of Conc(Var L)
    conc_backward: bool
    isomorphic: bool
    dually_isomorphic: bool

    @property
    def conc_equal(self):
        return self.conc_forward and self.conc_backward

    def to_json(self):
        return {
            "schema": 1,
            "var_K_in_L": self.k_in_l,
            "var_L_in_K": self.l_in_k,
            "var_K_in_dual_L": self.k_in_dual_l,
            "var_L_in_dual_K": self.l_in_dual_k,
            "conc_class_forward": self.conc_forward,
            "conc_class_backward": self.conc_backward,
            "conc_class_equal": self.conc_equal,
            "isomorphic": self.isomorphic,
            "dually_isomorphic": self.dually_isomorphic,
        }


def conc_class_report(K, L, max_size=HS_SIZE_BUDGET,
                      max_subuniverses=None) -> ConcReport:
    """All four variety containments plus the implied relation between the
    compact congruence classes.

    The congruence class of Var K sits inside that of Var L exactly when
    Var K lies in Var L or its dual (congruence lattices are blind to
    dualization).
    """
    Ld, Kd = dual(L), dual(K)
    kw = {"max_size": max_size, "max_subuniverses": max_subuniverses}
    a, _ = var_leq(K, L, **kw)
    b, _ = var_leq(L, K, **kw)
    c, _ = var_leq(K, Ld, **kw)
    d, _ = var_leq(L, Kd, **kw)
    return ConcReport(
        a, b, c, d,
        conc_forward=a or c,
        conc_backward=b or d,
        isomorphic=is_isomorphic(K, L) is not None,
        dually_isomorphic=is_isomorphic(K, Ld) is not None,
    )
