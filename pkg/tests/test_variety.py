import itertools

import pytest

from critlat.congruence import Congruence, con_lattice
from critlat.errors import BudgetExceeded, NotSubdirectlyIrreducible
from critlat.lattice import (
    builtin,
    dual,
    is_isomorphic,
    validate_lattice,
)
from critlat.variety import (
    find_separating_si,
    hs_member,
    si_pair_classifier,
    si_quotients,
    subdirect_decomposition,
    var_leq,
)

from oracles import brute_congruences, brute_isomorphic, brute_subuniverses


def oracle_hs_member(M, L):
    """Fully independent HS oracle: subsets by filtering, congruences by
    partition filtering, isomorphism by permutations."""
    for sub in brute_subuniverses(L):
        if len(sub) < M.n:
            continue
        labels = [L.labels[i] for i in sub]
        leq = [[L.leq_i(a, b) for b in sub] for a in sub]
        import numpy as np
        from critlat.lattice import FiniteLattice
        S = FiniteLattice._from_order(labels, np.array(leq, dtype=bool))
        for part in brute_congruences(S):
            if len(part) != M.n:
                continue
            blocks = [sorted(b) for b in part]
            theta = Congruence(S, blocks)
            from critlat.lattice import quotient
            Q, _ = quotient(S, theta)
            if brute_isomorphic(Q, M) is not None:
                return True
    return False


class TestSiQuotients:
    def test_m3(self, named):
        sis = si_quotients(named["M:3"])
        assert len(sis) == 1
        assert is_isomorphic(sis[0].lattice, named["M:3"]) is not None

    def test_square_collapses_to_two(self, named):
        sis = si_quotients(named["bool:2"])
        assert len(sis) == 1 and sis[0].lattice.n == 2

    def test_one_element_has_none(self, named):
        assert si_quotients(named["one"]) == []

    def test_n5(self, named):
        sizes = sorted(s.lattice.n for s in si_quotients(named["N5"]))
        assert sizes == [2, 5]

    def test_monolith_is_least_nonzero(self, named):
        for s in si_quotients(named["N5"]):
            conQ = con_lattice(s.lattice)
            assert len(conQ.atoms) == 1
            assert s.monolith == conQ.cons[conQ.atoms[0]]

    def test_budget(self):
        with pytest.raises(BudgetExceeded):
            si_quotients(builtin("bool:4"))


class TestSubdirectDecomposition:
    @pytest.mark.parametrize("name", ["bool:2", "bool:3", "chain:3", "N5",
                                      "M:3", "F22", "M:4"])
    def test_embedding_exists(self, named, name):
        K = named[name]
        thetas, P, emb = subdirect_decomposition(K)
        assert emb is not None and emb.injective
        meet = Congruence.one(K)
        for t in thetas:
            meet = meet.meet(t)
        assert meet == Congruence.zero(K)


class TestHsMember:
    def test_two_in_anything_bounded(self, named):
        for name in ("chain:2", "M:3", "N5"):
            w = hs_member(named["2"], named[name])
            assert w is not None

    def test_m3_in_m4_drops_one_atom(self, named):
        w = hs_member(named["M:3"], named["M:4"])
        assert w is not None
        assert w.sublattice.n == 5
        assert w.theta == Congruence.zero(w.sublattice)

    def test_m3_not_in_n5(self, named):
        assert hs_member(named["M:3"], named["N5"]) is None
        assert not oracle_hs_member(named["M:3"], named["N5"])

    def test_agrees_with_independent_oracle(self, named):
        pairs = [("2", "chain:2"), ("chain:2", "bool:2"), ("M:3", "M:4"),
                 ("N5", "M:3"), ("bool:2", "N5"), ("chain:3", "F22")]
        for a, b in pairs:
            mine = hs_member(named[a], named[b]) is not None
            assert mine == oracle_hs_member(named[a], named[b])

    def test_witness_replays(self, named):
        w = hs_member(named["bool:2"], named["F22"])
        assert w is not None
        S = w.sublattice
        assert set(S.labels) <= set(named["F22"].labels)
        assert w.theta.is_valid()
        from critlat.lattice import quotient
        Q, _ = quotient(S, w.theta)
        assert w.iso.source.n == Q.n and w.iso.injective and w.iso.surjective


class TestVarLeq:
    def test_known_table(self, named):
        table = [("2", "M:3", True), ("M:3", "M:4", True), ("M:4", "M:3", False),
                 ("N5", "M:3", False), ("M:3", "N5", False)]
        for a, b, expect in table:
            holds, cert = var_leq(named[a], named[b])
            assert holds == expect
            if expect:
                assert len(cert.witnesses) == len(cert.si_list)
            else:
                assert cert.failing_si is not None

    def test_chains_generate_the_same_variety(self, named):
        assert var_leq(named["chain:3"], named["chain:2"])[0]
        assert var_leq(named["chain:2"], named["chain:3"])[0]

    def test_reflexive(self, named):
        for name in ("M:3", "N5", "F22", "bool:2", "chain:3"):
            assert var_leq(named[name], named[name])[0]

    def test_transitive_samples(self, named):
        chain = ["2", "chain:2", "M:3", "M:4", "M:5"]
        for a, b, c in itertools.combinations(chain, 3):
            ab = var_leq(named[a], named[b])[0]
            bc = var_leq(named[b], named[c])[0]
            if ab and bc:
                assert var_leq(named[a], named[c])[0]

    def test_hs_implies_var_leq(self, named):
        for a, b in [("2", "N5"), ("chain:2", "bool:2"), ("M:3", "M:5")]:
            if hs_member(named[a], named[b]) is not None:
                assert var_leq(named[a], named[b])[0]

    def test_duality_compatible(self, named):
        for a, b in [("M:3", "M:4"), ("M:4", "M:3"), ("N5", "M:3"),
                     ("chain:3", "chain:2")]:
            plain = var_leq(named[a], named[b])[0]
            dualized = var_leq(dual(named[a]), dual(named[b]))[0]
            assert plain == dualized


class TestSeparatingSi:
    def test_m3_vs_n5(self, named):
        s = find_separating_si(named["M:3"], named["N5"])
        assert s is not None
        assert is_isomorphic(s.lattice, named["M:3"]) is not None

    def test_absent_when_contained(self, named):
        assert find_separating_si(named["chain:3"], named["chain:2"]) is None
        assert find_separating_si(named["M:3"], named["M:3"]) is None


class TestSiPairClassifier:
    def test_isomorphic_pair(self, named):
        relab = validate_lattice(
            ["b", "p", "q", "r", "t"],
            [("b", "p"), ("b", "q"), ("b", "r"), ("p", "t"), ("q", "t"), ("r", "t")])
        verdict, witness = si_pair_classifier(named["M:3"], relab)
        assert verdict == "Isomorphic" and witness is not None

    def test_self_dual_ties_break_to_plain(self, named):
        n5r = validate_lattice(
            ["z", "a", "b", "c", "t"],
            [("z", "a"), ("a", "b"), ("b", "t"), ("z", "c"), ("c", "t")])
        verdict, _ = si_pair_classifier(named["N5"], n5r)
        assert verdict == "Isomorphic"

    def test_distinct_classes(self, named):
        assert si_pair_classifier(named["M:3"], named["N5"])[0] == "DistinctConcClasses"
        assert si_pair_classifier(named["M:3"], named["M:4"])[0] == "DistinctConcClasses"

    def test_requires_si_inputs(self, named):
        with pytest.raises(NotSubdirectlyIrreducible):
            si_pair_classifier(named["chain:2"], named["M:3"])
        with pytest.raises(NotSubdirectlyIrreducible):
            si_pair_classifier(named["M:3"], named["bool:2"])
