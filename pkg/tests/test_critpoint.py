from critlat.critpoint import AT_MOST_ALEPH2, INFINITE, conc_class_report, crit_gate
from critlat.lattice import dual, is_isomorphic, quotient
from critlat.variety import hs_member


def replay_hs_witness(w, M, L):
    """Re-derive the HS membership from the witness pieces alone."""
    assert set(w.sublattice.labels) <= set(L.labels)
    for x in w.sublattice.labels:
        for y in w.sublattice.labels:
            assert L.meet(x, y) in w.sublattice.labels
            assert L.join(x, y) in w.sublattice.labels
    assert w.theta.is_valid()
    Q, _ = quotient(w.sublattice, w.theta)
    assert is_isomorphic(Q, M) is not None


class TestCritGate:
    def test_m_family_downward_is_infinite(self, named):
        v = crit_gate(named["M:3"], named["M:4"])
        assert v.verdict == INFINITE and v.contain_plain

    def test_m_family_upward_is_aleph2(self, named):
        v = crit_gate(named["M:4"], named["M:3"])
        assert v.verdict == AT_MOST_ALEPH2
        assert not v.contain_plain and not v.contain_dual
        assert v.separating_si is not None

    def test_m3_vs_distributive(self, named):
        v = crit_gate(named["M:3"], named["2"])
        assert v.verdict == AT_MOST_ALEPH2

    def test_reflexive_is_infinite(self, named):
        for name in ("M:3", "N5", "F22", "chain:3"):
            assert crit_gate(named[name], named[name]).verdict == INFINITE

    def test_pentagon_against_m3(self, named):
        assert crit_gate(named["N5"], named["M:3"]).verdict == AT_MOST_ALEPH2
        assert crit_gate(named["M:3"], named["N5"]).verdict == AT_MOST_ALEPH2
        assert crit_gate(named["2"], named["N5"]).verdict == INFINITE

    def test_dualization_symmetry(self, named):
        for a, b in [("M:3", "M:4"), ("M:4", "M:3"), ("N5", "M:3"),
                     ("chain:2", "chain:3")]:
            plain = crit_gate(named[a], named[b]).verdict
            dualized = crit_gate(dual(named[a]), dual(named[b])).verdict
            assert plain == dualized

    def test_infinite_certificates_replay(self, named):
        v = crit_gate(named["M:3"], named["M:4"])
        cert = v.cert_plain
        assert cert.holds
        for si, w in zip(cert.si_list, cert.witnesses):
            replay_hs_witness(w, si.lattice, named["M:4"])

    def test_aleph2_certificate_fails_both_orientations(self, named):
        v = crit_gate(named["M:4"], named["M:3"])
        M = v.separating_si.lattice
        assert hs_member(M, named["M:3"]) is None
        assert hs_member(M, dual(named["M:3"])) is None

    def test_json_shape(self, named):
        blob = crit_gate(named["M:4"], named["M:3"]).to_json()
        assert blob["schema"] == 1 and blob["verdict"] == "AtMostAleph2"
        assert "separating_si" in blob and "var_leq" in blob


class TestConcReport:
    def test_chains_share_the_class_without_isomorphism(self, named):
        rep = conc_class_report(named["chain:2"], named["chain:3"])
        assert rep.conc_equal
        assert not rep.isomorphic and not rep.dually_isomorphic

    def test_m3_vs_n5_distinct(self, named):
        rep = conc_class_report(named["M:3"], named["N5"])
        assert not rep.conc_forward and not rep.conc_backward

    def test_equal_generators(self, named):
        rep = conc_class_report(named["N5"], named["N5"])
        assert rep.conc_equal and rep.isomorphic

    def test_one_way_containment(self, named):
        rep = conc_class_report(named["2"], named["M:3"])
        assert rep.conc_forward and not rep.conc_backward
        assert not rep.conc_equal
