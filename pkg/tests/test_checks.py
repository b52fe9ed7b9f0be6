import json

import numpy as np
import pytest

from qpv import checks as ck
from qpv import qcore as qc


def test_report_serialization():
    rep = ck.BoundReport(name="demo", lhs=0.4, rhs=0.5, relation="<=",
                         passed=True, trials=10, tolerance=1e-9,
                         worst_case={"trial": 3})
    doc = json.loads(rep.json_line())
    assert doc["name"] == "demo"
    assert doc["pass"] is True
    assert doc["margin"] == pytest.approx(0.1)
    assert set(doc) >= {"name", "lhs", "rhs", "relation", "margin", "pass", "trials"}


def test_holds_relations():
    assert ck.holds(1.0, ">=", 1.0, 0.0)
    assert ck.holds(0.999, ">=", 1.0, 1e-2)
    assert not ck.holds(0.9, ">=", 1.0, 1e-3)
    assert ck.holds(0.5, "<", 0.5, 1e-9)
    with pytest.raises(ValueError):
        ck.holds(0.0, "!!", 1.0, 0.0)


def test_cit_equality_cases():
    # |0>_R |00>: computational side information is exact, Hadamard side blind
    layout = qc.RegisterLayout([("R", 1), ("E", 1), ("F", 1)])
    psi = qc.basis_state(layout, 0)
    rho = qc.dephase_register(psi, "R", 0)
    sigma = qc.dephase_register(psi, "R", 1)
    h0 = qc.conditional_entropy(rho, "R", ("E",))
    h1 = qc.conditional_entropy(sigma, "R", ("F",))
    assert h0 == pytest.approx(0.0, abs=1e-12)
    assert h1 == pytest.approx(1.0, abs=1e-12)

    # |Omega>_RE x |0>_F: perfect side information in one basis
    omega_re = qc.assemble(layout, [(("R", "E"), qc.BELL_VECTOR),
                                    (("F",), np.array([1.0, 0.0]))])
    rho = qc.dephase_register(omega_re, "R", 0)
    sigma = qc.dephase_register(omega_re, "R", 1)
    assert qc.conditional_entropy(rho, "R", ("E",)) == pytest.approx(0.0, abs=1e-12)
    assert qc.conditional_entropy(sigma, "R", ("F",)) == pytest.approx(1.0, abs=1e-12)


def test_afw_constant_values():
    assert ck.afw_bound(0.0) == 0.0
    assert ck.afw_bound(0.013) == pytest.approx(0.12633, abs=1e-4)
    assert ck.afw_bound(0.013) <= 0.127


def test_fano_classical_channel_equality():
    layout = qc.RegisterLayout([("R", 1), ("W", 1)])
    e = 0.09
    rho = np.diag([(1 - e) / 2, e / 2, e / 2, (1 - e) / 2]).astype(complex)
    state = qc.mixed_state(layout, rho)
    assert qc.conditional_entropy(state, "R", ("W",)) == pytest.approx(
        qc.binary_entropy(e), abs=1e-12)


def test_meas_disjoint_premises_contradict_for_equal_states():
    # one state cannot satisfy both conjugate-basis readability premises:
    # the uncertainty sum forces the other basis entropy up to 1 - delta
    from qpv.attacks.good_sets import small_attack_layout, meas_member
    lay = small_attack_layout()
    delta = qc.binary_entropy(0.09)
    phi = meas_member(lay, "S0", 0.2, qc.stream(3, "contradict"))
    alice = ("A", "At", "Bc")
    bob = ("B", "Bt", "Ac")
    h_comp = qc.conditional_entropy(qc.dephase_register(phi, "R", 0), "R", alice)
    h_had_other = qc.conditional_entropy(qc.dephase_register(phi, "R", 1), "R", bob)
    assert h_comp <= delta
    assert h_had_other >= 1 - delta - 1e-9
    assert h_had_other > delta  # so the second premise cannot also hold


@pytest.mark.parametrize("name", sorted(ck.CHECKS))
def test_all_suites_pass_with_default_seed(name):
    report = ck.CHECKS[name](seed=0)
    assert report.passed, report.as_dict()
    line = json.loads(report.json_line())
    assert line["pass"] is True


def test_run_checks_subset_and_unknown():
    reports = ck.run_checks(["m1_m2", "afw"], seed=1)
    assert [r.name for r in reports] == ["m1_m2", "afw"]
    with pytest.raises(KeyError):
        ck.run_checks(["nope"])


def test_checks_deterministic_under_seed():
    a = ck.check_m1_m2(trials=200, seed=5).json_line()
    b = ck.check_m1_m2(trials=200, seed=5).json_line()
    assert a == b
