from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qpv import analysis as an


# ---------------------------------------------------------------------------
# boolean functions
# ---------------------------------------------------------------------------

def test_ip1_is_and():
    np.testing.assert_array_equal(an.ip_function(1).table, [0, 0, 0, 1])


def test_ip2_values():
    ip2 = an.ip_function(2)
    assert ip2.value(0b11, 0b11) == 0
    assert ip2.value(0b10, 0b11) == 1


def test_function_table_validation():
    with pytest.raises(ValueError):
        an.BooleanFunction(1, np.array([0, 1, 0]))
    with pytest.raises(ValueError):
        an.BooleanFunction(1, np.array([0, 1, 0, 2]))
    with pytest.raises(ValueError):
        an.ip_function(1).value(2, 0)


def test_hamming_basics():
    f = an.random_function(3, 7)
    assert an.hamming(f, f) == 0
    assert an.hamming(f, f.negated()) == 1 << 6
    with pytest.raises(ValueError):
        an.hamming(f, an.random_function(2, 7))


def test_hamming_random_pair_binomial_oracle():
    vals = []
    for s in range(100):
        f = an.random_function(3, 1000 + s)
        g = an.random_function(3, 2000 + s)
        vals.append(an.hamming(f, g) / 64)
    assert abs(np.mean(vals) - 0.5) <= 0.03


def test_file_roundtrip(tmp_path):
    f = an.random_function(2, 9)
    path = tmp_path / "f.txt"
    an.save_function(f, path)
    text = path.read_text()
    assert text.splitlines()[0] == "n=2"
    assert len(text.splitlines()[1]) == 16
    g = an.load_function(path)
    assert g.n == f.n and an.hamming(f, g) == 0
    path.write_text("m=2\n0000\n")
    with pytest.raises(ValueError):
        an.load_function(path)


def test_function_from_spec():
    f = an.function_from_spec({"kind": "table", "n": 1, "table": "0110"})
    assert f.value(0, 1) == 1 and f.value(1, 1) == 0
    with pytest.raises(ValueError):
        an.function_from_spec({"kind": "bogus"})


# ---------------------------------------------------------------------------
# volumes and certified counting
# ---------------------------------------------------------------------------

def test_hamming_volume_values():
    assert an.hamming_volume(4, 0) == 1
    assert an.hamming_volume(4, 2) == 11
    with pytest.raises(ValueError):
        an.hamming_volume(4, 5)


def test_hamming_volume_matches_enumeration():
    for n in (4, 8, 12):
        for a in (0, 1, n // 3, n // 2, n):
            count = sum(1 for v in range(1 << n) if bin(v).count("1") <= a)
            assert an.hamming_volume(n, a) == count


def test_volume_entropy_check():
    assert an.volume_entropy_check(20, Fraction(1, 4))
    for n in (8, 12, 16, 24):
        for lam in (Fraction(1, 4), Fraction(1, 8)):
            if (lam * n).denominator == 1:
                assert an.volume_entropy_check(n, lam)
    with pytest.raises(ValueError):
        an.volume_entropy_check(10, Fraction(1, 4))  # 2.5 not integral
    with pytest.raises(ValueError):
        an.volume_entropy_check(10, Fraction(3, 5))


def test_net_sizes():
    rep = an.net_size_report(0)
    assert rep.log2_na == pytest.approx(2 * np.log2(927))
    assert rep.log2_na == pytest.approx(19.7128, abs=1e-3)
    assert rep.k == pytest.approx(4 * np.log2(927))
    assert an.rounding_size_k(1) / an.rounding_size_k(0) == pytest.approx(4.0)
    assert an.rounding_size_k(1) == pytest.approx(16 * np.log2(927))
    assert rep.note == an.NET_DIMENSION_NOTE


def test_delta_margin():
    assert an.delta_margin_check()
    assert float(an.delta_margin_value()) == pytest.approx(0.006494, abs=1e-6)
    assert not an.delta_margin_check(Fraction(22, 10000))
    assert an.delta_margin_check(Fraction(0))


def test_counting_bound_examples():
    assert an.counting_bound(10, 0).passes
    assert an.counting_bound(12, 1).passes
    rep = an.counting_bound(10, 5)
    assert not rep.passes
    assert rep.log2_bound > -(1 << 10)
    assert "no guarantee" in rep.precondition_note
    rep9 = an.counting_bound(9, 0)
    assert "n >= 10" in rep9.precondition_note


def test_counting_bound_exhaustive_range():
    for n in range(10, 17):
        for q in range(0, (n - 10) // 2 + 1):
            assert an.counting_bound(n, q).passes, (n, q)


def test_attacker_qubit_bound():
    assert an.attacker_qubit_bound("random", n=10) == 0
    assert an.attacker_qubit_bound("random", n=30) == 10
    assert an.attacker_qubit_bound("random", n=11) == 0
    assert an.attacker_qubit_bound("cc", k=64) == 0
    assert an.attacker_qubit_bound("cc", k=63) == -1
    assert an.attacker_qubit_bound("cc", k=1) == -3
    assert an.attacker_qubit_bound("cc", k=256) == 1
    with pytest.raises(ValueError):
        an.attacker_qubit_bound("bogus")


@given(st.integers(min_value=1, max_value=60))
@settings(max_examples=40, deadline=None)
def test_qubit_bound_matches_inequality(n):
    q = an.attacker_qubit_bound("random", n=n)
    assert 2 * q <= n - 10
    assert 2 * (q + 1) > n - 10


# ---------------------------------------------------------------------------
# communication complexity brute force
# ---------------------------------------------------------------------------

def test_smp_trivial_cases():
    const = an.constant_function(1, 1)
    assert an.smp_cc_bruteforce(const, 1) == 0
    assert an.smp_cc_bruteforce(an.ip_function(1), 1) == 0
    assert an.smp_cc(an.ip_function(1)) == 1


def test_smp_ip2_regression_value():
    # frozen regression oracle from exhaustive enumeration
    assert an.smp_cc_bruteforce(an.ip_function(2), 1) == Fraction(3, 16)


def test_oneway_cases():
    fx = an.projection_function(1, 0, "x")
    assert an.oneway_cc_bruteforce(fx, 1) == 0
    ip2 = an.ip_function(2)
    assert an.oneway_cc_bruteforce(ip2, 2) == 0     # send x outright
    err = an.oneway_cc_bruteforce(ip2, 1)
    assert err == Fraction(3, 16)
    # stated one-way bound for IP at these sizes is vacuous; the exact value
    # simply must be a valid error probability
    assert 0 <= err < Fraction(1, 2)


def test_oneway_never_worse_than_smp():
    for s in range(20):
        f = an.random_function(2, 500 + s)
        for k in (1, 2):
            assert (an.oneway_cc_bruteforce(f, k)
                    <= an.smp_cc_bruteforce(f, k) + Fraction(0))


def test_smp_error_monotone_in_k():
    for s in range(5):
        f = an.random_function(2, 900 + s)
        assert an.smp_cc_bruteforce(f, 2) <= an.smp_cc_bruteforce(f, 1)


def test_budget_guards():
    ip3 = an.ip_function(3)
    with pytest.raises(an.BudgetExceeded):
        an.smp_cc_bruteforce(ip3, 2)
    with pytest.raises(ValueError):
        an.smp_cc_bruteforce(ip3, 0)
    with pytest.raises(an.BudgetExceeded):
        an.oneway_cc_bruteforce(an.ip_function(3), 4)
