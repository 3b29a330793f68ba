import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bitcusum import (
    DomainError,
    InfeasibleMN,
    MODE_BENCHMARK,
    MODE_DEPLOYMENT,
    build_certificate,
    epsilons,
    format_certificate,
    plugin_q,
    rate_functions,
    theorem1_probability_floor,
    threshold_for_kappa,
)
from bitcusum.bounds import bit_mgf

import oracles


def test_epsilons():
    assert epsilons(0.5) == pytest.approx((0.25, 0.25, 0.25))
    e1, e2, es = epsilons(0.3)
    assert e1 == pytest.approx(0.35)
    assert e2 == pytest.approx(0.15)
    assert es == pytest.approx(0.15)  # min{q, 1-q}/2


def test_rate_function_symmetric_point():
    u1, u2 = rate_functions(0.5)
    expected = 0.75 * math.log(3.0) - math.log(2.0)
    assert u1 == pytest.approx(expected, abs=1e-12)
    assert u2 == pytest.approx(expected, abs=1e-12)
    assert u1 == pytest.approx(0.1308120359, abs=1e-9)


def test_rate_functions_match_numeric_legendre():
    for q in (0.08, 0.3, 0.5, 0.62, 0.9):
        u1, u2 = rate_functions(q)
        n1, n2 = oracles.legendre_numeric(q)
        assert u1 == pytest.approx(n1, abs=1e-6)
        assert u2 == pytest.approx(n2, abs=1e-6)


@given(st.floats(min_value=0.05, max_value=0.95),
       st.floats(min_value=-30.0, max_value=30.0))
@settings(deadline=None, max_examples=200)
def test_mgf_positive_and_unit_at_zero(q, c):
    assert bit_mgf(q, c) > 0.0
    assert bit_mgf(q, 0.0) == pytest.approx(1.0, abs=1e-15)


def test_probability_floor():
    # large M*N drives the floor to 1
    assert theorem1_probability_floor(5000, 12, 0.5) == pytest.approx(1.0, abs=1e-12)
    # tiny M*N: the bound 1 - 2 exp(-upsilon M N) goes negative, clipped at 0
    assert theorem1_probability_floor(1, 1, 0.5) == 0.0
    mid = theorem1_probability_floor(20, 1, 0.5)
    assert 0.0 < mid < 1.0
    assert mid == pytest.approx(1.0 - 2.0 * math.exp(-0.130812035941137 * 20), abs=1e-9)


def test_threshold_frozen_value():
    h, guaranteed = threshold_for_kappa(1000.0, 5000, 12, 0.5)
    # N (kappa / floor + M) ln(1/eps*): floor is 1 to double precision here
    assert guaranteed
    assert h == pytest.approx(12 * (1000.0 + 5000) * math.log(4.0), rel=1e-9)
    assert h == pytest.approx(99813.194, abs=1e-2)


def test_threshold_infeasible():
    with pytest.raises(InfeasibleMN) as err:
        threshold_for_kappa(100.0, 1, 1, 0.5)
    assert "ln2/upsilon_star" in str(err.value).replace(" ", "")


def test_threshold_monotone_in_kappa():
    h1, _ = threshold_for_kappa(100.0, 500, 4, 0.4)
    h2, _ = threshold_for_kappa(1000.0, 500, 4, 0.4)
    assert h2 > h1


def test_q_domain_checked():
    for bad in (0.0, 1.0, -0.2, 1.7):
        with pytest.raises(DomainError):
            rate_functions(bad)
        with pytest.raises(DomainError):
            epsilons(bad)


def test_plugin_q():
    assert plugin_q(3000, 1000, 12) == pytest.approx(1.0 - 3000 / 12000)
    with pytest.raises(DomainError):
        plugin_q(0, 10, 2)  # degenerate: no ones at all
    with pytest.raises(DomainError):
        plugin_q(20, 10, 2)


def test_certificate_fields_and_format():
    cert = build_certificate(0.5, 1000.0, 5000, 12, mode=MODE_BENCHMARK)
    assert cert.q == 0.5
    assert cert.h_min == pytest.approx(99813.194, abs=1e-2)
    assert cert.probability_floor == pytest.approx(1.0, abs=1e-12)
    assert cert.mn_min == pytest.approx(math.log(2.0) / cert.upsilon_star, rel=1e-12)
    text = format_certificate(cert)
    assert "99813.19" in text
    assert "benchmark" in text

    dep = build_certificate(0.5, 1000.0, 5000, 12, mode=MODE_DEPLOYMENT)
    text = format_certificate(dep)
    assert "deployment" in text
    # deployment q is a plug-in estimate, the guarantee is heuristic
    assert "estimate" in text or "plug-in" in text


def test_certificate_rejects_unknown_mode():
    with pytest.raises(DomainError):
        build_certificate(0.5, 100.0, 100, 4, mode="press-release")
