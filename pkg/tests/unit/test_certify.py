"""Tests for the certificate pipeline and the verifier."""

import dataclasses
import math

import numpy as np
import pytest

from soft_torus.brep import BFamily, PeriodicFamily, covariant_rep, periodize, random_brep
from soft_torus.certify import (
    averaged_image,
    averaging_lower_bound,
    certify,
    evaluate_pair,
    rep_of_Ae,
    roots_of_unity,
    verify_certificate,
)
from soft_torus.config import Tolerances
from soft_torus.errors import InvalidParameter, NotUnitModulus, QTooSmall, WindowTooSmall, ZeroPolynomial
from soft_torus.matcore import commutator_norm, op_norm
from soft_torus.models import SearchParams
from soft_torus.ncpoly import NCPoly, cond_exp, v_degree
from soft_torus.poly_parser import parse

FAST = SearchParams(dims=(1,), restarts=4, seed=1, ascent_steps=60)

AVERAGING_POLYS = [
    "u*v - v*u",
    "u + v",
    "v*v + u'",
    "v*v*v - u",
    "u*v*u' + 2*v'",
    "(1+2i)*u_1*v - u_-1'",
    "v'*u*v*u",
    "u_1 + v*u_-1*v",
    "v*v*u' - (0.5-1i)*v'",
    "u*u_1*v + v'*v'",
]


def _scalar(z: complex) -> np.ndarray:
    return np.array([[z]], dtype=complex)


def _two_point_rep():
    return covariant_rep(PeriodicFamily(2.0, [_scalar(-1), _scalar(1)]))


class TestRootsOfUnity:
    def test_fourth_roots(self):
        np.testing.assert_allclose(roots_of_unity(4), [1, 1j, -1, -1j], atol=1e-15)

    def test_first_root_is_lam0(self):
        assert roots_of_unity(3, 1j)[0] == 1j


class TestRepOfAe:
    def test_two_point_example(self):
        U, V = rep_of_Ae(_two_point_rep(), 1.0)
        np.testing.assert_array_equal(U, np.diag([-1, 1]))
        np.testing.assert_array_equal(V, [[0, 1], [1, 0]])
        assert commutator_norm(U, V) == pytest.approx(2.0)

    def test_identity_family_commutes(self):
        cr = covariant_rep(PeriodicFamily(1.0, [np.eye(2)] * 4))
        for lam in roots_of_unity(5):
            assert commutator_norm(*rep_of_Ae(cr, lam)) == pytest.approx(0.0, abs=1e-15)

    def test_commutator_is_independent_of_lambda(self):
        cr = covariant_rep(periodize(random_brep(0.7, 2, (-2, 2), 4)))
        norms = [commutator_norm(*rep_of_Ae(cr, np.exp(1j * t))) for t in np.linspace(0, 2 * math.pi, 7)]
        assert max(norms) - min(norms) <= 1e-12
        assert norms[0] == pytest.approx(cr.base.max_step(), abs=1e-12)

    def test_rejects_non_unit_lambda(self):
        with pytest.raises(NotUnitModulus):
            rep_of_Ae(_two_point_rep(), 1.01)


class TestAveraging:
    def test_pure_shift(self):
        assert averaging_lower_bound(_two_point_rep(), NCPoly.generator("v"), 1) == pytest.approx(1.0)

    def test_commutator_on_optimal_scalar_family(self):
        eps = 0.5
        theta = 2 * math.asin(eps / 2)
        family = BFamily(eps, (-1, 1), [_scalar(np.exp(-1j * theta)), _scalar(1), _scalar(1)])
        cr = covariant_rep(periodize(family))
        bound = averaging_lower_bound(cr, parse("u*v - v*u"), 1)
        assert bound == pytest.approx(eps**2, abs=1e-12)

    def test_q_too_small(self):
        with pytest.raises(QTooSmall):
            averaging_lower_bound(_two_point_rep(), parse("1 + v"), 1)

    def test_window_too_small(self):
        cr = covariant_rep(periodize(BFamily(1.0, (0, 0), [np.eye(1)])))
        with pytest.raises(WindowTooSmall):
            averaging_lower_bound(cr, parse("u*v - v*u"), 1)

    @pytest.mark.parametrize("index", range(20))
    def test_average_matches_block_image(self, index):
        a = parse(AVERAGING_POLYS[index % len(AVERAGING_POLYS)])
        a_star_a = a.adjoint() * a
        assert v_degree(a_star_a) <= 3
        q = v_degree(a_star_a) + 1
        family = random_brep((0.4, 1.2)[index % 2], 1 + index % 3, (-3, 3), index)
        cr = covariant_rep(periodize(family))
        expected = cr.rho_of(cond_exp(a_star_a)) if not cond_exp(a_star_a).is_zero() else 0.0
        np.testing.assert_allclose(averaged_image(cr, a, q), expected, atol=1e-10)

    def test_some_root_meets_the_floor(self):
        a = parse("u + v")
        cr = covariant_rep(periodize(random_brep(1.0, 2, (-1, 1), 8)))
        floor = math.sqrt(averaging_lower_bound(cr, a, 2))
        best = max(op_norm(evaluate_pair(cr, lam, a)) for lam in roots_of_unity(2))
        assert best >= floor - 1e-12


class TestCertify:
    def test_unit_polynomial(self, assert_faithful_trace):
        c = certify(parse("1"), 0.5, FAST)
        assert_faithful_trace(c)
        assert c.achieved_norm == pytest.approx(1.0)
        assert c.commutator_norm == pytest.approx(0.0, abs=1e-15)
        assert c.lower_bound == pytest.approx(1.0)
        assert c.witness_found()

    def test_commutator(self, assert_faithful_trace):
        c = certify(parse("u*v - v*u"), 0.5, FAST, source="u*v - v*u")
        assert_faithful_trace(c)
        assert c.poly == "u*v - v*u"
        assert c.achieved_norm >= 0.45
        assert c.lower_bound >= 0.45
        assert c.achieved_norm >= c.lower_bound - 1e-9
        assert c.commutator_norm <= 0.5 + 1e-9
        assert c.n == c.p * c.m
        assert c.q == 1

    def test_scaled_commutator_still_has_a_witness(self, assert_faithful_trace):
        text = "0.00000001*u*v - 0.00000001*v*u"
        c = certify(parse(text), 0.5, FAST, source=text)
        assert c.witness_found()
        assert c.achieved_norm == pytest.approx(0.5e-8, rel=0.1)
        assert c.lower_bound >= 0.45e-8
        assert_faithful_trace(c)
        assert verify_certificate(c).passed

    def test_zero_polynomial(self):
        with pytest.raises(ZeroPolynomial):
            certify(parse("u - u"), 0.5, FAST)

    @pytest.mark.parametrize("eps", [0.0, 2.0, 2.5])
    def test_eps_out_of_range(self, eps):
        with pytest.raises(InvalidParameter):
            certify(parse("u"), eps, FAST)

    def test_explicit_q_below_degree(self):
        with pytest.raises(QTooSmall):
            certify(parse("1 + v"), 0.5, dataclasses.replace(FAST, q=1))

    def test_averaging_order_defaults_to_degree_plus_one(self, assert_faithful_trace):
        c = certify(parse("1 + v*v"), 1.0, FAST)
        assert_faithful_trace(c)
        assert c.q == 3


class TestVerify:
    @pytest.fixture(scope="class")
    def certificate(self):
        return certify(parse("u*v - v*u"), 0.5, FAST, source="u*v - v*u")

    def test_fresh_certificate_passes(self, certificate, assert_faithful_trace):
        assert_faithful_trace(certificate)
        report = verify_certificate(certificate)
        assert report.passed, [(c.name, c.detail) for c in report.failures]
        names = {c.name for c in report.checks}
        assert {"unitarity_U", "unitarity_V", "commutator", "achieved_norm", "trace_self_commutator",
                "hyponormal_normal", "faithful_trace", "witness"} <= names

    def test_scaled_u_is_a_unitarity_violation(self, certificate):
        report = verify_certificate(dataclasses.replace(certificate, U=1.01 * certificate.U))
        assert "UnitarityViolation" in {c.violation for c in report.failures}

    def test_lowered_eps_is_a_commutator_violation(self, certificate):
        tampered = dataclasses.replace(certificate, eps=certificate.commutator_norm / 2)
        report = verify_certificate(tampered)
        assert [c.violation for c in report.failures] == ["CommutatorViolation"]

    def test_wrong_norm_is_a_mismatch(self, certificate):
        report = verify_certificate(dataclasses.replace(certificate, achieved_norm=certificate.achieved_norm + 0.1))
        assert "NormMismatch" in {c.violation for c in report.failures}

    def test_unparsable_polynomial(self, certificate):
        report = verify_certificate(dataclasses.replace(certificate, poly="u*"))
        assert not report.passed
        assert report.failures[0].violation == "PolySyntaxError"

    def test_stored_witness_floor_is_used(self, certificate):
        tolerances = {**certificate.tolerances, "witness_floor": 10.0}
        report = verify_certificate(dataclasses.replace(certificate, tolerances=tolerances))
        assert [c.violation for c in report.failures] == ["NoWitnessFound"]

    def test_explicit_tolerances_override_the_stored_block(self, certificate):
        tolerances = {**certificate.tolerances, "witness_floor": 10.0}
        tampered = dataclasses.replace(certificate, tolerances=tolerances)
        assert verify_certificate(tampered, tolerances=Tolerances()).passed

    def test_malformed_tolerances_block(self, certificate):
        report = verify_certificate(dataclasses.replace(certificate, tolerances={"witness_floor": "high"}))
        assert [c.violation for c in report.failures] == ["MatrixFormatError"]

    def test_wrong_shape(self, certificate):
        report = verify_certificate(dataclasses.replace(certificate, n=certificate.n + 1))
        assert "DimensionViolation" in {c.violation for c in report.failures}

    def test_vanishing_value_is_no_witness(self, assert_faithful_trace):
        c = certify(parse("u*v - v*u"), 0.5, FAST)
        assert_faithful_trace(c)
        tampered = dataclasses.replace(c, U=np.eye(c.n, dtype=complex), achieved_norm=0.0, lower_bound=0.0)
        report = verify_certificate(tampered)
        assert [f.violation for f in report.failures] == ["NoWitnessFound"]
