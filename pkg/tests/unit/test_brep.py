"""Tests for chain families, dilation, paths and the covariant representation."""

import math

import numpy as np
import pytest

from soft_torus.brep import (
    BFamily,
    HFamily,
    PeriodicFamily,
    collapse_to_circle,
    compress_and_dilate,
    covariant_rep,
    dilation_norm_profile,
    eval_on_family,
    h_bound,
    halmos_dilate,
    homotopy_families,
    hs_from_us,
    path_to_identity,
    periodize,
    random_brep,
    scale_homotopy,
    step_angle,
    us_from_hs,
)
from soft_torus.errors import FamilyError, NotContraction, RankTooLarge, WindowTooSmall
from soft_torus.matcore import adjoint, op_norm, random_contraction, random_unitary, unitary_error
from soft_torus.poly_parser import parse


def _scalar(z: complex) -> np.ndarray:
    return np.array([[z]], dtype=complex)


def _phase(U: np.ndarray) -> float:
    return float(np.angle(U[0, 0]))


class TestFamilyTypes:
    def test_step_bound_enforced(self):
        with pytest.raises(FamilyError):
            BFamily(0.5, (0, 1), [_scalar(1), _scalar(-1)])

    def test_window_size_enforced(self):
        with pytest.raises(FamilyError):
            BFamily(1.0, (0, 2), [_scalar(1)])

    def test_unitarity_enforced(self):
        with pytest.raises(FamilyError):
            BFamily(1.0, (0, 0), [_scalar(1.01)])

    def test_unit_outside_window(self):
        f = BFamily(1.0, (0, 0), [_scalar(1)])
        with pytest.raises(WindowTooSmall):
            f.unit(1)

    def test_members_are_read_only(self):
        f = BFamily(1.0, (0, 0), [np.eye(2)])
        with pytest.raises(ValueError):
            f.units[0][0, 0] = 2.0

    def test_h_bound_enforced(self):
        with pytest.raises(FamilyError):
            HFamily(1.0, (0, 1), 0, np.eye(1), [_scalar(0.5)])

    def test_periodic_needs_even_period(self):
        with pytest.raises(FamilyError):
            PeriodicFamily(2.0, [_scalar(1), _scalar(1), _scalar(1)])

    def test_periodic_checks_wraparound(self):
        with pytest.raises(FamilyError):
            PeriodicFamily(1.0, [_scalar(1), _scalar(np.exp(1j * math.pi / 3)),
                                 _scalar(np.exp(2j * math.pi / 3)), _scalar(-1)])


class TestChangeOfGenerators:
    def test_constant_family_has_zero_generators(self, make_unitary):
        W = make_unitary(3)
        h = hs_from_us(BFamily(1.0, (-2, 2), [W] * 5))
        for H in h.hs:
            np.testing.assert_allclose(H, 0.0, atol=1e-12)

    def test_scalar_logarithm(self):
        theta = 0.4
        h = hs_from_us(BFamily(1.0, (0, 1), [_scalar(1), _scalar(np.exp(1j * theta))]))
        np.testing.assert_allclose(h.h(0), [[theta / math.pi]], atol=1e-12)

    def test_norm_bound_at_eps_one(self):
        assert h_bound(1.0) == pytest.approx(1 / 3)
        for seed in range(5):
            h = hs_from_us(random_brep(1.0, 3, (-2, 2), seed))
            assert max(op_norm(H) for H in h.hs) <= 1 / 3 + 1e-9

    def test_anchor_outside_zero(self):
        h = hs_from_us(random_brep(0.5, 2, (2, 4), 1))
        assert h.anchor == 2

    def test_zero_generators_give_constant_family(self, make_unitary):
        V0 = make_unitary(2)
        f = us_from_hs(HFamily(1.0, (-2, 2), 0, V0, [np.zeros((2, 2))] * 4))
        for U in f.units:
            np.testing.assert_allclose(U, V0, atol=1e-12)

    def test_scalar_exponentials(self):
        hs = [_scalar(0), _scalar(0), _scalar(1 / 3), _scalar(0)]
        f = us_from_hs(HFamily(1.0, (-2, 2), 0, np.eye(1), hs))
        for n in (1, 2):
            np.testing.assert_allclose(f.unit(n), [[np.exp(1j * math.pi / 3)]], atol=1e-12)
        for n in (-2, -1, 0):
            np.testing.assert_allclose(f.unit(n), [[1]], atol=1e-12)

    @pytest.mark.parametrize("eps", [0.2, 1.0, 1.9])
    def test_round_trips(self, eps):
        for seed in range(100):
            dim = 1 + seed % 8
            window = (-(seed % 4), seed % 4)
            f = random_brep(eps, dim, window, [seed, 17])
            h = hs_from_us(f)
            assert max((op_norm(H) for H in h.hs), default=0.0) <= h_bound(eps) + 1e-9
            back = us_from_hs(h)
            for a, b in zip(back.units, f.units):
                np.testing.assert_allclose(a, b, atol=1e-8)
            again = hs_from_us(back)
            for a, b in zip(again.hs, h.hs):
                np.testing.assert_allclose(a, b, atol=1e-8)


class TestHomotopy:
    def test_scaling(self):
        h = HFamily(1.0, (0, 1), 0, np.eye(1), [_scalar(1 / 3)])
        assert scale_homotopy(h, 1.0).h(0)[0, 0] == pytest.approx(1 / 3)
        assert scale_homotopy(h, 0.5).h(0)[0, 0] == pytest.approx(1 / 6)

    def test_endpoints(self):
        f = random_brep(1.0, 2, (-1, 1), 3)
        h = hs_from_us(f)
        families = homotopy_families(h, 4)
        assert len(families) == 5
        for a, b in zip(families[0].units, f.units):
            np.testing.assert_allclose(a, b, atol=1e-8)
        for U in families[-1].units:
            np.testing.assert_allclose(U, h.v0, atol=1e-12)
        for g in families:
            assert g.max_step() <= 1.0 + 1e-9

    def test_collapse_to_circle(self):
        h = hs_from_us(random_brep(1.5, 3, (-2, 1), 4))
        for U in collapse_to_circle(h).units:
            np.testing.assert_allclose(U, h.v0, atol=1e-12)


class TestHalmosDilate:
    def test_zero(self):
        np.testing.assert_allclose(halmos_dilate(_scalar(0)), [[0, 1], [1, 0]], atol=1e-15)

    def test_half(self):
        r = math.sqrt(3) / 2
        np.testing.assert_allclose(halmos_dilate(_scalar(0.5)), [[0.5, r], [r, -0.5]], atol=1e-12)

    def test_printed_sign_is_not_unitary(self):
        r = math.sqrt(3) / 2
        both_plus = np.array([[0.5, r], [r, 0.5]])
        assert unitary_error(both_plus) > 0.1

    def test_unitary_corner(self, make_unitary):
        W = make_unitary(3)
        V = halmos_dilate(W)
        np.testing.assert_allclose(V[:3, 3:], 0.0, atol=1e-7)
        np.testing.assert_allclose(V[3:, 3:], -adjoint(W), atol=1e-12)

    def test_random_contractions(self, rng):
        for k in range(200):
            T = random_contraction(rng, 1 + k % 16)
            V = halmos_dilate(T)
            assert unitary_error(V) <= 1e-10
            np.testing.assert_array_equal(V[: T.shape[0], : T.shape[0]], T)

    def test_rejects_non_contraction(self):
        with pytest.raises(NotContraction):
            halmos_dilate(_scalar(1.1))


class TestCompressAndDilate:
    def test_direct_example(self):
        V0 = np.array([[0, 1], [1, 0]], dtype=complex)
        f = us_from_hs(HFamily(1.0, (0, 0), 0, V0, []))
        g = compress_and_dilate(f, 1)
        np.testing.assert_allclose(g.unit(0), [[0, 1], [1, 0]], atol=1e-15)

    def test_rank_too_large(self):
        with pytest.raises(RankTooLarge):
            compress_and_dilate(random_brep(1.0, 2, (0, 1), 0), 3)

    def test_constant_reference_stays_constant(self, make_unitary):
        f = BFamily(1.0, (-1, 1), [make_unitary(3)] * 3)
        g = compress_and_dilate(f, 2)
        assert g.dim == 4
        for U in g.units:
            np.testing.assert_allclose(U, g.unit(0), atol=1e-12)

    def test_relations_hold(self):
        f = random_brep(0.8, 4, (-2, 2), 11)
        for m in range(1, 5):
            g = compress_and_dilate(f, m)
            assert g.dim == 2 * m
            assert g.max_step() <= 0.8 + 1e-9

    def test_norm_recovery_at_full_rank(self):
        f = random_brep(1.0, 64, (-2, 2), 5)
        polys = [
            "u_0 + u_1", "u_0*u_1 - u_1*u_0", "u_-1'*u_0 + u_0'*u_-1", "u_2 - 2*u_-2",
            "u_0*u_0 + u_1'", "(1+2i)*u_1*u_2'", "u_-2*u_-1*u_0*u_1*u_2", "3 - u_0 - u_0'",
            "u_1 - u_0", "u_0*u_1*u_0'",
        ]
        g = compress_and_dilate(f, 64)
        for text in polys:
            b = parse(text)
            assert op_norm(eval_on_family(b, g)) >= op_norm(eval_on_family(b, f)) - 1e-10

    def test_dilation_norm_profile(self):
        f = random_brep(1.0, 3, (0, 1), 2)
        b = parse("u_0 - u_1")
        profile = dilation_norm_profile(f, b, [1, 2, 3])
        assert [m for m, _ in profile] == [1, 2, 3]
        assert profile[-1][1] >= op_norm(eval_on_family(b, f)) - 1e-10


class TestPathToIdentity:
    def test_identity(self):
        path = path_to_identity(np.eye(2), 1.0)
        assert len(path) == 1

    def test_identity_up_to_rounding(self):
        W = np.diag([np.exp(1e-13j), np.exp(-3e-14j)])
        path = path_to_identity(W, 1.0)
        assert len(path) == 1
        np.testing.assert_allclose(path[0], np.eye(2), atol=1e-12)

    @pytest.mark.parametrize("eps, M", [(2.0, 1), (math.sqrt(2), 2), (1.0, 3), (0.1, 32)])
    def test_minus_one(self, eps, M):
        path = path_to_identity(_scalar(-1), eps)
        assert len(path) == M + 1
        np.testing.assert_allclose(path[0], [[-1]], atol=1e-15)
        np.testing.assert_allclose(path[-1], [[1]], atol=1e-15)
        steps = [op_norm(b - a) for a, b in zip(path, path[1:])]
        assert max(steps) <= eps + 1e-12
        # the same spectral path in M - 1 steps is too coarse
        shorter = math.pi / (M - 1) if M > 1 else math.inf
        assert M == 1 or 2 * math.sin(shorter / 2) > eps

    def test_phases_at_eps_one(self):
        path = path_to_identity(_scalar(-1), 1.0)
        phases = [_phase(U) for U in path]
        np.testing.assert_allclose(phases, [math.pi, 2 * math.pi / 3, math.pi / 3, 0.0], atol=1e-12)

    def test_random_unitaries(self, make_unitary):
        for eps in (0.3, 1.0, 1.7):
            W = make_unitary(5)
            path = path_to_identity(W, eps)
            np.testing.assert_allclose(path[0], W, atol=1e-15)
            np.testing.assert_allclose(path[-1], np.eye(5), atol=1e-15)
            assert max(op_norm(b - a) for a, b in zip(path, path[1:])) <= eps + 1e-9


class TestPeriodize:
    def test_minus_one_at_eps_two(self):
        pf = periodize(BFamily(2.0, (0, 0), [_scalar(-1)]))
        assert pf.period == 2
        np.testing.assert_allclose([U[0, 0] for U in pf.units], [-1, 1], atol=1e-12)

    def test_identity_family(self):
        pf = periodize(BFamily(1.0, (-2, 2), [np.eye(2)] * 5))
        assert pf.period == 6
        for U in pf.units:
            np.testing.assert_allclose(U, np.eye(2), atol=1e-15)

    def test_minus_one_at_eps_one(self):
        pf = periodize(BFamily(1.0, (0, 0), [_scalar(-1)]))
        assert pf.period == 6
        phases = [abs(_phase(pf.unit(n))) for n in range(6)]
        np.testing.assert_allclose(phases, [math.pi, math.pi / 3 * 2, math.pi / 3, 0, math.pi / 3, math.pi * 2 / 3],
                                   atol=1e-12)

    def test_agrees_with_family_and_steps_bounded(self):
        for seed in range(8):
            N = seed % 4
            eps = (0.3, 1.0, 1.8)[seed % 3]
            f = random_brep(eps, 1 + seed % 6, (-N, N), seed)
            pf = periodize(f)
            assert pf.period % 2 == 0 and pf.period >= 2 * (N + 1)
            for n in range(-N, N + 1):
                np.testing.assert_array_equal(pf.unit(n), f.unit(n))
            assert pf.max_step() <= eps + 1e-9
            assert pf.source_window == (-N, N)

    def test_needs_symmetric_window(self):
        with pytest.raises(FamilyError):
            periodize(BFamily(1.0, (0, 1), [np.eye(1)] * 2))


class TestCovariantRep:
    def test_two_point_example(self):
        cr = covariant_rep(PeriodicFamily(2.0, [_scalar(-1), _scalar(1)]))
        np.testing.assert_array_equal(cr.rho_u0, np.diag([-1, 1]))
        np.testing.assert_array_equal(cr.shift, [[0, 1], [1, 0]])
        np.testing.assert_array_equal(cr.shift @ cr.rho_u0 @ adjoint(cr.shift), cr.rho(1))

    def test_identity_family(self):
        cr = covariant_rep(PeriodicFamily(1.0, [np.eye(2)] * 4))
        for i in range(-3, 4):
            np.testing.assert_array_equal(cr.rho(i), np.eye(8))

    def test_covariance_and_order(self):
        for seed in range(6):
            N = seed % 4
            f = random_brep(1.0, 1 + seed % 6, (-N, N), seed)
            cr = covariant_rep(periodize(f))
            S = cr.shift
            np.testing.assert_array_equal(np.linalg.matrix_power(S, cr.period), np.eye(cr.n))
            worst = max(op_norm(S @ cr.rho(i) @ adjoint(S) - cr.rho(i + 1)) for i in range(cr.period))
            assert worst <= 1e-12

    def test_rho_of_dominates_family_value(self):
        pf = periodize(random_brep(0.7, 2, (-1, 1), 9))
        cr = covariant_rep(pf)
        b = parse("u_-1'*u_0 + 2*u_1")
        assert op_norm(cr.rho_of(b)) >= op_norm(eval_on_family(b, pf)) - 1e-12


class TestRandomBrep:
    def test_deterministic(self):
        a = random_brep(0.5, 3, (-2, 2), 42)
        b = random_brep(0.5, 3, (-2, 2), 42)
        for x, y in zip(a.units, b.units):
            np.testing.assert_array_equal(x, y)

    def test_single_point_window(self):
        f = random_brep(0.5, 4, (3, 3), 1)
        assert len(f.units) == 1
        assert unitary_error(f.unit(3)) <= 1e-12

    def test_steps_bounded(self):
        for seed in range(10):
            assert random_brep(0.5, 3, (-3, 3), seed).max_step() <= 0.5 + 1e-9

    def test_step_angle(self):
        assert step_angle(1.0) == pytest.approx(math.pi / 3)
        assert step_angle(2.0) == pytest.approx(math.pi)

    def test_random_unitary_start(self):
        f = random_brep(1.0, 2, (0, 0), 0)
        g = random_unitary(np.random.default_rng(0), 2)
        np.testing.assert_allclose(f.unit(0), g)
