import math

import numpy as np
import pytest

from matleg import (
    DomainError,
    DomainWindow,
    Matrix,
    NotInvertibleError,
    OffManifoldError,
    ParseError,
    SingularGradientError,
)
from matleg import det_transforms as dt
from matleg import matrix_core as mc
from matleg.det_transforms import det_power, det_root, log_det, zero_on_unit_det

import oracles
from conftest import make_nonsingular

ALL_PS = (-1.0, 0.5, 3.0, 4.0)


def sample_family_points(rng, fam, count=20):
    """Nonsingular samples with both determinant signs."""
    out = []
    for i in range(count):
        a = make_nonsingular(rng, fam.n)
        if i % 2 == 1:
            a = a.copy()
            a[0] = -a[0]
        out.append(Matrix(a))
    return out


class TestEvaluate:
    def test_detpower_diag(self):
        assert dt.evaluate(det_power(2, 4.0), Matrix.diag(2.0, 1.0)) == pytest.approx(2.0)

    def test_logdet_identity(self):
        assert dt.evaluate(log_det(3), Matrix.identity(3)) == 0.0

    def test_detroot_diag(self):
        assert dt.evaluate(det_root(2), Matrix.diag(4.0, 1.0)) == pytest.approx(4.0)

    def test_logdet_zero_det_raises_with_value(self):
        with pytest.raises(DomainError) as exc:
            dt.evaluate(log_det(2), Matrix.diag(1.0, 0.0))
        assert exc.value.value == 0.0

    def test_negative_p_zero_det_raises(self):
        with pytest.raises(DomainError):
            dt.evaluate(det_power(2, -1.0), Matrix.diag(1.0, 0.0))

    def test_positive_p_defined_at_zero_det(self):
        assert dt.evaluate(det_power(2, 4.0), Matrix.diag(1.0, 0.0)) == 0.0

    def test_wrong_size(self):
        from matleg import DimensionError

        with pytest.raises(DimensionError):
            dt.evaluate(det_power(2, 4.0), Matrix.identity(3))

    def test_homogeneity(self, rng):
        # F(t x) = |t|^p F(x)
        fam = det_power(2, 4.0)
        x = Matrix(make_nonsingular(rng, 2))
        for t in (2.0, -3.0, 0.5):
            assert dt.evaluate(fam, x.scaled(t)) == pytest.approx(
                abs(t) ** 4.0 * dt.evaluate(fam, x), rel=1e-10
            )


class TestGradient:
    def test_detpower_diag(self):
        y = dt.gradient(det_power(2, 4.0), Matrix.diag(2.0, 1.0))
        np.testing.assert_allclose(y.data, [[2.0, 0.0], [0.0, 4.0]], atol=1e-14)

    def test_logdet_identity(self):
        y = dt.gradient(log_det(2), Matrix.identity(2))
        np.testing.assert_allclose(y.data, np.eye(2), atol=1e-14)

    @pytest.mark.parametrize("fam", [det_power(2, 4.0), det_power(3, -1.0), det_root(3), log_det(2)])
    def test_matches_finite_differences(self, rng, fam):
        for x in sample_family_points(rng, fam, count=5):
            fd = oracles.fd_gradient(lambda a: dt.evaluate(fam, Matrix(a)), x.data)
            np.testing.assert_allclose(
                dt.gradient(fam, x).data.T, fd, rtol=1e-5, atol=1e-7
            )

    def test_singular_point_raises(self):
        with pytest.raises(SingularGradientError):
            dt.gradient(det_power(2, 4.0), Matrix.diag(1.0, 0.0))


class TestGradientDet:
    def test_detroot_lands_on_unit_manifold(self, rng):
        fam = det_root(3)
        for x in sample_family_points(rng, fam, count=8):
            s = dt.gradient_det(fam, x)
            assert abs(s) == 1.0
            assert s == math.copysign(1.0, mc.det(x))

    def test_detpower_diag(self):
        fam = det_power(2, 4.0)
        x = Matrix.diag(2.0, 1.0)
        assert dt.gradient_det(fam, x) == pytest.approx(8.0)
        assert mc.det(dt.gradient(fam, x)) == pytest.approx(8.0)

    def test_logdet_diag(self):
        fam = log_det(2)
        x = Matrix.diag(2.0, 1.0)
        assert dt.gradient_det(fam, x) == pytest.approx(0.5)

    @pytest.mark.parametrize("fam", [det_power(2, 3.0), det_power(3, 0.5), log_det(3), det_root(2)])
    def test_matches_det_of_gradient(self, rng, fam):
        for x in sample_family_points(rng, fam, count=8):
            assert dt.gradient_det(fam, x) == pytest.approx(
                mc.det(dt.gradient(fam, x)), rel=1e-9
            )


class TestInversion:
    def test_detpower_positive_branch(self):
        assert dt.invert_gradient_det(det_power(2, 4.0), 8.0) == pytest.approx(2.0)

    def test_detpower_negative_branch(self):
        assert dt.invert_gradient_det(det_power(2, 4.0), -8.0) == pytest.approx(-2.0)

    def test_logdet(self):
        assert dt.invert_gradient_det(log_det(2), 0.5) == pytest.approx(2.0)

    def test_detroot_not_invertible(self):
        with pytest.raises(NotInvertibleError):
            dt.invert_gradient_det(det_root(2), 1.0)

    def test_zero_outside_image(self):
        with pytest.raises(DomainError):
            dt.invert_gradient_det(det_power(2, 4.0), 0.0)

    @pytest.mark.parametrize("p", ALL_PS)
    def test_roundtrip_through_gradient_det(self, rng, p):
        fam = det_power(3, p)
        for x in sample_family_points(rng, fam, count=6):
            t = mc.det(x)
            s = dt.gradient_det(fam, x)
            assert dt.invert_gradient_det(fam, s) == pytest.approx(t, rel=1e-9)


class TestLegendre:
    def test_detpower_example(self):
        fam = det_power(2, 4.0)
        x = Matrix.diag(2.0, 1.0)
        y = Matrix.from_rows([[2.0, 0.0], [0.0, 4.0]])
        assert dt.legendre(fam, y) == pytest.approx(6.0)
        assert mc.pairing(x, y) - dt.evaluate(fam, x) == pytest.approx(6.0)

    def test_logdet_example(self):
        fam = log_det(2)
        x = Matrix.diag(2.0, 1.0)
        y = Matrix.from_rows([[0.5, 0.0], [0.0, 1.0]])
        expected = 2.0 + math.log(0.5)
        assert dt.legendre(fam, y) == pytest.approx(expected)
        assert mc.pairing(x, y) - dt.evaluate(fam, x) == pytest.approx(expected)

    def test_detroot_zero_on_manifold(self):
        y = Matrix.from_rows([[0.5, 0.0], [0.0, 2.0]])
        assert dt.legendre(det_root(2), y) == 0.0

    def test_detroot_off_manifold(self):
        with pytest.raises(OffManifoldError) as exc:
            dt.legendre(det_root(2), Matrix.diag(2.0, 1.0))
        assert exc.value.defect == pytest.approx(1.0)

    def test_zero_det_rejected(self):
        with pytest.raises(DomainError):
            dt.legendre(det_power(2, 4.0), Matrix.diag(1.0, 0.0))

    @pytest.mark.parametrize("p", ALL_PS)
    @pytest.mark.parametrize("n", (2, 3))
    def test_defining_roundtrip(self, rng, p, n):
        # Legendre(F'(x)) = <x, F'(x)> - F(x) on both determinant signs
        fam = det_power(n, p)
        for x in sample_family_points(rng, fam, count=10):
            fx = dt.evaluate(fam, x)
            y = dt.gradient(fam, x)
            lhs = mc.pairing(x, y) - fx
            assert abs(dt.legendre(fam, y) - lhs) <= 1e-8 * (1.0 + abs(fx))

    @pytest.mark.parametrize("p", ALL_PS)
    def test_gradient_inversion(self, rng, p):
        # (F^L)'(F'(x)) = x
        fam = det_power(3, p)
        dual = dt.dual_family(fam)
        for x in sample_family_points(rng, fam, count=6):
            y = dt.gradient(fam, x)
            xr = dt.gradient(dual, y)
            np.testing.assert_allclose(xr.data, x.data, rtol=1e-6, atol=1e-9)

    def test_logdet_gradient_inversion(self, rng):
        fam = log_det(3)
        dual = dt.dual_family(fam)
        for x in sample_family_points(rng, fam, count=6):
            y = dt.gradient(fam, x)
            np.testing.assert_allclose(dt.gradient(dual, y).data, x.data, rtol=1e-6, atol=1e-9)


class TestDualFamily:
    def test_conjugate_exponents(self):
        assert dt.dual_family(det_power(2, 4.0)).p == pytest.approx(4.0 / 3.0)
        assert dt.dual_family(det_power(2, -1.0)).p == pytest.approx(0.5)
        assert dt.dual_family(det_power(2, 2.0)).p == pytest.approx(2.0)

    def test_double_application_returns_p(self):
        for p in ALL_PS:
            fam = det_power(4, p)
            assert dt.dual_family(dt.dual_family(fam)).p == pytest.approx(p, abs=1e-12)

    def test_detroot_dual_is_manifold_zero(self):
        dual = dt.dual_family(det_root(2))
        assert dual.kind == dt.ZERO_MANIFOLD
        assert dt.evaluate(dual, Matrix.diag(0.5, 2.0)) == 0.0

    def test_zero_manifold_eval_and_errors(self):
        zm = zero_on_unit_det(2)
        assert dt.evaluate(zm, Matrix.diag(0.5, 2.0)) == 0.0
        with pytest.raises(OffManifoldError):
            dt.evaluate(zm, Matrix.diag(3.0, 1.0))
        with pytest.raises(NotInvertibleError):
            dt.gradient(zm, Matrix.diag(0.5, 2.0))
        with pytest.raises(NotInvertibleError):
            dt.dual_family(zm)

    def test_logdet_shift_algebra(self):
        fam = log_det(3)
        dual = dt.dual_family(fam)
        assert dual.kind == dt.LOG_DET and dual.shift == 3.0
        assert dt.dual_family(dual).shift == 0.0

    def test_involution_on_samples(self, rng):
        for fam in (det_power(2, 4.0), log_det(2)):
            dd = dt.dual_family(dt.dual_family(fam))
            for x in sample_family_points(rng, fam, count=5):
                a = dt.evaluate(fam, x)
                assert dt.evaluate(dd, x) == pytest.approx(a, rel=1e-10, abs=1e-12)


class TestSelfDualLogFamily:
    def test_shifted_log_family_is_self_dual(self, rng):
        # ln|det| + n/2 reproduces itself through the transform
        n = 3
        fam = log_det(n, shift=n / 2.0)
        assert dt.dual_family(fam) == fam
        for x in sample_family_points(rng, fam, count=8):
            y = dt.gradient(fam, x)
            lhs = mc.pairing(x, y) - dt.evaluate(fam, x)
            assert dt.legendre(fam, y) == pytest.approx(lhs, abs=1e-10)
            assert dt.legendre(fam, y) == pytest.approx(dt.evaluate(fam, y), abs=1e-10)


class TestNonConvexity:
    def test_midpoint_violation_exists(self, rng):
        # for n=2, p=4 the function is not midpoint convex
        fam = det_power(2, 4.0)
        x1 = Matrix.diag(2.0, 0.0)
        x2 = Matrix.diag(0.0, 2.0)
        mid = Matrix(0.5 * (x1.data + x2.data))
        assert dt.evaluate(fam, mid) > 0.5 * (dt.evaluate(fam, x1) + dt.evaluate(fam, x2))

        violations = 0
        for _ in range(200):
            a = rng.uniform(-1.0, 1.0, (2, 2))
            b = rng.uniform(-1.0, 1.0, (2, 2))
            m = Matrix(0.5 * (a + b))
            if dt.evaluate(fam, m) > 0.5 * (
                dt.evaluate(fam, Matrix(a)) + dt.evaluate(fam, Matrix(b))
            ):
                violations += 1
        assert violations >= 1


class TestDomainWindow:
    def test_construction(self):
        with pytest.raises(DomainError):
            DomainWindow(2.0, 1.0)

    def test_zero_straddle_rules(self):
        w = DomainWindow(-1.0, 1.0)
        w.validate_for(det_power(2, 4.0))  # p/n = 2 >= 1: fine at det = 0
        with pytest.raises(DomainError):
            w.validate_for(log_det(2))
        with pytest.raises(DomainError):
            w.validate_for(det_power(2, 0.5))

    def test_narrowed_evaluation(self):
        fam = det_power(2, 4.0)
        w = DomainWindow(1.0, 3.0)
        assert dt.evaluate(fam, Matrix.diag(2.0, 1.0), window=w) == pytest.approx(2.0)
        with pytest.raises(DomainError) as exc:
            dt.evaluate(fam, Matrix.diag(4.0, 1.0), window=w)
        assert exc.value.value == pytest.approx(4.0)


class TestFamilyValidationAndJson:
    def test_invalid_exponents(self):
        with pytest.raises(DomainError):
            det_power(2, 0.0)
        with pytest.raises(DomainError):
            det_power(2, 1.0)
        with pytest.raises(DomainError):
            det_power(1, 4.0)

    def test_json_roundtrip(self):
        for fam in (det_power(3, -1.0), det_root(2), log_det(4, shift=2.0), zero_on_unit_det(2)):
            assert dt.DetFamily.from_json_dict(fam.to_json_dict()) == fam

    def test_json_strictness(self):
        with pytest.raises(ParseError):
            dt.DetFamily.from_json_dict({"kind": "detroot", "n": 2, "p": 1.0})
        with pytest.raises(ParseError):
            dt.DetFamily.from_json_dict({"kind": "detpower", "n": 2})
        with pytest.raises(ParseError):
            dt.DetFamily.from_json_dict({"kind": "nope", "n": 2})
