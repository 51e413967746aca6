"""Collocation points, operator-image basis, Gram matrix, orthonormalization.

The Gram assembly and the triangular orthonormalization each get an
independent oracle: adaptive quadrature of the defining inner products for
the former, the classical Gram-Schmidt recurrence for the latter.
"""

import math

import numpy as np
import pytest

from rkhsivp import (
    DomainError,
    Interval,
    NumericError,
    SingularityError,
    build_basis,
    build_w23_kernel,
    eval_kernel,
    gram_matrix,
    orthonormalize,
    psi_eval,
    uniform_points,
    w23_inner_product,
)
from rkhsivp.collocation import PointSet


def beta_by_recurrence(gram):
    """Classical Gram-Schmidt normal equations, solved row by row.

    With c_im = <psi_i, psibar_m> = sum_l beta_ml G_il and
    d_i = sqrt(G_ii - sum_m c_im^2), row i of beta is
    (e_i - sum_m c_im beta_m) / d_i.  Numerically fragile beyond small n,
    which is exactly why it serves as an independent oracle here.
    """
    n = gram.shape[0]
    beta = np.zeros((n, n))
    for i in range(n):
        c = np.array([beta[m] @ gram[i] for m in range(i)])
        d2 = gram[i, i] - float(c @ c) if i else gram[0, 0]
        if d2 <= 0:
            raise ValueError("lost positive definiteness")
        d = math.sqrt(d2)
        row = np.zeros(n)
        row[i] = 1.0
        for m in range(i):
            row -= c[m] * beta[m]
        beta[i] = row / d
    return beta


class TestUniformPoints:
    def test_quarters(self, unit_interval):
        pts = uniform_points(unit_interval, 4)
        assert np.allclose(pts.values, [0.25, 0.5, 0.75, 1.0])

    def test_excludes_left_endpoint(self, unit_interval):
        pts = uniform_points(unit_interval, 100)
        assert pts.values[0] == pytest.approx(0.01, abs=1e-15)
        assert pts.values[-1] == 1.0
        assert pts.values[0] > 0.0

    def test_shifted_interval(self):
        pts = uniform_points(Interval(1.0, 2.0), 2)
        assert np.allclose(pts.values, [1.5, 2.0])

    def test_rejects_nonpositive_n(self, unit_interval):
        with pytest.raises(ValueError, match="n must be >= 1"):
            uniform_points(unit_interval, 0)

    def test_single_point(self, unit_interval):
        assert uniform_points(unit_interval, 1).values.tolist() == [1.0]


class TestPointSet:
    def test_validation(self):
        with pytest.raises(ValueError):
            PointSet([0.5, 0.25])
        with pytest.raises(ValueError):
            PointSet([0.5, 0.5])
        with pytest.raises(ValueError):
            PointSet([])
        with pytest.raises(ValueError):
            PointSet([0.1, math.nan])

    def test_container_protocol(self):
        pts = PointSet([0.2, 0.4, 0.9])
        assert len(pts) == 3
        assert list(pts) == [0.2, 0.4, 0.9]
        assert pts[1] == 0.4

    def test_read_only(self):
        pts = PointSet([0.2, 0.4])
        with pytest.raises(ValueError):
            pts.values[0] = 0.0


class TestPsiEval:
    def test_pinned_value(self, kernel01):
        # Hand-derived from the closed form on the upper branch at
        # x=0.25, x_i=0.5, k=2: d2 = (20x^3+60x^2)/120 and
        # d1 = (-5x^4+20yx^3+60yx^2)/120 at y=x_i.
        got = psi_eval(kernel01, 2.0, 0.5, 0.25)
        assert got == pytest.approx(0.1009114583333333, abs=1e-10)

    def test_matches_kernel_derivatives(self, kernel01, rng):
        k = 2.0
        for _ in range(10):
            x_i = float(rng.uniform(0.05, 1.0))
            x = float(rng.uniform(0.0, 1.0))
            direct = eval_kernel(kernel01, x, x_i, 2) + (k / x_i) * eval_kernel(
                kernel01, x, x_i, 1
            )
            assert psi_eval(kernel01, k, x_i, x) == pytest.approx(direct, rel=1e-13)

    def test_vanishes_at_origin_section(self, kernel01):
        for x_i in (0.1, 0.5, 1.0):
            assert abs(psi_eval(kernel01, 2.0, x_i, 0.0)) <= 1e-12

    def test_node_at_singularity_rejected(self, kernel01):
        with pytest.raises(SingularityError):
            psi_eval(kernel01, 2.0, 0.0, 0.5)
        with pytest.raises(SingularityError):
            psi_eval(kernel01, 2.0, -0.1, 0.5)

    def test_reduces_to_second_derivative_for_k_zero(self, kernel01):
        x_i, x = 0.4, 0.7
        assert psi_eval(kernel01, 0.0, x_i, x) == pytest.approx(
            eval_kernel(kernel01, x, x_i, 2), rel=1e-14
        )


class TestGramMatrix:
    def test_single_point_is_positive_norm(self, kernel01, unit_interval):
        gram = gram_matrix(kernel01, 2.0, uniform_points(unit_interval, 1))
        assert gram.shape == (1, 1)
        assert gram[0, 0] > 0.0

    def test_symmetric(self, kernel01, unit_interval):
        gram = gram_matrix(kernel01, 2.0, uniform_points(unit_interval, 10))
        assert np.max(np.abs(gram - gram.T)) <= 1e-9 * np.max(np.abs(gram))

    def test_against_quadrature(self, kernel01, unit_interval):
        k = 2.0
        pts = uniform_points(unit_interval, 5)
        basis = build_basis(kernel01, k, pts)
        gram = basis.gram
        nodes = tuple(float(x) for x in pts.values)

        def psi(i):
            def f(y, order=0):
                return float(basis.psi_values(y, order)[i])

            return f

        for i in range(5):
            for j in range(i, 5):
                by_quad = w23_inner_product(
                    psi(i), psi(j), unit_interval, breakpoints=nodes
                )
                assert gram[i, j] == pytest.approx(by_quad, abs=1e-6)

    def test_adjoint_identity(self, kernel01, unit_interval):
        # <u, psi_i> recovers u'' + (k/x_i) u' at the node for u in the space.
        k = 2.0
        pts = uniform_points(unit_interval, 4)
        basis = build_basis(kernel01, k, pts)
        u = lambda y, m=0: (y**3, 3 * y**2, 6 * y, 6.0)[m]
        nodes = tuple(float(x) for x in pts.values)
        for i, x_i in enumerate(nodes):
            def psi(y, order=0):
                return float(basis.psi_values(y, order)[i])

            got = w23_inner_product(u, psi, unit_interval, breakpoints=nodes)
            want = 6 * x_i + (k / x_i) * 3 * x_i**2
            assert got == pytest.approx(want, abs=1e-6)

    def test_nonfinite_entries_reported(self, kernel01, unit_interval):
        with pytest.raises(NumericError, match="Gram"):
            gram_matrix(kernel01, math.inf, uniform_points(unit_interval, 3))


class TestOrthonormalize:
    def test_identity(self):
        beta = orthonormalize(np.eye(4))
        assert np.allclose(beta, np.eye(4))

    def test_two_by_two_pinned(self):
        beta = orthonormalize(np.array([[4.0, 2.0], [2.0, 3.0]]))
        expected = np.array([[0.5, 0.0], [-0.3535533905932738, 0.7071067811865476]])
        assert np.allclose(beta, expected, atol=1e-12)

    def test_rejects_indefinite(self):
        with pytest.raises(NumericError):
            orthonormalize(np.array([[1.0, 2.0], [2.0, 1.0]]))

    def test_lower_triangular_positive_diagonal(self, basis100):
        beta = basis100.beta
        assert np.allclose(beta, np.tril(beta))
        assert np.all(np.diag(beta) > 0.0)

    def test_whitens_gram(self, basis100):
        n = basis100.n
        err = np.max(np.abs(basis100.beta @ basis100.gram @ basis100.beta.T - np.eye(n)))
        assert err <= 1e-8

    def test_matches_recurrence_for_small_n(self, kernel01, unit_interval):
        for n in (2, 4, 6):
            gram = gram_matrix(kernel01, 2.0, uniform_points(unit_interval, n))
            fast = orthonormalize(gram)
            slow = beta_by_recurrence(gram)
            assert np.max(np.abs(fast - slow)) <= 1e-8


class TestCollocationBasis:
    def test_shapes_and_immutability(self, basis100):
        n = basis100.n
        assert basis100.gram.shape == (n, n)
        assert basis100.beta.shape == (n, n)
        with pytest.raises(ValueError):
            basis100.gram[0, 0] = 0.0
        with pytest.raises(ValueError):
            basis100.beta[0, 0] = 0.0

    def test_psibar_is_beta_times_psi(self, kernel01, unit_interval):
        basis = build_basis(kernel01, 2.0, uniform_points(unit_interval, 8))
        for x in (0.15, 0.6, 1.0):
            direct = basis.beta @ basis.psi_values(x)
            assert np.allclose(basis.psibar_values(x), direct, atol=1e-13)

    def test_node_matrices(self, kernel01, unit_interval):
        pts = uniform_points(unit_interval, 6)
        basis = build_basis(kernel01, 2.0, pts)
        psi_mat = basis.node_psi_matrix
        psibar_mat = basis.node_psibar_matrix
        for j, xj in enumerate(pts.values):
            assert np.allclose(psi_mat[j], basis.psi_values(float(xj)), atol=1e-13)
            assert np.allclose(
                psibar_mat[j], basis.psibar_values(float(xj)), atol=1e-13
            )

    def test_orthonormality_by_quadrature(self, kernel01, unit_interval):
        pts = uniform_points(unit_interval, 5)
        basis = build_basis(kernel01, 2.0, pts)
        nodes = tuple(float(x) for x in pts.values)

        def psibar(i):
            def f(y, order=0):
                return float(basis.psibar_values(y, order)[i])

            return f

        for i in range(5):
            for j in range(i, 5):
                ip = w23_inner_product(
                    psibar(i), psibar(j), unit_interval, breakpoints=nodes
                )
                assert ip == pytest.approx(1.0 if i == j else 0.0, abs=1e-5)

    def test_order_validation(self, basis100):
        with pytest.raises(ValueError):
            basis100.psi_values(0.5, order=4)
        with pytest.raises(DomainError):
            basis100.psi_values(1.5)
