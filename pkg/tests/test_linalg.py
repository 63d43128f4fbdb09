import gmpy2
import pytest
from gmpy2 import mpfr

from modgen.errors import NonConvergence, SpectrumOutOfRange
from modgen.linalg import (
    BigMatrix,
    artanh_sym,
    jacobi_eigen_sym,
    orthogonal_function_of_skew,
    skew_canonical,
    tanh_sym,
)
from modgen.precision import pow10, working_precision

from conftest import max_entry_diff, random_dense, random_skew, random_symmetric


def artanh_series_oracle(x, digits):
    """Plain power series sum_{k} x^(2k+1)/(2k+1); independent of log1p."""
    with working_precision(digits + 10):
        x = mpfr(x)
        total = mpfr(0)
        term = x
        k = 0
        while abs(term) / (2 * k + 1) > pow10(-(digits + 5), digits):
            total += term / (2 * k + 1)
            term *= x * x
            k += 1
        return total


class TestBigMatrix:
    def test_matmul_identity(self):
        m = random_dense(5, 40, seed=1)
        assert (m @ BigMatrix.identity(5, 40)).entries_equal(m)

    def test_matmul_known_product(self):
        a = BigMatrix.from_rows([[1, 2], [3, 4]], 30)
        b = BigMatrix.from_rows([[5, 6], [7, 8]], 30)
        assert (a @ b).entries_equal(BigMatrix.from_rows([[19, 22], [43, 50]], 30))

    def test_precision_propagates_as_minimum(self):
        a = random_dense(3, 80, seed=2)
        b = random_dense(3, 33, seed=3)
        assert (a @ b).digits == 33
        assert (a + b).digits == 33

    def test_transpose_and_defects(self):
        s = random_skew(6, 40, seed=4)
        assert s.max_skew_defect() == 0
        m = random_symmetric(6, 40, seed=5)
        assert m.max_sym_defect() == 0


class TestJacobi:
    def test_2x2_closed_form(self):
        m = BigMatrix.from_rows([[2, 1], [1, 2]], 40, symmetric=True)
        eig = jacobi_eigen_sym(m)
        assert abs(eig.eigenvalues[0] - 1) < pow10(-35, 40)
        assert abs(eig.eigenvalues[1] - 3) < pow10(-35, 40)

    def test_diagonal_input_any_size(self):
        m = BigMatrix.diagonal([5] * 7, 30)
        eig = jacobi_eigen_sym(m)
        assert all(v == 5 for v in eig.eigenvalues)
        # Q is the identity up to permutation: one unit entry per column
        for j in range(7):
            col = [eig.q[(i, j)] for i in range(7)]
            assert sorted(abs(c) for c in col)[-1] == 1
            assert sum(1 for c in col if c != 0) == 1

    def test_random_reconstruction_residual(self):
        # spec example: random symmetric 8x8 at 50 digits reconstructs to 1e-25
        digits = 50
        m = random_symmetric(8, digits, seed=11)
        eig = jacobi_eigen_sym(m)
        with working_precision(digits):
            lam = BigMatrix.diagonal(eig.eigenvalues, digits)
            rec = eig.q @ lam @ eig.q.transpose()
            assert max_entry_diff(rec, m) <= pow10(-25, digits)

    def test_orthogonality_residual(self):
        digits = 60
        m = random_symmetric(10, digits, seed=12)
        eig = jacobi_eigen_sym(m)
        with working_precision(digits):
            gram = eig.q.transpose() @ eig.q
            assert max_entry_diff(gram, BigMatrix.identity(10, digits)) \
                <= pow10(-digits / 2, digits)

    def test_eigenvalues_ascending(self):
        eig = jacobi_eigen_sym(random_symmetric(9, 40, seed=13))
        assert all(a <= b for a, b in
                   zip(eig.eigenvalues, eig.eigenvalues[1:]))

    def test_determinism_bit_identical(self):
        m = random_symmetric(6, 45, seed=14)
        e1 = jacobi_eigen_sym(m)
        e2 = jacobi_eigen_sym(m)
        assert all(a == b for a, b in zip(e1.eigenvalues, e2.eigenvalues))
        assert e1.q.entries_equal(e2.q)

    def test_rejects_asymmetric(self):
        m = BigMatrix.from_rows([[0, 1], [0, 0]], 30)
        with pytest.raises(ValueError):
            jacobi_eigen_sym(m)

    def test_nonconvergence_budget(self):
        m = random_symmetric(6, 40, seed=15)
        with pytest.raises(NonConvergence):
            jacobi_eigen_sym(m, max_sweeps=0)

    def test_zero_matrix(self):
        eig = jacobi_eigen_sym(BigMatrix.zeros(4, 30))
        assert all(v == 0 for v in eig.eigenvalues)


class TestSkewCanonical:
    def test_already_canonical_block(self):
        s = BigMatrix.from_rows([[0, 1], [-1, 0]], 40, skew=True)
        canon = skew_canonical(s)
        assert len(canon.thetas) == 1
        assert canon.zero_count == 0
        assert abs(canon.thetas[0] - 1) < pow10(-30, 40)

    def test_zero_matrix(self):
        canon = skew_canonical(BigMatrix.zeros(5, 30))
        assert canon.thetas == []
        assert canon.zero_count == 5

    def test_construct_then_recover_round_trip(self):
        # conjugate blockdiag(J(1), J(2)) by a random rotation, recover {1, 2}
        digits = 50
        j = BigMatrix.from_rows(
            [[0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, 2], [0, 0, -2, 0]],
            digits, skew=True)
        rot = _random_rotation(4, digits, seed=21)
        s = rot @ j @ rot.transpose()
        s = _force_skew(s)
        canon = skew_canonical(s)
        assert canon.zero_count == 0
        assert abs(canon.thetas[0] - 1) < pow10(-40, digits)
        assert abs(canon.thetas[1] - 2) < pow10(-40, digits)

    def test_block_diagonalization_residual(self):
        digits = 50
        s = random_skew(8, digits, seed=22)
        canon = skew_canonical(s)
        with working_precision(digits):
            qtsq = canon.q.transpose() @ s @ canon.q
            n = 8
            target = BigMatrix.zeros(n, digits).to_lists()
            for k, theta in enumerate(canon.thetas):
                target[2 * k][2 * k + 1] = theta
                target[2 * k + 1][2 * k] = -theta
            target = BigMatrix.from_rows(target, digits)
            assert max_entry_diff(qtsq, target) \
                <= pow10(-digits / 2, digits) * s.max_norm()

    def test_thetas_ascending_and_deterministic(self):
        s = random_skew(10, 40, seed=23)
        canon = skew_canonical(s)
        assert all(a <= b for a, b in zip(canon.thetas, canon.thetas[1:]))
        again = skew_canonical(s)
        assert canon.q.entries_equal(again.q)
        assert all(a == b for a, b in zip(canon.thetas, again.thetas))

    def test_odd_dimension_has_zero_mode(self):
        s = random_skew(5, 40, seed=24)
        canon = skew_canonical(s)
        assert canon.zero_count == 1
        assert len(canon.thetas) == 2


def _random_rotation(n, digits, seed):
    """Orthogonalize a random matrix; deterministic given the seed."""
    m = random_dense(n, digits, seed=seed)
    with working_precision(digits):
        cols = [[m[(i, j)] for i in range(n)] for j in range(n)]
        ortho = []
        for c in cols:
            for b in ortho:
                coef = sum((x * y for x, y in zip(c, b)), mpfr(0))
                c = [x - coef * y for x, y in zip(c, b)]
            nrm = gmpy2.sqrt(sum((x * x for x in c), mpfr(0)))
            ortho.append([x / nrm for x in c])
        rows = [[ortho[j][i] for j in range(n)] for i in range(n)]
    return BigMatrix.from_rows(rows, digits)


def _force_skew(m):
    n = m.rows
    with working_precision(m.digits):
        rows = [[(m[(i, j)] - m[(j, i)]) / 2 for j in range(n)] for i in range(n)]
    return BigMatrix.from_rows(rows, m.digits, skew=True)


class TestOrthogonalFunctionOfSkew:
    def test_rotation_by_pi(self):
        digits = 45
        with working_precision(digits):
            pi = gmpy2.const_pi()
            s = BigMatrix.from_rows([[0, pi], [-pi, 0]], digits, skew=True)
        out = orthogonal_function_of_skew(s, gmpy2.cos, gmpy2.sin)
        expect = BigMatrix.from_rows([[-1, 0], [0, -1]], digits)
        assert max_entry_diff(out, expect) < pow10(-40, digits)

    def test_zero_matrix_gives_identity(self):
        s = BigMatrix.zeros(4, 30)
        out = orthogonal_function_of_skew(s, gmpy2.cos, gmpy2.sin)
        assert out.entries_equal(BigMatrix.identity(4, 30))

    def test_group_inverse_property_16x16(self):
        digits = 60
        s = random_skew(16, digits, seed=31)
        canon = skew_canonical(s)
        plus = orthogonal_function_of_skew(
            s, lambda t: gmpy2.cos(t / 4), lambda t: gmpy2.sin(t / 4),
            canonical=canon)
        minus = orthogonal_function_of_skew(
            s, lambda t: gmpy2.cos(t / 4), lambda t: -gmpy2.sin(t / 4),
            canonical=canon)
        with working_precision(digits):
            prod = plus @ minus
            assert max_entry_diff(prod, BigMatrix.identity(16, digits)) \
                <= pow10(-digits / 2, digits)

    def test_result_is_orthogonal(self):
        digits = 50
        s = random_skew(6, digits, seed=32)
        out = orthogonal_function_of_skew(
            s, lambda t: gmpy2.cos(t / 4), lambda t: gmpy2.sin(t / 4))
        with working_precision(digits):
            gram = out.transpose() @ out
            assert max_entry_diff(gram, BigMatrix.identity(6, digits)) \
                <= pow10(-digits / 2, digits)

    def test_matches_taylor_series_exponential(self):
        # orientation check: compare exp(S) against a plain Taylor sum
        digits = 40
        s = random_skew(4, digits, seed=34, scale=0.5)
        out = orthogonal_function_of_skew(s, gmpy2.cos, gmpy2.sin)
        with working_precision(digits):
            term = BigMatrix.identity(4, digits)
            total = term
            for k in range(1, 40):
                term = (term @ s).scale(mpfr(1) / k)
                total = total + term
            assert max_entry_diff(out, total) <= pow10(-30, digits)

    def test_semigroup_quarter_twice_equals_half(self):
        digits = 50
        s = random_skew(8, digits, seed=33)
        canon = skew_canonical(s)
        quarter = orthogonal_function_of_skew(
            s, lambda t: gmpy2.cos(t / 4), lambda t: gmpy2.sin(t / 4),
            canonical=canon)
        half = orthogonal_function_of_skew(
            s, lambda t: gmpy2.cos(t / 2), lambda t: gmpy2.sin(t / 2),
            canonical=canon)
        with working_precision(digits):
            assert max_entry_diff(quarter @ quarter, half) \
                <= pow10(-digits / 2, digits)


class TestArtanhSym:
    def test_zero_matrix(self):
        out, margin = artanh_sym(BigMatrix.zeros(3, 30))
        assert all(v == 0 for v in out.data)
        assert margin == 1

    def test_diagonal_against_series_oracle(self):
        digits = 45
        m = BigMatrix.diagonal(["0.5", "-0.5"], digits)
        out, _ = artanh_sym(m)
        oracle = artanh_series_oracle("0.5", digits)
        assert abs(out[(0, 0)] - oracle) < pow10(-40, digits)
        assert abs(out[(1, 1)] + oracle) < pow10(-40, digits)
        assert abs(out[(0, 1)]) < pow10(-40, digits)
        # frozen leading digits of artanh(1/2)
        assert str(out[(0, 0)])[:12] == "0.5493061443"

    def test_margin_floor_violation(self):
        digits = 60
        with working_precision(digits):
            lam = 1 - pow10(-80, digits)
        m = BigMatrix.diagonal([lam, mpfr("0.25")], digits)
        with pytest.raises(SpectrumOutOfRange) as err:
            artanh_sym(m)
        assert err.value.margin is not None

    def test_margin_reported(self):
        m = BigMatrix.diagonal(["0.5", "-0.75"], 40)
        _, margin = artanh_sym(m)
        assert abs(margin - mpfr("0.25")) < pow10(-35, 40)

    def test_round_trip_with_tanh(self):
        # artanh(tanh(M)) = M to 10**(-p/3) for ||M|| <= 2
        digits = 48
        m = random_symmetric(6, digits, seed=41, scale=0.8)
        with working_precision(digits):
            back, _ = artanh_sym(tanh_sym(m))
            assert max_entry_diff(back, m) <= pow10(-digits / 3, digits)
