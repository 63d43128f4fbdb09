import random

import gmpy2
import pytest
from gmpy2 import mpfr

from modgen.linalg import BigMatrix
from modgen.precision import working_precision


def random_symmetric(n, digits, seed, scale=1.0):
    rng = random.Random(seed)
    with working_precision(digits):
        rows = [[mpfr(0)] * n for _ in range(n)]
        for i in range(n):
            for j in range(i, n):
                v = mpfr(rng.uniform(-scale, scale))
                rows[i][j] = v
                rows[j][i] = v
    return BigMatrix.from_rows(rows, digits, symmetric=True)


def random_skew(n, digits, seed, scale=1.0):
    rng = random.Random(seed)
    with working_precision(digits):
        rows = [[mpfr(0)] * n for _ in range(n)]
        for i in range(n):
            for j in range(i + 1, n):
                v = mpfr(rng.uniform(-scale, scale))
                rows[i][j] = v
                rows[j][i] = -v
    return BigMatrix.from_rows(rows, digits, skew=True)


def random_dense(n, digits, seed, scale=1.0):
    rng = random.Random(seed)
    with working_precision(digits):
        rows = [[mpfr(rng.uniform(-scale, scale)) for _ in range(n)]
                for _ in range(n)]
    return BigMatrix.from_rows(rows, digits)


def max_entry_diff(a, b):
    return max(abs(x - y) for x, y in zip(a.data, b.data))


@pytest.fixture
def tol_at():
    def _tol(digits, exponent_fraction):
        return mpfr(10) ** (digits * exponent_fraction)
    return _tol
