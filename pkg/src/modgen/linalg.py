"""Dense arbitrary-precision linear algebra for symmetric and skew matrices.

The two workhorses are a cyclic-by-row Jacobi eigensolver for symmetric
matrices and a canonical-form routine for skew-symmetric matrices (rotation
angles plus an orthogonal frame).  Jacobi was chosen because it is simple
to keep correct at arbitrary precision and every result is verifiable
through its reconstruction residual.  All routines are pure functions of
their inputs and bit-reproducible: pivot order is fixed (cyclic by rows)
and eigenvalues are returned ascending.
"""

from __future__ import annotations

from dataclasses import dataclass

import gmpy2
from gmpy2 import mpfr

from .errors import NonConvergence, SpectrumOutOfRange
from .precision import pow10, working_precision

DEFAULT_SWEEP_BUDGET = 100


class BigMatrix:
    """Dense row-major matrix of MPFR reals sharing one decimal precision.

    Entries are plain mpfr values; every operation involving the matrix is
    carried out inside a working-precision context derived from `digits`
    (the minimum across operands for binary operations).  The optional
    `symmetric` / `skew` flags are promises checked by consumers against a
    10**(-p/2) * max-norm tolerance, not recomputed invariants.
    """

    __slots__ = ("rows", "cols", "digits", "data", "symmetric", "skew")

    def __init__(self, rows, cols, digits, data=None, symmetric=None, skew=None):
        if rows < 1 or cols < 1:
            raise ValueError("matrix dimensions must be positive")
        self.rows = rows
        self.cols = cols
        self.digits = int(digits)
        if data is None:
            zero = mpfr(0)
            data = [zero] * (rows * cols)
        elif len(data) != rows * cols:
            raise ValueError("data length does not match dimensions")
        self.data = data
        self.symmetric = symmetric
        self.skew = skew

    # -- construction -----------------------------------------------------

    @classmethod
    def zeros(cls, n, digits, m=None):
        return cls(n, m if m is not None else n, digits)

    @classmethod
    def identity(cls, n, digits):
        data = [mpfr(0)] * (n * n)
        one = mpfr(1)
        for i in range(n):
            data[i * n + i] = one
        return cls(n, n, digits, data, symmetric=True)

    @classmethod
    def diagonal(cls, values, digits):
        n = len(values)
        data = [mpfr(0)] * (n * n)
        with working_precision(digits):
            for i, v in enumerate(values):
                data[i * n + i] = mpfr(v) + 0
        return cls(n, n, digits, data, symmetric=True)

    @classmethod
    def from_rows(cls, rows, digits, symmetric=None, skew=None):
        nr = len(rows)
        nc = len(rows[0])
        data = []
        with working_precision(digits):
            for row in rows:
                if len(row) != nc:
                    raise ValueError("ragged rows")
                data.extend(mpfr(v) + 0 for v in row)
        return cls(nr, nc, digits, data, symmetric=symmetric, skew=skew)

    # -- access ------------------------------------------------------------

    def __getitem__(self, ij):
        i, j = ij
        return self.data[i * self.cols + j]

    def copy(self):
        return BigMatrix(self.rows, self.cols, self.digits, list(self.data),
                         symmetric=self.symmetric, skew=self.skew)

    def to_lists(self):
        c = self.cols
        return [self.data[i * c:(i + 1) * c] for i in range(self.rows)]

    @property
    def is_square(self):
        return self.rows == self.cols

    def entries_equal(self, other):
        """Bit-exact comparison, ignoring flags."""
        return (self.rows, self.cols) == (other.rows, other.cols) and all(
            a == b for a, b in zip(self.data, other.data))

    # -- arithmetic ---------------------------------------------------------

    def _result_digits(self, other):
        return min(self.digits, other.digits)

    def __matmul__(self, other):
        if self.cols != other.rows:
            raise ValueError("inner dimensions do not match")
        digits = self._result_digits(other)
        n, k, m = self.rows, self.cols, other.cols
        a, b = self.data, other.data
        out = []
        with working_precision(digits):
            zero = mpfr(0)
            for i in range(n):
                arow = a[i * k:(i + 1) * k]
                for j in range(m):
                    s = zero
                    idx = j
                    for ak in arow:
                        s = s + ak * b[idx]
                        idx += m
                    out.append(s)
        return BigMatrix(n, m, digits, out)

    def _elementwise(self, other, op):
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shapes do not match")
        digits = self._result_digits(other)
        with working_precision(digits):
            data = [op(a, b) for a, b in zip(self.data, other.data)]
        return BigMatrix(self.rows, self.cols, digits, data)

    def __add__(self, other):
        return self._elementwise(other, lambda a, b: a + b)

    def __sub__(self, other):
        return self._elementwise(other, lambda a, b: a - b)

    def __neg__(self):
        return BigMatrix(self.rows, self.cols, self.digits,
                         [-a for a in self.data],
                         symmetric=self.symmetric, skew=self.skew)

    def scale(self, c):
        with working_precision(self.digits):
            c = mpfr(c)
            data = [c * a for a in self.data]
        return BigMatrix(self.rows, self.cols, self.digits, data)

    def transpose(self):
        r, c = self.rows, self.cols
        d = self.data
        data = [d[i * c + j] for j in range(c) for i in range(r)]
        return BigMatrix(c, r, self.digits, data,
                         symmetric=self.symmetric, skew=self.skew)

    def matvec(self, v):
        if self.cols != len(v):
            raise ValueError("dimension mismatch")
        out = []
        c = self.cols
        with working_precision(self.digits):
            zero = mpfr(0)
            for i in range(self.rows):
                s = zero
                row = self.data[i * c:(i + 1) * c]
                for a, x in zip(row, v):
                    s = s + a * x
                out.append(s)
        return out

    # -- norms and defects ---------------------------------------------------

    def max_norm(self):
        return max(abs(a) for a in self.data)

    def max_sym_defect(self):
        """max |M[i,j] - M[j,i]| over pairs; 0 for an exactly symmetric matrix."""
        n, c, d = self.rows, self.cols, self.data
        worst = mpfr(0)
        for i in range(n):
            for j in range(i + 1, c):
                delta = abs(d[i * c + j] - d[j * c + i])
                if delta > worst:
                    worst = delta
        return worst

    def max_skew_defect(self):
        """max |M[i,j] + M[j,i]| over i<=j; 0 for an exactly skew matrix."""
        n, c, d = self.rows, self.cols, self.data
        worst = mpfr(0)
        for i in range(n):
            for j in range(i, c):
                delta = abs(d[i * c + j] + d[j * c + i])
                if delta > worst:
                    worst = delta
        return worst


@dataclass
class SymmetricEigen:
    """Eigendecomposition M = Q diag(eigenvalues) Q^T, eigenvalues ascending."""

    eigenvalues: list
    q: BigMatrix
    digits: int


@dataclass
class SkewCanonical:
    """Canonical form of a skew matrix S: Q^T S Q is block diagonal.

    The leading 2x2 blocks are [[0, theta_k], [-theta_k, 0]] with thetas
    ascending, followed by a zero_count x zero_count zero block.
    """

    thetas: list
    q: BigMatrix
    zero_count: int
    digits: int


def default_tolerance(m: BigMatrix):
    """10**(-0.9 p) * max-norm: convergence target with headroom below p digits."""
    scale = m.max_norm()
    with working_precision(m.digits):
        return pow10(-0.9 * m.digits, m.digits) * scale


def flag_tolerance(m: BigMatrix):
    with working_precision(m.digits):
        return pow10(-m.digits / 2, m.digits) * m.max_norm()


def _check_symmetric(m):
    if not m.is_square:
        raise ValueError("matrix must be square")
    if m.max_sym_defect() > flag_tolerance(m):
        raise ValueError("matrix is not symmetric within flag tolerance")


def _check_skew(m):
    if not m.is_square:
        raise ValueError("matrix must be square")
    if m.max_skew_defect() > flag_tolerance(m):
        raise ValueError("matrix is not skew-symmetric within flag tolerance")


def jacobi_eigen_sym(m: BigMatrix, tol=None, max_sweeps=DEFAULT_SWEEP_BUDGET):
    """Cyclic-by-row Jacobi eigendecomposition of a symmetric matrix.

    Sweeps rotate every (i, j) pair in row order until the largest
    off-diagonal entry drops below `tol` (default 10**(-0.9 p) * max-norm).
    Raises NonConvergence when the sweep budget is exhausted, which in
    practice signals insufficient working precision or an asymmetric input.
    """
    _check_symmetric(m)
    n = m.rows
    digits = m.digits
    if tol is not None and not isinstance(tol, mpfr):
        tol = getattr(tol, "value", tol)

    with working_precision(digits):
        if tol is None:
            tol = default_tolerance(m)
        elif tol <= 0:
            raise ValueError("tol must be positive")
        a = m.to_lists()
        # force exact symmetry of the working copy so rotations preserve it
        for i in range(n):
            for j in range(i + 1, n):
                a[j][i] = a[i][j]
        q = [[mpfr(0)] * n for _ in range(n)]
        one = mpfr(1)
        for i in range(n):
            q[i][i] = one

        converged = False
        for _sweep in range(max_sweeps):
            off = mpfr(0)
            for i in range(n):
                ai = a[i]
                for j in range(i + 1, n):
                    v = abs(ai[j])
                    if v > off:
                        off = v
            if off <= tol:
                converged = True
                break
            for i in range(n - 1):
                for j in range(i + 1, n):
                    apq = a[i][j]
                    if apq == 0:
                        continue
                    theta = (a[j][j] - a[i][i]) / (2 * apq)
                    if theta == 0:
                        t = one
                    else:
                        t = one / (abs(theta) + gmpy2.sqrt(theta * theta + 1))
                        if theta < 0:
                            t = -t
                    c = one / gmpy2.sqrt(t * t + 1)
                    s = t * c
                    ai, aj = a[i], a[j]
                    for k in range(n):
                        if k == i or k == j:
                            continue
                        aik, ajk = ai[k], aj[k]
                        ai[k] = c * aik - s * ajk
                        aj[k] = s * aik + c * ajk
                        a[k][i] = ai[k]
                        a[k][j] = aj[k]
                    aii, ajj = ai[i], aj[j]
                    ai[i] = aii - t * apq
                    aj[j] = ajj + t * apq
                    ai[j] = mpfr(0)
                    aj[i] = mpfr(0)
                    for k in range(n):
                        qk = q[k]
                        qki, qkj = qk[i], qk[j]
                        qk[i] = c * qki - s * qkj
                        qk[j] = s * qki + c * qkj
        if not converged:
            raise NonConvergence(
                f"Jacobi did not reach tol={float(tol):.3e} within "
                f"{max_sweeps} sweeps at {digits} digits")

        order = sorted(range(n), key=lambda k: (a[k][k], k))
        eigenvalues = [a[k][k] for k in order]
        qdata = [q[i][k] for i in range(n) for k in order]
    return SymmetricEigen(eigenvalues, BigMatrix(n, n, digits, qdata), digits)


def _mgs_project_out(v, basis, digits):
    """Two-pass modified Gram-Schmidt of v against an orthonormal basis."""
    for _ in range(2):
        for b in basis:
            coef = mpfr(0)
            for x, y in zip(v, b):
                coef = coef + x * y
            if coef != 0:
                v = [x - coef * y for x, y in zip(v, b)]
    return v


def _norm2(v):
    s = mpfr(0)
    for x in v:
        s = s + x * x
    return gmpy2.sqrt(s)


def skew_canonical(s: BigMatrix, tol=None):
    """Canonical form of a skew-symmetric matrix.

    Works through the symmetric positive semidefinite matrix T = -S^2:
    each rotation angle theta appears in T as a doubly degenerate
    eigenvalue theta^2, and for any unit vector u in that eigenspace the
    pair (u, -S u / theta) spans an S-invariant plane on which S takes the
    canonical block form.  Pairing the Jacobi eigenvectors of T this way
    inherits the eigensolver's determinism.  Vectors whose image under S
    has norm at most `tol` are collected into the trailing zero block.
    """
    _check_skew(s)
    n = s.rows
    digits = s.digits
    if tol is not None and not isinstance(tol, mpfr):
        tol = getattr(tol, "value", tol)

    with working_precision(digits):
        if tol is None:
            tol = default_tolerance(s)
        elif tol <= 0:
            raise ValueError("tol must be positive")
        ssq = s @ s
        t_entries = []
        half = mpfr("0.5")
        for i in range(n):
            for j in range(n):
                t_entries.append(-half * (ssq.data[i * n + j] + ssq.data[j * n + i]))
        t = BigMatrix(n, n, digits, t_entries, symmetric=True)
        eig = jacobi_eigen_sym(t)

        basis = []          # accepted orthonormal columns, in output order
        pairs = []
        zero_vectors = []
        qt = eig.q
        for idx in range(n):
            u = [qt.data[r * n + idx] for r in range(n)]
            u = _mgs_project_out(u, basis, digits)
            nrm = _norm2(u)
            if nrm < half:
                continue  # partner of an already-extracted pair
            inv = 1 / nrm
            u = [x * inv for x in u]
            su = s.matvec(u)
            theta = _norm2(su)
            if theta <= tol:
                zero_vectors.append(u)
                basis.append(u)
            else:
                inv = -1 / theta
                w = [x * inv for x in su]
                w = _mgs_project_out(w, basis + [u], digits)
                wn = _norm2(w)
                if wn < half:
                    raise NonConvergence(
                        "pairing of skew eigenvectors collapsed; "
                        "input may not be skew or precision is too low")
                inv = 1 / wn
                w = [x * inv for x in w]
                pairs.append((theta, u, w))
                basis.append(u)
                basis.append(w)

        if 2 * len(pairs) + len(zero_vectors) != n:
            raise NonConvergence("skew canonical pairing did not span the space")
        pairs.sort(key=lambda p: p[0])

        qdata = [mpfr(0)] * (n * n)
        col = 0
        for _theta, u, w in pairs:
            for r in range(n):
                qdata[r * n + col] = u[r]
                qdata[r * n + col + 1] = w[r]
            col += 2
        for z in zero_vectors:
            for r in range(n):
                qdata[r * n + col] = z[r]
            col += 1
        thetas = [p[0] for p in pairs]
    return SkewCanonical(thetas, BigMatrix(n, n, digits, qdata),
                         len(zero_vectors), digits)


def orthogonal_function_of_skew(s: BigMatrix, f_cos, f_sin,
                                tol=None, canonical=None):
    """Q blockdiag(R(g(theta_k))) Q^T for a skew matrix S.

    `f_cos` and `f_sin` receive the rotation angle theta (an mpfr, >= 0)
    and must return cos(g(theta)) and sin(g(theta)) for the desired odd
    function g.  On the zero block the result acts as the identity, which
    is consistent with any odd g.  Pass `canonical` to reuse a previously
    computed decomposition (e.g. for evaluating g and -g on the same S).
    """
    canon = canonical if canonical is not None else skew_canonical(s, tol)
    n = s.rows
    digits = min(s.digits, canon.digits)
    q = canon.q
    with working_precision(digits):
        # columns of Q * blockdiag(R); R(phi) = [[cos, sin], [-sin, cos]]
        qd = [mpfr(0)] * (n * n)
        for k, theta in enumerate(canon.thetas):
            c = mpfr(f_cos(theta))
            sn = mpfr(f_sin(theta))
            cu, cw = 2 * k, 2 * k + 1
            for r in range(n):
                qu = q.data[r * n + cu]
                qw = q.data[r * n + cw]
                qd[r * n + cu] = c * qu - sn * qw
                qd[r * n + cw] = sn * qu + c * qw
        for col in range(2 * len(canon.thetas), n):
            for r in range(n):
                qd[r * n + col] = q.data[r * n + col]
    qdm = BigMatrix(n, n, digits, qd)
    return qdm @ q.transpose()


def spectral_map_sym(m: BigMatrix, f, eigen=None):
    """Q diag(f(lambda)) Q^T for symmetric M; f maps mpfr -> mpfr."""
    eig = eigen if eigen is not None else jacobi_eigen_sym(m)
    n = m.rows
    digits = min(m.digits, eig.digits)
    q = eig.q
    with working_precision(digits):
        fvals = [mpfr(f(lam)) for lam in eig.eigenvalues]
        qd = [q.data[r * n + k] * fvals[k] for r in range(n) for k in range(n)]
    return BigMatrix(n, n, digits, qd) @ q.transpose()


def artanh_scalar(x):
    """artanh as (log1p(x) - log1p(-x)) / 2; stable near +-1 given digits."""
    return (gmpy2.log1p(x) - gmpy2.log1p(-x)) / 2


def artanh_sym(m: BigMatrix, margin_floor=None, eigen=None):
    """Spectral artanh of a symmetric matrix with spectrum inside (-1, 1).

    Returns (matrix, margin) where margin = min_k(1 - |lambda_k|).  Raises
    SpectrumOutOfRange when the margin does not exceed `margin_floor`
    (default 10**(-p/2)); beyond that floor the artanh values carry no
    meaningful digits at precision p, so raising beats silently clamping.
    """
    eig = eigen if eigen is not None else jacobi_eigen_sym(m)
    digits = min(m.digits, eig.digits)
    if margin_floor is not None and not isinstance(margin_floor, mpfr):
        margin_floor = getattr(margin_floor, "value", margin_floor)
    with working_precision(digits):
        if margin_floor is None:
            margin_floor = pow10(-digits / 2, digits)
        margin = min(1 - abs(lam) for lam in eig.eigenvalues)
        if margin <= margin_floor:
            raise SpectrumOutOfRange(
                f"spectral margin {float(margin):.3e} is at or below the floor "
                f"{float(margin_floor):.3e}; increase the working precision "
                f"(currently {digits} digits)",
                margin=margin, digits=digits)
        out = spectral_map_sym(m, artanh_scalar, eigen=eig)
    return out, margin


def tanh_sym(m: BigMatrix, eigen=None):
    """Spectral tanh of a symmetric matrix (round-trip partner of artanh_sym)."""
    return spectral_map_sym(m, gmpy2.tanh, eigen=eigen)
