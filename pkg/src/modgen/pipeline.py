"""The spectral chain from the skew generator to the modular blocks.

One run assembles the generator S, forms the quarter rotations
exp(+-S/4) through the skew canonical form, builds the symmetric contrast
operator B = A^{1/4} chi A^{-1/4} + A^{-1/4} chi A^{1/4} - 1 whose
spectrum must stay strictly inside (-1, 1), and produces the two blocks
M_-+ = 2 A^{-+1/4} artanh(B) A^{-+1/4}.  Eigenvalues of B cluster
exponentially close to +-1 as the resolution grows, which is what drives
the working-precision requirement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import gmpy2
from gmpy2 import mpfr

from .errors import SpectrumOutOfRange
from .geometry import GridSpec, chi_matrix
from .kernels import KernelSpec, assemble_generator
from .linalg import (
    BigMatrix,
    artanh_sym,
    jacobi_eigen_sym,
    orthogonal_function_of_skew,
    skew_canonical,
)
from .precision import bits_for_digits, pow10, working_precision

CYLINDER_DIGITS_PER_CELL = 1.5
MINKOWSKI_DIGITS_PER_CELL = 1.75


def required_digits(n: int, ambient) -> int:
    """Working precision in decimal digits for a resolution-n run."""
    if n < 2:
        raise ValueError("resolution must be at least 2")
    factor = (CYLINDER_DIGITS_PER_CELL if ambient.kind == "cylinder"
              else MINKOWSKI_DIGITS_PER_CELL)
    return math.ceil(factor * n)


def split_sym_skew(m: BigMatrix):
    """Split M into (M + M^T)/2 and (M - M^T)/2 with an exact sum.

    The halves are computed with two guard bits so that both divisions by
    two are exact and Msym + Mskew reproduces M bit for bit.
    """
    if not m.is_square:
        raise ValueError("matrix must be square")
    n = m.rows
    ctx = gmpy2.context(precision=bits_for_digits(m.digits) + 2,
                        trap_invalid=True, trap_overflow=True)
    sym = [mpfr(0)] * (n * n)
    skew = [mpfr(0)] * (n * n)
    with ctx:
        d = m.data
        for i in range(n):
            for j in range(n):
                a = d[i * n + j]
                b = d[j * n + i]
                sym[i * n + j] = (a + b) / 2
                skew[i * n + j] = (a - b) / 2
    return (BigMatrix(n, n, m.digits, sym, symmetric=True),
            BigMatrix(n, n, m.digits, skew, skew=True))


@dataclass
class PipelineOptions:
    digits: int | None = None          # override required_digits
    margin_floor: object = None        # default 10**(-p/2)
    retry_extra_digits: bool = False   # one retry at 1.5x digits on margin failure
    tol: object = None                 # eigensolver tolerance override


@dataclass
class ModularResult:
    """All matrices of one run plus spectral diagnostics."""

    s: BigMatrix
    aq: BigMatrix
    aq_inv: BigMatrix
    b: BigMatrix
    m_minus: BigMatrix
    m_plus: BigMatrix
    spectral_margin: object
    sym_defect: object                 # size of the symmetrization correction to B
    digits: int
    run_meta: dict = field(default_factory=dict)

    MATRIX_NAMES = ("s", "aq", "aq_inv", "b", "m_minus", "m_plus")

    def matrices(self):
        return {name: getattr(self, name) for name in self.MATRIX_NAMES}


def _quarter_rotations(s, canon):
    aq = orthogonal_function_of_skew(
        s, lambda t: gmpy2.cos(t / 4), lambda t: gmpy2.sin(t / 4),
        canonical=canon)
    aq_inv = orthogonal_function_of_skew(
        s, lambda t: gmpy2.cos(t / 4), lambda t: -gmpy2.sin(t / 4),
        canonical=canon)
    return aq, aq_inv


def _contrast_operator(aq, aq_inv, chi, digits):
    with working_precision(digits):
        raw = (aq @ chi @ aq_inv) + (aq_inv @ chi @ aq) \
            - BigMatrix.identity(chi.rows, digits)
    sym, skew_part = split_sym_skew(raw)
    return sym, skew_part.max_norm()


def compute_modular(grid: GridSpec, kernel: KernelSpec,
                    opts: PipelineOptions | None = None) -> ModularResult:
    """Run the full chain S -> exp(+-S/4) -> B -> artanh(B) -> M-+.

    B is explicitly symmetrized before eigensolving (rounding breaks exact
    symmetry, and Jacobi assumes it); the size of that correction is
    recorded.  Eigenvalues at or beyond the margin floor raise
    SpectrumOutOfRange rather than being clamped -- clamping would
    fabricate modular data.  With `retry_extra_digits` the computation is
    repeated once at 1.5x the digits before giving up.
    """
    opts = opts or PipelineOptions()
    digits = opts.digits or required_digits(grid.n, grid.ambient)

    def attempt(digits_now):
        work_grid = grid
        if work_grid.digits != digits_now:
            from .geometry import build_grid  # avoid cycle at import time
            work_grid = build_grid(grid.region, grid.n, digits_now)
        s = assemble_generator(work_grid, kernel)
        chi = chi_matrix(work_grid)
        canon = skew_canonical(s, tol=opts.tol)
        aq, aq_inv = _quarter_rotations(s, canon)
        b, sym_defect = _contrast_operator(aq, aq_inv, chi, digits_now)
        eig = jacobi_eigen_sym(b, tol=opts.tol)
        atb, margin = artanh_sym(b, margin_floor=opts.margin_floor, eigen=eig)
        with working_precision(digits_now):
            m_minus = (aq_inv @ atb @ aq_inv).scale(2)
            m_plus = (aq @ atb @ aq).scale(2)
        return ModularResult(
            s=s, aq=aq, aq_inv=aq_inv, b=b,
            m_minus=m_minus, m_plus=m_plus,
            spectral_margin=margin, sym_defect=sym_defect,
            digits=digits_now,
            run_meta={"kernel": kernel.describe(),
                      "region": grid.region.describe(),
                      "n": grid.n, "digits": digits_now})

    try:
        return attempt(digits)
    except SpectrumOutOfRange:
        if not opts.retry_extra_digits:
            raise
        return attempt(math.ceil(1.5 * digits))


def verify_invariants(result: ModularResult, grid: GridSpec,
                      kernel: KernelSpec) -> dict:
    """Residuals of the structural identities of one run.

    Returns max-norm residuals (as mpfr) for: exact skewness of S, the
    orthogonality of the quarter rotation, the intertwining relation
    M+ = A^{1/2} M- A^{1/2}, and complement duality, where the region is
    swapped with its complement (flipping chi to 1-chi, hence B to -B) and
    the resulting block must be the exact negation of M-.  The duality
    check recomputes the contrast operator and its eigensystem from
    scratch, so it genuinely exercises the eigensolver and artanh chain.
    """
    digits = result.digits
    n = grid.n
    with working_precision(digits):
        ident = BigMatrix.identity(n, digits)
        residuals = {}
        residuals["skewness"] = result.s.max_skew_defect()
        residuals["orthogonality"] = (
            result.aq.transpose() @ result.aq - ident).max_norm()
        a_half = result.aq @ result.aq
        residuals["intertwining"] = (
            result.m_plus - a_half @ result.m_minus @ a_half).max_norm()
        residuals["b_symmetrization"] = result.sym_defect

        # complement duality
        chi_c = ident - chi_matrix(grid)
        raw = (result.aq @ chi_c @ result.aq_inv) \
            + (result.aq_inv @ chi_c @ result.aq) - ident
        b_c, _ = split_sym_skew(raw)
        atb_c, _ = artanh_sym(b_c)
        m_minus_c = (result.aq_inv @ atb_c @ result.aq_inv).scale(2)
        residuals["complement_duality"] = (
            m_minus_c + result.m_minus).max_norm()
        residuals["m_minus_norm"] = result.m_minus.max_norm()
    return residuals
