"""Scalar special functions needed by the kernel antiderivatives.

Only the exponential integral E1 is nonstandard enough to spell out: it is
computed by the classic split between the convergent power series at small
argument and a continued fraction at large argument, both evaluated at the
caller's working precision.
"""

from __future__ import annotations

import gmpy2
from gmpy2 import mpfr

from .errors import DomainError
from .precision import pow10, working_precision

SERIES_CUTOFF = 4  # series below, continued fraction above


def exp_integral_e1(x, digits: int):
    """E1(x) = int_x^inf exp(-t)/t dt for x > 0.

    Power series  E1(x) = -gamma - log x + sum_{k>=1} (-1)^{k+1} x^k / (k k!)
    for x <= 4; modified Lentz continued fraction otherwise.  The series
    region loses at most ~x/ln(10) digits to cancellation, which the guard
    precision below absorbs.
    """
    guard = digits + 12
    with working_precision(guard):
        x = mpfr(x)
        if x <= 0:
            raise DomainError(f"E1 requires a positive argument, got {x}")
        eps = pow10(-(digits + 6), guard)
        if x <= SERIES_CUTOFF:
            total = -gmpy2.const_euler() - gmpy2.log(x)
            term = mpfr(1)
            k = 0
            while True:
                k += 1
                term = term * (-x) / k
                contrib = -term / k
                total = total + contrib
                if abs(contrib) < eps * abs(total):
                    break
                if k > 10000:
                    raise DomainError("E1 series failed to converge")
            result = total
        else:
            # E1(x) = exp(-x) / (x + 1/(1 + 1/(x + 2/(1 + 2/(x + ...)))))
            tiny = pow10(-2 * guard, guard)
            b = x + 1
            c = 1 / tiny
            d = 1 / b
            h = d
            for k in range(1, 20000):
                a = -(k * k)
                b = b + 2
                d = a * d + b
                if d == 0:
                    d = tiny
                c = b + a / c
                if c == 0:
                    c = tiny
                d = 1 / d
                delta = c * d
                h = h * delta
                if abs(delta - 1) < eps:
                    break
            else:
                raise DomainError("E1 continued fraction failed to converge")
            result = h * gmpy2.exp(-x)
    with working_precision(digits):
        return result + 0


def gauss_cell_integral(center, sigma, a, b, digits: int):
    """Integral over [a, b] of the L2-normalized Gaussian centred at `center`.

    Closed form via the error function:
    (pi sigma^2)^(-1/4) * sigma * sqrt(pi/2) * (erf(u_b) - erf(u_a)),
    u = (x - center) / (sqrt(2) sigma).
    """
    with working_precision(digits):
        center = mpfr(center)
        sigma = mpfr(sigma)
        pi = gmpy2.const_pi()
        amp = (pi * sigma * sigma) ** mpfr("-0.25")
        root2 = gmpy2.sqrt(mpfr(2))
        ua = (mpfr(a) - center) / (root2 * sigma)
        ub = (mpfr(b) - center) / (root2 * sigma)
        return amp * sigma * gmpy2.sqrt(pi / 2) * (gmpy2.erf(ub) - gmpy2.erf(ua))
