"""Kernel antiderivatives and assembly of the skew generator matrix.

The generator acts by convolution with an odd kernel: principal value
1/(x-y) damped by exp(-m|x-y|) on the line, and cot / csc forms with a
hyperbolic mass correction on the circle (periodic xi=0, antiperiodic
xi=1).  Matrix entries over box cells reduce to a four-point combination
of F(x) = x F0(x) - F1(x), where F0 and F1 are the first and the
t-weighted antiderivatives of the kernel.  Only F enters the matrix, so
the choice of the upper integration bound r drops out.
"""

from __future__ import annotations

from dataclasses import dataclass

import gmpy2
from gmpy2 import mpfr

from .errors import DomainError, InvalidRegion
from .geometry import Cylinder, GridSpec, Minkowski
from .linalg import BigMatrix
from .precision import from_decimal, pow10, working_precision
from .quadrature import integrate
from .special import exp_integral_e1


@dataclass(frozen=True)
class KernelSpec:
    """Which generator kernel to discretize.

    mass is a decimal string (>= 0); xi selects periodic (0) or
    antiperiodic (1) boundary conditions and is meaningful on the
    cylinder only.
    """

    ambient: object
    mass: str = "0"
    xi: int = 0

    def __post_init__(self):
        if self.xi not in (0, 1):
            raise ValueError(f"xi must be 0 or 1, got {self.xi}")
        object.__setattr__(self, "mass", str(self.mass))
        if from_decimal(self.mass, 30) < 0:
            raise ValueError("mass must be nonnegative")

    @property
    def is_massless(self):
        return from_decimal(self.mass, 30) == 0

    def mass_value(self, digits):
        return from_decimal(self.mass, digits)

    def mu(self, digits):
        """m * l / (2 pi), the dimensionless mass on the cylinder."""
        if self.ambient.kind != "cylinder":
            raise ValueError("mu is defined on the cylinder only")
        with working_precision(digits):
            l = self.ambient.period_value(digits)
            return self.mass_value(digits) * l / (2 * gmpy2.const_pi())

    def antiderivatives(self, digits):
        if self.ambient.kind == "minkowski":
            return antiderivatives_minkowski(self.mass, digits)
        if self.is_massless:
            return antiderivatives_cylinder_massless(
                self.ambient.period, self.xi, digits)
        return antiderivatives_cylinder_massive(
            self.ambient.period, self.xi, self.mass, digits)

    def describe(self):
        if self.ambient.kind == "minkowski":
            return f"{self.ambient.describe()},m={self.mass}"
        return f"{self.ambient.describe()},m={self.mass},xi={self.xi}"


class FPair:
    """Antiderivative pair (F0, F1) plus the combination F consumed downstream.

    F(x) = x F0(x) - F1(x); endpoint arguments where F0 or F1 diverge
    individually (x = 0 always, x = period on the circle) are served from
    their finite limits.  F values are cached per exact argument.
    """

    def __init__(self, f0, f1, r, f_at_zero, digits, f_at_period=None,
                 period=None, mass_correction=None, core=None):
        self._f0 = f0
        self._f1 = f1
        self.r = r
        self.digits = digits
        self._f_at_zero = f_at_zero
        self._f_at_period = f_at_period
        self._period = period
        self._mass_correction = mass_correction
        # x F0 - F1 away from endpoints; the massive circle kernel passes
        # the massless core here because its own f0/f1 already contain the
        # mass correction that `mass_correction` accounts for separately
        self._core = core if core is not None else (
            lambda x: x * self._f0(x) - self._f1(x))
        self._cache = {}

    def f0(self, x):
        with working_precision(self.digits):
            return self._f0(mpfr(x))

    def f1(self, x):
        with working_precision(self.digits):
            return self._f1(mpfr(x))

    def _mass_term(self, x):
        if self._mass_correction is None:
            return mpfr(0)
        return self._mass_correction(x)

    def combined(self, x):
        """F(x) for x >= 0 (up to the period on the circle)."""
        key = x
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        with working_precision(self.digits):
            x = mpfr(x)
            if x < 0:
                raise DomainError("F is evaluated at nonnegative arguments only")
            if x == 0:
                val = self._f_at_zero() + self._mass_term(x)
            elif self._period is not None and x == self._period:
                val = self._f_at_period() + self._mass_term(x)
            else:
                val = self._core(x) + self._mass_term(x)
        self._cache[key] = val
        return val


def antiderivatives_minkowski(mass, digits, r=None) -> FPair:
    """Line kernel antiderivatives.

    m > 0: F0(x) = E1(m x), F1(x) = exp(-m x)/m, upper bound at infinity.
    m = 0: F0(x) = log(r) - log(x), F1(x) = r - x with r = 1 by default;
    any other r shifts F by an affine function of x, which cancels in the
    four-point entry combination.
    """
    with working_precision(digits):
        m = from_decimal(str(mass), digits)
        if m < 0:
            raise DomainError("mass must be nonnegative")
        if m == 0:
            rv = from_decimal(str(r) if r is not None else "1", digits)
            if rv <= 0:
                raise DomainError("r must be positive for the massless kernel")

            def f0(x):
                if x <= 0:
                    raise DomainError("F0 requires x > 0")
                return gmpy2.log(rv) - gmpy2.log(x)

            def f1(x):
                return rv - x

            return FPair(f0, f1, rv, lambda: -rv, digits)

        if r is not None:
            raise DomainError("the massive line kernel fixes r at infinity")

        def f0(x):
            if x <= 0:
                raise DomainError("F0 requires x > 0")
            return exp_integral_e1(x * m, digits)

        def f1(x):
            return gmpy2.exp(-m * x) / m

        return FPair(f0, f1, None, lambda: -1 / m, digits)


def antiderivatives_cylinder_massless(period, xi, digits) -> FPair:
    """Circle kernel antiderivatives at m = 0, upper bound r = l/2.

    F0 is closed-form; F1 integrates the smooth t cot t (xi = 0) or
    t csc t (xi = 1) profile by adaptive quadrature.  At x = l both F0 and
    F1 diverge logarithmically while F stays finite; the limits
    (l/2) log 2 (xi = 0) and -2 l G / pi (xi = 1, G Catalan's constant)
    follow from integrating F by parts into a log-sin / log-tan integral.
    """
    with working_precision(digits):
        l = from_decimal(str(period), digits)
        if l <= 0:
            raise DomainError("period must be positive")
        pi = gmpy2.const_pi()
        half_pi = pi / 2

        if xi == 0:
            def f0(x):
                if not 0 < x < l:
                    raise DomainError("F0 requires 0 < x < period")
                return -gmpy2.log(abs(gmpy2.sin(pi * x / l)))

            def profile(t):
                return t / gmpy2.tan(t)

            def f_at_period():
                return l * gmpy2.log(mpfr(2)) / 2
        else:
            def f0(x):
                if not 0 < x < l:
                    raise DomainError("F0 requires 0 < x < period")
                return -gmpy2.log(abs(gmpy2.tan(pi * x / (2 * l))))

            def profile(t):
                return t / gmpy2.sin(t)

            def f_at_period():
                return -2 * l * gmpy2.const_catalan() / pi

        def f1(x):
            return (l / pi) * integrate(profile, pi * x / l, half_pi, digits)

        def f_at_zero():
            return -f1(mpfr(0))

        return FPair(f0, f1, l / 2, f_at_zero, digits,
                     f_at_period=f_at_period, period=l)


def mass_correction_integrand(period, xi, digits):
    """The kernel-level mass-derivative profile s(m, u), u = x - y.

    s(m, u) = sinh(m(l/2 - |u|)) / sinh(m l/2) for xi = 0 and
    cosh(m(l/2 - |u|)) / cosh(m l/2) for xi = 1, extended continuously to
    m -> 0+ by 1 - 2|u|/l and 1 respectively.
    """
    with working_precision(digits):
        l = from_decimal(str(period), digits)
        tiny = pow10(-2 * digits, digits)

        def s(m, u):
            u = abs(u)
            if m <= tiny:
                return 1 - 2 * u / l if xi == 0 else mpfr(1)
            if xi == 0:
                return gmpy2.sinh(m * (l / 2 - u)) / gmpy2.sinh(m * l / 2)
            return gmpy2.cosh(m * (l / 2 - u)) / gmpy2.cosh(m * l / 2)

        return s


def antiderivatives_cylinder_massive(period, xi, mass, digits) -> FPair:
    """Circle kernel antiderivatives at m > 0.

    F_n(x) = F_n(x; m=0) + integral_0^m f_n(mt, x) dmt with smooth
    hyperbolic integrands; the combination x f0 - f1 that downstream code
    consumes has its own integrand evaluated directly to avoid the
    cancellation between the two terms.  Integrands run at a guard
    precision because (sinh(mt a)/mt - a) loses digits as mt -> 0.
    """
    base = antiderivatives_cylinder_massless(period, xi, digits)
    guard = digits + max(16, digits // 4)
    with working_precision(digits):
        l = from_decimal(str(period), digits)
        m = from_decimal(str(mass), digits)
        if m <= 0:
            raise DomainError("use the massless antiderivatives for m = 0")
        tiny = pow10(-digits, digits)

    def f0_integrand(mt, x):
        a = l / 2 - x
        if mt <= tiny:
            return -a * a / l if xi == 0 else -a
        if xi == 0:
            sh = gmpy2.sinh(mt * a / 2)
            return -2 * sh * sh / (mt * gmpy2.sinh(mt * l / 2))
        return -gmpy2.sinh(mt * a) / (mt * gmpy2.cosh(mt * l / 2))

    def comb_integrand(mt, x):
        # x f0 - f1 under the mass integral
        a = l / 2 - x
        if mt <= tiny:
            return a**3 / (3 * l) if xi == 0 else a * a / 2
        if xi == 0:
            return (gmpy2.sinh(mt * a) / mt - a) / (mt * gmpy2.sinh(mt * l / 2))
        sh = gmpy2.sinh(mt * a / 2)
        return 2 * sh * sh / (mt * mt * gmpy2.cosh(mt * l / 2))

    def f0(x):
        with working_precision(digits):
            corr = integrate(lambda mt: f0_integrand(mt, x), 0, m, guard)
            return base.f0(x) + corr

    def f1(x):
        with working_precision(digits):
            x = mpfr(x)
            corr = integrate(
                lambda mt: x * f0_integrand(mt, x) - comb_integrand(mt, x),
                0, m, guard)
            return base.f1(x) + corr

    def mass_term(x):
        with working_precision(digits):
            return integrate(lambda mt: comb_integrand(mt, x), 0, m, guard) + 0

    return FPair(f0, f1, base.r,
                 base._f_at_zero, digits,
                 f_at_period=base._f_at_period, period=base._period,
                 mass_correction=mass_term, core=base._core)


def kernel_value(kernel: KernelSpec, x, y, digits):
    """Direct evaluation of the convolution kernel at x != y.

    Used by demonstrations and test oracles; matrix assembly goes through
    the antiderivative route instead.
    """
    with working_precision(digits):
        x, y = mpfr(x), mpfr(y)
        u = x - y
        if u == 0:
            raise DomainError("kernel is singular on the diagonal")
        if kernel.ambient.kind == "minkowski":
            m = kernel.mass_value(digits)
            return gmpy2.exp(-m * abs(u)) / u
        l = kernel.ambient.period_value(digits)
        pi = gmpy2.const_pi()
        if kernel.xi == 0:
            base = (pi / l) / gmpy2.tan(pi * u / l)
        else:
            base = (pi / l) / gmpy2.sin(pi * u / l)
        if kernel.is_massless:
            return base
        m = kernel.mass_value(digits)
        s = mass_correction_integrand(kernel.ambient.period, kernel.xi, digits)
        sgn = mpfr(1) if u > 0 else mpfr(-1)
        corr = integrate(lambda mt: s(mt, u), 0, m, digits)
        return base - sgn * corr


def assemble_generator(grid: GridSpec, kernel: KernelSpec) -> BigMatrix:
    """Discretize the kernel into the skew-symmetric generator matrix.

    Entry (i, j), i < j, is n_i n_j [F(b_j - a_i) - F(b_j - b_i)
    - F(a_j - a_i) + F(a_j - b_i)]; the lower triangle is the exact
    negation and the diagonal is exactly zero (principal value of an odd
    kernel over a symmetric cell).  F values are cached per distinct
    boundary difference, which collapses the cost on uniform grids.
    """
    if grid.ambient != kernel.ambient:
        raise InvalidRegion("grid and kernel ambient spacetimes differ")
    digits = grid.digits
    fp = kernel.antiderivatives(digits)
    n = grid.n
    bnd = grid.boundaries
    norm = grid.normalizers
    data = [mpfr(0)] * (n * n)
    with working_precision(digits):
        for i in range(n):
            ai, bi = bnd[i], bnd[i + 1]
            for j in range(i + 1, n):
                aj, bj = bnd[j], bnd[j + 1]
                val = norm[i] * norm[j] * (
                    fp.combined(bj - ai) - fp.combined(bj - bi)
                    - fp.combined(aj - ai) + fp.combined(aj - bi))
                data[i * n + j] = val
                data[j * n + i] = -val
    return BigMatrix(n, n, digits, data, skew=True)
