"""Spatial grids, the orthonormal box-function basis, and region projectors.

A grid partitions the spatial slice [-b, b] (Minkowski with cutoff b, or
one period of the circle) into n cells, half of them tiling the region of
interest, half its complement.  The basis function on cell i is the
indicator normalized by (width)^(-1/2), so the basis is exactly
orthonormal and the region projector is a diagonal 0/1 matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import gmpy2
from gmpy2 import mpfr

from .errors import InvalidRegion
from .linalg import BigMatrix
from .precision import from_decimal, working_precision
from .quadrature import integrate


@dataclass(frozen=True)
class Minkowski:
    """Spatial slice (-cutoff, cutoff) of the line; values are decimal strings."""

    cutoff: str

    kind = "minkowski"

    def half_width(self, digits):
        return from_decimal(self.cutoff, digits)

    def describe(self):
        return f"minkowski(cutoff={self.cutoff})"


@dataclass(frozen=True)
class Cylinder:
    """Spatial circle of circumference `period`, coordinates in [-l/2, l/2)."""

    period: str

    kind = "cylinder"

    def period_value(self, digits):
        return from_decimal(self.period, digits)

    def half_width(self, digits):
        with working_precision(digits):
            return self.period_value(digits) / 2

    def describe(self):
        return f"cylinder(period={self.period})"


_VALIDATION_DIGITS = 60


@dataclass(frozen=True)
class RegionSpec:
    """A union of disjoint open intervals on the spatial slice.

    Interval endpoints are decimal strings so that a region can be carried
    across runs at different working precisions without re-rounding drift.
    """

    intervals: tuple
    ambient: object

    def __post_init__(self):
        if not self.intervals:
            raise InvalidRegion("region must contain at least one interval")
        ivs = tuple((str(a), str(b)) for a, b in self.intervals)
        object.__setattr__(self, "intervals", ivs)
        with working_precision(_VALIDATION_DIGITS):
            vals = [(from_decimal(a, _VALIDATION_DIGITS),
                     from_decimal(b, _VALIDATION_DIGITS)) for a, b in ivs]
            half = self.ambient.half_width(_VALIDATION_DIGITS)
            prev_end = None
            for a, b in vals:
                if not a < b:
                    raise InvalidRegion(f"degenerate interval [{a}, {b}]")
                if prev_end is not None and not prev_end < a:
                    raise InvalidRegion("intervals must be sorted and disjoint")
                prev_end = b
            lo, hi = vals[0][0], vals[-1][1]
            if self.ambient.kind == "cylinder":
                if lo < -half or hi > half:
                    raise InvalidRegion("region leaves the fundamental domain")
            else:
                if lo < -half or hi > half:
                    raise InvalidRegion("region leaves the cutoff domain")
            total = sum((b - a for a, b in vals), mpfr(0))
            if not total < 2 * half:
                raise InvalidRegion("region complement must be nonempty")

    def interval_values(self, digits):
        return [(from_decimal(a, digits), from_decimal(b, digits))
                for a, b in self.intervals]

    def describe(self):
        ivs = ";".join(f"{a},{b}" for a, b in self.intervals)
        return f"region[{ivs}]@{self.ambient.describe()}"


@dataclass(frozen=True)
class GridPolicy:
    """How complement cells are spaced.

    outside: "linear", "geometric", or "auto" (linear when the region
    touches the domain boundary or the ambient is a cylinder, geometric
    otherwise).  growth: width ratio between consecutive complement cells
    moving away from the region, as a decimal string.
    """

    outside: str = "auto"
    growth: str = "1.2"


class GridSpec:
    """Cell boundaries, normalizers, and the region mask of one grid."""

    def __init__(self, boundaries, region_mask, digits, region):
        self.boundaries = boundaries
        self.region_mask = region_mask
        self.digits = digits
        self.region = region
        with working_precision(digits):
            self.normalizers = [
                1 / gmpy2.sqrt(boundaries[i + 1] - boundaries[i])
                for i in range(len(region_mask))
            ]

    @property
    def n(self):
        return len(self.region_mask)

    @property
    def ambient(self):
        return self.region.ambient

    def cell(self, i):
        return self.boundaries[i], self.boundaries[i + 1]

    def width(self, i):
        with working_precision(self.digits):
            return self.boundaries[i + 1] - self.boundaries[i]

    def max_region_cell_width(self):
        widths = [self.width(i) for i in range(self.n) if self.region_mask[i]]
        return max(widths)

    def tiling_defect(self):
        """|sum of widths - domain length|; zero for dyadic grids."""
        with working_precision(self.digits):
            total = sum((self.width(i) for i in range(self.n)), mpfr(0))
            length = 2 * self.ambient.half_width(self.digits)
            return abs(total - length)


def _allocate(counts_total, widths, digits):
    """Split counts_total cells over pieces proportionally to width.

    Remainder cells go to the widest piece (first among ties), which keeps
    the allocation deterministic.
    """
    with working_precision(digits):
        total_width = sum(widths, mpfr(0))
        base = [int(counts_total * (w / total_width)) for w in widths]
    rem = counts_total - sum(base)
    if rem:
        widest = max(range(len(widths)), key=lambda k: (widths[k], -k))
        base[widest] += rem
    if any(c < 1 for c in base):
        raise InvalidRegion(
            "resolution too low to give every interval at least one cell")
    return base


def _linear_boundaries(a, b, count):
    pts = [a + (b - a) * k / count for k in range(1, count)]
    return pts


def _geometric_boundaries(a, b, count, growth, away_from):
    """Interior boundaries of [a, b] with widths growing geometrically.

    `away_from` is "left" when the region adjoins the left edge a (widths
    grow rightward) and "right" in the mirrored case.  Widths are scaled
    so the piece is tiled exactly; the last boundary is pinned to the end.
    """
    weights = [growth**k for k in range(count)]
    total = sum(weights, mpfr(0))
    length = b - a
    pts = []
    if away_from == "left":
        acc = a
        for w in weights[:-1]:
            acc = acc + length * (w / total)
            pts.append(acc)
    else:
        acc = b
        rev = []
        for w in weights[:-1]:
            acc = acc - length * (w / total)
            rev.append(acc)
        pts = list(reversed(rev))
    return pts


def build_grid(region: RegionSpec, n: int, digits: int,
               policy: GridPolicy = GridPolicy()) -> GridSpec:
    """Build the grid with n/2 cells inside the region and n/2 outside.

    Region endpoints always coincide with cell boundaries.  Inside cells
    are linearly spaced per interval; complement spacing follows `policy`.
    """
    if n < 2 or n % 2:
        raise InvalidRegion(f"resolution must be even and >= 2, got {n}")
    ambient = region.ambient

    with working_precision(digits):
        half = ambient.half_width(digits)
        ivs = region.interval_values(digits)
        growth = from_decimal(policy.growth, digits)

        # Complement pieces in coordinate order, tagged with which side
        # faces the region: "left"/"right" edge pieces of the line, or
        # "gap" between two intervals (cylinder pieces are all gaps on the
        # circle, but keep their coordinate layout).
        pieces = []
        if ivs[0][0] > -half:
            pieces.append(("edge-left", -half, ivs[0][0]))
        for (a0, b0), (a1, _b1) in zip(ivs, ivs[1:]):
            pieces.append(("gap", b0, a1))
        if ivs[-1][1] < half:
            pieces.append(("edge-right", ivs[-1][1], half))
        if not pieces:
            raise InvalidRegion("region complement is empty")

        touches_boundary = ivs[0][0] == -half or ivs[-1][1] == half
        mode = policy.outside
        if mode == "auto":
            if ambient.kind == "cylinder" or touches_boundary:
                mode = "linear"
            else:
                mode = "geometric"

        in_counts = _allocate(n // 2, [b - a for a, b in ivs], digits)
        out_counts = _allocate(n // 2, [b - a for _, a, b in pieces], digits)

        # assemble segments in coordinate order
        segments = []
        for (a, b), cnt in zip(ivs, in_counts):
            segments.append((a, b, cnt, True, "in"))
        for (tag, a, b), cnt in zip(pieces, out_counts):
            segments.append((a, b, cnt, False, tag))
        segments.sort(key=lambda s: s[0])

        boundaries = [segments[0][0]]
        mask = []
        for a, b, cnt, inside, tag in segments:
            if mode == "geometric" and not inside and tag != "gap":
                away = "left" if tag == "edge-right" else "right"
                inner = _geometric_boundaries(a, b, cnt, growth, away)
            else:
                inner = _linear_boundaries(a, b, cnt)
            boundaries.extend(inner)
            boundaries.append(b)
            mask.extend([inside] * cnt)

    return GridSpec(boundaries, mask, digits, region)


def chi_matrix(grid: GridSpec) -> BigMatrix:
    """Diagonal projector: 1 on region cells, 0 on complement cells."""
    n = grid.n
    data = [mpfr(0)] * (n * n)
    one = mpfr(1)
    for i, inside in enumerate(grid.region_mask):
        if inside:
            data[i * n + i] = one
    return BigMatrix(n, n, grid.digits, data, symmetric=True)


def project_function(grid: GridSpec, h, digits=None):
    """Coefficients <e_k, h> = n_k * integral of h over cell k.

    `h` may expose `cell_integral(a, b)` (analytic antiderivative, e.g.
    the Gaussian test functions) and is integrated by adaptive quadrature
    otherwise.  Returns a list of mpfr, one per cell.
    """
    digits = digits or grid.digits
    out = []
    cell_integral = getattr(h, "cell_integral", None)
    with working_precision(digits):
        for k in range(grid.n):
            a, b = grid.cell(k)
            if cell_integral is not None:
                val = cell_integral(a, b)
            else:
                val = integrate(h, a, b, digits)
            out.append(grid.normalizers[k] * val)
    return out
