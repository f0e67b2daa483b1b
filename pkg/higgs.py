"""
Parabolic Higgs data attached to hyperpolygon points

On the trivial rank-2 bundle over CP^1 with marked points x_1..x_n in the
affine chart, a level-set point (y, z) gives quasiparabolic lines
l_i = span(z_i) and the Higgs field

    M(x) dx,   M(x) = sum_i R_i / (x - x_i),   R_i = z_i ⊗ y_i.

This module builds that data, checks its invariants, finds the
Higgs-invariant line subbundles and decides parabolic stability with
weights {alpha_i, 0}.
"""

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import floor

from scalar_linalg import (
    EXACT,
    APPROX,
    DenseMatrix,
    Matrix2,
    Vector2,
    format_rational,
    inverse2,
    is_zero,
    mat_add,
    mat_apply,
    mat_mul,
    mat_scale,
    mat_sub,
    matrix_is_zero,
    matrix_norm,
    one,
    outer,
    parallel,
    rank,
    scalar_mode,
    scalar_to_json,
    to_scalar,
    vector_is_zero,
    vector_norm,
    zero,
    zero_matrix2,
)
from polyrat import Polynomial, RationalFunction, poly_gcd, pole_order, rf_is_square
from hyperpolygon import is_in_level_set
from hyperpoly_errors import (
    ConfigError,
    ExactModeRequired,
    HiggsInvariantError,
    LevelSetError,
    PoleError,
    StabilityError,
)

# Returned by invariant_line_subbundles when the Higgs field vanishes
ALL_INVARIANT = 'all-invariant'

# Largest n for the subset scan used when the Higgs field vanishes
MAX_ZERO_FIELD_N = 10

STABILITY_CONVENTION = (
    "stable iff pardeg(L) < pardeg(E)/2 for every Higgs-invariant line subbundle L; "
    "weights {alpha_i, 0} at x_i, flag line l_i = span(z_i)"
)


@dataclass(frozen=True)
class MarkedPoints:
    """Distinct points x_1..x_n of the affine chart."""

    values: tuple

    def __post_init__(self):
        values = tuple(self.values)
        object.__setattr__(self, 'values', values)
        if len(values) < 3:
            raise ConfigError(f"need at least 3 marked points, got {len(values)}")
        scale = max(1.0, max(abs(x) for x in values))
        for i, j in itertools.combinations(range(len(values)), 2):
            if is_zero(values[i] - values[j], scale):
                raise ConfigError(f"marked points x_{i + 1} and x_{j + 1} coincide")

    @classmethod
    def parse(cls, text, mode=EXACT):
        """Parse "0,1,2,3" (entries may be "p/q")."""
        try:
            return cls(tuple(to_scalar(part.strip(), mode) for part in text.split(',') if part.strip()))
        except (ValueError, ZeroDivisionError) as e:
            raise ConfigError(f"cannot parse marked points '{text}': {e}")

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def __getitem__(self, i):
        return self.values[i]


def default_points(n, mode=EXACT):
    """x_i = i - 1."""
    return MarkedPoints(tuple(to_scalar(i, mode) for i in range(n)))


@dataclass(frozen=True)
class HiggsData:
    """Marked points, weights, flag lines and residues of a strongly parabolic Higgs field."""

    points: MarkedPoints
    weights: tuple
    lines: tuple
    residues: tuple

    def __post_init__(self):
        object.__setattr__(self, 'lines', tuple(Vector2(*v) for v in self.lines))
        object.__setattr__(self, 'residues', tuple(Matrix2(*r) for r in self.residues))
        n = len(self.points)
        if not (len(self.weights) == len(self.lines) == len(self.residues) == n):
            raise ValueError(
                f"inconsistent sizes: {n} points, {len(self.weights)} weights, "
                f"{len(self.lines)} lines, {len(self.residues)} residues"
            )
        for i, v in enumerate(self.lines, 1):
            if vector_is_zero(v):
                raise ValueError(f"line l_{i} must be spanned by a nonzero vector")

    @property
    def n(self):
        return len(self.points)

    @property
    def mode(self):
        entries = list(self.points) + [x for v in self.lines for x in v] + [x for r in self.residues for x in r]
        return EXACT if all(scalar_mode(x) == EXACT for x in entries) else APPROX

    def scale(self):
        return max([1.0] + [matrix_norm(r) for r in self.residues])


@dataclass(frozen=True)
class LineSubbundle:
    """
    Saturated line subbundle O(-k) generated by the section x -> (p(x), q(x)).

    p and q are coprime and degree = max(deg p, deg q).
    """

    degree: int
    p: Polynomial
    q: Polynomial

    def at(self, x0):
        return Vector2(self.p(x0), self.q(x0))

    def through(self, h):
        """Indices i (0-based) with section(x_i) spanning l_i."""
        return tuple(i for i, (x, line) in enumerate(zip(h.points, h.lines)) if parallel(self.at(x), line))

    def to_dict(self, h=None):
        data = {
            "degree": self.degree,
            "p": [scalar_to_json(c) for c in self.p.coeffs],
            "q": [scalar_to_json(c) for c in self.q.coeffs],
        }
        if h is not None:
            data["through"] = [i + 1 for i in self.through(h)]
        return data


# ---------------------------------------------------------------------------
# Construction and invariants
# ---------------------------------------------------------------------------

def to_higgs(p, pts, alpha):
    """
    Higgs data of a level-set point: l_i = span(z_i), R_i = z_i ⊗ y_i.

    Raises:
        LevelSetError: if p is not on the zero level of the moment map
    """
    if len(pts) != p.n or len(alpha) != p.n:
        raise ConfigError(f"point has n = {p.n} but got {len(pts)} marked points and {len(alpha)} weights")
    if not is_in_level_set(p):
        raise LevelSetError("not on moment level set")
    residues = tuple(outer(v, w) for w, v in zip(p.y, p.z))
    return HiggsData(pts, tuple(alpha), p.z, residues)


def evaluate(h, x0):
    """
    M(x0) in the affine trivialization (coefficient of dx).

    Raises:
        PoleError: when x0 is a marked point
    """
    total = zero_matrix2(h.mode)
    x_scale = max(1.0, abs(x0))
    for x, r in zip(h.points, h.residues):
        d = x0 - x
        if is_zero(d, x_scale):
            raise PoleError("pole of Higgs field")
        total = mat_add(total, mat_scale(1 / d, r))
    return total


def _completing_vector(line, mode):
    e0 = Vector2(one(mode), zero(mode))
    return Vector2(zero(mode), one(mode)) if parallel(e0, line) else e0


def check_strong_parabolicity(h):
    """R_i kills l_i, maps C^2 into l_i and squares to zero, for every i."""
    mode = h.mode
    for r, line in zip(h.residues, h.lines):
        scale = max(1.0, matrix_norm(r) * vector_norm(line))
        if not vector_is_zero(mat_apply(r, line), scale):
            return False
        image = mat_apply(r, _completing_vector(line, mode))
        if not vector_is_zero(image, scale) and not parallel(image, line):
            return False
        if not matrix_is_zero(mat_mul(r, r), max(1.0, matrix_norm(r) ** 2)):
            return False
    return True


def residue_sum(h):
    total = zero_matrix2(h.mode)
    for r in h.residues:
        total = mat_add(total, r)
    return total


def is_regular_at_infinity(h):
    """M(x) dx has no pole at infinity iff the residues sum to zero."""
    return matrix_is_zero(residue_sum(h), h.scale())


def higgs_polynomial_matrix(h):
    """
    Write M = N / D with D = prod (x - x_j).

    Returns:
        (Matrix2 of Polynomials N, Polynomial D)
    """
    mode = h.mode
    points = list(h.points)
    entries = [Polynomial([], mode) for _ in range(4)]
    for i, r in enumerate(h.residues):
        others = Polynomial.from_roots(points[:i] + points[i + 1:], mode)
        entries = [acc + others * c for acc, c in zip(entries, r)]
    return Matrix2(*entries), Polynomial.from_roots(points, mode)


def _require_exact(h, what):
    if h.mode != EXACT:
        raise ExactModeRequired(f"{what} requires exact scalars")


def det_rational(h):
    """
    det M(x) as a reduced rational function.

    Raises:
        ExactModeRequired: for approx-mode data
        HiggsInvariantError: if trace M is not identically zero or det M has
            a pole of order above 1 at a marked point
    """
    if h.mode != EXACT:
        raise ExactModeRequired("exact mode required")
    N, D = higgs_polynomial_matrix(h)
    if not (N.m00 + N.m11).is_zero():
        raise HiggsInvariantError("trace of Higgs field is not identically zero")
    det = RationalFunction(N.m00 * N.m11 - N.m01 * N.m10, D * D)
    if not det.is_zero():
        for i, x in enumerate(h.points, 1):
            if pole_order(det, x) > 1:
                raise HiggsInvariantError(f"det M has a pole of order > 1 at x_{i}")
    return det


# ---------------------------------------------------------------------------
# Invariant line subbundles
# ---------------------------------------------------------------------------

def saturate(p, q):
    """Divide out the common factor of (p, q) and normalize the leading coefficient."""
    g = poly_gcd(p, q)
    p, q = p // g, q // g
    lead = p.leading() if p.degree >= q.degree else q.leading()
    scale = one(EXACT) / lead
    p, q = p * scale, q * scale
    return LineSubbundle(int(max(p.degree, q.degree)), p, q)


def _kernel_line(K):
    """Saturated kernel line field of a polynomial 2x2 matrix of generic rank 1."""
    # columns of the adjugate lie in the kernel
    for p, q in ((K.m11, -K.m10), (-K.m01, K.m00)):
        if not (p.is_zero() and q.is_zero()):
            return saturate(p, q)
    raise HiggsInvariantError("kernel line of the zero matrix")


def _classify(h):
    """
    Returns:
        (case label, list of invariant LineSubbundles or ALL_INVARIANT)
    """
    N, D = higgs_polynomial_matrix(h)
    if all(e.is_zero() for e in N):
        return 'zero-field', ALL_INVARIANT
    det_num = N.m00 * N.m11 - N.m01 * N.m10
    if det_num.is_zero():
        return 'kernel', [_kernel_line(N)]

    ok, r = rf_is_square(RationalFunction(-det_num, D * D))
    if not ok:
        return 'none', []
    subbundles = []
    for sign in (1, -1):
        # ker(M - sign*r) = ker(b*N - sign*a*D*I) with r = a/b
        a, b = r.numerator * sign, r.denominator
        K = Matrix2(b * N.m00 - a * D, b * N.m01, b * N.m10, b * N.m11 - a * D)
        subbundles.append(_kernel_line(K))
    return 'eigen', subbundles


def invariant_line_subbundles(h, k_max):
    """
    All saturated Higgs-invariant line subbundles of degree >= -k_max.

    Returns ALL_INVARIANT when the Higgs field is zero.

    Raises:
        ExactModeRequired: for approx-mode data
    """
    _require_exact(h, "invariant subbundle search")
    if k_max < 0:
        raise ValueError(f"k_max must be non-negative, got {k_max}")
    _, subbundles = _classify(h)
    if subbundles == ALL_INVARIANT:
        return ALL_INVARIANT
    return [L for L in subbundles if L.degree <= k_max]


def _base_total(h, base_weights):
    if base_weights is None:
        return Fraction(0)
    if len(base_weights) != h.n:
        raise ConfigError(f"{len(base_weights)} base weights for n = {h.n}")
    for i, (b, a) in enumerate(zip(base_weights, h.weights), 1):
        if not (0 <= b and b + a < 1):
            raise ConfigError(f"base weight beta_{i} = {b} must satisfy 0 <= beta < 1 - alpha")
    return sum((Fraction(b) for b in base_weights), Fraction(0))


def parabolic_degree(L, h, base_weights=None):
    """-k + sum of alpha_i over the points where L passes through l_i (plus base weights)."""
    through = L.through(h)
    return -L.degree + sum((Fraction(h.weights[i]) for i in through), Fraction(0)) + _base_total(h, base_weights)


def bundle_parabolic_degree(h, base_weights=None):
    return sum((Fraction(a) for a in h.weights), Fraction(0)) + 2 * _base_total(h, base_weights)


def k_max_for(h):
    return floor(sum((Fraction(a) for a in h.weights), Fraction(0)) / 2)


def _zero_field_search(h, k_max):
    """
    Best -k + sum_S alpha_i over subsets S admitting a nonzero section of
    degree <= k with section(x_i) in l_i for i in S.

    Saturating such a section never lowers this value, so the maximum is the
    largest parabolic degree of a line subbundle of degree >= -k_max.
    """
    if h.n > MAX_ZERO_FIELD_N:
        raise StabilityError(f"zero Higgs field stability scan supports n <= {MAX_ZERO_FIELD_N}, got {h.n}")
    best, witness = None, None
    for k in range(k_max + 1):
        for size in range(h.n + 1):
            for subset in itertools.combinations(range(h.n), size):
                value = -k + sum((Fraction(h.weights[i]) for i in subset), Fraction(0))
                if best is not None and value <= best:
                    continue
                rows = []
                for i in subset:
                    x, line = h.points[i], h.lines[i]
                    powers = [x ** j for j in range(k + 1)]
                    rows.append([c * line.c1 for c in powers] + [-c * line.c0 for c in powers])
                if rank(DenseMatrix.from_rows(rows, 2 * k + 2)) < 2 * k + 2:
                    best, witness = value, {"degree": k, "through": [i + 1 for i in subset]}
    return best, witness


def stability_report(h, base_weights=None):
    """
    Decide parabolic stability of Higgs data.

    Returns:
        Dictionary with the verdicts, the degree bound, the slope threshold,
        the largest parabolic degree found and the subbundle attaining it
    """
    _require_exact(h, "stability")
    k_max = k_max_for(h)
    base = _base_total(h, base_weights)
    threshold = bundle_parabolic_degree(h, base_weights) / 2

    case, subbundles = _classify(h)
    if subbundles == ALL_INVARIANT:
        best, witness = _zero_field_search(h, k_max)
        max_pardeg = best + base
    else:
        candidates = [L for L in subbundles if L.degree <= k_max]
        max_pardeg, witness = None, None
        for L in candidates:
            value = parabolic_degree(L, h, base_weights)
            if max_pardeg is None or value > max_pardeg:
                max_pardeg, witness = value, L.to_dict(h)

    stable = max_pardeg is None or max_pardeg < threshold
    semistable = max_pardeg is None or max_pardeg <= threshold
    return {
        "stable": stable,
        "semistable": semistable,
        "strictly_semistable": semistable and not stable,
        "k_max": k_max,
        "threshold": format_rational(threshold),
        "max_pardeg": None if max_pardeg is None else format_rational(max_pardeg),
        "destabilizing": None if stable else witness,
        "case": case,
        "convention": STABILITY_CONVENTION,
    }


def is_stable(h):
    """
    Raises:
        ExactModeRequired: for approx-mode data
    """
    return stability_report(h)["stable"]


# ---------------------------------------------------------------------------
# Gauge transport
# ---------------------------------------------------------------------------

def gauge_transform(h, A):
    """Lines A^-1 l_i and residues A^-1 R_i A."""
    a_inv = inverse2(A)
    return HiggsData(
        h.points,
        h.weights,
        tuple(mat_apply(a_inv, v) for v in h.lines),
        tuple(mat_mul(mat_mul(a_inv, r), A) for r in h.residues),
    )


def is_gauge_equivalent(h1, h2, A):
    """True when gauge_transform(h1, A) has the lines and residues of h2."""
    if h1.n != h2.n or tuple(h1.weights) != tuple(h2.weights):
        return False
    moved = gauge_transform(h1, A)
    scale = max(moved.scale(), h2.scale())
    for a, b in zip(moved.points, h2.points):
        if not is_zero(a - b, max(1.0, abs(a))):
            return False
    for r1, r2 in zip(moved.residues, h2.residues):
        if not matrix_is_zero(mat_sub(r1, r2), scale):
            return False
    return all(parallel(v1, v2) for v1, v2 in zip(moved.lines, h2.lines))


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------

def higgs_to_dict(h):
    """Serialized Higgs data; exact data also carries det M as coefficient lists."""
    data = {
        "n": h.n,
        "mode": h.mode,
        "points": [scalar_to_json(x) for x in h.points],
        "alpha": [format_rational(a) for a in h.weights],
        "lines": [[scalar_to_json(x) for x in v] for v in h.lines],
        "residues": [[scalar_to_json(x) for x in r] for r in h.residues],
    }
    if h.mode == EXACT:
        det = det_rational(h)
        data["det"] = {
            "numerator": [scalar_to_json(c) for c in det.numerator.coeffs],
            "denominator": [scalar_to_json(c) for c in det.denominator.coeffs],
        }
    return data
