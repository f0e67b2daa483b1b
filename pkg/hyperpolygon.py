"""
Hyperpolygon level set

Points (y, z) of ((C^2)^n)* x (C^2 minus 0)^n, the action of
G = (SL(2, C) x (C*)^n) / (Z/2), the complex moment map

    mu(y, z) = (sum_i z_i ⊗ y_i, (y_i(z_i))_i)

and its linearization, level-set sampling, and bases of tangent and orbit
directions at level-set points.
"""

from dataclasses import dataclass
from fractions import Fraction

from scalar_linalg import (
    EXACT,
    APPROX,
    QI,
    Covector2,
    DenseMatrix,
    Matrix2,
    Vector2,
    annihilator,
    covec_add,
    covec_mul,
    covec_scale,
    covec_sub,
    det2,
    format_rational,
    inverse2,
    is_zero,
    mat_add,
    mat_apply,
    mat_mul,
    matrix_is_zero,
    matrix_norm,
    nullspace,
    one,
    outer,
    pair,
    parallel,
    random_scalar,
    rank,
    scalar_from_json,
    scalar_mode,
    scalar_to_json,
    trace2,
    vec_add,
    vec_scale,
    vec_sub,
    vector_is_zero,
    vector_norm,
    zero,
    zero_matrix2,
)
from hyperpoly_errors import ConfigError, MalformedInputError, SamplingError

# Entry range for exact-mode sampling
SAMPLE_BOUND = 9

# Attempts before the sampler gives up
MAX_SAMPLE_ATTEMPTS = 50


@dataclass(frozen=True)
class WeightVector:
    """Parabolic weights alpha_1..alpha_n, each in (0, 1)."""

    values: tuple

    def __post_init__(self):
        values = tuple(Fraction(a) for a in self.values)
        object.__setattr__(self, 'values', values)
        if len(values) < 3:
            raise ConfigError(f"need at least 3 weights, got {len(values)}")
        for i, a in enumerate(values, 1):
            if not 0 < a < 1:
                raise ConfigError(f"weight alpha_{i} = {a} is outside (0, 1)")

    @classmethod
    def uniform(cls, n, value=Fraction(1, 3)):
        return cls(tuple(Fraction(value) for _ in range(n)))

    @classmethod
    def parse(cls, text):
        """Parse a comma-separated list such as "1/3,1/3,1/2,1/2"."""
        try:
            return cls(tuple(Fraction(part.strip()) for part in text.split(',') if part.strip()))
        except (ValueError, ZeroDivisionError) as e:
            raise ConfigError(f"cannot parse weights '{text}': {e}")

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def __getitem__(self, i):
        return self.values[i]

    def total(self):
        return sum(self.values, Fraction(0))

    def to_json(self):
        return [format_rational(a) for a in self.values]


@dataclass(frozen=True)
class HyperpolygonPoint:
    """A point ((y_1..y_n), (z_1..z_n)) with every z_i nonzero."""

    y: tuple
    z: tuple

    def __post_init__(self):
        object.__setattr__(self, 'y', tuple(Covector2(*w) for w in self.y))
        object.__setattr__(self, 'z', tuple(Vector2(*v) for v in self.z))
        if len(self.y) != len(self.z):
            raise ValueError(f"{len(self.y)} covectors for {len(self.z)} vectors")
        for i, zi in enumerate(self.z, 1):
            if vector_is_zero(zi):
                raise ValueError(f"z_{i} must be nonzero")

    @property
    def n(self):
        return len(self.z)

    @property
    def mode(self):
        for w, v in zip(self.y, self.z):
            for x in (*w, *v):
                if scalar_mode(x) == APPROX:
                    return APPROX
        return EXACT

    def scale(self):
        """Magnitude used to make approx-mode zero tests relative."""
        return max(1.0, sum(vector_norm(w) * vector_norm(v) for w, v in zip(self.y, self.z)))


@dataclass(frozen=True)
class TangentVector:
    """Tangent direction ((u_1..u_n), (v_1..v_n)) at a point."""

    u: tuple
    v: tuple

    def __post_init__(self):
        object.__setattr__(self, 'u', tuple(Covector2(*w) for w in self.u))
        object.__setattr__(self, 'v', tuple(Vector2(*x) for x in self.v))
        if len(self.u) != len(self.v):
            raise ValueError(f"{len(self.u)} covector slots for {len(self.v)} vector slots")

    @property
    def n(self):
        return len(self.v)

    @classmethod
    def zero(cls, n, mode=EXACT):
        z = zero(mode)
        return cls(tuple(Covector2(z, z) for _ in range(n)), tuple(Vector2(z, z) for _ in range(n)))

    def to_flat(self):
        """Coordinates (u_1, .., u_n, v_1, .., v_n), two entries per slot."""
        coords = []
        for w in self.u:
            coords.extend(w)
        for x in self.v:
            coords.extend(x)
        return tuple(coords)

    @classmethod
    def from_flat(cls, coords, n):
        coords = tuple(coords)
        if len(coords) != 4 * n:
            raise ValueError(f"expected {4 * n} coordinates, got {len(coords)}")
        u = tuple(Covector2(coords[2 * i], coords[2 * i + 1]) for i in range(n))
        v = tuple(Vector2(coords[2 * n + 2 * i], coords[2 * n + 2 * i + 1]) for i in range(n))
        return cls(u, v)

    def __add__(self, other):
        return TangentVector(
            tuple(covec_add(a, b) for a, b in zip(self.u, other.u)),
            tuple(vec_add(a, b) for a, b in zip(self.v, other.v)),
        )

    def __sub__(self, other):
        return TangentVector(
            tuple(covec_sub(a, b) for a, b in zip(self.u, other.u)),
            tuple(vec_sub(a, b) for a, b in zip(self.v, other.v)),
        )

    def scale(self, c):
        return TangentVector(
            tuple(covec_scale(c, w) for w in self.u),
            tuple(vec_scale(c, x) for x in self.v),
        )


@dataclass(frozen=True)
class GroupElement:
    """Representative (A, lambda) of an element of G; (A, lambda) ~ (-A, -lambda)."""

    A: Matrix2
    lam: tuple

    def __post_init__(self):
        object.__setattr__(self, 'A', Matrix2(*self.A))
        object.__setattr__(self, 'lam', tuple(self.lam))
        d = det2(self.A)
        if not is_zero(d - 1, max(1.0, matrix_norm(self.A) ** 2)):
            raise ValueError(f"det A must be 1, got {d}")
        for i, x in enumerate(self.lam, 1):
            if is_zero(x):
                raise ValueError(f"lambda_{i} must be nonzero")

    @classmethod
    def identity(cls, n, mode=EXACT):
        return cls(Matrix2(one(mode), zero(mode), zero(mode), one(mode)), tuple(one(mode) for _ in range(n)))

    def acts_like(self, other, probe):
        """Equality in G, decided by comparing actions on a probe point."""
        a, b = act(self, probe), act(other, probe)
        scale = probe.scale()
        diffs = [x - y for wa, wb in zip(a.y, b.y) for x, y in zip(wa, wb)]
        diffs += [x - y for va, vb in zip(a.z, b.z) for x, y in zip(va, vb)]
        return all(is_zero(d, scale) for d in diffs)


@dataclass(frozen=True)
class LieAlgebraElement:
    """Infinitesimal group element (a, s) with a traceless."""

    a: Matrix2
    s: tuple

    def __post_init__(self):
        object.__setattr__(self, 'a', Matrix2(*self.a))
        object.__setattr__(self, 's', tuple(self.s))
        if not is_zero(trace2(self.a), max(1.0, matrix_norm(self.a))):
            raise ValueError("Lie algebra element must have traceless matrix part")


# ---------------------------------------------------------------------------
# Moment map
# ---------------------------------------------------------------------------

def moment_matrix(p):
    """Sum of z_i ⊗ y_i."""
    total = zero_matrix2(p.mode)
    for w, v in zip(p.y, p.z):
        total = mat_add(total, outer(v, w))
    return total


def pairings(p):
    """The sequence (y_i(z_i))_i."""
    return tuple(pair(w, v) for w, v in zip(p.y, p.z))


def is_in_level_set(p):
    """True iff the moment matrix and every pairing vanish."""
    scale = p.scale()
    if not matrix_is_zero(moment_matrix(p), scale):
        return False
    return all(is_zero(c, scale) for c in pairings(p))


def level_set_residual(p):
    """Largest entry magnitude of the moment map at p (0 on the level set)."""
    entries = list(moment_matrix(p)) + list(pairings(p))
    return max(abs(x) for x in entries)


def act(g, p):
    """y_i -> lambda_i^-1 y_i A,  z_i -> lambda_i A^-1 z_i."""
    a_inv = inverse2(g.A)
    y = tuple(covec_scale(1 / lam, covec_mul(w, g.A)) for w, lam in zip(p.y, g.lam))
    z = tuple(vec_scale(lam, mat_apply(a_inv, v)) for v, lam in zip(p.z, g.lam))
    return HyperpolygonPoint(y, z)


def tangent_pushforward(g, t):
    """Differential of the action: (u_i, v_i) -> (lambda_i^-1 u_i A, lambda_i A^-1 v_i)."""
    a_inv = inverse2(g.A)
    u = tuple(covec_scale(1 / lam, covec_mul(w, g.A)) for w, lam in zip(t.u, g.lam))
    v = tuple(vec_scale(lam, mat_apply(a_inv, x)) for x, lam in zip(t.v, g.lam))
    return TangentVector(u, v)


def infinitesimal_action(xi, p):
    """u_i = y_i a - s_i y_i,  v_i = s_i z_i - a z_i."""
    u = tuple(covec_sub(covec_mul(w, xi.a), covec_scale(s, w)) for w, s in zip(p.y, xi.s))
    v = tuple(vec_sub(vec_scale(s, x), mat_apply(xi.a, x)) for x, s in zip(p.z, xi.s))
    return TangentVector(u, v)


def d_moment(p, t):
    """
    Linearization of the moment map at p applied to t.

    Returns:
        (sum_i v_i ⊗ y_i + z_i ⊗ u_i, (u_i(z_i) + y_i(v_i))_i)
    """
    total = zero_matrix2(p.mode)
    for w, x, du, dv in zip(p.y, p.z, t.u, t.v):
        total = mat_add(total, mat_add(outer(dv, w), outer(x, du)))
    pairing_part = tuple(pair(du, x) + pair(w, dv) for w, x, du, dv in zip(p.y, p.z, t.u, t.v))
    return total, pairing_part


def linearization_matrix(p):
    """
    The (n+4) x 4n matrix of d_moment at p in the TangentVector.to_flat coordinates.

    Rows 0-3 are the matrix entries (0,0), (0,1), (1,0), (1,1); row 4+i is the
    i-th pairing.
    """
    n = p.n
    z0 = zero(p.mode)
    rows = []
    for a in range(2):
        for b in range(2):
            row = [z0] * (4 * n)
            for i in range(n):
                row[2 * i + b] = p.z[i][a]
                row[2 * n + 2 * i + a] = p.y[i][b]
            rows.append(row)
    for i in range(n):
        row = [z0] * (4 * n)
        for c in range(2):
            row[2 * i + c] = p.z[i][c]
            row[2 * n + 2 * i + c] = p.y[i][c]
        rows.append(row)
    return DenseMatrix.from_rows(rows, 4 * n)


def y_system_matrix(z):
    """
    Linear constraints on y for fixed z: sum_i z_i ⊗ y_i = 0 and y_i(z_i) = 0.

    Unknown y_i occupies columns 2i, 2i+1.
    """
    n = len(z)
    mode = EXACT if all(scalar_mode(x) == EXACT for v in z for x in v) else APPROX
    z0 = zero(mode)
    rows = []
    for a in range(2):
        for b in range(2):
            row = [z0] * (2 * n)
            for i in range(n):
                row[2 * i + b] = z[i][a]
            rows.append(row)
    for i in range(n):
        row = [z0] * (2 * n)
        row[2 * i] = z[i][0]
        row[2 * i + 1] = z[i][1]
        rows.append(row)
    return DenseMatrix.from_rows(rows, 2 * n)


# ---------------------------------------------------------------------------
# Sampling
# ---------------------------------------------------------------------------

def _random_nonzero(rng, mode):
    while True:
        x = random_scalar(rng, mode, SAMPLE_BOUND)
        if not is_zero(x):
            return x


def _random_nonzero_vector(rng, mode):
    while True:
        v = Vector2(random_scalar(rng, mode, SAMPLE_BOUND), random_scalar(rng, mode, SAMPLE_BOUND))
        if not vector_is_zero(v):
            return v


def _sample_generic_z(n, rng, mode):
    """n nonzero, pairwise non-proportional vectors, or None if a draw collided."""
    z = [_random_nonzero_vector(rng, mode) for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            if parallel(z[i], z[j]):
                return None
    return tuple(z)


def sample_level_set(n, alpha, rng, mode=EXACT):
    """
    Draw a point of the level set with generic z.

    z_i have small random integer entries (exact) or complex Gaussian entries
    (approx); y is a random element of the kernel of the linear system in y.

    Args:
        n: Number of slots, at least 4
        alpha: WeightVector of length n, or None
        rng: numpy.random.Generator
        mode: EXACT or APPROX

    Raises:
        SamplingError: for n < 4 or after MAX_SAMPLE_ATTEMPTS failed draws
    """
    if n < 4:
        raise SamplingError(f"sampling requires n >= 4, got n = {n}")
    if alpha is not None and len(alpha) != n:
        raise ConfigError(f"{len(alpha)} weights for n = {n}")

    for _ in range(MAX_SAMPLE_ATTEMPTS):
        z = _sample_generic_z(n, rng, mode)
        if z is None:
            continue
        basis = nullspace(y_system_matrix(z))
        if not basis:
            continue
        flat = [zero(mode)] * (2 * n)
        for vec in basis:
            c = random_scalar(rng, mode, SAMPLE_BOUND)
            flat = [acc + c * x for acc, x in zip(flat, vec)]
        if all(is_zero(x) for x in flat):
            continue
        y = tuple(Covector2(flat[2 * i], flat[2 * i + 1]) for i in range(n))
        point = HyperpolygonPoint(y, z)
        if is_in_level_set(point):
            return point
    raise SamplingError("sampling failed")


def sample_collinear(n, rng, mode=EXACT):
    """
    Level-set point with every z_i on one line: z_i = c_i z0, y_i = d_i w0,
    w0(z0) = 0 and sum c_i d_i = 0.
    """
    if n < 3:
        raise SamplingError(f"collinear sampling requires n >= 3, got n = {n}")
    z0 = _random_nonzero_vector(rng, mode)
    w0 = annihilator(z0)
    c = [_random_nonzero(rng, mode) for _ in range(n)]
    d = [random_scalar(rng, mode, SAMPLE_BOUND) for _ in range(n - 1)]
    d.append(-sum((ci * di for ci, di in zip(c, d)), zero(mode)) / c[-1])
    z = tuple(vec_scale(ci, z0) for ci in c)
    y = tuple(covec_scale(di, w0) for di in d)
    return HyperpolygonPoint(y, z)


def random_group_element(n, rng, mode=EXACT):
    """Unipotent-unipotent-diagonal product with det 1, and random nonzero lambdas."""
    t = random_scalar(rng, mode, 3)
    s = random_scalar(rng, mode, 3)
    r = _random_nonzero(rng, mode) if mode == APPROX else QI(int(rng.integers(1, 4)))
    upper = Matrix2(one(mode), t, zero(mode), one(mode))
    lower = Matrix2(one(mode), zero(mode), s, one(mode))
    diagonal = Matrix2(r, zero(mode), zero(mode), 1 / r)
    A = mat_mul(mat_mul(upper, lower), diagonal)
    lam = tuple(_random_nonzero(rng, mode) for _ in range(n))
    return GroupElement(A, lam)


def random_lie_element(n, rng, mode=EXACT):
    h, e, f = (random_scalar(rng, mode, 5) for _ in range(3))
    return LieAlgebraElement(Matrix2(h, e, f, -h), tuple(random_scalar(rng, mode, 5) for _ in range(n)))


def random_tangent_vector(n, rng, mode=EXACT):
    """Random ambient direction (not necessarily tangent to the level set)."""
    coords = [random_scalar(rng, mode, 5) for _ in range(4 * n)]
    return TangentVector.from_flat(coords, n)


# ---------------------------------------------------------------------------
# Tangent and orbit directions
# ---------------------------------------------------------------------------

def tangent_basis(p):
    """Basis of ker d_moment at p."""
    return [TangentVector.from_flat(b, p.n) for b in nullspace(linearization_matrix(p))]


def lie_algebra_basis(n, mode=EXACT):
    """H, E, F directions of sl(2) followed by the n scaling directions."""
    o, z = one(mode), zero(mode)
    zeros = tuple(z for _ in range(n))
    basis = [
        LieAlgebraElement(Matrix2(o, z, z, -o), zeros),
        LieAlgebraElement(Matrix2(z, o, z, z), zeros),
        LieAlgebraElement(Matrix2(z, z, o, z), zeros),
    ]
    for k in range(n):
        basis.append(LieAlgebraElement(zero_matrix2(mode), tuple(o if i == k else z for i in range(n))))
    return basis


def orbit_basis(p):
    """Images of the Lie algebra basis under the infinitesimal action at p."""
    return [infinitesimal_action(xi, p) for xi in lie_algebra_basis(p.n, p.mode)]


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------

def point_to_dict(p):
    return {
        "n": p.n,
        "mode": p.mode,
        "z": [[scalar_to_json(x) for x in v] for v in p.z],
        "y": [[scalar_to_json(x) for x in w] for w in p.y],
    }


def point_from_dict(data):
    """
    Parse the JSON form of a point.

    Raises:
        MalformedInputError: on missing keys, wrong shapes or bad numbers
    """
    try:
        n = int(data["n"])
        mode = data.get("mode", EXACT)
        if mode not in (EXACT, APPROX):
            raise ValueError(f"unknown mode '{mode}'")
        z = [Vector2(*(scalar_from_json(x, mode) for x in v)) for v in data["z"]]
        y = [Covector2(*(scalar_from_json(x, mode) for x in w)) for w in data["y"]]
        if len(z) != n or len(y) != n:
            raise ValueError(f"expected {n} vectors and covectors, got {len(z)} and {len(y)}")
        return HyperpolygonPoint(tuple(y), tuple(z))
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as e:
        raise MalformedInputError(f"malformed point: {e}")


def group_element_to_dict(g):
    A = g.A
    return {
        "A": [[scalar_to_json(A.m00), scalar_to_json(A.m01)], [scalar_to_json(A.m10), scalar_to_json(A.m11)]],
        "lambda": [scalar_to_json(x) for x in g.lam],
    }


def group_element_from_dict(data, mode=EXACT):
    try:
        (a00, a01), (a10, a11) = data["A"]
        A = Matrix2(*(scalar_from_json(x, mode) for x in (a00, a01, a10, a11)))
        lam = tuple(scalar_from_json(x, mode) for x in data["lambda"])
        return GroupElement(A, lam)
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as e:
        raise MalformedInputError(f"malformed group element: {e}")


def dimension_counts(p):
    """
    Tangent, orbit and quotient dimensions at p against the generic values
    3n-3, n+3 and 2(n-3).
    """
    n = p.n
    tangent = len(tangent_basis(p))
    orbit_rank = rank(DenseMatrix.from_rows([t.to_flat() for t in orbit_basis(p)], 4 * n))
    return {
        "tangent": {"expected": 3 * n - 3, "got": tangent},
        "orbit": {"expected": n + 3, "got": orbit_rank},
        "quotient": {"expected": 2 * (n - 3), "got": tangent - orbit_rank},
    }
