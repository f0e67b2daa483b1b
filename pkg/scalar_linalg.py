"""
Scalars and small dense linear algebra

Two scalar modes share one set of operations:

- exact:  Gaussian rationals (QI), closed arithmetic, exact zero tests
- approx: Python complex numbers, zero tests relative to the tolerance

Dense matrices are handled by fraction-free / Gauss-Jordan elimination in
exact mode and by numpy's SVD and least squares in approx mode.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import hypot, isqrt, lcm, sqrt
from typing import Any, NamedTuple

import numpy as np

EXACT = 'exact'
APPROX = 'approx'
MODES = (EXACT, APPROX)

DEFAULT_TOLERANCE = 1e-9

# Global zero-test threshold for approx mode
_tolerance = DEFAULT_TOLERANCE


def get_tolerance():
    """Return the active tolerance used by all approx-mode zero tests."""
    return _tolerance


def set_tolerance(tol):
    """
    Set the global tolerance.

    Args:
        tol: Positive number

    Returns:
        The previous tolerance, so callers can restore it
    """
    global _tolerance
    tol = float(tol)
    if not tol > 0:
        raise ValueError(f"tolerance must be positive, got {tol}")
    previous = _tolerance
    _tolerance = tol
    return previous


class QI:
    """Gaussian rational re + im*i with Fraction parts."""

    __slots__ = ('re', 'im')

    def __init__(self, re=0, im=0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    def __add__(self, other):
        o = _lift(other)
        if o is None:
            return complex(self) + other if isinstance(other, (complex, float)) else NotImplemented
        return QI(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = _lift(other)
        if o is None:
            return complex(self) - other if isinstance(other, (complex, float)) else NotImplemented
        return QI(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = _lift(other)
        if o is None:
            return other - complex(self) if isinstance(other, (complex, float)) else NotImplemented
        return QI(o.re - self.re, o.im - self.im)

    def __mul__(self, other):
        o = _lift(other)
        if o is None:
            return complex(self) * other if isinstance(other, (complex, float)) else NotImplemented
        return QI(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = _lift(other)
        if o is None:
            return complex(self) / other if isinstance(other, (complex, float)) else NotImplemented
        n = o.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        return QI((self.re * o.re + self.im * o.im) / n, (self.im * o.re - self.re * o.im) / n)

    def __rtruediv__(self, other):
        o = _lift(other)
        if o is None:
            return other / complex(self) if isinstance(other, (complex, float)) else NotImplemented
        return o / self

    def __pow__(self, exponent):
        if not isinstance(exponent, int):
            return NotImplemented
        base = self if exponent >= 0 else QI(1) / self
        result = QI(1)
        for _ in range(abs(exponent)):
            result = result * base
        return result

    def __neg__(self):
        return QI(-self.re, -self.im)

    def __pos__(self):
        return self

    def __abs__(self):
        return hypot(float(self.re), float(self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __bool__(self):
        return self.re != 0 or self.im != 0

    def __eq__(self, other):
        o = _lift(other)
        if o is None:
            return complex(self) == other if isinstance(other, (complex, float)) else NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __repr__(self):
        return f"QI('{self.re}', '{self.im}')"

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}i"
        sign = '+' if self.im > 0 else '-'
        return f"{self.re}{sign}{abs(self.im)}i"

    def norm(self):
        """Field norm re^2 + im^2 (a non-negative Fraction)."""
        return self.re * self.re + self.im * self.im


def _lift(x):
    """Coerce exact Python numbers to QI; None for anything else."""
    if isinstance(x, QI):
        return x
    if isinstance(x, (int, Fraction)):
        return QI(x)
    return None


def _fraction_sqrt(q):
    """Rational square root of a non-negative Fraction, or None."""
    if q < 0:
        return None
    n, d = q.numerator, q.denominator
    rn, rd = isqrt(n), isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def qi_sqrt(c):
    """
    Square root inside Q(i).

    Args:
        c: Exact scalar

    Returns:
        QI r with r*r == c, or None when c is not a square in Q(i)
    """
    c = _lift(c)
    s = _fraction_sqrt(c.norm())
    if s is None:
        return None
    x = _fraction_sqrt((c.re + s) / 2)
    y = _fraction_sqrt((s - c.re) / 2)
    if x is None or y is None:
        return None
    if c.im < 0:
        y = -y
    root = QI(x, y)
    return root if root * root == c else None


# ---------------------------------------------------------------------------
# Scalar helpers
# ---------------------------------------------------------------------------

def scalar_mode(x):
    """Return EXACT for QI/int/Fraction values, APPROX otherwise."""
    return EXACT if isinstance(x, (QI, int, Fraction)) else APPROX


def check_mode(mode):
    if mode not in MODES:
        raise ValueError(f"unknown mode '{mode}' (expected {' or '.join(MODES)})")
    return mode


def to_scalar(value, mode):
    """
    Convert a number (or an [re, im] pair, or a "p/q" string) to the mode's scalar type.

    Args:
        value: int, Fraction, str, float, complex, QI or a two-element sequence
        mode: EXACT or APPROX

    Returns:
        QI in exact mode, complex in approx mode
    """
    if isinstance(value, (tuple, list)):
        if len(value) != 2:
            raise ValueError(f"complex entry must be [re, im], got {value!r}")
        re, im = value
        if mode == EXACT:
            return QI(_to_fraction(re), _to_fraction(im))
        return complex(float(_to_fraction(re)) if isinstance(re, str) else float(re),
                       float(_to_fraction(im)) if isinstance(im, str) else float(im))
    if mode == EXACT:
        if isinstance(value, QI):
            return value
        if isinstance(value, complex):
            return QI(Fraction(value.real), Fraction(value.imag))
        return QI(_to_fraction(value))
    if isinstance(value, str):
        return complex(float(Fraction(value)))
    return complex(value)


def _to_fraction(value):
    if isinstance(value, str):
        return Fraction(value.strip())
    return Fraction(value)


def zero(mode):
    return QI(0) if mode == EXACT else 0j


def one(mode):
    return QI(1) if mode == EXACT else 1 + 0j


def is_zero(x, scale=1.0):
    """
    Zero test for either mode.

    Exact values are compared exactly; approx values are zero when their
    magnitude is at most tolerance * scale.
    """
    if isinstance(x, (QI, int, Fraction)):
        return x == 0
    return abs(x) <= _tolerance * scale


def format_rational(q):
    """Render a Fraction as a "p/q" string."""
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def scalar_to_json(x):
    """[re, im] pair: "p/q" strings for exact scalars, floats for approx."""
    if isinstance(x, (QI, int, Fraction)):
        x = _lift(x)
        return [format_rational(x.re), format_rational(x.im)]
    x = complex(x)
    return [x.real, x.imag]


def scalar_from_json(pair, mode):
    return to_scalar(pair, mode)


def random_scalar(rng, mode, bound=9):
    """
    Draw a random scalar.

    Exact mode draws an integer in [-bound, bound]; approx mode draws a
    standard complex Gaussian.
    """
    if mode == EXACT:
        return QI(int(rng.integers(-bound, bound + 1)))
    re, im = rng.standard_normal(2)
    return complex(re, im) / sqrt(2)


# ---------------------------------------------------------------------------
# 2x2 algebra
# ---------------------------------------------------------------------------

class Vector2(NamedTuple):
    """Column vector in C^2."""
    c0: Any
    c1: Any


class Covector2(NamedTuple):
    """Row vector in (C^2)*."""
    c0: Any
    c1: Any


class Matrix2(NamedTuple):
    """2x2 matrix, row-major."""
    m00: Any
    m01: Any
    m10: Any
    m11: Any


def outer(v, w):
    """v (column) times w (row): the endomorphism v ⊗ w."""
    return Matrix2(v.c0 * w.c0, v.c0 * w.c1, v.c1 * w.c0, v.c1 * w.c1)


def pair(w, v):
    """Contraction w(v) of a covector with a vector."""
    return w.c0 * v.c0 + w.c1 * v.c1


def mat_add(a, b):
    return Matrix2(a.m00 + b.m00, a.m01 + b.m01, a.m10 + b.m10, a.m11 + b.m11)


def mat_sub(a, b):
    return Matrix2(a.m00 - b.m00, a.m01 - b.m01, a.m10 - b.m10, a.m11 - b.m11)


def mat_scale(c, a):
    return Matrix2(c * a.m00, c * a.m01, c * a.m10, c * a.m11)


def mat_mul(a, b):
    return Matrix2(
        a.m00 * b.m00 + a.m01 * b.m10, a.m00 * b.m01 + a.m01 * b.m11,
        a.m10 * b.m00 + a.m11 * b.m10, a.m10 * b.m01 + a.m11 * b.m11,
    )


def mat_apply(a, v):
    """Matrix times column vector."""
    return Vector2(a.m00 * v.c0 + a.m01 * v.c1, a.m10 * v.c0 + a.m11 * v.c1)


def covec_mul(w, a):
    """Row vector times matrix."""
    return Covector2(w.c0 * a.m00 + w.c1 * a.m10, w.c0 * a.m01 + w.c1 * a.m11)


def trace2(a):
    return a.m00 + a.m11


def det2(a):
    return a.m00 * a.m11 - a.m01 * a.m10


def inverse2(a):
    d = det2(a)
    if is_zero(d, matrix_norm(a) ** 2):
        raise ZeroDivisionError("singular 2x2 matrix")
    return Matrix2(a.m11 / d, -a.m01 / d, -a.m10 / d, a.m00 / d)


def identity2(mode):
    return Matrix2(one(mode), zero(mode), zero(mode), one(mode))


def zero_matrix2(mode):
    z = zero(mode)
    return Matrix2(z, z, z, z)


def vec_add(a, b):
    return Vector2(a.c0 + b.c0, a.c1 + b.c1)


def vec_sub(a, b):
    return Vector2(a.c0 - b.c0, a.c1 - b.c1)


def vec_scale(c, v):
    return Vector2(c * v.c0, c * v.c1)


def covec_add(a, b):
    return Covector2(a.c0 + b.c0, a.c1 + b.c1)


def covec_sub(a, b):
    return Covector2(a.c0 - b.c0, a.c1 - b.c1)


def covec_scale(c, w):
    return Covector2(c * w.c0, c * w.c1)


def annihilator(v):
    """A covector vanishing on v (nonzero whenever v is)."""
    return Covector2(-v.c1, v.c0)


def matrix_norm(a):
    return max(abs(x) for x in a)


def vector_norm(v):
    return max(abs(x) for x in v)


def matrix_is_zero(a, scale=1.0):
    return all(is_zero(x, scale) for x in a)


def vector_is_zero(v, scale=1.0):
    return all(is_zero(x, scale) for x in v)


def parallel(v, w):
    """True when v and w span at most a line (2x2 determinant vanishes)."""
    scale = vector_norm(v) * vector_norm(w)
    return is_zero(v.c0 * w.c1 - v.c1 * w.c0, scale)


# ---------------------------------------------------------------------------
# Dense matrices
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DenseMatrix:
    """Rectangular scalar array, row-major."""

    rows: tuple
    ncols: int

    def __post_init__(self):
        for row in self.rows:
            if len(row) != self.ncols:
                raise ValueError(
                    f"row of length {len(row)} in a matrix declared with {self.ncols} columns"
                )

    @classmethod
    def from_rows(cls, rows, ncols=None):
        rows = tuple(tuple(r) for r in rows)
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        return cls(rows, ncols)

    @classmethod
    def from_columns(cls, columns, nrows):
        columns = [tuple(c) for c in columns]
        rows = tuple(tuple(col[i] for col in columns) for i in range(nrows))
        return cls(rows, len(columns))

    @property
    def nrows(self):
        return len(self.rows)

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    @property
    def mode(self):
        for row in self.rows:
            for entry in row:
                if scalar_mode(entry) == APPROX:
                    return APPROX
        return EXACT

    def apply(self, vec):
        return tuple(sum((a * b for a, b in zip(row, vec)), 0) for row in self.rows)

    def norm(self):
        """Frobenius norm as a float."""
        return sqrt(sum(abs(x) ** 2 for row in self.rows for x in row))

    def to_numpy(self):
        if not self.rows:
            return np.zeros((0, self.ncols), dtype=complex)
        return np.array([[complex(x) for x in row] for row in self.rows], dtype=complex)


def _integral_rows(rows):
    """Scale each row by the lcm of its denominators so all entries are Gaussian integers."""
    out = []
    for row in rows:
        entries = [_lift(e) for e in row]
        denom = 1
        for e in entries:
            denom = lcm(denom, e.re.denominator, e.im.denominator)
        out.append([e * denom for e in entries])
    return out


def _fraction_free_rank(matrix):
    a = _integral_rows(matrix.rows)
    m, n = matrix.nrows, matrix.ncols
    r = 0
    prev = QI(1)
    for c in range(n):
        if r == m:
            break
        piv = next((i for i in range(r, m) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        for i in range(r + 1, m):
            for j in range(c + 1, n):
                a[i][j] = (a[i][j] * a[r][c] - a[i][c] * a[r][j]) / prev
            a[i][c] = QI(0)
        prev = a[r][c]
        r += 1
    return r


def _rref(rows, ncols):
    """Reduced row echelon form over Q(i); returns (rows, pivot columns)."""
    a = [[_lift(e) for e in row] for row in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        if r == len(a):
            break
        piv = next((i for i in range(r, len(a)) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = QI(1) / a[r][c]
        a[r] = [e * inv for e in a[r]]
        for i in range(len(a)):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
    return a, pivots


def rank(matrix):
    """
    Rank of a dense matrix.

    Exact mode uses fraction-free elimination on Gaussian-integer rows;
    approx mode counts singular values above tolerance * largest singular value.
    """
    if matrix.nrows == 0 or matrix.ncols == 0:
        return 0
    if matrix.mode == EXACT:
        return _fraction_free_rank(matrix)
    s = np.linalg.svd(matrix.to_numpy(), compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > _tolerance * s[0]))


def nullspace(matrix):
    """
    Basis of the right kernel.

    Exact mode returns the reduced echelon basis (one vector per free column,
    1 in that column, 0 in the other free columns). Approx mode returns the
    trailing right singular vectors.
    """
    n = matrix.ncols
    if matrix.mode == EXACT:
        reduced, pivots = _rref(matrix.rows, n)
        pivot_set = set(pivots)
        basis = []
        for f in range(n):
            if f in pivot_set:
                continue
            vec = [QI(0)] * n
            vec[f] = QI(1)
            for row_index, pc in enumerate(pivots):
                vec[pc] = -reduced[row_index][f]
            basis.append(tuple(vec))
        return basis

    if matrix.nrows == 0:
        return [tuple(1 + 0j if i == j else 0j for i in range(n)) for j in range(n)]
    r = rank(matrix)
    _, _, vh = np.linalg.svd(matrix.to_numpy(), full_matrices=True)
    return [tuple(complex(x) for x in vh[k].conj()) for k in range(r, n)]


def solve_linear(matrix, b):
    """
    Particular solution of matrix * x = b.

    Returns:
        Tuple of scalars, or None when the system is inconsistent (exact) or
        the least-squares residual exceeds the tolerance-scaled bound (approx)
    """
    n = matrix.ncols
    b = tuple(b)
    if len(b) != matrix.nrows:
        raise ValueError(f"right-hand side has {len(b)} entries for {matrix.nrows} rows")
    exact = matrix.mode == EXACT and all(scalar_mode(x) == EXACT for x in b)

    if exact:
        augmented = [tuple(row) + (rhs,) for row, rhs in zip(matrix.rows, b)]
        reduced, pivots = _rref(augmented, n + 1)
        if pivots and pivots[-1] == n:
            return None
        solution = [QI(0)] * n
        for row_index, pc in enumerate(pivots):
            solution[pc] = reduced[row_index][n]
        return tuple(solution)

    if matrix.nrows == 0:
        return tuple(0j for _ in range(n))
    a = matrix.to_numpy()
    rhs = np.array([complex(x) for x in b], dtype=complex)
    x, *_ = np.linalg.lstsq(a, rhs, rcond=None)
    residual = np.linalg.norm(a @ x - rhs)
    bound = _tolerance * (np.linalg.norm(a) * np.linalg.norm(x) + np.linalg.norm(rhs))
    if residual > bound:
        return None
    return tuple(complex(v) for v in x)


def span_contains(vectors, target):
    """True when target is a linear combination of the given coordinate vectors."""
    target = tuple(target)
    if not vectors:
        return all(is_zero(x) for x in target)
    columns = DenseMatrix.from_columns(vectors, len(target))
    return solve_linear(columns, target) is not None
