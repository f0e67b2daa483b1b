"""
Univariate polynomials and rational functions over the active scalar field

Polynomials store coefficients lowest degree first with trailing zeros
stripped. Rational functions keep a monic denominator and, in exact mode,
a gcd-reduced numerator/denominator pair.

Structural queries (gcd, square detection, pole order) need exact scalars;
approx-mode objects support evaluation and arithmetic only.
"""

from scalar_linalg import (
    APPROX,
    EXACT,
    QI,
    get_tolerance,
    is_zero,
    one,
    qi_sqrt,
    scalar_mode,
    to_scalar,
    zero,
)
from hyperpoly_errors import ExactModeRequired, PoleError, PolynomialQueryError

# Degree of the zero polynomial
NEG_INF = float('-inf')


def _strip(coeffs, mode):
    if mode == EXACT:
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        return coeffs
    scale = max((abs(c) for c in coeffs), default=0.0)
    while coeffs and abs(coeffs[-1]) <= get_tolerance() * scale:
        coeffs.pop()
    return coeffs


class Polynomial:
    """Polynomial in the affine coordinate x."""

    __slots__ = ('coeffs', 'mode')

    def __init__(self, coeffs=(), mode=None):
        coeffs = list(coeffs)
        if mode is None:
            mode = EXACT if all(scalar_mode(c) == EXACT for c in coeffs) else APPROX
        self.mode = mode
        self.coeffs = tuple(_strip([to_scalar(c, mode) for c in coeffs], mode))

    @classmethod
    def constant(cls, c, mode=None):
        return cls([c], mode)

    @classmethod
    def x(cls, mode=EXACT):
        return cls([zero(mode), one(mode)], mode)

    @classmethod
    def from_roots(cls, roots, mode=EXACT):
        """Monic polynomial prod (x - r)."""
        result = cls([one(mode)], mode)
        for r in roots:
            result = result * cls([-to_scalar(r, mode), one(mode)], mode)
        return result

    @property
    def degree(self):
        return len(self.coeffs) - 1 if self.coeffs else NEG_INF

    def is_zero(self):
        return not self.coeffs

    def leading(self):
        if not self.coeffs:
            raise PolynomialQueryError("leading coefficient of the zero polynomial")
        return self.coeffs[-1]

    def coefficient(self, k):
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else zero(self.mode)

    def _coerce(self, other):
        if isinstance(other, Polynomial):
            return other
        return Polynomial([other])

    def __add__(self, other):
        other = self._coerce(other)
        n = max(len(self.coeffs), len(other.coeffs))
        mode = self.mode if self.mode == other.mode else APPROX
        return Polynomial([self.coefficient(k) + other.coefficient(k) for k in range(n)], mode)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial([-c for c in self.coeffs], self.mode)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            mode = EXACT if self.mode == EXACT and scalar_mode(other) == EXACT else APPROX
            return Polynomial([c * other for c in self.coeffs], mode)
        if self.is_zero() or other.is_zero():
            return Polynomial([], self.mode if self.mode == other.mode else APPROX)
        out = [zero(self.mode)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        mode = self.mode if self.mode == other.mode else APPROX
        return Polynomial(out, mode)

    __rmul__ = __mul__

    def __pow__(self, k):
        result = Polynomial([one(self.mode)], self.mode)
        for _ in range(k):
            result = result * self
        return result

    def __divmod__(self, other):
        other = self._coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        remainder = list(self.coeffs)
        lead = other.leading()
        dq = len(remainder) - len(other.coeffs)
        if dq < 0:
            return Polynomial([], self.mode), self
        quotient = [zero(self.mode)] * (dq + 1)
        for k in range(dq, -1, -1):
            c = remainder[k + len(other.coeffs) - 1] / lead
            quotient[k] = c
            for j, b in enumerate(other.coeffs):
                remainder[k + j] = remainder[k + j] - c * b
        return Polynomial(quotient, self.mode), Polynomial(remainder[:len(other.coeffs) - 1], self.mode)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            other = Polynomial([other], self.mode)
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __call__(self, x0):
        acc = zero(self.mode)
        for c in reversed(self.coeffs):
            acc = acc * x0 + c
        return acc

    def derivative(self):
        return Polynomial([k * c for k, c in enumerate(self.coeffs)][1:], self.mode)

    def monic(self):
        if self.is_zero():
            return self
        lead = self.leading()
        return Polynomial([c / lead for c in self.coeffs], self.mode)

    def __repr__(self):
        return f"Polynomial([{', '.join(str(c) for c in self.coeffs)}])"

    def __str__(self):
        if not self.coeffs:
            return "0"
        terms = []
        for k, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if k == 0:
                terms.append(f"({c})")
            elif k == 1:
                terms.append(f"({c})*x")
            else:
                terms.append(f"({c})*x^{k}")
        return " + ".join(terms)


def require_exact(*objects, message="exact mode required"):
    for obj in objects:
        if obj.mode != EXACT:
            raise ExactModeRequired(message)


def poly_gcd(a, b):
    """
    Monic greatest common divisor.

    Raises:
        PolynomialQueryError: when both inputs are zero
        ExactModeRequired: for approx-mode inputs
    """
    require_exact(a, b, message="gcd requires exact scalars")
    if a.is_zero() and b.is_zero():
        raise PolynomialQueryError("gcd undefined")
    while not b.is_zero():
        a, b = b, a % b
    return a.monic()


def squarefree_decomposition(f):
    """
    Yun's squarefree decomposition.

    Returns:
        Monic squarefree factors [a_1, a_2, ...] with f = lc(f) * prod a_i**i
    """
    require_exact(f, message="squarefree decomposition requires exact scalars")
    f = f.monic()
    if f.degree <= 0:
        return []
    fp = f.derivative()
    a0 = poly_gcd(f, fp)
    b = f // a0
    c = fp // a0
    d = c - b.derivative()
    factors = []
    while b.degree > 0:
        a = poly_gcd(b, d)
        factors.append(a)
        b = b // a
        c = d // a
        d = c - b.derivative()
    return factors


def poly_sqrt(f):
    """Polynomial r with r*r == f over Q(i), or None."""
    require_exact(f, message="square detection requires exact scalars")
    if f.is_zero():
        return f
    lead_root = qi_sqrt(f.leading())
    if lead_root is None:
        return None
    root = Polynomial([lead_root], EXACT)
    for i, factor in enumerate(squarefree_decomposition(f), start=1):
        if i % 2 == 1:
            if factor.degree > 0:
                return None
        else:
            root = root * factor ** (i // 2)
    return root if root * root == f else None


def multiplicity(p, x0):
    """Order of vanishing of a nonzero exact polynomial at x0."""
    linear = Polynomial([-to_scalar(x0, EXACT), QI(1)], EXACT)
    count = 0
    while not p.is_zero() and p(x0) == 0:
        p = p // linear
        count += 1
    return count


class RationalFunction:
    """numerator / denominator with a monic denominator."""

    __slots__ = ('numerator', 'denominator')

    def __init__(self, numerator, denominator=None):
        if not isinstance(numerator, Polynomial):
            numerator = Polynomial([numerator])
        if denominator is None:
            denominator = Polynomial([one(numerator.mode)], numerator.mode)
        elif not isinstance(denominator, Polynomial):
            denominator = Polynomial([denominator], numerator.mode)
        if denominator.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")

        if numerator.is_zero():
            numerator = Polynomial([], numerator.mode)
            denominator = Polynomial([one(denominator.mode)], denominator.mode)
        elif numerator.mode == EXACT and denominator.mode == EXACT:
            g = poly_gcd(numerator, denominator)
            numerator = numerator // g
            denominator = denominator // g

        lead = denominator.leading()
        self.numerator = numerator * (one(numerator.mode) / lead)
        self.denominator = denominator.monic()

    @property
    def mode(self):
        if self.numerator.mode == EXACT and self.denominator.mode == EXACT:
            return EXACT
        return APPROX

    def is_zero(self):
        return self.numerator.is_zero()

    def _coerce(self, other):
        if isinstance(other, RationalFunction):
            return other
        return RationalFunction(other)

    def __add__(self, other):
        other = self._coerce(other)
        return RationalFunction(
            self.numerator * other.denominator + other.numerator * self.denominator,
            self.denominator * other.denominator,
        )

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.numerator, self.denominator)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        return RationalFunction(self.numerator * other.numerator, self.denominator * other.denominator)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("division by the zero rational function")
        return RationalFunction(self.numerator * other.denominator, self.denominator * other.numerator)

    def __eq__(self, other):
        other = self._coerce(other)
        return self.numerator == other.numerator and self.denominator == other.denominator

    def __hash__(self):
        return hash((self.numerator, self.denominator))

    def __call__(self, x0):
        return rf_eval(self, x0)

    def __repr__(self):
        return f"RationalFunction({self.numerator!r}, {self.denominator!r})"


def rf_eval(f, x0):
    """
    Evaluate a rational function.

    Raises:
        PoleError: when the denominator vanishes at x0
    """
    d = f.denominator(x0)
    scale = max((abs(c) for c in f.denominator.coeffs), default=1.0) * max(1.0, abs(x0)) ** f.denominator.degree
    if is_zero(d, scale):
        raise PoleError("evaluation at pole")
    return f.numerator(x0) / d


def rf_is_square(f):
    """
    Decide whether f is the square of a rational function over Q(i).

    Returns:
        (True, r) with r*r == f, or (False, None)
    """
    if f.mode != EXACT:
        raise ExactModeRequired("square detection requires exact scalars")
    if f.is_zero():
        return True, f
    num_root = poly_sqrt(f.numerator)
    if num_root is None:
        return False, None
    den_root = poly_sqrt(f.denominator)
    if den_root is None:
        return False, None
    root = RationalFunction(num_root, den_root)
    if root * root != f:
        return False, None
    return True, root


def pole_order(f, x0):
    """
    Pole order of f at x0 (negative values are zeros).

    Raises:
        PolynomialQueryError: for the zero function
    """
    if f.mode != EXACT:
        raise ExactModeRequired("pole order requires exact scalars")
    if f.is_zero():
        raise PolynomialQueryError("order of zero function")
    x0 = to_scalar(x0, EXACT)
    return multiplicity(f.denominator, x0) - multiplicity(f.numerator, x0)
