"""
Symplectic forms on both sides of the hyperpolygon / Higgs correspondence

The hyperpolygon side carries the Liouville 1-form sum_i y_i(v_i) and its
exterior derivative. The Higgs side pairs each residue with the motion of
its flag line through trace(R_i V_i), V_i any lift of the motion. The
verifier compares the two on tangent vectors of the level set and checks
that the 2-form descends to the quotient with full rank.
"""

from dataclasses import dataclass

from scalar_linalg import (
    APPROX,
    EXACT,
    Covector2,
    DenseMatrix,
    Vector2,
    annihilator,
    get_tolerance,
    inverse2,
    is_zero,
    mat_add,
    mat_apply,
    mat_mul,
    mat_scale,
    matrix_norm,
    nullspace,
    outer,
    pair,
    parallel,
    random_scalar,
    rank,
    scalar_mode,
    to_scalar,
    trace2,
    vec_sub,
    vector_is_zero,
    vector_norm,
    zero,
)
from hyperpolygon import (
    TangentVector,
    WeightVector,
    act,
    d_moment,
    is_in_level_set,
    orbit_basis,
    tangent_basis,
    tangent_pushforward,
    moment_matrix,
    pairings,
    random_group_element,
)
from higgs import default_points, is_gauge_equivalent, is_stable, to_higgs
from hyperpoly_errors import LevelSetError, ParabolicityError, StabilityError

# Covectors tried in order when choosing the lift Ṽ = motion ⊗ ζ / ζ(line)
ZETA_POOL = ((1, 0), (0, 1), (1, 1), (1, -1), (1, 2), (2, -1))

# Largest relative residual an approx-mode identity check may report
RESIDUAL_BOUND = 1e-10


@dataclass(frozen=True)
class HiggsDeformation:
    """First-order motion of the flag lines and residues."""

    line_motion: tuple
    residue_motion: tuple


def liouville_one_form(p, t):
    """sum_i y_i(v_i)."""
    return sum((pair(w, dv) for w, dv in zip(p.y, t.v)), zero(p.mode))


def liouville_two_form(p, s, t):
    """sum_i u_i^s(v_i^t) - u_i^t(v_i^s); constant in p."""
    return sum(
        (pair(us, vt) - pair(ut, vs) for us, vs, ut, vt in zip(s.u, s.v, t.u, t.v)),
        zero(p.mode),
    )


def pushforward_deformation(p, t):
    """Line motions v_i and residue motions v_i ⊗ y_i + z_i ⊗ u_i."""
    residue_motion = tuple(mat_add(outer(dv, w), outer(x, du)) for w, x, du, dv in zip(p.y, p.z, t.u, t.v))
    return HiggsDeformation(tuple(t.v), residue_motion)


def _zeta_for(line):
    mode = EXACT if all(scalar_mode(c) == EXACT for c in line) else APPROX
    for a, b in ZETA_POOL:
        zeta = Covector2(to_scalar(a, mode), to_scalar(b, mode))
        if not is_zero(pair(zeta, line), vector_norm(line)):
            return zeta
    # unreachable for nonzero lines: (1,0) and (0,1) cannot both vanish
    raise ParabolicityError("flag line must be nonzero")


def serre_pair(R, line, motion, zeta=None, lift=None):
    """
    Residue pairing trace(R Ṽ) between a residue and a motion of its flag line.

    Ṽ is any matrix with Ṽ line = motion + c line; the value does not depend
    on the choice. Without an explicit lift, Ṽ = motion ⊗ ζ / ζ(line).

    Raises:
        ParabolicityError: for a zero line, a residue not killing the line,
            or a matrix that is not a lift of the motion
    """
    if vector_is_zero(line):
        raise ParabolicityError("flag line must be nonzero")
    scale = max(1.0, matrix_norm(R) * vector_norm(line))
    if not vector_is_zero(mat_apply(R, line), scale):
        raise ParabolicityError("residue does not kill the flag line")
    if lift is None:
        if zeta is None:
            zeta = _zeta_for(line)
        lift = mat_scale(1 / pair(zeta, line), outer(motion, zeta))
    else:
        defect = vec_sub(mat_apply(lift, line), motion)
        if not vector_is_zero(defect, max(1.0, matrix_norm(lift) * vector_norm(line))) and not parallel(defect, line):
            raise ParabolicityError("matrix is not a lift of the line motion")
    return trace2(mat_mul(R, lift))


def random_lift(line, motion, rng, mode=EXACT):
    """
    A random Ṽ with Ṽ line = motion + c line.

    ζ comes from ZETA_POOL (falling back along the pool when ζ(line) = 0),
    then random multiples of line ⊗ ζ and w ⊗ annihilator(line) are added.
    """
    start = int(rng.integers(len(ZETA_POOL)))
    zeta = None
    for k in range(len(ZETA_POOL)):
        a, b = ZETA_POOL[(start + k) % len(ZETA_POOL)]
        candidate = Covector2(to_scalar(a, mode), to_scalar(b, mode))
        if not is_zero(pair(candidate, line), vector_norm(line)):
            zeta = candidate
            break
    if zeta is None:
        raise ParabolicityError("flag line must be nonzero")
    inv = 1 / pair(zeta, line)
    c = random_scalar(rng, mode, 5)
    w = Vector2(random_scalar(rng, mode, 5), random_scalar(rng, mode, 5))
    lift = mat_scale(inv, outer(motion, zeta))
    lift = mat_add(lift, mat_scale(c * inv, outer(line, zeta)))
    return mat_add(lift, outer(w, annihilator(line)))


def _higgs_of(p, points, alpha):
    if points is None:
        points = default_points(p.n, p.mode)
    if alpha is None:
        alpha = WeightVector.uniform(p.n)
    return to_higgs(p, points, alpha)


def higgs_one_form_pullback(p, t, rng=None, points=None, alpha=None):
    """
    Higgs-side 1-form at the image of p, evaluated on the pushforward of t:
    sum_i trace(R_i Ṽ_i). With rng, each Ṽ_i is a random lift.
    """
    h = _higgs_of(p, points, alpha)
    deformation = pushforward_deformation(p, t)
    total = zero(p.mode)
    for R, line, motion in zip(h.residues, h.lines, deformation.line_motion):
        lift = random_lift(line, motion, rng, p.mode) if rng is not None else None
        total = total + serre_pair(R, line, motion, lift=lift)
    return total


def _one_form_derivative(h, p, s, t):
    """
    Directional derivative along s of the Higgs-side 1-form evaluated on the
    constant field t, with ζ held fixed:

        trace(δR^s Ṽ^t) - trace(R (v^t ⊗ ζ)) ζ(v^s) / ζ(z)^2
    """
    residue_motion = pushforward_deformation(p, s).residue_motion
    total = zero(p.mode)
    for R, dR, line, vs, vt in zip(h.residues, residue_motion, h.lines, s.v, t.v):
        zeta = _zeta_for(line)
        denom = pair(zeta, line)
        lift = mat_scale(1 / denom, outer(vt, zeta))
        d_lift = mat_scale(-pair(zeta, vs) / (denom * denom), outer(vt, zeta))
        total = total + trace2(mat_mul(dR, lift)) + trace2(mat_mul(R, d_lift))
    return total


def higgs_two_form_pullback(p, s, t, points=None, alpha=None):
    """Exterior derivative of the Higgs-side 1-form, from deformation data only."""
    h = _higgs_of(p, points, alpha)
    return _one_form_derivative(h, p, s, t) - _one_form_derivative(h, p, t, s)


def _tangent_scale(p, t):
    return p.scale() * max(1.0, max(vector_norm(x) for x in (*t.u, *t.v)))


def is_tangent(p, t):
    """True when t lies in ker d_moment at p."""
    matrix_part, pairing_part = d_moment(p, t)
    scale = _tangent_scale(p, t)
    return all(is_zero(x, scale) for x in (*matrix_part, *pairing_part))


def reduced_two_form(p, s, t):
    """
    The Liouville 2-form restricted to ker d_moment.

    Raises:
        LevelSetError: when s or t is not tangent to the level set
    """
    if not (is_tangent(p, s) and is_tangent(p, t)):
        raise LevelSetError("not tangent to level set")
    return liouville_two_form(p, s, t)


def _combine(coeffs, vectors, n, mode):
    total = TangentVector.zero(n, mode)
    for c, vec in zip(coeffs, vectors):
        total = total + vec.scale(c)
    return total


def orbit_complement(p):
    """
    Tangent vectors orthogonal to every orbit direction under the
    coordinatewise bilinear pairing (no conjugation).
    """
    tangents = tangent_basis(p)
    orbits = orbit_basis(p)
    if not tangents:
        return []
    flats = [t.to_flat() for t in tangents]
    rows = []
    for o in orbits:
        of = o.to_flat()
        rows.append([sum((a * b for a, b in zip(of, tf)), zero(p.mode)) for tf in flats])
    coefficient_vectors = nullspace(DenseMatrix.from_rows(rows, len(tangents)))
    return [_combine(c, tangents, p.n, p.mode) for c in coefficient_vectors]


def reduced_gram_matrix(p):
    complement = orbit_complement(p)
    rows = [[liouville_two_form(p, a, b) for b in complement] for a in complement]
    return DenseMatrix.from_rows(rows, len(complement))


# ---------------------------------------------------------------------------
# Verification
# ---------------------------------------------------------------------------

def _format_residual(value):
    if isinstance(value, float):
        return f"{value:.3e}"
    return str(value)


class _ResidualTracker:
    """Largest absolute (exact) or relative (approx) residual over a run."""

    def __init__(self, mode):
        self.mode = mode
        self.worst = zero(EXACT) if mode == EXACT else 0.0
        self.count = 0

    def add(self, a, b):
        self.count += 1
        diff = a - b
        if self.mode == EXACT:
            if abs(diff) > abs(self.worst):
                self.worst = diff
            return
        relative = abs(diff) / max(1.0, abs(a), abs(b))
        self.worst = max(self.worst, relative)

    def passed(self):
        if self.mode == EXACT:
            return self.worst == 0
        return self.worst <= min(RESIDUAL_BOUND, get_tolerance())

    def report(self):
        return {"trials": self.count, "max_residual": _format_residual(self.worst), "pass": self.passed()}


def random_tangent(basis, n, rng, mode):
    """Random combination of a tangent basis."""
    return _combine([random_scalar(rng, mode, 5) for _ in basis], basis, n, mode)


def verify_theorem1(p, trials, rng, points=None, alpha=None):
    """
    Compare the pulled-back Higgs forms with the Liouville forms at p.

    Runs the 1-form identity with random lifts, the 2-form identity, the
    descent of the 2-form along orbit directions and the rank of the reduced
    form. Stability is decided in exact mode only.

    Returns:
        Report dictionary with "theorem1", "two_form", "descent", "rank",
        "stability" and "mode"

    Raises:
        LevelSetError: off the level set
        StabilityError: when the image is not stable
    """
    if not is_in_level_set(p):
        raise LevelSetError("not on moment level set")
    mode = p.mode
    h = _higgs_of(p, points, alpha)
    if mode == EXACT:
        if not is_stable(h):
            raise StabilityError("stable locus required")
        stability = "stable"
    else:
        stability = "unchecked"

    basis = tangent_basis(p)
    orbits = orbit_basis(p)

    one_form = _ResidualTracker(mode)
    two_form = _ResidualTracker(mode)
    descent = _ResidualTracker(mode)
    for _ in range(trials):
        s = random_tangent(basis, p.n, rng, mode)
        t = random_tangent(basis, p.n, rng, mode)
        one_form.add(higgs_one_form_pullback(p, t, rng, h.points, h.weights), liouville_one_form(p, t))
        two_form.add(higgs_two_form_pullback(p, s, t, h.points, h.weights), reduced_two_form(p, s, t))
        for o in orbits:
            descent.add(liouville_two_form(p, o, t), zero(mode))

    expected = 2 * (p.n - 3)
    got = rank(reduced_gram_matrix(p))
    return {
        "theorem1": one_form.report(),
        "two_form": two_form.report(),
        "descent": descent.report(),
        "rank": {"expected": expected, "got": got, "pass": got == expected},
        "stability": stability,
        "mode": mode,
    }


def check_equivariance(p, trials, rng, points=None, alpha=None):
    """
    Group-action checks at p over random group elements: moment map
    conjugation, level-set invariance, invariance of the Liouville 2-form
    under the pushforward, gauge transport of the Higgs data and (exact
    mode) invariance of the stability verdict.
    """
    mode = p.mode
    h = _higgs_of(p, points, alpha)
    stable = is_stable(h) if mode == EXACT else None
    basis = tangent_basis(p)
    moment = _ResidualTracker(mode)
    form = _ResidualTracker(mode)
    level_ok = True
    gauge_ok = True
    stability_ok = True
    for _ in range(trials):
        g = random_group_element(p.n, rng, mode)
        q = act(g, p)
        if not is_in_level_set(q):
            level_ok = False
            continue
        A = g.A
        conjugated = mat_mul(mat_mul(inverse2(A), moment_matrix(p)), A)
        for a, b in zip(moment_matrix(q), conjugated):
            moment.add(a, b)
        for a, b in zip(pairings(q), pairings(p)):
            moment.add(a, b)
        s = random_tangent(basis, p.n, rng, mode)
        t = random_tangent(basis, p.n, rng, mode)
        form.add(
            liouville_two_form(q, tangent_pushforward(g, s), tangent_pushforward(g, t)),
            liouville_two_form(p, s, t),
        )
        hq = to_higgs(q, h.points, h.weights)
        if not is_gauge_equivalent(h, hq, A):
            gauge_ok = False
        if mode == EXACT and is_stable(hq) != stable:
            stability_ok = False
    return {
        "moment": moment.report(),
        "two_form": form.report(),
        "level_set": level_ok,
        "gauge": gauge_ok,
        "stability": stability_ok if mode == EXACT else "unchecked",
        "pass": moment.passed() and form.passed() and level_ok and gauge_ok and stability_ok,
    }

