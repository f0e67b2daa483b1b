from fractions import Fraction

import numpy as np
import pytest

from scalar_linalg import (
    APPROX,
    EXACT,
    QI,
    Matrix2,
    DenseMatrix,
    inverse2,
    mat_mul,
    matrix_norm,
    rank,
    span_contains,
    trace2,
)
from hyperpolygon import (
    GroupElement,
    HyperpolygonPoint,
    LieAlgebraElement,
    TangentVector,
    WeightVector,
    act,
    d_moment,
    dimension_counts,
    group_element_from_dict,
    group_element_to_dict,
    infinitesimal_action,
    is_in_level_set,
    linearization_matrix,
    moment_matrix,
    orbit_basis,
    pairings,
    point_from_dict,
    point_to_dict,
    random_group_element,
    random_lie_element,
    random_tangent_vector,
    sample_collinear,
    sample_level_set,
    tangent_basis,
    tangent_pushforward,
    y_system_matrix,
)
from hyperpoly_errors import ConfigError, MalformedInputError, SamplingError
from tests.instances import qi_covector, qi_vector, zero_field_point


def flat_moment(p, t):
    matrix_part, pairing_part = d_moment(p, t)
    return tuple(matrix_part) + tuple(pairing_part)


class TestWeightVector:
    def test_parse(self):
        w = WeightVector.parse("1/3, 1/3,1/2,1/2")
        assert w.values == (Fraction(1, 3), Fraction(1, 3), Fraction(1, 2), Fraction(1, 2))
        assert w.total() == Fraction(5, 3)
        assert w.to_json() == ["1/3", "1/3", "1/2", "1/2"]

    @pytest.mark.parametrize("text", ["1/3,1/3", "0,1/2,1/2", "1/2,1/2,1", "a,b,c"])
    def test_invalid(self, text):
        with pytest.raises(ConfigError):
            WeightVector.parse(text)


class TestPoints:
    def test_zero_z_rejected(self):
        with pytest.raises(ValueError):
            HyperpolygonPoint((qi_covector(0, 0),) * 3, (qi_vector(1, 0), qi_vector(0, 0), qi_vector(0, 1)))

    def test_hand_point_is_on_level_set(self, hand_point):
        assert is_in_level_set(hand_point)
        assert moment_matrix(hand_point) == Matrix2(QI(0), QI(0), QI(0), QI(0))
        assert all(c == 0 for c in pairings(hand_point))
        assert hand_point.mode == EXACT

    def test_nonzero_pairing_is_off_level_set(self):
        z = (qi_vector(1, 0), qi_vector(0, 1), qi_vector(1, 1))
        y = (qi_covector(1, 0), qi_covector(0, 0), qi_covector(0, 0))
        assert not is_in_level_set(HyperpolygonPoint(y, z))

    def test_zero_covectors_are_on_level_set(self):
        assert is_in_level_set(zero_field_point(5))

    def test_json_round_trip_exact(self, hand_point):
        data = point_to_dict(hand_point)
        assert list(data) == ["n", "mode", "z", "y"]
        assert data["z"][0] == [["1/1", "0/1"], ["0/1", "0/1"]]
        assert point_from_dict(data) == hand_point

    @pytest.mark.parametrize("data", [
        {},
        {"n": 2, "mode": "exact", "z": [], "y": []},
        {"n": 1, "mode": "exact", "z": [[["1/1", "0/1"], ["x", "0/1"]]], "y": [[["0/1", "0/1"], ["0/1", "0/1"]]]},
        {"n": 1, "mode": "fuzzy", "z": [], "y": []},
    ])
    def test_malformed_json(self, data):
        with pytest.raises(MalformedInputError):
            point_from_dict(data)


class TestMomentMap:
    def test_trace_identity(self, rng):
        for _ in range(100):
            p = HyperpolygonPoint(
                tuple(qi_covector(int(a), int(b)) for a, b in rng.integers(-5, 6, (4, 2))),
                tuple(qi_vector(int(a) or 1, int(b)) for a, b in rng.integers(-5, 6, (4, 2))),
            )
            t = random_tangent_vector(4, rng)
            assert trace2(moment_matrix(p)) == sum(pairings(p), QI(0))
            matrix_part, pairing_part = d_moment(p, t)
            assert trace2(matrix_part) == sum(pairing_part, QI(0))

    def test_linearization_matrix_matches_d_moment(self, hand_point, rng):
        matrix = linearization_matrix(hand_point)
        assert matrix.shape == (8, 16)
        for _ in range(10):
            t = random_tangent_vector(4, rng)
            assert matrix.apply(t.to_flat()) == flat_moment(hand_point, t)

    def test_zero_tangent(self, hand_point):
        assert all(x == 0 for x in flat_moment(hand_point, TangentVector.zero(4)))


class TestGroupAction:
    def test_identity_action(self, hand_point):
        assert act(GroupElement.identity(4), hand_point) == hand_point

    def test_scaling_one_slot(self, hand_point):
        g = GroupElement(Matrix2(QI(1), QI(0), QI(0), QI(1)), (QI(2), QI(1), QI(1), QI(1)))
        q = act(g, hand_point)
        assert q.z[0] == qi_vector(2, 0)
        assert q.y[0] == qi_covector(0, 1)
        assert q.z[1:] == hand_point.z[1:]
        assert is_in_level_set(q)

    def test_det_one_required(self):
        with pytest.raises(ValueError):
            GroupElement(Matrix2(QI(2), QI(0), QI(0), QI(1)), (QI(1),) * 3)

    def test_sign_pair_acts_identically(self, hand_point):
        g = GroupElement(Matrix2(QI(-1), QI(0), QI(0), QI(-1)), (QI(-1),) * 4)
        assert g.acts_like(GroupElement.identity(4), hand_point)

    def test_equivariance(self, rng):
        for _ in range(100):
            p = sample_level_set(4, None, rng)
            g = random_group_element(4, rng)
            q = act(g, p)
            A = g.A
            assert moment_matrix(q) == mat_mul(mat_mul(inverse2(A), moment_matrix(p)), A)
            assert pairings(q) == pairings(p)
            assert is_in_level_set(q)

    def test_group_element_json(self, rng):
        g = random_group_element(4, rng)
        assert group_element_from_dict(group_element_to_dict(g)) == g

    def test_tangent_pushforward_preserves_tangency(self, rng):
        p = sample_level_set(5, None, rng)
        g = random_group_element(5, rng)
        q = act(g, p)
        for t in tangent_basis(p):
            assert all(x == 0 for x in flat_moment(q, tangent_pushforward(g, t)))


class TestInfinitesimalAction:
    def test_zero_element(self, hand_point):
        xi = LieAlgebraElement(Matrix2(QI(0), QI(0), QI(0), QI(0)), (QI(0),) * 4)
        assert infinitesimal_action(xi, hand_point) == TangentVector.zero(4)

    def test_scaling_direction(self, hand_point):
        xi = LieAlgebraElement(Matrix2(QI(0), QI(0), QI(0), QI(0)), (QI(1), QI(0), QI(0), QI(0)))
        t = infinitesimal_action(xi, hand_point)
        assert t.u[0] == qi_covector(0, -2)
        assert t.v[0] == hand_point.z[0]
        assert all(u == qi_covector(0, 0) for u in t.u[1:])

    def test_traceless_required(self):
        with pytest.raises(ValueError):
            LieAlgebraElement(Matrix2(QI(1), QI(0), QI(0), QI(1)), (QI(0),) * 3)

    def test_orbit_directions_are_tangent(self, rng):
        for _ in range(20):
            p = sample_level_set(5, None, rng)
            xi = random_lie_element(5, rng)
            assert all(x == 0 for x in flat_moment(p, infinitesimal_action(xi, p)))


class TestSampling:
    @pytest.mark.parametrize("n", [4, 5, 6])
    def test_samples_lie_on_level_set(self, n, rng):
        for _ in range(20):
            p = sample_level_set(n, WeightVector.uniform(n), rng)
            assert p.n == n
            assert is_in_level_set(p)
            assert any(c != 0 for w in p.y for c in w)

    def test_y_solution_dimension(self, rng):
        for n in (4, 5):
            p = sample_level_set(n, None, rng)
            y_dim = 2 * n - rank(y_system_matrix(p.z))
            assert y_dim == n - 3

    def test_n3_rejected(self, rng):
        with pytest.raises(SamplingError):
            sample_level_set(3, None, rng)

    def test_weights_must_match(self, rng):
        with pytest.raises(ConfigError):
            sample_level_set(5, WeightVector.uniform(4), rng)

    def test_deterministic_from_seed(self):
        a = sample_level_set(5, None, np.random.default_rng(3))
        b = sample_level_set(5, None, np.random.default_rng(3))
        assert a == b

    def test_approx_samples(self, rng):
        p = sample_level_set(5, None, rng, APPROX)
        assert p.mode == APPROX
        assert is_in_level_set(p)
        assert matrix_norm(moment_matrix(p)) < 1e-6 * p.scale()

    def test_collinear(self, rng):
        for n in (3, 4, 6):
            p = sample_collinear(n, rng)
            assert is_in_level_set(p)
            assert all(rank(DenseMatrix.from_rows([p.z[0], z])) == 1 for z in p.z)


class TestDimensions:
    @pytest.mark.parametrize("n", [4, 5])
    def test_generic_counts(self, n, rng):
        p = sample_level_set(n, None, rng)
        counts = dimension_counts(p)
        assert counts["tangent"]["got"] == 3 * n - 3
        assert counts["orbit"]["got"] == n + 3
        assert counts["quotient"]["got"] == 2 * (n - 3)

    def test_orbit_basis_in_tangent_span(self, rng):
        p = sample_level_set(4, None, rng)
        basis = [t.to_flat() for t in tangent_basis(p)]
        for o in orbit_basis(p):
            assert span_contains(basis, o.to_flat())

    def test_orbit_rank_drops_at_degenerate_point(self):
        z = tuple(qi_vector(1, 0) for _ in range(4))
        y = tuple(qi_covector(0, 0) for _ in range(4))
        p = HyperpolygonPoint(y, z)
        flats = [o.to_flat() for o in orbit_basis(p)]
        assert rank(DenseMatrix.from_rows(flats, 16)) < 7


@pytest.mark.slow
class TestAtScale:
    def test_five_hundred_samples_on_level_set(self, rng):
        for k in range(500):
            n = 4 + k % 3
            p = sample_level_set(n, None, rng)
            assert p.n == n
            assert is_in_level_set(p)
