import itertools
import math
import random
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from borsuk_lp.errors import CapExceededError, DomainError
from borsuk_lp.lifting import (
    LiftedConfiguration,
    Parameters,
    QuadraticForm,
    distance_from_intersection,
    enumerate_V,
    lift,
    lp_distance,
    pair_type_counts,
    quadratic_coefficients,
)

SMALL = [(n, k) for n in range(5, 11) for k in range(2, n) if 2 * k < n]
LAMBDAS = [Fraction(0), Fraction(-1, 10), Fraction(-1, 3), Fraction(-1, 2)]
PS = [1.0, 1.5, 2.0, 3.0, 7.0]


def vec(bits):
    return [int(b) for b in bits]


def test_enumerate_small():
    assert enumerate_V(3, 2).tolist() == [vec("110"), vec("101"), vec("011")]
    assert len(enumerate_V(5, 2)) == 10


def test_enumerate_cap_reports_count():
    with pytest.raises(CapExceededError) as info:
        enumerate_V(29, 9)
    assert info.value.count == 10015005


def test_lift_examples():
    half = Fraction(-1, 2)
    assert lift(vec("110"), half) == [0, half, half]
    assert lift([0] * 6, Fraction(-1, 3)) == [0] * 15
    x = vec("1101100")
    out = lift(x, 0)
    assert out.count(1) == math.comb(4, 2) and out.count(0) == len(out) - 6


def test_lift_coordinate_order():
    n = 5
    x = [1, 0, 1, 1, 0]
    lam = Fraction(-1, 7)
    expected = [x[i] * x[j] + lam * (x[i] + x[j]) for i, j in itertools.combinations(range(n), 2)]
    assert lift(x, lam) == expected


def classify(x, y):
    """Oracle: 3x3 counts by brute force over coordinate pairs."""
    table = [[0] * 3 for _ in range(3)]
    for i, j in itertools.combinations(range(len(x)), 2):
        table[y[i] + y[j]][x[i] + x[j]] += 1
    return table


@pytest.mark.parametrize("n,k", SMALL)
def test_pair_type_counts_match_enumeration(n, k):
    V = enumerate_V(n, k).tolist()
    seen = set()
    for x, y in itertools.product(V, repeat=2):
        t = sum(a * b for a, b in zip(x, y))
        got = [list(r) for r in pair_type_counts(n, k, t)]
        assert got == classify(x, y)
        assert sum(map(sum, got)) == math.comb(n, 2)
        seen.add(t)
    assert seen == set(range(k + 1))


def test_pair_type_counts_examples():
    # t = k: only the diagonal survives and it is the single-point census
    n, k = 9, 4
    table = pair_type_counts(n, k, k)
    assert table == ((math.comb(5, 2), 0, 0), (0, k * (n - k), 0), (0, 0, math.comb(4, 2)))
    assert pair_type_counts(5, 2, 0) == ((0, 2, 1), (2, 4, 0), (1, 0, 0))


@pytest.mark.parametrize("t", [-1, 5])
def test_pair_type_counts_domain(t):
    with pytest.raises(DomainError):
        pair_type_counts(9, 4, t)


def test_pair_type_counts_rejects_impossible_intersection():
    with pytest.raises(DomainError):
        pair_type_counts(6, 4, 1)  # two 4-sets in [6] share at least 2 points


def test_quadratic_at_minus_half():
    for n, k, p in [(7, 3, 1.0), (11, 4, 2.5), (29, 9, 3.0)]:
        q = quadratic_coefficients(Parameters(n, k, p, Fraction(-1, 2)))
        s = 2.0**-p
        assert q.a == pytest.approx(-4 * s, rel=1e-12)
        assert q.b == pytest.approx(s * (8 * k - 2 * n), rel=1e-12)
        assert q.c == pytest.approx(2 * k * (n - 2 * k) * s, rel=1e-12)
        assert q.t0 == pytest.approx((4 * k - n) / 4, rel=1e-12)


def test_quadratic_at_zero_lambda():
    q = quadratic_coefficients(Parameters(8, 3, 7.0, 0))
    assert (q.a, q.b, q.t0) == (-1.0, 1.0, 0.5)
    assert q.c == 6.0


def test_quadratic_corollary_instance():
    q = quadratic_coefficients(Parameters(29, 9, 3.0, Fraction(-1, 3)))
    # 9/2 - 15/(2^(p+1) + 1) at p = 3
    assert q.t0 == pytest.approx(4.5 - 15 / 17, abs=1e-12)


def test_quadratic_rejects_invalid_params():
    with pytest.raises(DomainError):
        quadratic_coefficients(Parameters(6, 3, 2.0, Fraction(-1, 2)))
    with pytest.raises(DomainError):
        quadratic_coefficients(Parameters(9, 4, 2.0, Fraction(-2, 3)))


valid_params = st.integers(min_value=5, max_value=400).flatmap(
    lambda n: st.tuples(
        st.just(n),
        st.integers(min_value=2, max_value=(n - 1) // 2),
        st.floats(min_value=1.0, max_value=40.0),
        st.floats(min_value=-0.5, max_value=0.0),
    )
).filter(lambda v: 2 * v[1] < v[0])


def random_params(rng, count):
    out = []
    while len(out) < count:
        n = rng.randint(5, 400)
        k = rng.randint(2, (n - 1) // 2)
        out.append(Parameters(n, k, rng.uniform(1, 40), Fraction(-rng.random() / 2).limit_denominator(10**9)))
    return out


def test_root_structure_random_sweep():
    rng = random.Random(2024)
    for params in random_params(rng, 10_000):
        q = quadratic_coefficients(params)
        k = params.k
        scale = abs(q.a) * k * k + abs(q.b) * k + abs(q.c)
        assert q.a < 0
        assert q.c > 0
        assert abs(q(k)) <= 1e-9 * max(1.0, scale)
        assert q.second_root(k) < 0


@settings(max_examples=300, deadline=None)
@given(valid_params)
def test_vertex_lies_below_half_k(v):
    n, k, p, lam = v
    q = quadratic_coefficients(Parameters(n, k, p, lam))
    # vertex is the midpoint of the roots k and c/(ka) < 0
    assert q.t0 < k / 2 + 1e-9


def test_lp_distance_examples():
    assert lp_distance([1, 2, 3], [1, 2, 3], 2.5) == 0.0
    assert lp_distance([3, 4], [0, 0], 2) == pytest.approx(5.0)
    assert lp_distance([1, -1, 1], [0, 0, 0], 3) == pytest.approx(3 ** (1 / 3))
    assert lp_distance([1, -7, 2], [0, 0, 0], math.inf) == 7.0
    with pytest.raises(DomainError):
        lp_distance([1, 2], [1, 2, 3], 2)


def test_distance_from_intersection_zero_at_k():
    params = Parameters(9, 4, 3.0, Fraction(-1, 3))
    q = quadratic_coefficients(params)
    assert distance_from_intersection(4, q, params.p) == pytest.approx(0.0, abs=1e-3)


@pytest.mark.parametrize("n,k,p,lam,t", [(5, 2, 2.0, Fraction(-1, 2), 0), (9, 4, 1.0, Fraction(-1, 3), 2)])
def test_distance_from_intersection_matches_explicit_pair(n, k, p, lam, t):
    q = quadratic_coefficients(Parameters(n, k, p, lam))
    V = enumerate_V(n, k).tolist()
    x = V[0]
    y = next(v for v in V if sum(a * b for a, b in zip(x, v)) == t)
    direct = lp_distance([float(c) for c in lift(x, lam)], [float(c) for c in lift(y, lam)], p)
    assert distance_from_intersection(t, q, p) == pytest.approx(direct, rel=1e-12)


def test_distance_from_intersection_rejects_negative():
    q = QuadraticForm(-1.0, 0.0, -1.0, 0.0)
    with pytest.raises(DomainError):
        distance_from_intersection(1, q, 2.0)
    assert distance_from_intersection(0, QuadraticForm(-1.0, 0.0, -1e-12, 0.0), 2.0) == 0.0


@pytest.mark.parametrize("n,k", [(5, 2), (7, 3), (8, 3), (9, 4), (10, 3)])
@pytest.mark.parametrize("lam", LAMBDAS)
def test_closed_form_law_every_pair(n, k, lam):
    conf = LiftedConfiguration(n, k, lam)
    pts = conf.points
    inter = conf.intersections()
    for p in PS:
        q = quadratic_coefficients(Parameters(n, k, p, lam))
        for i, j in itertools.combinations(range(len(conf)), 2):
            lhs = lp_distance(pts[i], pts[j], p) ** p
            assert abs(lhs - q(int(inter[i, j]))) <= 1e-9 * (1 + abs(q.c))


@pytest.mark.parametrize("n,k", SMALL)
@pytest.mark.parametrize("lam", [Fraction(-1, 10), Fraction(-1, 3), Fraction(-2, 7)])
def test_census_exact(n, k, lam):
    conf = LiftedConfiguration(n, k, lam)
    expected = Counter({Fraction(0): math.comb(n - k, 2), lam: k * (n - k), 1 + 2 * lam: math.comb(k, 2)})
    for row in range(len(conf)):
        assert Counter(conf.exact_point(row)) == expected


@pytest.mark.parametrize("n,k", SMALL)
@pytest.mark.parametrize("lam", [Fraction(-1, 10), Fraction(-1, 3), Fraction(-1, 2)])
def test_injective_for_negative_lambda(n, k, lam):
    conf = LiftedConfiguration(n, k, lam)
    assert len({tuple(map(float, r)) for r in conf.points}) == len(conf)


@pytest.mark.parametrize("n,k", SMALL)
def test_injective_at_zero_lambda(n, k):
    # the 1-coordinates are exactly the pairs inside the support, which fixes it for k >= 2
    conf = LiftedConfiguration(n, k, 0)
    assert len({tuple(r) for r in conf.points.tolist()}) == len(conf)


def test_configuration_text_round_trip(tmp_path):
    conf = LiftedConfiguration(7, 3, Fraction(-1, 3))
    text = conf.to_text()
    assert text.splitlines()[0] == "7 3 -1 3"
    assert len(text.splitlines()) == 1 + 35
    back = LiftedConfiguration.from_text(text)
    assert np.array_equal(back.points, conf.points)
    assert back.to_text() == text


def test_configuration_text_rejects_tampering():
    text = LiftedConfiguration(5, 2, Fraction(-1, 3)).to_text().splitlines()
    text[3] = text[3].replace("0.0", "0.5", 1)
    with pytest.raises(DomainError):
        LiftedConfiguration.from_text("\n".join(text))
    with pytest.raises(DomainError):
        LiftedConfiguration.from_text("5 two 1 3\n")


def test_configuration_is_read_only():
    conf = LiftedConfiguration(5, 2, Fraction(-1, 3))
    with pytest.raises(ValueError):
        conf.points[0, 0] = 1.0


def test_parameters_violations_order():
    bad = Parameters(6, 3, 0.5, Fraction(1, 3)).violations()
    assert [name for name, _ in bad] == ["k-range", "lambda-range", "p-range"]
    assert Parameters(29, 9, 3, "-1/3").lam == Fraction(-1, 3)
    assert Parameters(29, 9, 3, -0.25).lam == Fraction(-1, 4)
    assert Parameters(29, 9, 3, "-1/3").d == 406
