import math
from fractions import Fraction

import numpy as np
import pytest

from borsuk_lp.asymptotic import (
    CSV_HEADER,
    curve_csv,
    emit_curve,
    exponent_c,
    golden_section_max,
    limit_p_infinity,
    log_exponent,
    optimize_c,
    tau_limit,
)
from borsuk_lp.bounds import theorem1_bound, vertex_t0
from borsuk_lp.errors import DomainError, InfeasibleError
from borsuk_lp.lifting import Parameters
from borsuk_lp.numeric import binary_entropy, log2_binomial

from reference_values import REFERENCE_OPTIMA

KK = (3**0.75 / 2) ** math.sqrt(2)


def test_tau_limit_examples():
    assert tau_limit(0.5, -0.5, 1.0) == pytest.approx(0.25, abs=1e-15)
    assert tau_limit(0.5, -0.5, 2.0) == pytest.approx(0.25, abs=1e-15)
    assert tau_limit(0.3215, -0.3095, 4.0) == pytest.approx(0.1460, abs=1e-4)


@pytest.mark.parametrize("kappa,lam,p", [(0.3, -0.31, 4.0), (0.45, -0.4, 2.4), (0.2, -0.1, 1.5), (0.49, -0.5, 7.0)])
def test_tau_limit_matches_finite_vertex(kappa, lam, p):
    n = 10_000
    k = round(kappa * n)
    t0 = vertex_t0(Parameters(n, k, p, Fraction(lam).limit_denominator(10**6)))
    assert abs(tau_limit(k / n, lam, p) - t0 / n) <= 5 / n


@pytest.mark.parametrize("args", [(0.0, -0.3, 2), (0.6, -0.3, 2), (0.3, 0.1, 2), (0.3, -0.6, 2), (0.3, -0.3, 0.5)])
def test_tau_limit_domain(args):
    with pytest.raises(DomainError):
        tau_limit(*args)


def test_exponent_kahn_kalai_constant():
    value = exponent_c(0.5, -0.5, 2.0)
    assert value == pytest.approx(1.20321, abs=5e-5)
    assert abs(value - KK) <= 1e-9


@pytest.mark.parametrize("p", [1.0, 1.3, 2.0, 3.7, 10.0, 50.0])
def test_exponent_at_minus_half_is_p_independent(p):
    assert abs(exponent_c(0.5, -0.5, p) - KK) <= 1e-9


def test_exponent_tends_to_one_as_tau_vanishes():
    # at lambda = -1/2, tau = kappa - 1/4, so kappa -> 1/4 sends tau -> 0
    values = [exponent_c(0.25 + eps, -0.5, 2.0) for eps in (1e-2, 1e-4, 1e-6)]
    assert values[0] > values[1] > values[2] > 1
    assert values[2] == pytest.approx(1.0, abs=1e-5)


def test_exponent_infeasible():
    with pytest.raises(InfeasibleError):
        exponent_c(0.2, -0.5, 2.0)  # tau < 0
    with pytest.raises(InfeasibleError):
        exponent_c(0.02, -0.3, 4.0)  # tau < 0 away from lambda = -1/2
    # the vertex never passes k/2, so tau <= kappa/2 holds on the whole domain
    for lam in (-0.5, -0.45, -0.3, -0.1, 0.0):
        assert tau_limit(0.5, lam, 3.0) <= 0.25 + 1e-15


def test_entropy_is_the_stirling_limit_of_log_binomials():
    # independent route: exact log-binomials at large n
    n = 20_000
    for kappa in (0.1, 0.3, 0.5):
        assert log2_binomial(n, round(kappa * n)) / n == pytest.approx(binary_entropy(kappa), abs=2 * math.log2(n) / n)


def test_golden_section_on_known_functions():
    x, fx = golden_section_max(lambda t: -(t - 0.3) ** 2, 0.0, 1.0)
    assert x == pytest.approx(0.3, abs=1e-8) and fx == pytest.approx(0.0, abs=1e-15)
    x, _ = golden_section_max(lambda t: t, 0.0, 1.0)
    assert x == 1.0
    x, _ = golden_section_max(lambda t: -t, 0.0, 1.0)
    assert x == 0.0


@pytest.mark.parametrize("p,c,lam,kappa,tau", [(2.0, 1.2032, -0.5, 0.5, 0.25), (4.5, 1.2724, -0.3085, 0.3120, 0.1455)])
def test_optimize_examples(p, c, lam, kappa, tau):
    opt = optimize_c(p)
    assert opt.c_value == pytest.approx(c, abs=5e-4)
    assert opt.lambda_star == pytest.approx(lam, abs=0.01)
    assert opt.kappa_star == pytest.approx(kappa, abs=0.01)
    assert opt.tau_star == pytest.approx(tau, abs=0.01)


@pytest.mark.parametrize("row", REFERENCE_OPTIMA, ids=lambda r: f"p={r[0]}")
def test_optimize_matches_reference_rows(row):
    p, neg_lam, kappa, tau, c = row
    opt = optimize_c(p)
    assert abs(opt.c_value - c) <= 5e-4
    assert abs(-opt.lambda_star - neg_lam) <= 0.01
    assert abs(opt.kappa_star - kappa) <= 0.01
    assert abs(opt.tau_star - tau) <= 0.01


def test_optimum_invariants():
    for p in (1.0, 2.0, 2.3, 3.0, 6.0, 12.0):
        opt = optimize_c(p)
        assert 0 < opt.tau_star <= opt.kappa_star / 2 + 1e-12
        if p > 2.05:
            assert opt.tau_star < opt.kappa_star / 2
        assert abs(opt.c_value - 2 ** (math.sqrt(2) * (binary_entropy(opt.kappa_star)
                                                        - binary_entropy(opt.kappa_star - opt.tau_star)))) <= 1e-9


@pytest.mark.parametrize("p", [2.0, 3.0, 5.5, 9.0])
def test_refinement_beats_independent_grid(p):
    best = -math.inf
    for kappa in np.arange(1, 33) / 64:
        for lam in -np.arange(0, 33) / 64:
            try:
                best = max(best, log_exponent(float(kappa), float(lam), p))
            except InfeasibleError:
                pass
    assert math.log2(optimize_c(p).c_value) / math.sqrt(2) >= best - 1e-15


def test_monotone_and_plateau():
    grid = [1 + 0.25 * i for i in range(37)]
    values = [optimize_c(p).c_value for p in grid]
    assert all(b >= a - 1e-12 for a, b in zip(values, values[1:]))
    plateau = [v for p, v in zip(grid, values) if p <= 2]
    assert max(plateau) - min(plateau) <= 2e-4


def test_limit_value():
    assert limit_p_infinity() == pytest.approx(((1 + math.sqrt(2)) / 2) ** math.sqrt(2), rel=1e-15)
    assert 1.304 <= limit_p_infinity() < 1.305


def test_large_p_approaches_limit():
    lim = limit_p_infinity()
    c30 = optimize_c(30).c_value
    assert 1.3042 <= c30 <= lim
    assert abs(optimize_c(64).c_value - lim) <= 0.003
    with pytest.raises(DomainError):
        optimize_c(65)


@pytest.mark.parametrize("p,kappa_star,lam_star,log2c", [(2.0, None, -0.5, None), (4.0, None, None, None)])
def test_finite_n_consistency(p, kappa_star, lam_star, log2c):
    opt = optimize_c(p)
    n = 2000
    k = min(round(opt.kappa_star * n), (n - 1) // 2)  # need k < n/2 strictly
    lam = Fraction(opt.lambda_star).limit_denominator(10**6)
    cert = theorem1_bound(Parameters(n, k, p, lam), adjust=False)
    rate = (math.log2(cert.numerator) - math.log2(cert.denominator)) / math.sqrt(math.comb(n, 2))
    assert abs(rate - math.log2(opt.c_value)) <= 0.01


def test_emit_curve_order_and_errors():
    rows = emit_curve([3.0, 0.5, 1.0, 2.0])
    assert [r.p for r in rows] == [3.0, 0.5, 1.0, 2.0]
    assert rows[1].optimum is None and "p" in rows[1].error
    # plateau: p = 1 and p = 2 print the same row apart from p
    csv_rows = curve_csv(rows).splitlines()
    assert csv_rows[3].split(",")[1:] == csv_rows[4].split(",")[1:]


def test_emit_curve_parallel_is_identical():
    grid = [1.5, 2.5, 3.5, 4.5]
    assert emit_curve(grid, jobs=2) == emit_curve(grid)


def test_curve_csv_format():
    text = curve_csv(emit_curve([2.25, 0.1]))
    lines = text.splitlines()
    assert lines[0] == CSV_HEADER == "p,c,lambda,kappa,tau"
    fields = lines[1].split(",")
    assert fields[0] == "2.250000" and fields[1] == "1.203403"
    assert all(len(f.split(".")[1]) == 6 for f in fields)
    assert lines[2] == "0.100000,,,,"
