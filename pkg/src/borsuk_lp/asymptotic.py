"""Asymptotic growth constant c(p) with b(l_p^d) >= (c(p) + o(1)) ** sqrt(d).

With k = kappa*n and t1 ~ t0 = tau*n, Stirling gives
log2 [C(n, k) / C(n, k - t1)] ~ n * (H(kappa) - H(kappa - tau)), and
sqrt(C(n, 2)) ~ n / sqrt(2), so

    c = 2 ** (sqrt(2) * (H(kappa) - H(kappa - tau))).

All search work is done on the exponent H(kappa) - H(kappa - tau); c is only
formed when a result is returned.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import DomainError, InfeasibleError
from .numeric import binary_entropy

SQRT2 = math.sqrt(2.0)
P_MAX = 64.0
GRID_STEP = 1.0 / 256
BOX_TOL = 1e-10
FEAS_TOL = 1e-12
INV_PHI = (math.sqrt(5.0) - 1) / 2

# p-values at which reference optima are tabulated
REFERENCE_P = (
    1.00, 2.00, 2.25, 2.30, 2.35, 2.40, 2.45, 2.50, 2.75, 3.00, 3.25,
    3.50, 3.75, 4.00, 4.25, 4.50, 4.75, 5.00, 5.25, 5.50, 5.75, 6.00,
    6.25, 6.50, 6.75, 7.00, 7.50, 8.00, 8.50, 9.00, 9.50, 9.99,
)


@dataclass(frozen=True)
class AsymptoticOptimum:
    p: float
    lambda_star: float
    kappa_star: float
    tau_star: float
    c_value: float


def _ratios(lam, p):
    """|lam|^p and |1+2lam|^p, each divided by |1+lam|^p (never zero here)."""
    lam = np.asarray(lam, dtype=float)
    one = np.abs(1 + lam)
    return (np.abs(lam) / one) ** p, (np.abs(1 + 2 * lam) / one) ** p


def _tau_coeffs(lam, p):
    """tau = slope * kappa - offset, for fixed (lam, p)."""
    ar, cr = _ratios(lam, p)
    den = 2 * ar + 2 - cr
    return (3 * ar + 1 - cr) / den, ar / den


def tau_limit(kappa: float, lam: float, p: float) -> float:
    """Limit of t0 / n as n -> infinity with k / n -> kappa."""
    if not 0 < kappa <= 0.5:
        raise DomainError(f"kappa must lie in (0, 1/2], got {kappa}")
    if not -0.5 <= lam <= 0:
        raise DomainError(f"lambda must lie in [-1/2, 0], got {lam}")
    if not p >= 1:
        raise DomainError(f"p must be >= 1, got {p}")
    slope, offset = _tau_coeffs(lam, p)
    return float(slope * kappa - offset)


def _entropy_vec(x):
    x = np.asarray(x, dtype=float)
    inside = (x > 0) & (x < 1)
    xs = np.where(inside, x, 0.5)
    h = -xs * np.log2(xs) - (1 - xs) * np.log2(1 - xs)
    return np.where(inside, h, 0.0)


def _exponent_vec(kappa, lam, p):
    """H(kappa) - H(kappa - tau), or -inf where infeasible."""
    kappa = np.asarray(kappa, dtype=float)
    slope, offset = _tau_coeffs(lam, p)
    tau = slope * kappa - offset
    rest = kappa - tau
    ok = (kappa > 0) & (kappa <= 0.5) & (tau > 0) & (tau <= kappa / 2 + FEAS_TOL) & (rest > 0)
    val = _entropy_vec(kappa) - _entropy_vec(np.clip(rest, 0, 1))
    return np.where(ok, val, -np.inf)


def log_exponent(kappa: float, lam: float, p: float) -> float:
    """H(kappa) - H(kappa - tau): log2 c(p) divided by sqrt(2)."""
    tau = tau_limit(kappa, lam, p)
    if tau <= 0:
        raise InfeasibleError(f"tau = {tau} is not positive")
    if tau > kappa / 2 + FEAS_TOL:
        raise InfeasibleError(f"tau = {tau} exceeds kappa/2 = {kappa / 2}")
    if kappa - tau <= 0:
        raise InfeasibleError(f"kappa - tau = {kappa - tau} is not positive")
    return binary_entropy(kappa) - binary_entropy(kappa - tau)


def exponent_c(kappa: float, lam: float, p: float) -> float:
    return 2.0 ** (SQRT2 * log_exponent(kappa, lam, p))


def limit_p_infinity() -> float:
    return ((1 + SQRT2) / 2) ** SQRT2


def golden_section_max(f: Callable[[float], float], lo: float, hi: float, tol: float = BOX_TOL):
    """Maximize a unimodal ``f`` on [lo, hi]; returns (x, f(x)).

    The endpoints are scored too, so maxima sitting on the boundary are found
    exactly rather than approached from inside.
    """
    best = max(((lo, f(lo)), (hi, f(hi))), key=lambda pair: pair[1])
    a, b = lo, hi
    x1 = b - INV_PHI * (b - a)
    x2 = a + INV_PHI * (b - a)
    f1, f2 = f(x1), f(x2)
    while b - a > tol:
        if f1 >= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - INV_PHI * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + INV_PHI * (b - a)
            f2 = f(x2)
    inner = (x1, f1) if f1 >= f2 else (x2, f2)
    return inner if inner[1] > best[1] else best


def _kappa_interval(lam: float, p: float) -> Optional[tuple[float, float]]:
    """Feasible kappa for fixed lambda: all constraints are linear in kappa."""
    slope, offset = (float(v) for v in _tau_coeffs(lam, p))
    lo, hi = 0.0, 0.5
    # tau > 0:            slope * kappa > offset
    # tau <= kappa / 2:   (slope - 1/2) * kappa <= offset
    # kappa - tau > 0:    (1 - slope) * kappa > -offset
    for coef, rhs, upper in ((slope, offset, False), (slope - 0.5, offset, True), (1 - slope, -offset, False)):
        if coef == 0:
            if (rhs < 0) if upper else (rhs >= 0):
                return None
            continue
        bound = rhs / coef
        if (coef > 0) == upper:
            hi = min(hi, bound)
        else:
            lo = max(lo, bound)
    if lo >= hi:
        return None
    return lo, hi


def _best_kappa(lam: float, p: float, samples: int = 65) -> tuple[float, float]:
    span = _kappa_interval(lam, p)
    if span is None:
        return math.nan, -math.inf
    lo, hi = span
    ks = np.linspace(lo, hi, samples)
    vals = _exponent_vec(ks, lam, p)
    i = int(np.argmax(vals))
    if not np.isfinite(vals[i]):
        return math.nan, -math.inf
    a, b = ks[max(i - 1, 0)], ks[min(i + 1, samples - 1)]
    f = lambda k: float(_exponent_vec(k, lam, p))
    return golden_section_max(f, a, b)


def optimize_c(p: float) -> AsymptoticOptimum:
    """Maximize the exponent over kappa in (0, 1/2], lambda in [-1/2, 0].

    A 1/256 grid locates the basin; golden-section search then refines
    lambda, with kappa maximized by its own golden-section pass for every
    trial lambda.  Deterministic for fixed p.
    """
    if not 1 <= p <= P_MAX:
        raise DomainError(f"optimize_c supports 1 <= p <= {P_MAX}, got {p}")
    kappas = np.arange(1, 129) * GRID_STEP
    lams = -np.arange(0, 129) * GRID_STEP
    K, L = np.meshgrid(kappas, lams)
    grid = _exponent_vec(K, L, p)
    gi = np.unravel_index(int(np.argmax(grid)), grid.shape)
    grid_best = float(grid[gi])
    if not np.isfinite(grid_best):
        raise InfeasibleError(f"no feasible grid point for p={p}")
    lam0 = float(L[gi])

    profile = lambda lam: _best_kappa(lam, p)[1]
    lam_lo = max(-0.5, lam0 - 2 * GRID_STEP)
    lam_hi = min(0.0, lam0 + 2 * GRID_STEP)
    lam_star, val = golden_section_max(profile, lam_lo, lam_hi)
    kappa_star, val = _best_kappa(lam_star, p)
    if not val >= grid_best:
        lam_star, kappa_star, val = lam0, float(K[gi]), grid_best
    tau_star = tau_limit(kappa_star, lam_star, p)
    return AsymptoticOptimum(
        p=float(p),
        lambda_star=float(lam_star),
        kappa_star=float(kappa_star),
        tau_star=float(tau_star),
        c_value=2.0 ** (SQRT2 * val),
    )


@dataclass(frozen=True)
class CurveRow:
    p: float
    optimum: Optional[AsymptoticOptimum] = None
    error: Optional[str] = None


def _curve_row(p: float) -> CurveRow:
    try:
        return CurveRow(p, optimize_c(p))
    except (DomainError, InfeasibleError) as exc:
        return CurveRow(p, error=str(exc))


def emit_curve(p_values, jobs: int = 1) -> list[CurveRow]:
    """One row per p, in input order; failures are recorded on the row."""
    p_values = [float(p) for p in p_values]
    if jobs > 1 and len(p_values) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_curve_row, p_values))
    return [_curve_row(p) for p in p_values]


CSV_HEADER = "p,c,lambda,kappa,tau"


def curve_csv(rows: list[CurveRow]) -> str:
    lines = [CSV_HEADER]
    for row in rows:
        o = row.optimum
        if o is None:
            lines.append(f"{row.p:.6f},,,,")
        else:
            lines.append(f"{o.p:.6f},{o.c_value:.6f},{o.lambda_star:.6f},{o.kappa_star:.6f},{o.tau_star:.6f}")
    return "\n".join(lines) + "\n"
