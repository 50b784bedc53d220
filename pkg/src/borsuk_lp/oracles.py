"""Brute-force checks of the closed forms and of the pigeonhole chain.

Every oracle here recomputes its quantity from the enumerated point set and
only reads the closed-form results it is checking; none of them reuses the
algebra behind those results.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Optional

import numpy as np

from .bounds import BoundCertificate, adjust_lambda, theorem1_bound
from .errors import CapExceededError
from .lifting import (
    DEFAULT_ENUM_CAP,
    LiftedConfiguration,
    Parameters,
    QuadraticForm,
    coordinate_pairs,
    enumerate_V,
    lift,
    pair_type_counts,
    quadratic_coefficients,
)
from .numeric import binomial_exact, ceil_div, is_prime_power

MIS_CAP = 200
DIAMETER_RTOL = 1e-9


@dataclass
class OracleReport:
    oracle_name: str
    instance: Any
    passed: bool
    max_error: Any = 0.0
    witnesses: list = field(default_factory=list)
    skipped: bool = False
    detail: str = ""

    @property
    def status(self) -> str:
        if self.skipped:
            return "SKIP"
        return "PASS" if self.passed else "FAIL"

    def to_line(self) -> str:
        err = self.max_error if isinstance(self.max_error, str) else f"{self.max_error:.3e}"
        text = f"{self.status} {self.oracle_name} {_instance_str(self.instance)} max_error={err}"
        return f"{text} {self.detail}".rstrip()

    def to_dict(self) -> dict:
        return {
            "oracle": self.oracle_name,
            "instance": _instance_str(self.instance),
            "status": self.status,
            "max_error": self.max_error if isinstance(self.max_error, str) else float(self.max_error),
            "detail": self.detail,
            "witnesses": [str(w) for w in self.witnesses],
        }


def _instance_str(instance) -> str:
    if isinstance(instance, Parameters):
        return f"(n={instance.n},k={instance.k},p={instance.p:g},lambda={instance.lam})"
    return "(" + ",".join(str(v) for v in instance) + ")"


def _support(row) -> tuple[int, ...]:
    return tuple(int(i) + 1 for i in np.flatnonzero(row))


def _power_sums(points: np.ndarray, p: float, chunk: int = 256) -> np.ndarray:
    """Matrix of sum_l |u_l - v_l|^p over all point pairs (max for p = inf)."""
    m = points.shape[0]
    out = np.empty((m, m))
    for start in range(0, m, chunk):
        diff = np.abs(points[start:start + chunk, None, :] - points[None, :, :])
        out[start:start + chunk] = diff.max(axis=2) if math.isinf(p) else (diff**p).sum(axis=2)
    return out


def verify_distance_law(params: Parameters, cap: int = DEFAULT_ENUM_CAP, form: Optional[QuadraticForm] = None) -> OracleReport:
    """Compare every pairwise ||x* - y*||_p^p against a t^2 + b t + c.

    ``form`` overrides the coefficients under test (used for fault injection).
    """
    q = form if form is not None else quadratic_coefficients(params)
    conf = LiftedConfiguration.from_params(params, cap)
    sums = _power_sums(conf.points, params.p)
    t = conf.intersections().astype(float)
    predicted = (q.a * t + q.b) * t + q.c
    iu = np.triu_indices(len(conf), k=1)
    err = np.abs(sums[iu] - predicted[iu]) if iu[0].size else np.zeros(1)
    worst = float(err.max())
    tol = 1e-9 * (1 + abs(q.c))
    witnesses = []
    if worst > tol:
        w = int(np.argmax(err))
        i, j = iu[0][w], iu[1][w]
        witnesses.append((_support(conf.supports[i]), _support(conf.supports[j])))
    return OracleReport("distance_law", params, worst <= tol, worst, witnesses,
                        detail=f"pairs={iu[0].size}")


def _integer_argmax_set(q: QuadraticForm, k: int) -> set[int]:
    vals = [q(t) for t in range(k + 1)]
    best = max(vals)
    tol = 1e-12 * max(1.0, abs(best))
    return {t for t, v in enumerate(vals) if v >= best - tol}


def verify_diameter_realization(params: Parameters, t1: int, cap: int = DEFAULT_ENUM_CAP) -> OracleReport:
    """Check by enumeration that the diameter is attained at intersection t1."""
    conf = LiftedConfiguration.from_params(params, cap)
    sums = _power_sums(conf.points, params.p)
    np.fill_diagonal(sums, -np.inf)
    diam_p = float(sums.max())
    inter = conf.intersections()
    attaining = sums >= diam_p - DIAMETER_RTOL * max(1.0, diam_p)
    attained_t = sorted({int(v) for v in inter[attaining]})
    allowed = _integer_argmax_set(quadratic_coefficients(params), params.k)
    i, j = np.argwhere(attaining & (inter == t1))[0] if t1 in attained_t else np.argwhere(attaining)[0]
    witness = (_support(conf.supports[i]), _support(conf.supports[j]))
    passed = t1 in attained_t and set(attained_t) <= allowed
    detail = f"diameter={diam_p ** (1 / params.p):.12g} attained_at_t={attained_t}"
    if not passed:
        offending = [t for t in attained_t if t != t1 and t not in allowed] or attained_t
        detail += f" offending_t={offending}"
    return OracleReport("diameter_realization", params, passed, 0.0 if passed else f"t1={t1} not maximal",
                        [witness], detail=detail)


# --- exact maximum independent set -----------------------------------------


def _color_order(P: int, adj: list[int]) -> tuple[list[int], list[int]]:
    """Greedy sequential colouring of the vertex set P (a bitmask).

    Each colour class is an independent set of the clique graph, so the
    number of classes bounds the largest clique inside P.
    """
    order, colors = [], []
    uncolored, color = P, 0
    while uncolored:
        color += 1
        Q = uncolored
        while Q:
            low = Q & -Q
            v = low.bit_length() - 1
            Q &= ~adj[v] & ~low
            uncolored &= ~low
            order.append(v)
            colors.append(color)
    return order, colors


def max_clique(adj: list[int], anchor: Optional[int] = None) -> list[int]:
    """Exact maximum clique of a graph given as neighbour bitmasks.

    ``anchor`` restricts the search to cliques through that vertex, which is
    exact for vertex-transitive graphs.
    """
    best: list[int] = []

    def expand(clique: list[int], P: int):
        nonlocal best
        order, colors = _color_order(P, adj)
        for idx in range(len(order) - 1, -1, -1):
            if len(clique) + colors[idx] <= len(best):
                return
            v = order[idx]
            newP = P & adj[v]
            clique.append(v)
            if newP:
                expand(clique, newP)
            elif len(clique) > len(best):
                best = clique.copy()
            clique.pop()
            P &= ~(1 << v)

    if not adj:
        return []
    if anchor is None:
        expand([], (1 << len(adj)) - 1)
    else:
        best = [anchor]
        expand([anchor], adj[anchor])
    return sorted(best)


def max_family(n: int, k: int, t: int, cap: int = MIS_CAP) -> list[tuple[int, ...]]:
    """A largest family of k-subsets of [n] with no two meeting in exactly t points."""
    count = binomial_exact(n, k)
    if count > cap:
        raise CapExceededError(count, cap)
    supports = enumerate_V(n, k).astype(np.int32)
    inter = supports @ supports.T
    m = len(supports)
    # clique graph = complement of the "meet in exactly t" graph
    allowed = (inter != t)
    np.fill_diagonal(allowed, False)
    adj = [sum(1 << int(j) for j in np.flatnonzero(allowed[i])) for i in range(m)]
    # permutations of [n] act transitively on V and preserve intersection sizes
    return [_support(supports[i]) for i in max_clique(adj, anchor=0)]


def fw_max_family(n: int, k: int, t: int, cap: int = MIS_CAP) -> int:
    return len(max_family(n, k, t, cap))


# --- pigeonhole chain --------------------------------------------------------


def verify_pigeonhole_chain(params: Parameters, t1: Optional[int] = None, cap: int = MIS_CAP) -> OracleReport:
    """End-to-end: diameter at t1, exact family bound, and the part count.

    Passing ``t1`` overrides the certificate's value; the chain refuses any
    t1 that does not meet the prime-power and range hypotheses.
    """
    cert = theorem1_bound(params)
    if not isinstance(cert, BoundCertificate):
        return OracleReport("pigeonhole_chain", params, True, 0.0, skipped=True,
                            detail=f"no certificate: {cert.reason}: {cert.message}")
    n, k = params.n, params.k
    if t1 is None:
        t1 = cert.t1
    if not (0 < t1 and 2 * t1 < k and is_prime_power(k - t1)):
        return OracleReport("pigeonhole_chain", params, False, f"refused t1={t1}",
                            detail=f"t1={t1} violates 0 < t1 < k/2 with k - t1 a prime power")
    if t1 == cert.t1:
        lam_adj = cert.adjusted_lambda
    else:
        lam_adj = adjust_lambda(n, k, params.p, t1, params.lam_float)
    geo = params.with_lambda(Fraction(lam_adj))
    diam = verify_diameter_realization(geo, t1, cap=cap)
    family = max_family(n, k, t1, cap)
    alpha = len(family)
    fw_cap = binomial_exact(n, k - t1 - 1)
    parts = ceil_div(binomial_exact(n, k), alpha)
    links = {
        "diameter_at_t1": diam.passed,
        "family_le_fw_bound": alpha <= fw_cap,
        "parts_ge_certificate": parts >= cert.lower_bound,
    }
    passed = all(links.values())
    detail = (f"t1={t1} lambda'={lam_adj:.12g} max_family={alpha} fw_bound={fw_cap} "
              f"parts>={parts} certificate={cert.lower_bound} "
              + " ".join(f"{name}={'ok' if ok else 'BROKEN'}" for name, ok in links.items()))
    return OracleReport("pigeonhole_chain", params, passed, 0.0 if passed else "chain broken",
                        diam.witnesses + [family], detail=detail)


# --- census / pair-type counts ----------------------------------------------


def _pair_histograms(classes: np.ndarray, rows_i: np.ndarray, rows_j: np.ndarray) -> np.ndarray:
    codes = classes[rows_j] * 3 + classes[rows_i]  # y-class major, x-class minor
    out = np.zeros((len(rows_i), 9), dtype=np.int64)
    for code in range(9):
        out[:, code] = (codes == code).sum(axis=1)
    return out


def verify_census_and_counts(params: Parameters, trials: int = 200, seed: int = 0,
                             cap: int = DEFAULT_ENUM_CAP, exhaustive_limit: int = 100) -> OracleReport:
    """Classify coordinate pairs symbolically and match the 3x3 count table.

    A coordinate's class is x_i + x_j (0, 1 or 2 ones), i.e. the value 0,
    lam or 1 + 2 lam read symbolically, so coincident numeric values at
    lam in {0, -1/2} cannot merge classes.  The exact value census of each
    point is checked separately with rational arithmetic.
    """
    n, k, lam = params.n, params.k, params.lam
    supports = enumerate_V(n, k, cap)
    m = len(supports)
    ci, cj = coordinate_pairs(n)
    classes = supports[:, ci].astype(np.int64) + supports[:, cj]

    mismatches = []
    expected_census: dict[Fraction, int] = {}
    for value, count in ((Fraction(0), binomial_exact(n - k, 2)), (lam, k * (n - k)), (1 + 2 * lam, binomial_exact(k, 2))):
        expected_census[value] = expected_census.get(value, 0) + count
    census_rows = range(m) if m <= exhaustive_limit else random.Random(seed).sample(range(m), min(trials, m))
    for r in census_rows:
        got: dict[Fraction, int] = {}
        for v in lift(supports[r].tolist(), lam):
            got[v] = got.get(v, 0) + 1
        if got != expected_census:
            mismatches.append(("census", _support(supports[r]), got))
            break

    if m <= exhaustive_limit:
        iu = np.triu_indices(m)  # includes x = y
        rows_i, rows_j = iu
    else:
        rng = random.Random(seed)
        picks = [(rng.randrange(m), rng.randrange(m)) for _ in range(trials)]
        rows_i = np.array([a for a, _ in picks])
        rows_j = np.array([b for _, b in picks])
    hist = _pair_histograms(classes, rows_i, rows_j)
    t_vals = (supports[rows_i].astype(np.int64) * supports[rows_j]).sum(axis=1)
    tables = {}
    for idx in range(len(rows_i)):
        t = int(t_vals[idx])
        if t not in tables:
            tables[t] = np.array(pair_type_counts(n, k, t)).ravel()
        if not np.array_equal(hist[idx], tables[t]):
            mismatches.append(("table", _support(supports[rows_i[idx]]), _support(supports[rows_j[idx]]), t))
            break
    passed = not mismatches
    return OracleReport("census_and_counts", params, passed, 0.0 if passed else "exact mismatch",
                        mismatches, detail=f"pairs={len(rows_i)} points_censused={len(census_rows)}")


# --- batch runner ------------------------------------------------------------

LAW_INSTANCES = ((5, 2), (7, 3), (8, 3), (9, 4))
LAW_LAMBDAS = (Fraction(0), Fraction(-1, 10), Fraction(-1, 3), Fraction(-1, 2))
LAW_PS = (1.0, 1.5, 2.0, 3.0, 7.0)
# exact search takes ~20 s here (the answer is a 56-set star); full scope only
SLOW_FW = {(9, 4, 0)}


def census_instances(max_points: int) -> list[tuple[int, int]]:
    """All (n, k) with 1 < k < n/2 and C(n, k) <= max_points."""
    out = []
    for k in range(2, 64):
        n = 2 * k + 1
        if binomial_exact(n, k) > max_points:
            break
        while binomial_exact(n, k) <= max_points:
            out.append((n, k))
            n += 1
    return sorted(out)


def fw_instances(max_points: int = MIS_CAP) -> list[tuple[int, int, int]]:
    """In-cap (n, k, t) meeting the Frankl-Wilson hypotheses."""
    out = []
    for n, k in census_instances(max_points):
        for t in range(0, k):
            if 2 * t < k and is_prime_power(k - t):
                out.append((n, k, t))
    return out


def _negated(report: OracleReport, name: str) -> OracleReport:
    return OracleReport(f"negative:{name}", report.instance, not report.passed, report.max_error,
                        report.witnesses, detail=f"corrupted input -> {report.status}")


def run_suite(scope: str = "quick", seed: int = 0, enum_cap: int = DEFAULT_ENUM_CAP,
              mis_cap: int = MIS_CAP, inject_fault: bool = False) -> list[OracleReport]:
    """Run every oracle on the desk-scale instances of ``scope``.

    ``inject_fault`` flips the sign of b in the distance law under test, to
    confirm that the suite notices a corrupted build.
    """
    if scope not in ("quick", "full"):
        raise ValueError(f"unknown scope {scope!r}")
    reports = []
    law = list(LAW_INSTANCES) + ([(11, 5)] if scope == "full" else [])
    for n, k in law:
        for lam in LAW_LAMBDAS:
            for p in LAW_PS:
                params = Parameters(n, k, p, lam)
                form = None
                if inject_fault:
                    q = quadratic_coefficients(params)
                    form = QuadraticForm(q.a, -q.b, q.c, -q.t0)
                reports.append(verify_distance_law(params, enum_cap, form))

    census = census_instances(150) + ([(11, 5)] if scope == "full" else [])
    for n, k in census:
        for lam in (Fraction(0), Fraction(-1, 3), Fraction(-1, 2)):
            reports.append(verify_census_and_counts(Parameters(n, k, 2.0, lam), seed=seed,
                                                    cap=enum_cap, exhaustive_limit=150))

    for n, k, p, t1 in ((7, 3, 2.0, 1), (9, 4, 3.0, 2)):
        lam = adjust_lambda(n, k, p, t1, -0.5)
        reports.append(verify_diameter_realization(Parameters(n, k, p, Fraction(lam)), t1, enum_cap))

    for n, k, t in fw_instances(mis_cap):
        if scope == "quick" and (n, k, t) in SLOW_FW:
            continue
        alpha = fw_max_family(n, k, t, mis_cap)
        bound = binomial_exact(n, k - t - 1)
        reports.append(OracleReport("fw_family", (n, k, t), alpha <= bound, 0.0 if alpha <= bound else "exceeds",
                                    detail=f"max_family={alpha} fw_bound={bound}"))

    for params in (Parameters(5, 2, 2.0, Fraction(-1, 2)), Parameters(7, 3, 2.0, Fraction(-1, 2)),
                   Parameters(9, 4, 2.0, Fraction(-1, 10))):
        reports.append(verify_pigeonhole_chain(params, cap=mis_cap))

    # negative controls: each oracle must fail on corrupted input
    p73 = Parameters(7, 3, 2.0, Fraction(-1, 3))
    q = quadratic_coefficients(p73)
    reports.append(_negated(verify_distance_law(p73, enum_cap, QuadraticForm(q.a, -q.b, q.c, -q.t0)), "distance_law"))
    reports.append(_negated(verify_diameter_realization(Parameters(9, 4, 3.0, Fraction(-1, 2)), 1, enum_cap),
                            "diameter_realization"))
    reports.append(_negated(verify_pigeonhole_chain(Parameters(7, 3, 2.0, Fraction(-1, 2)), t1=2, cap=mis_cap),
                            "pigeonhole_chain"))
    return reports
