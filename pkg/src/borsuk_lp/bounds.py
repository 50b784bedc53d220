"""Lower bounds on Borsuk numbers of l_p^d from the lifted construction.

For parameters (n, k, p, lam) the vertex t0 of the distance quadratic picks
the intersection size t1 at which the lifted set attains its diameter.  If
k - t1 is a prime power and 0 < t1 < k/2, the Frankl-Wilson theorem caps
every part of smaller diameter at C(n, k - t1 - 1) points, so at least
ceil(C(n, k) / C(n, k - t1 - 1)) parts are needed in dimension C(n, 2).
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

from .errors import DomainError, InconsistencyError, NoBracketError, NoCertificateError
from .lifting import Parameters, QuadraticForm, lam_powers, quadratic_coefficients
from .numeric import binomial_exact, ceil_div, is_prime_power

T0_RTOL = 1e-9
LAMBDA_TOL = 1e-12
SCAN_POINTS = 4096


def _t0_closed_form(n: int, k: int, p: float, lam: float) -> float:
    A, B, C = lam_powers(lam, p)
    num = (3 * k - n) * A + k * B + (0.5 - k) * C
    den = 2 * A + 2 * B - C
    return num / den


def _vertex(n: int, k: int, p: float, lam: float) -> float:
    A, B, C = lam_powers(lam, p)
    a = -2 * A - 2 * B + C
    b = 2 * (3 * k - n) * A + 2 * k * B + (1 - 2 * k) * C
    return -b / (2 * a)


def vertex_t0(params: Parameters) -> float:
    """Vertex -b/(2a), cross-checked against the direct closed form for t0."""
    q = quadratic_coefficients(params)
    direct = _t0_closed_form(params.n, params.k, params.p, params.lam_float)
    if abs(direct - q.t0) > T0_RTOL * (1 + abs(q.t0)):
        raise InconsistencyError(f"t0 formulas disagree: {direct} vs {q.t0} for {params}")
    return q.t0


def find_t1(k: int, t_max: int) -> Optional[int]:
    """Largest t in 1..t_max with k - t a prime power, or None."""
    for t in range(min(t_max, k - 1), 0, -1):
        if is_prime_power(k - t):
            return t
    return None


def integer_argmax_check(q: QuadraticForm, k: int, t1: int) -> bool:
    """Whether t1 maximizes the quadratic over the integers 0..k (ties allowed)."""
    values = [q(t) for t in range(k + 1)]
    best = max(values)
    tol = 1e-12 * max(1.0, abs(best))
    return 0 <= t1 <= k and values[t1] >= best - tol


def adjust_lambda(n: int, k: int, p: float, t1: int, lam) -> float:
    """Raise lambda towards 0 until the vertex sits within 1/2 of t1.

    The vertex moves continuously to 1/2 as lambda -> 0, so a bisection on
    [lam, 0] finds the crossing.  Returns ``lam`` unchanged when the vertex
    is already in [t1 - 1/2, t1 + 1/2].

    The vertex is not monotone in lambda.  If it starts below the window,
    the first point of a uniform scan of [lam, 0] that reaches the window
    becomes the new starting point.
    """
    lam = float(lam)
    v = _vertex(n, k, p, lam)
    if v < t1 - 0.5:
        start = lam
        scan = (start * (1 - i / SCAN_POINTS) for i in range(1, SCAN_POINTS))
        lam = next((x for x in scan if _vertex(n, k, p, x) >= t1 - 0.5), None)
        if lam is None:
            raise NoBracketError(f"vertex stays below t1 - 1/2 = {t1 - 0.5} for every lambda' in [{start}, 0]")
        v = _vertex(n, k, p, lam)
    if v <= t1 + 0.5:
        return lam
    lo, hi = lam, 0.0  # vertex(lo) > t1, vertex(hi) = 1/2 <= t1
    while hi - lo > LAMBDA_TOL:
        mid = 0.5 * (lo + hi)
        if _vertex(n, k, p, mid) > t1:
            lo = mid
        else:
            hi = mid
    # both ends are within 1/2 of t1 once the interval is this small
    for cand in (hi, lo):
        if t1 - 0.5 <= _vertex(n, k, p, cand) <= t1 + 0.5:
            return cand
    raise NoBracketError(f"bisection did not land the vertex near t1={t1}")


@dataclass(frozen=True)
class Rejection:
    """Why a parameter set does not yield a certificate."""

    params: Parameters
    reason: str
    message: str

    def __bool__(self):
        return False


@dataclass(frozen=True)
class BoundCertificate:
    params: Parameters
    t0: float
    t1: int
    adjusted_lambda: Optional[float]
    numerator: int
    denominator: int
    lower_bound: int
    d: int
    checks: tuple[tuple[str, bool], ...] = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return all(passed for _, passed in self.checks)

    @property
    def ratio(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)

    def to_dict(self) -> dict:
        return {
            "n": self.params.n,
            "k": self.params.k,
            "p": self.params.p,
            "lambda": str(self.params.lam),
            "d": self.d,
            "t0": self.t0,
            "t1": self.t1,
            "adjusted_lambda": self.adjusted_lambda,
            "numerator": str(self.numerator),
            "denominator": str(self.denominator),
            "lower_bound": str(self.lower_bound),
            "checks": {name: passed for name, passed in self.checks},
        }

    def to_record(self) -> str:
        """Flat ``key = value`` text; big integers in decimal, floats via repr."""
        adj = "none" if self.adjusted_lambda is None else repr(self.adjusted_lambda)
        lines = [
            f"n = {self.params.n}",
            f"k = {self.params.k}",
            f"p = {self.params.p!r}",
            f"lambda = {self.params.lam}",
            f"d = {self.d}",
            f"t0 = {self.t0!r}",
            f"t1 = {self.t1}",
            f"adjusted_lambda = {adj}",
            f"numerator = {self.numerator}",
            f"denominator = {self.denominator}",
            f"lower_bound = {self.lower_bound}",
        ]
        lines += [f"check.{name} = {'pass' if ok else 'fail'}" for name, ok in self.checks]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_record(cls, text: str) -> "BoundCertificate":
        fields, checks = {}, []
        for line in text.splitlines():
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise DomainError(f"not a key = value line: {line!r}")
            key, value = key.strip(), value.strip()
            if key.startswith("check."):
                checks.append((key[len("check."):], value == "pass"))
            else:
                fields[key] = value
        try:
            params = Parameters(int(fields["n"]), int(fields["k"]), float(fields["p"]), Fraction(fields["lambda"]))
            adj = fields["adjusted_lambda"]
            return cls(
                params=params,
                t0=float(fields["t0"]),
                t1=int(fields["t1"]),
                adjusted_lambda=None if adj == "none" else float(adj),
                numerator=int(fields["numerator"]),
                denominator=int(fields["denominator"]),
                lower_bound=int(fields["lower_bound"]),
                d=int(fields["d"]),
                checks=tuple(checks),
            )
        except (KeyError, ValueError) as exc:
            raise DomainError(f"incomplete or malformed certificate record: {exc}") from exc


def theorem1_bound(params: Parameters, adjust: bool = True) -> Union[BoundCertificate, Rejection]:
    """Apply the bound to ``params``; returns a certificate or a Rejection.

    With ``adjust=False`` the lambda adjustment (which only matters for the
    geometric witness, not the bound) is skipped.
    """
    bad = params.violations()
    if bad:
        return Rejection(params, *bad[0])
    n, k, p = params.n, params.k, params.p
    t0 = vertex_t0(params)
    t_max = math.floor(t0 + 0.5)
    t1 = find_t1(k, t_max)
    if t1 is None:
        return Rejection(params, "t1-existence", f"no t in 1..{t_max} with {k} - t a prime power")
    if not 2 * t1 < k:
        return Rejection(params, "t1-below-half-k", f"t1 = {t1} is not below k/2 = {k / 2}")
    if not t1 > 0:
        return Rejection(params, "t1-positive", f"t1 = {t1} is not positive")

    num = binomial_exact(n, k)
    den = binomial_exact(n, k - t1 - 1)
    bound = ceil_div(num, den)
    checks = [
        ("hypotheses", True),
        ("t0-two-formulas", True),
        ("t1-le-round-t0", t1 <= t_max),
        ("k-t1-prime-power", is_prime_power(k - t1)),
        ("t1-range", 0 < t1 and 2 * t1 < k),
        ("ceiling", bound * den >= num > (bound - 1) * den),
    ]
    adjusted = None
    if adjust:
        adjusted = adjust_lambda(n, k, p, t1, params.lam_float)
        q = quadratic_coefficients(params.with_lambda(Fraction(adjusted)))
        checks.append(("diameter-at-t1", integer_argmax_check(q, k, t1)))
    return BoundCertificate(
        params=params,
        t0=t0,
        t1=t1,
        adjusted_lambda=adjusted,
        numerator=num,
        denominator=den,
        lower_bound=bound,
        d=params.d,
        checks=tuple(checks),
    )


def n_for_dimension(d_target: int) -> int:
    """Largest n with C(n, 2) <= d_target."""
    n = (1 + math.isqrt(1 + 8 * d_target)) // 2
    while n * (n - 1) // 2 > d_target:
        n -= 1
    return n


def lambda_grid(m: int = 512) -> list[Fraction]:
    """lambda = -j / (2m) for j = 0..m."""
    return [Fraction(-j, 2 * m) for j in range(m + 1)]


@dataclass(frozen=True)
class SearchResult:
    d_target: int
    n: int
    p: float
    best: BoundCertificate
    ranked: tuple[BoundCertificate, ...]


def _rank_key(cert: BoundCertificate):
    return (-cert.lower_bound, cert.params.k, -cert.params.lam)


def _scan_k(args):
    n, k, p, grid = args
    out = []
    for lam in grid:
        cert = theorem1_bound(Parameters(n, k, p, lam), adjust=False)
        if cert:
            out.append(cert)
    return out


def search_best_bound(d_target: int, p: float, m: int = 512, jobs: int = 1, top: int = 10) -> SearchResult:
    """Best certificate over k in (1, n/2) and the lambda grid, n = n_for_dimension(d_target).

    Ties go to smaller k, then larger lambda; the reduction is a sort, so the
    result does not depend on ``jobs``.
    """
    n = n_for_dimension(d_target)
    grid = lambda_grid(m)
    tasks = [(n, k, p, grid) for k in range(2, (n + 1) // 2) if 2 * k < n]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_scan_k, tasks))
    else:
        chunks = [_scan_k(t) for t in tasks]
    certs = sorted((c for chunk in chunks for c in chunk), key=_rank_key)
    if not certs:
        raise NoCertificateError(f"no admissible (k, lambda) for d={d_target} (n={n}), p={p}")
    best = theorem1_bound(certs[0].params)
    return SearchResult(d_target, n, p, best, tuple(certs[:top]))
