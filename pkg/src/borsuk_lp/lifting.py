"""Lifting of k-subsets of [n] into l_p^d, d = C(n, 2), and the distance law.

A 0/1 vector x with k ones is sent to x* with coordinates
``x_i * x_j + lam * (x_i + x_j)`` for i < j, in lexicographic (i, j) order.
For two such vectors sharing t ones, ``||x* - y*||_p ** p`` is a concave
quadratic in t whose coefficients depend only on (n, k, p, lam).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import CapExceededError, DegenerateFormError, DomainError
from .numeric import binomial_exact

DEFAULT_ENUM_CAP = 10**7
CLAMP_TOL = 1e-9
NEGATIVE_TOL = 1e-6


def as_fraction(value) -> Fraction:
    """Parse a rational such as ``-1/3``, a decimal string, or a number."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        return Fraction(value).limit_denominator(10**12)
    try:
        return Fraction(str(value).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise DomainError(f"cannot read {value!r} as a rational number") from exc


@dataclass(frozen=True)
class Parameters:
    """One instance (n, k, p, lam) of the construction.

    Construction never raises on a hypothesis violation; call
    :meth:`violations` (or :meth:`validate`) to check the theorem's gates.
    """

    n: int
    k: int
    p: float
    lam: Fraction

    def __post_init__(self):
        object.__setattr__(self, "lam", as_fraction(self.lam))
        object.__setattr__(self, "p", float(self.p))

    @property
    def d(self) -> int:
        return binomial_exact(self.n, 2)

    @property
    def lam_float(self) -> float:
        return float(self.lam)

    def violations(self) -> list[tuple[str, str]]:
        out = []
        if not (1 < self.k and 2 * self.k < self.n):
            out.append(("k-range", f"need 1 < k < n/2, got n={self.n}, k={self.k}"))
        if not (Fraction(-1, 2) <= self.lam <= 0):
            out.append(("lambda-range", f"need -1/2 <= lambda <= 0, got {self.lam}"))
        if not (math.isfinite(self.p) and self.p >= 1):
            out.append(("p-range", f"need finite p >= 1, got {self.p}"))
        return out

    def validate(self) -> "Parameters":
        bad = self.violations()
        if bad:
            raise DomainError("; ".join(msg for _, msg in bad))
        return self

    def with_lambda(self, lam) -> "Parameters":
        return Parameters(self.n, self.k, self.p, lam)


@dataclass(frozen=True)
class QuadraticForm:
    """Coefficients of ``||x* - y*||_p ** p = a t^2 + b t + c``."""

    a: float
    b: float
    c: float
    t0: float

    def __call__(self, t):
        return (self.a * t + self.b) * t + self.c

    def second_root(self, k: int) -> float:
        """The root other than t = k (product of roots is c/a)."""
        return self.c / (k * self.a)


def lam_powers(lam: float, p: float) -> tuple[float, float, float]:
    """(|lam|^p, |1+lam|^p, |1+2 lam|^p) with 0^p = 0."""
    lam = float(lam)
    return abs(lam) ** p, abs(1 + lam) ** p, abs(1 + 2 * lam) ** p


def quadratic_coefficients(params: Parameters) -> QuadraticForm:
    params.validate()
    n, k = params.n, params.k
    A, B, C = lam_powers(params.lam_float, params.p)
    a = -2 * A - 2 * B + C
    b = 2 * (3 * k - n) * A + 2 * k * B + (1 - 2 * k) * C
    c = 2 * k * (n - 2 * k) * A + k * (k - 1) * C
    if not a < 0:
        raise DegenerateFormError(f"leading coefficient {a} is not negative for {params}")
    return QuadraticForm(a, b, c, -b / (2 * a))


def enumerate_V(n: int, k: int, cap: int = DEFAULT_ENUM_CAP) -> np.ndarray:
    """All k-subsets of [n] as rows of a 0/1 matrix, in combinations order.

    Row order is 11..100..0 first, i.e. the order of
    ``itertools.combinations(range(n), k)``.
    """
    if not 1 <= k <= n:
        raise DomainError(f"enumerate_V needs 1 <= k <= n, got n={n}, k={k}")
    count = binomial_exact(n, k)
    if count > cap:
        raise CapExceededError(count, cap)
    out = np.zeros((count, n), dtype=np.int8)
    for row, support in enumerate(itertools.combinations(range(n), k)):
        out[row, list(support)] = 1
    return out


def coordinate_pairs(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Index arrays (i, j), i < j, in lexicographic order."""
    i, j = np.triu_indices(n, k=1)
    return i, j


def lift(x: Sequence[int], lam):
    """Lift one 0/1 vector. Exact if ``lam`` is a Fraction or int."""
    n = len(x)
    if any(v not in (0, 1) for v in x):
        raise DomainError("lift expects a 0/1 vector")
    return [
        x[i] * x[j] + lam * (x[i] + x[j])
        for i in range(n)
        for j in range(i + 1, n)
    ]


def lift_matrix(vectors: np.ndarray, lam: float) -> np.ndarray:
    """Vectorized :func:`lift` over the rows of ``vectors``."""
    i, j = coordinate_pairs(vectors.shape[1])
    xi = vectors[:, i].astype(float)
    xj = vectors[:, j].astype(float)
    return xi * xj + float(lam) * (xi + xj)


def pair_type_counts(n: int, k: int, t: int) -> tuple[tuple[int, ...], ...]:
    """Number of coordinates (i, j) with each (y-class, x-class) combination.

    Rows are indexed by the class of y_{ij}, columns by the class of x_{ij},
    in the order 0, lam, 1 + 2 lam.
    """
    if t < 0 or t > k or 2 * k - t > n:
        raise DomainError(f"no pair of {k}-subsets of [{n}] meets in {t} points")
    r = n - 2 * k + t  # positions outside both supports
    s = k - t  # positions in exactly one of the supports (each side)
    c2 = lambda m: m * (m - 1) // 2
    return (
        (c2(r), r * s, c2(s)),
        (r * s, s * s + t * r, t * s),
        (c2(s), t * s, c2(t)),
    )


def lp_distance(u, v, p: float) -> float:
    """l_p distance; ``p = math.inf`` gives the max norm."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape:
        raise DomainError(f"length mismatch: {u.shape} vs {v.shape}")
    diff = np.abs(u - v)
    if diff.size == 0:
        return 0.0
    if math.isinf(p):
        return float(diff.max())
    if p < 1:
        raise DomainError(f"p must be >= 1, got {p}")
    return float(np.sum(diff**p) ** (1.0 / p))


def distance_from_intersection(t: int, q: QuadraticForm, p: float) -> float:
    value = q(t)
    if value < -NEGATIVE_TOL:
        raise DomainError(f"distance law is negative ({value}) at t={t}; inputs are inconsistent")
    if value < CLAMP_TOL:
        value = max(value, 0.0)
    return value ** (1.0 / p)


class LiftedConfiguration:
    """The lifted point set {x* : x in V} for fixed (n, k, lam).

    Points are held as a float matrix; ``supports`` keeps the originating
    0/1 vectors in the same row order.  Instances are read-only.
    """

    def __init__(self, n: int, k: int, lam, cap: int = DEFAULT_ENUM_CAP):
        self.n = n
        self.k = k
        self.lam = as_fraction(lam)
        self.supports = enumerate_V(n, k, cap)
        self.points = lift_matrix(self.supports, float(self.lam))
        self.supports.setflags(write=False)
        self.points.setflags(write=False)

    @classmethod
    def from_params(cls, params: Parameters, cap: int = DEFAULT_ENUM_CAP):
        return cls(params.n, params.k, params.lam, cap)

    @property
    def d(self) -> int:
        return self.points.shape[1]

    def __len__(self):
        return self.points.shape[0]

    def intersections(self) -> np.ndarray:
        s = self.supports.astype(np.int32)
        return s @ s.T

    def exact_point(self, row: int) -> list:
        return lift(self.supports[row].tolist(), self.lam)

    def to_text(self) -> str:
        lines = [f"{self.n} {self.k} {self.lam.numerator} {self.lam.denominator}"]
        for row in self.points:
            lines.append(" ".join(repr(float(v)) for v in row))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, cap: int = DEFAULT_ENUM_CAP) -> "LiftedConfiguration":
        """Parse the text format and check it against the canonical lifting.

        Raises DomainError if the header is malformed or the stored points
        differ from the lifting the header describes.
        """
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise DomainError("empty configuration file")
        try:
            n, k, num, den = (int(tok) for tok in lines[0].split())
            rows = np.array([[float(tok) for tok in ln.split()] for ln in lines[1:]])
        except ValueError as exc:
            raise DomainError(f"malformed configuration: {exc}") from exc
        conf = cls(n, k, Fraction(num, den), cap)
        if rows.shape != conf.points.shape or not np.array_equal(rows, conf.points):
            raise DomainError("stored points do not match the lifting described by the header")
        return conf
