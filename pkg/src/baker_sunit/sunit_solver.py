"""Brute-force solutions of alpha*x + beta*y = 1 and the elimination-step checks.

The enumeration walks x over the exponent box |b_i| <= cap of a fundamental
system (both torsion signs) and keeps x when y = (1 - alpha x)/beta is an
S-unit whose exponents also lie in the box.  Over Q this runs on bare integers; other fields use exact
:class:`AlgebraicNumber` arithmetic.
"""

from __future__ import annotations

import itertools
import math
import os
from fractions import Fraction
from dataclasses import dataclass
from typing import Optional, Sequence

from . import certified
from .baker_bounds import BoundReport, SUnitEquation
from .certified import IV
from .heights import local_height_zero_interval, weil_height, weil_height_interval
from .number_fields import (
    INFINITY,
    AlgebraicNumber,
    Place,
    places_above,
    support_places,
    valuation,
)
from .s_units import (
    FundamentalSystem,
    SUnitDecomposition,
    decompose,
    fundamental_system,
    is_s_unit,
)

__all__ = [
    "SUnitEquation",
    "Solution",
    "ResourceLimitError",
    "enumerate_solutions",
    "critical_set",
    "lemma41_item1",
    "lemma41_item1_pair",
    "lemma41_item1_violations",
    "lemma41_item2",
    "lemma41_item3",
    "place_selection",
    "verify_bound",
]

DEFAULT_WORK_LIMIT = 5_000_000
LOG2 = IV.log(IV.mpf(2))


class ResourceLimitError(RuntimeError):
    """The exponent box is larger than the configured work limit."""


class NotASolutionError(ValueError):
    pass


@dataclass(frozen=True)
class Solution:
    x: AlgebraicNumber
    y: AlgebraicNumber
    hx: float
    hy: float
    dx: SUnitDecomposition
    dy: SUnitDecomposition

    @property
    def height(self) -> float:
        return max(self.hx, self.hy)

    def sort_key(self) -> tuple:
        return (self.x.sort_key(), self.y.sort_key())

    def to_json(self) -> dict:
        return {
            "schema": 1,
            "x": str(self.x),
            "y": str(self.y),
            "hx": float(f"{self.hx:.10g}"),
            "hy": float(f"{self.hy:.10g}"),
        }


def work_limit_from_env() -> int:
    raw = os.environ.get("BAKER_WORK_LIMIT")
    return int(raw) if raw else DEFAULT_WORK_LIMIT


def box_size(rank: int, cap: int) -> int:
    return 2 * (2 * cap + 1) ** rank


def make_solution(eq: SUnitEquation, x: AlgebraicNumber, y: AlgebraicNumber, system) -> Solution:
    return Solution(x, y, weil_height(x), weil_height(y), decompose(x, system), decompose(y, system))


def _s_free(n: int, primes: Sequence[int]) -> int:
    n = abs(n)
    for p in primes:
        while n % p == 0:
            n //= p
    return n


def _enumerate_rational(eq: SUnitEquation, system: FundamentalSystem, cap: int) -> list:
    primes = [u.a.numerator for u in system.units]
    a1, a2 = eq.alpha.a.numerator, eq.alpha.a.denominator
    b1, b2 = eq.beta.a.numerator, eq.beta.a.denominator
    # y = (a2*den - a1*num) * b2 / (a2*den*b1) is an S-unit iff the S-free
    # parts of numerator and denominator agree
    target = _s_free(a2, primes) * _s_free(b1, primes)
    b2_free = _s_free(b2, primes)
    pows = [[p**k for k in range(cap + 1)] for p in primes]
    found = []
    for exps in itertools.product(range(-cap, cap + 1), repeat=len(primes)):
        num = den = 1
        for table, e in zip(pows, exps):
            if e > 0:
                num *= table[e]
            elif e < 0:
                den *= table[-e]
        for sign in (1, -1):
            t = a2 * den - sign * a1 * num
            if t == 0:
                continue
            if _s_free(t, primes) * b2_free == target:
                found.append((sign * num, den, t))
    out = []
    Q = eq.field
    for xn, xd, t in found:
        x = AlgebraicNumber(Q, xn) / xd
        y = AlgebraicNumber(Q, t * b2) / (a2 * xd * b1)
        out.append((x, y))
    return out


def _enumerate_generic(eq: SUnitEquation, system: FundamentalSystem, cap: int) -> list:
    out = []
    pow_tables = []
    for u in system.units:
        inv = u.inverse()
        table = {0: AlgebraicNumber(eq.field, 1)}
        for k in range(1, cap + 1):
            table[k] = table[k - 1] * u
            table[-k] = table[-(k - 1)] * inv
        pow_tables.append(table)
    for exps in itertools.product(range(-cap, cap + 1), repeat=system.rank):
        base = AlgebraicNumber(eq.field, 1)
        for table, e in zip(pow_tables, exps):
            if e:
                base = base * table[e]
        for zeta in (1, -1):
            x = base * zeta
            y = (1 - eq.alpha * x) / eq.beta
            if not y.is_zero() and is_s_unit(y, eq.S):
                out.append((x, y))
    return out


def enumerate_solutions(
    eq: SUnitEquation, exponent_cap: int, work_limit: Optional[int] = None
) -> list[Solution]:
    """All solutions with every exponent of both x and y within ``exponent_cap``.

    Bounding y as well keeps the output closed under swapping x and y when
    alpha = beta.  Output is deduplicated and sorted canonically by (x, y).
    """
    if exponent_cap < 1:
        raise ValueError("exponent_cap must be >= 1")
    system = fundamental_system(eq.field, eq.S)
    limit = work_limit_from_env() if work_limit is None else work_limit
    size = box_size(system.rank, exponent_cap)
    if size > limit:
        raise ResourceLimitError(
            f"exponent box of {size} candidates exceeds the work limit {limit}"
        )
    if eq.field.D is None:
        pairs = _enumerate_rational(eq, system, exponent_cap)
    else:
        pairs = _enumerate_generic(eq, system, exponent_cap)
    uniq = {(x, y) for x, y in pairs}
    sols = [make_solution(eq, x, y, system) for x, y in uniq]
    sols = [sol for sol in sols if sol.dy.B <= exponent_cap]
    sols.sort(key=Solution.sort_key)
    return sols


# -----------------------------------------------------------------------------
# Elimination-step checks
# -----------------------------------------------------------------------------


def _check_solution(sol: Solution, eq: SUnitEquation):
    if eq.alpha * sol.x + eq.beta * sol.y != 1:
        raise NotASolutionError(f"({sol.x}, {sol.y}) does not solve the equation")


def critical_set(sol: Solution, eq: SUnitEquation) -> tuple[AlgebraicNumber, ...]:
    """E = (alpha x, beta y, beta y / (alpha x)), kept as an ordered triple."""
    ax = eq.alpha * sol.x
    by = eq.beta * sol.y
    return (ax, by, by / ax)


def _relevant_places(elements) -> list[Place]:
    fd = elements[0].field
    places = set(places_above(INFINITY, fd))
    for t in elements:
        places.update(support_places(t))
    return sorted(places)


def _exceeds_threshold(t: AlgebraicNumber, w: Place) -> bool:
    """h_w(t) > delta_w log 2, decided exactly: |t|_w < 1/2 (archimedean) or < 1."""
    if w.is_archimedean:
        half = AlgebraicNumber(t.field, Fraction(1, 2))
        return (t - half).sign(w.index) < 0 and (t + half).sign(w.index) > 0
    return valuation(t, w) > 0


def lemma41_item1_violations(sol: Solution, eq: SUnitEquation) -> list:
    """Places where two or more members of E exceed the threshold, with their indices.

    Indices refer to E = (alpha x, beta y, beta y/(alpha x)).  Since
    beta y / (alpha x) = 1/(alpha x) - 1, the third member is small exactly
    where beta y is small at a finite place, so violations are common.
    """
    _check_solution(sol, eq)
    E = critical_set(sol, eq)
    out = []
    for w in _relevant_places(E):
        hits = tuple(i for i, P in enumerate(E) if _exceeds_threshold(P, w))
        if len(hits) > 1:
            out.append((w, hits))
    return out


def lemma41_item1(sol: Solution, eq: SUnitEquation) -> bool:
    """At every place at most one member of E has h_w above delta_w log 2."""
    return not lemma41_item1_violations(sol, eq)


def lemma41_item1_pair(sol: Solution, eq: SUnitEquation) -> bool:
    """The two-element form: alpha x and beta y never both exceed the threshold.

    This is what z + z' = 1 forces (one of them has |.|_w >= 1, or >= 1/2
    at an archimedean place).
    """
    return all(hits[:2] != (0, 1) for _, hits in lemma41_item1_violations(sol, eq))


def _heights_iv(sol: Solution, eq: SUnitEquation):
    ax, by, q = critical_set(sol, eq)
    return [weil_height_interval(t) for t in (sol.x, sol.y, ax, by, q)]


def h_parameter_interval(eq: SUnitEquation):
    d = eq.field.degree
    return certified.iv_max(
        weil_height_interval(eq.alpha),
        weil_height_interval(eq.beta),
        IV.mpf(1),
        IV.pi / d,
    )


def lemma41_item2(sol: Solution, eq: SUnitEquation, slack: float = certified.DEFAULT_SLACK) -> bool:
    """Pairwise height gaps among x, y, alpha x, beta y, beta y/(alpha x).

    Every gap is at most 3H, and at most 2H except the gap |h(x) - h(y)|.
    """
    _check_solution(sol, eq)
    hs = _heights_iv(sol, eq)
    H = h_parameter_interval(eq)
    for i, j in itertools.combinations(range(5), 2):
        gap = abs(hs[i] - hs[j])
        limit = 3 * H if (i, j) == (0, 1) else 2 * H
        if not certified.certainly_le(gap, limit, slack):
            return False
    return True


def _weighted_sums(sol: Solution, eq: SUnitEquation):
    """For each P in E, the list of (w, (n_w/d) h_w(P)) over w in S."""
    d = eq.field.degree
    return [
        [(w, IV.mpf(w.local_degree) / d * local_height_zero_interval(P, w)) for w in eq.S]
        for P in critical_set(sol, eq)
    ]


def _h_interval(sol: Solution):
    return certified.iv_max(weil_height_interval(sol.x), weil_height_interval(sol.y))


def lemma41_item3(sol: Solution, eq: SUnitEquation, slack: float = certified.DEFAULT_SLACK) -> bool:
    """For each P in E, sum over S of (n_w/d) h_w(P) >= h - 3H."""
    _check_solution(sol, eq)
    if not (is_s_unit(sol.x, eq.S) and is_s_unit(sol.y, eq.S)):
        raise NotASolutionError("x and y must be S-units")
    rhs = _h_interval(sol) - 3 * h_parameter_interval(eq)
    for row in _weighted_sums(sol, eq):
        total = sum((v for _, v in row), IV.mpf(0))
        if not certified.certainly_ge(total, rhs, slack):
            return False
    return True


@dataclass(frozen=True)
class PlaceSelection:
    """Outcome of the place selection: a chosen (P, w) or a collision."""

    kind: str  # "selected" or "collision"
    P_index: Optional[int]
    place: Optional[Place]
    archimedean: bool
    threshold: float
    value: Optional[float]
    collision_pair: Optional[tuple[int, int]] = None
    height_le_3H: Optional[bool] = None

    def is_valid(self) -> bool:
        if self.kind == "selected":
            return self.place is not None and self.value is not None
        return bool(self.height_le_3H)


def preferred_places(S) -> tuple[Place, ...]:
    """Archimedean places when S has at most two finite places; otherwise S minus
    its two finite places of largest norm."""
    fin = sorted(S.finite, key=lambda w: (w.norm, w.sort_key()), reverse=True)
    if len(fin) <= 2:
        return S.archimedean
    dropped = set(fin[:2])
    return tuple(w for w in S if w not in dropped)


def place_selection(sol: Solution, eq: SUnitEquation, slack: float = certified.DEFAULT_SLACK):
    """Find P in E and a place w with (n_w/d) h_w(P) >= (h - 3H)/|S|.

    Archimedean places are tried first, then the other preferred places.
    Otherwise some place outside the preferred set carries two distinct
    members of E above the threshold, and h <= 3H is certified.
    """
    _check_solution(sol, eq)
    H = h_parameter_interval(eq)
    h = _h_interval(sol)
    tau = (h - 3 * H) / eq.S.s
    table = _weighted_sums(sol, eq)
    preferred = preferred_places(eq.S)

    def best(candidates):
        chosen = None
        for i, row in enumerate(table):
            for w, v in row:
                if w in candidates and certified.certainly_ge(v, tau, slack):
                    val = certified.midpoint(v)
                    if chosen is None or val > chosen[0]:
                        chosen = (val, i, w)
        if chosen is None:
            return None
        val, i, w = chosen
        return PlaceSelection("selected", i, w, w.is_archimedean, certified.midpoint(tau), val)

    found = best(set(eq.S.archimedean)) or best(set(preferred))
    if found is not None:
        return found
    rest = [w for w in eq.S if w not in preferred]
    for w in rest:
        above = [
            i
            for i, row in enumerate(table)
            for ww, v in row
            if ww == w and certified.certainly_ge(v, tau, slack)
        ]
        if len(above) >= 2:
            return PlaceSelection(
                "collision",
                None,
                w,
                False,
                certified.midpoint(tau),
                None,
                (above[0], above[1]),
                certified.certainly_le(h, 3 * H, slack),
            )
    return PlaceSelection("none", None, None, False, certified.midpoint(tau), None)


# -----------------------------------------------------------------------------
# Soundness check
# -----------------------------------------------------------------------------


@dataclass(frozen=True)
class Verdict:
    passed: bool
    margin: Optional[float]
    max_height: Optional[float]
    bound: float
    count: int

    @property
    def label(self) -> str:
        return "PASS" if self.passed else "FAIL"

    def to_json(self) -> dict:
        return {
            "schema": 1,
            "verdict": self.label,
            "margin": self.margin,
            "max_height": self.max_height,
            "bound": self.bound,
            "solutions": self.count,
        }


def verify_bound(eq: SUnitEquation, report: BoundReport, solutions: Sequence[Solution]) -> Verdict:
    """PASS iff every solution height is at most the reported bound."""
    if report.equation != eq.echo():
        raise ValueError("bound report was computed for a different equation")
    if not solutions:
        return Verdict(True, None, None, report.bound, 0)
    worst = max(s.height for s in solutions)
    margin = report.bound - worst
    return Verdict(margin >= 0, margin, worst, report.bound, len(solutions))
