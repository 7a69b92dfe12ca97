"""Weil heights, local heights relative to closed subsets, and M_K-constants.

Local heights of a point P of projective space relative to a closed subset Y
cut out by homogeneous generators g_i are

    h_{Y,w}(P) = -log max_i |g_i(x_P)|_w / (||g_i||_w * ||x_P||_w ** deg g_i)

which is >= 0 at finite places and positive exactly when P reduces into Y
modulo w.  At finite places every logarithm is a rational multiple of
log p; those multiples are tracked exactly and multiplied out at the end.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

from . import certified
from .certified import IV
from .number_fields import (
    INFINITY,
    RATIONALS,
    AlgebraicNumber,
    FieldDescriptor,
    Place,
    log_abs,
    places_above,
    support_places,
    valuation,
)

Real = Union[int, float, Fraction]


def _log(x: Real) -> float:
    if isinstance(x, Fraction):
        return math.log(x.numerator) - math.log(x.denominator)
    return math.log(x)


def log_plus(x: Real) -> float:
    """max(log x, 0)."""
    if x <= 0:
        raise ValueError(f"log_plus needs x > 0, got {x}")
    return max(_log(x), 0.0)


def log_star(x: Real) -> float:
    """max(log x, 1)."""
    if x <= 0:
        raise ValueError(f"log_star needs x > 0, got {x}")
    return max(_log(x), 1.0)


# -----------------------------------------------------------------------------
# Heights of field elements
# -----------------------------------------------------------------------------


def _places_for(t: AlgebraicNumber) -> list[Place]:
    return list(places_above(INFINITY, t.field)) + support_places(t)


def weil_height(t: AlgebraicNumber) -> float:
    """Absolute logarithmic Weil height, with h(0) = 0."""
    if t.is_zero():
        return 0.0
    if t.field.D is None:
        return math.log(max(abs(t.a.numerator), t.a.denominator))
    total = 0.0
    for w in _places_for(t):
        total += w.local_degree * max(log_abs(t, w), 0.0)
    return total / t.field.degree


def weil_height_interval(t: AlgebraicNumber):
    """Certified enclosure of :func:`weil_height`."""
    if t.is_zero():
        return IV.mpf(0)
    if t.field.D is None:
        return IV.log(IV.mpf(max(abs(t.a.numerator), t.a.denominator)))
    total = IV.mpf(0)
    for w in _places_for(t):
        total += w.local_degree * certified.log_plus_interval(certified.log_abs_interval(t, w))
    return total / t.field.degree


def local_height_zero(t: AlgebraicNumber, w: Place) -> float:
    """h_w(t) = log+(1 / |t|_w), the local height at the point 0."""
    if t.is_zero():
        raise ValueError("the local height at 0 has a pole at t = 0")
    return max(0.0, -log_abs(t, w))


def local_height_zero_interval(t: AlgebraicNumber, w: Place):
    if t.is_zero():
        raise ValueError("the local height at 0 has a pole at t = 0")
    return certified.log_plus_interval(-certified.log_abs_interval(t, w))


# -----------------------------------------------------------------------------
# M_K-constants
# -----------------------------------------------------------------------------


def base_place(w: Place) -> Place:
    """The place of Q below w."""
    if w.is_archimedean:
        return places_above(INFINITY, RATIONALS)[0]
    return places_above(w.p, RATIONALS)[0]


@dataclass(frozen=True)
class MKConstant:
    """Nonnegative reals indexed by places of Q; missing places mean 0."""

    entries: Mapping[Place, float] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for v, c in dict(self.entries).items():
            if c < 0:
                raise ValueError(f"M_K-constant entries must be >= 0 (got {c} at {v})")
            if v.field != RATIONALS:
                v = base_place(v)
            if c > 0:
                clean[v] = max(float(c), clean.get(v, 0.0))
        object.__setattr__(self, "entries", clean)

    def __getitem__(self, v: Place) -> float:
        return self.entries.get(base_place(v) if v.field != RATIONALS else v, 0.0)

    def add(self, other: "MKConstant") -> "MKConstant":
        out = dict(self.entries)
        for v, c in other.entries.items():
            out[v] = out.get(v, 0.0) + c
        return MKConstant(out)

    __add__ = add

    def scale(self, c: float) -> "MKConstant":
        if c < 0:
            raise ValueError("M_K-constants can only be scaled by c >= 0")
        return MKConstant({v: c * x for v, x in self.entries.items()})

    def dominates(self, samples: Iterable[tuple[Place, float]], tol: float = 0.0) -> bool:
        """True iff |f(P, w)| <= c_v for every sample, with v the place below w."""
        return all(abs(value) <= self[w] + tol for w, value in samples)

    @classmethod
    def from_samples(cls, samples: Iterable[tuple[Place, float]]) -> "MKConstant":
        """Smallest M_K-constant dominating the given samples."""
        out: dict[Place, float] = {}
        for w, value in samples:
            v = base_place(w)
            out[v] = max(out.get(v, 0.0), abs(value))
        return cls(out)

    def to_json(self) -> dict:
        return {str(v): c for v, c in sorted(self.entries.items())}


def mk_add(a: MKConstant, b: MKConstant) -> MKConstant:
    return a.add(b)


def mk_scale(a: MKConstant, c: float) -> MKConstant:
    return a.scale(c)


def dominates(samples: Iterable[tuple[Place, float]], bound: MKConstant) -> bool:
    return bound.dominates(samples)


# -----------------------------------------------------------------------------
# Projective points and closed subsets
# -----------------------------------------------------------------------------


@dataclass(frozen=True)
class HomogeneousPolynomial:
    """Exponent tuple -> rational coefficient."""

    terms: Mapping[tuple[int, ...], Fraction]

    def __post_init__(self):
        terms = {tuple(e): Fraction(c) for e, c in dict(self.terms).items() if c != 0}
        if not terms:
            raise ValueError("generator must be a nonzero polynomial")
        degrees = {sum(e) for e in terms}
        if len(degrees) != 1:
            raise ValueError(f"polynomial is not homogeneous (degrees {sorted(degrees)})")
        if len({len(e) for e in terms}) != 1:
            raise ValueError("inconsistent number of variables")
        object.__setattr__(self, "terms", terms)

    @classmethod
    def linear(cls, coeffs: Sequence[Real]) -> "HomogeneousPolynomial":
        n = len(coeffs)
        return cls({tuple(int(i == j) for j in range(n)): c for i, c in enumerate(coeffs)})

    @property
    def degree(self) -> int:
        return sum(next(iter(self.terms)))

    @property
    def nvars(self) -> int:
        return len(next(iter(self.terms)))

    def __call__(self, coords: Sequence[AlgebraicNumber]) -> AlgebraicNumber:
        fd = coords[0].field
        total = AlgebraicNumber(fd, 0)
        for exps, c in self.terms.items():
            term = AlgebraicNumber(fd, c)
            for x, e in zip(coords, exps):
                if e:
                    term = term * x**e
            total = total + term
        return total

    def __add__(self, other: "HomogeneousPolynomial") -> "HomogeneousPolynomial":
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, Fraction(0)) + c
        return HomogeneousPolynomial(out)

    def __mul__(self, other: "HomogeneousPolynomial") -> "HomogeneousPolynomial":
        out: dict[tuple[int, ...], Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, Fraction(0)) + c1 * c2
        return HomogeneousPolynomial(out)


@dataclass(frozen=True)
class ClosedSubsetSpec:
    """Closed subset of P^N given by homogeneous generators with rational coefficients."""

    N: int
    generators: tuple[HomogeneousPolynomial, ...]

    def __post_init__(self):
        gens = tuple(
            g if isinstance(g, HomogeneousPolynomial) else HomogeneousPolynomial(g)
            for g in self.generators
        )
        if not gens:
            raise ValueError("at least one generator is required")
        for g in gens:
            if g.nvars != self.N + 1:
                raise ValueError(f"generator in {g.nvars} variables, expected {self.N + 1}")
        object.__setattr__(self, "generators", gens)


@dataclass(frozen=True)
class ProjectivePoint:
    coords: tuple[AlgebraicNumber, ...]

    def __post_init__(self):
        coords = tuple(self.coords)
        if not coords:
            raise ValueError("empty coordinate vector")
        if all(x.is_zero() for x in coords):
            raise ValueError("a projective point needs a nonzero coordinate")
        if len({x.field for x in coords}) != 1:
            raise ValueError("coordinates from different fields")
        object.__setattr__(self, "coords", coords)

    @classmethod
    def of(cls, *coords, field: FieldDescriptor = RATIONALS) -> "ProjectivePoint":
        return cls(
            tuple(c if isinstance(c, AlgebraicNumber) else AlgebraicNumber(field, c) for c in coords)
        )

    @property
    def field(self) -> FieldDescriptor:
        return self.coords[0].field

    @property
    def N(self) -> int:
        return len(self.coords) - 1

    def scaled(self, c) -> "ProjectivePoint":
        return ProjectivePoint(tuple(x * c for x in self.coords))


def _exact_log_coeff(t: AlgebraicNumber, w: Place) -> Fraction:
    """r with log |t|_w = r * log p at a finite place."""
    return Fraction(-valuation(t, w), w.ramification)


def _rational_log_coeff(c: Fraction, w: Place) -> Fraction:
    # a rational c has ord_w(c) = e * ord_p(c), so log|c|_w = -ord_p(c) log p
    return Fraction(-valuation(AlgebraicNumber(RATIONALS, c), places_above(w.p, RATIONALS)[0]))


def _check_point(P: ProjectivePoint, Y: ClosedSubsetSpec, w: Place):
    if P.N != Y.N:
        raise ValueError(f"point in P^{P.N} but subset in P^{Y.N}")
    if P.field != w.field:
        raise ValueError("place and point live over different fields")


def local_height_subset(P: ProjectivePoint, Y: ClosedSubsetSpec, w: Place) -> float:
    """h_{Y,w}(P); raises when every generator vanishes at P (P lies in Y)."""
    _check_point(P, Y, w)
    values = [(g, g(P.coords)) for g in Y.generators]
    values = [(g, v) for g, v in values if not v.is_zero()]
    if not values:
        raise ValueError("P lies in Y: every generator vanishes")
    nonzero = [x for x in P.coords if not x.is_zero()]
    if w.is_archimedean:
        log_x = max(log_abs(x, w) for x in nonzero)
        best = -math.inf
        for g, v in values:
            log_g = max(_log(abs(c)) for c in g.terms.values())
            best = max(best, log_abs(v, w) - log_g - g.degree * log_x)
        return -best
    log_x = max(_exact_log_coeff(x, w) for x in nonzero)
    best = None
    for g, v in values:
        log_g = max(_rational_log_coeff(c, w) for c in g.terms.values())
        r = _exact_log_coeff(v, w) - log_g - g.degree * log_x
        best = r if best is None else max(best, r)
    return float(-best) * math.log(w.p)


def global_height_subset(P: ProjectivePoint, Y: ClosedSubsetSpec) -> float:
    """h_Y(P) = (1/d) * sum over all places of n_w * h_{Y,w}(P)."""
    fd = P.field
    elements = [x for x in P.coords if not x.is_zero()]
    for g in Y.generators:
        v = g(P.coords)
        if not v.is_zero():
            elements.append(v)
        elements.extend(AlgebraicNumber(fd, c) for c in g.terms.values())
    places = set(places_above(INFINITY, fd))
    for t in elements:
        places.update(support_places(t))
    total = 0.0
    for w in sorted(places):
        total += w.local_degree * local_height_subset(P, Y, w)
    return total / fd.degree
