"""S-unit groups: fundamental systems, S-regulators and exponent decompositions.

Over Q the S-units modulo +-1 are generated by the primes of S.  Over a real
quadratic field of class number one they are generated by the fundamental
unit together with one principal generator for each finite place of S.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .heights import weil_height
from .number_fields import (
    AlgebraicNumber,
    FieldDescriptor,
    Place,
    PlaceSet,
    fundamental_unit,
    log_abs,
    support_places,
    valuation,
)

# generous, but keeps a failed search from running forever
MAX_GENERATOR_RADIUS = 10**7


class NonPrincipalError(ValueError):
    """No generator of a prime ideal was found within the search radius."""


class DegenerateSystemError(ValueError):
    """The regulator determinant vanished: the units are dependent."""


class NotSUnitError(ValueError):
    pass


def bugeaud_gyory_c1(s: int, d: int) -> float:
    """((s-1)!)^2 / (2^(s-1) d^(s-2)), the product-of-heights constant."""
    if s < 2:
        raise ValueError("needs s >= 2")
    return math.factorial(s - 1) ** 2 / (2 ** (s - 1) * d ** (s - 2))


def principal_generator(w: Place, max_radius: int = MAX_GENERATOR_RADIUS) -> AlgebraicNumber:
    """An integral element generating the prime ideal of the finite place w.

    Searches |x^2 - D y^2| = N(w) (scaled by 4 on the half-integral basis)
    over |y| up to a radius that provably contains a generator when the
    ideal is principal.
    """
    fd = w.field
    if w.is_archimedean:
        raise ValueError("archimedean places have no generator")
    if fd.D is None:
        return AlgebraicNumber(fd, w.p)
    if w.split == "inert":
        return AlgebraicNumber(fd, w.p)
    D = fd.D
    half = D % 4 == 1
    target = 4 * w.norm if half else w.norm
    eps = fundamental_unit(D).embed(0)
    radius = (eps + 1) * math.sqrt(w.norm) / math.sqrt(D) * (1 if half else 0.5)
    radius = int(radius) + 2
    if radius > max_radius:
        raise NonPrincipalError(
            f"generator search radius {radius} for {w} exceeds the limit {max_radius}"
        )
    for y in range(0, radius + 1):
        for sign in (1, -1):
            x2 = D * y * y + sign * target
            if x2 < 0:
                continue
            x = math.isqrt(x2)
            if x * x != x2 or (half and (x - y) % 2):
                continue
            c = 2 if half else 1
            pi = AlgebraicNumber(fd, Fraction(x, c), Fraction(y, c))
            if valuation(pi, w) != 1:
                pi = pi.conjugate()
            if valuation(pi, w) == 1:
                return pi
    raise NonPrincipalError(
        f"no generator of the prime {w} with |y| <= {radius}; "
        f"{fd} probably has class number > 1"
    )


@dataclass(frozen=True)
class FundamentalSystem:
    """Fundamental S-units eps_1..eps_{s-1} and the torsion generator."""

    S: PlaceSet
    units: tuple[AlgebraicNumber, ...]
    torsion: AlgebraicNumber
    # the place whose prime each unit generates; None for the fundamental unit
    unit_places: tuple[Optional[Place], ...]

    @property
    def field(self) -> FieldDescriptor:
        return self.S.field

    @property
    def rank(self) -> int:
        return len(self.units)

    def height_product(self) -> float:
        return math.prod(weil_height(u) for u in self.units)

    def bugeaud_gyory_check(self, regulator: Optional[float] = None, rel_tol: float = 1e-12):
        """(product of heights, c1(s) * R_S, holds) for the product-of-heights bound."""
        s = self.S.s
        if s < 2:
            return 1.0, 1.0, True
        R = s_regulator_of(self) if regulator is None else regulator
        bound = bugeaud_gyory_c1(s, self.field.degree) * R
        prod = self.height_product()
        return prod, bound, prod <= bound * (1 + rel_tol)

    def to_json(self) -> dict:
        return {
            "schema": 1,
            "S": self.S.to_json(),
            "torsion": str(self.torsion),
            "units": [str(u) for u in self.units],
            "unit_places": [None if w is None else w.to_json() for w in self.unit_places],
        }


def fundamental_system(field: FieldDescriptor, S: PlaceSet) -> FundamentalSystem:
    if S.field != field:
        raise ValueError("S is not a set of places of this field")
    minus_one = AlgebraicNumber(field, -1)
    units: list[AlgebraicNumber] = []
    unit_places: list[Optional[Place]] = []
    if field.D is not None:
        units.append(fundamental_unit(field.D))
        unit_places.append(None)
    for w in S.finite:
        units.append(principal_generator(w))
        unit_places.append(w)
    return FundamentalSystem(S, tuple(units), minus_one, tuple(unit_places))


def is_s_unit(t: AlgebraicNumber, S: PlaceSet) -> bool:
    if t.is_zero():
        raise ValueError("0 is not a unit")
    return all(w in S for w in support_places(t))


def regulator_matrix(system: FundamentalSystem, omit: int = 0) -> np.ndarray:
    """Rows n_w * log|eps_j|_w over the places of S except the one at ``omit``."""
    places = [w for i, w in enumerate(system.S) if i != omit]
    return np.array(
        [[w.local_degree * log_abs(u, w) for u in system.units] for w in places], dtype=float
    )


def s_regulator_of(system: FundamentalSystem, omit: int = 0) -> float:
    if system.rank == 0:
        return 1.0
    if not 0 <= omit < system.S.s:
        raise IndexError(f"no place {omit} in S")
    det = abs(float(np.linalg.det(regulator_matrix(system, omit))))
    if det < 1e-12:
        raise DegenerateSystemError("regulator determinant vanished")
    return det


def s_regulator(field: FieldDescriptor, S: PlaceSet, omit: int = 0) -> float:
    """R_S, the absolute determinant of the logarithmic embedding (1 when s = 1)."""
    return s_regulator_of(fundamental_system(field, S), omit)


@dataclass(frozen=True)
class SUnitDecomposition:
    torsion: AlgebraicNumber
    exponents: tuple[int, ...]

    @property
    def B(self) -> int:
        return max((abs(b) for b in self.exponents), default=0)


def recompose(dec: SUnitDecomposition, system: FundamentalSystem) -> AlgebraicNumber:
    out = dec.torsion
    for u, b in zip(system.units, dec.exponents):
        if b:
            out = out * u**b
    return out


def decompose(u: AlgebraicNumber, system: FundamentalSystem) -> SUnitDecomposition:
    """Write u = zeta * prod eps_i ** b_i exactly."""
    if u.is_zero() or not is_s_unit(u, system.S):
        raise NotSUnitError(f"{u} is not an S-unit for S = {system.S}")
    fd = system.field
    exps = [0] * system.rank
    rest = u
    for i, (eps, w) in enumerate(zip(system.units, system.unit_places)):
        if w is None:
            continue
        b = valuation(u, w)
        exps[i] = b
        if b:
            rest = rest / eps**b
    if fd.D is not None:
        eps = system.units[0]
        k = round(log_abs(rest, system.S.archimedean[0]) / log_abs(eps, system.S.archimedean[0]))
        exps[0] = k
        rest = rest / eps**k
    if rest == 1:
        zeta = AlgebraicNumber(fd, 1)
    elif rest == -1:
        zeta = AlgebraicNumber(fd, -1)
    else:  # pragma: no cover - would mean the system does not generate
        raise DegenerateSystemError(f"{u} is not generated by the system (residue {rest})")
    return SUnitDecomposition(zeta, tuple(exps))


def prime_norm_stats(S: PlaceSet) -> tuple[int, int]:
    """(P_S, P'_S): largest and third-largest norm over finite places, counted by place."""
    norms = sorted((w.norm for w in S.finite), reverse=True)
    P = norms[0] if norms else 1
    P3 = norms[2] if len(norms) >= 3 else 1
    return P, P3

