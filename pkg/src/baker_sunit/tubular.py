"""Combinatorics of divisor incidence: Baker and tubular numbers, and the pigeonhole step.

Incidence data is given abstractly by flags on subsets I of {1..n}: whether
the intersection of the supports of D_i (i in I) is finite, and whether it
lies inside the excluded set Y.  Both families are upward closed, so they are
stored as their minimal true subsets (bitmasks, bit i-1 for divisor i).
"""

from __future__ import annotations

import itertools
import json
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Sequence

MAX_DIVISORS = 20

OUTCOME_INTERSECTION = "bounded_by_intersection"
OUTCOME_BAKER = "baker"
OUTCOME_VIOLATED = "condition_violated"


class NonMonotoneError(ValueError):
    """A subset is flagged false although one of its subsets is flagged true."""


def _mask(subset: Iterable[int], n: int) -> int:
    m = 0
    for i in subset:
        if not isinstance(i, int) or isinstance(i, bool) or not 1 <= i <= n:
            raise ValueError(f"divisor index {i!r} outside 1..{n}")
        m |= 1 << (i - 1)
    return m


def _members(mask: int) -> tuple[int, ...]:
    return tuple(i + 1 for i in range(mask.bit_length()) if mask >> i & 1)


def _minimal(masks: Iterable[int]) -> tuple[int, ...]:
    masks = sorted(set(masks), key=lambda m: (bin(m).count("1"), m))
    keep: list[int] = []
    for m in masks:
        if not any(k & ~m == 0 for k in keep):
            keep.append(m)
    return tuple(keep)


def _upward(minimal: Sequence[int], mask: int) -> bool:
    return any(k & ~mask == 0 for k in minimal)


@dataclass(frozen=True)
class IncidenceData:
    n: int
    finite: tuple[int, ...]  # minimal subsets with finite intersection
    contained: tuple[int, ...]  # minimal subsets whose intersection lies in Y

    def __post_init__(self):
        if not 1 <= self.n <= MAX_DIVISORS:
            raise ValueError(f"n must be in 1..{MAX_DIVISORS}, got {self.n}")
        full = (1 << self.n) - 1
        for m in self.finite + self.contained:
            if m & ~full:
                raise ValueError("subset mentions a divisor beyond n")
        object.__setattr__(self, "finite", _minimal(self.finite))
        object.__setattr__(self, "contained", _minimal(self.contained))

    @classmethod
    def build(
        cls,
        n: int,
        finite: Iterable[Iterable[int]] = (),
        contained: Iterable[Iterable[int]] = (),
        finite_false: Iterable[Iterable[int]] = (),
        contained_false: Iterable[Iterable[int]] = (),
    ) -> "IncidenceData":
        """From 1-based index lists; the false lists are checked against the closure."""
        if not isinstance(n, int) or not 1 <= n <= MAX_DIVISORS:
            raise ValueError(f"n must be an integer in 1..{MAX_DIVISORS}, got {n!r}")
        inc = cls(n, tuple(_mask(I, n) for I in finite), tuple(_mask(I, n) for I in contained))
        for name, minimal, falses in (
            ("finite", inc.finite, finite_false),
            ("contained", inc.contained, contained_false),
        ):
            for I in falses:
                if _upward(minimal, _mask(I, n)):
                    raise NonMonotoneError(
                        f"{name} flag of {sorted(I)} is false but a subset of it is true"
                    )
        return inc

    @classmethod
    def from_flags(cls, n: int, finite_flags: dict, contained_flags: dict) -> "IncidenceData":
        """From explicit maps subset -> bool, validating monotonicity."""
        def split(flags):
            true = [I for I, v in flags.items() if v]
            false = [I for I, v in flags.items() if not v]
            return true, false

        ft, ff = split(finite_flags)
        ct, cf = split(contained_flags)
        return cls.build(n, ft, ct, ff, cf)

    @classmethod
    def from_json(cls, data: dict) -> "IncidenceData":
        allowed = {"n", "finite", "contained", "finite_false", "contained_false"}
        unknown = set(data) - allowed
        if unknown:
            raise ValueError(f"unknown incidence keys {sorted(unknown)}")
        if "n" not in data:
            raise ValueError("incidence data needs 'n'")
        return cls.build(
            data["n"],
            data.get("finite", []),
            data.get("contained", []),
            data.get("finite_false", []),
            data.get("contained_false", []),
        )

    @classmethod
    def load(cls, path) -> "IncidenceData":
        return cls.from_json(json.loads(Path(path).read_text()))

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "finite": [list(_members(m)) for m in self.finite],
            "contained": [list(_members(m)) for m in self.contained],
        }

    def is_finite(self, subset: Iterable[int]) -> bool:
        return _upward(self.finite, _mask(subset, self.n))

    def is_contained(self, subset: Iterable[int]) -> bool:
        return _upward(self.contained, _mask(subset, self.n))


def _largest_false(n: int, minimal: Sequence[int]) -> Optional[int]:
    """Size of the largest subset outside the upward closure, None if there is none."""
    for size in range(n, -1, -1):
        for combo in itertools.combinations(range(n), size):
            mask = sum(1 << i for i in combo)
            if not _upward(minimal, mask):
                return size
    return None


def m_baker(inc: IncidenceData) -> Optional[int]:
    """Smallest m >= 1 with every m-fold intersection finite; None if none exists."""
    largest = _largest_false(inc.n, inc.finite)
    if largest is None:
        return 1
    if largest == inc.n:
        return None
    return max(1, largest + 1)


def m_tubular(inc: IncidenceData) -> int:
    """Smallest m >= 0 with every intersection of more than m supports inside Y."""
    largest = _largest_false(inc.n, inc.contained)
    if largest == inc.n:
        raise ValueError("the intersection of all the divisors is not contained in Y")
    return 0 if largest is None else largest


@dataclass(frozen=True, order=True)
class PlaceSignature:
    r_inf: int
    r_fin: int

    def __post_init__(self):
        if self.r_inf < 0 or self.r_fin < 0:
            raise ValueError("place counts must be nonnegative")

    @property
    def s(self) -> int:
        return self.r_inf + self.r_fin


def check_condition(m_B: int, m_Y: int, sig: PlaceSignature, n: int) -> bool:
    """(m_B - 1) r_inf + m_Y r_fin < n."""
    if m_B < 1 or m_Y < 0:
        raise ValueError("need m_B >= 1 and m_Y >= 0")
    return (m_B - 1) * sig.r_inf + m_Y * sig.r_fin < n


def feasible_signatures(
    m_B: Optional[int], m_Y: int, n: int, caps: tuple[int, int] = (10, 10)
) -> list[PlaceSignature]:
    """Signatures with 1 <= r_inf <= caps[0], 0 <= r_fin <= caps[1] meeting the condition."""
    if m_B is None:
        return []
    cap_inf, cap_fin = caps
    sigs = [
        PlaceSignature(r_inf, r_fin)
        for r_inf in range(1, cap_inf + 1)
        for r_fin in range(0, cap_fin + 1)
    ]
    return [sig for sig in sigs if check_condition(m_B, m_Y, sig, n)]


def describe_condition(m_B: int, m_Y: int, n: int) -> str:
    """Human form of the condition with zero coefficients dropped."""
    parts = []
    for coeff, var in ((m_B - 1, "r_inf"), (m_Y, "r_fin")):
        if coeff == 1:
            parts.append(var)
        elif coeff:
            parts.append(f"{coeff}*{var}")
    if not parts:
        return "always" if n > 0 else "never"
    return " + ".join(parts) + f" < {n}"


@dataclass(frozen=True)
class PigeonholeOutcome:
    kind: str
    place: Optional[int]  # column index into S
    indices: tuple[int, ...]  # 0-based divisor indices
    assignment: tuple[int, ...]
    below_threshold: tuple[int, ...] = ()

    def to_json(self) -> dict:
        return {
            "outcome": self.kind,
            "place": self.place,
            "indices": list(self.indices),
            "assignment": list(self.assignment),
            "below_threshold": list(self.below_threshold),
        }


def outcome_of_assignment(
    assignment: Sequence[int], archimedean: Sequence[bool], m_B: int, m_Y: int
) -> tuple[str, Optional[int], tuple[int, ...]]:
    """Classify a map {divisors} -> S by its fibres.

    A finite place with more than m_Y divisors wins first; then an
    archimedean place with at least m_B, from which exactly m_B are taken.
    """
    fibres: dict[int, list[int]] = {}
    for i, w in enumerate(assignment):
        fibres.setdefault(w, []).append(i)
    for w in sorted(fibres):
        if not archimedean[w] and len(fibres[w]) > m_Y:
            return OUTCOME_INTERSECTION, w, tuple(fibres[w])
    for w in sorted(fibres):
        if archimedean[w] and len(fibres[w]) >= m_B:
            return OUTCOME_BAKER, w, tuple(fibres[w][:m_B])
    return OUTCOME_VIOLATED, None, ()


def pigeonhole_assignment(
    table: Sequence[Sequence[float]],
    archimedean: Sequence[bool],
    m_B: int,
    m_Y: int,
    threshold: float = 0.0,
) -> PigeonholeOutcome:
    """Send each divisor to a place where its weighted local height is largest.

    ``table[i][w]`` is (n_w/d) h_{D_i,w}(Q); ``archimedean[w]`` marks the
    columns standing for archimedean places (or any chosen S').  Rows whose
    maximum falls below ``threshold`` are reported, not rejected.
    """
    if m_B < 1 or m_Y < 0:
        raise ValueError("need m_B >= 1 and m_Y >= 0")
    ncols = len(archimedean)
    if ncols == 0:
        raise ValueError("S is empty")
    if not table:
        raise ValueError("the table has no rows")
    assignment = []
    below = []
    for i, row in enumerate(table):
        if len(row) != ncols:
            raise ValueError(f"row {i} has {len(row)} entries, S has {ncols} places")
        if any(v < 0 for v in row):
            raise ValueError(f"row {i} has a negative local height")
        best = max(range(ncols), key=lambda w: (row[w], -w))
        assignment.append(best)
        if row[best] < threshold:
            below.append(i)
    kind, place, indices = outcome_of_assignment(assignment, archimedean, m_B, m_Y)
    return PigeonholeOutcome(kind, place, indices, tuple(assignment), tuple(below))


def exhaustive_violations(n: int, sig: PlaceSignature, m_B: int, m_Y: int) -> int:
    """Number of maps {1..n} -> S (all s^n of them) classified as violating.

    The class of a map depends only on its fibre sizes, so each distinct
    fibre profile is classified once and weighted by its multiplicity.
    """
    archimedean = [True] * sig.r_inf + [False] * sig.r_fin
    profiles = Counter(
        tuple(f.count(w) for w in range(sig.s))
        for f in itertools.product(range(sig.s), repeat=n)
    )
    bad = 0
    for profile, mult in profiles.items():
        rep = [w for w, c in enumerate(profile) for _ in range(c)]
        if outcome_of_assignment(rep, archimedean, m_B, m_Y)[0] == OUTCOME_VIOLATED:
            bad += mult
    return bad
