"""Exact arithmetic in Q and real quadratic fields, with their places.

Elements of Q(sqrt D) are stored as a + b*sqrt(D) with ``Fraction``
coordinates.  Absolute values are normalised so that they extend the usual
absolute values of Q: for a place w above p with ramification index e,
``|t|_w = p ** (-ord_w(t) / e)``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Optional, Union

from mpmath import MPContext
from sympy import factorint, isprime
from sympy.ntheory import sqrt_mod

__all__ = [
    "INFINITY",
    "FieldDescriptor",
    "AlgebraicNumber",
    "Place",
    "PlaceSet",
    "abs_value",
    "log_abs",
    "valuation",
    "places_above",
    "fundamental_unit",
    "support_primes",
    "support_places",
    "is_squarefree",
    "RATIONALS",
]

INFINITY = "inf"

Rational = Union[int, Fraction]

_MP = MPContext()
_MP.prec = 128


def is_squarefree(n: int) -> bool:
    if n == 0:
        return False
    return all(e == 1 for e in factorint(abs(n)).values())


def _vp(n: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    n = abs(n)
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


@dataclass(frozen=True)
class FieldDescriptor:
    """Q (``D is None``) or the real quadratic field Q(sqrt D)."""

    D: Optional[int] = None

    def __post_init__(self):
        if self.D is not None:
            if not isinstance(self.D, int) or self.D <= 1:
                raise ValueError(f"D must be an integer > 1, got {self.D!r}")
            if not is_squarefree(self.D):
                raise ValueError(f"D = {self.D} is not squarefree")

    @classmethod
    def rational(cls) -> "FieldDescriptor":
        return cls(None)

    @classmethod
    def real_quadratic(cls, D: int) -> "FieldDescriptor":
        return cls(D)

    @property
    def kind(self) -> str:
        return "rational" if self.D is None else "real_quadratic"

    @property
    def degree(self) -> int:
        return 1 if self.D is None else 2

    @property
    def discriminant(self) -> int:
        if self.D is None:
            return 1
        return self.D if self.D % 4 == 1 else 4 * self.D

    def element(self, a: Rational = 0, b: Rational = 0) -> "AlgebraicNumber":
        return AlgebraicNumber(self, a, b)

    def parse(self, text: str) -> "AlgebraicNumber":
        return AlgebraicNumber.parse(text, self)

    def to_json(self) -> dict:
        if self.D is None:
            return {"kind": "rational"}
        return {"kind": "real_quadratic", "D": self.D}

    @classmethod
    def from_json(cls, data: dict) -> "FieldDescriptor":
        kind = data.get("kind")
        if kind == "rational":
            return cls(None)
        if kind == "real_quadratic":
            return cls(int(data["D"]))
        raise ValueError(f"unknown field kind {kind!r}")

    def __str__(self):
        return "Q" if self.D is None else f"Q(sqrt{self.D})"


RATIONALS = FieldDescriptor()


_NUMBER_RE = re.compile(
    r"""^\s*
    (?P<a>[+-]?\s*\d+(?:\s*/\s*\d+)?)?
    \s*
    (?:(?P<sign>[+-])?\s*(?:(?P<b>\d+(?:\s*/\s*\d+)?)\s*\*\s*)?sqrt\s*\(?\s*(?P<D>\d+)\s*\)?)?
    \s*$""",
    re.VERBOSE,
)


def _frac(text: str) -> Fraction:
    return Fraction(text.replace(" ", ""))


def _fmt_frac(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


class AlgebraicNumber:
    """An element a + b*sqrt(D) of a field from :class:`FieldDescriptor`."""

    __slots__ = ("field", "a", "b")

    def __init__(self, field: FieldDescriptor, a: Rational = 0, b: Rational = 0):
        a = Fraction(a)
        b = Fraction(b)
        if field.D is None and b != 0:
            raise ValueError("irrational part given for an element of Q")
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    def __setattr__(self, name, value):
        raise AttributeError("AlgebraicNumber is immutable")

    @classmethod
    def parse(cls, text: str, field: FieldDescriptor = RATIONALS) -> "AlgebraicNumber":
        """Parse ``"a/b"`` or ``"a/b+c/d*sqrtD"`` exactly."""
        m = _NUMBER_RE.match(text)
        if not m or (m.group("a") is None and m.group("D") is None):
            raise ValueError(f"cannot parse algebraic number {text!r}")
        a = _frac(m.group("a")) if m.group("a") else Fraction(0)
        b = Fraction(0)
        if m.group("D") is not None:
            D = int(m.group("D"))
            if field.D != D:
                raise ValueError(f"{text!r} does not lie in {field}")
            b = _frac(m.group("b")) if m.group("b") else Fraction(1)
            if m.group("sign") == "-":
                b = -b
            elif m.group("sign") is None and m.group("a") is not None:
                raise ValueError(f"missing sign before sqrt term in {text!r}")
        return cls(field, a, b)

    # -- coercion -----------------------------------------------------------------

    def _coerce(self, other) -> "AlgebraicNumber":
        if isinstance(other, AlgebraicNumber):
            if other.field != self.field:
                raise ValueError(f"field mismatch: {self.field} vs {other.field}")
            return other
        if isinstance(other, (int, Fraction)):
            return AlgebraicNumber(self.field, other)
        return NotImplemented

    # -- arithmetic ---------------------------------------------------------------

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return AlgebraicNumber(self.field, self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self):
        return AlgebraicNumber(self.field, -self.a, -self.b)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return AlgebraicNumber(self.field, self.a - o.a, self.b - o.b)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if self.field.D is None:
            return AlgebraicNumber(self.field, self.a * o.a)
        D = self.field.D
        return AlgebraicNumber(
            self.field, self.a * o.a + D * self.b * o.b, self.a * o.b + self.b * o.a
        )

    __rmul__ = __mul__

    def inverse(self) -> "AlgebraicNumber":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        if self.field.D is None:
            return AlgebraicNumber(self.field, 1 / self.a)
        n = self.norm()
        return AlgebraicNumber(self.field, self.a / n, -self.b / n)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        result = AlgebraicNumber(self.field, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # -- queries ------------------------------------------------------------------

    def norm(self) -> Fraction:
        if self.field.D is None:
            return self.a
        return self.a * self.a - self.field.D * self.b * self.b

    def trace(self) -> Fraction:
        return self.a if self.field.D is None else 2 * self.a

    def conjugate(self) -> "AlgebraicNumber":
        return AlgebraicNumber(self.field, self.a, -self.b)

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def is_rational(self) -> bool:
        return self.b == 0

    def integral_form(self) -> tuple[int, int, int]:
        """Return integers (A, B, c) with self = (A + B*sqrt D) / c and c >= 1."""
        c = math.lcm(self.a.denominator, self.b.denominator)
        return int(self.a * c), int(self.b * c), c

    def is_integral(self) -> bool:
        """Membership in the ring of integers."""
        if self.field.D is None:
            return self.a.denominator == 1
        return self.trace().denominator == 1 and self.norm().denominator == 1

    def sign(self, index: int = 0) -> int:
        """Exact sign of the image under embedding ``index``."""
        a = self.a
        b = -self.b if index else self.b
        if b == 0 or a == 0:
            x = a if b == 0 else b
            return (x > 0) - (x < 0)
        if (a > 0) == (b > 0):
            return 1 if a > 0 else -1
        # opposite signs: the larger magnitude wins
        if a * a > b * b * self.field.D:
            return 1 if a > 0 else -1
        return 1 if b > 0 else -1

    def embed(self, index: int = 0) -> float:
        """Real value under the embedding sending sqrt D to (-1)**index * sqrt D."""
        if self.field.D is None:
            return float(self.a)
        sign = -1 if index else 1
        return float(self.a) + sign * float(self.b) * math.sqrt(self.field.D)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.b == 0 and self.a == other
        if not isinstance(other, AlgebraicNumber):
            return NotImplemented
        return self.field == other.field and self.a == other.a and self.b == other.b

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.field, self.a, self.b))

    def __bool__(self):
        return not self.is_zero()

    def sort_key(self) -> tuple:
        return (self.a, self.b)

    def __str__(self):
        if self.b == 0:
            return _fmt_frac(self.a)
        b = self.b
        mag = "" if abs(b) == 1 else _fmt_frac(abs(b)) + "*"
        term = f"{mag}sqrt{self.field.D}"
        if self.a == 0:
            return ("-" if b < 0 else "") + term
        return f"{_fmt_frac(self.a)}{'-' if b < 0 else '+'}{term}"

    def __repr__(self):
        return f"AlgebraicNumber({self.field}, {self})"


# -----------------------------------------------------------------------------
# Places
# -----------------------------------------------------------------------------


@dataclass(frozen=True)
class Place:
    """A place of Q or of a real quadratic field.

    ``local_degree`` is n_w = [L_w : Q_p] and ``ramification`` is e_w.  For an
    archimedean place ``index`` selects the sign of sqrt D; for a split prime
    it selects the p-adic square root of D (see :func:`_padic_sqrt`).
    """

    field: FieldDescriptor
    kind: str
    index: int = 0
    p: Optional[int] = None
    split: Optional[str] = None
    norm: int = 2
    local_degree: int = 1
    ramification: int = 1

    @property
    def is_archimedean(self) -> bool:
        return self.kind == "arch"

    @property
    def baker_norm(self) -> int:
        """N(w): 2 at archimedean places, the ideal norm otherwise."""
        return 2 if self.is_archimedean else self.norm

    def sort_key(self) -> tuple:
        if self.is_archimedean:
            return (0, 0, self.index)
        return (1, self.p, self.index)

    def __lt__(self, other: "Place"):
        return self.sort_key() < other.sort_key()

    def to_json(self) -> dict:
        if self.is_archimedean:
            return {"type": "arch", "index": self.index}
        return {"type": "finite", "p": self.p, "split": self.split, "index": self.index}

    @classmethod
    def from_json(cls, data: dict, field: FieldDescriptor) -> "Place":
        if data["type"] == "arch":
            return places_above(INFINITY, field)[int(data.get("index", 0))]
        places = places_above(int(data["p"]), field)
        place = places[int(data.get("index", 0))]
        if "split" in data and data["split"] != place.split:
            raise ValueError(f"splitting type mismatch for {data}")
        return place

    def __str__(self):
        if self.is_archimedean:
            return "inf" if self.field.D is None else f"inf{self.index}"
        if self.split == "split":
            return f"p{self.p}.{self.index}"
        return f"p{self.p}"


def splitting_type(p: int, field: FieldDescriptor) -> str:
    """Decomposition of p via the Kronecker symbol (disc / p)."""
    if field.D is None:
        return "rational"
    D = field.D
    if p == 2:
        if D % 4 != 1:
            return "ramified"
        return "split" if D % 8 == 1 else "inert"
    if D % p == 0:
        return "ramified"
    return "split" if pow(D, (p - 1) // 2, p) == 1 else "inert"


@lru_cache(maxsize=None)
def places_above(p, field: FieldDescriptor) -> tuple[Place, ...]:
    """All places of ``field`` above the rational prime ``p`` (or ``INFINITY``)."""
    if p == INFINITY or p == math.inf:
        if field.D is None:
            return (Place(field, "arch", 0),)
        return (Place(field, "arch", 0), Place(field, "arch", 1))
    if not isinstance(p, int) or not isprime(p):
        raise ValueError(f"{p!r} is not a rational prime")
    kind = splitting_type(p, field)
    if kind == "rational":
        return (Place(field, "finite", 0, p, kind, p, 1, 1),)
    if kind == "split":
        return tuple(Place(field, "finite", i, p, kind, p, 1, 1) for i in (0, 1))
    if kind == "inert":
        return (Place(field, "finite", 0, p, kind, p * p, 2, 1),)
    return (Place(field, "finite", 0, p, kind, p, 2, 2),)


@lru_cache(maxsize=4096)
def _padic_sqrt(D: int, p: int, index: int, k: int) -> int:
    """A square root of D modulo p**k, chosen consistently for each index.

    Odd p: index 0 lifts the smallest root modulo p.  p = 2: index 0 is the
    2-adic root congruent to 1 mod 4.
    """
    if p == 2:
        r = 1 if index == 0 else 3
        j = 3
        while j < k + 1:
            if (r * r - D) % (1 << (j + 1)):
                r += 1 << (j - 1)
            j += 1
        return r % (1 << k)
    roots = sorted(sqrt_mod(D % p, p, all_roots=True))
    r = roots[index]
    mod = p
    target = p**k
    while mod < target:
        mod = min(mod * mod, target)
        r = (r - (r * r - D) * pow(2 * r, -1, mod)) % mod
    return r


def valuation(t: AlgebraicNumber, w: Place) -> int:
    """ord_w(t) for a finite place w, normalised so ord_w is surjective onto Z."""
    if w.is_archimedean:
        raise ValueError("valuation is only defined at finite places")
    if t.field != w.field:
        raise ValueError(f"field mismatch: {t.field} vs place of {w.field}")
    if t.is_zero():
        raise ValueError("valuation of zero")
    p = w.p
    n = t.norm()
    if w.split == "rational":
        return _vp(t.a.numerator, p) - _vp(t.a.denominator, p)
    if w.split in ("inert", "ramified"):
        v = _vp(n.numerator, p) - _vp(n.denominator, p)
        return v // 2 if w.split == "inert" else v
    A, B, c = t.integral_form()
    bound = _vp(A * A - w.field.D * B * B, p)
    modulus = p ** (bound + 1)
    r = _padic_sqrt(w.field.D, p, w.index, bound + 1)
    return _vp((A + B * r) % modulus or modulus, p) - _vp(c, p)


def _log_pos(x: Fraction, y: Fraction, D: int) -> float:
    """log(|x| + |y| sqrt D) for (x, y) not both zero."""
    try:
        v = abs(float(x)) + abs(float(y)) * math.sqrt(D)
        if 0 < v < 1e300 and (v > 1e-300):
            return math.log(v)
    except OverflowError:
        pass
    mp = _MP
    v = abs(mp.mpf(x.numerator) / x.denominator) + abs(
        mp.mpf(y.numerator) / y.denominator
    ) * mp.sqrt(D)
    return float(mp.log(v))


def _log_abs_fraction(q: Fraction) -> float:
    return math.log(abs(q.numerator)) - math.log(q.denominator)


def log_abs(t: AlgebraicNumber, w: Place) -> float:
    """log |t|_w as a float; the archimedean case avoids cancellation via the norm."""
    if t.field != w.field:
        raise ValueError(f"field mismatch: {t.field} vs place of {w.field}")
    if t.is_zero():
        return -math.inf
    if not w.is_archimedean:
        v = valuation(t, w)
        if w.ramification == 1:
            return -v * math.log(w.p)
        return (-v / w.ramification) * math.log(w.p)
    if t.field.D is None:
        return _log_abs_fraction(t.a)
    b = -t.b if w.index else t.b
    if t.a == 0 or b == 0 or (t.a > 0) == (b > 0):
        return _log_pos(t.a, b, t.field.D)
    # the other conjugate carries no cancellation
    return _log_abs_fraction(t.norm()) - _log_pos(t.a, b, t.field.D)


def abs_value(t: AlgebraicNumber, w: Place) -> Union[Fraction, float]:
    """|t|_w, exact (a ``Fraction``) whenever the value is rational."""
    if t.field != w.field:
        raise ValueError(f"field mismatch: {t.field} vs place of {w.field}")
    if t.is_zero():
        return Fraction(0)
    if w.is_archimedean:
        if t.field.D is None:
            return abs(t.a)
        return math.exp(log_abs(t, w))
    v = valuation(t, w)
    if v % w.ramification == 0:
        return Fraction(w.p) ** (-(v // w.ramification))
    return float(w.p) ** (-v / w.ramification)


def support_primes(t: AlgebraicNumber) -> list[int]:
    """Rational primes below every finite place where |t|_w != 1."""
    if t.is_zero():
        raise ValueError("support of zero")
    if t.field.D is None:
        ns = [t.a.numerator, t.a.denominator]
    else:
        A, B, c = t.integral_form()
        ns = [A * A - t.field.D * B * B, c]
    primes: set[int] = set()
    for n in ns:
        n = abs(n)
        if n > 1:
            primes.update(int(q) for q in factorint(n))
    return sorted(primes)


def support_places(t: AlgebraicNumber) -> list[Place]:
    out = []
    for p in support_primes(t):
        for w in places_above(p, t.field):
            if valuation(t, w) != 0:
                out.append(w)
    return out


# -----------------------------------------------------------------------------
# Place sets
# -----------------------------------------------------------------------------


@dataclass(frozen=True)
class PlaceSet:
    """A finite set S of places containing every archimedean place."""

    field: FieldDescriptor
    places: tuple[Place, ...] = field(default=())

    def __post_init__(self):
        if len(set(self.places)) != len(self.places):
            raise ValueError("duplicate places in S")
        ps = tuple(sorted(self.places))
        for w in ps:
            if w.field != self.field:
                raise ValueError(f"place {w} is not a place of {self.field}")
        for w in places_above(INFINITY, self.field):
            if w not in ps:
                raise ValueError("S must contain every archimedean place")
        object.__setattr__(self, "places", ps)

    @classmethod
    def from_spec(cls, field: FieldDescriptor, items: Iterable) -> "PlaceSet":
        """Build S from archimedean places plus ``items``.

        Each item is a prime ``p`` (all places above p) or ``(p, index)`` or
        the string ``"p:index"`` (one place above a split prime).
        """
        places = list(places_above(INFINITY, field))
        for item in items:
            if isinstance(item, str):
                item = item.strip()
                if not item:
                    continue
                if ":" in item:
                    p, i = item.split(":")
                    item = (int(p), int(i))
                else:
                    item = int(item)
            if isinstance(item, tuple):
                p, i = item
                above = places_above(p, field)
                if not 0 <= i < len(above):
                    raise ValueError(f"no place with index {i} above {p}")
                new = [above[i]]
            else:
                new = list(places_above(item, field))
            for w in new:
                if w in places:
                    raise ValueError(f"place {w} listed twice")
                places.append(w)
        return cls(field, tuple(places))

    @property
    def archimedean(self) -> tuple[Place, ...]:
        return tuple(w for w in self.places if w.is_archimedean)

    @property
    def finite(self) -> tuple[Place, ...]:
        return tuple(w for w in self.places if not w.is_archimedean)

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(sorted({w.p for w in self.finite}))

    @property
    def s(self) -> int:
        return len(self.places)

    def __len__(self):
        return len(self.places)

    def __iter__(self) -> Iterator[Place]:
        return iter(self.places)

    def __contains__(self, w) -> bool:
        return w in self.places

    def to_json(self) -> dict:
        return {
            "field": self.field.to_json(),
            "places": [w.to_json() for w in self.places],
        }

    @classmethod
    def from_json(cls, data: dict) -> "PlaceSet":
        fd = FieldDescriptor.from_json(data["field"])
        return cls(fd, tuple(Place.from_json(p, fd) for p in data["places"]))

    def __str__(self):
        return "{" + ", ".join(str(w) for w in self.places) + "}"


# -----------------------------------------------------------------------------
# Fundamental units
# -----------------------------------------------------------------------------


def fundamental_unit(D: int) -> AlgebraicNumber:
    """The fundamental unit eps > 1 of the ring of integers of Q(sqrt D).

    Runs the continued fraction of sqrt D (D = 2, 3 mod 4) or of
    (1 + sqrt D)/2 (D = 1 mod 4) until a convergent has unit norm.
    """
    fd = FieldDescriptor.real_quadratic(D)
    r = math.isqrt(D)
    if D % 4 == 1:
        P, Q = 1, 2
        const = (D - 1) // 4
    else:
        P, Q = 0, 1
        const = None
    p_prev, p_cur = 0, 1
    q_prev, q_cur = 1, 0
    for _ in range(100000):
        a = (P + r) // Q
        p_prev, p_cur = p_cur, a * p_cur + p_prev
        q_prev, q_cur = q_cur, a * q_cur + q_prev
        p, q = p_cur, q_cur
        if const is None:
            if abs(p * p - D * q * q) == 1:
                eps = AlgebraicNumber(fd, p, q)
                break
        elif abs(p * p - p * q - const * q * q) == 1:
            # p - q*omega_bar with omega = (1 + sqrt D)/2
            eps = AlgebraicNumber(fd, Fraction(2 * p - q, 2), Fraction(q, 2))
            break
        P = a * Q - P
        Q = (D - P * P) // Q
    else:  # pragma: no cover
        raise RuntimeError(f"continued fraction of sqrt({D}) did not terminate")
    assert abs(eps.norm()) == 1 and eps.is_integral()
    return eps
