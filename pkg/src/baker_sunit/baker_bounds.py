"""Explicit constants and the height bound for alpha*x + beta*y = 1.

The bound is produced by the elimination argument for S-unit equations:
a trivial estimate when |S| <= 2, otherwise the largest h satisfying

    h/s - H <= (n_w/d) * c2(d,s) * c3(d,s) * R_S * H * log(c1(d,s) * h / (sqrt(2) H))

maximised against the 3H and 4H + log 2 case bounds.  Constants quoted from
outside sources (the linear-forms constant C(d,s) and the two closed-form
constants for comparison) are never built in; they are read from a JSON
config and flagged as injected.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

from scipy.optimize import bisect

from .heights import log_star, weil_height
from .number_fields import AlgebraicNumber, Place, PlaceSet
from .s_units import bugeaud_gyory_c1, prime_norm_stats, s_regulator

SOLVER_RTOL = 1e-9
SOLVER_MAXITER = 500


class MissingConstantError(ValueError):
    """An externally sourced constant was needed but not configured."""


class SolverError(RuntimeError):
    pass


def c1_const(d: int, s: int) -> float:
    """Exponent bound: B <= c1(d,s) h(y) for y = zeta * prod eps_i ** b_i."""
    if s < 2:
        raise ValueError(f"c1 needs s >= 2, got s = {s}")
    if d < 1:
        raise ValueError(f"degree must be >= 1, got {d}")
    f = math.factorial(s - 1) ** 2
    if d == 1:
        return f / (2.0 ** (s - 3) * math.log(2))
    return f / 2.0 ** (s - 2) * math.log(3 * d) ** 3


def c2_branches(d: int, s: int) -> tuple[float, float]:
    scale = d**3 * math.log(math.e * d)
    first = 1.451 * (30 * math.sqrt(2)) ** (s + 4) * (s + 1) ** 5.5
    second = math.pi * 2 ** (6.5 * s + 27)
    return scale * first, scale * second


def c2_const(d: int, s: int) -> float:
    if d < 1 or s < 1:
        raise ValueError("c2 needs d >= 1 and s >= 1")
    return min(c2_branches(d, s))


def c3_const(d: int, s: int) -> float:
    if s < 3:
        raise ValueError(f"c3 needs s >= 3, got s = {s}")
    if d < 1:
        raise ValueError(f"degree must be >= 1, got {d}")
    tail = 8.5 if d == 1 else 29 * d * math.log(d)
    return (
        math.e
        * math.sqrt(s - 2)
        * (math.factorial(s - 1) ** 2 / 2.0 ** (s - 2))
        * math.pi ** (s - 2)
        * tail
    )


def h_parameter(alpha: AlgebraicNumber, beta: AlgebraicNumber, d: int) -> float:
    """H = max(h(alpha), h(beta), 1, pi/d)."""
    if alpha.is_zero() or beta.is_zero():
        raise ValueError("alpha and beta must be nonzero")
    return max(weil_height(alpha), weil_height(beta), 1.0, math.pi / d)


@dataclass(frozen=True)
class InjectedConstants:
    """Constants quoted from external sources; any may be absent."""

    C_prop23: Optional[float] = None
    gy_c26: Optional[float] = None
    gy_c1: Optional[float] = None

    def __post_init__(self):
        for name in ("C_prop23", "gy_c26", "gy_c1"):
            v = getattr(self, name)
            if v is not None and not v > 0:
                raise ValueError(f"{name} must be positive, got {v}")

    @classmethod
    def load(cls, path) -> "InjectedConstants":
        data = json.loads(Path(path).read_text())
        unknown = set(data) - {"C_prop23", "gy_c26", "gy_c1"}
        if unknown:
            raise ValueError(f"unknown constants {sorted(unknown)}")
        return cls(**{k: float(v) for k, v in data.items()})


@dataclass(frozen=True)
class BakerConstants:
    d: int
    s: int
    c1: float
    c2: float
    c3: float
    bg_c1: float
    injected_C: Optional[float] = None
    injected_c26: Optional[float] = None
    injected_gy_c1: Optional[float] = None

    @classmethod
    def builtin(cls, d: int, s: int, injected: Optional[InjectedConstants] = None):
        """The printed constants for (d, s); needs s >= 3."""
        inj = injected or InjectedConstants()
        return cls(
            d=d,
            s=s,
            c1=c1_const(d, s),
            c2=c2_const(d, s),
            c3=c3_const(d, s),
            bg_c1=bugeaud_gyory_c1(s, d),
            injected_C=inj.C_prop23,
            injected_c26=inj.gy_c26,
            injected_gy_c1=inj.gy_c1,
        )


def baker_lower_bound(h_alpha: float, w: Place, consts: BakerConstants, R_S: float) -> float:
    """-C(d,s) N(w) R_S log*(h(alpha)), the lower bound for log|alpha - 1|_w.

    log* is clamped to 1 at h = 0 (its limit from the right).
    """
    if consts.injected_C is None:
        raise MissingConstantError("C(d,s) is not printed; inject it as C_prop23")
    ls = 1.0 if h_alpha <= 0 else log_star(h_alpha)
    return -consts.injected_C * w.baker_norm * R_S * ls


def regulator_extension_bound(h_L: float, R_S: float, m: int, d: int) -> float:
    """h_L * R_S * m^(d/e), an upper bound for the regulator of S plus the primes of m."""
    if m < 1:
        raise ValueError("m must be a positive integer")
    return h_L * R_S * m ** (d / math.e)


def height_inequality(h: float, s: int, H: float, K: float, c1: float) -> float:
    """Left minus right side of h/s - H <= K log(c1 h / (sqrt 2 H)); <= 0 when satisfied."""
    return h / s - H - K * math.log(c1 * h / (math.sqrt(2) * H))


@dataclass(frozen=True)
class SolverResult:
    root: float
    iterations: int
    rtol: float
    bracket: tuple[float, float]


def largest_root(s: int, H: float, K: float, c1: float) -> SolverResult:
    """Largest h with h/s - H = K log(c1 h / (sqrt 2 H)).

    The difference of the two sides is convex with its minimum at h = s K;
    beyond the crossover every larger h violates the inequality.
    """
    if min(s, H, K, c1) <= 0:
        raise ValueError("solver inputs must be positive")
    f = lambda h: height_inequality(h, s, H, K, c1)  # noqa: E731
    lo = max(s * K, math.sqrt(2) * math.e * H / c1)
    if f(lo) > 0:
        lo = s * K
        if f(lo) > 0:
            raise SolverError("inequality never holds: no crossover exists")
    hi = max(1e12 * K * s, 2 * lo, 2 * s * H)
    for _ in range(200):
        if f(hi) > 0:
            break
        hi *= 2
    else:  # pragma: no cover
        raise SolverError("could not bracket the crossover")
    counter = {"n": 0}

    def g(h):
        counter["n"] += 1
        return f(h)

    try:
        root = bisect(g, lo, hi, rtol=SOLVER_RTOL, xtol=1e-300, maxiter=SOLVER_MAXITER)
    except RuntimeError as exc:
        raise SolverError(str(exc)) from exc
    return SolverResult(root, counter["n"], SOLVER_RTOL, (lo, hi))


def solve_height_inequality(
    s: int, d: int, n_w: int, R_S: float, H: float, consts: BakerConstants
) -> float:
    """Largest h* solving the Baker step; every h > h* violates it."""
    K = n_w / d * consts.c2 * consts.c3 * R_S * H
    return largest_root(s, H, K, consts.c1).root


# -----------------------------------------------------------------------------
# Full bound
# -----------------------------------------------------------------------------


@dataclass(frozen=True)
class SUnitEquation:
    """alpha * x + beta * y = 1 with x, y S-units."""

    S: PlaceSet
    alpha: AlgebraicNumber
    beta: AlgebraicNumber

    def __post_init__(self):
        if self.alpha.is_zero() or self.beta.is_zero():
            raise ValueError("alpha and beta must be nonzero")
        if self.alpha.field != self.S.field or self.beta.field != self.S.field:
            raise ValueError("coefficients and S live over different fields")

    @property
    def field(self):
        return self.S.field

    def echo(self) -> dict:
        return {
            "field": self.field.to_json(),
            "S": [w.to_json() for w in self.S],
            "alpha": str(self.alpha),
            "beta": str(self.beta),
        }


BRANCH_TRIVIAL = "trivial-s<=2"
BRANCH_COLLISION = "collision-3H"
BRANCH_ARCH = "archimedean"
BRANCH_FINITE = "finite-P'S"


@dataclass
class BoundReport:
    equation: dict
    branch: str
    theorem_part: int
    H: float
    d: int
    s: int
    R_S: float
    P_S: int
    P_prime_S: int
    bound: float
    case_bounds: dict = field(default_factory=dict)
    constants: dict = field(default_factory=dict)
    provenance: dict = field(default_factory=dict)
    solver: Optional[dict] = None
    closed_form: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.bound >= self.H:
            raise AssertionError("height bound below the trivial scale H")

    def to_json(self) -> dict:
        out = {"schema": 1}
        out.update(asdict(self))
        return out


def sunit_bound(
    eq: SUnitEquation,
    injected: Optional[InjectedConstants] = None,
    closed_form: bool = False,
) -> BoundReport:
    """Height bound for every solution of ``eq``, with all intermediate constants."""
    inj = injected or InjectedConstants()
    fd = eq.field
    d = fd.degree
    s = eq.S.s
    H = h_parameter(eq.alpha, eq.beta, d)
    R_S = s_regulator(fd, eq.S)
    P_S, P3 = prime_norm_stats(eq.S)
    trivial = 4 * H + math.log(2)
    n_fin = len(eq.S.finite)
    common = dict(equation=eq.echo(), H=H, d=d, s=s, R_S=R_S, P_S=P_S, P_prime_S=P3)

    if closed_form and (inj.gy_c26 is None or inj.gy_c1 is None):
        raise MissingConstantError("closed-form output needs gy_c26 and gy_c1")

    closed = {}
    if inj.gy_c26 is not None:
        closed["c26_bound"] = inj.gy_c26 * R_S * log_star(R_S) * H
    if inj.gy_c1 is not None and P3 > 1:
        closed["c1_bound"] = inj.gy_c1 * P3 * R_S * (1 + log_star(R_S) / log_star(P3)) * H

    if s <= 2:
        return BoundReport(
            branch=BRANCH_TRIVIAL,
            theorem_part=1,
            bound=trivial,
            case_bounds={"trivial_4H_log2": trivial},
            provenance={"trivial_4H_log2": "builtin-formula"},
            closed_form=closed,
            **common,
        )

    consts = BakerConstants.builtin(d, s, inj)
    n_w = d  # worst case over the archimedean places
    if n_fin <= 2:
        part, branch = 1, BRANCH_ARCH
        K = n_w / d * consts.c2 * consts.c3 * R_S * H
        multiplier = 1.0
        prov = "builtin-formula"
    else:
        part, branch = 2, BRANCH_FINITE
        multiplier = P3 * (1 + log_star(R_S) / log_star(P3))
        if inj.gy_c1 is not None:
            const, prov = inj.gy_c1, "injected-config"
        else:
            const, prov = consts.c2 * consts.c3, "surrogate"
        K = n_w / d * const * R_S * H * multiplier

    sol = largest_root(s, H, K, consts.c1)
    cases = {"baker": sol.root, "collision_3H": 3 * H, "trivial_4H_log2": trivial}
    bound = max(cases.values())
    if bound == cases["collision_3H"] and bound > sol.root:
        branch = BRANCH_COLLISION
    return BoundReport(
        branch=branch,
        theorem_part=part,
        bound=bound,
        case_bounds=cases,
        constants={
            "c1": consts.c1,
            "c2": consts.c2,
            "c3": consts.c3,
            "bg_c1": consts.bg_c1,
            "n_w": n_w,
            "K": K,
            "P_multiplier": multiplier,
            "C_prop23": consts.injected_C,
            "gy_c26": consts.injected_c26,
            "gy_c1": consts.injected_gy_c1,
        },
        provenance={
            "c1": "builtin-formula",
            "c2": "builtin-formula",
            "c3": "builtin-formula",
            "baker": prov,
            "C_prop23": "injected-config" if consts.injected_C is not None else "absent",
            "gy_c26": "injected-config" if consts.injected_c26 is not None else "absent",
            "gy_c1": "injected-config" if consts.injected_gy_c1 is not None else "absent",
        },
        solver={
            "iterations": sol.iterations,
            "rtol": sol.rtol,
            "bracket": list(sol.bracket),
        },
        closed_form=closed,
        **common,
    )
