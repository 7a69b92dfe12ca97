"""Rigorous interval evaluation for archimedean logs and threshold comparisons.

All intervals come from a private mpmath interval context with a 128-bit
mantissa and outward rounding, so the process-wide ``mpmath.iv`` is untouched.
"""

from __future__ import annotations

from fractions import Fraction

from mpmath.ctx_iv import MPIntervalContext

from .number_fields import AlgebraicNumber, Place, valuation

IV = MPIntervalContext()
IV.prec = 128

DEFAULT_SLACK = 1e-12


def interval(x) -> "IV.mpf":
    """Exact rationals become the tightest enclosing interval."""
    if isinstance(x, Fraction):
        return IV.mpf(x.numerator) / x.denominator
    if isinstance(x, int):
        return IV.mpf(x)
    if isinstance(x, float):
        return IV.mpf(x)
    return x


def _log_fraction(q: Fraction):
    return IV.log(IV.mpf(abs(q.numerator))) - IV.log(IV.mpf(q.denominator))


def _log_pos(x: Fraction, y: Fraction, D: int):
    return IV.log(abs(interval(x)) + abs(interval(y)) * IV.sqrt(IV.mpf(D)))


def log_abs_interval(t: AlgebraicNumber, w: Place):
    """Enclosure of log |t|_w (t nonzero)."""
    if t.is_zero():
        raise ValueError("log of |0|")
    if not w.is_archimedean:
        v = valuation(t, w)
        return IV.mpf(-v) / w.ramification * IV.log(IV.mpf(w.p))
    if t.field.D is None:
        return _log_fraction(t.a)
    b = -t.b if w.index else t.b
    if t.a == 0 or b == 0 or (t.a > 0) == (b > 0):
        return _log_pos(t.a, b, t.field.D)
    return _log_fraction(t.norm()) - _log_pos(t.a, b, t.field.D)


def log_plus_interval(x):
    """max(x, 0) on intervals."""
    x = interval(x)
    return IV.mpf([max(x.a, 0), max(x.b, 0)])


def iv_max(*xs):
    xs = [interval(x) for x in xs]
    return IV.mpf([max(x.a for x in xs), max(x.b for x in xs)])


def certainly_le(x, y, slack: float = DEFAULT_SLACK) -> bool:
    """True when every point of x is <= every point of y, up to ``slack``.

    Equality at the boundary counts as satisfied.
    """
    d = interval(x) - interval(y)
    return d.b <= slack


def certainly_ge(x, y, slack: float = DEFAULT_SLACK) -> bool:
    return certainly_le(y, x, slack)


def midpoint(x) -> float:
    return float(interval(x).mid)
