import itertools
import math
from fractions import Fraction

import pytest

from baker_sunit.baker_bounds import SUnitEquation, sunit_bound
from baker_sunit.number_fields import RATIONALS, FieldDescriptor, PlaceSet, support_places
from baker_sunit.sunit_solver import (
    NotASolutionError,
    ResourceLimitError,
    Solution,
    critical_set,
    enumerate_solutions,
    lemma41_item1,
    lemma41_item1_pair,
    lemma41_item1_violations,
    lemma41_item2,
    lemma41_item3,
    place_selection,
    preferred_places,
    verify_bound,
)

from conftest import rational_equation


def _rational_exponents(q: Fraction, primes):
    """Exponents of q over the primes, or None when q is not an S-unit."""
    exps = []
    num, den = abs(q.numerator), q.denominator
    for p in primes:
        e = 0
        while num % p == 0:
            num //= p
            e += 1
        while den % p == 0:
            den //= p
            e -= 1
        exps.append(e)
    return exps if num == den == 1 else None


def brute_rational(primes, alpha, beta, cap):
    """Independent oracle: all x = +-prod p^e (|e| <= cap) with y an S-unit."""
    alpha, beta = Fraction(alpha), Fraction(beta)
    out = set()
    for exps in itertools.product(range(-cap, cap + 1), repeat=len(primes)):
        base = Fraction(1)
        for p, e in zip(primes, exps):
            base *= Fraction(p) ** e
        for x in (base, -base):
            y = (1 - alpha * x) / beta
            ey = _rational_exponents(y, primes) if y != 0 else None
            if ey is not None and max(map(abs, ey), default=0) <= cap:
                out.add((x, y))
    return out


@pytest.mark.parametrize(
    "primes,alpha,beta,cap",
    [((2,), 1, 1, 8), ((2, 3), 1, 1, 6), ((2, 3), 3, 5, 6), ((2, 3, 5), 1, 2, 4), ((3, 5, 7), 1, 1, 3)],
)
def test_enumeration_matches_brute_force(primes, alpha, beta, cap):
    eq = rational_equation(primes, alpha, beta)
    got = {(s.x.a, s.y.a) for s in enumerate_solutions(eq, cap)}
    assert got == brute_rational(primes, alpha, beta, cap)


def test_two_adic_solutions():
    sols = enumerate_solutions(rational_equation([2]), 8)
    assert [(str(s.x), str(s.y)) for s in sols] == [("-1", "2"), ("1/2", "1/2"), ("2", "-1")]


def test_known_solutions_23():
    sols = enumerate_solutions(rational_equation([2, 3]), 12)
    pairs = {(str(s.x), str(s.y)) for s in sols}
    assert len(sols) == 21
    assert ("9", "-8") in pairs and ("1/9", "8/9") in pairs and ("-1/8", "9/8") in pairs
    assert max(s.height for s in sols) == pytest.approx(math.log(9))


def test_swap_closure_when_alpha_equals_beta():
    for primes in ([2, 3], [2, 3, 5]):
        sols = enumerate_solutions(rational_equation(primes), 6)
        pairs = {(s.x, s.y) for s in sols}
        assert pairs == {(y, x) for x, y in pairs}


def test_sorted_and_deterministic():
    eq = rational_equation([2, 3, 5])
    a = [s.to_json() for s in enumerate_solutions(eq, 5)]
    b = [s.to_json() for s in enumerate_solutions(eq, 5)]
    assert a == b
    sols = enumerate_solutions(eq, 5)
    assert [s.sort_key() for s in sols] == sorted(s.sort_key() for s in sols)
    assert a[0]["schema"] == 1


def test_quadratic_enumeration():
    fd = FieldDescriptor(2)
    S = PlaceSet.from_spec(fd, [2, 7])
    eq = SUnitEquation(S, fd.element(1), fd.element(1))
    sols = enumerate_solutions(eq, 3)
    # x = -(1 + sqrt2), y = 2 + sqrt2 = sqrt2 (1 + sqrt2)
    assert (fd.parse("-1-sqrt2"), fd.parse("2+sqrt2")) in {(s.x, s.y) for s in sols}
    for s in sols:
        assert s.x + s.y == 1
        assert all(w in S for w in support_places(s.x))
    pairs = {(s.x, s.y) for s in sols}
    assert pairs == {(y, x) for x, y in pairs}
    for s in sols:
        assert lemma41_item1_pair(s, eq) and lemma41_item2(s, eq) and lemma41_item3(s, eq)
        assert place_selection(s, eq).kind in ("selected", "collision")


def test_cap_and_work_limit(monkeypatch):
    eq = rational_equation([2, 3])
    with pytest.raises(ValueError):
        enumerate_solutions(eq, 0)
    with pytest.raises(ResourceLimitError):
        enumerate_solutions(eq, 12, work_limit=100)
    monkeypatch.setenv("BAKER_WORK_LIMIT", "10")
    with pytest.raises(ResourceLimitError):
        enumerate_solutions(eq, 2)


def test_critical_set():
    eq = rational_equation([2, 3], 3, 5)
    sol = enumerate_solutions(eq, 4)[0]
    ax, by, q = critical_set(sol, eq)
    assert ax + by == 1 and q == by / ax


def test_lemma_checks_reject_non_solutions():
    eq = rational_equation([2, 3])
    good = enumerate_solutions(eq, 3)[0]
    bad = Solution(good.x, good.x, good.hx, good.hx, good.dx, good.dx)
    for check in (lemma41_item1, lemma41_item2, lemma41_item3, place_selection):
        with pytest.raises(NotASolutionError):
            check(bad, eq)


def test_item1_threshold_is_strict():
    # x = y = 1/2: |1/2| is exactly on the threshold at infinity, so nothing exceeds it
    eq = rational_equation([2])
    sol = [s for s in enumerate_solutions(eq, 3) if s.x == Fraction(1, 2)][0]
    assert lemma41_item1(sol, eq)


def test_item1_three_member_form_fails_on_9_minus_8():
    # beta y = -8 and beta y/(alpha x) = -8/9 are both 2-adically small
    eq = rational_equation([2, 3])
    sol = [s for s in enumerate_solutions(eq, 3) if s.x == 9][0]
    viol = lemma41_item1_violations(sol, eq)
    assert [(str(w), hits) for w, hits in viol] == [("p2", (1, 2))]
    assert not lemma41_item1(sol, eq)
    assert lemma41_item1_pair(sol, eq)


def test_item1_pair_form_on_suite(suite_solutions):
    for eq, sols in suite_solutions:
        for s in sols:
            assert lemma41_item1_pair(s, eq)
            for _, hits in lemma41_item1_violations(s, eq):
                assert 2 in hits


def test_preferred_places():
    S = PlaceSet.from_spec(RATIONALS, [2, 3, 5, 7, 11])
    assert [str(w) for w in preferred_places(S)] == ["inf", "p2", "p3", "p5"]
    S2 = PlaceSet.from_spec(RATIONALS, [2, 3])
    assert preferred_places(S2) == S2.archimedean


def test_verify_bound():
    eq = rational_equation([2, 3])
    report = sunit_bound(eq)
    sols = enumerate_solutions(eq, 6)
    v = verify_bound(eq, report, sols)
    assert v.passed and v.margin > 0 and v.label == "PASS"
    assert verify_bound(eq, report, []).passed
    report.bound = 1.0
    assert not verify_bound(eq, report, sols).passed
    with pytest.raises(ValueError):
        verify_bound(rational_equation([2, 3], 1, 2), report, sols)
