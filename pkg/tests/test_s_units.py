import itertools
import math
from fractions import Fraction

import mpmath
import pytest

from baker_sunit.number_fields import (
    INFINITY,
    RATIONALS,
    AlgebraicNumber,
    FieldDescriptor,
    PlaceSet,
    places_above,
    valuation,
)
from baker_sunit.s_units import (
    NonPrincipalError,
    NotSUnitError,
    SUnitDecomposition,
    bugeaud_gyory_c1,
    decompose,
    fundamental_system,
    is_s_unit,
    prime_norm_stats,
    principal_generator,
    recompose,
    s_regulator,
    s_regulator_of,
)

Q2 = FieldDescriptor(2)


def test_regulator_rational():
    S = PlaceSet.from_spec(RATIONALS, [2, 3])
    for omit in range(3):
        assert s_regulator(RATIONALS, S, omit) == pytest.approx(
            math.log(2) * math.log(3), abs=1e-12
        )
    assert s_regulator(RATIONALS, PlaceSet.from_spec(RATIONALS, [])) == 1.0


def test_regulator_q_sqrt2():
    S = PlaceSet.from_spec(Q2, [])
    assert s_regulator(Q2, S) == pytest.approx(math.log(1 + math.sqrt(2)), abs=1e-10)


def _mp_log_abs(t, w):
    # independent high-precision evaluation of log |t|_w
    if not w.is_archimedean:
        return -mpmath.mpf(valuation(t, w)) / w.ramification * mpmath.log(w.p)
    a = mpmath.mpf(t.a.numerator) / t.a.denominator
    b = mpmath.mpf(t.b.numerator) / t.b.denominator
    sgn = -1 if w.index else 1
    return mpmath.log(abs(a + sgn * b * mpmath.sqrt(t.field.D)))


@pytest.mark.parametrize("D,primes", [(2, [7]), (2, [7, 3]), (5, [11, 2]), (3, [13])])
def test_regulator_against_mpmath_determinant(D, primes):
    fd = FieldDescriptor(D)
    S = PlaceSet.from_spec(fd, primes)
    system = fundamental_system(fd, S)
    with mpmath.workdps(50):
        rows = [
            [w.local_degree * _mp_log_abs(u, w) for u in system.units]
            for w in list(S)[1:]
        ]
        ref = abs(mpmath.det(mpmath.matrix(rows)))
    # the regulator does not depend on which place is dropped
    for omit in range(S.s):
        assert s_regulator_of(system, omit) == pytest.approx(float(ref), rel=1e-10)


def test_generators_are_prime():
    for D, p in [(2, 7), (2, 17), (3, 11), (5, 11), (13, 3), (7, 3)]:
        fd = FieldDescriptor(D)
        for w in places_above(p, fd):
            pi = principal_generator(w)
            assert pi.is_integral() and abs(pi.norm()) == w.norm
            assert valuation(pi, w) == 1


def test_non_principal_raises():
    fd = FieldDescriptor(10)
    with pytest.raises(NonPrincipalError):
        principal_generator(places_above(3, fd)[0])


def _brute_s_units(fd, S, bound=40, den=50):
    """Elements a + b sqrt D with small numerators and S-unit support."""
    out = []
    c = 2 if fd.D % 4 == 1 else 1
    for A in range(-bound, bound + 1):
        for B in range(-bound, bound + 1):
            t = AlgebraicNumber(fd, Fraction(A, c), Fraction(B, c))
            if t.is_zero() or not t.is_integral():
                continue
            if is_s_unit(t, S):
                out.append(t)
    return out


@pytest.mark.parametrize("D,primes", [(2, [7]), (2, [7, 3]), (5, [11])])
def test_system_generates_brute_force_units(D, primes):
    fd = FieldDescriptor(D)
    S = PlaceSet.from_spec(fd, primes)
    system = fundamental_system(fd, S)
    units = _brute_s_units(fd, S)
    assert len(units) > 10
    for t in units:
        dec = decompose(t, system)
        assert recompose(dec, system) == t


def test_decompose_rational():
    S = PlaceSet.from_spec(RATIONALS, [2, 3, 5])
    system = fundamental_system(RATIONALS, S)
    for exps in itertools.product(range(-3, 4), repeat=3):
        for z in (1, -1):
            t = RATIONALS.element(z * Fraction(2) ** exps[0] * Fraction(3) ** exps[1] * Fraction(5) ** exps[2])
            dec = decompose(t, system)
            assert dec.exponents == exps and dec.torsion == z
            assert dec.B == max(abs(e) for e in exps)
    with pytest.raises(NotSUnitError):
        decompose(RATIONALS.element(7), system)
    assert recompose(SUnitDecomposition(RATIONALS.element(-1), (1, 0, 2)), system) == -50


def test_bugeaud_gyory_constant():
    assert bugeaud_gyory_c1(3, 1) == pytest.approx(4 / 4)
    assert bugeaud_gyory_c1(4, 2) == pytest.approx(36 / (8 * 4))
    with pytest.raises(ValueError):
        bugeaud_gyory_c1(1, 1)


@pytest.mark.parametrize(
    "fd,primes", [(RATIONALS, [2, 3]), (RATIONALS, [2, 3, 5]), (Q2, [7]), (Q2, ["7:0"])]
)
def test_bugeaud_gyory_product_bound(fd, primes):
    system = fundamental_system(fd, PlaceSet.from_spec(fd, primes))
    prod, bound, holds = system.bugeaud_gyory_check()
    assert holds, (prod, bound)


def test_bugeaud_gyory_fails_for_two_rational_places():
    # c1(2) = 1/2 over Q, below the only possible product h(p) = log p
    system = fundamental_system(RATIONALS, PlaceSet.from_spec(RATIONALS, [2]))
    prod, bound, holds = system.bugeaud_gyory_check()
    assert prod == pytest.approx(math.log(2)) and bound == pytest.approx(math.log(2) / 2)
    assert not holds


def test_prime_norm_stats():
    assert prime_norm_stats(PlaceSet.from_spec(RATIONALS, [2, 3, 5, 7, 11])) == (11, 5)
    assert prime_norm_stats(PlaceSet.from_spec(RATIONALS, [2, 3])) == (3, 1)
    # split primes count once per place
    assert prime_norm_stats(PlaceSet.from_spec(Q2, [7, 3])) == (9, 7)


def test_system_json():
    system = fundamental_system(Q2, PlaceSet.from_spec(Q2, ["7:0"]))
    data = system.to_json()
    assert data["schema"] == 1
    assert data["units"][0] == "1+sqrt2"
    assert places_above(INFINITY, Q2)[0] in system.S
