import random

import pytest

from saxl.gf import (make_field, FieldCtx, FieldElement, field_arith, eta,
                     frobenius, trace_norm_rel, hilbert90_additive,
                     hilbert90_multiplicative, char_sum_cubic, feng_count,
                     feng_w_formula, NotPrime, Reducible, TooLarge,
                     DivisionByZero, EvenCharacteristic, NonzeroTrace,
                     NonUnitNorm, BadT, NotSubfieldDegree)
from saxl.formulas import feng_lower_bound


# -- construction -----------------------------------------------------------

def brute_smallest_irreducible_cubic_gf3():
    # independent oracle: a cubic over GF(3) is irreducible iff it has no root
    for code in range(27):
        c0, c1, c2 = code % 3, (code // 3) % 3, (code // 9) % 3
        if all((x**3 + c2 * x**2 + c1 * x + c0) % 3 for x in range(3)):
            return (c0, c1, c2, 1)
    raise AssertionError


def test_make_field_gf5_theta():
    f = make_field(5)
    assert f.q == 5 and f.theta == 2  # smallest primitive root mod 5


def test_make_field_gf27_smallest_modulus():
    f = make_field(3, 3)
    assert f.modulus == brute_smallest_irreducible_cubic_gf3()


def test_make_field_rejects_nonprime():
    with pytest.raises(NotPrime):
        FieldCtx(4, 1)


def test_make_field_rejects_reducible_modulus():
    with pytest.raises(Reducible):
        FieldCtx(3, 2, modulus=[0, 0, 1])  # x^2 = x * x


def test_make_field_rejects_oversize():
    with pytest.raises(TooLarge):
        FieldCtx(2, 21)


def test_custom_modulus_accepted():
    f = FieldCtx(3, 2, modulus=[2, 2, 1])  # x^2 + 2x + 2, irreducible
    assert f.q == 9
    x = f.from_coeffs([0, 1])
    assert f.mul(x, x) == f.from_coeffs([1, 1])  # x^2 = -2x - 2 = x + 1


# -- arithmetic -------------------------------------------------------------

@pytest.mark.parametrize("p,n", [(2, 3), (3, 2), (5, 2), (3, 3), (7, 1)])
def test_field_axioms_random_triples(p, n):
    f = make_field(p, n)
    rng = random.Random(p * 100 + n)
    for _ in range(300):
        a, b, c = (rng.randrange(f.q) for _ in range(3))
        assert f.add(a, b) == f.add(b, a)
        assert f.mul(a, b) == f.mul(b, a)
        assert f.add(f.add(a, b), c) == f.add(a, f.add(b, c))
        assert f.mul(f.mul(a, b), c) == f.mul(a, f.mul(b, c))
        assert f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c))
        assert f.add(a, f.neg(a)) == 0
        if a:
            assert f.mul(a, f.inv(a)) == 1


def test_table_mul_matches_raw_polynomial_mul():
    # the log/Zech path must agree with the schoolbook reduction path
    f = make_field(3, 3)
    rng = random.Random(27)
    for _ in range(200):
        a, b = rng.randrange(27), rng.randrange(27)
        assert f.mul(a, b) == f._mul_raw(a, b)


def test_field_arith_dispatch():
    f5 = make_field(5)
    assert field_arith(f5(3), f5(4), "mul") == f5(2)
    fq = make_field(3, 2)
    theta = FieldElement(fq, fq.theta)
    assert field_arith(theta, fq.q - 1, "pow") == fq(1)
    assert field_arith(f5(2), None, "inv") == f5(3)
    with pytest.raises(DivisionByZero):
        field_arith(f5(1), f5(0), "div")


def test_pow_negative_exponent():
    f = make_field(13)
    assert f.pow(2, -1) == f.inv(2)
    assert f.pow(2, -3) == f.inv(f.pow(2, 3))


# -- quadratic character ----------------------------------------------------

def test_eta_gf13_squares_by_enumeration():
    f = make_field(13)
    squares = sorted({(x * x) % 13 for x in range(1, 13)})
    assert squares == [1, 3, 4, 9, 10, 12]
    assert eta(f(1)) == 1
    assert eta(f(2)) == -1
    for x in range(1, 13):
        assert eta(f(x)) == (1 if x in squares else -1)
    assert eta(f(0)) == 0


def test_eta_minus_one_gf17():
    f = make_field(17)
    assert eta(-f(1)) == 1  # 16 = 4^2


def test_eta_even_characteristic_rejected():
    f = make_field(2, 2)
    with pytest.raises(EvenCharacteristic):
        f.eta(1)


@pytest.mark.parametrize("p,n", [(3, 2), (7, 1), (5, 2), (7, 2), (3, 3)])
def test_eta_multiplicative_and_sum_zero(p, n):
    f = make_field(p, n)
    vals = [f.eta(x) for x in range(f.q)]
    assert sum(vals) == 0
    for a in range(1, f.q):
        for b in range(1, f.q):
            assert f.eta(f.mul(a, b)) == f.eta(a) * f.eta(b)


@pytest.mark.parametrize("p,n", [(5, 1), (13, 1), (3, 2), (5, 2)])
def test_eta_quadratic_sum_identity(p, n):
    # sum_x eta(x^2 + Ax + B) = q-1 when A^2 = 4B, else -1
    f = make_field(p, n)
    for A in range(f.q):
        for B in range(f.q):
            s = sum(f.eta(f.add(f.add(f.mul(x, x), f.mul(A, x)), B))
                    for x in range(f.q))
            disc_zero = f.sub(f.mul(A, A), f.mul(4 % f.p, B)) == 0
            assert s == (f.q - 1 if disc_zero else -1)


# -- frobenius, trace, norm -------------------------------------------------

def test_frobenius_basics():
    f = make_field(3, 3)
    th = FieldElement(f, f.theta)
    assert frobenius(th, 1) == th ** 3
    assert frobenius(th, f.n) == th
    f9 = make_field(3, 2)
    outside = next(FieldElement(f9, x) for x in range(f9.q)
                   if f9.frob(x, 1) != x)
    assert frobenius(outside, 1) != outside


def test_trace_norm_subfield_values():
    f9 = make_field(3, 2)
    th = FieldElement(f9, f9.theta)
    tr, nm = trace_norm_rel(th, 1)
    assert nm == th * (th ** 3)  # theta^(1+3)
    assert tr == th + th ** 3
    # conjugation-invariant, lands in the subfield
    sub = f9.subfield(1)
    assert nm.val in sub and tr.val in sub
    # x already in the subfield: trace (n/m) x, norm x^(n/m)
    two = FieldElement(f9, f9.from_coeffs([2, 0]))
    tr2, nm2 = trace_norm_rel(two, 1)
    assert tr2 == two + two and nm2 == two * two


def test_trace_norm_rejects_bad_degree():
    f = make_field(3, 3)
    with pytest.raises(NotSubfieldDegree):
        trace_norm_rel(FieldElement(f, 1), 2)


# -- Hilbert 90 -------------------------------------------------------------

@pytest.mark.parametrize("p,n,m", [(3, 2, 1), (5, 2, 1), (3, 3, 1),
                                   (7, 2, 1), (3, 4, 1), (3, 4, 2)])
def test_hilbert90_additive_roundtrip_exhaustive(p, n, m):
    f = make_field(p, n)
    zero_trace = 0
    for d in range(f.q):
        e = FieldElement(f, d)
        tr, _ = trace_norm_rel(e, m)
        if tr.val != 0:
            with pytest.raises(NonzeroTrace):
                hilbert90_additive(e, m)
            continue
        zero_trace += 1
        c = hilbert90_additive(e, m)
        assert f.sub(c.val, f.frob(c.val, m)) == d
    assert zero_trace == f.q // (p ** m)  # the trace-zero hyperplane size


def test_hilbert90_additive_canonical_zero():
    f = make_field(3, 2)
    assert hilbert90_additive(FieldElement(f, 0), 1).val == 0


@pytest.mark.parametrize("p,n,m", [(3, 2, 1), (5, 2, 1), (3, 3, 1), (3, 4, 2)])
def test_hilbert90_multiplicative_roundtrip_exhaustive(p, n, m):
    f = make_field(p, n)
    good = 0
    for d in range(1, f.q):
        e = FieldElement(f, d)
        _, nm = trace_norm_rel(e, m)
        if nm.val != 1:
            with pytest.raises(NonUnitNorm):
                hilbert90_multiplicative(e, m)
            continue
        good += 1
        c = hilbert90_multiplicative(e, m)
        assert f.div(c.val, f.frob(c.val, m)) == d
    assert good == (f.q - 1) // (p ** m - 1)  # norm-one subgroup size


def test_hilbert90_multiplicative_identity_and_example():
    f = make_field(3, 2)
    assert hilbert90_multiplicative(FieldElement(f, 1), 1).val == 1
    d = FieldElement(f, f.pow(f.theta, 2))  # norm theta^8 = 1
    c = hilbert90_multiplicative(d, 1)
    assert f.div(c.val, f.frob(c.val, 1)) == d.val


# -- character sums ---------------------------------------------------------

def eta_euler(f, x):
    # independent quadratic character via Euler's criterion
    if x == 0:
        return 0
    return 1 if f.pow(x, (f.q - 1) // 2) == 1 else -1


def test_char_sum_degenerate_t_zero():
    f = make_field(13)
    assert char_sum_cubic(f(0)) == -f.eta(f.neg(1))


def test_char_sum_q17_t2_against_euler_criterion():
    f = make_field(17)
    t = 2
    expect = sum(eta_euler(f, (x * (x - 1) * (x - t)) % 17) for x in range(17))
    assert char_sum_cubic(f(2)) == expect
    assert expect * expect <= 4 * 17


def test_char_sum_weil_bound_q25_all_t():
    f = make_field(5, 2)
    for t in range(f.q):
        m = char_sum_cubic(FieldElement(f, t))
        assert m * m <= 4 * 25


def test_char_sum_even_characteristic_rejected():
    f = make_field(2, 2)
    with pytest.raises(EvenCharacteristic):
        char_sum_cubic(FieldElement(f, 1))


def test_feng_count_bad_t():
    f = make_field(17)
    with pytest.raises(BadT):
        feng_count(f(1))


def test_feng_count_q17_meets_bound():
    f = make_field(17)
    assert feng_lower_bound(17) == 1
    for t in range(2, 17):
        assert feng_count(f(t)) >= 1


def test_feng_count_q13_can_vanish():
    f = make_field(13)
    counts = [feng_count(f(t)) for t in range(2, 13)]
    assert min(counts) == 0  # the q >= 17 hypothesis is sharp


@pytest.mark.parametrize("p,n", [(17, 1), (5, 2), (7, 2)])
def test_feng_count_matches_w_formula(p, n):
    f = make_field(p, n)
    for t in range(2, f.q):
        e = FieldElement(f, t)
        assert feng_count(e) == feng_w_formula(e)
