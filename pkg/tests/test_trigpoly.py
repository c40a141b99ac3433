import cmath
import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ornstein import phases
from ornstein.trigpoly import (
    ExpansionCapError,
    GaussianRational,
    TorusPoint,
    TrigPoly,
    UndefinedDegree,
    degree,
    differentiate,
    parse_dump,
    product_expand,
    triangle_norm,
)

from .conftest import family

I = GaussianRational(0, 1)


def one_plus_cos(q):
    return TrigPoly.constant(1, len(q)) + TrigPoly.cos(q)


def test_differentiate_single_term():
    p = differentiate(TrigPoly.exp((1, 0)), (2, 0))
    assert p == TrigPoly({(1, 0): -1}, 2)


def test_differentiate_cos_gives_minus_sin():
    assert differentiate(TrigPoly.cos((0, 1)), (0, 1)) == -TrigPoly.sin((0, 1))


def test_differentiate_drops_vanishing_terms():
    p = TrigPoly({(0, 3): 1, (2, 3): 1}, 2)
    assert differentiate(p, (1, 0)) == TrigPoly({(2, 3): 2 * I}, 2)


def test_product_two_levels():
    a1, a2 = (3, 1), (40, 9)
    p = product_expand([one_plus_cos(a1), one_plus_cos(a2)])
    assert p.coeff((0, 0)) == 1
    assert p.coeff((43, 10)) == Fraction(1, 4)
    assert p.coeff((37, 8)) == Fraction(1, 4)
    assert p.coeff((3, 1)) == Fraction(1, 2)
    assert len(p) == 9


def test_empty_product():
    assert product_expand([], d=3) == TrigPoly.constant(1, 3)


def test_product_collision_merges():
    p = product_expand([one_plus_cos((5,)), one_plus_cos((5,))])
    assert p.coeff((0,)) == Fraction(3, 2)
    assert p.coeff((5,)) == 1
    assert p.coeff((10,)) == Fraction(1, 4)


def test_product_cap():
    f = one_plus_cos((1, 2))
    with pytest.raises(ExpansionCapError, match="cap of 5"):
        product_expand([f, one_plus_cos((7, 3))], cap=5)


def test_product_cap_from_env(monkeypatch):
    monkeypatch.setenv("ORNSTEIN_CAP", "4")
    with pytest.raises(ExpansionCapError):
        product_expand([one_plus_cos((1,)), one_plus_cos((9,))])


def test_product_independent_of_factor_order():
    fs = [one_plus_cos((1, 2)), one_plus_cos((11, -4)), TrigPoly.sin((2, 7)), TrigPoly.exp((0, 1), I)]
    base = product_expand(fs)
    rnd = random.Random(3)
    for _ in range(5):
        rnd.shuffle(fs)
        assert product_expand(fs) == base


def test_eval_riesz_at_origin(sys2, cert2):
    for n in (1, 2, 3, 4):
        R = family(sys2, cert2, n).R()
        assert R.eval(TorusPoint((0, 0))) == pytest.approx(2**n - 1, abs=1e-9)


def test_eval_big_frequency_reduces_exactly():
    assert pow(3, 40, 4) == 1
    p = TrigPoly.cos((3**40, 0))
    x = TorusPoint.from_fractions([Fraction(1, 4), Fraction(0)])
    assert abs(p.eval(x)) < 1e-15


def test_eval_empty():
    assert TrigPoly.zero(2).eval(TorusPoint((5, 9))) == 0


def test_degree():
    assert degree(TrigPoly.exp((5, -7))) == 7
    assert degree(TrigPoly.constant(3, 2)) == 0
    with pytest.raises(UndefinedDegree):
        degree(TrigPoly.zero(2))


def test_degree_of_R2_t1(sys2, cert2):
    fam = family(sys2, cert2, 2, "T1")
    R = fam.R()
    assert degree(R) == 118260 == fam.degree()


small = st.integers(-(2**31), 2**31)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(small, small), min_size=1, max_size=6),
       st.lists(st.tuples(st.integers(-5, 5), st.integers(-5, 5)), min_size=6, max_size=6),
       st.integers(0, 2**32))
def test_phase_reduction_matches_naive(freqs, coeffs, seed):
    terms = {q: GaussianRational(c[0], c[1]) for q, c in zip(freqs, coeffs)}
    p = TrigPoly(terms, 2)
    rnd = random.Random(seed)
    # points on a 2^-20 grid so the naive double phase is exact enough
    us = [rnd.randrange(2**20) for _ in range(2)]
    x = TorusPoint.from_fractions([Fraction(u, 2**20) for u in us])
    naive = sum(
        complex(c) * cmath.exp(2j * math.pi * ((q[0] * us[0] + q[1] * us[1]) % 2**20) / 2**20)
        for q, c in p.terms.items()
    )
    got = p.eval(x)
    assert abs(got - naive) <= 1e-6 * max(1.0, abs(naive))


def test_batch_eval_matches_point_eval(sys2, cert2):
    W = family(sys2, cert2, 3).W()
    rnd = random.Random(5)
    pts = [[rnd.getrandbits(128) for _ in range(2)] for _ in range(40)]
    vals = W(phases.SampleBatch.from_numerators(pts))
    for v, p in zip(vals, pts):
        assert v == pytest.approx(W.eval(TorusPoint(tuple(p))), rel=1e-12, abs=1e-15)


@pytest.mark.parametrize("variant", ["T1", "T2"])
def test_witness_is_real_valued(sys2, cert2, variant):
    W = family(sys2, cert2, 3, variant).W()
    assert W.is_real()
    rnd = random.Random(11)
    pts = [[rnd.getrandbits(128) for _ in range(2)] for _ in range(1000)]
    vals = W(phases.SampleBatch.from_numerators(pts))
    assert np.all(np.abs(vals.imag) < 1e-9 * (1 + np.abs(vals.real)))


def test_triangle_norm():
    assert triangle_norm(TrigPoly.cos((1, 0)))[2] == 1
    assert triangle_norm(TrigPoly.zero(2)) == (0, 0, 0)
    p = TrigPoly({(1,): GaussianRational(Fraction(-1, 3), Fraction(1, 2))}, 1)
    assert triangle_norm(p) == (Fraction(1, 3), Fraction(1, 2), Fraction(5, 6))


def test_dump_is_canonical_and_roundtrips(sys2, cert2):
    W = family(sys2, cert2, 2).W()
    text = W.dump()
    lines = text.splitlines()
    assert len(lines) == len(W)
    keys = [tuple(int(v) for v in line.split()[:2]) for line in lines]
    assert keys == sorted(keys)
    assert parse_dump(text) == W
    assert "-81 81 -1/13122 0/1" in lines


def test_gaussian_rational_arithmetic():
    z = GaussianRational(1, 2)
    assert z * z.conjugate() == 5
    assert (z / z) == 1
    assert GaussianRational.i_power(-2) == -1
    assert GaussianRational.i_power(3) == -I
