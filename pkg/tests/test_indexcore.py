import pytest
from hypothesis import given
from hypothesis import strategies as st

from ornstein.indexcore import (
    DerivativeSystem,
    DimensionError,
    InvalidSystem,
    MultiIndex,
    inner,
    monomial,
    total_order,
    validate_system,
)


@pytest.mark.parametrize("mu, v, expected", [
    ((2, 0), (1, 1), 2),
    ((1, 1), (2, 1), 3),
    ((0, 0, 0), (5, 7, 9), 0),
])
def test_inner(mu, v, expected):
    assert inner(MultiIndex(mu), v) == expected


def test_inner_length_mismatch():
    with pytest.raises(DimensionError):
        inner((1, 2), (1, 2, 3))


def test_inner_is_exact_for_huge_vectors():
    v = (3**200, -(3**190))
    assert inner((2**31 - 1, 5), v) == (2**31 - 1) * 3**200 - 5 * 3**190


@pytest.mark.parametrize("mu, expected", [((2, 0), 2), ((1, 1), 2), ((0, 3, 2), 5)])
def test_total_order(mu, expected):
    assert total_order(MultiIndex(mu)) == expected


vec = st.lists(st.integers(-10**6, 10**6), min_size=3, max_size=3)
idx = st.lists(st.integers(0, 50), min_size=3, max_size=3)


@given(idx, vec, vec)
def test_inner_bilinear(mu, v, w):
    vw = [a + b for a, b in zip(v, w)]
    assert inner(mu, vw) == inner(mu, v) + inner(mu, w)


@given(idx, vec)
def test_inner_matches_loop(mu, v):
    total = 0
    for j in range(3):
        total += mu[j] * v[j]
    assert inner(mu, v) == total


def test_monomial_zero_power_convention():
    assert monomial((0, 5), (0, 2)) == 25
    assert monomial((0, 5), (1, 0)) == 0


def test_multiindex_rejects_negative_and_huge():
    with pytest.raises(ValueError):
        MultiIndex((1, -1))
    with pytest.raises(ValueError):
        MultiIndex((2**31,))


def test_validate_corollary_system(sys2):
    assert validate_system(sys2) is sys2


def test_validate_beta_in_alphas():
    with pytest.raises(InvalidSystem, match="beta is one of the alphas"):
        validate_system(DerivativeSystem.build([(1, 1)], (1, 1)))


def test_validate_duplicates():
    with pytest.raises(InvalidSystem, match="duplicate"):
        validate_system(DerivativeSystem.build([(2, 0), (2, 0)], (1, 1)))


def test_validate_reports_every_violation():
    bad = DerivativeSystem.build([(1, 1), (1, 1), (1, 0, 0)], (1, 1))
    with pytest.raises(InvalidSystem) as info:
        validate_system(bad)
    assert len(info.value.violations) == 3


def test_json_roundtrip(sys2):
    obj = sys2.to_json()
    assert obj == {"d": 2, "alphas": [[2, 0], [0, 2]], "beta": [1, 1]}
    assert DerivativeSystem.from_json(obj) == sys2


def test_json_malformed():
    with pytest.raises(InvalidSystem):
        DerivativeSystem.from_json({"d": 2, "alphas": [[1, 0]]})
