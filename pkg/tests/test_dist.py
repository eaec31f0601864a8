from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from prhl.dist import (DistributionError, InconsistencyError, MalformedCoupling, SubDist, bernoulli,
                       binomial, diagonal, geq_relation, in_frechet, lifting_exists, marginal1,
                       marginal2, mismatch_probability, mlet, product, stochastically_dominates,
                       strassen_check, subdist_from_json, tv_distance, unit)
from prhl.values import Sym, from_json

LEFT, STILL = Sym("Move", "Left", 0), Sym("Move", "Still", 2)


def subdists(values=range(6), mass=None):
    """Random sub-distributions with small integer weights over ``values``."""
    weights = st.lists(st.integers(0, 6), min_size=len(values), max_size=len(values))

    def build(ws):
        total = sum(ws)
        if total == 0:
            return SubDist({values[0]: mass if mass is not None else 1})
        scale = mass if mass is not None else F(1)
        return SubDist({v: F(w, total) * scale for v, w in zip(values, ws) if w})
    return weights.map(build)


def tv_oracle(a, b):
    keys = set(a) | set(b)
    return sum(abs(a.get(k, 0) - b.get(k, 0)) for k in keys) / 2


def tail(mu, x):
    return sum(q for v, q in mu.items() if v >= x)


# monad -------------------------------------------------------------------

def test_unit_is_point_mass():
    assert dict(unit(0)) == {0: 1}
    assert dict(unit((LEFT, STILL))) == {(LEFT, STILL): 1}
    assert unit("anything").mass == 1


def test_mlet_shifts_two_point_support():
    mu = SubDist({0: F(1, 2), 1: F(1, 2)})
    assert mlet(mu, lambda x: unit(x + 1)) == SubDist({1: F(1, 2), 2: F(1, 2)})


@given(subdists())
def test_monad_unit_laws(mu):
    f = lambda x: SubDist({x: F(1, 3), x + 1: F(1, 2)})  # noqa: E731
    assert mlet(unit(3), f) == f(3)
    assert mlet(mu, unit) == mu


@given(subdists(), st.integers(1, 3))
def test_mlet_associative_and_mass(mu, k):
    f = lambda x: SubDist({x % 3: F(1, 2), x + k: F(1, 4)})  # noqa: E731
    g = lambda y: SubDist({-y: F(2, 3)})  # noqa: E731
    assert mlet(mlet(mu, f), g) == mlet(mu, lambda x: mlet(f(x), g))
    assert mlet(mu, f).mass == mu.mass * F(3, 4)
    assert mlet(mu, lambda x: unit(x * 2)).mass == mu.mass


def test_rejects_bad_tables():
    with pytest.raises(DistributionError):
        SubDist({0: F(-1, 2)})
    with pytest.raises(DistributionError):
        SubDist({0: F(3, 4), 1: F(1, 2)})


# couplings -----------------------------------------------------------------

def test_marginals_are_row_and_column_sums():
    c = SubDist({(0, 0): F(1, 4), (0, 1): F(1, 4), (1, 1): F(1, 2)})
    assert marginal1(SubDist({(0, 1): 1})) == SubDist({0: 1})
    assert marginal1(c) == SubDist({0: F(1, 2), 1: F(1, 2)})
    assert marginal2(c) == SubDist({0: F(1, 4), 1: F(3, 4)})


def test_marginal_of_non_pair_is_malformed():
    with pytest.raises(MalformedCoupling):
        marginal1(SubDist({3: 1}))


def test_frechet_membership():
    coin = bernoulli(F(1, 2))
    assert in_frechet(diagonal(coin), coin, coin)
    assert in_frechet(product(coin, coin), coin, coin)
    assert not in_frechet(SubDist({(0, 0): 1}), unit(0), unit(1))


def test_lifting_examples():
    hi, lo = bernoulli(F(7, 10)), bernoulli(F(2, 5))
    eq = lambda a, b: a == b  # noqa: E731
    assert lifting_exists(eq, hi, hi) == diagonal(hi)
    w = lifting_exists(geq_relation, hi, lo)
    assert w is not None and in_frechet(w, hi, lo) and all(a >= b for a, b in w.support())
    assert lifting_exists(eq, hi, lo) is None
    assert lifting_exists(lambda a, b: True, SubDist({0: F(1, 2)}), unit(0)) is None


def test_extensional_relation():
    mu = SubDist({0: F(1, 2), 1: F(1, 2)})
    nu = SubDist({1: F(1, 2), 2: F(1, 2)})
    w = lifting_exists({(0, 1), (1, 2)}, mu, nu)
    assert w == SubDist({(0, 1): F(1, 2), (1, 2): F(1, 2)})


@settings(max_examples=60)
@given(subdists(), subdists())
def test_full_relation_lifts_iff_masses_agree(mu, nu):
    w = lifting_exists(lambda a, b: True, mu, nu)
    assert (w is not None) == (mu.mass == nu.mass)
    if w is not None:
        assert in_frechet(w, mu, nu)


# distances and dominance ----------------------------------------------------

def test_tv_examples():
    mu = bernoulli(F(7, 10))
    assert tv_distance(mu, mu) == 0
    assert tv_distance(unit(0), unit(1)) == 1
    assert tv_distance(mu, bernoulli(F(2, 5))) == F(3, 10)


@given(subdists(), subdists(), subdists())
def test_tv_is_a_metric(a, b, c):
    assert tv_distance(a, b) == tv_oracle(a, b) == tv_distance(b, a)
    assert 0 <= tv_distance(a, b) <= 1
    assert tv_distance(a, c) <= tv_distance(a, b) + tv_distance(b, c)


def test_mismatch_examples():
    coin = bernoulli(F(1, 2))
    assert mismatch_probability(diagonal(coin)) == 0
    assert mismatch_probability(product(coin, coin)) == F(1, 2)
    assert mismatch_probability(SubDist({(0, 1): 1})) == 1


@given(subdists(), subdists())
def test_coupling_inequality_on_products(a, b):
    assert tv_distance(a, b) <= mismatch_probability(product(a, b))


def test_binomial_dominance():
    hi, lo = binomial(3, F(7, 10)), binomial(3, F(2, 5))
    assert lo[3] == F(8, 125) and hi[3] == F(343, 1000)
    assert stochastically_dominates(hi, hi)
    assert stochastically_dominates(hi, lo)
    assert not stochastically_dominates(lo, hi)


def test_strassen_examples():
    assert strassen_check(unit(1), unit(0)) is True
    assert strassen_check(binomial(3, F(7, 10)), binomial(3, F(2, 5))) is True
    assert strassen_check(bernoulli(F(2, 5)), bernoulli(F(7, 10))) is False


@settings(max_examples=80)
@given(subdists(), subdists())
def test_strassen_agrees_with_tail_oracle(a, b):
    oracle = all(tail(a, x) >= tail(b, x) for x in range(6))
    assert strassen_check(a, b) == oracle


def test_incomparable_values_are_rejected():
    with pytest.raises(TypeError):
        stochastically_dominates(SubDist({0: F(1, 2), "x": F(1, 2)}), unit(0))


def test_inconsistency_error_is_an_assertion():
    assert issubclass(InconsistencyError, AssertionError)


def test_json_round_trip():
    mu = SubDist({(LEFT, STILL): F(1, 5), 3: F(1, 2)})
    assert mu.to_json()["entries"][0][1] == "1/2"
    enums = {"Left": LEFT, "Still": STILL}
    assert subdist_from_json(mu.to_json(), lambda v: from_json(v, enums)) == mu
