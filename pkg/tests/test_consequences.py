import csv
import io
from fractions import Fraction as F
from itertools import product as cartesian
from math import comb

import pytest

from prhl import consequences as C
from prhl.cases import balls_bins, biased_coins, random_walk as RW, torus
from prhl.dist import SubDist, in_frechet, marginal1, marginal2, tv_distance
from prhl.lang.domains import DomainDecl, Range
from prhl.lang.parser import parse_assertion, parse_command
from prhl.logic import proof as P
from prhl.logic.checker import check_proof


def a(text, logic=()):
    return parse_assertion(text, logic=logic)


def walk_vj(k, n):
    p = RW.Params(k=k, n=n)
    return check_proof(RW.judgment(p), RW.proof(p), RW.domains(p))


def walk_oracle(k, n):
    """Enumerate coin sequences: output laws of both walks and Pr[drift never hits n]."""
    left, right, miss = {}, {}, F(0)
    w = F(1, 2 ** k)
    for flips in cartesian((1, -1), repeat=k):
        end = sum(flips)
        left[end] = left.get(end, 0) + w
        right[2 * n + end] = right.get(2 * n + end, 0) + w
        drift = [sum(flips[:j + 1]) for j in range(k)]
        if n not in drift:
            miss += w
    return SubDist(left), SubDist(right), miss


def binomial_oracle(k, q):
    return SubDist({j: comb(k, j) * q ** j * (1 - q) ** (k - j) for j in range(k + 1)})


def test_walk_tv_k2_n1():
    r = C.tv_bound(walk_vj(2, 1), {"start": 0, "k": 2}, {"start": 2, "k": 2})
    assert (r.tv, r.bound, r.holds) == (F(1, 2), F(1, 2), True)


@pytest.mark.parametrize("k,n", [(2, 1), (3, 1), (4, 2)])
def test_walk_tv_matches_path_enumeration(k, n):
    r = C.tv_bound(walk_vj(k, n), {"start": 0, "k": k}, {"start": 2 * n, "k": k})
    left, right, miss = walk_oracle(k, n)
    assert r.left == left and r.right == right
    assert r.tv == tv_distance(left, right) and r.bound == miss and r.tv <= r.bound


def test_every_initial_pair_satisfies_the_bound():
    reports = C.tv_reports(walk_vj(3, 1))
    assert reports and all(r.holds for r in reports)


def test_bound_depends_only_on_the_left_program():
    j = P.Judgment(parse_command("x ~~ {0, 1}"), parse_command("x ~~ {y, 1 - y}"),
                   a("true"), a("x#1 = 0 ==> x#1 = x#2"))
    dom = DomainDecl({"x": Range(0, 1), "y": Range(0, 1)})
    vj = check_proof(j, P.Sample(a("v", ["v"])), dom)
    bounds = {C.tv_bound(vj, {}, {"y": y}).bound for y in (0, 1)}
    assert bounds == {F(1, 2)}


def test_identical_programs_have_zero_distance():
    c = parse_command("x ~~ [0, 2]")
    vj = check_proof(P.Judgment(c, c, a("true"), a("x#1 = x#2")), P.Sample(a("v", ["v"])),
                     DomainDecl({"x": Range(0, 2)}))
    r = C.tv_bound(vj, {}, {})
    assert (r.tv, r.bound, r.holds) == (0, 0, True)


def test_torus_line_two_steps():
    p = torus.Params(d=1, K=3, k=2, delta=(1,))
    rep = torus.run(p)
    (r,) = rep.tv
    # lazy step law {0: 1/2, +1: 1/4, -1: 1/4}, convolved twice and reduced mod 3
    one = {0: F(1, 2), 1: F(1, 4), 2: F(1, 4)}
    two = {}
    for (s, q), (t, w) in cartesian(one.items(), one.items()):
        two[(s + t) % 3] = two.get((s + t) % 3, 0) + q * w
    shifted = {(v + 1) % 3: q for v, q in two.items()}
    assert r.tv == tv_distance(SubDist(two), SubDist(shifted)) == F(1, 16)
    # while apart, each step closes the gap with probability 1/2
    assert r.bound == F(1, 4) and r.holds


def test_biased_coin_dominance_and_witness():
    rep = biased_coins.run(biased_coins.Params(k=3))
    (r,) = rep.sd
    (comp,) = r.components
    assert comp.dominates
    w = comp.witness
    hi, lo = binomial_oracle(3, F(7, 10)), binomial_oracle(3, F(2, 5))
    assert marginal1(w) == hi and marginal2(w) == lo and in_frechet(w, hi, lo)
    assert all(x >= y for x, y in w.support())


def test_balls_dominance_is_coordinatewise():
    rep = balls_bins.run(balls_bins.Params(3, 2))
    (r,) = rep.sd
    assert [c.left for c in r.components] == ["binA", "binB"]
    assert r.holds


def test_equal_processes_dominate():
    c = parse_command("x ~~ [0, 2]")
    vj = check_proof(P.Judgment(c, c, a("true"), a("x#1 >= x#2")), P.Sample(a("v", ["v"])),
                     DomainDecl({"x": Range(0, 2)}))
    (comp,) = C.sd_conclude(vj, {}, {}).components
    assert comp.dominates and all(x >= y for x, y in comp.witness.support())


def test_shape_errors():
    with pytest.raises(C.ShapeError):
        C.split_tv_post(a("x#1 >= x#2"))
    with pytest.raises(C.ShapeError):
        C.split_tv_post(a("y#2 = 0 ==> x#1 = x#2"))
    with pytest.raises(C.ShapeError):
        C.split_sd_post(a("x#1 = x#2"))
    assert C.split_tv_post(a("x#2 = x#1"))[1:] == C.split_tv_post(a("x#1 = x#2"))[1:]


def test_precondition_is_enforced():
    with pytest.raises(ValueError):
        C.tv_bound(walk_vj(2, 1), {"start": 0, "k": 2}, {"start": 0, "k": 2})


def test_csv_rows():
    text = C.tv_csv(C.tv_reports(walk_vj(2, 1)), "walk")
    rows = list(csv.reader(io.StringIO(text.split("\n", 1)[1])))
    assert rows[0] == ["case", "m1", "m2", "tv", "bound", "verdict"]
    assert rows[1][0] == "walk" and rows[1][3:] == ["1/2", "1/2", "ok"]
