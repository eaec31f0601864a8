"""Acceptance criteria 1-9, exact arithmetic and wall-clock limits.

Each test records one PASS/FAIL line; ``conftest.py`` prints them after the
run. ``python3 tests/test_acceptance.py`` runs the criteria without pytest.
"""
import random
import time
from fractions import Fraction as F
from itertools import product as cartesian
from math import comb

from prhl.cases import balls_bins, biased_coins, birth_death, random_walk, torus
from prhl.dist import (SubDist, geq_relation, in_frechet, lifting_exists, marginal1, marginal2,
                       mismatch_probability, tv_distance)
from prhl.lang import ast as A
from prhl.lang.domains import Bools, DomainDecl, Range, Values
from prhl.lang.parser import parse_command, parse_expr
from prhl.lang.semantics import interpret, semantically_equivalent
from prhl.lang.transform import CoinMerge, CoinSplit, LoopMerge, LoopSplit, apply_transform
from prhl.logic.checker import audit_proof
from prhl.logic.semantics import validate_semantics

RESULTS = {}


def criterion(n, title, limit, body):
    t0 = time.perf_counter()
    err = None
    try:
        detail = body()
    except AssertionError as e:
        err, detail = e, str(e) or "assertion failed"
    took = time.perf_counter() - t0
    ok = err is None and took < limit
    if err is None and not ok:
        detail = f"{detail}; over the {limit} s limit"
    RESULTS[n] = f"criterion {n} {'PASS' if ok else 'FAIL'}: {title} ({took:.2f} s / {limit} s) {detail}"
    print(RESULTS[n])
    if err is not None:
        raise err
    assert ok, RESULTS[n]


# oracles written against the definitions, not the package ---------------------------

def tails(mu, support):
    return [sum((q for v, q in mu.items() if v >= x), F(0)) for x in support]


def cdf_dominates(mu, nu, support=range(6)):
    return all(a >= b for a, b in zip(tails(mu, support), tails(nu, support)))


def half_l1(a, b):
    return sum(abs(a.get(k, 0) - b.get(k, 0)) for k in set(a) | set(b)) / 2


def random_table(rng, keys, mass):
    ws = [rng.choice((0, 0, 1, 2, 3, 5, 8)) for _ in keys]
    if not any(ws):
        ws[rng.randrange(len(ws))] = 1
    total = sum(ws)
    return SubDist({k: mass * F(w, total) for k, w in zip(keys, ws) if w})


def binomial(k, q):
    return SubDist({j: comb(k, j) * q ** j * (1 - q) ** (k - j) for j in range(k + 1)})


def walk_paths(k, n):
    left, right, miss = {}, {}, F(0)
    w = F(1, 2 ** k)
    for flips in cartesian((1, -1), repeat=k):
        end = sum(flips)
        left[end] = left.get(end, 0) + w
        right[2 * n + end] = right.get(2 * n + end, 0) + w
        if n not in [sum(flips[:j + 1]) for j in range(k)]:
            miss += w
    return SubDist(left), SubDist(right), miss


def torus_oracle(d, K, k, delta):
    """Exact laws of both lazy walks plus Pr[apart] under the three-sample coupling."""
    start1 = (0,) * d
    start2 = tuple(x % K for x in delta)
    w = F(1, 4 * d)
    state = {(start1, start2): F(1)}
    for _ in range(k):
        nxt = {}
        for (p1, p2), q in state.items():
            for mov, up, c in cartesian((True, False), (True, False), range(d)):
                mov2 = mov if p1[c] == p2[c] else not mov
                step = 1 if up else -1
                n1 = tuple((x + step) % K if j == c and mov else x for j, x in enumerate(p1))
                n2 = tuple((x + step) % K if j == c and mov2 else x for j, x in enumerate(p2))
                nxt[(n1, n2)] = nxt.get((n1, n2), 0) + q * w
        state = nxt
    left, right, apart = {}, {}, F(0)
    for (p1, p2), q in state.items():
        left[p1] = left.get(p1, 0) + q
        right[p2] = right.get(p2, 0) + q
        if p1 != p2:
            apart += q
    return SubDist(left), SubDist(right), apart


def chain_law(start, steps, a, b):
    mu = {start: F(1)}
    for _ in range(steps):
        nxt = {}
        for s, q in mu.items():
            for t, r in ((s - 1, a), (s + 1, b), (s, 1 - a - b)):
                if r:
                    nxt[t] = nxt.get(t, 0) + q * r
        mu = nxt
    return SubDist(mu)


def positive(rep):
    return rep.ok and all(v in rep.POSITIVE for v in rep.verdicts.values())


# 1 ------------------------------------------------------------------------------

def _lifting_oracle():
    rng = random.Random(20240901)
    support = range(6)
    agree = {True: 0, False: 0}
    for _ in range(500):
        mass = rng.choice((F(1), F(1), F(3, 4), F(1, 2)))
        mu, nu = random_table(rng, support, mass), random_table(rng, support, mass)
        if rng.random() < 0.4:  # bias towards dominating pairs
            mu = mu.map(lambda x: min(x + 1, 5))
        w = lifting_exists(geq_relation, mu, nu)
        expect = cdf_dominates(mu, nu)
        assert (w is not None) == expect, f"disagreement on {mu} vs {nu}"
        if w is not None:
            assert in_frechet(w, mu, nu) and all(x >= y for x, y in w.support())
        agree[expect] += 1
    assert agree[True] and agree[False]
    return f"500 pairs, {agree[True]} dominating, {agree[False]} not"


def test_criterion_1_lifting_oracle():
    criterion(1, "lifting(>=) agrees with the CDF test", 10, _lifting_oracle)


# 2 ------------------------------------------------------------------------------

def _coupling_inequality():
    rng = random.Random(7)
    pairs = [(x, y) for x in range(4) for y in range(4)]
    tight = 0
    for i in range(200):
        if i % 2:
            c = random_table(rng, pairs, F(1))
        else:  # witnesses from the flow solver are feasible flows as well
            mu, nu = random_table(rng, range(4), F(1)), random_table(rng, range(4), F(1))
            c = lifting_exists(lambda a, b: True, mu, nu)
        tv, miss = half_l1(marginal1(c), marginal2(c)), mismatch_probability(c)
        assert tv == tv_distance(marginal1(c), marginal2(c)) and tv <= miss
        tight += tv == miss
    return f"200 couplings, {tight} tight"


def test_criterion_2_coupling_inequality():
    criterion(2, "tv(marginals) <= Pr[mismatch]", 5, _coupling_inequality)


# 3 ------------------------------------------------------------------------------

def _random_walk():
    rows = []
    for k, n in cartesian((2, 3, 4), (1, 2)):
        p = random_walk.Params(k=k, n=n)
        rep = random_walk.run(p)
        assert rep.verdicts == {"proof": "accepted", "semantics": "valid"}, (k, n, rep.verdicts)
        (r,) = rep.tv
        left, right, miss = walk_paths(k, n)
        assert (r.left, r.right) == (left, right)
        assert r.tv == half_l1(left, right) and r.bound == miss and r.tv <= r.bound, (k, n)
        if (k, n) == (2, 1):
            assert r.tv == r.bound == F(1, 2)
        rows.append(f"k={k},n={n}:{r.tv}<={r.bound}")
    return " ".join(rows)


def test_criterion_3_random_walk():
    criterion(3, "random walk mirror coupling", 30, _random_walk)


# 4 ------------------------------------------------------------------------------

def _torus():
    rows = []
    for d in (1, 2):
        for k in (2, 3):
            for delta in cartesian((0, 1), repeat=d):
                p = torus.Params(d=d, K=3, k=k, delta=delta)
                rep = torus.run(p)
                assert rep.verdicts == {"proof": "accepted", "semantics": "valid"}, (d, k, delta)
                (r,) = rep.tv
                left, right, apart = torus_oracle(d, 3, k, delta)
                assert r.tv == half_l1(left, right), (d, k, delta)
                assert r.bound == apart and r.tv <= r.bound, (d, k, delta, r.bound, apart)
                rows.append(f"d={d},k={k},D={''.join(map(str, delta))}:{r.tv}<={r.bound}")
    return " ".join(rows)


def test_criterion_4_torus():
    criterion(4, "lazy torus walk", 60, _torus)


# 5 ------------------------------------------------------------------------------

def _biased_coins():
    n = 0
    for k, (q1, q2) in cartesian((2, 3, 4), ((F(7, 10), F(2, 5)), (F(1, 2), F(1, 4)))):
        rep = biased_coins.run(biased_coins.Params(k=k, q1=q1, q2=q2))
        v = rep.verdicts
        assert v["c1~cstar"] == "accepted" and v["cstar=c2"] == "equivalent", (k, q1, v)
        assert v["c1~c2"] == "accepted" and v["semantics"] == "valid", (k, q1, v)
        (comp,) = rep.sd[0].components
        hi, lo = binomial(k, q1), binomial(k, q2)
        assert comp.dominates and cdf_dominates(hi, lo, range(k + 1))
        assert marginal1(comp.witness) == hi and marginal2(comp.witness) == lo
        n += 1
    return f"{n} configurations"


def test_criterion_5_biased_coins():
    criterion(5, "biased coins", 20, _biased_coins)


# 6 ------------------------------------------------------------------------------

def _balls_bins():
    for n1, n2 in ((3, 2), (4, 2), (4, 4)):
        rep = balls_bins.run(balls_bins.Params(n1, n2))
        assert positive(rep), (n1, n2, rep.verdicts)
        obs = rep.reports["proof"].obligations
        done = {(o.rule, o.kind) for o in obs if o.result == "ok"}
        assert {("Equiv", "transform-shape"), ("Equiv", "semantic-equivalence"),
                ("WhileL", "lossless")} <= done
        assert rep.verdicts["c=cstar"] == "equivalent" and rep.verdicts["second loop"] == "lossless"
        comps = rep.sd[0].components
        assert [c.left for c in comps] == ["binA", "binB"]
        for c in comps:
            assert c.dominates
            assert marginal1(c.witness) == binomial(n1, F(1, 2))
            assert marginal2(c.witness) == binomial(n2, F(1, 2))
    return "3 configurations"


def test_criterion_6_balls_bins():
    criterion(6, "balls into bins", 20, _balls_bins)


# 7 ------------------------------------------------------------------------------

def _birth_death():
    a, b = F(3, 10), F(1, 5)
    for steps, (s1, s2) in cartesian((1, 2), ((1, 0), (2, 0))):
        p = birth_death.Params(steps=steps, a=a, b=b, start1=s1, start2=s2)
        table, facts = birth_death.choose_table(p)
        joint = birth_death.dist_table(table, ({}, {}, {}))
        L, R, S = birth_death.LEFT, birth_death.RIGHT, birth_death.STILL
        law = {L: a, R: b, S: 1 - a - b}
        for j in (0, 1):
            assert SubDist((v[j], q) for v, q in joint.items()) == SubDist(law)
        assert joint.get((L, R), 0) == 0
        rep = birth_death.run(p)
        assert rep.verdicts == {"marginals": "ok", "proof": "accepted", "semantics": "valid"}
        (comp,) = rep.sd[0].components
        hi, lo = chain_law(s1, steps, a, b), chain_law(s2, steps, a, b)
        span = range(s2 - steps, s1 + steps + 1)
        assert comp.dominates and cdf_dominates(hi, lo, span)
        assert marginal1(comp.witness) == hi and marginal2(comp.witness) == lo
    return f"4 configurations, table {facts['coupling table']}"


def test_criterion_7_birth_death():
    criterion(7, "birth-death chain", 30, _birth_death)


# 8 ------------------------------------------------------------------------------

GRIDS = {
    random_walk: [random_walk.Params(k=k, n=n) for k in (2, 3, 4) for n in (1, 2)],
    torus: [torus.Params(d=d, K=3, k=k, delta=dl) for d in (1, 2) for k in (2, 3)
            for dl in cartesian((0, 1), repeat=d)],
    biased_coins: [biased_coins.Params(k=k, q1=q1, q2=q2) for k in (2, 3, 4)
                   for q1, q2 in ((F(7, 10), F(2, 5)), (F(1, 2), F(1, 4)))],
    balls_bins: [balls_bins.Params(n1, n2) for n1, n2 in ((3, 2), (4, 2), (4, 4))],
    birth_death: [birth_death.Params(steps=s, start1=s1) for s in (1, 2) for s1 in (1, 2)],
}


def _soundness_sweep():
    accepted = 0
    for mod, grid in GRIDS.items():
        for p in grid:
            for label, j, proof, dom in mod.corpus(p):
                if audit_proof(j, proof, dom).status != "accepted":
                    continue
                accepted += 1
                sem = validate_semantics(j, dom)
                assert sem.valid is True, (mod.NAME, label, p, sem.detail, sem.counterexample)
    assert accepted
    return f"{accepted} accepted judgments, all semantically valid"


def test_criterion_8_soundness_sweep():
    criterion(8, "checker soundness over the corpus", 120, _soundness_sweep)


# 9 ------------------------------------------------------------------------------

PROBS = (F(0), F(1, 4), F(1, 2), F(3, 4), F(1))
LOOPS = [
    "while i < n do b ~~ Bern(p); if b then s := s + 1 fi; i := i + 1 end",
    "while i < n do b ~~ Bern(p); if b then i := i + 1 else s := s + 1; i := i + 1 fi end",
    "while i < n do i := i + 1; b ~~ Bern(p); if b then s := s + i fi end",
]


def _lit(q):
    return f"{q.numerator}/{q.denominator}"


def _transform_soundness():
    rng = random.Random(99)
    checked = 0
    for _ in range(60):
        p1, p2 = rng.choice(PROBS), rng.choice(PROBS)
        # built by hand: the parser would fold the literal product
        product = A.Bern(A.Binop("*", A.Lit(p1), A.Lit(p2)))
        c = A.seq(parse_command("s := 0"), A.Rand("x", product), parse_command("if x then s := 1 fi"))
        split = apply_transform(c, CoinSplit(A.Lit(p1), A.Lit(p2)), (1,))
        out = [A.Var("s"), A.Var("x")]
        assert semantically_equivalent(c, split, DomainDecl(), out) is True, (p1, p2)
        assert apply_transform(split, CoinMerge(), (1,)) == c
        # a folded parameter matches only semantically
        coin = parse_command(f"x ~~ Bern({_lit(p1 * p2)})")
        split2 = apply_transform(coin, CoinSplit(parse_expr(_lit(p1)), parse_expr(_lit(p2))))
        assert semantically_equivalent(coin, split2, DomainDecl(), [A.Var("x")]) is True
        checked += 2
    for _ in range(40):
        body = rng.choice(LOOPS)
        p = rng.choice(PROBS)
        n, m = rng.randint(0, 4), rng.randint(0, 4)
        c = parse_command(f"s := 0; i := 0; {body}".replace("Bern(p)", f"Bern({_lit(p)})"))
        cut = rng.choice(["i < m", "s < m", "i + s < m"])
        split = apply_transform(c, LoopSplit(parse_expr(cut)), (2,))
        dom = DomainDecl({"n": Values((n,)), "m": Values((m,)), "b": Bools(), "i": Range(0, 4),
                          "s": Range(0, 8)})
        for e in ([A.Var("s")], [A.Var("s"), A.Var("i")]):
            assert semantically_equivalent(c, split, dom, e) is True, (body, p, n, m, cut)
        assert apply_transform(split, LoopMerge(), (2,)) == c
        # direct interpreter comparison, without the slicing of the oracle
        mem = {"n": n, "m": m}
        assert interpret(c, mem) == interpret(split, mem)
        checked += 1
    return f"{checked} randomized rewrites preserved exactly"


def test_criterion_9_transform_soundness():
    criterion(9, "loop-split and coin-split preserve semantics", 10, _transform_soundness)


if __name__ == "__main__":
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError:
                pass
