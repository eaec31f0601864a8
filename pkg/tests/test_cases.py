from fractions import Fraction as F

import pytest

from prhl.cases import CASES, case_files, case_params, get_case
from prhl.cases import balls_bins, biased_coins, birth_death as BD, torus
from prhl.cases.common import DATA, ParamError
from prhl.dist import SubDist
from prhl.lang import ast as A
from prhl.lang.semantics import dist_table, interpret, pushforward
from prhl.lang.transform import apply_transform
from prhl.logic.checker import audit_proof

LEFT, RIGHT, STILL = BD.LEFT, BD.RIGHT, BD.STILL


def table_of(expl):
    return dist_table(expl, ({}, {}, {}))


@pytest.mark.parametrize("name", sorted(CASES))
def test_data_files_are_current(name):
    for fname, text in case_files(name).items():
        assert (DATA / name / fname).read_text(encoding="utf-8") == text, fname


@pytest.mark.parametrize("name", sorted(CASES))
def test_default_run_is_positive(name):
    rep = get_case(name).run({})
    assert rep.ok and not rep.indeterminate


@pytest.mark.parametrize("name,bad", [
    ("random-walk", {"k": "9"}),
    ("torus", {"d": "2", "delta": "1"}),
    ("biased-coins", {"q1": "1/4", "q2": "1/2"}),
    ("balls-bins", {"n1": "2", "n2": "3"}),
    ("birth-death", {"a": "3/5", "b": "1/2"}),
    ("birth-death", {"start1": "0", "start2": "1"}),
    ("random-walk", {"nope": "1"}),
    ("random-walk", {"k": "two"}),
])
def test_parameter_validation(name, bad):
    with pytest.raises(ParamError):
        case_params(name, bad)


def test_unknown_case():
    with pytest.raises(ParamError):
        get_case("coin-flip")


def test_ratio_is_exact():
    p = case_params("biased-coins", {"q1": "7/10", "q2": "2/5"})
    assert p.r == F(4, 7) and p.q1 * p.r == p.q2


# birth-death table --------------------------------------------------------------

def test_listed_table_at_example_rates():
    got = table_of(BD.dcouple_table(F(3, 10), F(3, 10), F(1, 5), F(1, 5)))
    assert got == SubDist({(RIGHT, LEFT): F(1, 5), (RIGHT, STILL): F(1, 10),
                           (STILL, RIGHT): F(3, 10), (LEFT, STILL): F(1, 5),
                           (STILL, STILL): F(1, 5)})


def test_degenerate_rates_stay_put():
    assert table_of(BD.dcouple_table(0, 0, 0, 0)) == SubDist({(STILL, STILL): 1})


def test_negative_residual_rejected():
    with pytest.raises(ParamError):
        BD.dcouple_table(F(1, 2), F(1, 2), F(1, 2), F(1, 2))


def test_bd_law():
    p = BD.Params()
    assert BD.bd(p, 4) == SubDist({LEFT: F(3, 10), RIGHT: F(1, 5), STILL: F(1, 2)})


def test_listed_table_marginals_need_symmetric_rates():
    p = BD.Params()
    listed = BD.dcouple_table(p.a, p.a, p.b, p.b)
    assert not BD.marginals_match(p, listed, 0)
    sym = BD.Params(a=F(1, 4), b=F(1, 4))
    assert BD.marginals_match(sym, BD.dcouple_table(sym.a, sym.a, sym.b, sym.b), 0)


@pytest.mark.parametrize("a,b", [(F(3, 10), F(1, 5)), (F(1, 10), F(2, 5)), (F(1, 3), F(1, 3)),
                                 (0, 0), (F(1, 2), 0)])
def test_reoriented_table_is_a_monotone_coupling(a, b):
    p = BD.Params(a=a, b=b)
    table, facts = BD.choose_table(p)
    joint = table_of(table)
    assert BD.marginals_match(p, table, 0)
    assert joint.get((LEFT, RIGHT), 0) == 0 == BD.crossing(table)
    assert facts["coupling (Left, Right) entry"] == "0"


def test_proof_with_listed_table_fails():
    p = BD.Params()
    listed = BD.dcouple_table(p.a, p.a, p.b, p.b)
    rep = audit_proof(BD.judgment(p), BD.proof(listed), BD.domains(p))
    assert rep.status == "rejected"
    assert rep.failures[0].rule == "Equiv"


# other cases ----------------------------------------------------------------------

def test_coin_split_rewrites_c2_into_cstar():
    progs = biased_coins.programs()
    got = apply_transform(progs["c2"].body, biased_coins.split_rule(), biased_coins.SPLIT_PATH)
    assert got == progs["cstar"].body


def test_loop_split_rewrites_into_cstar():
    progs = balls_bins.programs()
    c, loop = progs["c"].body, (balls_bins.LOOP,)
    assert apply_transform(c, balls_bins.split_rule(), loop) != progs["cstar"].body
    # the body increments first; two swaps bring it into the split program's order
    got = apply_transform(balls_bins._reordered(c), balls_bins.split_rule(), loop)
    assert got == progs["cstar"].body


def test_bins_outputs_by_path_count():
    c = balls_bins.programs()["c"]
    mu = pushforward(interpret(c.body, {"n": 2}), A.TupleE((A.Var("binA"), A.Var("binB"))))
    assert mu == SubDist({(2, 0): F(1, 4), (1, 1): F(1, 2), (0, 2): F(1, 4)})


def test_torus_drift_replay():
    p = torus.Params(d=1, K=3, k=2, delta=(1,))
    # entries are (mov, dir, crd), newest first; walk 1 moves up, gap closes
    d1, d2 = torus.drifts(p, [(True, True, 1)])
    assert d1 == (1,) and d2 == (0,)
