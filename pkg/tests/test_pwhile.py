from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from prhl.dist import DistributionError, SubDist, mlet
from prhl.lang import ast as A
from prhl.lang.domains import DomainDecl, Range
from prhl.lang.parser import ParseError, parse_command, parse_dist, parse_expr, parse_program
from prhl.lang.printer import show, show_command
from prhl.lang.semantics import (FuelExhausted, eval_dist, eval_expr, interpret, is_lossless,
                                 pushforward, semantically_equivalent)
from prhl.lang.transform import (CoinMerge, CoinSplit, LoopMerge, LoopSplit, Swap, TransformError,
                                 apply_transform)
from prhl.cases.common import source

WALK = parse_program(source("random-walk")).check()


def run_walk(start, k):
    mu = interpret(WALK.body, {"start": start, "k": k})
    return pushforward(mu, WALK.output)


def paths(k):
    """Independent oracle: enumerate all 2^k coin sequences of the walk."""
    out = {}
    for bits in range(2 ** k):
        pos = sum(1 if bits >> j & 1 else -1 for j in range(k))
        out[pos] = out.get(pos, 0) + F(1, 2 ** k)
    return out


# parsing and typing -------------------------------------------------------------

def test_parse_assignment():
    assert parse_command("pos := start") == A.Assign("pos", A.Var("start"))


def test_parse_walk_step():
    got = parse_command("b ~~ {0,1}; if b then pos++ else pos-- fi")
    one = A.Lit(1)
    want = A.Seq(A.Rand("b", A.UniformSet((A.Lit(0), one))),
                 A.If(A.Var("b"), A.Assign("pos", A.Binop("+", A.Var("pos"), one)),
                      A.Assign("pos", A.Binop("-", A.Var("pos"), one))))
    assert got == want


def test_parse_loop_and_errors():
    assert parse_command("while i < k do skip end") == A.While(
        A.Binop("<", A.Var("i"), A.Var("k")), A.Skip())
    with pytest.raises(ParseError):
        parse_command("while i < k do skip")
    with pytest.raises(ParseError):
        parse_command("x := := 1")


def test_typecheck():
    assert parse_program("var pos : int; var b : bool; pos := b + 1").typecheck()
    assert parse_program("var x : bool; x ~~ Bern(3/2)").typecheck()
    errors = parse_program("var x : int; y := 1").typecheck()
    assert len(errors) == 1 and errors[0].startswith("undeclared variable y")
    assert WALK.typecheck() == []


@pytest.mark.parametrize("text", [
    "(x,)", "(a, b)", "x :: [1, 2]", "a ==> b ==> c", "(a ==> b) ==> c", "-(x - 1) * 2",
    "x - (y - z)", "!(a && b) || c", "p ? 1 : -1", "H[0]", "forall j in [1, 3]. v[j] >= 0",
    "x mod 3 + 1", "7/10 * q",
])
def test_printer_round_trip(text):
    e = parse_expr(text, logic=("a", "b", "c"))
    assert parse_expr(show(e), logic=("a", "b", "c")) == e


def test_program_printer_round_trip():
    assert parse_command(show_command(WALK.body)) == WALK.body


# evaluation ---------------------------------------------------------------------

def test_eval_dist_examples():
    assert eval_dist({}, parse_dist("Bern(1/2)")) == SubDist({True: F(1, 2), False: F(1, 2)})
    assert eval_dist({"d": 3}, parse_dist("[1, d]")) == SubDist({i: F(1, 3) for i in (1, 2, 3)})
    with pytest.raises(DistributionError):
        eval_dist({}, parse_dist("Bern(3/2)"))
    with pytest.raises(DistributionError):
        eval_dist({}, parse_dist("dist { 0 : 1/2, 1 : 2/3 }"))


def test_eval_expr_modular_and_lists():
    assert eval_expr({"x": -1}, parse_expr("x mod 3")) == 2
    assert eval_expr({}, parse_expr("[true, false][2]")) is False
    assert eval_expr({}, parse_expr("(3, 4)[1]")) == 3


def test_interpret_assign_is_dirac():
    mu = interpret(parse_command("x := 1"), {"x": 5})
    assert len(mu) == 1 and next(iter(mu))["x"] == 1


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_walk_matches_path_enumeration(k):
    assert run_walk(0, k) == SubDist(paths(k))


def test_walk_k2_three_points():
    assert run_walk(0, 2) == SubDist({-2: F(1, 4), 0: F(1, 2), 2: F(1, 4)})


def test_biased_coin_one_round():
    prog = parse_program(source("biased-coins", "c1.pwhile")).check()
    mu = interpret(prog.body, {"k": 1, "q1": F(7, 10)})
    assert pushforward(mu, prog.output) == SubDist({0: F(3, 10), 1: F(7, 10)})


def test_fuel_and_residual():
    spin = parse_command("while true do skip end")
    with pytest.raises(FuelExhausted) as info:
        interpret(spin, {}, fuel=5)
    assert info.value.residual == 1
    assert interpret(spin, {}, fuel=5, drop=True).mass == 0
    geo = parse_command("b := true; while b do b ~~ Bern(1/2) end")
    assert interpret(geo, {"b": True}, fuel=3, drop=True).mass == F(7, 8)


def test_losslessness():
    dom = DomainDecl({"i": Range(0, 2), "n": Range(0, 4)})
    assert is_lossless(A.Skip(), dom) is True
    assert is_lossless(parse_command("while true do skip end"), dom, fuel=10) is None
    assert is_lossless(parse_command("while i < n do i := i + 1 end"), dom, fuel=8) is True
    assert is_lossless(parse_command("x ~~ dist { 0 : 1/2 }"), dom) is False


# random small programs --------------------------------------------------------

_ATOMS = ["x := x + 1", "y := x - y", "x := y mod 3", "b ~~ Bern(1/4)", "x ~~ [0, 2]",
          "if b then y := y + x fi", "if x < y then x := y else b := !b fi",
          "while x < 2 do x := x + 1 end", "y ~~ {x, y, 0}"]
programs = st.lists(st.sampled_from(_ATOMS), min_size=1, max_size=4).map("; ".join)
memories = st.fixed_dictionaries({"x": st.integers(-1, 2), "y": st.integers(-1, 2),
                                  "b": st.booleans()})


@settings(max_examples=60)
@given(programs, programs, memories)
def test_sequencing_is_monadic_bind(p, q, m):
    c1, c2 = parse_command(p), parse_command(q)
    whole = interpret(A.Seq(c1, c2), m)
    assert whole == mlet(interpret(c1, m), lambda m2: interpret(c2, m2))
    assert whole.mass == 1


@settings(max_examples=40)
@given(programs, memories)
def test_deterministic_programs_are_point_masses(p, m):
    det = "; ".join(s for s in p.split("; ") if "~~" not in s) or "skip"
    assert len(interpret(parse_command(det), m)) == 1


@settings(max_examples=40)
@given(programs, memories, st.integers(3, 6))
def test_more_fuel_keeps_exact_results(p, m, fuel):
    c = parse_command(p)
    assert interpret(c, m, fuel) == interpret(c, m, fuel + 5)


# rewrites -----------------------------------------------------------------------

def test_loop_split_on_bins_loop():
    prog = parse_program(source("balls-bins")).check()
    loop = A.flatten(prog.body)[3]
    split = apply_transform(prog.body, LoopSplit(parse_expr("i < m")), (3,))
    first, second = A.flatten(split)[3:5]
    assert first.test == A.Binop("&&", loop.test, parse_expr("i < m"))
    assert second == loop
    dom = prog.domain_decl().with_domains({"n": Range(3, 3), "m": Range(2, 2)})
    out = [A.Var("binA"), A.Var("binB")]
    assert semantically_equivalent(prog.body, split, dom, out) is True
    assert apply_transform(split, LoopMerge(), (3,)) == prog.body


def test_coin_split_shape():
    c = parse_command("x ~~ Bern(q1 * r)")
    rule = CoinSplit(A.Var("q1"), A.Var("r"), ("y", "z"))
    assert apply_transform(c, rule) == parse_command("y ~~ Bern(q1); z ~~ Bern(r); x := y && z")
    assert rule.is_syntactic(c)
    assert apply_transform(apply_transform(c, rule), CoinMerge()) == c


def test_rewrite_pattern_mismatch():
    with pytest.raises(TransformError):
        apply_transform(parse_command("x := 1"), LoopSplit(A.Lit(True)))
    with pytest.raises(TransformError):
        apply_transform(parse_command("x := 1; y := x"), Swap())
    with pytest.raises(TransformError):
        apply_transform(parse_command("x := 1"), Swap(), (4,))


def test_nested_swap_path():
    c = parse_command("while i < 2 do a ~~ Bern(1/2); b ~~ Bern(1/3); i := i + 1 end")
    got = apply_transform(c, Swap(), (0, 0, 0))
    assert got == parse_command("while i < 2 do b ~~ Bern(1/3); a ~~ Bern(1/2); i := i + 1 end")
