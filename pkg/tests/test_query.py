from fractions import Fraction

import pytest

from engine.automata import avoid_automaton, reach_automaton
from engine.errors import LimitExceeded, QueryError
from engine.oracle import Claim, validate_strategy
from engine.query import (And, Atom, Const, Not, Pred, PropertySet, check_assume_guarantee, evaluate,
                          evaluate_forall, normalize, parse_query, parse_query_file)
from engine.settings import EngineSettings

HALF = Fraction(1, 2)

REACH_FILE = """
# two reachability targets
property A = reach "P1";
property B = reach "P2";
query: Pr(A) >= 1/2 & Pr(B) >= 1/2;
forall: Pr(A) <= 3/5;
"""


@pytest.fixture
def reach_props():
    return PropertySet.from_file(parse_query_file(REACH_FILE))


def test_parse_query():
    expr = parse_query("Pr(A) >= 1/2 & !(Pr(B) < 0.3)")
    assert expr == And((Pred('A', '>=', HALF), Not(Pred('B', '<', Fraction(3, 10)))))
    assert parse_query("true | false") == parse_query("(true) | (false)")


@pytest.mark.parametrize("text", ["Pr(A) >= ", "Pr(A) >= 3/2", "Pr A >= 1", "Pr(A) => 1/2"])
def test_parse_errors(text):
    with pytest.raises(QueryError):
        parse_query(text)


def test_unknown_property():
    with pytest.raises(QueryError, match="unknown property 'C'"):
        parse_query("Pr(C) > 0", known=['A'])


def test_parse_query_file():
    qf = parse_query_file(REACH_FILE)
    assert sorted(qf.properties) == ['A', 'B']
    assert qf.properties['A'].kind == 'reach'
    assert qf.properties['A'].argument == 'P1'
    assert [kind for kind, _ in qf.statements] == ['exists', 'forall']
    with pytest.raises(QueryError, match="declared twice"):
        parse_query_file('property A = reach "P1"; property A = avoid "P1";')
    with pytest.raises(QueryError, match="unknown property"):
        parse_query_file('complement Z = avoid "P1";')
    with pytest.raises(QueryError, match="unknown property"):
        parse_query_file('property A = reach "P1"; query: Pr(Z) > 0;')


def test_upper_bounds_become_complement_atoms():
    assert normalize(parse_query("Pr(A) <= 1/4")).disjuncts == ((Atom('A', True, Fraction(3, 4), False),),)
    assert normalize(parse_query("!(Pr(A) > 1/2)")).disjuncts == ((Atom('A', True, HALF, False),),)
    assert normalize(parse_query("Pr(A) = 1/2")).disjuncts == (
        (Atom('A', False, HALF, False), Atom('A', True, HALF, False)),)
    assert normalize(parse_query("Pr(A) != 1/2")).disjuncts == (
        (Atom('A', False, HALF, True),), (Atom('A', True, HALF, True),))


def test_trivial_bounds():
    assert normalize(parse_query("Pr(A) >= 0")).disjuncts == ((),)
    assert normalize(parse_query("Pr(A) > 1")).disjuncts == ()
    assert normalize(parse_query("Pr(A) < 0 | Pr(A) <= 1")).disjuncts == ((),)
    assert normalize(And((Const(False), Pred('A', '>', HALF)))).disjuncts == ()


def test_merge_and_dedupe():
    merged = normalize(parse_query("Pr(A) >= 1/4 & Pr(A) > 1/4 & Pr(A) >= 1/5"))
    assert merged.disjuncts == ((Atom('A', False, Fraction(1, 4), True),),)
    assert len(normalize(parse_query("Pr(A) >= 1/2 | Pr(A) >= 1/2")).disjuncts) == 1


def test_disjunct_cap():
    clause = "(Pr(A) >= 1/2 | Pr(B) >= 1/2)"
    expr = parse_query(' & '.join([clause] * 3))
    assert len(normalize(expr).disjuncts) == 3
    with pytest.raises(LimitExceeded):
        normalize(parse_query(' & '.join(f"(Pr(A) >= {i}/9 | Pr(B) >= {i}/9)" for i in range(1, 4))),
                  EngineSettings(disjunct_cap=4))


def test_evaluate_satisfiable(three_action_model, reach_props):
    verdict = evaluate(three_action_model, reach_props, parse_query("Pr(A) >= 1/2 & Pr(B) >= 1/2"))
    assert verdict.satisfied
    assert verdict.route == 'quantitative'
    assert verdict.disjunct == 0
    claims = [Claim('A', '>=', HALF), Claim('B', '>=', HALF)]
    assert validate_strategy(three_action_model, verdict.strategy, list(verdict.objectives), claims).passed


def test_evaluate_unsatisfiable(three_action_model, reach_props):
    verdict = evaluate(three_action_model, reach_props, parse_query("Pr(A) > 11/20 & Pr(B) >= 3/10"))
    assert not verdict.satisfied
    assert verdict.strategy is None


def test_second_disjunct_supplies_the_witness(three_action_model, reach_props):
    verdict = evaluate(three_action_model, reach_props, parse_query("Pr(A) > 3/5 | Pr(B) >= 4/5"))
    assert verdict.satisfied
    assert verdict.disjunct == 1


def test_upper_bound_uses_builtin_complement(three_action_model, reach_props):
    verdict = evaluate(three_action_model, reach_props, parse_query("Pr(A) >= 1/2 & Pr(B) <= 1/2"))
    assert verdict.satisfied
    assert [a.label for a in verdict.atoms] == ['A', 'not B']


def test_forall(three_action_model, reach_props):
    assert evaluate_forall(three_action_model, reach_props, parse_query("Pr(A) <= 3/5")).satisfied
    verdict = evaluate_forall(three_action_model, reach_props, parse_query("Pr(A) <= 1/2"))
    assert not verdict.satisfied
    assert verdict.strategy is not None


def test_automaton_property_needs_complement(tmp_path, three_action_model, reach_hoa_text):
    (tmp_path / 'reach_p1.hoa').write_text(reach_hoa_text)
    qf = parse_query_file('property C = automaton "reach_p1.hoa";', tmp_path)
    props = PropertySet.from_file(qf)
    assert evaluate(three_action_model, props, parse_query("Pr(C) >= 3/5")).satisfied
    with pytest.raises(QueryError, match="complement"):
        evaluate(three_action_model, props, parse_query("Pr(C) <= 1/2"))


def test_recurrence_query_both_routes(memory_needed_model):
    qf = parse_query_file('property A = infinitely "P1"; property B = infinitely "P2";')
    props = PropertySet.from_file(qf)
    expr = parse_query("Pr(A) > 0 & Pr(B) > 0")
    qualitative = evaluate(memory_needed_model, props, expr)
    assert qualitative.satisfied
    assert qualitative.route == 'qualitative'
    quantitative = evaluate(memory_needed_model, props, expr, force_quantitative=True)
    assert quantitative.satisfied
    assert quantitative.route == 'quantitative'
    claims = [Claim('A', '>', Fraction(0)), Claim('B', '>', Fraction(0))]
    for verdict in (qualitative, quantitative):
        assert validate_strategy(memory_needed_model, verdict.strategy, list(verdict.objectives), claims).passed
    assert not evaluate(memory_needed_model, props, parse_query("Pr(A) >= 1 & Pr(B) > 0")).satisfied


def test_constant_queries(three_action_model, reach_props):
    verdict = evaluate(three_action_model, reach_props, parse_query("true"))
    assert verdict.satisfied
    assert verdict.route == 'trivial'
    assert not evaluate(three_action_model, reach_props, parse_query("false")).satisfied


def test_assume_guarantee(three_action_model):
    violated = check_assume_guarantee(three_action_model, reach_automaton('P1'), Fraction(3, 5),
                                      avoid_automaton('P2'), Fraction(1, 10))
    assert not violated.holds
    assert violated.values == (Fraction(3, 5), 0)
    held = check_assume_guarantee(three_action_model, reach_automaton('P2'), Fraction(4, 5),
                                  reach_automaton('P1'), 1)
    assert held.holds
    assert check_assume_guarantee(three_action_model, reach_automaton('P1'), 1, reach_automaton('P2'), 0).holds
    with pytest.raises(QueryError):
        check_assume_guarantee(three_action_model, reach_automaton('P1'), 2, reach_automaton('P2'), 0)
