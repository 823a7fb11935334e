from fractions import Fraction

import pytest

from engine.errors import SolverError
from engine.simplex import EQ, GE, LE, LinearProgram, LpStatus, solve_lp


def _program(*names):
    lp = LinearProgram()
    for name in names:
        lp.add_variable(name)
    return lp


def test_textbook_maximum():
    lp = _program('x', 'y')
    lp.add_constraint({'x': 1, 'y': 2}, LE, 4)
    lp.add_constraint({'x': 3, 'y': 1}, LE, 6)
    solution = solve_lp(lp, {'x': 1, 'y': 1})
    assert solution.status is LpStatus.FEASIBLE
    assert solution.assignment == {'x': Fraction(8, 5), 'y': Fraction(6, 5)}
    assert solution.objective_value == Fraction(14, 5)


def test_minimize_with_equalities_and_negative_rhs():
    lp = _program('x', 'y')
    lp.add_constraint({'x': 1, 'y': -1}, EQ, -1)
    lp.add_constraint({'y': 1}, LE, 3)
    lp.add_constraint({'x': 1}, GE, Fraction(1, 2))
    best = solve_lp(lp, {'x': 1})
    assert best.assignment['x'] == 2
    least = solve_lp(lp, {'x': 1}, maximize=False)
    assert least.assignment['x'] == Fraction(1, 2)
    assert least.assignment['y'] == Fraction(3, 2)


def test_infeasible_and_unbounded():
    lp = _program('x')
    lp.add_constraint({'x': 1}, GE, 2)
    lp.add_constraint({'x': 1}, LE, 1)
    assert solve_lp(lp, {}).status is LpStatus.INFEASIBLE

    open_lp = _program('x')
    open_lp.add_constraint({'x': 1}, GE, 1)
    assert solve_lp(open_lp, {'x': 1}).status is LpStatus.UNBOUNDED


def test_redundant_equalities():
    lp = _program('x', 'y')
    lp.add_constraint({'x': 1, 'y': 1}, EQ, 1)
    lp.add_constraint({'x': 2, 'y': 2}, EQ, 2)
    solution = solve_lp(lp, {'y': 1})
    assert solution.feasible
    assert solution.assignment == {'x': 0, 'y': 1}


def test_program_validation():
    lp = _program('x')
    with pytest.raises(SolverError, match="duplicate"):
        lp.add_variable('x')
    with pytest.raises(SolverError, match="undeclared"):
        lp.add_constraint({'y': 1}, LE, 1)
    with pytest.raises(SolverError, match="sense"):
        lp.add_constraint({'x': 1}, '<>', 1)
    copy = lp.copy()
    copy.add_constraint({'x': 1}, LE, 1)
    assert not lp.rows and len(copy.rows) == 1
