"""Flow LP for multi-objective reachability, achievability decisions and strategy extraction."""
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional, Sequence

from .errors import ModelError, QueryError, StrategyError
from .model import MemorylessStrategy, Mdp, default_strategy
from .simplex import EQ, GE, LE, LinearProgram, LpSolution, LpStatus, solve_lp

logger = logging.getLogger(__name__)

SLACK_VAR = 'z'


@dataclass(frozen=True)
class LpModel:
    """Flow constraints of a cleaned-up MDP with absorbing targets.

    Variables are y[v,a] for non-target states and y[v] for target states.
    Mass that enters `sink` leaks out of the system.
    """
    mdp: Mdp
    alpha: Mapping[str, Fraction]
    targets: tuple[frozenset[str], ...]
    sink: Optional[str]
    program: LinearProgram
    action_vars: Mapping[tuple[str, str], str]
    target_vars: Mapping[str, str]
    names: tuple[str, ...]

    @property
    def k(self) -> int:
        return len(self.targets)

    def objective(self, i: int) -> dict[str, Fraction]:
        return {self.target_vars[v]: Fraction(1) for v in sorted(self.targets[i])}

    def weighted_objective(self, weights: Sequence[Fraction]) -> dict[str, Fraction]:
        result = {}
        for i, w in enumerate(weights):
            if w:
                for v, c in self.objective(i).items():
                    result[v] = result.get(v, 0) + w * c
        return result

    def objective_values(self, assignment: Mapping[str, Fraction]) -> tuple[Fraction, ...]:
        return tuple(sum((assignment.get(v, 0) for v in self.objective(i)), Fraction(0)) for i in range(self.k))


def build_multiobj_lp(m: Mdp, alpha: Mapping[str, Fraction], targets: Sequence[frozenset[str]],
                      sink: Optional[str] = None, names: Optional[Sequence[str]] = None) -> LpModel:
    targets = tuple(frozenset(t) for t in targets)
    final = frozenset().union(*targets) if targets else frozenset()
    names = tuple(names) if names else tuple(f'objective{i + 1}' for i in range(len(targets)))
    if len(names) != len(targets):
        raise QueryError("one name per objective is required")

    # 1. PRECONDITIONS
    for v in sorted(final):
        if v not in m.labels:
            raise ModelError(f"target state {v!r} is not a model state")
        if not m.is_absorbing(v):
            raise ModelError(f"target state {v!r} is not absorbing")
    if sink is not None and sink in final:
        raise ModelError(f"sink {sink!r} may not be a target")
    inner = [v for v in m.states if v not in final and v != sink]
    for v, p in alpha.items():
        if v in final:
            raise ModelError(f"initial mass on target state {v!r}")
        if v not in m.labels:
            raise ModelError(f"initial distribution names unknown state {v!r}")
    stuck = sorted(set(inner) - m.can_reach(final))
    if stuck:
        raise ModelError(f"model is not cleaned up: state {stuck[0]!r} cannot reach any target")

    # 2. VARIABLES
    program = LinearProgram()
    action_vars, target_vars = {}, {}
    for v in inner:
        for a in m.enabled(v):
            action_vars[(v, a)] = program.add_variable(f'y[{v},{a}]')
    for v in sorted(final):
        target_vars[v] = program.add_variable(f'y[{v}]')

    # 3. FLOW CONSERVATION
    inflow = {v: {} for v in list(inner) + sorted(final)}
    for (v, a), var in action_vars.items():
        for succ, p in m.successors(v, a):
            if succ in inflow:
                inflow[succ][var] = inflow[succ].get(var, 0) + p
    for v in inner:
        coeffs = {action_vars[(v, a)]: Fraction(1) for a in m.enabled(v)}
        for var, p in inflow[v].items():
            coeffs[var] = coeffs.get(var, 0) - p
        program.add_constraint(coeffs, EQ, alpha.get(v, 0), f'flow[{v}]')
    for v in sorted(final):
        coeffs = {target_vars[v]: Fraction(1)}
        for var, p in inflow[v].items():
            coeffs[var] = coeffs.get(var, 0) - p
        program.add_constraint(coeffs, EQ, 0, f'collect[{v}]')
    logger.debug("flow LP: %d variables, %d rows", len(program.variables), len(program.rows))
    return LpModel(m, dict(alpha), targets, sink, program, action_vars, target_vars, names)


def _check_bounds(model: LpModel, bounds: Sequence[Fraction]) -> list[Fraction]:
    bounds = [Fraction(r) for r in bounds]
    if len(bounds) != model.k:
        raise QueryError(f"expected {model.k} bounds, got {len(bounds)}")
    for r in bounds:
        if r < 0 or r > 1:
            raise QueryError(f"bound {r} outside [0, 1]")
    return bounds


@dataclass(frozen=True)
class AchievabilityResult:
    achievable: bool
    strategy: Optional[MemorylessStrategy]
    witness: Optional[LpSolution]
    values: Optional[tuple[Fraction, ...]] = None


def decide_extended_achievability(model: LpModel, bounds: Sequence[Fraction],
                                  strict: Sequence[int] = ()) -> AchievabilityResult:
    """Is there a strategy with Pr(F_i) >= r_i for all i, strictly for indices in `strict`?"""
    bounds = _check_bounds(model, bounds)
    strict = sorted(set(strict))
    if any(j < 0 or j >= model.k for j in strict):
        raise QueryError(f"strict index out of range 0..{model.k - 1}")
    if not strict and all(r == 0 for r in bounds):
        strategy = default_strategy(model.mdp)
        return AchievabilityResult(True, strategy, None)

    program = model.program.copy()
    if strict:
        program.add_variable(SLACK_VAR)
        program.add_constraint({SLACK_VAR: 1}, LE, 1, 'slack_cap')
    for i, r in enumerate(bounds):
        coeffs = dict(model.objective(i))
        if i in strict:
            coeffs[SLACK_VAR] = Fraction(-1)
            program.add_constraint(coeffs, GE, r, f'strict[{i}]')
        elif r > 0:
            program.add_constraint(coeffs, GE, r, f'bound[{i}]')
    solution = solve_lp(program, {SLACK_VAR: 1} if strict else {})
    if solution.status is not LpStatus.FEASIBLE:
        logger.info("bounds %s not achievable", [str(r) for r in bounds])
        return AchievabilityResult(False, None, solution)
    if strict and solution.assignment[SLACK_VAR] <= 0:
        logger.info("strict bounds not achievable: best slack is 0")
        return AchievabilityResult(False, None, solution)
    strategy = extract_strategy(model, solution)
    return AchievabilityResult(True, strategy, solution, model.objective_values(solution.assignment))


def extract_strategy(model: LpModel, solution: LpSolution) -> MemorylessStrategy:
    """Normalizes the flow at each state; states without flow play their least action."""
    if not solution.feasible:
        raise StrategyError("cannot extract a strategy from an infeasible LP solution")
    m = model.mdp
    choice = {}
    for v in m.states:
        flows = {a: solution.assignment.get(model.action_vars.get((v, a)), Fraction(0))
                 for a in m.enabled(v)}
        total = sum(flows.values(), Fraction(0))
        if total > 0:
            choice[v] = {a: y / total for a, y in flows.items() if y > 0}
        else:
            choice[v] = {m.enabled(v)[0]: Fraction(1)}
    return MemorylessStrategy.of(choice)


@dataclass(frozen=True)
class WeightedOptimum:
    value: Fraction
    point: tuple[Fraction, ...]
    solution: LpSolution
    strategy: MemorylessStrategy


def maximize_weighted(model: LpModel, weights: Sequence[Fraction],
                      floors: Optional[Mapping[int, Fraction]] = None) -> WeightedOptimum:
    """Maximizes sum_i w_i Pr(F_i), optionally subject to Pr(F_i) >= floors[i]."""
    weights = [Fraction(w) for w in weights]
    if len(weights) != model.k:
        raise QueryError(f"expected {model.k} weights, got {len(weights)}")
    if any(w < 0 for w in weights):
        raise QueryError("weights must be nonnegative")
    program = model.program
    if floors:
        program = program.copy()
        for i, r in sorted(floors.items()):
            program.add_constraint(model.objective(i), GE, r, f'floor[{i}]')
    solution = solve_lp(program, model.weighted_objective(weights))
    if solution.status is LpStatus.INFEASIBLE:
        raise QueryError("no strategy meets the requested floors")
    if solution.status is not LpStatus.FEASIBLE:
        raise StrategyError("weighted reachability LP is unbounded")
    return WeightedOptimum(solution.objective_value, model.objective_values(solution.assignment),
                           solution, extract_strategy(model, solution))


def flow_diagnostics(model: LpModel, solution: LpSolution) -> dict:
    """Expected visits per state and the probability of ending in each target state."""
    visits = {}
    for (v, a), var in model.action_vars.items():
        visits[v] = visits.get(v, 0) + solution.assignment.get(var, 0)
    reached = {v: solution.assignment.get(var, Fraction(0)) for v, var in model.target_vars.items()}
    leaked = sum(model.alpha.values(), Fraction(0)) - sum(reached.values(), Fraction(0))
    return {'visits': visits, 'reached': reached, 'leaked': leaked}


def dump_lp(model: LpModel, weights: Optional[Sequence[Fraction]] = None) -> str:
    """CPLEX-style text with exact coefficients; variables are renamed x0, x1, ..."""
    alias = {v: f'x{i}' for i, v in enumerate(model.program.variables)}

    def term_list(coeffs):
        parts = []
        for v, c in coeffs.items():
            sign = '-' if c < 0 else '+'
            parts.append(f'{sign} {abs(c)} {alias[v]}')
        text = ' '.join(parts) or '0'
        return text[2:] if text.startswith('+ ') else text

    weights = weights or [Fraction(1)] * model.k
    lines = ['\\ exact rational coefficients']
    for v, name in alias.items():
        lines.append(f'\\ {name} = {v}')
    lines += ['Maximize', f' obj: {term_list(model.weighted_objective(weights))}', 'Subject To']
    sense = {EQ: '=', GE: '>=', LE: '<='}
    for row in model.program.rows:
        lines.append(f' {row.name}: {term_list(row.coeffs)} {sense[row.sense]} {row.rhs}')
    lines.append('End')
    return '\n'.join(lines) + '\n'
