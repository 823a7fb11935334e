"""Independent oracles: brute-force strategy enumeration, strategy validation and random test models."""
import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from math import prod
from typing import Optional, Sequence, Union

import numpy as np

from .automata import RabinAutomaton
from .chain import acceptance_probability, induced_chain, reach_probabilities
from .errors import LimitExceeded, QueryError, StrategyError
from .geometry import Point, downward_hull_vertices, in_downward_hull, non_dominated
from .model import FiniteMemoryStrategy, InitialDistribution, MemorylessStrategy, Mdp
from .settings import DEFAULT_SETTINGS, EngineSettings
from .workers import run_batches

logger = logging.getLogger(__name__)

Objective = Union[frozenset, RabinAutomaton]


# --- HULL ORACLE ---

@dataclass(frozen=True)
class HullOracle:
    """Outcomes of every pure memoryless strategy; their downward convex hull is the achievable set."""
    points: tuple[Point, ...]
    vertices: tuple[Point, ...]
    strategies: int

    def contains(self, target: Sequence[Fraction], strict: Sequence[int] = ()) -> bool:
        return in_downward_hull([Fraction(r) for r in target], list(self.points), strict)


def pure_strategies(m: Mdp, initial: Optional[InitialDistribution] = None):
    """Pure memoryless strategies that differ on the states reachable from the initial support."""
    initial = initial or m.initial
    live = sorted(m.reachable_from(initial.support))
    fixed = {s: m.enabled(s)[0] for s in m.states if s not in live}
    choices = [m.enabled(s) for s in live]
    count = prod(len(c) for c in choices)

    def generate():
        for combo in itertools.product(*choices):
            assignment = dict(fixed)
            assignment.update(zip(live, combo))
            yield MemorylessStrategy.pure(assignment)

    return count, generate()


def evaluate_objectives(m: Mdp, strategy, objectives: Sequence[Objective],
                        initial: Optional[InitialDistribution] = None) -> tuple[Fraction, ...]:
    chain = induced_chain(m, strategy, initial)
    values = []
    for objective in objectives:
        if isinstance(objective, RabinAutomaton):
            values.append(acceptance_probability(chain, objective))
        else:
            values.extend(reach_probabilities(chain, [objective]))
    return tuple(values)


def build_hull_oracle(m: Mdp, objectives: Sequence[Objective], initial: Optional[InitialDistribution] = None,
                      settings: EngineSettings = DEFAULT_SETTINGS) -> HullOracle:
    count, strategies = pure_strategies(m, initial)
    if count > settings.oracle_cap:
        raise LimitExceeded(f"{count} pure strategies exceed the oracle cap of {settings.oracle_cap}")
    outcomes = run_batches(lambda s: evaluate_objectives(m, s, objectives, initial), list(strategies), settings)
    points = tuple(sorted(set(outcomes)))
    vertices = tuple(downward_hull_vertices(points))
    logger.info("hull oracle: %d strategies, %d distinct outcomes, %d vertices", count, len(points), len(vertices))
    return HullOracle(points, vertices, count)


def sample_points(oracle: HullOracle, seed: int, count: int = 20) -> list[Point]:
    """Oracle outcomes plus random convex combinations of the non-dominated ones."""
    rng = np.random.default_rng(seed)
    front = non_dominated(oracle.points)
    samples = list(front)
    for _ in range(count):
        weights = [Fraction(int(x)) for x in rng.integers(0, 10, size=len(front))]
        total = sum(weights, Fraction(0))
        if total == 0:
            continue
        samples.append(tuple(sum((w * p[i] for w, p in zip(weights, front)), Fraction(0)) / total
                            for i in range(len(front[0]))))
    return samples


# --- VALIDATION ---

COMPARATORS = {
    '>=': lambda a, b: a >= b,
    '>': lambda a, b: a > b,
    '<=': lambda a, b: a <= b,
    '<': lambda a, b: a < b,
    '=': lambda a, b: a == b,
}


@dataclass(frozen=True)
class Claim:
    name: str
    comparator: str
    bound: Fraction


@dataclass(frozen=True)
class ClaimRow:
    name: str
    comparator: str
    bound: Fraction
    actual: Fraction
    passed: bool


@dataclass(frozen=True)
class ValidationReport:
    rows: tuple[ClaimRow, ...]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)


def validate_strategy(m: Mdp, strategy, objectives: Sequence[Objective], claims: Sequence[Claim],
                      initial: Optional[InitialDistribution] = None) -> ValidationReport:
    """Recomputes exact objective probabilities under the strategy and checks each claim."""
    if not isinstance(strategy, (MemorylessStrategy, FiniteMemoryStrategy)):
        raise StrategyError("only memoryless or finite-memory strategies can be validated")
    if len(claims) != len(objectives):
        raise QueryError(f"{len(objectives)} objectives but {len(claims)} claims")
    for claim in claims:
        if claim.comparator not in COMPARATORS:
            raise QueryError(f"unknown comparator {claim.comparator!r}")
    actual = evaluate_objectives(m, strategy, objectives, initial)
    rows = tuple(ClaimRow(c.name, c.comparator, c.bound, a, COMPARATORS[c.comparator](a, c.bound))
                 for c, a in zip(claims, actual))
    for row in rows:
        if not row.passed:
            logger.warning("claim %s %s %s fails: actual %s", row.name, row.comparator, row.bound, row.actual)
    return ValidationReport(rows)


# --- RANDOM MODELS ---

def _random_distribution(rng, successors: list[str], denominator: int) -> dict[str, Fraction]:
    """Splits `denominator` units among the successors, each getting at least one."""
    cuts = sorted(rng.choice(np.arange(1, denominator), size=len(successors) - 1, replace=False).tolist())
    parts = [b - a for a, b in zip([0] + cuts, cuts + [denominator])]
    dist = {}
    for s, part in zip(successors, parts):
        dist[s] = dist.get(s, 0) + Fraction(part, denominator)
    return dist


def gen_random_mdp(seed: int, states: int = 6, actions: int = 2, targets: int = 2) -> tuple[Mdp, list[frozenset]]:
    """Random model with `targets` absorbing target states labelled T1..Tk and an absorbing unlabelled trap."""
    if states < 1 or targets < 1 or actions < 1:
        raise QueryError("states, actions and targets must be positive")
    rng = np.random.default_rng(seed)
    inner = [f's{i}' for i in range(states)]
    goals = [f't{i + 1}' for i in range(targets)]
    everything = inner + goals + ['trap']
    labels = {s: set() for s in inner}
    labels.update({t: {f'T{i + 1}'} for i, t in enumerate(goals)})
    labels['trap'] = set()
    trans = {(t, 'stay'): {t: Fraction(1)} for t in goals + ['trap']}
    for s in inner:
        for a in range(int(rng.integers(1, actions + 1))):
            width = int(rng.integers(1, 4))
            succ = [str(x) for x in rng.choice(everything, size=width, replace=True)]
            trans[(s, f'a{a}')] = _random_distribution(rng, succ, int(rng.integers(max(2, width), 11)))
    m = Mdp.build(labels, trans, inner[0])
    return m, [frozenset({t}) for t in goals]
