"""Pareto curves: exact bi-objective vertices and ε-approximate Pareto sets."""
import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .errors import QueryError, SolverError
from .geometry import Point, dominates, pareto_vertices_2d
from .lp import LpModel, extract_strategy, maximize_weighted
from .model import MemorylessStrategy
from .settings import DEFAULT_SETTINGS, EngineSettings
from .simplex import LpSolution, LpStatus

logger = logging.getLogger(__name__)

RATIO_DENOMINATOR = 10 ** 6


@dataclass(frozen=True)
class ParetoPoint:
    values: Point
    strategy: MemorylessStrategy
    witness: LpSolution
    weights: Optional[tuple[Fraction, ...]] = None


@dataclass(frozen=True)
class ParetoResult:
    points: tuple[ParetoPoint, ...]
    names: tuple[str, ...]
    epsilon: Optional[Fraction] = None
    lp_calls: int = 0

    def values(self) -> list[Point]:
        return [p.values for p in self.points]


def strategy_key(strategy: MemorylessStrategy) -> tuple:
    return tuple((s, tuple(d.items())) for s, d in strategy.choice.items())


class _Optimizer:
    """Weighted LP calls with a cache keyed by the weight vector."""

    def __init__(self, model: LpModel):
        self.model = model
        self.cache = {}

    def best(self, weights: Sequence[Fraction]) -> ParetoPoint:
        key = tuple(Fraction(w) for w in weights)
        if key not in self.cache:
            opt = maximize_weighted(self.model, key)
            self.cache[key] = ParetoPoint(opt.point, opt.strategy, opt.solution, key)
        return self.cache[key]

    def lexicographic(self, first: int, second: int) -> ParetoPoint:
        k = self.model.k
        top = self.best(tuple(Fraction(int(i == first)) for i in range(k)))
        opt = maximize_weighted(self.model, tuple(Fraction(int(i == second)) for i in range(k)),
                                floors={first: top.values[first]})
        return ParetoPoint(opt.point, opt.strategy, opt.solution, top.weights)


def _keep_front(points: Sequence[ParetoPoint]) -> tuple[ParetoPoint, ...]:
    """Drops dominated points; equal values keep the smallest strategy."""
    best = {}
    for p in points:
        current = best.get(p.values)
        if current is None or strategy_key(p.strategy) < strategy_key(current.strategy):
            best[p.values] = p
    front = [p for v, p in best.items() if not any(dominates(o, v) for o in best)]
    return tuple(sorted(front, key=lambda p: p.values))


def exact_vertices_biobjective(model: LpModel) -> ParetoResult:
    """Vertices of the achievable bi-objective Pareto curve, by dichotomic weight search."""
    if model.k != 2:
        raise QueryError(f"exact vertices need exactly 2 objectives, got {model.k}")
    opt = _Optimizer(model)
    left = opt.lexicographic(0, 1)
    right = opt.lexicographic(1, 0)
    found = [left, right]
    stack = [(left, right)] if left.values != right.values else []
    while stack:
        a, b = stack.pop()
        w = (b.values[1] - a.values[1], a.values[0] - b.values[0])
        level = w[0] * a.values[0] + w[1] * a.values[1]
        c = opt.best(w)
        if w[0] * c.values[0] + w[1] * c.values[1] > level:
            found.append(c)
            stack.extend([(a, c), (c, b)])
    front = _keep_front(found)
    vertices = set(pareto_vertices_2d([p.values for p in front]))
    points = tuple(p for p in front if p.values in vertices)
    logger.info("exact bi-objective curve: %d vertices, %d LP calls", len(points), len(opt.cache) + 2)
    return ParetoResult(points, model.names, None, len(opt.cache) + 2)


def _mixture(model: LpModel, a: ParetoPoint, b: ParetoPoint, mu: Fraction) -> ParetoPoint:
    """Exact convex combination of two LP witnesses."""
    keys = set(a.witness.assignment) | set(b.witness.assignment)
    assignment = {v: (1 - mu) * a.witness.assignment.get(v, 0) + mu * b.witness.assignment.get(v, 0)
                  for v in keys}
    witness = LpSolution(LpStatus.FEASIBLE, assignment)
    return ParetoPoint(model.objective_values(assignment), extract_strategy(model, witness), witness)


def edge_anchors(model: LpModel, a: ParetoPoint, b: ParetoPoint, eps: Fraction) -> list[ParetoPoint]:
    """Points on segment [a, b] such that every point of the segment is ε-covered."""
    slope = [y - x for x, y in zip(a.values, b.values)]
    down = [eps * a.values[i] / -s for i, s in enumerate(slope) if s < 0]
    up = [eps * a.values[i] / s for i, s in enumerate(slope) if s > 0]
    d = min(down) if down else None
    e = min(up) if up else None
    if e is None:
        return []
    covered = e
    anchors = []
    while covered < 1:
        mu = Fraction(1) if d is None else min(Fraction(1), (covered + d) / (1 + eps))
        if mu >= 1:
            break
        if mu <= 0:
            raise SolverError("anchor search made no progress")
        anchors.append(_mixture(model, a, b, mu))
        covered = mu * (1 + eps) + e
    return anchors


def _ratio_grid(eps: Fraction, k: int) -> list[Fraction]:
    lo, hi = eps / k, Fraction(k) / eps
    grid = [lo]
    while grid[-1] < hi:
        nxt = (grid[-1] * (1 + eps)).limit_denominator(RATIO_DENOMINATOR)
        if nxt <= grid[-1]:
            nxt = grid[-1] * (1 + eps)
        grid.append(min(nxt, hi))
    return grid


def _grid_points(model: LpModel, eps: Fraction) -> list[ParetoPoint]:
    """Weight vectors (1, g_2, ..., g_k) over a multiplicative grid, refined only where the optimum changes.

    Each optimum region is convex in weight space, so a box whose corners share
    an optimum has that optimum throughout.
    """
    k = model.k
    opt = _Optimizer(model)
    grid = _ratio_grid(eps, k)
    top = len(grid) - 1

    def at(index):
        return opt.best((Fraction(1),) + tuple(grid[i] for i in index))

    found = []
    boxes = [((0,) * (k - 1), (top,) * (k - 1))]
    while boxes:
        lo, hi = boxes.pop()
        corners = [at(c) for c in itertools.product(*zip(lo, hi))]
        found.extend(corners)
        if len({c.values for c in corners}) == 1:
            continue
        widths = [h - l for l, h in zip(lo, hi)]
        axis = max(range(k - 1), key=lambda i: (widths[i], -i))
        if widths[axis] <= 1:
            continue
        mid = (lo[axis] + hi[axis]) // 2
        boxes.append((lo, hi[:axis] + (mid,) + hi[axis + 1:]))
        boxes.append((lo[:axis] + (mid,) + lo[axis + 1:], hi))
    for i in range(k):
        found.append(opt.best(tuple(Fraction(int(j == i)) for j in range(k))))
    logger.info("weight grid: %d ratios per axis, %d LP calls", len(grid), len(opt.cache))
    return found


def epsilon_pareto(model: LpModel, eps, settings: EngineSettings = DEFAULT_SETTINGS) -> ParetoResult:
    """A set of achievable points such that every achievable point is within factor (1+ε) of one of them."""
    eps = Fraction(eps)
    if eps <= 0:
        raise QueryError("epsilon must be positive")
    if model.k == 0:
        raise QueryError("at least one objective is required")
    if model.k == 1:
        point = _Optimizer(model).best((Fraction(1),))
        return ParetoResult((point,), model.names, eps, 1)
    if model.k == 2:
        exact = exact_vertices_biobjective(model)
        points = list(exact.points)
        for a, b in zip(exact.points, exact.points[1:]):
            points.extend(edge_anchors(model, a, b, eps))
        result = _keep_front(points)
        return ParetoResult(result, model.names, eps, exact.lp_calls)
    found = _grid_points(model, eps)
    result = _keep_front(found)
    return ParetoResult(result, model.names, eps, len({p.weights for p in found}))


@dataclass(frozen=True)
class CoverageReport:
    covered: tuple[Point, ...]
    uncovered: tuple[Point, ...]

    @property
    def ok(self) -> bool:
        return not self.uncovered


def covers(point: Sequence[Fraction], sample: Sequence[Fraction], eps: Fraction) -> bool:
    return all(x <= (1 + eps) * y for x, y in zip(sample, point))


def check_coverage(result: ParetoResult, samples: Sequence[Point], eps) -> CoverageReport:
    eps = Fraction(eps)
    values = result.values()
    covered, uncovered = [], []
    for sample in samples:
        (covered if any(covers(v, sample, eps) for v in values) else uncovered).append(tuple(sample))
    return CoverageReport(tuple(covered), tuple(uncovered))
