"""Layered bi-criteria path instances whose reachability curve mirrors the path cost curve."""
import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

import numpy as np

from .errors import LimitExceeded, QueryError
from .geometry import pareto_vertices_2d
from .model import Mdp
from .settings import DEFAULT_SETTINGS, EngineSettings

logger = logging.getLogger(__name__)

SOURCE, SINK = 's', 't'
RED, BLUE = 'R', 'B'


@dataclass(frozen=True)
class LayeredGraph:
    layers: tuple[tuple[str, ...], ...]
    costs: Mapping[tuple[str, str], tuple[int, int]]

    @property
    def max_cost(self) -> int:
        return max(max(c) for c in self.costs.values())

    def layer_of(self, node: str) -> int:
        return next(i for i, layer in enumerate(self.layers) if node in layer)


@dataclass(frozen=True)
class HardInstance:
    n: int
    graph: LayeredGraph
    mdp: Mdp
    h: int

    @property
    def red_offset(self) -> Fraction:
        """Pr(reach R) = red_offset - scale * c(path), and likewise for B."""
        return Fraction(self.n, 4 * 2 ** self.n)

    @property
    def scale(self) -> Fraction:
        return Fraction(1, 8 * self.h * 2 ** self.n)


def layered_graph(n: int, seed: int, width: int = 2) -> LayeredGraph:
    """Complete layered graph s -> L1 -> ... -> L(n-1) -> t with costs that trade off by doubling weights."""
    rng = np.random.default_rng(seed)
    layers = [(SOURCE,)]
    for i in range(1, n):
        layers.append(tuple(f'u{i}_{j}' for j in range(width)))
    layers.append((SINK,))
    costs = {}
    for i in range(n):
        step = 2 ** (i % 4)
        nxt = layers[i + 1]
        for u in layers[i]:
            for j, v in enumerate(nxt):
                spread = (len(nxt) - 1) or 1
                c = int(rng.integers(1, 8)) + j * step
                d = int(rng.integers(1, 8)) + (spread - j) * step
                costs[(u, v)] = (c, d)
    return LayeredGraph(tuple(layers), costs)


def gen_hard_instance(n: int, seed: int = 0, width: int = 2,
                      settings: EngineSettings = DEFAULT_SETTINGS) -> HardInstance:
    if n < 2:
        raise QueryError("a hard instance needs at least 2 layers")
    if n > settings.hard_instance_max_layers:
        raise LimitExceeded(f"{n} layers exceed the cap of {settings.hard_instance_max_layers}")
    graph = layered_graph(n, seed, width)
    h = graph.max_cost
    denom = 8 * h * 2 ** n
    labels = {node: set() for layer in graph.layers for node in layer}
    labels[RED] = {RED}
    labels[BLUE] = {BLUE}
    trans = {(SINK, 'stop'): {SINK: Fraction(1)}, (RED, 'stop'): {RED: Fraction(1)},
             (BLUE, 'stop'): {BLUE: Fraction(1)}}
    for (u, v), (c, d) in graph.costs.items():
        i = graph.layer_of(u)
        red = Fraction(2 ** i * (2 * h - c), denom)
        blue = Fraction(2 ** i * (2 * h - d), denom)
        dist = {RED: red, BLUE: blue, v: Fraction(1, 2)}
        dist[SINK] = dist.get(SINK, 0) + Fraction(1, 2) - red - blue
        trans[(u, f'to_{v}')] = dist
    m = Mdp.build(labels, trans, SOURCE)
    logger.info("hard instance: %d layers, %d states, h=%d", n, len(m.states), h)
    return HardInstance(n, graph, m, h)


def enumerate_paths(graph: LayeredGraph) -> list[tuple[tuple[str, ...], int, int]]:
    result = []
    for middle in itertools.product(*graph.layers[1:-1]):
        path = (SOURCE,) + middle + (SINK,)
        c = sum(graph.costs[(u, v)][0] for u, v in zip(path, path[1:]))
        d = sum(graph.costs[(u, v)][1] for u, v in zip(path, path[1:]))
        result.append((path, c, d))
    return result


def lower_hull_vertices(points) -> list[tuple[int, int]]:
    """Vertices of the lower-left convex hull of cost points (both costs minimized)."""
    flipped = pareto_vertices_2d([(-Fraction(c), -Fraction(d)) for c, d in points])
    return sorted((int(-x), int(-y)) for x, y in flipped)


def path_strategy(instance: HardInstance, path: tuple[str, ...]) -> dict[str, str]:
    """Pure assignment that follows `path`; off-path states take their first action."""
    m = instance.mdp
    assignment = {s: m.enabled(s)[0] for s in m.states}
    for u, v in zip(path, path[1:]):
        assignment[u] = f'to_{v}'
    return assignment
