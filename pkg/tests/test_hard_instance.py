from fractions import Fraction

import pytest

from engine.errors import LimitExceeded, QueryError
from engine.hard_instance import (BLUE, RED, enumerate_paths, gen_hard_instance, layered_graph,
                                  lower_hull_vertices, path_strategy)
from engine.model import MemorylessStrategy
from engine.oracle import evaluate_objectives
from engine.pareto import exact_vertices_biobjective
from engine.reduction import reachability_instance


def test_layered_graph_shape():
    graph = layered_graph(4, seed=0)
    assert [len(layer) for layer in graph.layers] == [1, 2, 2, 2, 1]
    assert len(graph.costs) == 2 + 4 + 4 + 2
    assert all(c >= 1 and d >= 1 for c, d in graph.costs.values())
    assert graph.layer_of('u2_1') == 2


def test_instance_size_and_errors():
    instance = gen_hard_instance(4)
    assert len(instance.mdp.states) == 10
    assert instance.h == instance.graph.max_cost
    with pytest.raises(QueryError):
        gen_hard_instance(1)
    with pytest.raises(LimitExceeded):
        gen_hard_instance(25)


def test_path_probabilities_follow_costs():
    instance = gen_hard_instance(4, seed=5)
    targets = [frozenset({RED}), frozenset({BLUE})]
    for path, c, d in enumerate_paths(instance.graph):
        strategy = MemorylessStrategy.pure(path_strategy(instance, path))
        red, blue = evaluate_objectives(instance.mdp, strategy, targets)
        assert red == instance.red_offset - instance.scale * c
        assert blue == instance.red_offset - instance.scale * d


def test_lower_hull():
    assert lower_hull_vertices([(1, 5), (2, 2), (5, 1), (3, 3)]) == [(1, 5), (2, 2), (5, 1)]


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_vertex_count_matches_path_hull(seed):
    instance = gen_hard_instance(4, seed=seed)
    hull = lower_hull_vertices([(c, d) for _, c, d in enumerate_paths(instance.graph)])
    model = reachability_instance(instance.mdp, [RED, BLUE]).model
    vertices = exact_vertices_biobjective(model).values()
    assert len(vertices) == len(hull)
    expected = sorted((instance.red_offset - instance.scale * c, instance.red_offset - instance.scale * d)
                      for c, d in hull)
    assert vertices == expected
    assert all(isinstance(v, Fraction) for point in vertices for v in point)


@pytest.mark.slow
@pytest.mark.parametrize("layers", [5, 6, 7, 8])
def test_vertex_count_grows_with_layers(layers):
    for seed in range(2):
        instance = gen_hard_instance(layers, seed=seed)
        hull = lower_hull_vertices([(c, d) for _, c, d in enumerate_paths(instance.graph)])
        model = reachability_instance(instance.mdp, [RED, BLUE]).model
        assert len(exact_vertices_biobjective(model).values()) == len(hull)
