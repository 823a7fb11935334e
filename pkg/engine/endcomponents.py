"""End components, good end components and almost-sure target regions."""
import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Optional

import networkx as nx

from .automata import ProductMdp
from .errors import StrategyError
from .model import Distribution, Mdp, uniform

logger = logging.getLogger(__name__)

REACH_MODE = 'reach'


@dataclass(frozen=True)
class EndComponent:
    states: frozenset[str]
    actions: Mapping[str, tuple[str, ...]]


def maximal_end_components(m: Mdp, allowed: Optional[Mapping[str, Iterable[str]]] = None) -> list[EndComponent]:
    """MECs of the sub-MDP given by `allowed` actions per state (all actions if None)."""
    acts = {s: set(allowed.get(s, ())) if allowed is not None else set(m.enabled(s)) for s in m.states}
    comps = [frozenset(s for s in m.states if acts[s])]
    while True:
        changed = False
        refined = []
        for comp in comps:
            for s in comp:
                acts[s] = {a for a in acts[s] if all(t in comp for t, _ in m.successors(s, a))}
            live = {s for s in comp if acts[s]}
            g = nx.DiGraph()
            g.add_nodes_from(live)
            for s in live:
                for a in acts[s]:
                    g.add_edges_from((s, t) for t, _ in m.successors(s, a) if t in live)
            sccs = [frozenset(c) for c in nx.strongly_connected_components(g)]
            if len(sccs) != 1 or live != comp:
                changed = True
            refined.extend(sccs)
        comps = refined
        if not changed:
            break
    result = []
    for comp in comps:
        actions = {s: tuple(sorted(acts[s])) for s in sorted(comp)}
        if all(actions.values()):
            result.append(EndComponent(comp, actions))
    return sorted(result, key=lambda ec: sorted(ec.states))


@dataclass(frozen=True)
class GoodEndComponent:
    component: EndComponent
    pairs: tuple[int, ...]


def good_end_components(p: ProductMdp, subset: Iterable[int]) -> list[GoodEndComponent]:
    """Maximal end components that satisfy every automaton in `subset` through one chosen pair each."""
    subset = tuple(sorted(subset))
    base = p.base
    found, seen = [], set()
    for choice in itertools.product(*(range(len(p.automata[i].pairs)) for i in subset)):
        pairs = [p.automata[i].pairs[j] for i, j in zip(subset, choice)]
        allowed = {}
        for s in base.states:
            if s == p.init_state:
                continue
            qs = p.origin[s][1]
            if any(qs[i] in pair.avoid for i, pair in zip(subset, pairs)):
                continue
            allowed[s] = base.enabled(s)
        for ec in maximal_end_components(base, allowed):
            hits = all(any(p.origin[s][1][i] in pair.repeat for s in ec.states)
                       for i, pair in zip(subset, pairs))
            if hits and ec.states not in seen:
                seen.add(ec.states)
                found.append(GoodEndComponent(ec, choice))
    return sorted(found, key=lambda g: sorted(g.component.states))


def almost_sure_region(m: Mdp, goal: Iterable[str]) -> tuple[frozenset[str], dict[str, tuple[str, ...]]]:
    """States that can reach `goal` with probability 1, plus the actions that keep them inside."""
    goal = set(goal)
    region = set(m.states)
    while True:
        safe = {s: tuple(a for a in m.enabled(s) if all(t in region for t, _ in m.successors(s, a)))
                for s in region}
        g = nx.DiGraph()
        g.add_nodes_from(region)
        for s in region:
            for a in safe[s]:
                g.add_edges_from((s, t) for t, _ in m.successors(s, a))
        reach = set(goal & region)
        for t in list(reach):
            reach |= nx.ancestors(g, t)
        if reach == region:
            return frozenset(region), safe
        region = reach


@dataclass(frozen=True)
class TargetSet:
    """T_R: states from which every property in `subset` can be satisfied almost surely."""
    subset: frozenset[int]
    states: frozenset[str]
    components: tuple[GoodEndComponent, ...]
    safe_actions: Mapping[str, tuple[str, ...]]


def compute_target_set(p: ProductMdp, subset: Iterable[int]) -> TargetSet:
    subset = frozenset(subset)
    good = good_end_components(p, subset)
    goal = set().union(*(g.component.states for g in good)) if good else set()
    if not subset:
        states = frozenset(p.base.states)
        _, safe = almost_sure_region(p.base, goal)
    else:
        states, safe = almost_sure_region(p.base, goal)
    logger.debug("target set for %s: %d states, %d good end components", sorted(subset), len(states), len(good))
    return TargetSet(subset, states, tuple(good), safe)


class AlmostSureController:
    """Reaches a good end component almost surely, then stays in it with uniform choices."""

    def __init__(self, target: TargetSet):
        self.target = target
        self.initial_mode = REACH_MODE
        self.owner = {}
        for j, g in enumerate(target.components):
            for s in sorted(g.component.states):
                self.owner.setdefault(s, j)

    def _component_choice(self, state: str, j: int) -> Distribution:
        actions = self.target.components[j].component.actions.get(state)
        if not actions:
            raise StrategyError(f"state {state!r} left end component {j}")
        return uniform(actions)

    def choose(self, state: str, mode: str) -> Distribution:
        if mode == REACH_MODE:
            if state in self.owner:
                return self._component_choice(state, self.owner[state])
            if state not in self.target.states or not self.target.safe_actions.get(state):
                raise StrategyError(f"state {state!r} is outside the almost-sure region for {sorted(self.target.subset)}")
            return uniform(self.target.safe_actions[state])
        return self._component_choice(state, int(mode[2:]))

    def next_modes(self, state: str, mode: str, action: str, successor: str) -> Distribution:
        if mode == REACH_MODE and state in self.owner:
            return {f'ec{self.owner[state]}': Fraction(1)}
        return {mode: Fraction(1)}
