"""Qualitative multi-objective queries: properties that must hold almost surely or with positive probability."""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import networkx as nx

from .automata import ProductMdp, ProjectionController, RabinAutomaton, build_product
from .endcomponents import AlmostSureController, TargetSet, compute_target_set
from .errors import StrategyError
from .model import (FiniteMemoryStrategy, InitialDistribution, Mdp, Switch, SwitchingController,
                    materialize, uniform)
from .settings import DEFAULT_SETTINGS, EngineSettings

logger = logging.getLogger(__name__)

PHASE_ONE = 'explore'
SURE_KEY = 'sure'


@dataclass(frozen=True)
class QualitativeQuery:
    """Indices into the property list: `sure` must hold with probability 1, `positive` with probability > 0."""
    sure: frozenset[int] = frozenset()
    positive: tuple[int, ...] = ()


@dataclass
class QualitativeResult:
    satisfiable: bool
    strategy: Optional[FiniteMemoryStrategy]
    product: ProductMdp
    surviving: frozenset[str] = frozenset()
    reason: str = ''
    target_sets: dict = field(default_factory=dict)


def prune(p: ProductMdp, region: frozenset[str]) -> dict[str, tuple[str, ...]]:
    """Removes states that cannot stay able to reach `region`, and actions leading to them."""
    base = p.base
    allowed = {s: set(base.enabled(s)) for s in base.states}
    while True:
        g = base.graph(allowed)
        alive = set(region)
        for t in region:
            alive |= nx.ancestors(g, t)
        bad = set(base.states) - alive
        removed = False
        for s in base.states:
            if s in bad:
                if allowed[s]:
                    allowed[s] = set()
                    removed = True
                continue
            keep = {a for a in allowed[s] if all(t not in bad for t, _ in base.successors(s, a))}
            if keep != allowed[s]:
                allowed[s] = keep
                removed = True
        if not removed:
            break
    return {s: tuple(sorted(a)) for s, a in allowed.items() if a}


def decide_qualitative(m: Mdp, automata: Sequence[RabinAutomaton], query: QualitativeQuery,
                       initial: Optional[InitialDistribution] = None,
                       settings: EngineSettings = DEFAULT_SETTINGS) -> QualitativeResult:
    initial = initial or m.initial
    p = build_product(m, automata, initial)
    sure = frozenset(query.sure)
    positive = tuple(query.positive)

    # 1. TARGET SETS
    target_sets = {sure: compute_target_set(p, sure)}
    for i in positive:
        key = sure | {i}
        if key not in target_sets:
            target_sets[key] = compute_target_set(p, key)

    # 2. PRUNING
    if sure:
        allowed = prune(p, target_sets[sure].states)
    else:
        allowed = {s: p.base.enabled(s) for s in p.base.states}
    if p.init_state not in allowed:
        return QualitativeResult(False, None, p, frozenset(), "the required properties cannot be met almost surely",
                                 target_sets)
    g = p.base.graph(allowed)
    surviving = frozenset({p.init_state} | nx.descendants(g, p.init_state))
    for i in positive:
        if not surviving & target_sets[sure | {i}].states:
            return QualitativeResult(False, None, p, surviving,
                                     f"property {i} cannot be satisfied with positive probability "
                                     "together with the almost-sure ones", target_sets)

    # 3. STRATEGY
    subs = {}
    if sure:
        subs[SURE_KEY] = AlmostSureController(target_sets[sure])
    for i in positive:
        subs[f'pos{i}'] = AlmostSureController(target_sets[sure | {i}])
    # split evenly over the switches offered at a state
    switch_mass = settings.switch_probability

    def branches(state):
        options = []
        if sure and state in target_sets[sure].states:
            options.append(Switch(SURE_KEY))
        for i in positive:
            if state in target_sets[sure | {i}].states:
                options.append(Switch(f'pos{i}'))
        stay = Fraction(1) - switch_mass if options else Fraction(1)
        result = [(w * stay, a) for a, w in uniform(allowed[state]).items()]
        result += [(switch_mass / len(options), o) for o in options]
        return result

    controller = SwitchingController(PHASE_ONE, branches, subs)
    strategy = materialize(m, ProjectionController(p, controller), initial)
    logger.info("qualitative query satisfiable: %d surviving product states, %d memory modes",
                len(surviving), len(strategy.modes))
    return QualitativeResult(True, strategy, p, surviving, '', target_sets)


def mu_strategy(p: ProductMdp, target: TargetSet, start: Optional[InitialDistribution] = None) -> FiniteMemoryStrategy:
    """Tabulated almost-sure strategy for a target set, over product states."""
    start = start or p.base.initial
    missing = [s for s in start.support if s not in target.states]
    if missing:
        raise StrategyError(f"start state {missing[0]!r} lies outside the target set")
    return materialize(p.base, AlmostSureController(target), start)
