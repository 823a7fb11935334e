"""Cleanup of states that cannot reach a target, and the reduction of ω-regular objectives to reachability."""
import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional, Sequence

from .automata import ProductMdp, ProjectionController, RabinAutomaton, build_product, reach_automaton
from .endcomponents import AlmostSureController, TargetSet, compute_target_set
from .errors import LimitExceeded, ModelError, StrategyError
from .lp import LpModel, build_multiobj_lp
from .model import (DEAD_LABEL, SINK_ACTION, FiniteMemoryStrategy, InitialDistribution, MemorylessStrategy, Mdp,
                    Switch, SwitchingController, materialize)
from .settings import DEFAULT_SETTINGS, EngineSettings

logger = logging.getLogger(__name__)

FOLLOW_MODE = 'follow'
GOAL_PREFIX = '<goal:'


# --- CLEANUP ---

@dataclass(frozen=True)
class CleanupReport:
    removed_states: frozenset[str]
    kept_mdp: Mdp
    sink: Optional[str]
    lost_mass: Fraction = Fraction(0)

    @property
    def all_initial_mass_lost(self) -> bool:
        return self.lost_mass == 1


def find_sink(m: Mdp, targets=frozenset()) -> Optional[str]:
    for s in m.states:
        if s not in targets and DEAD_LABEL in m.label(s) and m.is_absorbing(s):
            return s
    return None


def clean_up(m: Mdp, targets, initial: Optional[InitialDistribution] = None) -> CleanupReport:
    """Merges every state that cannot reach `targets` into one absorbing "dead" sink."""
    targets = frozenset(targets)
    initial = initial or m.initial
    sink = find_sink(m, targets)
    reaching = m.can_reach(targets)
    bad = frozenset(s for s in m.states if s not in reaching and s != sink)
    if not bad:
        return CleanupReport(frozenset(), m, sink)

    if sink is None:
        sink = DEAD_LABEL
        while sink in m.labels:
            sink += "'"
    keep = [s for s in m.states if s not in bad and s != sink]
    labels = {s: set(m.label(s)) for s in keep}
    labels[sink] = {DEAD_LABEL}
    trans = {}
    for s in keep:
        for a in m.enabled(s):
            dist = {}
            for succ, p in m.successors(s, a):
                target = sink if succ in bad else succ
                dist[target] = dist.get(target, 0) + p
            trans[(s, a)] = dist
    trans[(sink, SINK_ACTION)] = {sink: Fraction(1)}
    weights = {}
    for s, p in initial.items():
        target = sink if s in bad else s
        weights[target] = weights.get(target, 0) + p
    lost = sum((p for s, p in initial.items() if s in bad or s == sink), Fraction(0))
    kept = Mdp.build(labels, trans, InitialDistribution.of(weights), m.propositions | {DEAD_LABEL})
    if lost == 1:
        logger.warning("no initial state can reach a target; all initial mass ends in the sink")
    logger.info("cleanup removed %d states into sink %s", len(bad), sink)
    return CleanupReport(bad, kept, sink, lost)


# --- REDUCTION ---

def goal_state(subset) -> str:
    return GOAL_PREFIX + ','.join(str(i) for i in sorted(subset)) + '>'


def goal_action(subset) -> str:
    return 'goal' + ''.join(f'[{i}]' for i in sorted(subset))


def nonempty_subsets(indices) -> list[frozenset[int]]:
    indices = sorted(indices)
    return [frozenset(c) for r in range(1, len(indices) + 1) for c in itertools.combinations(indices, r)]


def compute_target_sets(p: ProductMdp, indices: Sequence[int],
                        settings: EngineSettings = DEFAULT_SETTINGS) -> dict[frozenset[int], TargetSet]:
    if len(indices) > settings.subset_cap:
        raise LimitExceeded(f"{len(indices)} properties exceed the subset cap of {settings.subset_cap}")
    return {r: compute_target_set(p, r) for r in nonempty_subsets(indices)}


@dataclass(frozen=True)
class ReducedMdp:
    """Product MDP extended with absorbing goal states s_R and goal actions."""
    base: Mdp
    product: ProductMdp
    targets: tuple[frozenset[str], ...]
    lift_table: Mapping[tuple[str, str], frozenset[int]]
    target_sets: Mapping[frozenset[int], TargetSet]


def build_reduction(p: ProductMdp, target_sets: Mapping[frozenset[int], TargetSet],
                    settings: EngineSettings = DEFAULT_SETTINGS) -> ReducedMdp:
    """Adds goal action γ_R at u exactly when R is a maximal subset with u in T_R."""
    k = len(p.automata)
    if k > settings.subset_cap:
        raise LimitExceeded(f"{k} properties exceed the subset cap of {settings.subset_cap}")
    labels = {s: set(p.base.label(s)) for s in p.base.states}
    trans = {key: dict(succs) for key, succs in p.base.transitions.items()}
    lift_table = {}
    used = set()
    for u in p.base.states:
        if u == p.init_state:
            continue
        member = [r for r, t in target_sets.items() if u in t.states]
        maximal = [r for r in member if not any(r < other for other in member)]
        for r in sorted(maximal, key=sorted):
            action = goal_action(r)
            trans[(u, action)] = {goal_state(r): Fraction(1)}
            lift_table[(u, action)] = r
            used.add(r)
    for r in used:
        name = goal_state(r)
        if name in labels:
            raise ModelError(f"model already uses the reserved state name {name!r}")
        labels[name] = set()
        trans[(name, SINK_ACTION)] = {name: Fraction(1)}
    base = Mdp.build(labels, trans, p.base.initial, p.base.propositions)
    targets = tuple(frozenset(goal_state(r) for r in used if i in r) for i in range(k))
    logger.info("reduction: %d goal states, %d goal actions", len(used), len(lift_table))
    return ReducedMdp(base, p, targets, lift_table, target_sets)


def _sub_key(subset) -> str:
    return 'R' + '.'.join(str(i) for i in sorted(subset))


def lift_controller(red: ReducedMdp, sigma: MemorylessStrategy) -> SwitchingController:
    """Follows sigma on the product and hands over to the almost-sure controller on γ_R."""
    subs = {}
    for r in set(red.lift_table.values()):
        subs[_sub_key(r)] = AlmostSureController(red.target_sets[r])
    base = red.base
    choice = {}
    for s in red.product.base.states:
        if s in sigma.choice:
            for a in sigma.choice[s]:
                if a not in base.enabled(s):
                    raise StrategyError(f"sigma plays {a!r} at {s!r}, which the reduced MDP does not offer")
            choice[s] = sigma.choice[s]
        else:
            choice[s] = {base.enabled(s)[0]: Fraction(1)}

    def branches(state):
        result = []
        for a, w in choice[state].items():
            r = red.lift_table.get((state, a))
            result.append((w, Switch(_sub_key(r)) if r is not None else a))
        return result

    return SwitchingController(FOLLOW_MODE, branches, subs)


def lift_strategy(red: ReducedMdp, sigma: MemorylessStrategy,
                  initial: Optional[InitialDistribution] = None) -> FiniteMemoryStrategy:
    """Finite-memory strategy on the source MDP that matches sigma's goal probabilities."""
    controller = ProjectionController(red.product, lift_controller(red, sigma))
    return materialize(red.product.source, controller, initial)


# --- PIPELINE ---

@dataclass(frozen=True)
class ReachabilityInstance:
    """Everything needed to answer multi-objective questions for one property list."""
    source: Mdp
    initial: InitialDistribution
    model: LpModel
    cleanup: CleanupReport
    reduced: Optional[ReducedMdp] = None

    def lift(self, sigma: MemorylessStrategy):
        if self.reduced is None:
            return sigma.completed(self.source)
        return lift_strategy(self.reduced, sigma, self.initial)


def _lp_alpha(cleanup: CleanupReport, start: Mapping[str, Fraction]) -> dict[str, Fraction]:
    kept = cleanup.kept_mdp
    alpha = {}
    for s, p in start.items():
        target = cleanup.sink if s in cleanup.removed_states else s
        if target is not None and target != cleanup.sink and target in kept.labels:
            alpha[target] = alpha.get(target, 0) + p
    return alpha


def reduce_properties(m: Mdp, automata: Sequence[RabinAutomaton], names: Optional[Sequence[str]] = None,
                      initial: Optional[InitialDistribution] = None,
                      settings: EngineSettings = DEFAULT_SETTINGS) -> ReachabilityInstance:
    initial = initial or m.initial
    p = build_product(m, automata, initial)
    sets = compute_target_sets(p, range(len(automata)), settings)
    red = build_reduction(p, sets, settings)
    final = frozenset().union(*red.targets) if red.targets else frozenset()
    cleanup = clean_up(red.base, final, red.base.initial)
    start = dict(red.base.successors(p.init_state, p.init_action))
    if p.init_state in cleanup.removed_states:
        alpha = {}
    else:
        alpha = _lp_alpha(cleanup, start)
    model = build_multiobj_lp(cleanup.kept_mdp, alpha, red.targets, cleanup.sink, names)
    return ReachabilityInstance(m, initial, model, cleanup, red)


def reachability_instance(m: Mdp, labels: Sequence[str], names: Optional[Sequence[str]] = None,
                          initial: Optional[InitialDistribution] = None,
                          settings: EngineSettings = DEFAULT_SETTINGS) -> ReachabilityInstance:
    """Reachability of labelled states. Absorbing targets go straight to the LP; otherwise through the reduction."""
    initial = initial or m.initial
    names = tuple(names) if names else tuple(labels)
    targets = [m.states_with_label(label) for label in labels]
    final = frozenset().union(*targets) if targets else frozenset()
    direct = all(m.is_absorbing(s) for s in final) and not (set(initial.support) & final)
    if not direct:
        logger.info("targets are not absorbing; using the product reduction")
        return reduce_properties(m, [reach_automaton(label) for label in labels], names, initial, settings)
    cleanup = clean_up(m, final, initial)
    alpha = _lp_alpha(cleanup, dict(initial.weights))
    model = build_multiobj_lp(cleanup.kept_mdp, alpha, targets, cleanup.sink, names)
    return ReachabilityInstance(m, initial, model, cleanup)
