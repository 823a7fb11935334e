import logging
from collections import defaultdict, deque
from dataclasses import dataclass, field
from fractions import Fraction
from types import MappingProxyType
from typing import Mapping, Optional, Protocol

import networkx as nx

from .errors import ModelError, StrategyError

logger = logging.getLogger(__name__)

Distribution = Mapping[str, Fraction]

DEAD_LABEL = 'dead'
SINK_ACTION = 'loop'


def _freeze(mapping: dict) -> Mapping:
    return MappingProxyType(dict(mapping))


def check_distribution(dist: Mapping[str, Fraction], what: str) -> None:
    """Positive entries summing to exactly 1."""
    if not dist:
        raise ModelError(f"{what}: empty distribution")
    for key, p in dist.items():
        if not isinstance(p, Fraction) and not isinstance(p, int):
            raise ModelError(f"{what}: probability of {key!r} is not exact ({p!r})")
        if p <= 0 or p > 1:
            raise ModelError(f"{what}: probability of {key!r} outside (0, 1] ({p})")
    total = sum(dist.values(), Fraction(0))
    if total != 1:
        raise ModelError(f"{what}: probabilities do not sum to 1 ({total})")


def uniform(items) -> dict[str, Fraction]:
    items = sorted(items)
    return {item: Fraction(1, len(items)) for item in items}


# --- MODEL ---

@dataclass(frozen=True)
class InitialDistribution:
    weights: Mapping[str, Fraction]

    @staticmethod
    def point(state: str) -> 'InitialDistribution':
        return InitialDistribution(_freeze({state: Fraction(1)}))

    @staticmethod
    def of(weights: Mapping[str, Fraction]) -> 'InitialDistribution':
        clean = {s: Fraction(p) for s, p in weights.items() if p != 0}
        check_distribution(clean, "initial distribution")
        return InitialDistribution(_freeze(dict(sorted(clean.items()))))

    @property
    def support(self) -> tuple[str, ...]:
        return tuple(sorted(self.weights))

    def items(self):
        return self.weights.items()


@dataclass(frozen=True)
class Mdp:
    """Finite labelled MDP with exact probabilities.

    Successor lists are stored as (successor, probability) pairs, sorted by
    successor. States and actions are kept in lexicographic order.
    """
    states: tuple[str, ...]
    actions: Mapping[str, tuple[str, ...]]
    transitions: Mapping[tuple[str, str], tuple[tuple[str, Fraction], ...]]
    labels: Mapping[str, frozenset[str]]
    propositions: frozenset[str]
    initial: InitialDistribution

    @staticmethod
    def build(labels: Mapping[str, set],
              transitions: Mapping[tuple[str, str], Mapping[str, Fraction]],
              initial=None,
              propositions=None) -> 'Mdp':
        """Validates every structural invariant and returns the canonical Mdp."""
        states = tuple(sorted(labels))
        if not states:
            raise ModelError("model has no states")
        declared = set(states)
        props = set(propositions) if propositions is not None else set()
        for state, labs in labels.items():
            props.update(labs)

        enabled = defaultdict(set)
        table = {}
        for (state, action), succs in transitions.items():
            if state not in declared:
                raise ModelError(f"transition from undeclared state {state!r}")
            for succ in succs:
                if succ not in declared:
                    raise ModelError(f"state {state!r}, action {action!r}: successor {succ!r} is not a declared state")
            dist = {s: Fraction(p) for s, p in succs.items()}
            check_distribution(dist, f"state {state!r}, action {action!r}")
            enabled[state].add(action)
            table[(state, action)] = tuple(sorted(dist.items()))

        missing = [s for s in states if not enabled[s]]
        if missing:
            raise ModelError(f"state {missing[0]!r} has no enabled action")

        if initial is None:
            initial = InitialDistribution.point(states[0])
        elif isinstance(initial, str):
            initial = InitialDistribution.point(initial)
        elif not isinstance(initial, InitialDistribution):
            initial = InitialDistribution.of(initial)
        for s in initial.weights:
            if s not in declared:
                raise ModelError(f"initial distribution names undeclared state {s!r}")

        return Mdp(
            states=states,
            actions=_freeze({s: tuple(sorted(enabled[s])) for s in states}),
            transitions=_freeze(dict(sorted(table.items()))),
            labels=_freeze({s: frozenset(labels[s]) for s in states}),
            propositions=frozenset(props),
            initial=initial,
        )

    # --- QUERIES ---

    def enabled(self, state: str) -> tuple[str, ...]:
        return self.actions[state]

    def successors(self, state: str, action: str) -> tuple[tuple[str, Fraction], ...]:
        try:
            return self.transitions[(state, action)]
        except KeyError:
            raise StrategyError(f"action {action!r} is not enabled at state {state!r}") from None

    def label(self, state: str) -> frozenset[str]:
        return self.labels[state]

    def states_with_label(self, prop: str) -> frozenset[str]:
        return frozenset(s for s in self.states if prop in self.labels[s])

    def is_absorbing(self, state: str) -> bool:
        return all(self.transitions[(state, a)] == ((state, Fraction(1)),) for a in self.actions[state])

    def graph(self, allowed: Optional[Mapping[str, set]] = None) -> nx.DiGraph:
        """Support graph, optionally restricted to the allowed actions per state."""
        g = nx.DiGraph()
        g.add_nodes_from(self.states)
        for (state, action), succs in self.transitions.items():
            if allowed is not None and action not in allowed.get(state, ()):
                continue
            g.add_edges_from((state, succ) for succ, _ in succs)
        return g

    def can_reach(self, targets) -> set[str]:
        g = self.graph()
        found = set(targets)
        for t in targets:
            found |= nx.ancestors(g, t)
        return found

    def reachable_from(self, sources) -> set[str]:
        g = self.graph()
        found = set(sources)
        for s in sources:
            found |= nx.descendants(g, s)
        return found

    def size(self) -> int:
        return sum(len(succs) for succs in self.transitions.values())

    def with_sink(self, sink: Optional[str] = None) -> tuple['Mdp', str]:
        """Adds an absorbing sink labelled "dead", reusing one if it exists."""
        for s in self.states:
            if DEAD_LABEL in self.labels[s] and self.is_absorbing(s):
                return self, s
        name = sink or DEAD_LABEL
        while name in self.labels:
            name += "'"
        labels = {s: set(self.labels[s]) for s in self.states}
        labels[name] = {DEAD_LABEL}
        trans = {key: dict(succs) for key, succs in self.transitions.items()}
        trans[(name, SINK_ACTION)] = {name: Fraction(1)}
        return Mdp.build(labels, trans, self.initial, self.propositions), name


# --- STRATEGIES ---

class Controller(Protocol):
    """Anything that can steer an MDP: a mode-indexed action choice plus a mode update."""
    initial_mode: str

    def choose(self, state: str, mode: str) -> Distribution: ...

    def next_modes(self, state: str, mode: str, action: str, successor: str) -> Distribution: ...


@dataclass(frozen=True)
class MemorylessStrategy:
    choice: Mapping[str, Distribution]
    initial_mode: str = field(default='m', init=False)

    @staticmethod
    def of(choice: Mapping[str, Mapping[str, Fraction]]) -> 'MemorylessStrategy':
        clean = {}
        for state, dist in choice.items():
            d = {a: Fraction(p) for a, p in dist.items() if p != 0}
            check_distribution(d, f"strategy at state {state!r}")
            clean[state] = _freeze(dict(sorted(d.items())))
        return MemorylessStrategy(_freeze(dict(sorted(clean.items()))))

    @staticmethod
    def pure(assignment: Mapping[str, str]) -> 'MemorylessStrategy':
        return MemorylessStrategy.of({s: {a: Fraction(1)} for s, a in assignment.items()})

    def choose(self, state: str, mode: str = 'm') -> Distribution:
        try:
            return self.choice[state]
        except KeyError:
            raise StrategyError(f"strategy has no choice at state {state!r}") from None

    def next_modes(self, state, mode, action, successor) -> Distribution:
        return {mode: Fraction(1)}

    @property
    def is_pure(self) -> bool:
        return all(len(d) == 1 for d in self.choice.values())

    def validate(self, m: Mdp) -> None:
        for state, dist in self.choice.items():
            if state not in m.actions:
                raise StrategyError(f"strategy references unknown state {state!r}")
            for action in dist:
                if action not in m.actions[state]:
                    raise StrategyError(f"strategy plays {action!r} at {state!r}, which is not enabled there")

    def completed(self, m: Mdp) -> 'MemorylessStrategy':
        """Restricted to m's states, with the lexicographically least action where no choice is given."""
        choice = {s: self.choice[s] if s in self.choice else {m.actions[s][0]: Fraction(1)} for s in m.states}
        result = MemorylessStrategy.of(choice)
        result.validate(m)
        return result

    def as_finite_memory(self) -> 'FiniteMemoryStrategy':
        return FiniteMemoryStrategy.of(
            modes=('m',), initial_mode='m',
            choice={(s, 'm'): d for s, d in self.choice.items()},
            update={},
        )


def default_strategy(m: Mdp) -> MemorylessStrategy:
    return MemorylessStrategy.pure({s: m.actions[s][0] for s in m.states})


@dataclass(frozen=True)
class FiniteMemoryStrategy:
    """Explicit mode tables.

    `update` entries that are missing mean "keep the current mode".
    """
    modes: tuple[str, ...]
    initial_mode: str
    choice: Mapping[tuple[str, str], Distribution]
    update: Mapping[tuple[str, str, str, str], Distribution]

    @staticmethod
    def of(modes, initial_mode: str, choice, update) -> 'FiniteMemoryStrategy':
        modes = tuple(sorted(set(modes)))
        if not modes:
            raise StrategyError("a finite-memory strategy needs at least one mode")
        if initial_mode not in modes:
            raise StrategyError(f"initial mode {initial_mode!r} is not a declared mode")
        known = set(modes)
        clean_choice = {}
        for key, dist in choice.items():
            d = {a: Fraction(p) for a, p in dist.items() if p != 0}
            check_distribution(d, f"choice at {key}")
            if key[1] not in known:
                raise StrategyError(f"choice uses undeclared mode {key[1]!r}")
            clean_choice[key] = _freeze(dict(sorted(d.items())))
        clean_update = {}
        for key, dist in update.items():
            d = {n: Fraction(p) for n, p in dist.items() if p != 0}
            check_distribution(d, f"mode update at {key}")
            unknown = [n for n in d if n not in known]
            if unknown or key[1] not in known:
                raise StrategyError(f"mode update at {key} uses undeclared mode")
            clean_update[key] = _freeze(dict(sorted(d.items())))
        return FiniteMemoryStrategy(modes, initial_mode,
                                    _freeze(dict(sorted(clean_choice.items()))),
                                    _freeze(dict(sorted(clean_update.items()))))

    def choose(self, state: str, mode: str) -> Distribution:
        try:
            return self.choice[(state, mode)]
        except KeyError:
            raise StrategyError(f"strategy has no choice at state {state!r} in mode {mode!r}") from None

    def next_modes(self, state: str, mode: str, action: str, successor: str) -> Distribution:
        return self.update.get((state, mode, action, successor), {mode: Fraction(1)})

    def validate(self, m: Mdp) -> None:
        for (state, mode), dist in self.choice.items():
            if state not in m.actions:
                raise StrategyError(f"strategy references unknown state {state!r}")
            for action in dist:
                if action not in m.actions[state]:
                    raise StrategyError(f"strategy plays {action!r} at {state!r}, which is not enabled there")

    def as_finite_memory(self) -> 'FiniteMemoryStrategy':
        return self


def materialize(m: Mdp, controller: Controller,
                initial: Optional[InitialDistribution] = None) -> FiniteMemoryStrategy:
    """Tabulates a controller over the (state, mode) pairs reachable from the initial distribution."""
    initial = initial or m.initial
    start = controller.initial_mode
    choice, update = {}, {}
    seen = {(s, start) for s in initial.support}
    queue = deque(sorted(seen))
    while queue:
        state, mode = queue.popleft()
        dist = {a: p for a, p in controller.choose(state, mode).items() if p != 0}
        choice[(state, mode)] = dist
        for action in sorted(dist):
            for succ, _ in m.successors(state, action):
                nxt = {n: q for n, q in controller.next_modes(state, mode, action, succ).items() if q != 0}
                if nxt != {mode: 1}:
                    update[(state, mode, action, succ)] = nxt
                for n in sorted(nxt):
                    if (succ, n) not in seen:
                        seen.add((succ, n))
                        queue.append((succ, n))
    modes = {mode for _, mode in seen} | {start}
    logger.debug("materialized strategy: %d state/mode pairs, %d modes", len(seen), len(modes))
    strategy = FiniteMemoryStrategy.of(modes, start, choice, update)
    strategy.validate(m)
    return strategy


# --- COMPOSITION ---

@dataclass(frozen=True)
class Switch:
    """Hands control to the sub-controller registered under `key`."""
    key: str


MODE_SEP = '/'


class SwitchingController:
    """Plays from a home mode and may hand over to sub-controllers at the current state.

    `branches(state)` returns weighted alternatives: an action name (stay home)
    or a Switch. A switch at a state is folded into the action choice at that
    same state, and the next-mode distribution is the posterior over branches
    given the action actually taken.
    """

    def __init__(self, home_mode: str, branches, subs: Mapping[str, Controller]):
        if MODE_SEP in home_mode:
            raise StrategyError(f"home mode {home_mode!r} may not contain {MODE_SEP!r}")
        self.initial_mode = home_mode
        self.branches = branches
        self.subs = dict(subs)

    def _split(self, mode: str) -> tuple[str, str]:
        key, _, inner = mode.partition(MODE_SEP)
        if key not in self.subs:
            raise StrategyError(f"unknown mode {mode!r}")
        return key, inner

    def choose(self, state: str, mode: str) -> Distribution:
        if mode != self.initial_mode:
            key, inner = self._split(mode)
            return self.subs[key].choose(state, inner)
        dist = defaultdict(Fraction)
        for weight, target in self.branches(state):
            if isinstance(target, Switch):
                sub = self.subs[target.key]
                for action, p in sub.choose(state, sub.initial_mode).items():
                    dist[action] += weight * p
            else:
                dist[target] += weight
        return {a: p for a, p in dist.items() if p != 0}

    def next_modes(self, state: str, mode: str, action: str, successor: str) -> Distribution:
        if mode != self.initial_mode:
            key, inner = self._split(mode)
            nxt = self.subs[key].next_modes(state, inner, action, successor)
            return {f"{key}{MODE_SEP}{n}": q for n, q in nxt.items()}
        joint = defaultdict(Fraction)
        for weight, target in self.branches(state):
            if isinstance(target, Switch):
                sub = self.subs[target.key]
                pa = weight * sub.choose(state, sub.initial_mode).get(action, 0)
                if pa:
                    for n, q in sub.next_modes(state, sub.initial_mode, action, successor).items():
                        joint[f"{target.key}{MODE_SEP}{n}"] += pa * q
            elif target == action:
                joint[self.initial_mode] += weight
        total = sum(joint.values(), Fraction(0))
        if total == 0:
            raise StrategyError(f"action {action!r} has no weight at {state!r}")
        return {n: q / total for n, q in joint.items() if q != 0}
