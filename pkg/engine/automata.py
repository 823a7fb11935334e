import itertools
import logging
from collections import defaultdict, deque
from dataclasses import dataclass
from fractions import Fraction
from types import MappingProxyType
from typing import Mapping, Optional, Sequence

from .errors import AutomatonError, StrategyError
from .model import Controller, Distribution, InitialDistribution, Mdp

logger = logging.getLogger(__name__)

INIT_STATE = '<init>'
INIT_ACTION = '<init>'
START_MODE = 'start'


def valuations(propositions: Sequence[str]) -> list[frozenset[str]]:
    """All subsets of the propositions, smallest first."""
    props = list(propositions)
    result = []
    for bits in itertools.product((0, 1), repeat=len(props)):
        result.append(frozenset(p for p, b in zip(props, bits) if b))
    return result


@dataclass(frozen=True)
class RabinPair:
    avoid: frozenset[str]
    repeat: frozenset[str]


@dataclass(frozen=True)
class RabinAutomaton:
    """Deterministic, complete Rabin automaton over valuations of its propositions."""
    states: tuple[str, ...]
    initial: str
    propositions: tuple[str, ...]
    delta: Mapping[tuple[str, frozenset[str]], str]
    pairs: tuple[RabinPair, ...]
    name: str = ''

    @staticmethod
    def build(states, initial, propositions, delta, pairs, name='') -> 'RabinAutomaton':
        states = tuple(states)
        known = set(states)
        if len(known) != len(states):
            raise AutomatonError("duplicate automaton state")
        if initial not in known:
            raise AutomatonError(f"initial state {initial!r} is not an automaton state")
        for q in states:
            if ',' in q or '|' in q or ';' in q:
                raise AutomatonError(f"automaton state name {q!r} may not contain ',', '|' or ';'")
        props = tuple(propositions)
        table = {}
        for q in states:
            for val in valuations(props):
                if (q, val) not in delta:
                    raise AutomatonError(f"transition function is not total: state {q!r} has no move on {sorted(val)}")
                target = delta[(q, val)]
                if target not in known:
                    raise AutomatonError(f"transition from {q!r} targets unknown state {target!r}")
                table[(q, val)] = target
        if not pairs:
            raise AutomatonError("automaton has no acceptance pair and accepts no word")
        for pair in pairs:
            if not (pair.avoid | pair.repeat) <= known:
                raise AutomatonError("acceptance pair names unknown states")
        return RabinAutomaton(states, initial, props, MappingProxyType(table), tuple(pairs), name)

    def step(self, q: str, labels) -> str:
        return self.delta[(q, frozenset(labels).intersection(self.propositions))]

    def accepts_cycle(self, visited) -> bool:
        """Whether a run whose infinitely-often states are `visited` is accepting."""
        visited = set(visited)
        return any(not (visited & p.avoid) and (visited & p.repeat) for p in self.pairs)

    def check_alphabet(self, m: Mdp) -> None:
        unknown = sorted(set(self.propositions) - m.propositions)
        if unknown:
            raise AutomatonError(f"automaton {self.name or '?'} uses propositions {unknown} unknown to the model")


def _monitor(label: str, name: str, hit_state: str, pairs_for) -> RabinAutomaton:
    delta = {}
    for val in valuations((label,)):
        delta[('wait', val)] = hit_state if label in val else 'wait'
        delta[('done', val)] = 'done'
    return RabinAutomaton.build(('wait', 'done'), 'wait', (label,), delta, pairs_for, name)


def reach_automaton(label: str) -> RabinAutomaton:
    """Eventually `label`."""
    return _monitor(label, f'reach {label}', 'done', (RabinPair(frozenset(), frozenset({'done'})),))


def avoid_automaton(label: str) -> RabinAutomaton:
    """Never `label`."""
    return _monitor(label, f'avoid {label}', 'done', (RabinPair(frozenset({'done'}), frozenset({'wait'})),))


def _recurrence(label: str, name: str, pair: RabinPair) -> RabinAutomaton:
    delta = {}
    for q in ('off', 'on'):
        for val in valuations((label,)):
            delta[(q, val)] = 'on' if label in val else 'off'
    return RabinAutomaton.build(('off', 'on'), 'off', (label,), delta, (pair,), name)


def buchi_automaton(label: str) -> RabinAutomaton:
    """Infinitely often `label`."""
    return _recurrence(label, f'infinitely {label}', RabinPair(frozenset(), frozenset({'on'})))


def cobuchi_automaton(label: str) -> RabinAutomaton:
    """Only finitely often `label`."""
    return _recurrence(label, f'finitely {label}', RabinPair(frozenset({'on'}), frozenset({'off'})))


BUILTINS = {
    'reach': reach_automaton,
    'avoid': avoid_automaton,
    'infinitely': buchi_automaton,
    'finitely': cobuchi_automaton,
}


# --- PRODUCT ---

def product_name(state: str, qs: tuple[str, ...]) -> str:
    return '(' + ';'.join((state,) + tuple(qs)) + ')'


@dataclass(frozen=True)
class ProductMdp:
    """M x A1 x ... x Am with a dummy initial state.

    The dummy state has a single action whose successors follow the source
    initial distribution; automata read the label of each entered state.
    """
    base: Mdp
    source: Mdp
    automata: tuple[RabinAutomaton, ...]
    origin: Mapping[str, tuple[str, tuple[str, ...]]]
    index: Mapping[tuple[str, tuple[str, ...]], str]
    init_state: str = INIT_STATE
    init_action: str = INIT_ACTION

    def automaton_state(self, p: str, i: int) -> str:
        return self.origin[p][1][i]

    def source_state(self, p: str) -> str:
        return self.origin[p][0]

    def entry_state(self, x: str) -> str:
        qs = tuple(a.step(a.initial, self.source.label(x)) for a in self.automata)
        return self.index[(x, qs)]

    def step(self, p: str, succ: str) -> str:
        _, qs = self.origin[p]
        nxt = tuple(a.step(q, self.source.label(succ)) for a, q in zip(self.automata, qs))
        try:
            return self.index[(succ, nxt)]
        except KeyError:
            raise StrategyError(f"product state for {succ!r} after {p!r} was never built") from None


def build_product(m: Mdp, automata: Sequence[RabinAutomaton],
                  initial: Optional[InitialDistribution] = None) -> ProductMdp:
    initial = initial or m.initial
    automata = tuple(automata)
    for a in automata:
        a.check_alphabet(m)
    if INIT_STATE in m.labels:
        raise AutomatonError(f"model already uses the reserved state name {INIT_STATE!r}")

    origin, index = {}, {}
    labels, trans = {INIT_STATE: set()}, {}

    def intern(x, qs):
        key = (x, qs)
        if key not in index:
            name = product_name(x, qs)
            index[key] = name
            origin[name] = key
            labels[name] = set(m.label(x))
            queue.append(key)
        return index[key]

    queue = deque()
    entry = {}
    for x, p in initial.items():
        qs = tuple(a.step(a.initial, m.label(x)) for a in automata)
        name = intern(x, qs)
        entry[name] = entry.get(name, 0) + p
    trans[(INIT_STATE, INIT_ACTION)] = entry
    while queue:
        x, qs = queue.popleft()
        name = index[(x, qs)]
        for action in m.enabled(x):
            dist = {}
            for succ, p in m.successors(x, action):
                nxt = tuple(a.step(q, m.label(succ)) for a, q in zip(automata, qs))
                target = intern(succ, nxt)
                dist[target] = dist.get(target, 0) + p
            trans[(name, action)] = dist

    base = Mdp.build(labels, trans, INIT_STATE, m.propositions)
    origin[INIT_STATE] = (None, tuple(a.initial for a in automata))
    logger.debug("product with %d automata: %d states", len(automata), len(base.states))
    return ProductMdp(base, m, automata, MappingProxyType(origin), MappingProxyType(index))


class ProjectionController:
    """Plays a controller of the product MDP on the source MDP.

    Modes are "start" or "q1,...,qm|inner". The start mode folds the dummy
    step of the product into the first real decision.
    """

    def __init__(self, product: ProductMdp, inner: Controller):
        self.product = product
        self.inner = inner
        self.initial_mode = START_MODE

    def _encode(self, p: str, inner_mode: str) -> str:
        return ','.join(self.product.origin[p][1]) + '|' + inner_mode

    def _decode(self, x: str, mode: str) -> tuple[str, str]:
        head, sep, inner_mode = mode.partition('|')
        if not sep:
            raise StrategyError(f"unknown mode {mode!r}")
        qs = tuple(head.split(',')) if self.product.automata else ()
        try:
            return self.product.index[(x, qs)], inner_mode
        except KeyError:
            raise StrategyError(f"mode {mode!r} does not match a product state at {x!r}") from None

    def _entry_modes(self, x: str) -> tuple[str, Distribution]:
        p1 = self.product.entry_state(x)
        inner = self.inner
        nxt = inner.next_modes(self.product.init_state, inner.initial_mode, self.product.init_action, p1)
        return p1, nxt

    def choose(self, x: str, mode: str) -> Distribution:
        if mode == START_MODE:
            p1, modes = self._entry_modes(x)
            dist = defaultdict(Fraction)
            for n, w in modes.items():
                for a, q in self.inner.choose(p1, n).items():
                    dist[a] += w * q
            return dict(dist)
        p, inner_mode = self._decode(x, mode)
        return self.inner.choose(p, inner_mode)

    def next_modes(self, x: str, mode: str, action: str, succ: str) -> Distribution:
        if mode == START_MODE:
            p, modes = self._entry_modes(x)
            weights = {n: w * self.inner.choose(p, n).get(action, 0) for n, w in modes.items()}
        else:
            p, inner_mode = self._decode(x, mode)
            weights = {inner_mode: Fraction(1)}
        total = sum(weights.values(), Fraction(0))
        if total == 0:
            raise StrategyError(f"action {action!r} is never played at {x!r} in mode {mode!r}")
        p_next = self.product.step(p, succ)
        result = defaultdict(Fraction)
        for n, w in weights.items():
            if w == 0:
                continue
            for n2, q in self.inner.next_modes(p, n, action, p_next).items():
                result[self._encode(p_next, n2)] += (w / total) * q
        return dict(result)
