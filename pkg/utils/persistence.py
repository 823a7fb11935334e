import json
import logging
import os
from collections import defaultdict
from decimal import Decimal
from fractions import Fraction

from engine.errors import ModelError, StrategyError
from engine.model import FiniteMemoryStrategy, InitialDistribution, MemorylessStrategy, Mdp
from utils.rationals import parse_probability, render

logger = logging.getLogger(__name__)

# Files we read and write
MODEL_SUFFIX = '.json'
STRATEGY_KINDS = ('memoryless', 'finite-memory')


def _decode(text: str, what: str):
    # decimal literals stay exact
    try:
        return json.loads(text, parse_float=Decimal)
    except json.JSONDecodeError as e:
        raise ModelError(f"{what} is not valid JSON: {e.msg}", e.lineno, e.colno) from None


def _prob(value, where: str) -> Fraction:
    try:
        return parse_probability(value)
    except ValueError as e:
        raise ModelError(f"{where}: {e}") from None


def _entries(data: dict, key: str) -> list:
    entries = data[key]
    if not isinstance(entries, list):
        raise ModelError(f"{key}: expected a list, got {type(entries).__name__}")
    for i, entry in enumerate(entries):
        if not isinstance(entry, dict):
            raise ModelError(f"{key}[{i}]: expected an object, got {type(entry).__name__}")
    return entries


def read_text(path: str) -> str:
    try:
        with open(path, 'r') as f:
            return f.read()
    except OSError as e:
        raise ModelError(f"cannot read {path}: {e.strerror}") from None


# --- MODELS ---

def parse_mdp(text: str) -> Mdp:
    """Reads the JSON model format: states with labels, actions with transitions, and init."""
    data = _decode(text, "model")
    if not isinstance(data, dict) or 'states' not in data or 'actions' not in data:
        raise ModelError("model needs 'states' and 'actions'")
    labels = {}
    for i, entry in enumerate(_entries(data, 'states')):
        name = entry.get('name')
        if not isinstance(name, str) or not name:
            raise ModelError(f"states[{i}]: missing name")
        if name in labels:
            raise ModelError(f"states[{i}]: duplicate state {name!r}")
        props = entry.get('labels', [])
        if not isinstance(props, list) or not all(isinstance(p, str) for p in props):
            raise ModelError(f"states[{i}].labels: expected a list of strings")
        labels[name] = set(props)
    transitions = {}
    for i, entry in enumerate(_entries(data, 'actions')):
        state, action = entry.get('state'), entry.get('action')
        if not isinstance(state, str):
            raise ModelError(f"actions[{i}].state: expected a state name")
        if not isinstance(action, str) or not action:
            raise ModelError(f"actions[{i}]: missing action name")
        if (state, action) in transitions:
            raise ModelError(f"actions[{i}]: action {action!r} declared twice at {state!r}")
        succs = entry.get('transitions', [])
        if not isinstance(succs, list):
            raise ModelError(f"actions[{i}].transitions: expected a list")
        dist = {}
        for j, t in enumerate(succs):
            where = f"actions[{i}].transitions[{j}]"
            if not isinstance(t, dict):
                raise ModelError(f"{where}: expected an object, got {type(t).__name__}")
            succ = t.get('to')
            if not isinstance(succ, str):
                raise ModelError(f"{where}.to: expected a state name")
            dist[succ] = dist.get(succ, 0) + _prob(t.get('prob'), where)
        transitions[(state, action)] = dist
    init = data.get('init')
    if isinstance(init, dict):
        init = InitialDistribution.of({s: _prob(p, f"init[{s!r}]") for s, p in init.items()})
    elif init is not None and not isinstance(init, str):
        raise ModelError(f"init: expected a state name or an object, got {type(init).__name__}")
    props = data.get('propositions')
    if props is not None and (not isinstance(props, list) or not all(isinstance(p, str) for p in props)):
        raise ModelError("propositions: expected a list of strings")
    return Mdp.build(labels, transitions, init, props)


def load_mdp(path: str) -> Mdp:
    m = parse_mdp(read_text(path))
    logger.info("loaded model %s: %d states, %d transitions", path, len(m.states), m.size())
    return m


def mdp_document(m: Mdp) -> dict:
    init = m.initial.weights
    return {
        'states': [{'name': s, 'labels': sorted(m.label(s))} for s in m.states],
        'actions': [{'state': s, 'action': a,
                     'transitions': [{'to': t, 'prob': render(p)} for t, p in succs]}
                    for (s, a), succs in m.transitions.items()],
        'init': next(iter(init)) if len(init) == 1 else {s: render(p) for s, p in init.items()},
        'propositions': sorted(m.propositions),
    }


def serialize_mdp(m: Mdp) -> str:
    return json.dumps(mdp_document(m), indent=4) + '\n'


def save_mdp(path: str, m: Mdp) -> None:
    with open(path, 'w') as f:
        f.write(serialize_mdp(m))


# --- STRATEGIES ---

def strategy_document(strategy) -> dict:
    if isinstance(strategy, MemorylessStrategy):
        return {
            'kind': 'memoryless',
            'choices': [{'state': s, 'action': a, 'prob': render(p)}
                        for s, d in strategy.choice.items() for a, p in d.items()],
        }
    if isinstance(strategy, FiniteMemoryStrategy):
        return {
            'kind': 'finite-memory',
            'modes': list(strategy.modes),
            'initial_mode': strategy.initial_mode,
            'choices': [{'state': s, 'mode': mode, 'action': a, 'prob': render(p)}
                        for (s, mode), d in strategy.choice.items() for a, p in d.items()],
            'updates': [{'state': s, 'mode': mode, 'action': a, 'successor': t, 'next_mode': n, 'prob': render(p)}
                        for (s, mode, a, t), d in strategy.update.items() for n, p in d.items()],
        }
    raise StrategyError(f"cannot serialize strategy of type {type(strategy).__name__}")


def serialize_strategy(strategy) -> str:
    return json.dumps(strategy_document(strategy), indent=4) + '\n'


def parse_strategy(text: str):
    data = _decode(text, "strategy")
    kind = data.get('kind') if isinstance(data, dict) else None
    if kind not in STRATEGY_KINDS:
        raise StrategyError(f"strategy kind must be one of {', '.join(STRATEGY_KINDS)}")
    try:
        if kind == 'memoryless':
            choice = defaultdict(dict)
            for i, c in enumerate(data['choices']):
                choice[c['state']][c['action']] = _prob(c['prob'], f"choices[{i}]")
            return MemorylessStrategy.of(choice)
        choice, update = defaultdict(dict), defaultdict(dict)
        for i, c in enumerate(data['choices']):
            choice[(c['state'], c['mode'])][c['action']] = _prob(c['prob'], f"choices[{i}]")
        for i, u in enumerate(data.get('updates', [])):
            key = (u['state'], u['mode'], u['action'], u['successor'])
            update[key][u['next_mode']] = _prob(u['prob'], f"updates[{i}]")
        return FiniteMemoryStrategy.of(data['modes'], data['initial_mode'], choice, update)
    except KeyError as e:
        raise StrategyError(f"strategy entry is missing field {e.args[0]!r}") from None


def load_strategy(path: str):
    return parse_strategy(read_text(path))


def save_strategy(path: str, strategy) -> None:
    with open(path, 'w') as f:
        f.write(serialize_strategy(strategy))
    logger.info("strategy written to %s", path)


# --- REPORTS ---

def save_document(path: str, data: dict) -> None:
    """Writes a result document; parent directories are created as needed."""
    folder = os.path.dirname(path)
    if folder:
        os.makedirs(folder, exist_ok=True)
    with open(path, 'w') as f:
        json.dump(data, f, indent=4)


def load_document(path: str) -> dict:
    return _decode(read_text(path), path)
