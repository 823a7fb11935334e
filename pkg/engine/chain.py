"""Exact analysis of the finite Markov chain a strategy induces on an MDP."""
import logging
from collections import defaultdict, deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable, Mapping, Optional

import networkx as nx

from .errors import SolverError, StrategyError
from .model import InitialDistribution, Mdp

logger = logging.getLogger(__name__)

ChainState = tuple[str, str]


# --- LINEAR ALGEBRA ---

def solve_sparse(rows: Mapping[Hashable, dict], rhs: Mapping[Hashable, Fraction]) -> dict:
    """Exact Gauss-Jordan elimination over sparse rows {unknown: coefficient}.

    Unknowns are eliminated in sorted order. A singular system raises SolverError.
    """
    order = sorted(rows)
    work = {u: (dict(rows[u]), Fraction(rhs.get(u, 0))) for u in order}
    pivots = []
    remaining = list(order)
    for unknown in order:
        pivot_row = None
        for r in remaining:
            if work[r][0].get(unknown, 0) != 0:
                pivot_row = r
                break
        if pivot_row is None:
            raise SolverError(f"singular system at unknown {unknown!r}")
        remaining.remove(pivot_row)
        coeffs, b = work[pivot_row]
        lead = coeffs[unknown]
        coeffs = {k: v / lead for k, v in coeffs.items() if v != 0}
        b = b / lead
        work[pivot_row] = (coeffs, b)
        for r in remaining:
            other, ob = work[r]
            factor = other.get(unknown, 0)
            if factor == 0:
                continue
            for k, v in coeffs.items():
                nv = other.get(k, 0) - factor * v
                if nv == 0:
                    other.pop(k, None)
                else:
                    other[k] = nv
            work[r] = (other, ob - factor * b)
        pivots.append((unknown, pivot_row))

    solution = {}
    for unknown, r in reversed(pivots):
        coeffs, b = work[r]
        value = b - sum((v * solution[k] for k, v in coeffs.items() if k != unknown), Fraction(0))
        solution[unknown] = value
    return solution


def hitting_probabilities(succ: Mapping[Hashable, Mapping[Hashable, Fraction]], targets) -> dict:
    """Probability of eventually visiting `targets` from every node of a finite chain."""
    targets = set(targets)
    g = nx.DiGraph()
    g.add_nodes_from(succ)
    for u, row in succ.items():
        g.add_edges_from((u, v) for v in row)
    reaching = set()
    for t in targets:
        if t in g:
            reaching |= nx.ancestors(g, t)
    unknowns = reaching - targets
    rows, rhs = {}, {}
    for u in unknowns:
        row = {u: Fraction(1)}
        b = Fraction(0)
        for v, p in succ[u].items():
            if v in targets:
                b += p
            elif v in unknowns:
                row[v] = row.get(v, 0) - p
        rows[u], rhs[u] = row, b
    solved = solve_sparse(rows, rhs) if rows else {}
    return {u: Fraction(1) if u in targets else solved.get(u, Fraction(0)) for u in succ}


def bottom_components(succ: Mapping[Hashable, Mapping[Hashable, Fraction]]) -> list[frozenset]:
    g = nx.DiGraph()
    g.add_nodes_from(succ)
    for u, row in succ.items():
        g.add_edges_from((u, v) for v in row)
    cond = nx.condensation(g)
    bottoms = [frozenset(cond.nodes[c]['members']) for c in cond.nodes if cond.out_degree(c) == 0]
    return sorted(bottoms, key=lambda c: sorted(c))


# --- INDUCED CHAIN ---

@dataclass(frozen=True)
class InducedChain:
    """Reachable (state, mode) pairs with exact transition rows."""
    mdp: Mdp
    states: tuple[ChainState, ...]
    rows: Mapping[ChainState, Mapping[ChainState, Fraction]]
    initial: Mapping[ChainState, Fraction]

    def label(self, node: ChainState) -> frozenset[str]:
        return self.mdp.label(node[0])

    def reach_vector(self, targets) -> dict[ChainState, Fraction]:
        return hitting_probabilities(self.rows, {c for c in self.states if c[0] in targets})


def induced_chain(m: Mdp, strategy, initial: Optional[InitialDistribution] = None) -> InducedChain:
    initial = initial or m.initial
    if not hasattr(strategy, 'choose') or not hasattr(strategy, 'next_modes'):
        raise StrategyError(f"cannot evaluate strategy of type {type(strategy).__name__}")
    if hasattr(strategy, 'validate'):
        strategy.validate(m)
    start = strategy.initial_mode
    init = {(s, start): p for s, p in initial.items()}
    rows = {}
    queue = deque(sorted(init))
    seen = set(init)
    while queue:
        node = queue.popleft()
        state, mode = node
        row = defaultdict(Fraction)
        for action, pa in strategy.choose(state, mode).items():
            if pa == 0:
                continue
            for succ, ps in m.successors(state, action):
                for nxt, pm in strategy.next_modes(state, mode, action, succ).items():
                    if pm:
                        row[(succ, nxt)] += pa * ps * pm
        if sum(row.values(), Fraction(0)) != 1:
            raise SolverError(f"induced chain row at {node} does not sum to 1")
        rows[node] = dict(row)
        for target in sorted(row):
            if target not in seen:
                seen.add(target)
                queue.append(target)
    logger.debug("induced chain: %d states", len(rows))
    return InducedChain(m, tuple(sorted(rows)), rows, init)


def reach_probabilities(chain: InducedChain, targets: list) -> list[Fraction]:
    """Exact probability of eventually entering each target state set."""
    result = []
    for target in targets:
        vec = chain.reach_vector(set(target))
        result.append(sum((p * vec[c] for c, p in chain.initial.items()), Fraction(0)))
    return result


@dataclass(frozen=True)
class BsccReport:
    components: tuple[frozenset, ...]
    absorption: tuple[Fraction, ...]


def bscc_analysis(chain: InducedChain) -> BsccReport:
    components = bottom_components(chain.rows)
    absorption = []
    for comp in components:
        vec = hitting_probabilities(chain.rows, comp)
        absorption.append(sum((p * vec[c] for c, p in chain.initial.items()), Fraction(0)))
    if sum(absorption, Fraction(0)) != 1:
        raise SolverError("absorption probabilities do not sum to 1")
    return BsccReport(tuple(components), tuple(absorption))


def acceptance_probability(chain: InducedChain, automaton) -> Fraction:
    """Probability that the trace of the chain is accepted by a deterministic Rabin automaton.

    Runs the automaton on successor labels, starting from its initial state
    reading the label of the first chain state.
    """
    init = defaultdict(Fraction)
    for node, p in chain.initial.items():
        init[(node, automaton.step(automaton.initial, chain.label(node)))] += p
    rows = {}
    queue = deque(sorted(init))
    seen = set(init)
    while queue:
        pnode = queue.popleft()
        node, q = pnode
        row = {}
        for succ, p in chain.rows[node].items():
            key = (succ, automaton.step(q, chain.label(succ)))
            row[key] = row.get(key, 0) + p
        rows[pnode] = row
        for target in sorted(row):
            if target not in seen:
                seen.add(target)
                queue.append(target)
    accepting = set()
    for comp in bottom_components(rows):
        if automaton.accepts_cycle({q for _, q in comp}):
            accepting |= comp
    vec = hitting_probabilities(rows, accepting)
    return sum((p * vec[c] for c, p in init.items()), Fraction(0))
