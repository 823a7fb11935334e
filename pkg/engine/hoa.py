"""Reader and writer for the HOA subset used to exchange deterministic Rabin automata.

Supported: one `Start:` state, `AP:`, state-based acceptance marks, guards
that are `t` or conjunctions of (negated) proposition indices, and an
`Acceptance:` formula that is a disjunction of `Fin(i) & Inf(j)` pairs.
"""
import logging

from lark import Lark, Transformer, v_args
from lark.exceptions import UnexpectedInput, VisitError

from .automata import RabinAutomaton, RabinPair, valuations
from .errors import AutomatonError

logger = logging.getLogger(__name__)

SINK = 'sink'

GRAMMAR = r"""
start: header "--BODY--" body "--END--"

header: header_item*
?header_item: "HOA:" IDENT              -> version
    | "States:" INT                     -> count
    | "Start:" INT                      -> start_state
    | "AP:" INT STRING*                 -> ap
    | "acc-name:" IDENT (IDENT | INT)*  -> acc_name
    | "Acceptance:" INT acc_disj        -> acceptance
    | "name:" STRING                    -> name
    | "tool:" STRING STRING?            -> tool
    | "properties:" IDENT+              -> properties

acc_disj: acc_conj ("|" acc_conj)*
acc_conj: acc_atom ("&" acc_atom)*
?acc_atom: "Fin" "(" INT ")"            -> fin
    | "Inf" "(" INT ")"                 -> inf
    | "t"                               -> acc_true
    | "f"                               -> acc_false
    | "(" acc_disj ")"

body: state_block*
state_block: "State:" INT STRING? marks? edge*
marks: "{" INT* "}"
edge: "[" guard "]" INT

guard: "t"                              -> guard_true
    | literal ("&" literal)*            -> guard_conj
literal: INT                            -> pos
    | "!" INT                           -> neg

IDENT: /[A-Za-z_][A-Za-z0-9_.\-]*(?![A-Za-z0-9_.\-:])/
STRING: /"[^"]*"/
INT: /\d+/
COMMENT: /\/\*(.|\n)*?\*\//

%import common.WS
%ignore WS
%ignore COMMENT
"""

_PARSER = Lark(GRAMMAR, parser='lalr')


@v_args(inline=True)
class _HoaTree(Transformer):
    def version(self, ident):
        return ('version', str(ident))

    def count(self, n):
        return ('count', int(n))

    def start_state(self, n):
        return ('start', int(n))

    def ap(self, n, *names):
        return ('ap', (int(n), [s[1:-1] for s in names]))

    def acc_name(self, *_):
        return ('acc_name', None)

    def acceptance(self, n, formula):
        return ('acceptance', (int(n), formula))

    def name(self, s):
        return ('name', s[1:-1])

    def tool(self, *_):
        return ('tool', None)

    def properties(self, *_):
        return ('properties', None)

    def header(self, *items):
        return list(items)

    def fin(self, n):
        return ('fin', int(n))

    def inf(self, n):
        return ('inf', int(n))

    def acc_true(self):
        return ('true', None)

    def acc_false(self):
        return ('false', None)

    def acc_conj(self, *atoms):
        return ('and', list(atoms))

    def acc_disj(self, *conjs):
        return ('or', list(conjs))

    def marks(self, *ints):
        return {int(i) for i in ints}

    def pos(self, n):
        return (int(n), True)

    def neg(self, n):
        return (int(n), False)

    def guard_true(self):
        return []

    def guard_conj(self, *literals):
        return list(literals)

    def edge(self, guard, target):
        return (guard, int(target))

    def state_block(self, n, *rest):
        marks = set()
        edges = []
        for item in rest:
            if isinstance(item, set):
                marks = item
            elif isinstance(item, tuple):
                edges.append(item)
        return (int(n), marks, edges)

    def body(self, *blocks):
        return list(blocks)

    def start(self, header, body):
        return header, body


def _dnf(node) -> list[list[tuple]]:
    kind, items = node
    if kind == 'or':
        return [conj for child in items for conj in _dnf(child)]
    if kind == 'and':
        result = [[]]
        for child in items:
            result = [left + right for left in result for right in _dnf(child)]
        return result
    if kind == 'true':
        return [[]]
    if kind == 'false':
        return []
    return [[node]]


def _rabin_pairs(formula) -> list[tuple[set[int], set[int]]]:
    """Reads the acceptance formula into (fin marks, inf marks) pairs."""
    pairs = []
    for conj in _dnf(formula):
        fin = {n for kind, n in conj if kind == 'fin'}
        inf = {n for kind, n in conj if kind == 'inf'}
        if len(inf) > 1:
            raise AutomatonError("acceptance must be a Rabin condition: at most one Inf per disjunct")
        pairs.append((fin, inf))
    return pairs


def parse_automaton(text: str, name: str = '', complete: bool = False) -> RabinAutomaton:
    """Parses HOA text. With `complete`, missing moves go to a fresh rejecting sink."""
    try:
        header, body = _HoaTree().transform(_PARSER.parse(text))
    except UnexpectedInput as e:
        raise AutomatonError(f"HOA syntax error: {e.__class__.__name__}", e.line, e.column) from None
    except VisitError as e:
        raise AutomatonError(f"HOA syntax error: {e.orig_exc}") from None

    starts = [v for k, v in header if k == 'start']
    if len(starts) != 1:
        raise AutomatonError(f"initial state must be unique (found {len(starts)})")
    counts = [v for k, v in header if k == 'count']
    aps = [v for k, v in header if k == 'ap']
    if not aps:
        raise AutomatonError("missing AP: header")
    n_ap, ap_names = aps[0]
    if n_ap != len(ap_names):
        raise AutomatonError(f"AP: declares {n_ap} propositions but names {len(ap_names)}")
    accs = [v for k, v in header if k == 'acceptance']
    if not accs:
        raise AutomatonError("missing Acceptance: header")
    _, formula = accs[0]
    names = [v for k, v in header if k == 'name']
    name = name or (names[0] if names else '')

    declared = {n for n, _, _ in body}
    n_states = counts[0] if counts else (max(declared) + 1 if declared else 0)
    states = [str(i) for i in range(n_states)]
    if starts[0] >= n_states:
        raise AutomatonError(f"start state {starts[0]} out of range")

    marks = {str(n): mk for n, mk, _ in body}
    delta = {}
    needs_sink = False
    by_state = {n: edges for n, _, edges in body}
    for n in range(n_states):
        edges = by_state.get(n, [])
        for guard, target in edges:
            if target >= n_states:
                raise AutomatonError(f"state {n}: edge to undeclared state {target}")
            for index, _ in guard:
                if index >= n_ap:
                    raise AutomatonError(f"state {n}: guard uses unknown proposition {index}")
        for val in valuations(ap_names):
            hits = [target for guard, target in edges
                    if all((ap_names[i] in val) == positive for i, positive in guard)]
            if len(hits) > 1:
                raise AutomatonError(f"automaton is non-deterministic at state {n} on {sorted(val)}")
            if not hits:
                if not complete:
                    raise AutomatonError(f"transition function is not total at state {n} on {sorted(val)}")
                needs_sink = True
                delta[(str(n), val)] = SINK
            else:
                delta[(str(n), val)] = str(hits[0])
    if needs_sink:
        states.append(SINK)
        for val in valuations(ap_names):
            delta[(SINK, val)] = SINK
        marks[SINK] = set()

    pairs = []
    for fin, inf in _rabin_pairs(formula):
        avoid = frozenset(q for q in states if marks.get(q, set()) & fin)
        if inf:
            repeat = frozenset(q for q in states if marks.get(q, set()) & inf)
        else:
            repeat = frozenset(q for q in states if q != SINK or not needs_sink)
        pairs.append(RabinPair(avoid, repeat))
    logger.debug("parsed automaton %s: %d states, %d pairs", name, len(states), len(pairs))
    return RabinAutomaton.build(states, str(starts[0]), ap_names, delta, pairs, name)


def serialize_automaton(a: RabinAutomaton) -> str:
    """Writes HOA with explicit minterm guards; round-trips through parse_automaton."""
    number = {q: i for i, q in enumerate(a.states)}
    props = list(a.propositions)
    acc = ' | '.join(f'(Fin({2 * j}) & Inf({2 * j + 1}))' for j in range(len(a.pairs))) or 'f'
    lines = [
        'HOA: v1',
        f'name: "{a.name}"',
        f'States: {len(a.states)}',
        f'Start: {number[a.initial]}',
        f'AP: {len(props)}' + ''.join(f' "{p}"' for p in props),
        f'Acceptance: {2 * len(a.pairs)} {acc}',
        '--BODY--',
    ]
    for q in a.states:
        mk = []
        for j, pair in enumerate(a.pairs):
            if q in pair.avoid:
                mk.append(str(2 * j))
            if q in pair.repeat:
                mk.append(str(2 * j + 1))
        lines.append(f'State: {number[q]}' + (' {' + ' '.join(mk) + '}' if mk else ''))
        for val in valuations(props):
            guard = ' & '.join(str(i) if p in val else f'!{i}' for i, p in enumerate(props)) or 't'
            lines.append(f'[{guard}] {number[a.delta[(q, val)]]}')
    lines.append('--END--')
    return '\n'.join(lines) + '\n'
