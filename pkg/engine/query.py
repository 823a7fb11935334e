"""Boolean queries over property probabilities: parsing, normalization and evaluation."""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence, Union

from lark import Lark, Transformer, v_args
from lark.exceptions import UnexpectedInput, VisitError

from utils.rationals import parse_rational

from .automata import BUILTINS, RabinAutomaton
from .chain import acceptance_probability, induced_chain
from .errors import LimitExceeded, ModelError, QueryError
from .hoa import parse_automaton
from .lp import decide_extended_achievability
from .model import InitialDistribution, Mdp, default_strategy
from .qualitative import QualitativeQuery, decide_qualitative
from .reduction import reduce_properties
from .settings import DEFAULT_SETTINGS, EngineSettings

logger = logging.getLogger(__name__)

GRAMMAR = r"""
query: disj
query_file: statement*

?statement: "property" NAME "=" objective ";"     -> property_decl
    | "complement" NAME "=" objective ";"         -> complement_decl
    | "query" ":" disj ";"                        -> exists_stmt
    | "forall" ":" disj ";"                       -> forall_stmt

objective: KIND STRING
KIND: "reach" | "avoid" | "infinitely" | "finitely" | "automaton"

?disj: conj ("|" conj)*
?conj: unary ("&" unary)*
?unary: "!" unary                                 -> neg
    | "(" disj ")"
    | "true"                                      -> const_true
    | "false"                                     -> const_false
    | "Pr" "(" NAME ")" cmp NUMBER                -> pred

cmp: ">=" -> ge
    | "<=" -> le
    | "!=" -> ne
    | ">"  -> gt
    | "<"  -> lt
    | "="  -> eq

NAME: /[A-Za-z_][A-Za-z0-9_]*/
NUMBER: /\d+(\.\d+)?(\/\d+)?/
STRING: /"[^"]*"/
COMMENT: /#[^\n]*/

%import common.WS
%ignore WS
%ignore COMMENT
"""

_PARSER = Lark(GRAMMAR, start=['query', 'query_file'], parser='lalr')


# --- SYNTAX TREE ---

@dataclass(frozen=True)
class Pred:
    prop: str
    op: str
    bound: Fraction


@dataclass(frozen=True)
class Const:
    value: bool


@dataclass(frozen=True)
class Not:
    item: 'Expr'


@dataclass(frozen=True)
class And:
    items: tuple


@dataclass(frozen=True)
class Or:
    items: tuple


Expr = Union[Pred, Const, Not, And, Or]

NEGATED = {'>=': '<', '>': '<=', '<=': '>', '<': '>=', '=': '!=', '!=': '='}


@dataclass(frozen=True)
class PropertyDecl:
    name: str
    kind: str
    argument: str


@dataclass
class QueryFile:
    properties: dict[str, PropertyDecl] = field(default_factory=dict)
    complements: dict[str, PropertyDecl] = field(default_factory=dict)
    statements: list[tuple[str, Expr]] = field(default_factory=list)
    base_dir: Path = Path('.')


@v_args(inline=True)
class _QueryTree(Transformer):
    def pred(self, name, op, number):
        bound = parse_rational(str(number))
        if bound < 0 or bound > 1:
            raise QueryError(f"probability bound {bound} outside [0, 1]", number.line, number.column)
        return Pred(str(name), op, bound)

    def ge(self):
        return '>='

    def le(self):
        return '<='

    def ne(self):
        return '!='

    def gt(self):
        return '>'

    def lt(self):
        return '<'

    def eq(self):
        return '='

    def const_true(self):
        return Const(True)

    def const_false(self):
        return Const(False)

    def neg(self, item):
        return Not(item)

    def conj(self, *items):
        return And(tuple(items))

    def disj(self, *items):
        return Or(tuple(items))

    def query(self, expr):
        return expr

    def objective(self, kind, path):
        return str(kind), str(path)[1:-1]

    def property_decl(self, name, objective):
        return ('property', PropertyDecl(str(name), *objective))

    def complement_decl(self, name, objective):
        return ('complement', PropertyDecl(str(name), *objective))

    def exists_stmt(self, expr):
        return ('exists', expr)

    def forall_stmt(self, expr):
        return ('forall', expr)

    def query_file(self, *statements):
        return list(statements)


def _parse(text: str, start: str):
    try:
        return _QueryTree().transform(_PARSER.parse(text, start=start))
    except UnexpectedInput as e:
        raise QueryError(f"query syntax error near {text[e.pos_in_stream:e.pos_in_stream + 12]!r}"
                         if getattr(e, 'pos_in_stream', None) is not None else "query syntax error",
                         e.line, e.column) from None
    except VisitError as e:
        if isinstance(e.orig_exc, QueryError):
            raise e.orig_exc from None
        raise QueryError(str(e.orig_exc)) from None


def properties_of(expr: Expr) -> set[str]:
    if isinstance(expr, Pred):
        return {expr.prop}
    if isinstance(expr, Not):
        return properties_of(expr.item)
    if isinstance(expr, (And, Or)):
        return set().union(*(properties_of(i) for i in expr.items))
    return set()


def parse_query(text: str, known: Optional[Sequence[str]] = None) -> Expr:
    expr = _parse(text, 'query')
    if known is not None:
        unknown = sorted(properties_of(expr) - set(known))
        if unknown:
            raise QueryError(f"unknown property {unknown[0]!r}")
    return expr


def parse_query_file(text: str, base_dir: Path = Path('.')) -> QueryFile:
    result = QueryFile(base_dir=Path(base_dir))
    for kind, item in _parse(text, 'query_file'):
        if kind == 'property':
            if item.name in result.properties:
                raise QueryError(f"property {item.name!r} declared twice")
            result.properties[item.name] = item
        elif kind == 'complement':
            result.complements[item.name] = item
        else:
            result.statements.append((kind, item))
    for name in result.complements:
        if name not in result.properties:
            raise QueryError(f"complement given for unknown property {name!r}")
    for kind, expr in result.statements:
        unknown = sorted(properties_of(expr) - set(result.properties))
        if unknown:
            raise QueryError(f"unknown property {unknown[0]!r}")
    return result


AUTO_COMPLEMENT = {'reach': 'avoid', 'avoid': 'reach', 'infinitely': 'finitely', 'finitely': 'infinitely'}


def build_property(decl: PropertyDecl, base_dir: Path = Path('.')) -> RabinAutomaton:
    if decl.kind == 'automaton':
        path = Path(decl.argument)
        if not path.is_absolute():
            path = Path(base_dir) / path
        try:
            text = path.read_text()
        except OSError as e:
            raise ModelError(f"cannot read automaton file {path}: {e.strerror}") from None
        return parse_automaton(text, name=decl.name)
    automaton = BUILTINS[decl.kind](decl.argument)
    return RabinAutomaton.build(automaton.states, automaton.initial, automaton.propositions,
                                automaton.delta, automaton.pairs, decl.name)


@dataclass
class PropertySet:
    """Named properties with the complements available for upper bounds."""
    automata: dict[str, RabinAutomaton]
    complements: dict[str, RabinAutomaton]

    @staticmethod
    def from_file(qf: QueryFile) -> 'PropertySet':
        automata, complements = {}, {}
        for name, decl in qf.properties.items():
            automata[name] = build_property(decl, qf.base_dir)
            if name in qf.complements:
                complements[name] = build_property(qf.complements[name], qf.base_dir)
            elif decl.kind in AUTO_COMPLEMENT:
                complements[name] = build_property(PropertyDecl(f'not {name}', AUTO_COMPLEMENT[decl.kind],
                                                                decl.argument))
        return PropertySet(automata, complements)

    def objective(self, prop: str, negated: bool) -> RabinAutomaton:
        table = self.complements if negated else self.automata
        if prop not in table:
            if negated:
                raise QueryError(f"an upper bound on {prop!r} needs a complement automaton for it")
            raise QueryError(f"unknown property {prop!r}")
        return table[prop]


# --- NORMALIZATION ---

@dataclass(frozen=True, order=True)
class Atom:
    """Pr(prop) >= bound, or > bound when strict; `negated` refers to the complement of prop."""
    prop: str
    negated: bool
    bound: Fraction
    strict: bool

    @property
    def key(self) -> tuple[str, bool]:
        return self.prop, self.negated

    @property
    def label(self) -> str:
        return f'not {self.prop}' if self.negated else self.prop

    @property
    def qualitative(self) -> bool:
        return (self.bound == 1 and not self.strict) or (self.bound == 0 and self.strict)


@dataclass(frozen=True)
class NormalizedQuery:
    disjuncts: tuple[tuple[Atom, ...], ...]

    @property
    def complements_needed(self) -> frozenset[str]:
        return frozenset(a.prop for d in self.disjuncts for a in d if a.negated)


def _nnf(expr: Expr, negate: bool = False) -> Expr:
    if isinstance(expr, Pred):
        return Pred(expr.prop, NEGATED[expr.op], expr.bound) if negate else expr
    if isinstance(expr, Const):
        return Const(expr.value != negate)
    if isinstance(expr, Not):
        return _nnf(expr.item, not negate)
    items = tuple(_nnf(i, negate) for i in expr.items)
    if isinstance(expr, And):
        return Or(items) if negate else And(items)
    return And(items) if negate else Or(items)


def _lower_bounds(pred: Pred) -> Expr:
    r, prop = pred.bound, pred.prop
    if pred.op == '>=':
        return Const(True) if r <= 0 else Atom(prop, False, r, False)
    if pred.op == '>':
        return Const(False) if r >= 1 else Atom(prop, False, r, True)
    if pred.op == '<=':
        return Const(True) if r >= 1 else Atom(prop, True, 1 - r, False)
    if pred.op == '<':
        return Const(False) if r <= 0 else Atom(prop, True, 1 - r, True)
    if pred.op == '=':
        return And((_lower_bounds(Pred(prop, '>=', r)), _lower_bounds(Pred(prop, '<=', r))))
    return Or((_lower_bounds(Pred(prop, '>', r)), _lower_bounds(Pred(prop, '<', r))))


def _dnf(expr, cap: int) -> list[list[Atom]]:
    if isinstance(expr, Const):
        return [[]] if expr.value else []
    if isinstance(expr, Atom):
        return [[expr]]
    if isinstance(expr, Pred):
        return _dnf(_lower_bounds(expr), cap)
    if isinstance(expr, Or):
        result = [d for item in expr.items for d in _dnf(item, cap)]
    else:
        result = [[]]
        for item in expr.items:
            result = [left + right for left in result for right in _dnf(item, cap)]
            if len(result) > cap:
                break
    if len(result) > cap:
        raise LimitExceeded(f"query expands to more than {cap} disjuncts")
    return result


def _merge(atoms: list[Atom]) -> tuple[Atom, ...]:
    """Keeps the strongest bound per objective."""
    best = {}
    for atom in atoms:
        current = best.get(atom.key)
        if current is None or (atom.bound, atom.strict) > (current.bound, current.strict):
            best[atom.key] = atom
    return tuple(sorted(best.values()))


def normalize(expr: Expr, settings: EngineSettings = DEFAULT_SETTINGS) -> NormalizedQuery:
    disjuncts = []
    seen = set()
    for d in _dnf(_nnf(expr), settings.disjunct_cap):
        merged = _merge(d)
        if merged not in seen:
            seen.add(merged)
            disjuncts.append(merged)
    return NormalizedQuery(tuple(disjuncts))


# --- EVALUATION ---

@dataclass
class QueryVerdict:
    satisfied: bool
    strategy: Optional[object] = None
    disjunct: Optional[int] = None
    atoms: tuple[Atom, ...] = ()
    route: str = ''
    objectives: tuple[RabinAutomaton, ...] = ()


def decide_disjunct(m: Mdp, props: PropertySet, atoms: Sequence[Atom],
                    initial: Optional[InitialDistribution] = None,
                    settings: EngineSettings = DEFAULT_SETTINGS,
                    force_quantitative: bool = False) -> QueryVerdict:
    initial = initial or m.initial
    atoms = tuple(atoms)
    if not atoms:
        return QueryVerdict(True, default_strategy(m), None, atoms, 'trivial')
    automata = tuple(props.objective(a.prop, a.negated) for a in atoms)
    if not force_quantitative and all(a.qualitative for a in atoms):
        q = QualitativeQuery(sure=frozenset(i for i, a in enumerate(atoms) if not a.strict),
                             positive=tuple(i for i, a in enumerate(atoms) if a.strict))
        result = decide_qualitative(m, automata, q, initial, settings)
        return QueryVerdict(result.satisfiable, result.strategy, None, atoms, 'qualitative', automata)
    instance = reduce_properties(m, automata, [a.label for a in atoms], initial, settings)
    strict = [i for i, a in enumerate(atoms) if a.strict]
    result = decide_extended_achievability(instance.model, [a.bound for a in atoms], strict)
    strategy = instance.lift(result.strategy) if result.achievable else None
    return QueryVerdict(result.achievable, strategy, None, atoms, 'quantitative', automata)


def evaluate(m: Mdp, props: PropertySet, expr: Union[Expr, NormalizedQuery],
             initial: Optional[InitialDistribution] = None,
             settings: EngineSettings = DEFAULT_SETTINGS,
             force_quantitative: bool = False) -> QueryVerdict:
    """Satisfiable iff some disjunct is; the first satisfiable disjunct supplies the witness."""
    normal = expr if isinstance(expr, NormalizedQuery) else normalize(expr, settings)
    for prop in sorted(normal.complements_needed):
        props.objective(prop, True)
    for index, atoms in enumerate(normal.disjuncts):
        verdict = decide_disjunct(m, props, atoms, initial, settings, force_quantitative)
        logger.info("disjunct %d (%s): %s", index, verdict.route, 'sat' if verdict.satisfied else 'unsat')
        if verdict.satisfied:
            verdict.disjunct = index
            return verdict
    return QueryVerdict(False)


def evaluate_forall(m: Mdp, props: PropertySet, expr: Expr,
                    initial: Optional[InitialDistribution] = None,
                    settings: EngineSettings = DEFAULT_SETTINGS) -> QueryVerdict:
    """Holds for every strategy iff the negation is unsatisfiable; a witness of the negation is a counterexample."""
    verdict = evaluate(m, props, Not(expr), initial, settings)
    return QueryVerdict(not verdict.satisfied, verdict.strategy, verdict.disjunct, verdict.atoms,
                        verdict.route, verdict.objectives)


@dataclass
class AssumeGuaranteeVerdict:
    holds: bool
    counterexample: Optional[object] = None
    values: tuple[Fraction, ...] = ()


def check_assume_guarantee(m: Mdp, assume: RabinAutomaton, r1, guarantee_complement: RabinAutomaton, r2,
                           initial: Optional[InitialDistribution] = None,
                           settings: EngineSettings = DEFAULT_SETTINGS) -> AssumeGuaranteeVerdict:
    """Does every strategy with Pr(assume) >= r1 also give Pr(guarantee) >= r2?"""
    r1, r2 = Fraction(r1), Fraction(r2)
    for r in (r1, r2):
        if r < 0 or r > 1:
            raise QueryError(f"bound {r} outside [0, 1]")
    if r2 == 0:
        return AssumeGuaranteeVerdict(True)
    initial = initial or m.initial
    props = PropertySet({'assume': assume, 'violation': guarantee_complement}, {})
    atoms = [Atom('violation', False, 1 - r2, True)]
    if r1 > 0:
        atoms.insert(0, Atom('assume', False, r1, False))
    verdict = decide_disjunct(m, props, _merge(atoms), initial, settings)
    if not verdict.satisfied:
        return AssumeGuaranteeVerdict(True)
    chain = induced_chain(m, verdict.strategy, initial)
    values = (acceptance_probability(chain, assume), 1 - acceptance_probability(chain, guarantee_complement))
    logger.info("assume-guarantee violated: assumption %s, guarantee %s", values[0], values[1])
    return AssumeGuaranteeVerdict(False, verdict.strategy, values)
