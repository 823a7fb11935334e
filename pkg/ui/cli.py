import json
import logging
import re
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional

import click

from engine.errors import MocheckError, QueryError, SolverError
from engine.hard_instance import enumerate_paths, gen_hard_instance, lower_hull_vertices
from engine.lp import decide_extended_achievability, dump_lp
from engine.oracle import Claim, gen_random_mdp, validate_strategy
from engine.pareto import epsilon_pareto, exact_vertices_biobjective
from engine.qualitative import QualitativeQuery, decide_qualitative
from engine.query import (PropertySet, check_assume_guarantee, evaluate, evaluate_forall,
                          parse_query_file)
from engine.reduction import reachability_instance, reduce_properties
from engine.settings import LOG_LEVEL_ENV, EngineSettings
from ui.reports import emit_plot_data, pareto_document, points_table, validation_table, vector_line
from utils.persistence import (load_mdp, load_strategy, read_text, save_document, save_mdp, save_strategy,
                               serialize_mdp, strategy_document)
from utils.rationals import parse_rational, parse_vector, render

logger = logging.getLogger(__name__)

EXIT_YES, EXIT_NO, EXIT_ERROR = 0, 1, 2
CLAIM_PATTERN = re.compile(r'^\s*(>=|<=|>|<|=)\s*(\S+)\s*$')


@dataclass
class RunConfig:
    """Everything one invocation needs; built by the click commands, consumed by run()."""
    command: str
    model: Optional[str] = None
    targets: tuple[str, ...] = ()
    properties: Optional[str] = None
    bounds: tuple[Fraction, ...] = ()
    strict: tuple[int, ...] = ()
    epsilon: Optional[Fraction] = None
    exact: bool = False
    fmt: str = 'text'
    decimal: bool = False
    out: Optional[str] = None
    self_check: bool = True
    strategy: Optional[str] = None
    claims: tuple[str, ...] = ()
    sure: tuple[str, ...] = ()
    positive: tuple[str, ...] = ()
    assume: Optional[str] = None
    guarantee: Optional[str] = None
    r1: Fraction = Fraction(0)
    r2: Fraction = Fraction(0)
    layers: int = 4
    seed: int = 0
    width: int = 2
    states: int = 6
    actions: int = 2
    targets_count: int = 2
    workers: Optional[int] = None
    subset_cap: Optional[int] = None
    disjunct_cap: Optional[int] = None
    oracle_cap: Optional[int] = None


@dataclass
class RunOutcome:
    exit_code: int
    text: str = ''
    files: list[str] = field(default_factory=list)


def configure_logging(level: Optional[str] = None) -> None:
    name = EngineSettings.from_env(log_level=level).log_level.upper()
    logging.basicConfig(level=getattr(logging, name), stream=sys.stderr,
                        format='%(asctime)s %(levelname)s %(name)s: %(message)s')


# --- OBJECTIVES ---

@dataclass
class Objectives:
    names: tuple[str, ...]
    validation: list
    props: Optional[PropertySet] = None

    @property
    def automata(self):
        return tuple(self.props.automata[n] for n in self.names) if self.props else None


def _property_set(path: str) -> PropertySet:
    qf = parse_query_file(read_text(path), Path(path).parent)
    return PropertySet.from_file(qf)


def _objectives(config: RunConfig, m) -> Objectives:
    if config.targets and config.properties:
        raise QueryError("give either --targets or --properties, not both")
    if config.targets:
        unknown = [t for t in config.targets if t not in m.propositions]
        if unknown:
            raise QueryError(f"unknown target label {unknown[0]!r}")
        return Objectives(tuple(config.targets), [m.states_with_label(t) for t in config.targets])
    if config.properties:
        props = _property_set(config.properties)
        names = tuple(props.automata)
        return Objectives(names, [props.automata[n] for n in names], props)
    raise QueryError("give --targets or --properties")


def _instance(obj: Objectives, m, settings: EngineSettings):
    if obj.props is None:
        return reachability_instance(m, obj.names, settings=settings)
    return reduce_properties(m, obj.automata, obj.names, settings=settings)


def _self_check(config: RunConfig, m, strategy, objectives, claims) -> str:
    if not config.self_check or not claims:
        return ''
    report = validate_strategy(m, strategy, objectives, claims)
    if not report.passed:
        raise SolverError("self-check failed: the produced strategy does not meet its claims\n"
                          + validation_table(report))
    return "self-check:\n" + validation_table(report)


def _write(config: RunConfig, text: str, outcome: RunOutcome) -> str:
    if config.out:
        with open(config.out, 'w') as f:
            f.write(text)
        outcome.files.append(config.out)
        return f"written to {config.out}\n"
    return text


# --- COMMANDS ---

def _validate(config: RunConfig, settings: EngineSettings) -> RunOutcome:
    m = load_mdp(config.model)
    lines = [f"model ok: {len(m.states)} states, {sum(len(a) for a in m.actions.values())} state-action pairs, "
             f"{m.size()} transitions",
             f"propositions: {', '.join(sorted(m.propositions)) or '(none)'}"]
    if config.properties:
        props = _property_set(config.properties)
        for name, a in props.automata.items():
            a.check_alphabet(m)
            lines.append(f"property {name}: {len(a.states)} automaton states, {len(a.pairs)} pair(s)")
    return RunOutcome(EXIT_YES, '\n'.join(lines) + '\n')


def _achievable(config: RunConfig, settings: EngineSettings) -> RunOutcome:
    m = load_mdp(config.model)
    obj = _objectives(config, m)
    strict = [j - 1 for j in config.strict]
    if any(j < 0 for j in strict):
        raise QueryError("strict indices start at 1")
    instance = _instance(obj, m, settings)
    result = decide_extended_achievability(instance.model, config.bounds, strict)
    if not result.achievable:
        return RunOutcome(EXIT_NO, "not achievable\n")
    outcome = RunOutcome(EXIT_YES)
    strategy = instance.lift(result.strategy)
    claims = [Claim(n, '>' if i in strict else '>=', r) for i, (n, r) in enumerate(zip(obj.names, config.bounds))]
    text = "achievable\n"
    if result.values is not None:
        text += f"LP values: {vector_line(obj.names, result.values)}\n"
    text += _self_check(config, m, strategy, obj.validation, claims)
    if config.out:
        save_strategy(config.out, strategy)
        outcome.files.append(config.out)
        text += f"strategy written to {config.out}\n"
    else:
        text += render_strategy(strategy)
    outcome.text = text
    return outcome


def render_strategy(strategy) -> str:
    return json.dumps(strategy_document(strategy), indent=4) + '\n'


def _witness_claims(verdict):
    return [Claim(a.label, '>' if a.strict else '>=', a.bound) for a in verdict.atoms]


def _query(config: RunConfig, settings: EngineSettings) -> RunOutcome:
    m = load_mdp(config.model)
    qf = parse_query_file(read_text(config.properties), Path(config.properties).parent)
    props = PropertySet.from_file(qf)
    if not qf.statements:
        raise QueryError("query file has no query or forall statement")
    lines, docs, all_hold = [], [], True
    for index, (kind, expr) in enumerate(qf.statements):
        if kind == 'exists':
            verdict = evaluate(m, props, expr, settings=settings)
            holds = verdict.satisfied
            lines.append(f"query {index + 1}: {'sat' if holds else 'unsat'}"
                         + (f" (disjunct {verdict.disjunct + 1}, {verdict.route})" if holds else ''))
        else:
            verdict = evaluate_forall(m, props, expr, settings=settings)
            holds = verdict.satisfied
            lines.append(f"forall {index + 1}: {'holds' if holds else 'violated'}")
        witness = verdict.strategy if (kind == 'exists') == holds else None
        if witness is not None and verdict.atoms:
            lines.append(_self_check(config, m, witness, list(verdict.objectives), _witness_claims(verdict)).rstrip())
        all_hold = all_hold and holds
        docs.append({'kind': kind, 'holds': holds, 'route': verdict.route,
                     'strategy': strategy_document(witness) if witness is not None else None})
    outcome = RunOutcome(EXIT_YES if all_hold else EXIT_NO)
    if config.out:
        save_document(config.out, {'statements': docs})
        outcome.files.append(config.out)
        lines.append(f"results written to {config.out}")
    outcome.text = '\n'.join(line for line in lines if line) + '\n'
    return outcome


def _qualitative(config: RunConfig, settings: EngineSettings) -> RunOutcome:
    m = load_mdp(config.model)
    props = _property_set(config.properties)
    names = list(dict.fromkeys(list(config.sure) + list(config.positive)))
    unknown = [n for n in names if n not in props.automata]
    if unknown:
        raise QueryError(f"unknown property {unknown[0]!r}")
    automata = [props.automata[n] for n in names]
    query = QualitativeQuery(frozenset(names.index(n) for n in config.sure),
                             tuple(names.index(n) for n in config.positive))
    result = decide_qualitative(m, automata, query, settings=settings)
    if not result.satisfiable:
        return RunOutcome(EXIT_NO, f"no: {result.reason}\n")
    claims = [Claim(n, '>=', Fraction(1)) for n in config.sure]
    claims += [Claim(n, '>', Fraction(0)) for n in config.positive]
    objectives = [props.automata[c.name] for c in claims]
    text = "yes\n" + _self_check(config, m, result.strategy, objectives, claims)
    outcome = RunOutcome(EXIT_YES)
    if config.out:
        save_strategy(config.out, result.strategy)
        outcome.files.append(config.out)
        text += f"strategy written to {config.out}\n"
    outcome.text = text
    return outcome


def _render_pareto(config: RunConfig, result, strategies, outcome: RunOutcome) -> str:
    if config.fmt == 'csv':
        return _write(config, emit_plot_data(result, decimal=config.decimal), outcome)
    if config.fmt == 'json':
        if config.out:
            save_document(config.out, pareto_document(result, strategies))
            outcome.files.append(config.out)
            return f"written to {config.out}\n"
        return json.dumps(pareto_document(result, strategies), indent=4) + '\n'
    return _write(config, points_table(result), outcome)


def _pareto(config: RunConfig, settings: EngineSettings) -> RunOutcome:
    m = load_mdp(config.model)
    obj = _objectives(config, m)
    instance = _instance(obj, m, settings)
    if config.exact:
        result = exact_vertices_biobjective(instance.model)
    else:
        if config.epsilon is None:
            raise QueryError("give --epsilon or --exact2")
        result = epsilon_pareto(instance.model, config.epsilon, settings)
    strategies = [instance.lift(p.strategy) for p in result.points]
    check = ''
    for p, strategy in zip(result.points, strategies):
        claims = [Claim(n, '>=', v) for n, v in zip(obj.names, p.values)]
        check = _self_check(config, m, strategy, obj.validation, claims) or check
    outcome = RunOutcome(EXIT_YES)
    outcome.text = _render_pareto(config, result, strategies, outcome)
    if check and config.fmt == 'text':
        outcome.text += f"self-check passed for {len(strategies)} strategies\n"
    return outcome


def _vertices(config: RunConfig, settings: EngineSettings) -> RunOutcome:
    config.exact = True
    return _pareto(config, settings)


def parse_claims(texts) -> list[tuple[str, Fraction]]:
    result = []
    for text in texts:
        for part in text.split(','):
            match = CLAIM_PATTERN.match(part)
            if not match:
                raise QueryError(f"malformed claim {part!r}; expected e.g. '>=1/2'")
            try:
                result.append((match.group(1), parse_rational(match.group(2))))
            except ValueError as e:
                raise QueryError(str(e)) from None
    return result


def _check_strategy(config: RunConfig, settings: EngineSettings) -> RunOutcome:
    m = load_mdp(config.model)
    obj = _objectives(config, m)
    strategy = load_strategy(config.strategy)
    parsed = parse_claims(config.claims)
    if len(parsed) != len(obj.names):
        raise QueryError(f"{len(obj.names)} objectives but {len(parsed)} claims")
    claims = [Claim(n, op, r) for n, (op, r) in zip(obj.names, parsed)]
    report = validate_strategy(m, strategy, obj.validation, claims)
    verdict = 'PASS' if report.passed else 'FAIL'
    return RunOutcome(EXIT_YES if report.passed else EXIT_NO, validation_table(report) + verdict + '\n')


def _gen_hard(config: RunConfig, settings: EngineSettings) -> RunOutcome:
    instance = gen_hard_instance(config.layers, config.seed, config.width, settings)
    outcome = RunOutcome(EXIT_YES)
    if not config.out:
        outcome.text = serialize_mdp(instance.mdp)
        return outcome
    save_mdp(config.out, instance.mdp)
    outcome.files.append(config.out)
    paths = enumerate_paths(instance.graph)
    hull = lower_hull_vertices([(c, d) for _, c, d in paths])
    outcome.text = (f"hard instance with {config.layers} layers written to {config.out}\n"
                    f"h = {instance.h}, Pr(R) = {render(instance.red_offset)} - {render(instance.scale)} * c(path)\n"
                    f"{len(paths)} paths, {len(hull)} lower-hull cost vertices\n")
    return outcome


def _gen_random(config: RunConfig, settings: EngineSettings) -> RunOutcome:
    m, _ = gen_random_mdp(config.seed, config.states, config.actions, config.targets_count)
    outcome = RunOutcome(EXIT_YES)
    if config.out:
        save_mdp(config.out, m)
        outcome.files.append(config.out)
        outcome.text = f"random model written to {config.out}\n"
    else:
        outcome.text = serialize_mdp(m)
    return outcome


def _assume_guarantee(config: RunConfig, settings: EngineSettings) -> RunOutcome:
    m = load_mdp(config.model)
    props = _property_set(config.properties)
    for name in (config.assume, config.guarantee):
        if name not in props.automata:
            raise QueryError(f"unknown property {name!r}")
    complement = props.objective(config.guarantee, True)
    verdict = check_assume_guarantee(m, props.automata[config.assume], config.r1, complement, config.r2,
                                     settings=settings)
    if verdict.holds:
        return RunOutcome(EXIT_YES, "holds\n")
    text = (f"violated: counterexample gives {vector_line((config.assume, config.guarantee), verdict.values)}\n")
    outcome = RunOutcome(EXIT_NO, text)
    if config.out:
        save_strategy(config.out, verdict.counterexample)
        outcome.files.append(config.out)
        outcome.text += f"counterexample written to {config.out}\n"
    return outcome


def _dump_lp(config: RunConfig, settings: EngineSettings) -> RunOutcome:
    m = load_mdp(config.model)
    instance = _instance(_objectives(config, m), m, settings)
    outcome = RunOutcome(EXIT_YES)
    outcome.text = _write(config, dump_lp(instance.model), outcome)
    return outcome


COMMANDS = {
    'validate': _validate,
    'achievable': _achievable,
    'query': _query,
    'qualitative': _qualitative,
    'pareto': _pareto,
    'vertices': _vertices,
    'check-strategy': _check_strategy,
    'gen-hard': _gen_hard,
    'gen-random': _gen_random,
    'assume-guarantee': _assume_guarantee,
    'dump-lp': _dump_lp,
}


def run(config: RunConfig) -> RunOutcome:
    """Runs one command; every engine error becomes exit code 2."""
    settings = EngineSettings.from_env(workers=config.workers, subset_cap=config.subset_cap,
                                       disjunct_cap=config.disjunct_cap, oracle_cap=config.oracle_cap)
    try:
        return COMMANDS[config.command](config, settings)
    except MocheckError as e:
        logger.debug("command %s failed", config.command, exc_info=True)
        return RunOutcome(EXIT_ERROR, f"error: {e}\n")
    except OSError as e:
        return RunOutcome(EXIT_ERROR, f"error: {e.filename or config.out}: {e.strerror}\n")


def _finish(config: RunConfig) -> None:
    outcome = run(config)
    click.echo(outcome.text, nl=False, err=outcome.exit_code == EXIT_ERROR)
    sys.exit(outcome.exit_code)


# --- CLICK SURFACE ---

class RationalType(click.ParamType):
    name = 'rational'

    def convert(self, value, param, ctx):
        if isinstance(value, Fraction):
            return value
        try:
            return parse_rational(value)
        except ValueError as e:
            self.fail(str(e), param, ctx)


class VectorType(click.ParamType):
    name = 'vector'

    def convert(self, value, param, ctx):
        if isinstance(value, tuple):
            return value
        try:
            return parse_vector(value)
        except ValueError as e:
            self.fail(str(e), param, ctx)


class NameListType(click.ParamType):
    name = 'names'

    def convert(self, value, param, ctx):
        if isinstance(value, tuple):
            return value
        return tuple(p.strip() for p in value.split(',') if p.strip())


RATIONAL, VECTOR, NAMES = RationalType(), VectorType(), NameListType()


def _objective_options(fn):
    fn = click.option('--properties', type=click.Path(exists=True, dir_okay=False),
                      help="Query file whose property declarations are the objectives, in order.")(fn)
    fn = click.option('--targets', type=NAMES, default='',
                      help="Comma-separated labels to reach, e.g. P1,P2.")(fn)
    return fn


def _self_check_option(fn):
    return click.option('--self-check/--no-self-check', default=True, show_default=True,
                        help="Re-validate produced strategies before answering.")(fn)


@click.group()
@click.option('--log-level', default=None, help=f"Logging level (default from {LOG_LEVEL_ENV}, else WARNING).")
@click.option('--workers', type=int, default=None, help="Worker threads for batched enumeration.")
@click.option('--subset-cap', type=int, default=None, help="Most properties the reduction accepts.")
@click.option('--disjunct-cap', type=int, default=None, help="Most disjuncts a query may expand to.")
@click.option('--oracle-cap', type=int, default=None, help="Most pure strategies the oracle enumerates.")
@click.pass_context
def cli(ctx, log_level, workers, subset_cap, disjunct_cap, oracle_cap):
    """Multi-objective model checking of Markov decision processes with exact arithmetic."""
    try:
        configure_logging(log_level)
    except ValueError as e:
        raise click.BadParameter(str(e), param_hint='--log-level') from None
    ctx.obj = {'workers': workers, 'subset_cap': subset_cap, 'disjunct_cap': disjunct_cap, 'oracle_cap': oracle_cap}


@cli.command()
@click.argument('model', type=click.Path(exists=True, dir_okay=False))
@click.option('--properties', type=click.Path(exists=True, dir_okay=False), help="Also check a query file.")
@click.pass_context
def validate(ctx, model, properties):
    """Parse and check a model file."""
    _finish(RunConfig('validate', model=model, properties=properties, **ctx.obj))


@cli.command()
@click.argument('model', type=click.Path(exists=True, dir_okay=False))
@_objective_options
@click.option('--bound', 'bounds', type=VECTOR, required=True, help="Lower bounds r, e.g. 1/2,1/2.")
@click.option('--strict', type=NAMES, default='', help="1-based indices whose bound is strict.")
@click.option('--out', type=click.Path(dir_okay=False), help="Write the witness strategy here.")
@_self_check_option
@click.pass_context
def achievable(ctx, model, targets, properties, bounds, strict, out, self_check):
    """Decide whether all bounds can be met at once; exit 0 yes, 1 no."""
    try:
        strict_idx = tuple(int(s) for s in strict)
    except ValueError:
        raise click.BadParameter("strict indices must be integers", param_hint='--strict')
    _finish(RunConfig('achievable', model=model, targets=targets, properties=properties, bounds=bounds,
                      strict=strict_idx, out=out, self_check=self_check, **ctx.obj))


@cli.command()
@click.argument('model', type=click.Path(exists=True, dir_okay=False))
@click.argument('queryfile', type=click.Path(exists=True, dir_okay=False))
@click.option('--out', type=click.Path(dir_okay=False), help="Write verdicts and witnesses as JSON.")
@_self_check_option
@click.pass_context
def query(ctx, model, queryfile, out, self_check):
    """Evaluate the query and forall statements of a query file."""
    _finish(RunConfig('query', model=model, properties=queryfile, out=out, self_check=self_check,
                      **ctx.obj))


@cli.command()
@click.argument('model', type=click.Path(exists=True, dir_okay=False))
@click.option('--properties', type=click.Path(exists=True, dir_okay=False), required=True)
@click.option('--sure', type=NAMES, default='', help="Properties that must hold with probability 1.")
@click.option('--positive', type=NAMES, default='', help="Properties that must hold with positive probability.")
@click.option('--out', type=click.Path(dir_okay=False))
@_self_check_option
@click.pass_context
def qualitative(ctx, model, properties, sure, positive, out, self_check):
    """Decide a qualitative query; exit 0 yes, 1 no."""
    _finish(RunConfig('qualitative', model=model, properties=properties, sure=sure, positive=positive,
                      out=out, self_check=self_check, **ctx.obj))


def _pareto_options(fn):
    fn = click.option('--decimal', is_flag=True, help="Decimal instead of exact CSV cells.")(fn)
    fn = click.option('--format', 'fmt', type=click.Choice(['text', 'json', 'csv']), default='text',
                      show_default=True)(fn)
    fn = click.option('--out', type=click.Path(dir_okay=False))(fn)
    return fn


@cli.command()
@click.argument('model', type=click.Path(exists=True, dir_okay=False))
@_objective_options
@click.option('--epsilon', type=RATIONAL, default=None, help="Approximation factor, e.g. 1/100.")
@click.option('--exact2', 'exact', is_flag=True, help="Exact vertices (two objectives only).")
@_pareto_options
@_self_check_option
@click.pass_context
def pareto(ctx, model, targets, properties, epsilon, exact, out, fmt, decimal, self_check):
    """Approximate (or, for two objectives, compute exactly) the Pareto curve."""
    _finish(RunConfig('pareto', model=model, targets=targets, properties=properties, epsilon=epsilon, exact=exact,
                      out=out, fmt=fmt, decimal=decimal, self_check=self_check, **ctx.obj))


@cli.command()
@click.argument('model', type=click.Path(exists=True, dir_okay=False))
@_objective_options
@_pareto_options
@_self_check_option
@click.pass_context
def vertices(ctx, model, targets, properties, out, fmt, decimal, self_check):
    """Exact vertices of a bi-objective Pareto curve."""
    _finish(RunConfig('vertices', model=model, targets=targets, properties=properties, out=out, fmt=fmt,
                      decimal=decimal, self_check=self_check, **ctx.obj))


@cli.command('check-strategy')
@click.argument('model', type=click.Path(exists=True, dir_okay=False))
@click.argument('strategy', type=click.Path(exists=True, dir_okay=False))
@_objective_options
@click.option('--claims', type=NAMES, required=True, help="One claim per objective, e.g. '>=1/2,>0'.")
@click.pass_context
def check_strategy(ctx, model, strategy, targets, properties, claims):
    """Recompute exact probabilities under a strategy file and check claims; exit 0 pass, 1 fail."""
    _finish(RunConfig('check-strategy', model=model, strategy=strategy, targets=targets, properties=properties,
                      claims=claims, **ctx.obj))


@cli.command('gen-hard')
@click.option('--layers', type=int, required=True)
@click.option('--seed', type=int, default=0, show_default=True)
@click.option('--width', type=int, default=2, show_default=True)
@click.option('--out', type=click.Path(dir_okay=False))
@click.pass_context
def gen_hard(ctx, layers, seed, width, out):
    """Generate a layered instance with many Pareto vertices."""
    _finish(RunConfig('gen-hard', layers=layers, seed=seed, width=width, out=out, **ctx.obj))


@cli.command('gen-random')
@click.option('--seed', type=int, default=0, show_default=True)
@click.option('--states', type=int, default=6, show_default=True)
@click.option('--actions', type=int, default=2, show_default=True)
@click.option('--targets', 'targets_count', type=int, default=2, show_default=True)
@click.option('--out', type=click.Path(dir_okay=False))
@click.pass_context
def gen_random(ctx, seed, states, actions, targets_count, out):
    """Generate a small random model with absorbing targets T1..Tk."""
    _finish(RunConfig('gen-random', seed=seed, states=states, actions=actions, targets_count=targets_count,
                      out=out, **ctx.obj))


@cli.command('assume-guarantee')
@click.argument('model', type=click.Path(exists=True, dir_okay=False))
@click.option('--properties', type=click.Path(exists=True, dir_okay=False), required=True)
@click.option('--assume', required=True)
@click.option('--r1', type=RATIONAL, required=True)
@click.option('--guarantee', required=True)
@click.option('--r2', type=RATIONAL, required=True)
@click.option('--out', type=click.Path(dir_okay=False))
@click.pass_context
def assume_guarantee(ctx, model, properties, assume, r1, guarantee, r2, out):
    """Check Pr(assume) >= r1 implies Pr(guarantee) >= r2 for every strategy."""
    _finish(RunConfig('assume-guarantee', model=model, properties=properties, assume=assume, r1=r1,
                      guarantee=guarantee, r2=r2, out=out, **ctx.obj))


@cli.command('dump-lp')
@click.argument('model', type=click.Path(exists=True, dir_okay=False))
@_objective_options
@click.option('--out', type=click.Path(dir_okay=False))
@click.pass_context
def dump_lp_command(ctx, model, targets, properties, out):
    """Print the flow LP in CPLEX-style text."""
    _finish(RunConfig('dump-lp', model=model, targets=targets, properties=properties, out=out,
                      **ctx.obj))
