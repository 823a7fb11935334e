import json
from fractions import Fraction

import pytest
from click.testing import CliRunner

from engine.errors import QueryError
from engine.settings import LOG_LEVEL_ENV
from ui.cli import EXIT_ERROR, EXIT_NO, EXIT_YES, RunConfig, cli, parse_claims, run
from utils.persistence import parse_mdp, serialize_mdp

REACH_PROPS = 'property A = reach "P1";\nproperty B = reach "P2";\n'


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def props_file(tmp_path):
    path = tmp_path / 'props.q'
    path.write_text(REACH_PROPS)
    return str(path)


def test_validate(runner, model_file):
    result = runner.invoke(cli, ['validate', model_file])
    assert result.exit_code == EXIT_YES
    assert 'model ok: 6 states' in result.output
    assert 'propositions: P1, P2, dead' in result.output


def test_achievable_then_check_strategy(runner, tmp_path, model_file):
    out = str(tmp_path / 'sigma.json')
    result = runner.invoke(cli, ['achievable', model_file, '--targets', 'P1,P2', '--bound', '1/2,1/2', '--out', out])
    assert result.exit_code == EXIT_YES
    assert 'self-check' in result.output
    check = runner.invoke(cli, ['check-strategy', model_file, out, '--targets', 'P1,P2', '--claims', '>=1/2,>=1/2'])
    assert check.exit_code == EXIT_YES
    assert 'PASS' in check.output
    fail = runner.invoke(cli, ['check-strategy', model_file, out, '--targets', 'P1,P2', '--claims', '>1/2,>=1/2'])
    assert fail.exit_code == EXIT_NO


def test_achievable_no_and_errors(runner, tmp_path, model_file):
    strict = runner.invoke(cli, ['achievable', model_file, '--targets', 'P1,P2', '--bound', '1/2,1/2',
                                 '--strict', '1'])
    assert strict.exit_code == EXIT_NO
    assert 'not achievable' in strict.output
    short = runner.invoke(cli, ['achievable', model_file, '--targets', 'P1,P2', '--bound', '1/2'])
    assert short.exit_code == EXIT_ERROR
    assert 'expected 2 bounds' in short.output
    garbage = runner.invoke(cli, ['achievable', model_file, '--targets', 'P1,P2', '--bound', '1/2,x'])
    assert garbage.exit_code == EXIT_ERROR
    broken = tmp_path / 'broken.json'
    broken.write_text('{"states": [')
    bad_model = runner.invoke(cli, ['achievable', str(broken), '--targets', 'P1', '--bound', '1/2'])
    assert bad_model.exit_code == EXIT_ERROR
    assert 'error' in bad_model.output


def test_pareto_csv(runner, model_file):
    result = runner.invoke(cli, ['pareto', model_file, '--targets', 'P1,P2', '--exact2', '--format', 'csv'])
    assert result.exit_code == EXIT_YES
    lines = result.output.splitlines()
    assert lines[0] == 'P1,P2'
    assert '1/2,1/2' in lines
    assert '3/5,0' in lines


def test_pareto_json_and_text(runner, tmp_path, model_file):
    out = tmp_path / 'front' / 'pareto.json'
    result = runner.invoke(cli, ['pareto', model_file, '--targets', 'P1,P2', '--epsilon', '1/10',
                                 '--format', 'json', '--out', str(out)])
    assert result.exit_code == EXIT_YES
    doc = json.loads(out.read_text())
    assert doc['objectives'] == ['P1', 'P2']
    assert doc['epsilon'] == '1/10'
    assert ['1/2', '1/2'] in [p['values'] for p in doc['points']]
    text = runner.invoke(cli, ['vertices', model_file, '--targets', 'P1,P2'])
    assert text.exit_code == EXIT_YES
    assert '3 point(s)' in text.output


def test_query(runner, tmp_path, model_file):
    good = tmp_path / 'good.q'
    good.write_text(REACH_PROPS + 'query: Pr(A) >= 1/2 & Pr(B) >= 1/2;\nforall: Pr(A) <= 3/5;\n')
    result = runner.invoke(cli, ['query', model_file, str(good)])
    assert result.exit_code == EXIT_YES
    assert 'query 1: sat' in result.output
    assert 'forall 2: holds' in result.output
    bad = tmp_path / 'bad.q'
    bad.write_text(REACH_PROPS + 'query: Pr(A) > 3/5;\n')
    assert runner.invoke(cli, ['query', model_file, str(bad)]).exit_code == EXIT_NO


def test_qualitative(runner, tmp_path, memory_needed_model):
    model = tmp_path / 'memory.json'
    model.write_text(serialize_mdp(memory_needed_model))
    props = tmp_path / 'gf.q'
    props.write_text('property A = infinitely "P1";\nproperty B = infinitely "P2";\n')
    yes = runner.invoke(cli, ['qualitative', str(model), '--properties', str(props), '--positive', 'A,B'])
    assert yes.exit_code == EXIT_YES
    assert yes.output.startswith('yes')
    no = runner.invoke(cli, ['qualitative', str(model), '--properties', str(props), '--sure', 'A',
                             '--positive', 'B'])
    assert no.exit_code == EXIT_NO


def test_assume_guarantee(runner, model_file, props_file):
    violated = runner.invoke(cli, ['assume-guarantee', model_file, '--properties', props_file, '--assume', 'A',
                                   '--r1', '3/5', '--guarantee', 'B', '--r2', '1/10'])
    assert violated.exit_code == EXIT_NO
    assert 'violated' in violated.output
    holds = runner.invoke(cli, ['assume-guarantee', model_file, '--properties', props_file, '--assume', 'B',
                                '--r1', '4/5', '--guarantee', 'B', '--r2', '4/5'])
    assert holds.exit_code == EXIT_YES


def test_dump_lp(runner, model_file):
    result = runner.invoke(cli, ['dump-lp', model_file, '--targets', 'P1,P2'])
    assert result.exit_code == EXIT_YES
    assert 'Maximize' in result.output
    assert ' flow[s]: ' in result.output


def test_generators(runner):
    result = runner.invoke(cli, ['gen-random', '--seed', '3', '--states', '4'])
    assert result.exit_code == EXIT_YES
    m = parse_mdp(result.output)
    assert {'T1', 'T2'} <= m.propositions
    hard = runner.invoke(cli, ['gen-hard', '--layers', '3'])
    assert hard.exit_code == EXIT_YES
    assert len(parse_mdp(hard.output).states) == 8
    assert runner.invoke(cli, ['gen-hard', '--layers', '1']).exit_code == EXIT_ERROR


def test_run_without_click(model_file):
    outcome = run(RunConfig('achievable', model=model_file, targets=('P1', 'P2'), properties='x.q',
                            bounds=(0, 0)))
    assert outcome.exit_code == EXIT_ERROR
    assert 'not both' in outcome.text


def test_parse_claims():
    assert parse_claims(['>=1/2', ' > 0 ']) == [('>=', Fraction(1, 2)), ('>', 0)]
    with pytest.raises(QueryError):
        parse_claims(['~1/2'])


def test_caps_from_the_command_line(runner, tmp_path, model_file):
    wide = tmp_path / 'wide.q'
    wide.write_text(REACH_PROPS + 'query: Pr(A) >= 1/2 | Pr(B) >= 1/2;\n')
    assert runner.invoke(cli, ['query', model_file, str(wide)]).exit_code == EXIT_YES
    capped = runner.invoke(cli, ['--disjunct-cap', '1', 'query', model_file, str(wide)])
    assert capped.exit_code == EXIT_ERROR
    assert 'disjuncts' in capped.output


def test_log_level_is_checked(runner, monkeypatch, model_file):
    monkeypatch.delenv(LOG_LEVEL_ENV, raising=False)
    assert runner.invoke(cli, ['--log-level', 'debug', 'validate', model_file]).exit_code == EXIT_YES
    loud = runner.invoke(cli, ['--log-level', 'loud', 'validate', model_file])
    assert loud.exit_code == 2
    assert 'unknown log level' in loud.output
    monkeypatch.setenv(LOG_LEVEL_ENV, 'loud')
    assert runner.invoke(cli, ['validate', model_file]).exit_code == 2
