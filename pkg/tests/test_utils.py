from decimal import Decimal
from fractions import Fraction

import pytest

from engine.oracle import Claim, build_hull_oracle, validate_strategy
from engine.pareto import exact_vertices_biobjective
from engine.reduction import reachability_instance
from engine.settings import LOG_LEVEL_ENV, WORKERS_ENV, EngineSettings
from engine.workers import run_batches
from ui.reports import pareto_frame, validation_table, vector_line
from utils.rationals import parse_probability, parse_rational, parse_vector, render, render_vector, to_decimal


# --- RATIONALS ---

@pytest.mark.parametrize("text, value", [
    ("1/2", Fraction(1, 2)), ("0.25", Fraction(1, 4)), (" 3 ", Fraction(3)), (7, Fraction(7)),
    (Fraction(2, 3), Fraction(2, 3)), (Decimal("0.1"), Fraction(1, 10)), (Decimal("1E-3"), Fraction(1, 1000)),
])
def test_parse_rational(text, value):
    assert parse_rational(text) == value


@pytest.mark.parametrize("text", [0.5, True, "1/0", "half", "", Decimal("NaN"), Decimal("Infinity")])
def test_parse_rational_rejects(text):
    with pytest.raises(ValueError):
        parse_rational(text)


def test_probability_and_vector():
    assert parse_probability("1") == 1
    with pytest.raises(ValueError, match="outside"):
        parse_probability("4/3")
    assert parse_vector("1/2, 0.3,") == (Fraction(1, 2), Fraction(3, 10))
    with pytest.raises(ValueError):
        parse_vector(" , ")


def test_rendering():
    assert render(Fraction(6, 3)) == '2'
    assert render(Fraction(-3, 9)) == '-1/3'
    assert to_decimal(Fraction(1, 3), 4) == '0.3333'
    assert to_decimal(Fraction(-2, 3), 3) == '-0.667'
    assert render_vector((Fraction(1, 2), 0)) == '(1/2, 0)'


# --- SETTINGS ---

def test_settings_from_env(monkeypatch):
    monkeypatch.setenv(WORKERS_ENV, '3')
    assert EngineSettings.from_env().workers == 3
    assert EngineSettings.from_env(workers=5).workers == 5
    assert EngineSettings.from_env(workers=None).workers == 3
    monkeypatch.delenv(WORKERS_ENV)
    assert EngineSettings.from_env().workers == 1


def test_log_level_from_env(monkeypatch):
    monkeypatch.delenv(LOG_LEVEL_ENV, raising=False)
    assert EngineSettings.from_env().log_level == 'WARNING'
    monkeypatch.setenv(LOG_LEVEL_ENV, 'debug')
    assert EngineSettings.from_env().log_level == 'DEBUG'
    assert EngineSettings.from_env(log_level='INFO').log_level == 'INFO'
    monkeypatch.setenv(LOG_LEVEL_ENV, 'loud')
    with pytest.raises(ValueError, match="unknown log level"):
        EngineSettings.from_env()


def test_settings_validation():
    with pytest.raises(ValueError):
        EngineSettings(workers=0)
    with pytest.raises(ValueError):
        EngineSettings(switch_probability=Fraction(1))


# --- WORKERS ---

def test_run_batches_keeps_order():
    progress = []
    settings = EngineSettings(workers=3, batch_size=2)
    result = run_batches(lambda x: x * x, range(11), settings, lambda done, total: progress.append((done, total)))
    assert result == [x * x for x in range(11)]
    assert progress[-1] == (11, 11)
    assert len(progress) == 2


def test_run_batches_inline():
    progress = []
    assert run_batches(str, [1, 2], progress=lambda d, t: progress.append((d, t))) == ['1', '2']
    assert progress == [(2, 2)]


@pytest.mark.parametrize("workers, batch_size", [(1, 1), (2, 3), (8, 64)])
def test_run_batches_same_for_any_worker_count(workers, batch_size):
    items = [Fraction(i, 7) for i in range(20)]
    settings = EngineSettings(workers=workers, batch_size=batch_size)
    assert run_batches(lambda q: q * q, items, settings) == [q * q for q in items]


def test_oracle_with_workers(three_action_model):
    targets = [frozenset({'p1'}), frozenset({'p2'})]
    serial = build_hull_oracle(three_action_model, targets)
    threaded = build_hull_oracle(three_action_model, targets, settings=EngineSettings(workers=2, batch_size=1))
    assert serial == threaded


# --- REPORTS ---

def test_reports(three_action_model):
    model = reachability_instance(three_action_model, ['P1', 'P2']).model
    result = exact_vertices_biobjective(model)
    frame = pareto_frame(result, decimal=True)
    assert list(frame.columns) == ['P1', 'P2']
    assert frame.iloc[1].tolist() == ['0.500000000000', '0.500000000000']
    assert vector_line(('P1',), (Fraction(1, 3),)) == 'P1 = 1/3 (~0.333333)'
    strategy = result.points[1].strategy.completed(three_action_model)
    report = validate_strategy(three_action_model, strategy, [frozenset({'p1'})], [Claim('P1', '>', Fraction(1, 2))])
    table = validation_table(report)
    assert 'FAIL' in table
    assert '1/2' in table
