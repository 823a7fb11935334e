import io
import logging
from fractions import Fraction
from typing import Optional, Sequence

import pandas as pd

from engine.oracle import ValidationReport
from engine.pareto import ParetoResult
from utils.persistence import strategy_document
from utils.rationals import render, render_vector, to_decimal

logger = logging.getLogger(__name__)


def vector_line(names: Sequence[str], values: Sequence[Fraction]) -> str:
    return ', '.join(f"{n} = {render(v)} (~{to_decimal(v, 6)})" for n, v in zip(names, values))


def validation_table(report: ValidationReport) -> str:
    """One row per claim: objective, claim, exact value, verdict."""
    rows = []
    for r in report.rows:
        rows.append({
            'objective': r.name,
            'claim': f"{r.comparator} {render(r.bound)}",
            'actual': render(r.actual),
            'decimal': to_decimal(r.actual, 6),
            'verdict': 'PASS' if r.passed else 'FAIL',
        })
    if not rows:
        return "(no claims)\n"
    return pd.DataFrame(rows).to_string(index=False) + '\n'


def pareto_document(result: ParetoResult, strategies: Optional[Sequence] = None) -> dict:
    """Exact points with decimal renderings; strategies attached by index when given."""
    points = []
    for i, p in enumerate(result.points):
        entry = {
            'values': [render(v) for v in p.values],
            'decimal': [to_decimal(v) for v in p.values],
        }
        if p.weights is not None:
            entry['weights'] = [render(w) for w in p.weights]
        if strategies is not None:
            entry['strategy'] = strategy_document(strategies[i])
        points.append(entry)
    return {
        'objectives': list(result.names),
        'epsilon': render(result.epsilon) if result.epsilon is not None else None,
        'lp_calls': result.lp_calls,
        'points': points,
    }


def pareto_frame(result: ParetoResult, decimal: bool = False) -> pd.DataFrame:
    """One column per objective. Rows sorted by the first objective for k <= 3, raw order otherwise."""
    points = list(result.points)
    if len(result.names) <= 3:
        points.sort(key=lambda p: p.values)
    else:
        logger.warning("%d objectives: writing raw CSV rows without plot ordering", len(result.names))
    fmt = to_decimal if decimal else render
    rows = [[fmt(v) for v in p.values] for p in points]
    if not rows:
        rows = [[fmt(Fraction(0))] * len(result.names)]
    return pd.DataFrame(rows, columns=list(result.names))


def emit_plot_data(result: ParetoResult, path: Optional[str] = None, decimal: bool = False) -> str:
    """Writes the CSV to `path` when given and returns it as text."""
    frame = pareto_frame(result, decimal)
    buffer = io.StringIO()
    frame.to_csv(buffer, index=False)
    text = buffer.getvalue()
    if path:
        with open(path, 'w') as f:
            f.write(text)
        logger.info("plot data written to %s", path)
    return text


def points_table(result: ParetoResult) -> str:
    lines = [f"{len(result.points)} point(s) for objectives {', '.join(result.names)}"]
    for p in result.points:
        lines.append(f"  {render_vector(p.values)}")
    return '\n'.join(lines) + '\n'
