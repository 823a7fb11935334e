"""Exact two-phase primal simplex over Fractions, with Bland's rule."""
import logging
from dataclasses import dataclass, field
from enum import Enum, auto
from fractions import Fraction
from typing import Mapping, Optional

from .errors import SolverError

logger = logging.getLogger(__name__)

LE, GE, EQ = '<=', '>=', '='


class LpStatus(Enum):
    FEASIBLE = auto()
    INFEASIBLE = auto()
    UNBOUNDED = auto()


@dataclass
class Constraint:
    coeffs: dict[str, Fraction]
    sense: str
    rhs: Fraction
    name: str = ''


@dataclass
class LinearProgram:
    """Named nonnegative variables and linear rows."""
    variables: list[str] = field(default_factory=list)
    rows: list[Constraint] = field(default_factory=list)

    def add_variable(self, name: str) -> str:
        if name in self._known():
            raise SolverError(f"duplicate variable {name!r}")
        self.variables.append(name)
        return name

    def _known(self) -> set[str]:
        return set(self.variables)

    def add_constraint(self, coeffs: Mapping[str, Fraction], sense: str, rhs, name: str = '') -> None:
        if sense not in (LE, GE, EQ):
            raise SolverError(f"unknown constraint sense {sense!r}")
        known = self._known()
        unknown = [v for v in coeffs if v not in known]
        if unknown:
            raise SolverError(f"constraint {name or '?'} uses undeclared variable {unknown[0]!r}")
        clean = {v: Fraction(c) for v, c in coeffs.items() if c != 0}
        self.rows.append(Constraint(clean, sense, Fraction(rhs), name))

    def copy(self) -> 'LinearProgram':
        return LinearProgram(list(self.variables),
                             [Constraint(dict(r.coeffs), r.sense, r.rhs, r.name) for r in self.rows])


@dataclass(frozen=True)
class LpSolution:
    status: LpStatus
    assignment: Mapping[str, Fraction] = field(default_factory=dict)
    objective_value: Optional[Fraction] = None
    pivots: int = 0

    @property
    def feasible(self) -> bool:
        return self.status is LpStatus.FEASIBLE


class _Tableau:
    """Dense tableau B^-1 [A | b] with a reduced-cost row kept up to date by pivots."""

    def __init__(self, matrix, rhs, basis):
        self.A = matrix
        self.b = rhs
        self.basis = basis
        self.cost = []
        self.value = Fraction(0)
        self.pivots = 0

    def set_objective(self, c: list[Fraction]) -> None:
        cost = list(c)
        value = Fraction(0)
        for i, j in enumerate(self.basis):
            cj = c[j]
            if cj:
                row = self.A[i]
                for col, a in enumerate(row):
                    if a:
                        cost[col] -= cj * a
                value += cj * self.b[i]
        self.cost = cost
        self.value = value

    def pivot(self, i: int, j: int) -> None:
        row = self.A[i]
        piv = row[j]
        nz = [(col, a / piv) for col, a in enumerate(row) if a]
        new_row = [Fraction(0)] * len(row)
        for col, a in nz:
            new_row[col] = a
        self.A[i] = new_row
        self.b[i] /= piv
        for k, other in enumerate(self.A):
            if k == i:
                continue
            f = other[j]
            if f:
                for col, a in nz:
                    other[col] -= f * a
                self.b[k] -= f * self.b[i]
        f = self.cost[j]
        if f:
            for col, a in nz:
                self.cost[col] -= f * a
            self.value += f * self.b[i]
        self.basis[i] = j
        self.pivots += 1

    def run(self, allowed: int) -> str:
        """Maximizes with Bland's rule over the first `allowed` columns."""
        while True:
            entering = next((j for j in range(allowed) if self.cost[j] > 0), None)
            if entering is None:
                return 'optimal'
            best = None
            for i, row in enumerate(self.A):
                a = row[entering]
                if a > 0:
                    key = (self.b[i] / a, self.basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                return 'unbounded'
            self.pivot(best[1], entering)


def solve_lp(program: LinearProgram, objective: Mapping[str, Fraction], maximize: bool = True) -> LpSolution:
    """Solves the program exactly; variables are nonnegative."""
    names = list(program.variables)
    col = {v: j for j, v in enumerate(names)}
    n = len(names)
    rows = []
    for r in program.rows:
        coeffs, sense, rhs = dict(r.coeffs), r.sense, r.rhs
        if rhs < 0:
            coeffs = {v: -c for v, c in coeffs.items()}
            rhs = -rhs
            sense = {LE: GE, GE: LE, EQ: EQ}[sense]
        rows.append((coeffs, sense, rhs))

    # 1. COLUMNS: structural, then slack/surplus, then artificial
    n_slack = sum(1 for _, s, _ in rows if s != EQ)
    n_art = sum(1 for _, s, _ in rows if s != LE)
    width = n + n_slack + n_art
    matrix, rhs_col, basis = [], [], []
    slack_at, art_at = n, n + n_slack
    for coeffs, sense, rhs in rows:
        line = [Fraction(0)] * width
        for v, c in coeffs.items():
            line[col[v]] = c
        if sense == LE:
            line[slack_at] = Fraction(1)
            basis.append(slack_at)
            slack_at += 1
        else:
            if sense == GE:
                line[slack_at] = Fraction(-1)
                slack_at += 1
            line[art_at] = Fraction(1)
            basis.append(art_at)
            art_at += 1
        matrix.append(line)
        rhs_col.append(rhs)
    tab = _Tableau(matrix, rhs_col, basis)
    real = n + n_slack

    # 2. PHASE ONE
    if n_art:
        tab.set_objective([Fraction(0)] * real + [Fraction(-1)] * n_art)
        tab.run(width)
        if tab.value < 0:
            logger.debug("LP infeasible after %d pivots", tab.pivots)
            return LpSolution(LpStatus.INFEASIBLE, pivots=tab.pivots)
        for i in range(len(tab.A) - 1, -1, -1):
            if tab.basis[i] < real:
                continue
            j = next((j for j in range(real) if tab.A[i][j] != 0), None)
            if j is None:
                del tab.A[i]
                del tab.b[i]
                del tab.basis[i]
            else:
                tab.pivot(i, j)

    # 3. PHASE TWO
    sign = 1 if maximize else -1
    c = [Fraction(0)] * width
    for v, coef in objective.items():
        if v not in col:
            raise SolverError(f"objective uses undeclared variable {v!r}")
        c[col[v]] = sign * Fraction(coef)
    tab.set_objective(c)
    if tab.run(real) == 'unbounded':
        return LpSolution(LpStatus.UNBOUNDED, pivots=tab.pivots)

    values = [Fraction(0)] * width
    for i, j in enumerate(tab.basis):
        values[j] = tab.b[i]
    assignment = {v: values[col[v]] for v in names}
    objective_value = sum((Fraction(coef) * assignment[v] for v, coef in objective.items()), Fraction(0))
    logger.debug("LP solved: %d variables, %d rows, %d pivots", n, len(rows), tab.pivots)
    return LpSolution(LpStatus.FEASIBLE, assignment, objective_value, tab.pivots)
