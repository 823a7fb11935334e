"""Exact predicates on points of [0,1]^k: dominance, 2-D upper hulls and downward-hull membership."""
from fractions import Fraction
from typing import Sequence

from .simplex import GE, LE, EQ, LinearProgram, LpStatus, solve_lp

Point = tuple[Fraction, ...]


def dominates(a: Sequence[Fraction], b: Sequence[Fraction]) -> bool:
    """a >= b componentwise and a != b."""
    return all(x >= y for x, y in zip(a, b)) and tuple(a) != tuple(b)


def non_dominated(points: Sequence[Point]) -> list[Point]:
    unique = sorted(set(tuple(p) for p in points))
    return [p for p in unique if not any(dominates(q, p) for q in unique)]


def _cross(o: Point, a: Point, b: Point) -> Fraction:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def pareto_vertices_2d(points: Sequence[Point]) -> list[Point]:
    """Vertices of the downward-closed convex hull, sorted by first coordinate."""
    front = sorted(non_dominated(points))
    hull = []
    for p in front:
        while len(hull) >= 2 and _cross(hull[-2], hull[-1], p) >= 0:
            hull.pop()
        hull.append(p)
    return hull


def in_downward_hull(target: Sequence[Fraction], points: Sequence[Point], strict: Sequence[int] = ()) -> bool:
    """Is target <= some convex combination of points (strictly in the given coordinates)?"""
    if not points:
        return False
    program = LinearProgram()
    lams = [program.add_variable(f'l{j}') for j in range(len(points))]
    program.add_constraint({v: 1 for v in lams}, EQ, 1, 'convex')
    if strict:
        program.add_variable('z')
        program.add_constraint({'z': 1}, LE, 1, 'cap')
    for i, r in enumerate(target):
        coeffs = {v: p[i] for v, p in zip(lams, points)}
        if i in strict:
            coeffs['z'] = Fraction(-1)
        program.add_constraint(coeffs, GE, r, f'coord{i}')
    solution = solve_lp(program, {'z': 1} if strict else {})
    if solution.status is not LpStatus.FEASIBLE:
        return False
    return not strict or solution.assignment['z'] > 0


def downward_hull_vertices(points: Sequence[Point]) -> list[Point]:
    """Points that are not inside the downward hull of the others."""
    front = non_dominated(points)
    if front and len(front[0]) == 2:
        return pareto_vertices_2d(front)
    return [p for p in front if not in_downward_hull(p, [q for q in front if q != p])]
