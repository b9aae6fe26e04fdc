"""Two-dimensional DoF regions: exact vertex enumeration and linear maximization."""

import math
from fractions import Fraction
from itertools import combinations

from pydantic import BaseModel, ConfigDict

from mimodof.exceptions import RegionError
from mimodof.models import DoFValue, Rational

Point = tuple[Fraction, Fraction]


class HalfPlane(BaseModel):
    """a * d + b * d' <= c."""

    model_config = ConfigDict(frozen=True)

    a: Rational
    b: Rational
    c: Rational

    def contains(self, point: Point) -> bool:
        return self.a * point[0] + self.b * point[1] <= self.c

    def __str__(self) -> str:
        return f"{self.a}*d + {self.b}*d' <= {self.c}"


NONNEGATIVITY = (
    HalfPlane(a=-1, b=0, c=0),
    HalfPlane(a=0, b=-1, c=0),
)


class Region2D(BaseModel):
    """Per-user DoF pairs (d, d') cut out by half-planes; d, d' >= 0 is implied."""

    model_config = ConfigDict(frozen=True)

    constraints: tuple[HalfPlane, ...]

    def all_constraints(self) -> tuple[HalfPlane, ...]:
        return self.constraints + NONNEGATIVITY

    def contains(self, point: Point) -> bool:
        return all(h.contains(point) for h in self.all_constraints())


class RegionReport(BaseModel):
    constraints: list[str]
    vertices: list[tuple[Rational, Rational]]
    upper_boundary: list[tuple[Rational, Rational]]
    objective: tuple[Rational, Rational]
    maximum: DoFValue
    argmax: tuple[Rational, Rational]


def region_example_221() -> Region2D:
    """
    Dimension-counting region of the (2,2,1) channel with d1 = d2 = d and d3 = d'.

    2d <= 2 is stored reduced to d <= 1.
    """
    return Region2D(
        constraints=(
            HalfPlane(a=1, b=0, c=1),
            HalfPlane(a=0, b=1, c=1),
            HalfPlane(a=1, b=1, c=Fraction(3, 2)),
        )
    )


def _intersection(h1: HalfPlane, h2: HalfPlane) -> Point | None:
    det = h1.a * h2.b - h2.a * h1.b
    if det == 0:
        return None
    return (
        (h1.c * h2.b - h2.c * h1.b) / det,
        (h1.a * h2.c - h2.a * h1.c) / det,
    )


def _is_bounded(region: Region2D) -> bool:
    # A nonzero recession direction r >= 0 lies on an axis or on some constraint line.
    candidates: list[Point] = [(Fraction(1), Fraction(0)), (Fraction(0), Fraction(1))]
    for h in region.constraints:
        candidates += [(h.b, -h.a), (-h.b, h.a)]
    for r in candidates:
        if r[0] < 0 or r[1] < 0 or r == (0, 0):
            continue
        if all(h.a * r[0] + h.b * r[1] <= 0 for h in region.constraints):
            return False
    return True


def region_vertices(region: Region2D) -> list[Point]:
    """Vertices of a bounded nonempty region, counter-clockwise around the centroid."""
    vertices: list[Point] = []
    for h1, h2 in combinations(region.all_constraints(), 2):
        point = _intersection(h1, h2)
        if point is not None and region.contains(point) and point not in vertices:
            vertices.append(point)
    # inside the nonnegative quadrant every nonempty region has a vertex
    if not vertices:
        raise RegionError("Region is empty")
    if not _is_bounded(region):
        raise RegionError("Region is unbounded")

    cx = sum(float(v[0]) for v in vertices) / len(vertices)
    cy = sum(float(v[1]) for v in vertices) / len(vertices)
    return sorted(vertices, key=lambda v: math.atan2(float(v[1]) - cy, float(v[0]) - cx))


def upper_boundary(region: Region2D) -> list[Point]:
    """Vertices not dominated componentwise by another vertex, sorted by d."""
    vertices = region_vertices(region)
    return sorted(
        v
        for v in vertices
        if not any(w != v and w[0] >= v[0] and w[1] >= v[1] for w in vertices)
    )


def polytope_max(
    region: Region2D, objective: tuple[Fraction | int, Fraction | int]
) -> tuple[Fraction, Point]:
    """
    Maximize a * d + b * d' over the region.

    Returns:
        Tuple of (maximum, vertex) with the lexicographically smallest
        maximizing vertex.
    """
    a, b = Fraction(objective[0]), Fraction(objective[1])
    best = max(sorted(region_vertices(region)), key=lambda v: a * v[0] + b * v[1])
    return a * best[0] + b * best[1], best


def region_report(region: Region2D, objective: tuple[Fraction, Fraction]) -> RegionReport:
    maximum, argmax = polytope_max(region, objective)
    return RegionReport(
        constraints=[str(h) for h in region.all_constraints()],
        vertices=region_vertices(region),
        upper_boundary=upper_boundary(region),
        objective=objective,
        maximum=maximum,
        argmax=argmax,
    )
