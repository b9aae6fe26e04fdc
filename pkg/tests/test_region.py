"""Tests for 2-D region vertex enumeration and maximization."""

from fractions import Fraction as F

import pytest

from mimodof.bounds.region import (
    HalfPlane,
    Region2D,
    polytope_max,
    region_example_221,
    region_report,
    region_vertices,
    upper_boundary,
)
from mimodof.exceptions import RegionError

PENTAGON = {(F(0), F(0)), (F(1), F(0)), (F(1), F(1, 2)), (F(1, 2), F(1)), (F(0), F(1))}


def grid_max(region: Region2D, objective: tuple[F, F], step: F, limit: F) -> F:
    """Maximum of the objective over grid points of [0, limit]^2 inside the region."""
    n = int(limit / step)
    a, b = objective
    return max(
        a * (i * step) + b * (j * step)
        for i in range(n + 1)
        for j in range(n + 1)
        if region.contains((i * step, j * step))
    )


class TestExampleRegion:
    def test_vertices(self) -> None:
        assert set(region_vertices(region_example_221())) == PENTAGON

    def test_vertices_counter_clockwise(self) -> None:
        vertices = region_vertices(region_example_221())
        area2 = sum(
            v[0] * w[1] - w[0] * v[1]
            for v, w in zip(vertices, vertices[1:] + vertices[:1], strict=True)
        )
        assert area2 > 0

    def test_upper_boundary(self) -> None:
        assert upper_boundary(region_example_221()) == [(F(1, 2), F(1)), (F(1), F(1, 2))]

    @pytest.mark.parametrize(
        ("objective", "maximum", "argmax"),
        [
            ((2, 1), F(5, 2), (F(1), F(1, 2))),
            ((1, 1), F(3, 2), (F(1, 2), F(1))),
            ((0, 1), F(1), (F(0), F(1))),
            ((1, 2), F(5, 2), (F(1, 2), F(1))),
        ],
    )
    def test_polytope_max(
        self, objective: tuple[int, int], maximum: F, argmax: tuple[F, F]
    ) -> None:
        assert polytope_max(region_example_221(), objective) == (maximum, argmax)

    @pytest.mark.parametrize(
        "objective", [(F(2), F(1)), (F(1), F(1)), (F(3), F(-1)), (F(1, 3), F(1))]
    )
    def test_grid_oracle(self, objective: tuple[F, F]) -> None:
        region = region_example_221()
        maximum, _ = polytope_max(region, objective)
        assert maximum == grid_max(region, objective, F(1, 64), F(3, 2))


class TestDegenerateRegions:
    def test_empty(self) -> None:
        region = Region2D(constraints=(HalfPlane(a=1, b=1, c=-1),))
        with pytest.raises(RegionError, match="empty"):
            region_vertices(region)

    def test_unbounded(self) -> None:
        region = Region2D(constraints=(HalfPlane(a=1, b=-1, c=0),))
        with pytest.raises(RegionError, match="unbounded"):
            polytope_max(region, (1, 1))

    def test_only_nonnegativity(self) -> None:
        with pytest.raises(RegionError, match="unbounded"):
            region_vertices(Region2D(constraints=()))

    def test_single_point(self) -> None:
        region = Region2D(constraints=(HalfPlane(a=1, b=1, c=0),))
        assert region_vertices(region) == [(F(0), F(0))]
        assert polytope_max(region, (1, 1)) == (F(0), (F(0), F(0)))

    def test_rational_coefficients_from_strings(self) -> None:
        region = Region2D(
            constraints=(HalfPlane(a="1/2", b=0, c=1), HalfPlane(a=0, b=1, c="3/4"))
        )
        assert polytope_max(region, (1, 1)) == (F(11, 4), (F(2), F(3, 4)))


def test_report_serialization() -> None:
    report = region_report(region_example_221(), (F(2), F(1)))
    document = report.model_dump(mode="json")
    assert document["maximum"] == {"num": 5, "den": 2}
    assert document["argmax"] == ["1", "1/2"]
    assert ["1/2", "1"] in document["vertices"]
    assert document["upper_boundary"] == [["1/2", "1"], ["1", "1/2"]]
    assert "1*d + 1*d' <= 3/2" in document["constraints"]
