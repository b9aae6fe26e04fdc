"""Data models for mimodof."""

import csv
import io
import math
from collections.abc import Iterable
from enum import StrEnum
from fractions import Fraction
from typing import Annotated, Any, Self

from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    PlainSerializer,
    PlainValidator,
    ValidationError,
    WithJsonSchema,
    computed_field,
    field_validator,
    model_validator,
)

from mimodof.exceptions import ProfileError


def _to_fraction(value: Any) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ValueError("booleans are not rationals")
    try:
        if isinstance(value, int | str):
            return Fraction(value)
        if isinstance(value, dict):
            return Fraction(int(value["num"]), int(value["den"]))
    except (KeyError, ZeroDivisionError) as e:
        raise ValueError(f"Cannot interpret {value!r} as a rational") from e
    raise ValueError(f"Cannot interpret {value!r} as a rational")


def _dof_json(value: Fraction) -> dict[str, int]:
    return {"num": value.numerator, "den": value.denominator}


DoFValue = Annotated[
    Fraction,
    PlainValidator(_to_fraction),
    PlainSerializer(_dof_json, when_used="json"),
    WithJsonSchema(
        {
            "type": "object",
            "properties": {
                "num": {"type": "integer"},
                "den": {"type": "integer", "minimum": 1},
            },
            "required": ["num", "den"],
        }
    ),
]
"""Exact DoF quantity, serialized as {"num": n, "den": d} in lowest terms."""

Rational = Annotated[
    Fraction,
    PlainValidator(_to_fraction),
    PlainSerializer(str, when_used="json"),
    WithJsonSchema({"type": "string", "pattern": r"^-?\d+(/\d+)?$"}),
]
"""Exact rational coordinate, serialized as the string "n/d"."""


def _finite_or_null(value: float) -> float | None:
    return value if math.isfinite(value) else None


JsonFloat = Annotated[
    float, PlainSerializer(_finite_or_null, return_type=float | None, when_used="json")
]
"""Float written to JSON as null when infinite (singular) or NaN (no data)."""


class Tolerance(BaseModel):
    """Thresholds turning "almost surely" statements into numeric tests."""

    model_config = ConfigDict(frozen=True)

    rank_rel_tol: float = Field(default=1e-10, gt=0, lt=1e-3)
    zero_rel_tol: float = Field(default=1e-8, gt=0, lt=1)

    @model_validator(mode="after")
    def _rank_below_zero_tol(self) -> Self:
        # null vectors cut at the rank threshold must meet the residual contract
        if self.rank_rel_tol > self.zero_rel_tol:
            raise ValueError("rank_rel_tol must not exceed zero_rel_tol")
        return self


DEFAULT_TOLERANCE = Tolerance()


class AntennaProfile(BaseModel):
    """Antenna counts M1 >= M2 >= ... >= MK >= 1, one per transmitter-receiver pair."""

    model_config = ConfigDict(frozen=True)

    M: tuple[int, ...]

    @field_validator("M")
    @classmethod
    def _check_counts(cls, counts: tuple[int, ...]) -> tuple[int, ...]:
        if not counts:
            raise ValueError("a profile needs at least one user")
        if any(m < 1 for m in counts):
            raise ValueError("every user needs at least one antenna")
        if any(a < b for a, b in zip(counts, counts[1:], strict=False)):
            raise ValueError("antenna counts must be non-increasing")
        return counts

    @classmethod
    def normalized(cls, counts: Iterable[int]) -> "AntennaProfile":
        """Build a profile from counts in any order."""
        return cls(M=tuple(sorted(counts, reverse=True)))

    @classmethod
    def parse(cls, text: str) -> tuple["AntennaProfile", bool]:
        """
        Parse comma-separated antenna counts.

        Returns:
            Tuple of (profile, reordered) where reordered tells whether sorting
            changed the order given in the text.
        """
        try:
            counts = [int(part) for part in text.split(",") if part.strip()]
        except ValueError as e:
            raise ProfileError(f"Cannot parse antenna counts from {text!r}") from e
        try:
            profile = cls.normalized(counts)
        except ValidationError as e:
            raise ProfileError(f"Invalid antenna profile {text!r}: {e.errors()[0]['msg']}") from e
        return profile, list(profile.M) != counts

    @property
    def K(self) -> int:
        return len(self.M)

    @property
    def M1(self) -> int:
        return self.M[0]

    @property
    def total(self) -> int:
        return sum(self.M)

    def __str__(self) -> str:
        return "(" + ",".join(str(m) for m in self.M) + ")"


class Regime(StrEnum):
    DOMINANT_USER = "dominant_user"
    DECOMPOSITION = "decomposition"


class TransformVariant(StrEnum):
    EXAMPLE_221 = "example221"
    GENERAL_3USER = "general3"


class PartitionPlan(BaseModel):
    """Three cooperating user groups, none holding more antennas than the other two."""

    model_config = ConfigDict(frozen=True)

    groups: tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]] = Field(
        description="0-based user indices"
    )
    sums: tuple[int, int, int]

    @property
    def total(self) -> int:
        return sum(self.sums)

    def is_balanced(self) -> bool:
        return all(s <= self.total - s for s in self.sums)

    def covers(self, profile: AntennaProfile) -> bool:
        """Groups are nonempty, disjoint, cover every user and carry the stated sums."""
        members = [u for group in self.groups for u in group]
        if any(not group for group in self.groups):
            return False
        if sorted(members) != list(range(profile.K)):
            return False
        return all(
            sum(profile.M[u] for u in group) == s
            for group, s in zip(self.groups, self.sums, strict=True)
        )

    def one_based(self) -> list[list[int]]:
        return [[u + 1 for u in group] for group in self.groups]


class DoFReport(BaseModel):
    """Every bound on the sum DoF of one antenna profile."""

    profile: list[int]
    inner: DoFValue
    decomposition: DoFValue
    outer_coop: DoFValue | None = Field(default=None, description="None for a single user")
    witness: list[int] | None = Field(default=None, description="1-based subset S")
    theorem: DoFValue
    regime: Regime
    coop_tight: bool
    partition: list[list[int]] | None = Field(default=None, description="1-based groups")
    partition_sums: list[int] | None = None
    outer_partition: DoFValue | None = None

    @model_validator(mode="after")
    def _ordered_bounds(self) -> Self:
        if self.inner > self.theorem:
            raise ValueError("inner bound exceeds the sum DoF")
        if self.outer_coop is not None and self.theorem > self.outer_coop:
            raise ValueError("sum DoF exceeds the cooperation outer bound")
        return self


class RatePoint(BaseModel):
    power: float = Field(gt=0, description="Linear transmit power P")
    rate_bits: float = Field(ge=0, description="Sum rate in bits per channel use")


class RateCurve(BaseModel):
    """Sum rate of one scheme over a power grid."""

    points: list[RatePoint]
    scheme: str
    seed: int

    @field_validator("points")
    @classmethod
    def _monotone(cls, points: list[RatePoint]) -> list[RatePoint]:
        for prev, cur in zip(points, points[1:], strict=False):
            if cur.power <= prev.power:
                raise ValueError("powers must be strictly increasing")
            if cur.rate_bits < prev.rate_bits:
                raise ValueError("rates must be nondecreasing in power")
        return points

    @computed_field
    @property
    def powers(self) -> list[float]:
        return [p.power for p in self.points]

    def rates(self) -> list[float]:
        return [p.rate_bits for p in self.points]

    def to_csv(self) -> str:
        """CSV with header P,rate_bits."""
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["P", "rate_bits"])
        for point in self.points:
            writer.writerow([repr(point.power), repr(point.rate_bits)])
        return buffer.getvalue()


class SlopeReport(RateCurve):
    """Rate curve of one profile together with its fitted DoF slope."""

    profile: list[int]
    slope: float


class TrialFailure(BaseModel):
    trial: int
    seed: int
    step: str | None = Field(default=None, description="Construction step for non-generic inputs")
    message: str


class MonteCarloReport(BaseModel):
    """Robustness of one transform over independent channel realizations."""

    profile: list[int]
    variant: TransformVariant
    trials: int
    seed: int
    tolerance: Tolerance
    successes: int
    worst_residual: JsonFloat = Field(description="null when no trial produced a pair")
    worst_condition: JsonFloat = Field(description="null when singular or no pair was built")
    failures: list[TrialFailure] = Field(default_factory=list)

    @computed_field
    @property
    def success_fraction(self) -> float:
        return self.successes / self.trials
