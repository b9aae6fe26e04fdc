"""Numerical verification of beamforming/shaping pairs against a zero pattern."""

from collections.abc import Iterator, Sequence
from typing import Self

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, ConfigDict, Field, computed_field, model_validator

from mimodof.channel import ChannelRealization
from mimodof.exceptions import ShapeMismatchError
from mimodof.models import DEFAULT_TOLERANCE, JsonFloat, Tolerance
from mimodof.numerics import ComplexMatrix, as_matrix, condition_number, numerical_rank
from mimodof.numerics import spectral_norm
from mimodof.transform.pattern import ZeroPattern

DEFAULT_CONDITION_LIMIT = 1e8


class TransformPair(BaseModel):
    """Per-user beamforming V[i] (columns) and shaping U[i] (rows), all square."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    V: tuple[ComplexMatrix, ...]
    U: tuple[ComplexMatrix, ...]

    @model_validator(mode="after")
    def _check_square(self) -> Self:
        if len(self.V) != len(self.U):
            raise ValueError("V and U cover different numbers of users")
        for name, matrix in self.named():
            rows, cols = matrix.shape
            if rows != cols:
                raise ValueError(f"{name} is {rows}x{cols}, expected square")
        return self

    @classmethod
    def from_matrices(
        cls, V: Sequence[npt.ArrayLike], U: Sequence[npt.ArrayLike]
    ) -> "TransformPair":
        try:
            return cls(V=tuple(_readonly(v) for v in V), U=tuple(_readonly(u) for u in U))
        except ValueError as e:
            raise ShapeMismatchError(str(e)) from e

    def named(self) -> Iterator[tuple[str, ComplexMatrix]]:
        for i, (v, u) in enumerate(zip(self.V, self.U, strict=True), start=1):
            yield f"U{i}", u
            yield f"V{i}", v


def _readonly(a: npt.ArrayLike) -> ComplexMatrix:
    matrix = np.array(as_matrix(a), copy=True)
    matrix.flags.writeable = False
    return matrix


class BlockResidual(BaseModel):
    """Largest entry of a required-zero block relative to ||U_i|| ||H_ij|| ||V_j||."""

    receiver: int
    transmitter: int
    row_block: int
    col_block: int
    rows: int
    cols: int
    residual: JsonFloat


class VerificationReport(BaseModel):
    """Required-zero residuals and invertibility of one transform pair (1-based indices)."""

    residuals: list[BlockResidual]
    conditions: dict[str, JsonFloat] = Field(description="null when singular")
    direct_ranks: list[int]
    zero_rel_tol: float
    condition_limit: float

    @computed_field(return_type=JsonFloat)
    @property
    def max_residual(self) -> float:
        return max((r.residual for r in self.residuals), default=0.0)

    @computed_field(return_type=JsonFloat)
    @property
    def max_condition(self) -> float:
        return max(self.conditions.values(), default=1.0)

    @computed_field
    @property
    def residual_ok(self) -> bool:
        return self.max_residual <= self.zero_rel_tol

    @computed_field
    @property
    def invertible(self) -> bool:
        return self.max_condition <= self.condition_limit

    @computed_field
    @property
    def passed(self) -> bool:
        return self.residual_ok and self.invertible


def transformed_blocks(
    ch: ChannelRealization, pair: TransformPair
) -> tuple[tuple[ComplexMatrix, ...], ...]:
    """H_ij = U_i Hbar_ij V_j for every pair of users."""
    k = ch.profile.K
    if len(pair.V) != k:
        raise ShapeMismatchError(f"transform pair covers {len(pair.V)} users, channel has {k}")
    for i, m in enumerate(ch.profile.M):
        if pair.V[i].shape != (m, m) or pair.U[i].shape != (m, m):
            raise ShapeMismatchError(f"user {i + 1} needs {m}x{m} transforms")
    return tuple(
        tuple(pair.U[i] @ ch.block(i, j) @ pair.V[j] for j in range(k)) for i in range(k)
    )


def _relative_residual(block: ComplexMatrix, scale: float) -> float:
    peak = float(np.max(np.abs(block)))
    if scale == 0.0:
        return 0.0 if peak == 0.0 else float("inf")
    return peak / scale


def verify_transform(
    ch: ChannelRealization,
    pair: TransformPair,
    pattern: ZeroPattern,
    tol: Tolerance = DEFAULT_TOLERANCE,
    condition_limit: float = DEFAULT_CONDITION_LIMIT,
) -> VerificationReport:
    """Measure every required-zero block and the conditioning of every U and V."""
    if pattern.partition.antennas != ch.profile.M:
        raise ShapeMismatchError(
            f"pattern partitions {pattern.partition.antennas}, channel is {ch.profile}"
        )
    blocks = transformed_blocks(ch, pair)

    residuals = []
    for i, j, a, b in pattern.required_blocks():
        rows = pattern.partition.y_slices(i)[a]
        cols = pattern.partition.x_slices(j)[b]
        block = blocks[i][j][rows, cols]
        scale = spectral_norm(pair.U[i]) * spectral_norm(ch.block(i, j)) * spectral_norm(pair.V[j])
        residuals.append(
            BlockResidual(
                receiver=i + 1,
                transmitter=j + 1,
                row_block=a + 1,
                col_block=b + 1,
                rows=block.shape[0],
                cols=block.shape[1],
                residual=_relative_residual(block, scale),
            )
        )

    return VerificationReport(
        residuals=residuals,
        conditions={name: condition_number(matrix, tol) for name, matrix in pair.named()},
        direct_ranks=[numerical_rank(blocks[i][i], tol) for i in range(ch.profile.K)],
        zero_rel_tol=tol.zero_rel_tol,
        condition_limit=condition_limit,
    )
