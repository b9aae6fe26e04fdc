"""Block partitions, required zero patterns and the constraint plan of each construction."""

from collections.abc import Iterator
from typing import Literal, Self

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, ConfigDict, model_validator

from mimodof.exceptions import UnsupportedProfileError
from mimodof.models import AntennaProfile, TransformVariant

# 0-based (receiver block, transmitter block) pairs forced to zero in H_ij, keyed by (i, j).
_EXAMPLE_221_ZEROS: dict[tuple[int, int], set[tuple[int, int]]] = {
    (0, 1): {(0, 1), (1, 0)},
    (0, 2): {(1, 0)},
    (1, 0): {(0, 1), (1, 0)},
    (1, 2): {(1, 0)},
    (2, 0): {(0, 1)},
    (2, 1): {(0, 1)},
}

_GENERAL_3USER_ZEROS: dict[tuple[int, int], set[tuple[int, int]]] = {
    (0, 1): {(0, 0), (1, 1), (2, 0), (2, 1)},
    (0, 2): {(0, 0), (0, 1), (1, 1), (2, 0)},
    (1, 0): {(0, 0), (0, 2), (1, 0)},
    (1, 2): {(1, 0)},
    (2, 0): {(0, 0), (0, 2), (1, 2)},
    (2, 1): {(1, 0)},
}

EXAMPLE_221_PROFILE = AntennaProfile(M=(2, 2, 1))


class BlockPartition3(BaseModel):
    """Sizes of the input (x) and output (y) blocks of every user."""

    model_config = ConfigDict(frozen=True)

    x_sizes: tuple[tuple[int, ...], ...]
    y_sizes: tuple[tuple[int, ...], ...]

    @model_validator(mode="after")
    def _check_sizes(self) -> Self:
        if len(self.x_sizes) != len(self.y_sizes):
            raise ValueError("x and y partitions cover different numbers of users")
        for x, y in zip(self.x_sizes, self.y_sizes, strict=True):
            if any(s < 0 for s in x + y):
                raise ValueError("block sizes must be nonnegative")
            if sum(x) != sum(y):
                raise ValueError("input and output partitions of a user differ in size")
        return self

    @property
    def antennas(self) -> tuple[int, ...]:
        return tuple(sum(x) for x in self.x_sizes)

    @staticmethod
    def _slices(sizes: tuple[int, ...]) -> list[slice]:
        edges = np.concatenate([[0], np.cumsum(sizes)]).astype(int)
        return [slice(int(lo), int(hi)) for lo, hi in zip(edges[:-1], edges[1:], strict=True)]

    def x_slices(self, user: int) -> list[slice]:
        return self._slices(self.x_sizes[user])

    def y_slices(self, user: int) -> list[slice]:
        return self._slices(self.y_sizes[user])


def _check_general_profile(profile: AntennaProfile) -> None:
    if profile.K != 3:
        raise UnsupportedProfileError(profile.M, "the block transform is defined for K = 3")
    m1, m2, m3 = profile.M
    if m1 > m2 + m3:
        raise UnsupportedProfileError(
            profile.M, "dominant-user profile unsupported by this transform"
        )


def block_partition_3user(profile: AntennaProfile) -> BlockPartition3:
    """
    Block sizes of the general 3-user construction.

    With a = M1-M2, b = M1-M3 and c = M2+M3-M1, user 1 sends (X11, X12, X13)
    of sizes (a, c, b) and receives (Y11, Y12, Y13) of sizes (b, c, a);
    users 2 and 3 send and receive blocks of sizes (c, b) and (c, a).
    """
    _check_general_profile(profile)
    m1, m2, m3 = profile.M
    a, b, c = m1 - m2, m1 - m3, m2 + m3 - m1
    return BlockPartition3(
        x_sizes=((a, c, b), (c, b), (c, a)),
        y_sizes=((b, c, a), (c, b), (c, a)),
    )


def example_partition_221() -> BlockPartition3:
    """One block per antenna."""
    return BlockPartition3(x_sizes=((1, 1), (1, 1), (1,)), y_sizes=((1, 1), (1, 1), (1,)))


Mask = tuple[tuple[bool, ...], ...]


class ZeroPattern(BaseModel):
    """Required-zero blocks of every cross link; masks[i][i] is None."""

    model_config = ConfigDict(frozen=True)

    variant: TransformVariant
    partition: BlockPartition3
    masks: tuple[tuple[Mask | None, ...], ...]

    @property
    def K(self) -> int:
        return len(self.masks)

    def required_blocks(self) -> Iterator[tuple[int, int, int, int]]:
        """(i, j, a, b) of every nonempty block that must vanish."""
        for i, row in enumerate(self.masks):
            for j, mask in enumerate(row):
                if mask is None:
                    continue
                for a, flags in enumerate(mask):
                    for b, flag in enumerate(flags):
                        if flag:
                            yield i, j, a, b

    def entry_mask(self, i: int, j: int) -> npt.NDArray[np.bool_]:
        """Scalar-granular mask of H_ij."""
        p = self.partition
        out = np.zeros((p.antennas[i], p.antennas[j]), dtype=bool)
        mask = self.masks[i][j]
        if mask is None:
            return out
        rows, cols = p.y_slices(i), p.x_slices(j)
        for a, flags in enumerate(mask):
            for b, flag in enumerate(flags):
                if flag:
                    out[rows[a], cols[b]] = True
        return out

    def scalar_zero_count(self) -> int:
        return sum(int(self.entry_mask(i, j).sum()) for i, j in self._cross_pairs())

    def _cross_pairs(self) -> Iterator[tuple[int, int]]:
        for i in range(self.K):
            for j in range(self.K):
                if i != j:
                    yield i, j

    def render(self) -> str:
        """Grid of the whole channel: '0' for a required zero, '*' otherwise."""
        lines = []
        for i in range(self.K):
            masks = [self.entry_mask(i, j) for j in range(self.K)]
            for r in range(self.partition.antennas[i]):
                lines.append(
                    "|".join("".join("0" if z else "*" for z in mask[r]) for mask in masks)
                )
            if i < self.K - 1:
                lines.append("-" * len(lines[-1]))
        return "\n".join(lines)


def expected_zero_pattern(profile: AntennaProfile, variant: TransformVariant) -> ZeroPattern:
    """Zero structure a transform of the given variant must produce; empty blocks are unmarked."""
    if variant == TransformVariant.EXAMPLE_221:
        if profile != EXAMPLE_221_PROFILE:
            raise UnsupportedProfileError(profile.M, "the example transform needs (2,2,1)")
        partition, zeros = example_partition_221(), _EXAMPLE_221_ZEROS
    else:
        partition, zeros = block_partition_3user(profile), _GENERAL_3USER_ZEROS

    masks = tuple(
        tuple(
            None
            if i == j
            else tuple(
                tuple(
                    (a, b) in zeros[(i, j)] and ya > 0 and xb > 0
                    for b, xb in enumerate(partition.x_sizes[j])
                )
                for a, ya in enumerate(partition.y_sizes[i])
            )
            for j in range(3)
        )
        for i in range(3)
    )
    return ZeroPattern(variant=variant, partition=partition, masks=masks)


class ConstraintStep(BaseModel):
    """One null-space choice: columns of V (right) or rows of U (left) annihilating an operand."""

    model_config = ConfigDict(frozen=True)

    name: str
    stage: str
    equation: str
    side: Literal["right", "left"]
    user: int
    block: int
    rows: int
    cols: int

    @property
    def expected(self) -> int:
        """Null-space dimension of a generic rows x cols operand."""
        rank = min(self.rows, self.cols)
        return self.cols - rank if self.side == "right" else self.rows - rank

    @property
    def label(self) -> str:
        return f"{self.stage}: {self.equation}"


def _step(
    name: str, stage: str, equation: str, side: str, shape: tuple[int, int]
) -> ConstraintStep:
    # names follow v<user><block> / u<user><block>, 1-based
    return ConstraintStep(
        name=name,
        stage=stage,
        equation=equation,
        side=side,
        user=int(name[1]) - 1,
        block=int(name[2]) - 1,
        rows=shape[0],
        cols=shape[1],
    )


def constraint_plan(profile: AntennaProfile, variant: TransformVariant) -> list[ConstraintStep]:
    """Ordered null-space steps of a construction with their generic operand shapes."""
    if variant == TransformVariant.EXAMPLE_221:
        if profile != EXAMPLE_221_PROFILE:
            raise UnsupportedProfileError(profile.M, "the example transform needs (2,2,1)")
        return [
            _step("v12", "step 1", "H31 v12 = 0", "right", (1, 2)),
            _step("v22", "step 1", "H32 v22 = 0", "right", (1, 2)),
            _step("u11", "step 2", "u11 H12 v22 = 0", "left", (2, 1)),
            _step("u21", "step 2", "u21 H21 v12 = 0", "left", (2, 1)),
            _step("u12", "step 3", "u12 H13 = 0", "left", (2, 1)),
            _step("u22", "step 3", "u22 H23 = 0", "left", (2, 1)),
            _step("v21", "step 4", "u12 H12 v21 = 0", "right", (1, 2)),
            _step("v11", "step 4", "u22 H21 v11 = 0", "right", (1, 2)),
        ]

    _check_general_profile(profile)
    m1, m2, m3 = profile.M
    a, b, c = m1 - m2, m1 - m3, m2 + m3 - m1
    return [
        _step("v11", "beamforming", "H21 v11 = 0", "right", (m2, m1)),
        _step("v13", "beamforming", "H31 v13 = 0", "right", (m3, m1)),
        _step("u13", "shaping", "u13 H12 = 0", "left", (m1, m2)),
        _step("u11", "shaping", "u11 H13 = 0", "left", (m1, m3)),
        _step("v21", "beamforming", "u11 H12 v21 = 0", "right", (b, m2)),
        _step("v31", "beamforming", "u13 H13 v31 = 0", "right", (a, m3)),
        _step("u12", "shaping", "u12 [H12 v22 | H13 v32] = 0", "left", (m1, b + a)),
        _step("u21", "shaping", "u21 H21 v13 = 0", "left", (m2, b)),
        _step("u22", "shaping", "u22 H23 v31 = 0", "left", (m2, c)),
        _step("u31", "shaping", "u31 H31 v11 = 0", "left", (m3, a)),
        _step("u32", "shaping", "u32 H32 v21 = 0", "left", (m3, c)),
    ]
