"""Seeded generation of generic MIMO interference channel realizations."""

import logging
from collections.abc import Sequence
from typing import Any

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, ConfigDict, Field, model_validator

from mimodof.exceptions import ShapeMismatchError
from mimodof.models import AntennaProfile
from mimodof.numerics import ComplexMatrix, as_matrix

logger = logging.getLogger(__name__)


def _frozen(matrix: ComplexMatrix) -> ComplexMatrix:
    matrix = np.array(matrix, dtype=np.complex128, copy=True)
    matrix.flags.writeable = False
    return matrix


ComplexPairs = list[tuple[float, float]]
"""Matrix entries as [real, imag] pairs in row-major order."""


class ChannelDocument(BaseModel):
    """JSON form of a channel realization."""

    profile: list[int]
    seed: int
    blocks: list[list[ComplexPairs]] = Field(description="blocks[i][j] is H_ij, 0-based")


class ChannelRealization(BaseModel):
    """K x K grid of channel matrices; blocks[i][j] is H_ij from Tx_j to Rx_i (0-based)."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    profile: AntennaProfile
    blocks: tuple[tuple[ComplexMatrix, ...], ...]
    seed: int

    @model_validator(mode="after")
    def _check_shapes(self) -> "ChannelRealization":
        m = self.profile.M
        if len(self.blocks) != self.profile.K:
            raise ValueError(f"expected {self.profile.K} block rows, got {len(self.blocks)}")
        for i, row in enumerate(self.blocks):
            if len(row) != self.profile.K:
                raise ValueError(f"block row {i} has {len(row)} entries")
            for j, block in enumerate(row):
                if block.shape != (m[i], m[j]):
                    raise ValueError(
                        f"block ({i},{j}) has shape {block.shape}, expected {(m[i], m[j])}"
                    )
                if not np.all(np.isfinite(block)):
                    raise ValueError(f"block ({i},{j}) has non-finite entries")
        return self

    @classmethod
    def from_blocks(
        cls,
        profile: AntennaProfile,
        blocks: Sequence[Sequence[npt.ArrayLike]],
        seed: int = 0,
    ) -> "ChannelRealization":
        """Build a realization from explicit matrices, e.g. a hand-crafted channel."""
        try:
            grid = tuple(tuple(_frozen(as_matrix(b)) for b in row) for row in blocks)
            return cls(profile=profile, blocks=grid, seed=seed)
        except ValueError as e:
            raise ShapeMismatchError(str(e)) from e

    def block(self, i: int, j: int) -> ComplexMatrix:
        return self.blocks[i][j]

    def to_document(self) -> ChannelDocument:
        return ChannelDocument(
            profile=list(self.profile.M),
            seed=self.seed,
            blocks=[[matrix_to_pairs(b) for b in row] for row in self.blocks],
        )

    @classmethod
    def from_document(cls, data: ChannelDocument | dict[str, Any]) -> "ChannelRealization":
        """Create a realization from its JSON document."""
        document = ChannelDocument.model_validate(data)
        profile = AntennaProfile(M=tuple(document.profile))
        try:
            blocks = [
                [pairs_to_matrix(b, profile.M[i], profile.M[j]) for j, b in enumerate(row)]
                for i, row in enumerate(document.blocks)
            ]
        except (ValueError, IndexError) as e:
            raise ShapeMismatchError(f"Channel document does not match {profile}: {e}") from e
        return cls.from_blocks(profile, blocks, seed=document.seed)


def matrix_to_pairs(matrix: ComplexMatrix) -> ComplexPairs:
    return [(float(z.real), float(z.imag)) for z in np.ravel(matrix, order="C")]


def pairs_to_matrix(pairs: ComplexPairs, rows: int, cols: int) -> ComplexMatrix:
    flat = np.array([complex(re, im) for re, im in pairs], dtype=np.complex128)
    return flat.reshape((rows, cols), order="C")


def block_rng(seed: int, *key: int) -> np.random.Generator:
    """Independent generator for one keyed stream of a seed."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=key))


def complex_gaussian(rng: np.random.Generator, rows: int, cols: int) -> ComplexMatrix:
    """i.i.d. CN(0, 1) entries."""
    scale = np.sqrt(0.5)
    return scale * (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols)))


def generate_channel(profile: AntennaProfile, seed: int) -> ChannelRealization:
    """
    Draw a generic channel realization.

    Block (i, j) comes from its own stream keyed by (seed, i, j), so each block
    is reproducible regardless of the order in which blocks are generated.
    """
    m = profile.M
    blocks = tuple(
        tuple(
            _frozen(complex_gaussian(block_rng(seed, i, j), m[i], m[j]))
            for j in range(profile.K)
        )
        for i in range(profile.K)
    )
    logger.debug("generated channel for profile %s, seed %d", profile, seed)
    return ChannelRealization(profile=profile, blocks=blocks, seed=seed)
