"""Constructions of invertible beamforming and shaping matrices that zero out cross-link blocks."""

import logging

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from mimodof.channel import (
    ChannelRealization,
    ComplexPairs,
    block_rng,
    complex_gaussian,
    matrix_to_pairs,
)
from mimodof.exceptions import InvertibilityError, NonGenericChannelError
from mimodof.models import DEFAULT_TOLERANCE, AntennaProfile, Tolerance, TransformVariant
from mimodof.numerics import ComplexMatrix, left_null_basis, orthonormalize_columns
from mimodof.numerics import right_null_basis
from mimodof.transform.pattern import (
    BlockPartition3,
    ConstraintStep,
    ZeroPattern,
    constraint_plan,
    expected_zero_pattern,
)
from mimodof.transform.verify import (
    DEFAULT_CONDITION_LIMIT,
    TransformPair,
    VerificationReport,
    transformed_blocks,
    verify_transform,
)

logger = logging.getLogger(__name__)

# spawn-key prefix of the free-column streams; channel blocks use (i, j) with i, j < K
FREE_COLUMN_STREAM = 0xF12EE


class PartitionSizes(BaseModel):
    x_sizes: list[list[int]] = Field(description="Input block sizes per user")
    y_sizes: list[list[int]] = Field(description="Output block sizes per user")


class TransformDocument(BaseModel):
    """JSON form of a transformed channel and its verification."""

    profile: list[int]
    seed: int
    variant: TransformVariant
    partition: PartitionSizes
    pattern: list[str] = Field(description="Rendered zero pattern, one row per line")
    required_zeros: int
    verification: VerificationReport
    blocks: list[list[ComplexPairs]] = Field(description="U_i Hbar_ij V_j, 0-based")


class TransformedChannel(BaseModel):
    """H_ij = U_i Hbar_ij V_j together with the pair that produced it and its verification."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    profile: AntennaProfile
    seed: int
    variant: TransformVariant
    pair: TransformPair
    blocks: tuple[tuple[ComplexMatrix, ...], ...]
    pattern: ZeroPattern
    verification: VerificationReport

    @property
    def partition(self) -> BlockPartition3:
        return self.pattern.partition

    def block(self, i: int, j: int) -> ComplexMatrix:
        return self.blocks[i][j]

    def to_document(self) -> TransformDocument:
        return TransformDocument(
            profile=list(self.profile.M),
            seed=self.seed,
            variant=self.variant,
            partition=PartitionSizes(
                x_sizes=[list(s) for s in self.partition.x_sizes],
                y_sizes=[list(s) for s in self.partition.y_sizes],
            ),
            pattern=self.pattern.render().splitlines(),
            required_zeros=self.pattern.scalar_zero_count(),
            verification=self.verification,
            blocks=[[matrix_to_pairs(b) for b in row] for row in self.blocks],
        )


def _solve(step: ConstraintStep, operand: ComplexMatrix, tol: Tolerance) -> ComplexMatrix:
    if step.side == "right":
        basis = right_null_basis(operand, tol)
        actual = basis.shape[1]
    else:
        basis = left_null_basis(operand, tol)
        actual = basis.shape[0]
    if actual != step.expected:
        raise NonGenericChannelError(step.label, step.expected, actual)
    logger.debug("%s -> %s of width %d", step.label, step.name, actual)
    return basis


def _finish(
    ch: ChannelRealization,
    variant: TransformVariant,
    pair: TransformPair,
    tol: Tolerance,
    condition_limit: float,
) -> TransformedChannel:
    pattern = expected_zero_pattern(ch.profile, variant)
    report = verify_transform(ch, pair, pattern, tol, condition_limit)
    if not report.invertible:
        name, condition = max(report.conditions.items(), key=lambda item: item[1])
        raise InvertibilityError(name, condition, condition_limit)
    return TransformedChannel(
        profile=ch.profile,
        seed=ch.seed,
        variant=variant,
        pair=pair,
        blocks=transformed_blocks(ch, pair),
        pattern=pattern,
        verification=report,
    )


def transform_example_221(
    ch: ChannelRealization,
    tol: Tolerance = DEFAULT_TOLERANCE,
    condition_limit: float = DEFAULT_CONDITION_LIMIT,
) -> TransformedChannel:
    """
    Four-step construction for antenna profile (2,2,1).

    The second streams of users 1 and 2 are kept away from receiver 3, the
    interference each of them causes at the other lands on one receive
    antenna, and the interference from user 3 lands on the other one.
    User 3 keeps U3 = V3 = [1].
    """
    steps = {s.name: s for s in constraint_plan(ch.profile, TransformVariant.EXAMPLE_221)}
    H = ch.block

    v12 = _solve(steps["v12"], H(2, 0), tol)
    v22 = _solve(steps["v22"], H(2, 1), tol)
    u11 = _solve(steps["u11"], H(0, 1) @ v22, tol)
    u21 = _solve(steps["u21"], H(1, 0) @ v12, tol)
    u12 = _solve(steps["u12"], H(0, 2), tol)
    u22 = _solve(steps["u22"], H(1, 2), tol)
    v21 = _solve(steps["v21"], u12 @ H(0, 1), tol)
    v11 = _solve(steps["v11"], u22 @ H(1, 0), tol)

    one = np.ones((1, 1), dtype=np.complex128)
    pair = TransformPair.from_matrices(
        V=[np.hstack([v11, v12]), np.hstack([v21, v22]), one],
        U=[np.vstack([u11, u12]), np.vstack([u21, u22]), one],
    )
    return _finish(ch, TransformVariant.EXAMPLE_221, pair, tol, condition_limit)


def _free_columns(
    profile: AntennaProfile, seed: int, attempt: int
) -> tuple[ComplexMatrix, ComplexMatrix, ComplexMatrix]:
    m1, m2, m3 = profile.M
    a, b, c = m1 - m2, m1 - m3, m2 + m3 - m1
    rng = block_rng(seed, FREE_COLUMN_STREAM, attempt)
    v12 = orthonormalize_columns(complex_gaussian(rng, m1, c))
    v22 = orthonormalize_columns(complex_gaussian(rng, m2, b))
    v32 = orthonormalize_columns(complex_gaussian(rng, m3, a))
    return v12, v22, v32


def _general_pair(
    ch: ChannelRealization,
    steps: dict[str, ConstraintStep],
    free: tuple[ComplexMatrix, ComplexMatrix, ComplexMatrix],
    tol: Tolerance,
) -> TransformPair:
    H = ch.block
    v12, v22, v32 = free

    v11 = _solve(steps["v11"], H(1, 0), tol)
    v13 = _solve(steps["v13"], H(2, 0), tol)
    u13 = _solve(steps["u13"], H(0, 1), tol)
    u11 = _solve(steps["u11"], H(0, 2), tol)
    v21 = _solve(steps["v21"], u11 @ H(0, 1), tol)
    v31 = _solve(steps["v31"], u13 @ H(0, 2), tol)
    u12 = _solve(steps["u12"], np.hstack([H(0, 1) @ v22, H(0, 2) @ v32]), tol)
    u21 = _solve(steps["u21"], H(1, 0) @ v13, tol)
    u22 = _solve(steps["u22"], H(1, 2) @ v31, tol)
    u31 = _solve(steps["u31"], H(2, 0) @ v11, tol)
    u32 = _solve(steps["u32"], H(2, 1) @ v21, tol)

    return TransformPair.from_matrices(
        V=[np.hstack([v11, v12, v13]), np.hstack([v21, v22]), np.hstack([v31, v32])],
        U=[np.vstack([u11, u12, u13]), np.vstack([u21, u22]), np.vstack([u31, u32])],
    )


def transform_general_3user(
    ch: ChannelRealization,
    tol: Tolerance = DEFAULT_TOLERANCE,
    condition_limit: float = DEFAULT_CONDITION_LIMIT,
    seed: int | None = None,
    retries: int = 0,
) -> TransformedChannel:
    """
    Block construction for any 3-user profile with M1 <= M2 + M3.

    Args:
        ch: channel realization
        tol: rank and residual thresholds
        condition_limit: largest accepted condition number of any U_i or V_i
        seed: seed of the free columns v12, v22, v32; defaults to the channel seed
        retries: number of redraws of the free columns after an InvertibilityError

    Raises:
        UnsupportedProfileError: K != 3 or a strictly dominant user
        NonGenericChannelError: a null space has the wrong dimension
        InvertibilityError: still ill-conditioned after all retries
    """
    steps = {s.name: s for s in constraint_plan(ch.profile, TransformVariant.GENERAL_3USER)}
    free_seed = ch.seed if seed is None else seed

    def attempt(n: int) -> TransformedChannel:
        pair = _general_pair(ch, steps, _free_columns(ch.profile, free_seed, n), tol)
        return _finish(ch, TransformVariant.GENERAL_3USER, pair, tol, condition_limit)

    for n in range(retries):
        try:
            return attempt(n)
        except InvertibilityError as e:
            logger.info("attempt %d: %s; redrawing free columns", n, e)
    return attempt(retries)


def run_transform(
    ch: ChannelRealization,
    variant: TransformVariant,
    tol: Tolerance = DEFAULT_TOLERANCE,
    condition_limit: float = DEFAULT_CONDITION_LIMIT,
    retries: int = 0,
) -> TransformedChannel:
    """Dispatch to the construction of the given variant."""
    if variant == TransformVariant.EXAMPLE_221:
        return transform_example_221(ch, tol, condition_limit)
    return transform_general_3user(ch, tol, condition_limit, retries=retries)
