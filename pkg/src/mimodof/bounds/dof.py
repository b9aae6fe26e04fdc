"""Closed-form sum-DoF bounds with exact rational arithmetic."""

import logging
from fractions import Fraction
from itertools import combinations, product

from mimodof.exceptions import UnsupportedProfileError
from mimodof.models import AntennaProfile, DoFReport, PartitionPlan, Regime

logger = logging.getLogger(__name__)

# Exhaustive 3-colouring search is 3^(K-1); beyond this only the greedy plan is tried.
MAX_EXHAUSTIVE_USERS = 15


def decomposition_bound(profile: AntennaProfile) -> Fraction:
    """Half a DoF per antenna: every antenna pair run as its own SISO user."""
    return Fraction(profile.total, 2)


def inner_bound(profile: AntennaProfile) -> Fraction:
    """Best of letting user 1 transmit alone and the decomposition scheme."""
    return max(Fraction(profile.M1), decomposition_bound(profile))


def dominant_user_present(profile: AntennaProfile) -> bool:
    """True iff M1 >= M2 + ... + MK (equality counts as dominant)."""
    return profile.M1 >= profile.total - profile.M1


def two_user_mimo_dof(m1: int, n1: int, m2: int, n2: int) -> int:
    """
    Sum DoF of the 2-user MIMO IC.

    Args:
        m1, m2: transmit antennas of users 1 and 2
        n1, n2: receive antennas of users 1 and 2
    """
    return min(m1 + m2, n1 + n2, max(m1, n2), max(m2, n1))


def _subsets_with_first_user(k: int) -> list[tuple[int, ...]]:
    # S and its complement give the same bound, so user 0 is fixed in S
    # and the full set is excluded: 2^(k-1) - 1 candidates.
    return [(0, *rest) for r in range(k - 1) for rest in combinations(range(1, k), r)]


def cooperation_outer_bound(profile: AntennaProfile) -> tuple[Fraction, tuple[int, ...]]:
    """
    Merge users into two cooperating super-users and apply the 2-user bound.

    Returns:
        Tuple of (bound, witness) where witness is the 0-based subset S
        attaining the minimum, lexicographically smallest among ties.
    """
    if profile.K < 2:
        raise UnsupportedProfileError(profile.M, "cooperation bound needs at least two users")

    best: tuple[int, tuple[int, ...]] | None = None
    for subset in _subsets_with_first_user(profile.K):
        inside = sum(profile.M[u] for u in subset)
        outside = profile.total - inside
        value = two_user_mimo_dof(inside, inside, outside, outside)
        if best is None or (value, subset) < best:
            best = (value, subset)

    assert best is not None
    logger.debug("cooperation bound for %s: %d with S=%s", profile, *best)
    return Fraction(best[0]), best[1]


def balanced_split_exists(profile: AntennaProfile) -> bool:
    """Some S has as many antennas as its complement, so the decomposition meets cooperation."""
    if profile.K < 2:
        return False
    return any(
        2 * sum(profile.M[u] for u in subset) == profile.total
        for subset in _subsets_with_first_user(profile.K)
    )


def sum_dof(profile: AntennaProfile) -> tuple[Fraction, Regime]:
    """Exact sum DoF for almost all channel realizations, with its operating regime."""
    value = max(decomposition_bound(profile), Fraction(profile.M1))
    regime = Regime.DOMINANT_USER if dominant_user_present(profile) else Regime.DECOMPOSITION
    return value, regime


def three_user_outer_bound(m1: int, m2: int, m3: int) -> Fraction:
    """Side-information bound (M1+M2+M3)/2 for three users with no strictly dominant user."""
    counts = tuple(sorted((m1, m2, m3), reverse=True))
    if counts[0] > counts[1] + counts[2]:
        raise UnsupportedProfileError(counts, "the 3-user bound needs M1 <= M2 + M3")
    return Fraction(sum(counts), 2)


def partition_outer_bound(plan: PartitionPlan) -> Fraction:
    """Let each group cooperate and apply the 3-user bound to the group sums."""
    return three_user_outer_bound(*plan.sums)


def _plan_from_labels(profile: AntennaProfile, labels: tuple[int, ...]) -> PartitionPlan:
    groups = tuple(tuple(u for u, g in enumerate(labels) if g == k) for k in range(3))
    sums = tuple(sum(profile.M[u] for u in group) for group in groups)
    return PartitionPlan(groups=groups, sums=sums)


def _greedy_partition(profile: AntennaProfile) -> PartitionPlan:
    # longest first: users arrive sorted, each joins the lightest group
    sums = [0, 0, 0]
    labels = []
    for m in profile.M:
        k = min(range(3), key=lambda g: (sums[g], g))
        sums[k] += m
        labels.append(k)
    return _plan_from_labels(profile, tuple(labels))


def _restricted_growth(labels: tuple[int, ...]) -> bool:
    highest = -1
    for g in labels:
        if g > highest + 1:
            return False
        highest = max(highest, g)
    return highest == 2


def _exhaustive_partition(profile: AntennaProfile) -> PartitionPlan | None:
    for tail in product(range(3), repeat=profile.K - 1):
        labels = (0, *tail)
        if not _restricted_growth(labels):
            continue
        plan = _plan_from_labels(profile, labels)
        if plan.is_balanced():
            return plan
    return None


def three_group_partition(profile: AntennaProfile, exhaustive: bool = False) -> PartitionPlan:
    """
    Split the users into three groups, none with more antennas than the other two combined.

    The greedy longest-first plan is tried first and verified; the exhaustive
    search over canonical 3-colourings (lexicographic, first valid wins) is
    the fallback, or the only method when exhaustive is set.
    """
    if profile.K < 3:
        raise UnsupportedProfileError(profile.M, "a three-group partition needs K >= 3")
    if dominant_user_present(profile):
        raise UnsupportedProfileError(profile.M, "dominant user present; use the dominant regime")

    if not exhaustive:
        plan = _greedy_partition(profile)
        if plan.is_balanced() and plan.covers(profile):
            return plan
        logger.info("greedy partition failed for %s, falling back to exhaustive", profile)

    if profile.K > MAX_EXHAUSTIVE_USERS:
        raise UnsupportedProfileError(
            profile.M, f"exhaustive partition search limited to K <= {MAX_EXHAUSTIVE_USERS}"
        )
    plan = _exhaustive_partition(profile)
    if plan is None:
        raise UnsupportedProfileError(profile.M, "no balanced three-group partition exists")
    return plan


def analyze_profile(profile: AntennaProfile) -> DoFReport:
    """Collect every bound of a profile into one report."""
    theorem, regime = sum_dof(profile)

    outer_coop = witness = None
    if profile.K >= 2:
        outer_coop, subset = cooperation_outer_bound(profile)
        witness = [u + 1 for u in subset]

    partition = partition_sums = outer_partition = None
    if regime is Regime.DECOMPOSITION and profile.K >= 3:
        plan = three_group_partition(profile)
        partition = plan.one_based()
        partition_sums = list(plan.sums)
        outer_partition = partition_outer_bound(plan)

    return DoFReport(
        profile=list(profile.M),
        inner=inner_bound(profile),
        decomposition=decomposition_bound(profile),
        outer_coop=outer_coop,
        witness=witness,
        theorem=theorem,
        regime=regime,
        coop_tight=outer_coop is not None and outer_coop == theorem,
        partition=partition,
        partition_sums=partition_sums,
        outer_partition=outer_partition,
    )
