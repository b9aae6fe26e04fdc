"""Rate-slope simulation of the dominant-user scheme and Monte Carlo checks of the transforms."""

import logging
import math
from collections.abc import Callable, Iterable, Sequence
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from pydantic import ValidationError

from mimodof.channel import ChannelRealization, generate_channel
from mimodof.exceptions import InvertibilityError, NonGenericChannelError, SimulationError
from mimodof.models import (
    DEFAULT_TOLERANCE,
    AntennaProfile,
    MonteCarloReport,
    RateCurve,
    RatePoint,
    Tolerance,
    TransformVariant,
    TrialFailure,
)
from mimodof.transform.construct import run_transform
from mimodof.transform.pattern import expected_zero_pattern
from mimodof.transform.verify import DEFAULT_CONDITION_LIMIT, VerificationReport

logger = logging.getLogger(__name__)

# Below this power the o(log P) terms bias the fitted slope.
HIGH_SNR_FLOOR = 1e4
MIN_SLOPE_POINTS = 3
DOMINANT_SCHEME = "dominant_user"

ChannelFactory = Callable[[AntennaProfile, int], ChannelRealization]


def dominant_scheme_rate(ch: ChannelRealization, power: float) -> float:
    """
    Rate of user 1 transmitting alone with white input and identity noise.

    log2 det(I + (P / M1) H11 H11^H), in bits per channel use.
    """
    if not power > 0:
        raise SimulationError(f"Power must be positive, got {power}")
    h = ch.block(0, 0)
    m1 = ch.profile.M1
    gram = np.eye(m1) + (power / m1) * (h @ h.conj().T)
    sign, logdet = np.linalg.slogdet(gram)
    if sign.real <= 0:
        raise SimulationError("I + (P/M1) H11 H11^H is not positive definite")
    return max(0.0, float(logdet) / math.log(2))


def decade_powers(lo: float = 1e4, hi: float = 1e8, count: int = 5) -> list[float]:
    """Log-spaced powers from lo to hi inclusive."""
    if not 0 < lo < hi or count < 2:
        raise SimulationError(f"Cannot build a power grid from {lo} to {hi} with {count} points")
    return [float(p) for p in np.logspace(np.log10(lo), np.log10(hi), count)]


def rate_curve(
    ch: ChannelRealization, powers: Sequence[float], scheme: str = DOMINANT_SCHEME
) -> RateCurve:
    if scheme != DOMINANT_SCHEME:
        raise SimulationError(f"Unknown scheme {scheme!r}")
    points = [RatePoint(power=p, rate_bits=dominant_scheme_rate(ch, p)) for p in powers]
    try:
        return RateCurve(points=points, scheme=scheme, seed=ch.seed)
    except ValidationError as e:
        raise SimulationError(f"Invalid power grid: {e.errors()[0]['msg']}") from e


def estimate_dof_slope(curve: RateCurve) -> float:
    """Least-squares slope of rate against log2(P) over the high-SNR window."""
    if len(curve.points) < MIN_SLOPE_POINTS:
        raise SimulationError(f"Need at least {MIN_SLOPE_POINTS} points, got {len(curve.points)}")
    if min(curve.powers) < HIGH_SNR_FLOOR:
        raise SimulationError(f"All powers must be >= {HIGH_SNR_FLOOR:g}")
    slope, _ = np.polyfit(np.log2(curve.powers), curve.rates(), 1)
    return float(slope)


def average_dof_slope(
    profile: AntennaProfile, seeds: Iterable[int], powers: Sequence[float]
) -> float:
    """Mean fitted slope of the dominant scheme over one channel per seed."""
    slopes = [estimate_dof_slope(rate_curve(generate_channel(profile, s), powers)) for s in seeds]
    if not slopes:
        raise SimulationError("No seeds given")
    return float(np.mean(slopes))


def trial_seeds(seed: int, trials: int) -> list[int]:
    """Independent per-trial channel seeds derived from one master seed."""
    state = np.random.SeedSequence(seed).generate_state(trials, dtype=np.uint64)
    return [int(s) for s in state]


TrialOutcome = tuple[VerificationReport | None, TrialFailure | None]


def _run_trial(
    profile: AntennaProfile,
    variant: TransformVariant,
    trial: int,
    seed: int,
    tol: Tolerance,
    condition_limit: float,
    channel_factory: ChannelFactory,
) -> TrialOutcome:
    ch = channel_factory(profile, seed)
    try:
        report = run_transform(ch, variant, tol, condition_limit).verification
    except NonGenericChannelError as e:
        return None, TrialFailure(trial=trial, seed=seed, step=e.step, message=str(e))
    except InvertibilityError as e:
        return None, TrialFailure(trial=trial, seed=seed, step=e.matrix, message=str(e))

    if not report.passed:
        message = f"max residual {report.max_residual:.3g} above {tol.zero_rel_tol:g}"
        return report, TrialFailure(trial=trial, seed=seed, message=message)
    return report, None


def monte_carlo_transform(
    profile: AntennaProfile,
    variant: TransformVariant,
    trials: int,
    seed: int,
    tol: Tolerance = DEFAULT_TOLERANCE,
    condition_limit: float = DEFAULT_CONDITION_LIMIT,
    workers: int = 1,
    channel_factory: ChannelFactory = generate_channel,
) -> MonteCarloReport:
    """
    Run a transform on independent channel realizations and aggregate the verifications.

    Trials run on a thread pool when workers > 1; the report depends only on
    the arguments, never on the scheduling. worst_residual and
    worst_condition are NaN when no trial produced a transform pair.
    """
    if trials < 1:
        raise SimulationError(f"Need at least one trial, got {trials}")
    variant = TransformVariant(variant)
    expected_zero_pattern(profile, variant)

    seeds = trial_seeds(seed, trials)

    def run(trial: int) -> TrialOutcome:
        return _run_trial(
            profile, variant, trial, seeds[trial], tol, condition_limit, channel_factory
        )

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(run, range(trials)))
    else:
        outcomes = [run(t) for t in range(trials)]

    reports = [r for r, _ in outcomes if r is not None]
    failures = sorted((f for _, f in outcomes if f is not None), key=lambda f: f.trial)
    logger.info(
        "%s on %s: %d/%d trials passed", variant.value, profile, trials - len(failures), trials
    )
    return MonteCarloReport(
        profile=list(profile.M),
        variant=variant,
        trials=trials,
        seed=seed,
        tolerance=tol,
        successes=trials - len(failures),
        worst_residual=max((r.max_residual for r in reports), default=math.nan),
        worst_condition=max((r.max_condition for r in reports), default=math.nan),
        failures=failures,
    )
