"""Tests for rate curves, slope estimation and Monte Carlo transform checks."""

import json
import math
from collections.abc import Callable

import numpy as np
import pytest

from mimodof.channel import ChannelRealization, generate_channel
from mimodof.exceptions import SimulationError, UnsupportedProfileError
from mimodof.models import AntennaProfile, RateCurve, RatePoint, TransformVariant
from mimodof.simulate import (
    average_dof_slope,
    decade_powers,
    dominant_scheme_rate,
    estimate_dof_slope,
    monte_carlo_transform,
    rate_curve,
    trial_seeds,
)

POWERS = [1e4, 1e5, 1e6, 1e7, 1e8]


def scalar_channel(value: complex) -> ChannelRealization:
    return ChannelRealization.from_blocks(AntennaProfile(M=(1,)), [[[[value]]]])


class TestDominantSchemeRate:
    def test_scalar_unit_channel(self) -> None:
        assert dominant_scheme_rate(scalar_channel(1), 1.0) == pytest.approx(1.0)

    def test_zero_channel(self) -> None:
        for power in POWERS:
            assert dominant_scheme_rate(scalar_channel(0), power) == 0.0

    def test_generic_221_envelope(self, channel_221: ChannelRealization) -> None:
        rate = dominant_scheme_rate(channel_221, 1e6)
        reference = 2 * math.log2(1e6)
        assert reference - 40 <= rate <= reference + 40

    def test_monotone_in_power(self, channel_221: ChannelRealization) -> None:
        rates = [dominant_scheme_rate(channel_221, p) for p in np.logspace(-2, 8, 30)]
        assert all(b >= a for a, b in zip(rates, rates[1:], strict=False))

    @pytest.mark.parametrize("power", [0.0, -1.0])
    def test_rejects_nonpositive_power(
        self, channel_221: ChannelRealization, power: float
    ) -> None:
        with pytest.raises(SimulationError):
            dominant_scheme_rate(channel_221, power)


class TestRateCurve:
    def test_decade_powers(self) -> None:
        assert decade_powers() == pytest.approx(POWERS)
        with pytest.raises(SimulationError):
            decade_powers(1e8, 1e4)

    def test_curve_and_csv(self, channel_221: ChannelRealization) -> None:
        curve = rate_curve(channel_221, POWERS)
        assert curve.seed == 0
        assert curve.scheme == "dominant_user"
        lines = curve.to_csv().splitlines()
        assert lines[0] == "P,rate_bits"
        assert len(lines) == 6
        assert float(lines[1].split(",")[0]) == 1e4

    def test_unsorted_powers_rejected(self, channel_221: ChannelRealization) -> None:
        with pytest.raises(SimulationError, match="increasing"):
            rate_curve(channel_221, [1e5, 1e4, 1e6])


class TestSlope:
    def test_exact_line(self) -> None:
        points = [RatePoint(power=p, rate_bits=2 * math.log2(p) + 5) for p in POWERS]
        curve = RateCurve(points=points, scheme="line", seed=0)
        assert estimate_dof_slope(curve) == pytest.approx(2.0, abs=1e-9)

    def test_needs_three_points(self, channel_221: ChannelRealization) -> None:
        with pytest.raises(SimulationError, match="at least 3"):
            estimate_dof_slope(rate_curve(channel_221, [1e4, 1e5]))

    def test_needs_high_snr_window(self, channel_221: ChannelRealization) -> None:
        with pytest.raises(SimulationError, match=">="):
            estimate_dof_slope(rate_curve(channel_221, [1e3, 1e5, 1e6]))

    @pytest.mark.parametrize(("counts", "m1"), [((2, 2, 1), 2), ((3, 2, 2), 3)])
    def test_average_slope_recovers_m1(self, counts: tuple[int, ...], m1: int) -> None:
        slope = average_dof_slope(AntennaProfile(M=counts), range(10), POWERS)
        assert slope == pytest.approx(m1, rel=0.02)

    def test_slope_never_exceeds_rank(self, profile_322: AntennaProfile) -> None:
        for seed in range(20):
            curve = rate_curve(generate_channel(profile_322, seed), POWERS)
            assert estimate_dof_slope(curve) <= profile_322.M1 + 0.1


class TestMonteCarlo:
    def test_trial_seeds(self) -> None:
        assert trial_seeds(1, 5) == trial_seeds(1, 5)
        assert len(set(trial_seeds(1, 50))) == 50
        assert trial_seeds(1, 3) != trial_seeds(2, 3)

    def test_example_variant(self, profile_221: AntennaProfile) -> None:
        report = monte_carlo_transform(profile_221, TransformVariant.EXAMPLE_221, 200, seed=1)
        assert report.success_fraction == 1.0
        assert report.failures == []
        assert report.worst_residual <= 1e-8
        assert report.worst_condition <= 1e8

    def test_general_variant(self, profile_322: AntennaProfile) -> None:
        report = monte_carlo_transform(profile_322, TransformVariant.GENERAL_3USER, 200, seed=1)
        assert report.success_fraction == 1.0
        assert report.seed == 1
        assert report.trials == 200

    def test_deterministic_and_order_independent(self, profile_322: AntennaProfile) -> None:
        serial = monte_carlo_transform(profile_322, TransformVariant.GENERAL_3USER, 30, seed=4)
        again = monte_carlo_transform(profile_322, TransformVariant.GENERAL_3USER, 30, seed=4)
        pooled = monte_carlo_transform(
            profile_322, TransformVariant.GENERAL_3USER, 30, seed=4, workers=4
        )
        assert serial == again
        assert serial == pooled

    def test_non_generic_channel(
        self,
        profile_322: AntennaProfile,
        non_generic_factory: Callable[[AntennaProfile, int], ChannelRealization],
    ) -> None:
        report = monte_carlo_transform(
            profile_322,
            TransformVariant.GENERAL_3USER,
            trials=1,
            seed=0,
            channel_factory=non_generic_factory,
        )
        assert report.success_fraction == 0.0
        (failure,) = report.failures
        assert failure.trial == 0
        assert failure.step == "beamforming: H31 v13 = 0"
        assert "expected null space of dimension 1, found 2" in failure.message
        assert math.isnan(report.worst_residual)

        document = json.loads(report.model_dump_json())
        assert document["success_fraction"] == 0.0
        assert document["failures"][0]["seed"] == failure.seed
        assert document["worst_residual"] is None
        assert document["worst_condition"] is None

    def test_incompatible_profile(self) -> None:
        with pytest.raises(UnsupportedProfileError):
            monte_carlo_transform(
                AntennaProfile(M=(4, 2, 1)), TransformVariant.GENERAL_3USER, 10, seed=0
            )
        with pytest.raises(UnsupportedProfileError):
            monte_carlo_transform(
                AntennaProfile(M=(3, 2, 2)), TransformVariant.EXAMPLE_221, 10, seed=0
            )

    def test_needs_a_trial(self, profile_221: AntennaProfile) -> None:
        with pytest.raises(SimulationError):
            monte_carlo_transform(profile_221, TransformVariant.EXAMPLE_221, 0, seed=0)
