"""Shared fixtures."""

import logging
import os
from collections.abc import Callable, Iterator
from pathlib import Path

import numpy as np
import pytest
from click.testing import CliRunner

from mimodof.channel import ChannelRealization, generate_channel
from mimodof.config import get_settings
from mimodof.models import AntennaProfile


@pytest.fixture(autouse=True)
def isolated_settings(monkeypatch: pytest.MonkeyPatch, tmp_path: Path) -> Iterator[None]:
    """Run every test without MIMODOF_* variables or a stray .env file."""
    for name in list(os.environ):
        if name.upper().startswith("MIMODOF_"):
            monkeypatch.delenv(name)
    monkeypatch.chdir(tmp_path)
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture(autouse=True)
def reset_package_logger() -> Iterator[None]:
    logger = logging.getLogger("mimodof")
    handlers, level = logger.handlers[:], logger.level
    yield
    logger.handlers[:] = handlers
    logger.setLevel(level)


@pytest.fixture
def profile_221() -> AntennaProfile:
    return AntennaProfile(M=(2, 2, 1))


@pytest.fixture
def profile_322() -> AntennaProfile:
    return AntennaProfile(M=(3, 2, 2))


@pytest.fixture
def channel_221(profile_221: AntennaProfile) -> ChannelRealization:
    return generate_channel(profile_221, seed=0)


def duplicated_h31_channel(profile: AntennaProfile, seed: int) -> ChannelRealization:
    """Generic channel except that H31 has two identical rows."""
    ch = generate_channel(profile, seed)
    blocks = [[np.array(ch.block(i, j)) for j in range(profile.K)] for i in range(profile.K)]
    blocks[2][0] = np.vstack([blocks[2][0][0]] * profile.M[2])
    return ChannelRealization.from_blocks(profile, blocks, seed=seed)


@pytest.fixture
def non_generic_factory() -> Callable[[AntennaProfile, int], ChannelRealization]:
    return duplicated_h31_channel


@pytest.fixture
def runner() -> CliRunner:
    return CliRunner()
