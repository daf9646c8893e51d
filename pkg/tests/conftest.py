from __future__ import annotations

from collections.abc import Callable
from pathlib import Path

import pytest

from angularft.models import BallConfig
from angularft.verify import TestFunction, gaussian_family


FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture
def family() -> list[TestFunction]:
    return gaussian_family()


@pytest.fixture
def ball_config() -> BallConfig:
    return BallConfig()


@pytest.fixture
def golden() -> Callable[[str], str]:
    def load(name: str) -> str:
        return (FIXTURES / name).read_text(encoding="utf-8")

    return load
