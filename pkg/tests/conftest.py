from __future__ import annotations

import pytest

from screenarc.geometry import LayoutConfig, Pose, build_layout


@pytest.fixture(scope="session")
def layout15():
    return build_layout(LayoutConfig.canonical(15), Pose())


@pytest.fixture(scope="session")
def layout4():
    return build_layout(LayoutConfig.canonical(4), Pose())


@pytest.fixture(scope="session")
def layout1():
    return build_layout(
        LayoutConfig(screen_count=1, columns=1, rows=1), Pose()
    )
