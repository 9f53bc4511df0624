from __future__ import annotations

from importlib.resources import files

import pytest

from synbench import load_calibration

FALCON_LEAVES = (0, 6, 9, 17, 20, 26)


def falcon_bytes() -> bytes:
    return (files("synbench") / "data" / "falcon27.json").read_bytes()


@pytest.fixture(scope="session")
def falcon():
    return load_calibration(falcon_bytes())
