import json
import pathlib

import pytest

from hopfcore import build_ueg, build_xyw
from hopfcore.pbw import PBWStructure

ROOT = pathlib.Path(__file__).resolve().parents[1]
FIXTURES = ROOT / "fixtures"

HEIS_BRACKETS = {"x": {"y": {"z": "1"}}}
SL2_BRACKETS = {"h": {"e": {"e": "2"}, "f": {"f": "-2"}}, "e": {"f": {"h": "1"}}}


@pytest.fixture(scope="session")
def qt():
    return PBWStructure.from_bialgebra(build_ueg(["t"], {}, 3))


@pytest.fixture(scope="session")
def heis():
    return PBWStructure.from_bialgebra(build_ueg(["x", "y", "z"], HEIS_BRACKETS, 4))


@pytest.fixture(scope="session")
def sl2():
    return PBWStructure.from_bialgebra(build_ueg(["e", "f", "h"], SL2_BRACKETS, 4))


@pytest.fixture(scope="session")
def xyw():
    return PBWStructure.from_bialgebra(build_xyw(4))


@pytest.fixture(scope="session")
def fixtures_dir():
    return FIXTURES


def load_fixture(name):
    with open(FIXTURES / name, "r", encoding="utf-8") as handle:
        return json.load(handle)
