import json
import pathlib

import pytest

DATA = pathlib.Path(__file__).resolve().parents[2] / "data"


def load(rel):
    return json.loads((DATA / rel).read_text())


@pytest.fixture
def ella():
    return load("scripts/ella_arc.json")


@pytest.fixture
def configs():
    return {name: load(f"configs/{name}.json") for name in ("adam", "bella", "caleb", "caleb_no_memory", "caleb_no_emotion")}
