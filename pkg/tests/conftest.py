import json
from pathlib import Path

import pytest

from agora import load_community, load_policy, load_scenario, snapshot, stdlib_registry

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
GOLDEN = Path(__file__).resolve().parent / "golden"


@pytest.fixture(scope="session")
def registry():
    return stdlib_registry()


@pytest.fixture()
def community():
    return load_community((FIXTURES / "community.json").read_text(encoding="utf-8"))


@pytest.fixture()
def snap(community):
    return snapshot(community)


@pytest.fixture(scope="session")
def fixtures_dir():
    return FIXTURES


def fixture_policy(name):
    return load_policy((FIXTURES / f"{name}.json").read_text(encoding="utf-8"))


def fixture_scenario(name):
    return load_scenario((FIXTURES / f"{name}.json").read_text(encoding="utf-8"))


def fixture_json(name):
    return json.loads((FIXTURES / f"{name}.json").read_text(encoding="utf-8"))
