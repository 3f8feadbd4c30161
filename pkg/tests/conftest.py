import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from dsut import fixture_path  # noqa: E402
from dsut.factlang import parse_facts  # noqa: E402
from dsut.generate import requirements_from_facts  # noqa: E402
from dsut.model import build_model  # noqa: E402


@pytest.fixture(scope="session")
def model_file():
    return Path(str(fixture_path("webapp.dsut")))


@pytest.fixture(scope="session")
def requirements_file():
    return Path(str(fixture_path("webapp_requirements.dsut")))


@pytest.fixture(scope="session")
def fixture_facts(model_file):
    return parse_facts(model_file.read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def requirement_facts(requirements_file):
    return parse_facts(requirements_file.read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def fixture_model(fixture_facts):
    return build_model(fixture_facts)


@pytest.fixture(scope="session")
def declared(requirement_facts):
    return requirements_from_facts(requirement_facts)
