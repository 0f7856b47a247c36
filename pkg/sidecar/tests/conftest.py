import importlib.util
from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session", autouse=True)
def fixture_images():
    """Render the fixture images from the hand-written annotations."""
    spec = importlib.util.spec_from_file_location(
        "draw_fixtures", FIXTURES / "draw_fixtures.py")
    mod = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(mod)
    mod.main()
