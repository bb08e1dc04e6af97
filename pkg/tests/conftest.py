import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from skelsem import ext_while_language, while_language


@pytest.fixture(scope="session")
def lang():
    return while_language()


@pytest.fixture(scope="session")
def ext():
    return ext_while_language()
