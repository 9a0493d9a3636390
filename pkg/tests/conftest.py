import pytest

from memplan import build_instance


@pytest.fixture
def worked_instance():
    """The hand-checked 3-block instance used across the suite."""
    return build_instance([(4, 1, 3), (2, 2, 5), (3, 4, 6)])
