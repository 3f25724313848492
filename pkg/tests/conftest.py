import hypothesis
import pytest

from liquidtally.keccak import keccak256

hypothesis.settings.register_profile("fast", max_examples=25)
hypothesis.settings.register_profile("thorough", max_examples=200)


@pytest.fixture(scope="session", autouse=True)
def warm_keccak():
    # trigger the one-off jit compile so timed tests measure only the work
    keccak256(b"warmup")


@pytest.fixture()
def example12():
    import helpers

    snap, forest, table = helpers.example12_pipeline()
    return snap, forest, table
