import os
import sys

# Add the src directory to Python path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

import pytest

from prompt_learning_engine.config.loader import load_planted_task, load_task
from prompt_learning_engine.oracle.budget import BudgetLedger
from prompt_learning_engine.oracle.mock_server import MockScoringServer, create_app
from prompt_learning_engine.oracle.synthetic import SyntheticPlantedOracle

DATA_DIR = os.path.join(os.path.dirname(__file__), "..", "data", "planted")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: statistical or end-to-end runs that take several seconds")


@pytest.fixture
def data_dir():
    return os.path.abspath(DATA_DIR)


@pytest.fixture
def planted_task():
    return load_planted_task()


@pytest.fixture
def planted_verbalizer():
    return load_task("planted").verbalizer


@pytest.fixture
def planted_oracle(planted_task):
    return SyntheticPlantedOracle(planted_task, BudgetLedger(100000))


@pytest.fixture
def mock_server_factory():
    """Start mock scoring servers on ephemeral ports; all are stopped at teardown."""
    servers = []

    def start(**app_kwargs):
        server = MockScoringServer(create_app(**app_kwargs)).start()
        servers.append(server)
        return server

    yield start
    for server in servers:
        server.stop()
