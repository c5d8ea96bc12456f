import numpy as np
import pytest

from symgames import generators
from symgames.representations import GameSpec

WORKED_MIXTURE = np.array([0.1, 0.5, 0.4])
WORKED_DEVPAYS = np.array([0.63, -0.5, -0.36])


def dominance_game(num_players=4, num_actions=2, gap=1.0):
    """Action 0 beats every other action by ``gap`` against any configuration."""
    def payoff_fn(config):
        base = 0.1 * np.asarray(config, dtype=float)
        values = -base.sum() + base
        values[0] += gap
        return values
    return GameSpec(num_players, num_actions, payoff_fn)


def strict_dominance_game(num_players=3, num_actions=3):
    """Action 0 pays 1 and every other action pays 0."""
    return GameSpec(num_players, num_actions, lambda config: np.eye(num_actions)[0])


def rps_game():
    matrix = np.array([[0, -1, 1], [1, 0, -1], [-1, 1, 0]], dtype=float)
    return GameSpec(2, 3, lambda config: matrix @ np.asarray(config, dtype=float))


def matrix_game(matrix):
    """Two-player symmetric game with row payoffs ``matrix``."""
    matrix = np.asarray(matrix, dtype=float)
    return GameSpec(2, len(matrix), lambda config: matrix @ np.asarray(config, dtype=float))


def interior_mixtures(rng, num_actions, count, low=0.05):
    mixes = rng.dirichlet(np.ones(num_actions), count)
    mixes = low + (1 - low * num_actions) * mixes
    return mixes


@pytest.fixture
def worked_spec():
    return generators.worked_example_game()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    import sys
    module = sys.modules.get("test_acceptance")
    if module is not None and module.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in module.RESULTS:
            terminalreporter.write_line(line)
