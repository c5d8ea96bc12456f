"""Game generators: the 3-player worked example and two random families.

Random families draw from numpy's PCG64. A seed is expanded with
``SeedSequence(seed).spawn(n)`` and each kind of parameter (graph edges,
function shapes, weights, ...) gets its own child stream, so adding a draw to
one stream never shifts the others.
"""
from dataclasses import asdict, dataclass, field

import numpy as np

from symgames import combinatorics as comb
from symgames.representations import GameSpec

FAMILIES = ("worked-example", "additive-sine", "gmg")


@dataclass
class GeneratorParams:
    family: str
    num_players: int = 3
    num_actions: int = 3
    seed: int = 0
    n_functions: int = 200
    edge_prob: float = 0.2
    n_gaussians: int = 3
    extra: dict = field(default_factory=dict)

    def to_json(self):
        return asdict(self)


def _streams(seed, n):
    return [np.random.Generator(np.random.PCG64(s))
            for s in np.random.SeedSequence(seed).spawn(n)]


def worked_example_game():
    """3 players, 3 actions (0-indexed here as 0, 1, 2 for values 1, 2, 3).

    A player alone on action ``a`` gets ``a + 1``, a pair gets ``-(a + 1)``,
    and all three together get 0.
    """
    def payoff_fn(config):
        values = []
        for a in range(3):
            together = config[a] + 1
            values.append({1: a + 1, 2: -(a + 1), 3: 0}[together])
        return values

    return GameSpec(3, 3, payoff_fn, names=["1", "2", "3"])


class AdditiveSine:
    """Bipartite action/function-node game.

    Function ``f`` counts players on its adjacent actions and outputs
    ``amp * sin(freq * x + phase) + poly(x / P)``; action ``a`` is paid
    ``sum_f weights[a, f] * phi_f``. A deviator on ``a`` counts toward every
    function adjacent to ``a``.
    """

    def __init__(self, num_players, adjacency, weights, amp, freq, phase, poly):
        self.num_players = num_players
        self.adjacency = adjacency  # A x F booleans
        self.weights = weights  # A x F
        self.amp, self.freq, self.phase = amp, freq, phase
        self.poly = poly  # F x 4 coefficients, constant term first

    def functions(self, counts):
        x = np.asarray(counts, dtype=float)
        scaled = x / self.num_players
        poly = sum(self.poly[:, k] * scaled ** k for k in range(self.poly.shape[1]))
        return self.amp * np.sin(self.freq * x + self.phase) + poly

    def __call__(self, config):
        opp = np.asarray(config, dtype=float) @ self.adjacency
        return np.array([self.weights[a] @ self.functions(opp + self.adjacency[a])
                         for a in range(len(self.weights))])

    def table(self, configs):
        opp = configs.T.astype(float) @ self.adjacency  # J x F
        out = np.empty(configs.shape, dtype=float)
        for a in range(len(self.weights)):
            out[a] = self.functions(opp + self.adjacency[a]) @ self.weights[a]
        return out


def additive_sine_functions(params):
    num_players, num_actions, n_functions = params.num_players, params.num_actions, params.n_functions
    if not 0 <= params.edge_prob <= 1:
        raise ValueError("edge_prob must be in [0, 1]")
    edges, shapes, weights, polys = _streams(params.seed, 4)
    adjacency = (edges.random((num_actions, n_functions)) < params.edge_prob).astype(float)
    amp = shapes.uniform(0, 1, n_functions)
    freq = shapes.uniform(0.1, 2 * np.pi, n_functions) / num_players
    phase = shapes.uniform(0, 2 * np.pi, n_functions)
    poly = polys.uniform(-1, 1, (n_functions, 4))
    w = weights.uniform(-1, 1, (num_actions, n_functions)) / np.sqrt(n_functions)
    return AdditiveSine(num_players, adjacency, w, amp, freq, phase, poly)


def additive_sine_game(params):
    """Random additive-sine game, deterministic in ``params.seed``."""
    fn = additive_sine_functions(params)
    return GameSpec(params.num_players, params.num_actions, fn, fn.table)


def lkj_correlation(dim, rng, eta=1.0):
    """Random correlation matrix from the LKJ distribution (onion method)."""
    if dim == 1:
        return np.ones((1, 1))
    beta = eta + (dim - 2) / 2
    r = 2 * rng.beta(beta, beta) - 1
    corr = np.array([[1.0, r], [r, 1.0]])
    for k in range(2, dim):
        beta -= 0.5
        y = rng.beta(k / 2, beta)
        u = rng.standard_normal(k)
        u /= np.linalg.norm(u)
        z = np.linalg.cholesky(corr) @ (np.sqrt(y) * u)
        corr = np.block([[corr, z[:, None]], [z[None, :], np.ones((1, 1))]])
    return corr


class GaussianMixture:
    """Per-action sums of scaled (unnormalized) Gaussians over configurations."""

    def __init__(self, means, precisions, scales):
        self.means = means  # A x G x A
        self.precisions = precisions  # A x G x A x A
        self.scales = scales  # A x G

    def __call__(self, config):
        return self.table(np.asarray(config, dtype=float)[:, None])[:, 0]

    def table(self, configs):
        configs = np.asarray(configs, dtype=float)
        out = np.zeros(configs.shape)
        for a in range(self.means.shape[0]):
            for g in range(self.means.shape[1]):
                diff = configs - self.means[a, g][:, None]
                quad = np.einsum("ij,ik,kj->j", diff, self.precisions[a, g], diff)
                out[a] += self.scales[a, g] * np.exp(-0.5 * quad)
        return out


def gaussian_mixture_functions(params):
    num_players, num_actions, n_gaussians = params.num_players, params.num_actions, params.n_gaussians
    if n_gaussians < 1:
        raise ValueError("n_gaussians must be at least 1")
    centers, corrs, spreads, scales = _streams(params.seed, 4)
    opponents = num_players - 1
    shape = (num_actions, n_gaussians)
    means = centers.dirichlet(np.ones(num_actions), shape) * opponents
    precisions = np.empty(shape + (num_actions, num_actions))
    for a in range(num_actions):
        for g in range(n_gaussians):
            std = spreads.uniform(0.1, 0.5, num_actions) * max(opponents, 1)
            cov = lkj_correlation(num_actions, corrs) * np.outer(std, std)
            precisions[a, g] = np.linalg.inv(cov)
    return GaussianMixture(means, precisions, scales.uniform(-1, 1, shape))


def gaussian_mixture_game(params):
    """Random Gaussian-mixture game, deterministic in ``params.seed``."""
    fn = gaussian_mixture_functions(params)
    return GameSpec(params.num_players, params.num_actions, fn, fn.table)


def generate(params):
    if params.family == "worked-example":
        return worked_example_game()
    if params.family == "additive-sine":
        return additive_sine_game(params)
    if params.family == "gmg":
        return gaussian_mixture_game(params)
    raise ValueError(f"unknown family {params.family!r}, expected one of {FAMILIES}")


def random_game(num_players, num_actions, seed, family=None):
    """A random game from one of the random families (used by tests and benches)."""
    if family is None:
        family = ("additive-sine", "gmg")[seed % 2]
    return generate(GeneratorParams(family, num_players, num_actions, seed))


def uniform_table_game(num_players, num_actions, seed, low=-1.0, high=1.0):
    """Game whose payoff table entries are i.i.d. uniform."""
    rng = np.random.default_rng(seed)
    table = rng.uniform(low, high, (num_actions, comb.num_configs(num_players, num_actions)))
    return GameSpec.from_table(num_players, num_actions, table)
