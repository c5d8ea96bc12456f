"""Symmetric action-graph games without function nodes.

The payoff of action ``a`` depends only on how many opponents play each
action in its neighborhood ``N(a)``. Each action keeps its own table over a
reduced action set: the sorted neighborhood followed by one aggregate
"outside" action for everything else. The outside action is left out when
the neighborhood already covers every action.
"""
import json

import numpy as np

from symgames import combinatorics as comb
from symgames import representations as rep
from symgames.errors import DimensionMismatch, RangeError


class SymmetricAGG:
    def __init__(self, num_players, num_actions, adjacency, payoffs):
        self.num_players = num_players
        self.num_actions = num_actions
        self.adjacency = [tuple(sorted(set(int(b) for b in nbrs))) for nbrs in adjacency]
        if len(self.adjacency) != num_actions:
            raise DimensionMismatch(f"need {num_actions} neighborhoods, got {len(self.adjacency)}")
        for nbrs in self.adjacency:
            if any(b < 0 or b >= num_actions for b in nbrs):
                raise RangeError(f"neighborhood {nbrs} has actions outside 0..{num_actions - 1}")
        self.configs = [comb.config_table(num_players, self.reduced_size(a))
                        for a in range(num_actions)]
        self.payoffs = [np.asarray(p, dtype=float) for p in payoffs]
        for a, (table, configs) in enumerate(zip(self.payoffs, self.configs)):
            if table.shape != (configs.shape[1],):
                raise DimensionMismatch(
                    f"action {a} table has shape {table.shape}, expected ({configs.shape[1]},)")
        _, self.normalization = rep.normalize_payoffs(np.concatenate(self.payoffs))
        self.log_tables = [
            comb.log_multinomial_columns(configs) + np.log(self.normalization.normalize(table))
            for table, configs in zip(self.payoffs, self.configs)]

    def has_outside(self, action):
        return len(self.adjacency[action]) < self.num_actions

    def reduced_size(self, action):
        return len(self.adjacency[action]) + self.has_outside(action)

    def collapse(self, mixture, action):
        """Mixture over the reduced action set of ``action``."""
        mixture = np.asarray(mixture, dtype=float)
        nbrs = list(self.adjacency[action])
        inside = mixture[nbrs]
        if not self.has_outside(action):
            return inside
        outside = np.delete(mixture, nbrs).sum()
        return np.append(inside, outside)

    def project(self, config, action):
        """Reduced opponent counts of a full configuration."""
        config = np.asarray(config)
        nbrs = list(self.adjacency[action])
        inside = config[nbrs]
        if not self.has_outside(action):
            return inside
        return np.append(inside, config.sum() - inside.sum())

    def payoff(self, config, action):
        reduced = self.project(config, action)
        return self.payoffs[action][comb.config_rank(reduced, self.num_players)]

    def table_size(self):
        return sum(t.size for t in self.payoffs)

    def __repr__(self):
        return f"SymmetricAGG(players={self.num_players}, actions={self.num_actions})"


def build_agg(num_players, num_actions, adjacency, payoff_fn):
    """Tabulate ``payoff_fn(action, counts)`` over every neighborhood configuration.

    ``counts`` lists opponents on each action of the sorted neighborhood.
    """
    payoffs = []
    for a, nbrs in enumerate(adjacency):
        size = len(set(nbrs)) + (len(set(nbrs)) < num_actions)
        configs = comb.config_table(num_players, size).T[:, :len(set(nbrs))]
        payoffs.append([float(payoff_fn(a, tuple(int(x) for x in c))) for c in configs])
    return SymmetricAGG(num_players, num_actions, adjacency, payoffs)


def agg_deviation_payoffs(agg, mixture, denormalize=False):
    """Deviation payoffs from the per-action reduced tables."""
    mixture = np.asarray(mixture, dtype=float)
    if mixture.shape != (agg.num_actions,):
        raise DimensionMismatch(f"mixture has shape {mixture.shape}, expected ({agg.num_actions},)")
    dev = np.array([
        rep.log_deviation_payoffs(agg.log_tables[a][None, :], agg.configs[a],
                                  agg.collapse(mixture, a))[0]
        for a in range(agg.num_actions)])
    return agg.normalization.denormalize(dev) if denormalize else dev


def expand_to_full(agg):
    """The same game as a full symmetric game over all configurations."""
    def payoff_fn(config):
        return [agg.payoff(config, a) for a in range(agg.num_actions)]
    return rep.GameSpec(agg.num_players, agg.num_actions, payoff_fn)


def random_agg(num_players, num_actions, seed, edge_prob=0.5, self_loops=True):
    """Random sparse instance with uniform payoffs on each reduced table."""
    rng = np.random.default_rng(seed)
    adjacency = []
    for a in range(num_actions):
        nbrs = set(np.flatnonzero(rng.random(num_actions) < edge_prob).tolist())
        if self_loops:
            nbrs.add(a)
        adjacency.append(sorted(nbrs))
    payoffs = []
    for nbrs in adjacency:
        size = len(nbrs) + (len(nbrs) < num_actions)
        payoffs.append(rng.uniform(-1, 1, comb.num_configs(num_players, size)))
    return SymmetricAGG(num_players, num_actions, adjacency, payoffs)


def agg_to_json(agg):
    return {"players": agg.num_players, "actions": agg.num_actions,
            "adjacency": [list(n) for n in agg.adjacency],
            "tables": [t.tolist() for t in agg.payoffs]}


def agg_from_json(data):
    return SymmetricAGG(data["players"], data["actions"], data["adjacency"], data["tables"])


def save_agg(path, agg):
    with open(path, "w") as f:
        json.dump(agg_to_json(agg), f)


def load_agg(path):
    with open(path) as f:
        return agg_from_json(json.load(f))
