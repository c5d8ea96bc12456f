"""Symmetric game data structures and deviation-payoff kernels.

There are six variants, from slowest to fastest:

``dict``
    hash map from profile to payoff vector, a loop over profiles per query
``profile_arrays``
    parallel profile and payoff arrays with per-action masking
``reps_arrays``
    profile arrays plus a pre-computed repetitions array
``opp_config``
    opponent configurations, payoffs, and a repeats row
``weighted``
    opponent configurations with payoffs pre-multiplied by repeats
``log_weighted``
    opponent configurations with log repetition-weighted normalized payoffs

All of them answer the same queries. Only ``log_weighted`` can represent
games past the 64-bit repetition limit, and it reports payoffs on the
normalized scale (``[MIN_PAYOFF, MAX_PAYOFF]``); ``denormalize`` maps them
back. Tables are action-major: row ``a``, column ``j`` is action ``a`` against
configuration ``j`` in canonical order.
"""
import itertools
import json
import math
from concurrent import futures
from dataclasses import dataclass

import numpy as np

from symgames import combinatorics as comb
from symgames.errors import (ActionNotPlayed, DimensionMismatch, EmptySupport,
                             NonFinitePayoff, RangeError)

MIN_PAYOFF = 1e-5
MAX_PAYOFF = 1e3

VARIANTS = ("dict", "profile_arrays", "reps_arrays", "opp_config", "weighted", "log_weighted")

# bound on elements of the actions x configs x mixtures intermediate
_BATCH_ELEMENTS = 1 << 18


@dataclass(frozen=True)
class NormalizationParams:
    """Positive affine map ``(x - offset) * scale + MIN_PAYOFF``."""

    offset: float
    scale: float

    def normalize(self, values):
        return (np.asarray(values, dtype=float) - self.offset) * self.scale + MIN_PAYOFF

    def denormalize(self, values):
        return (np.asarray(values, dtype=float) - MIN_PAYOFF) / self.scale + self.offset

    def denormalize_derivatives(self, jacobian, num_players):
        """Raw-scale deviation derivatives from normalized ones.

        Configuration probabilities sum to ``(sum sigma) ** (P - 1)``, whose
        derivative ``P - 1`` carries the affine shift into the Jacobian.
        """
        shift = (MIN_PAYOFF - self.offset * self.scale) * (num_players - 1)
        return (np.asarray(jacobian, dtype=float) - shift) / self.scale


def normalize_payoffs(table):
    """Map ``table`` affinely onto ``[MIN_PAYOFF, MAX_PAYOFF]``.

    A constant table has no spread to rescale; it gets ``scale = 1`` and
    every entry becomes ``MIN_PAYOFF``.
    """
    table = np.asarray(table, dtype=float)
    low, high = float(table.min()), float(table.max())
    scale = (MAX_PAYOFF - MIN_PAYOFF) / (high - low) if high > low else 1.0
    params = NormalizationParams(low, scale)
    normalized = params.normalize(table)
    # pin the endpoints against rounding
    normalized[table == low] = MIN_PAYOFF
    if high > low:
        normalized[table == high] = MAX_PAYOFF
    return normalized, params


def denormalize(values, params):
    return params.denormalize(values)


class GameSpec:
    """A symmetric game given by its payoff function.

    ``payoff_fn(config)`` takes an opponent configuration (a tuple of counts
    summing to ``num_players - 1``) and returns the payoff of every action
    against it. ``table_fn``, if given, is a vectorized equivalent taking an
    ``A x J`` configuration array and returning the ``A x J`` payoffs; it is
    used for building tables and never by the brute-force oracle.
    """

    def __init__(self, num_players, num_actions, payoff_fn, table_fn=None, names=None):
        if num_players < 2 or num_actions < 2:
            raise ValueError("need at least two players and two actions")
        self.num_players = int(num_players)
        self.num_actions = int(num_actions)
        self.payoff_fn = payoff_fn
        self.table_fn = table_fn
        self.names = list(names) if names is not None else None
        self._table = None

    @classmethod
    def from_table(cls, num_players, num_actions, table, names=None):
        """Spec backed by an explicit ``A x num_configs`` payoff table."""
        table = np.array(table, dtype=float)
        expected = (num_actions, comb.num_configs(num_players, num_actions))
        if table.shape != expected:
            raise DimensionMismatch(f"payoff table has shape {table.shape}, expected {expected}")
        table.setflags(write=False)

        def payoff_fn(config):
            return table[:, comb.config_rank(config, num_players)]

        def table_fn(configs):
            return table[:, comb.config_rank_columns(configs)]

        spec = cls(num_players, num_actions, payoff_fn, table_fn, names)
        spec._table = table
        return spec

    def payoffs(self, config):
        values = np.asarray(self.payoff_fn(tuple(int(c) for c in config)), dtype=float)
        if values.shape != (self.num_actions,):
            raise DimensionMismatch(
                f"payoff function returned shape {values.shape}, expected ({self.num_actions},)")
        return values

    def payoffs_at(self, configs):
        """Payoffs for the columns of an ``A x J`` configuration array."""
        configs = np.asarray(configs, dtype=np.int64)
        if self.table_fn is not None:
            values = np.asarray(self.table_fn(configs), dtype=float)
        else:
            values = np.column_stack([self.payoffs(c) for c in configs.T]) if configs.shape[1] \
                else np.zeros((self.num_actions, 0))
        if values.shape != configs.shape:
            raise DimensionMismatch(f"payoffs have shape {values.shape}, expected {configs.shape}")
        if not np.all(np.isfinite(values)):
            raise NonFinitePayoff("payoff function returned a non-finite value")
        return values

    def payoff_table(self):
        """Raw ``A x num_configs`` payoff table in canonical order (cached)."""
        if self._table is None:
            table = self.payoffs_at(comb.config_table(self.num_players, self.num_actions))
            table.setflags(write=False)
            self._table = table
        return self._table


def game_to_json(spec):
    data = {"players": spec.num_players, "actions": spec.num_actions,
            "payoffs": spec.payoff_table().tolist()}
    if spec.names is not None:
        data["names"] = spec.names
    return data


def game_from_json(data):
    return GameSpec.from_table(int(data["players"]), int(data["actions"]),
                               data["payoffs"], data.get("names"))


def save_game(path, spec):
    with open(path, "w") as f:
        json.dump(game_to_json(spec), f)


def load_game(path):
    with open(path) as f:
        return game_from_json(json.load(f))


def _as_vector(mixture, num_actions):
    mixture = np.asarray(mixture, dtype=float)
    if mixture.shape != (num_actions,):
        raise DimensionMismatch(f"mixture has shape {mixture.shape}, expected ({num_actions},)")
    return mixture


def _as_batch(mixtures, num_actions):
    mixtures = np.asarray(mixtures, dtype=float)
    if mixtures.ndim != 2 or mixtures.shape[1] != num_actions:
        raise DimensionMismatch(
            f"mixture batch has shape {mixtures.shape}, expected (M, {num_actions})")
    return mixtures


def validate_mixture(mixture, num_actions, tol=1e-9):
    """Return ``mixture`` as an array, checking it lies on the simplex."""
    mixture = _as_vector(mixture, num_actions)
    if np.any(mixture < -tol) or abs(mixture.sum() - 1) > tol:
        raise ValueError(f"not a mixture: {mixture.tolist()}")
    return mixture


class SymmetricGame:
    """Common interface of every representation variant."""

    variant = None
    normalization = None

    def __init__(self, num_players, num_actions):
        self.num_players = num_players
        self.num_actions = num_actions

    def deviation_payoffs(self, mixture):
        raise NotImplementedError

    def deviation_payoffs_batch(self, mixtures):
        """Deviation payoffs for each row of ``mixtures``, as an ``A x M`` array."""
        mixtures = _as_batch(mixtures, self.num_actions)
        out = np.empty((self.num_actions, len(mixtures)))
        for m, mixture in enumerate(mixtures):
            out[:, m] = self.deviation_payoffs(mixture)
        return out

    def deviation_derivatives(self, mixture):
        raise NotImplementedError(f"{self.variant} does not compute deviation derivatives")

    def deviation_derivatives_batch(self, mixtures):
        """Jacobians for each row of ``mixtures``, as an ``A x A x M`` array."""
        mixtures = _as_batch(mixtures, self.num_actions)
        return np.stack([self.deviation_derivatives(m) for m in mixtures], axis=-1)

    def normalize(self, values):
        return np.asarray(values, dtype=float)

    def denormalize(self, values):
        return np.asarray(values, dtype=float)

    def denormalize_derivatives(self, jacobian):
        return np.asarray(jacobian, dtype=float)

    def pure_payoff(self, profile, action):
        raise NotImplementedError

    def _opponents_of(self, profile, action):
        profile = [int(s) for s in profile]
        if len(profile) != self.num_actions:
            raise DimensionMismatch(f"profile {profile} has wrong length")
        if sum(profile) != self.num_players:
            raise RangeError(f"profile {profile} does not sum to {self.num_players}")
        if profile[action] == 0:
            raise ActionNotPlayed(f"action {action} is not played in {profile}")
        profile[action] -= 1
        return tuple(profile)

    def __repr__(self):
        return f"{type(self).__name__}(players={self.num_players}, actions={self.num_actions})"


class DictGame(SymmetricGame):
    """Baseline: a hash map from profile tuples to payoff vectors.

    Payoffs of actions a profile does not play are NaN.
    """

    variant = "dict"

    def __init__(self, num_players, num_actions, payoffs):
        super().__init__(num_players, num_actions)
        self.payoffs = payoffs

    def deviation_payoffs(self, mixture):
        sigma = [float(s) for s in _as_vector(mixture, self.num_actions)]
        dev = [0.0] * self.num_actions
        for profile, values in self.payoffs.items():
            for a, count in enumerate(profile):
                if count == 0:
                    continue
                config = list(profile)
                config[a] -= 1
                prob = comb.multinomial(config) * math.prod(
                    s ** c for s, c in zip(sigma, config))
                dev[a] += prob * values[a]
        return np.array(dev)

    def pure_payoff(self, profile, action):
        self._opponents_of(profile, action)
        return float(self.payoffs[tuple(int(s) for s in profile)][action])


class ProfileArraysGame(SymmetricGame):
    """Parallel ``A x num_profiles`` profile and payoff arrays."""

    variant = "profile_arrays"

    def __init__(self, num_players, num_actions, profiles, payoffs):
        super().__init__(num_players, num_actions)
        self.profiles = profiles
        self.payoffs = payoffs

    def deviation_payoffs(self, mixture):
        sigma = _as_vector(mixture, self.num_actions).astype(self.payoffs.dtype)
        dev = np.empty(self.num_actions)
        for a in range(self.num_actions):
            mask = self.profiles[a] != 0
            configs = self.profiles[:, mask]
            configs[a] -= 1
            probs = comb.multinomial_columns(configs) * np.prod(sigma[:, None] ** configs, 0)
            dev[a] = self.payoffs[a, mask] @ probs
        return dev

    def pure_payoff(self, profile, action):
        self._opponents_of(profile, action)
        return float(self.payoffs[action, comb.config_rank(profile)])


class RepsArraysGame(SymmetricGame):
    """Profile arrays plus pre-computed ``reps(s | a)``, evaluated in one pass.

    Per-action probabilities come from dividing the profile probability by
    ``sigma_a``; the mixture is floored at machine epsilon so this never
    divides by zero.
    """

    variant = "reps_arrays"

    def __init__(self, num_players, num_actions, profiles, payoffs, reps):
        super().__init__(num_players, num_actions)
        self.profiles = profiles
        self.payoffs = payoffs
        self.reps = reps
        # zeros where the action is not played
        self._filled = np.where(reps > 0, payoffs, 0).astype(payoffs.dtype)
        self._eps = np.finfo(payoffs.dtype).eps

    def deviation_payoffs(self, mixture):
        sigma = _as_vector(mixture, self.num_actions).astype(self.payoffs.dtype)
        sigma = np.maximum(sigma, self._eps)
        prof_probs = np.prod(sigma[:, None] ** self.profiles, 0)
        probs = self.reps * prof_probs / sigma[:, None]
        return (self._filled * probs).sum(1)

    def pure_payoff(self, profile, action):
        self._opponents_of(profile, action)
        return float(self.payoffs[action, comb.config_rank(profile)])


class _ConfigGame(SymmetricGame):
    """Shared pieces of the configuration-based variants."""

    def __init__(self, num_players, num_actions, configs):
        super().__init__(num_players, num_actions)
        self.configs = configs

    @property
    def num_configs(self):
        return self.configs.shape[1]

    def _weighted(self):
        raise NotImplementedError

    def _probs(self, sigma):
        return np.prod(sigma[:, None] ** self.configs, 0)

    def deviation_derivatives(self, mixture):
        weighted = self._weighted()
        sigma = _as_vector(mixture, self.num_actions).astype(weighted.dtype)
        sigma = np.maximum(sigma, np.finfo(weighted.dtype).eps)
        probs = self._probs(sigma)
        deriv = self.configs / sigma[:, None] * probs
        return weighted @ deriv.T


class OppConfigGame(_ConfigGame):
    variant = "opp_config"

    def __init__(self, num_players, num_actions, configs, payoffs, repeats):
        super().__init__(num_players, num_actions, configs)
        self.payoffs = payoffs
        self.repeats = repeats

    def _weighted(self):
        return self.payoffs * self.repeats

    def deviation_payoffs(self, mixture):
        sigma = _as_vector(mixture, self.num_actions).astype(self.payoffs.dtype)
        probs = self._probs(sigma) * self.repeats
        return self.payoffs @ probs

    def pure_payoff(self, profile, action):
        config = self._opponents_of(profile, action)
        return float(self.payoffs[action, comb.config_rank(config)])


class WeightedGame(_ConfigGame):
    variant = "weighted"

    def __init__(self, num_players, num_actions, configs, weighted_payoffs):
        super().__init__(num_players, num_actions, configs)
        self.weighted_payoffs = weighted_payoffs

    def _weighted(self):
        return self.weighted_payoffs

    def deviation_payoffs(self, mixture):
        sigma = _as_vector(mixture, self.num_actions).astype(self.weighted_payoffs.dtype)
        return self.weighted_payoffs @ self._probs(sigma)

    def pure_payoff(self, profile, action):
        config = self._opponents_of(profile, action)
        return float(self.weighted_payoffs[action, comb.config_rank(config)]
                     / comb.multinomial(config))


def _log_mixture(sigma, dtype):
    sigma = np.asarray(sigma, dtype=dtype)
    return np.log(np.maximum(sigma, np.finfo(dtype).eps))


def log_deviation_payoffs(log_payoffs, configs, mixture):
    """Log-space kernel: ``sum_j exp(lambda_j + c_j . log sigma)``."""
    log_probs = _log_mixture(mixture, log_payoffs.dtype) @ configs
    return np.exp(log_payoffs + log_probs).sum(1)


def log_deviation_payoffs_batch(log_payoffs, configs, mixtures):
    """Batched log kernel over rows of ``mixtures``, returning ``A x M``."""
    dtype = log_payoffs.dtype
    log_probs = _log_mixture(mixtures, dtype) @ configs  # M x J
    num_actions, num_configs = log_payoffs.shape
    out = np.empty((len(mixtures), num_actions), dtype=dtype)
    # M x A x J blocks keep the reduction on the contiguous axis
    chunk = max(1, _BATCH_ELEMENTS // max(1, num_actions * num_configs))
    for start in range(0, len(mixtures), chunk):
        stop = start + chunk
        out[start:stop] = np.exp(log_payoffs[None] + log_probs[start:stop, None, :]).sum(-1)
    return out.T


def log_deviation_derivatives(log_payoffs, configs, mixture):
    dtype = log_payoffs.dtype
    sigma = np.maximum(np.asarray(mixture, dtype=dtype), np.finfo(dtype).eps)
    contributions = np.exp(log_payoffs + np.log(sigma) @ configs)
    return contributions @ (configs / sigma[:, None]).T


def log_deviation_derivatives_batch(log_payoffs, configs, mixtures):
    """Batched Jacobians over rows of ``mixtures``, returning ``A x A x M``."""
    dtype = log_payoffs.dtype
    sigma = np.maximum(np.asarray(mixtures, dtype=dtype), np.finfo(dtype).eps)
    log_probs = np.log(sigma) @ configs  # M x J
    num_actions, num_configs = log_payoffs.shape
    out = np.empty((len(sigma), num_actions, num_actions), dtype=dtype)
    chunk = max(1, _BATCH_ELEMENTS // max(1, num_actions * num_configs))
    for start in range(0, len(sigma), chunk):
        stop = start + chunk
        contributions = np.exp(log_payoffs[None] + log_probs[start:stop, None, :])
        out[start:stop] = contributions @ configs.T
    return (out / sigma[:, None, :]).transpose(1, 2, 0)


class LogWeightedGame(_ConfigGame):
    """Canonical representation: configurations plus log weighted payoffs.

    ``log_payoffs[a, j] = log reps(c_j) + log normalized v_a(c_j)``.
    """

    variant = "log_weighted"

    def __init__(self, num_players, num_actions, configs, log_payoffs, normalization, names=None):
        super().__init__(num_players, num_actions, configs)
        self.log_payoffs = log_payoffs
        self.normalization = normalization
        self.names = names

    @property
    def dtype(self):
        return self.log_payoffs.dtype

    def deviation_payoffs(self, mixture):
        mixture = _as_vector(mixture, self.num_actions)
        return log_deviation_payoffs(self.log_payoffs, self.configs, mixture)

    def deviation_payoffs_batch(self, mixtures):
        mixtures = _as_batch(mixtures, self.num_actions)
        return log_deviation_payoffs_batch(self.log_payoffs, self.configs, mixtures)

    def deviation_derivatives(self, mixture):
        mixture = _as_vector(mixture, self.num_actions)
        return log_deviation_derivatives(self.log_payoffs, self.configs, mixture)

    def deviation_derivatives_batch(self, mixtures):
        mixtures = _as_batch(mixtures, self.num_actions)
        return log_deviation_derivatives_batch(self.log_payoffs, self.configs, mixtures)

    def normalize(self, values):
        return self.normalization.normalize(values)

    def denormalize(self, values):
        return self.normalization.denormalize(values)

    def denormalize_derivatives(self, jacobian):
        return self.normalization.denormalize_derivatives(jacobian, self.num_players)

    def pure_payoff(self, profile, action):
        config = self._opponents_of(profile, action)
        log_value = float(self.log_payoffs[action, comb.config_rank(config)])
        return float(self.denormalize(math.exp(log_value - comb.log_multinomial(config))))


def check_repetitions_fit(num_players, num_actions):
    """Raise ``OverflowError`` if some repetition count overflows 64 bits."""
    comb.max_repetitions(num_players, num_actions)


def _profile_payoffs(table, profiles, dtype):
    # payoffs[a, i] = v_a(s_i | a), NaN where s_i[a] == 0
    payoffs = np.full(profiles.shape, np.nan, dtype=dtype)
    reps = np.zeros(profiles.shape, dtype=np.int64)
    for a in range(profiles.shape[0]):
        mask = profiles[a] > 0
        configs = profiles[:, mask].copy()
        configs[a] -= 1
        payoffs[a, mask] = table[a, comb.config_rank_columns(configs)]
        reps[a, mask] = comb.multinomial_columns(configs)
    return payoffs, reps


def build(spec, variant="log_weighted", dtype=np.float64):
    """Build one representation variant of ``spec``.

    Every variant except ``log_weighted`` stores or computes exact 64-bit
    repetition counts and raises ``OverflowError`` past the limit given by
    :func:`symgames.combinatorics.max_players_without_overflow`.
    """
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}, expected one of {VARIANTS}")
    num_players, num_actions = spec.num_players, spec.num_actions
    if variant != "log_weighted":
        check_repetitions_fit(num_players, num_actions)
    table = spec.payoff_table()
    configs = comb.config_table(num_players, num_actions)

    if variant == "log_weighted":
        normalized, params = normalize_payoffs(table)
        log_payoffs = np.log(normalized) + comb.log_multinomial_columns(configs)
        return LogWeightedGame(num_players, num_actions, configs.astype(dtype),
                               log_payoffs.astype(dtype), params, spec.names)
    if variant in ("opp_config", "weighted"):
        repeats = comb.multinomial_columns(configs)
        if variant == "opp_config":
            return OppConfigGame(num_players, num_actions, configs.astype(dtype),
                                 table.astype(dtype), repeats.astype(dtype))
        return WeightedGame(num_players, num_actions, configs.astype(dtype),
                            (table * repeats).astype(dtype))

    profiles = comb.profile_table(num_players, num_actions)
    payoffs, reps = _profile_payoffs(table, profiles, dtype)
    if variant == "dict":
        mapping = {tuple(s): values for s, values in zip(profiles.T.tolist(), payoffs.T.tolist())}
        return DictGame(num_players, num_actions, mapping)
    if variant == "profile_arrays":
        return ProfileArraysGame(num_players, num_actions, np.array(profiles), payoffs)
    return RepsArraysGame(num_players, num_actions, profiles.astype(dtype), payoffs,
                          reps.astype(dtype))


def deviation_payoffs(game, mixture, denormalize=False):
    """Deviation payoff of every action against opponents playing ``mixture``.

    Values are on the game's own scale (normalized for ``log_weighted``)
    unless ``denormalize`` is set.
    """
    dev = game.deviation_payoffs(mixture)
    return game.denormalize(dev) if denormalize else dev


def deviation_payoffs_batch(game, mixtures, denormalize=False):
    dev = game.deviation_payoffs_batch(mixtures)
    return game.denormalize(dev) if denormalize else dev


def parallel_deviation_payoffs(game, mixtures, workers=2):
    """Batch deviation payoffs with the batch split across threads.

    Results are identical to :func:`deviation_payoffs_batch`.
    """
    mixtures = _as_batch(mixtures, game.num_actions)
    chunks = [c for c in np.array_split(mixtures, workers) if len(c)]
    with futures.ThreadPoolExecutor(workers) as pool:
        parts = list(pool.map(game.deviation_payoffs_batch, chunks))
    return np.hstack(parts) if parts else np.zeros((game.num_actions, 0))


def deviation_derivatives(game, mixture, denormalize=False):
    """Jacobian ``J[a, s] = d u_a / d sigma_s``; mixture floored at machine epsilon."""
    jac = game.deviation_derivatives(mixture)
    return game.denormalize_derivatives(jac) if denormalize else jac


def expected_utility(game, mixture):
    mixture = _as_vector(mixture, game.num_actions)
    return float(game.deviation_payoffs(mixture) @ mixture)


def regret(game, mixture):
    mixture = _as_vector(mixture, game.num_actions)
    dev = game.deviation_payoffs(mixture)
    return float(dev.max() - dev @ mixture)


def pure_payoff(game, profile, action):
    """Raw payoff to ``action`` in pure ``profile``."""
    return game.pure_payoff(profile, action)


class RestrictedGame:
    """Configurations over a support subset with payoff rows for every action.

    ``deviation_payoffs`` takes a mixture over the support (length
    ``len(support)``, or a full-length mixture that is zero off the support)
    and returns normalized deviation payoffs for all actions.
    """

    def __init__(self, num_players, num_actions, support, configs, log_payoffs, normalization):
        self.num_players = num_players
        self.num_actions = num_actions
        self.support = support
        self.configs = configs
        self.log_payoffs = log_payoffs
        self.normalization = normalization

    def _support_mixture(self, mixture):
        mixture = np.asarray(mixture, dtype=float)
        if mixture.shape == (self.num_actions,) and len(self.support) != self.num_actions:
            off = np.delete(mixture, self.support)
            if np.any(off > 0):
                raise DimensionMismatch("mixture has weight outside the support")
            return mixture[self.support]
        return _as_vector(mixture, len(self.support))

    def embed(self, mixture):
        """Full-length mixture from one over the support."""
        full = np.zeros(self.num_actions)
        full[self.support] = self._support_mixture(mixture)
        return full

    def deviation_payoffs(self, mixture):
        sub = self._support_mixture(mixture)
        return log_deviation_payoffs(self.log_payoffs, self.configs, sub)

    def deviation_gains(self, mixture):
        """Gain of every action over the expected utility of the support mixture."""
        sub = self._support_mixture(mixture)
        dev = self.deviation_payoffs(sub)
        return dev - dev[self.support] @ sub

    def subgame(self):
        """The game among support actions only, as a :class:`LogWeightedGame`."""
        return LogWeightedGame(self.num_players, len(self.support), self.configs,
                               self.log_payoffs[self.support], self.normalization)

    def denormalize(self, values):
        return self.normalization.denormalize(values)


def restrict_support(game, support):
    """Restrict ``game`` (a :class:`GameSpec` or :class:`LogWeightedGame`) to ``support``."""
    support = sorted(set(int(a) for a in support))
    if not support:
        raise EmptySupport("support must contain at least one action")
    num_players, num_actions = game.num_players, game.num_actions
    if support[0] < 0 or support[-1] >= num_actions:
        raise RangeError(f"support {support} out of range for {num_actions} actions")
    sub_configs = comb.config_table(num_players, len(support))
    full_configs = np.zeros((num_actions, sub_configs.shape[1]), dtype=np.int64)
    full_configs[support] = sub_configs

    if isinstance(game, LogWeightedGame):
        columns = comb.config_rank_columns(full_configs)
        return RestrictedGame(num_players, num_actions, support,
                              sub_configs.astype(game.dtype), game.log_payoffs[:, columns],
                              game.normalization)
    if isinstance(game, GameSpec):
        normalized, params = normalize_payoffs(game.payoffs_at(full_configs))
        log_payoffs = np.log(normalized) + comb.log_multinomial_columns(sub_configs)
        return RestrictedGame(num_players, num_actions, support, sub_configs.astype(float),
                              log_payoffs, params)
    raise TypeError(f"cannot restrict {type(game).__name__}")


def brute_force_deviation_payoffs(spec, mixture):
    """Deviation payoffs by enumerating every ordered opponent assignment.

    Independent of the tables: it sums ``v_a`` over all ``A ** (P - 1)``
    assignments weighted by the product of the assigned probabilities.
    """
    num_actions, opponents = spec.num_actions, spec.num_players - 1
    if num_actions ** opponents > 10**7:
        raise ValueError("too many assignments for brute force")
    sigma = _as_vector(mixture, num_actions)
    cache = {}
    dev = np.zeros(num_actions)
    for assignment in itertools.product(range(num_actions), repeat=opponents):
        counts = tuple(assignment.count(a) for a in range(num_actions))
        if counts not in cache:
            cache[counts] = spec.payoffs(counts)
        dev += math.prod(sigma[a] for a in assignment) * cache[counts]
    return dev
