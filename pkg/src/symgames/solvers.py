"""Equilibrium search using only deviation payoffs and their derivatives.

Every solver takes a single mixture (length ``A``) or a batch of starts
(``M x A``) and runs all starts together through the batched deviation
payoff path. To record iterates, pass a list as ``trace``; each iteration
appends an ``M x A`` array (the start is included).
"""
from concurrent import futures
from dataclasses import dataclass, field

import numpy as np

from symgames import combinatorics as comb
from symgames import representations as rep
from symgames.errors import DimensionMismatch, NegativeWeight

METHODS = ("rd", "gd", "fp", "ibr")


@dataclass
class SolverConfig:
    iters: int = 1000
    rd_offset: float = 0.0
    gd_step: object = 1e-6  # float, or a list of per-iteration steps (last one repeats)
    fp_initial_weight: float = None  # defaults to the number of actions
    epsilon: float = 1e-3
    dedup_dist: float = 1e-3

    def __post_init__(self):
        if int(self.iters) != self.iters or self.iters < 0:
            raise ValueError("iters must be a non-negative integer")
        if self.epsilon < 0 or self.dedup_dist < 0:
            raise ValueError("epsilon and dedup_dist must be non-negative")
        if self.fp_initial_weight is not None and self.fp_initial_weight <= 0:
            raise ValueError("fp_initial_weight must be positive")
        steps = np.atleast_1d(np.asarray(self.gd_step, dtype=float))
        if steps.size == 0 or np.any(steps <= 0):
            raise ValueError("gd_step must be positive")

    def step_at(self, t):
        steps = np.atleast_1d(np.asarray(self.gd_step, dtype=float))
        return float(steps[min(t, len(steps) - 1)])


@dataclass
class CandidateEquilibrium:
    mixture: np.ndarray
    regret: float
    solver: str
    start_index: int
    trace: list = field(default=None, repr=False)

    def to_json(self):
        data = {"mixture": [float(x) for x in self.mixture], "regret": float(self.regret),
                "solver": self.solver, "start": int(self.start_index)}
        if self.trace is not None:
            data["trace"] = [[float(x) for x in m] for m in self.trace]
        return data

    @classmethod
    def from_json(cls, data):
        trace = data.get("trace")
        return cls(np.asarray(data["mixture"], dtype=float), float(data["regret"]),
                   data["solver"], int(data["start"]),
                   None if trace is None else [np.asarray(m) for m in trace])


def _starts(game, mix0):
    mix = np.array(mix0, dtype=float)
    single = mix.ndim == 1
    mix = np.atleast_2d(mix)
    if mix.ndim != 2 or mix.shape[1] != game.num_actions:
        raise DimensionMismatch(
            f"starts have shape {np.shape(mix0)}, expected ({game.num_actions},) or (M, {game.num_actions})")
    return mix, single


def _finish(mix, single):
    return mix[0] if single else mix


def _devpays(game, mix):
    return np.asarray(game.deviation_payoffs_batch(mix), dtype=float).T  # M x A


def _record(trace, mix):
    if trace is not None:
        trace.append(mix.copy())


def _pick(values, single):
    return values[0] if single else values


def gain_vector(game, mixture):
    """Per-action gains ``max(0, u_a - u . sigma)``; rows for a batch."""
    mix, single = _starts(game, mixture)
    dev = _devpays(game, mix)
    gains = np.maximum(0.0, dev - np.sum(dev * mix, 1, keepdims=True))
    return _pick(gains, single)


def gain(game, mixture):
    """Sum of deviation gains; zero exactly at Nash equilibria."""
    return _pick(np.atleast_2d(gain_vector(game, mixture)).sum(1), np.ndim(mixture) == 1)


def _gain_gradient(game, mix):
    dev = _devpays(game, mix)
    jac = np.asarray(game.deviation_derivatives_batch(mix), dtype=float)  # A x A x M
    # gradient of the expected utility u . sigma
    util_grad = dev + np.einsum("am,asm->ms", mix.T, jac)
    gaining = dev > np.sum(dev * mix, 1, keepdims=True)
    return np.einsum("ma,asm->ms", gaining, jac) - gaining.sum(1, keepdims=True) * util_grad


def gain_gradient(game, mixture):
    """Gradient of :func:`gain` in the mixture probabilities.

    Actions exactly at the expected utility are treated as non-gaining.
    """
    mix, single = _starts(game, mixture)
    return _pick(_gain_gradient(game, mix), single)


def simplex_project(v):
    """Euclidean projection onto the probability simplex (sort and threshold).

    Works on a vector or on each row of a matrix.
    """
    v = np.asarray(v, dtype=float)
    rows = np.atleast_2d(v)
    u = -np.sort(-rows, axis=1)
    css = np.cumsum(u, 1) - 1
    k = np.arange(1, rows.shape[1] + 1)
    rho = np.count_nonzero(u - css / k > 0, axis=1)
    theta = css[np.arange(len(rows)), rho - 1] / rho
    out = np.maximum(rows - theta[:, None], 0)
    return out[0] if v.ndim == 1 else out


def replicator_dynamics(game, mix0, config=None, trace=None):
    """``w_a = sigma_a (u_a - offset)``, renormalized, for ``config.iters`` steps."""
    config = config or SolverConfig()
    mix, single = _starts(game, mix0)
    _record(trace, mix)
    for _ in range(config.iters):
        shifted = _devpays(game, mix) - config.rd_offset
        if np.any(shifted < 0):
            raise NegativeWeight(
                f"offset {config.rd_offset} exceeds a deviation payoff ({shifted.min() + config.rd_offset})")
        weights = mix * shifted
        total = weights.sum(1, keepdims=True)
        mix = np.where(total > 0, weights / np.where(total > 0, total, 1), mix)
        _record(trace, mix)
    return _finish(mix, single)


def gain_descent(game, mix0, config=None, trace=None):
    """Projected descent on the gain: ``sigma <- project(sigma - step * grad)``."""
    config = config or SolverConfig()
    mix, single = _starts(game, mix0)
    _record(trace, mix)
    for t in range(config.iters):
        mix = simplex_project(mix - config.step_at(t) * _gain_gradient(game, mix))
        _record(trace, mix)
    return _finish(mix, single)


def better_response_map(game, mixture):
    """``B_a(sigma) = (sigma_a + g_a) / (1 + sum g)``; fixed points are the Nash equilibria."""
    mix, single = _starts(game, mixture)
    gains = np.atleast_2d(gain_vector(game, mix))
    return _finish((mix + gains) / (1 + gains.sum(1, keepdims=True)), single)


def iterated_better_response(game, mix0, config=None, trace=None):
    config = config or SolverConfig()
    mix, single = _starts(game, mix0)
    _record(trace, mix)
    for _ in range(config.iters):
        mix = better_response_map(game, mix)
        _record(trace, mix)
    return _finish(mix, single)


def fictitious_play(game, mix0, config=None, trace=None):
    """Best respond to the empirical mixture; counts start at ``c * sigma0``.

    Ties go to the lowest action index.
    """
    config = config or SolverConfig()
    mix, single = _starts(game, mix0)
    c = config.fp_initial_weight or game.num_actions
    counts = c * mix
    rows = np.arange(len(mix))
    _record(trace, mix)
    for _ in range(config.iters):
        best = np.argmax(_devpays(game, mix), axis=1)
        counts[rows, best] += 1
        mix = counts / counts.sum(1, keepdims=True)
        _record(trace, mix)
    return _finish(mix, single)


SOLVERS = {"rd": replicator_dynamics, "gd": gain_descent, "fp": fictitious_play,
           "ibr": iterated_better_response}


def mixture_grid(num_actions, resolution):
    """All mixtures whose entries are multiples of ``1 / resolution``, as rows.

    Resolution 0 gives just the uniform mixture.
    """
    if resolution < 0:
        raise ValueError("resolution must be non-negative")
    if resolution == 0:
        return np.full((1, num_actions), 1 / num_actions)
    return comb.profile_table(resolution, num_actions).T / resolution


def dedup(candidates, dist):
    """Keep the lowest-regret candidate of every group within ``dist`` (max-norm)."""
    kept = []
    for cand in sorted(candidates, key=lambda c: c.regret):
        if all(np.max(np.abs(cand.mixture - k.mixture)) > dist for k in kept):
            kept.append(cand)
    return kept


def _run(game, method, starts, config, traces):
    log = [] if traces else None
    finals = SOLVERS[method](game, starts, config, trace=log)
    paths = np.stack(log, axis=1) if traces else None  # M x T x A
    return finals, paths


def find_equilibria(game, methods=("rd", "gd"), starts=None, config=None, grid=4,
                    workers=None, traces=False):
    """Run every method from every start and return the distinct epsilon-Nash finals.

    Regret is recomputed on each final mixture on the game's own payoff scale
    (normalized for the log representation). ``workers`` runs the methods in
    parallel threads; results match the sequential run.
    """
    config = config or SolverConfig()
    unknown = set(methods) - set(SOLVERS)
    if unknown:
        raise ValueError(f"unknown methods {sorted(unknown)}, expected some of {METHODS}")
    if starts is None:
        starts = mixture_grid(game.num_actions, grid)
    starts, _ = _starts(game, starts)
    if workers and workers > 1:
        with futures.ThreadPoolExecutor(workers) as pool:
            runs = list(pool.map(lambda m: _run(game, m, starts, config, traces), methods))
    else:
        runs = [_run(game, m, starts, config, traces) for m in methods]
    candidates = []
    for method, (finals, paths) in zip(methods, runs):
        for i, mixture in enumerate(finals):
            r = rep.regret(game, mixture)
            if r <= config.epsilon:
                trace = None if paths is None else list(paths[i])
                candidates.append(CandidateEquilibrium(mixture, r, method, i, trace))
    return dedup(candidates, config.dedup_dist)


def candidates_to_json(candidates):
    return [c.to_json() for c in candidates]


def candidates_from_json(data):
    return [CandidateEquilibrium.from_json(d) for d in data]
