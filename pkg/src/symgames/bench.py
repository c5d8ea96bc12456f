"""Timing, memory and precision measurements for the representation variants.

Timings are the median of at least three runs on a monotonic clock, after a
short warm-up. By default every mixture is a separate call, which is how each
variant is used in a solver loop; ``batch_size`` switches to the batched path.
Instances that would overflow the repetition counts or exceed the memory cap
are recorded with a skip reason instead of being run.
"""
import csv
import math
import statistics
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from symgames import generators as gen
from symgames import representations as rep
from symgames import solvers as sv

LADDER = ("log_weighted", "weighted", "opp_config", "reps_arrays", "profile_arrays", "dict")
CSV_FIELDS = ("variant", "P", "A", "n_mixtures", "reps", "median_seconds", "bytes", "skip_reason")
SKIPPED_OVERFLOW = "SkippedOverflow"
SKIPPED_MEMORY = "SkippedMemory"
MEMORY_CAP = 1 << 30
DICT_ENTRY_OVERHEAD = 64  # hash slot plus tuple and list headers, per profile
WARMUP_MIXTURES = 8


@dataclass
class BenchResult:
    variant: str
    num_players: int
    num_actions: int
    n_mixtures: int
    reps: int
    median_seconds: float = None
    bytes_estimated: int = 0
    skip_reason: str = None
    mode: str = "sequential"
    times: list = field(default_factory=list, repr=False)
    outputs: np.ndarray = field(default=None, repr=False)

    @property
    def skipped(self):
        return self.skip_reason is not None

    def row(self):
        return {"variant": self.variant, "P": self.num_players, "A": self.num_actions,
                "n_mixtures": self.n_mixtures, "reps": self.reps,
                "median_seconds": "" if self.median_seconds is None else f"{self.median_seconds:.6g}",
                "bytes": self.bytes_estimated, "skip_reason": self.skip_reason or ""}


def memory_estimate(variant, num_players, num_actions, precision_bytes=8):
    """Bytes needed to store a variant's tables, from closed-form entry counts."""
    configs = math.comb(num_players + num_actions - 2, num_players - 1)
    profiles = math.comb(num_players + num_actions - 1, num_players)
    if variant in ("log_weighted", "weighted"):
        entries = 2 * num_actions * configs
    elif variant == "opp_config":
        entries = 2 * num_actions * configs + configs
    elif variant == "reps_arrays":
        entries = 3 * num_actions * profiles
    elif variant == "profile_arrays":
        entries = 2 * num_actions * profiles
    elif variant == "dict":
        return profiles * (2 * num_actions * precision_bytes + DICT_ENTRY_OVERHEAD)
    else:
        raise ValueError(f"unknown variant {variant!r}")
    return entries * precision_bytes


def bench_mixtures(num_actions, n_mixtures, seed):
    return np.random.default_rng(seed).dirichlet(np.ones(num_actions), n_mixtures)


def _skip_reason(variant, num_players, num_actions, nbytes, memory_cap):
    if variant != "log_weighted":
        try:
            rep.check_repetitions_fit(num_players, num_actions)
        except OverflowError:
            return SKIPPED_OVERFLOW
    if memory_cap is not None and nbytes > memory_cap:
        return SKIPPED_MEMORY
    return None


def _devpay_pass(game, mixtures, batch_size, workers):
    if batch_size is None:
        return np.column_stack([game.deviation_payoffs(m) for m in mixtures])
    parts = []
    for start in range(0, len(mixtures), batch_size):
        chunk = mixtures[start:start + batch_size]
        if workers:
            parts.append(rep.parallel_deviation_payoffs(game, chunk, workers))
        else:
            parts.append(game.deviation_payoffs_batch(chunk))
    return np.hstack(parts)


def time_devpays(variant, num_players, num_actions, n_mixtures=1024, seed=0, reps=3,
                 batch_size=None, workers=None, dtype=np.float64, memory_cap=MEMORY_CAP,
                 spec=None, keep_outputs=False):
    """Median wall time to compute deviation payoffs for ``n_mixtures`` mixtures."""
    if reps < 3:
        raise ValueError("reps must be at least 3")
    nbytes = memory_estimate(variant, num_players, num_actions, np.dtype(dtype).itemsize)
    mode = "sequential" if batch_size is None else ("parallel" if workers else "batch")
    result = BenchResult(variant, num_players, num_actions, n_mixtures, reps,
                         bytes_estimated=nbytes, mode=mode)
    result.skip_reason = _skip_reason(variant, num_players, num_actions, nbytes, memory_cap)
    if result.skipped:
        return result
    if spec is None:
        spec = gen.random_game(num_players, num_actions, seed)
    game = rep.build(spec, variant, dtype=dtype)
    mixtures = bench_mixtures(num_actions, n_mixtures, seed)
    _devpay_pass(game, mixtures[:WARMUP_MIXTURES], batch_size, workers)
    outputs = None
    for _ in range(reps):
        start = time.perf_counter()
        out = _devpay_pass(game, mixtures, batch_size, workers)
        result.times.append(time.perf_counter() - start)
        if outputs is not None and not np.array_equal(out, outputs):
            raise RuntimeError(f"{variant} outputs changed between repetitions")
        outputs = out
    result.median_seconds = statistics.median(result.times)
    if keep_outputs:
        result.outputs = outputs
    return result


def ladder(num_players, num_actions, n_mixtures=1024, seed=0, reps=3, variants=LADDER, **kw):
    """Time every variant on one shared instance."""
    spec = gen.random_game(num_players, num_actions, seed)
    return [time_devpays(v, num_players, num_actions, n_mixtures, seed, reps, spec=spec, **kw)
            for v in variants]


def ladder_holds(results, noise=0.2):
    """True if median times follow the ladder, each adjacent pair allowed ``noise`` slack."""
    timed = {r.variant: r.median_seconds for r in results if not r.skipped}
    order = [v for v in LADDER if v in timed]
    return all(timed[a] <= timed[b] * (1 + noise) for a, b in zip(order, order[1:]))


def sweep(variants, players, num_actions, n_mixtures=1024, seed=0, reps=3, **kw):
    """Time each variant over increasing player counts, ending a line at its first skip."""
    results = []
    for variant in variants:
        for num_players in players:
            result = time_devpays(variant, num_players, num_actions, n_mixtures, seed, reps, **kw)
            results.append(result)
            if result.skipped:
                break
    return results


@dataclass
class PrecisionResult:
    num_players: int
    num_actions: int
    n_games: int
    n_mixtures: int
    max_abs_error: float
    max_relative_error: float  # error over the game's payoff range, worst game
    payoff_range: float


def precision_experiment(num_players, num_actions, n_games=10, n_mixtures=100, seed=0,
                         dtypes=(np.float64, np.float32)):
    """Largest deviation payoff difference between two table precisions.

    Errors are on the raw payoff scale; the relative error divides by each
    game's payoff range.
    """
    high, low = dtypes
    max_abs = max_rel = 0.0
    worst_range = 0.0
    for k in range(n_games):
        spec = gen.random_game(num_players, num_actions, seed + k)
        a, b = rep.build(spec, dtype=high), rep.build(spec, dtype=low)
        mixtures = bench_mixtures(num_actions, n_mixtures, seed + k)
        dev_a = a.denormalize(np.asarray(a.deviation_payoffs_batch(mixtures), dtype=np.float64))
        dev_b = b.denormalize(np.asarray(b.deviation_payoffs_batch(mixtures), dtype=np.float64))
        err = float(np.max(np.abs(dev_a - dev_b)))
        table = spec.payoff_table()
        span = float(table.max() - table.min())
        if err > max_abs:
            max_abs = err
        if span > 0 and err / span >= max_rel:
            max_rel, worst_range = err / span, span
    return PrecisionResult(num_players, num_actions, n_games, n_mixtures, max_abs, max_rel,
                           worst_range)


def solver_timing(num_players, num_actions, n_starts=100, iters=1000, methods=("rd", "gd", "fp"),
                  seed=0, spec=None):
    """Wall time per method for a batch of random starts; one row per method."""
    if spec is None:
        spec = gen.random_game(num_players, num_actions, seed)
    game = rep.build(spec)
    starts = bench_mixtures(num_actions, n_starts, seed)
    config = sv.SolverConfig(iters=iters)
    rows = []
    for method in methods:
        start = time.perf_counter()
        finals = sv.SOLVERS[method](game, starts, config)
        rows.append({"method": method, "P": num_players, "A": num_actions, "n_starts": n_starts,
                     "iters": iters, "seconds": time.perf_counter() - start, "finals": finals})
    return rows


def write_csv(results, out=None):
    """Write results to a path or file object (stdout by default) in the bench schema."""
    if isinstance(out, str) or hasattr(out, "__fspath__"):
        with open(out, "w", newline="") as f:
            return write_csv(results, f)
    writer = csv.DictWriter(out or sys.stdout, fieldnames=CSV_FIELDS, lineterminator="\n")
    writer.writeheader()
    for result in results:
        writer.writerow(result.row())


def read_csv(path):
    with open(path, newline="") as f:
        return list(csv.DictReader(f))
