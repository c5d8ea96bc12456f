"""Multinomial arithmetic and canonical configuration enumeration.

Configurations are integer count vectors over actions. The canonical order
is the one produced by ``itertools.combinations_with_replacement`` on the
action indices: multisets sorted lexicographically, so the configuration
with every opponent on action 0 comes first. Every table in the package is
laid out in this order.
"""
import functools
import itertools
import math

import numpy as np
from scipy import special

from symgames.errors import RangeError

INT64_MAX = 2**63 - 1


def _check_counts(counts):
    counts = [int(c) for c in counts]
    if any(c < 0 for c in counts):
        raise ValueError(f"counts must be non-negative, got {counts}")
    return counts


def multinomial(counts):
    """Exact multinomial ``sum(counts)! / prod(c!)``.

    Built as a product of binomials so no intermediate value exceeds the
    result. Raises ``OverflowError`` if the result does not fit in a signed
    64-bit integer.
    """
    result = 1
    total = 0
    for c in _check_counts(counts):
        total += c
        result *= math.comb(total, c)
        if result > INT64_MAX:
            raise OverflowError(
                f"multinomial of {list(counts)} exceeds the signed 64-bit range")
    return result


def log_multinomial(counts):
    """Natural log of the multinomial, via log-gamma."""
    counts = np.asarray(counts, dtype=float)
    return float(special.gammaln(counts.sum() + 1) - special.gammaln(counts + 1).sum())


def log_multinomial_columns(table):
    """Log multinomial of every column of an ``A x J`` count table."""
    table = np.asarray(table, dtype=float)
    return special.gammaln(table.sum(0) + 1) - special.gammaln(table + 1).sum(0)


def multinomial_columns(table):
    """Exact multinomials of every column of an ``A x J`` count table.

    Vectorized version of :func:`multinomial` returning an ``int64`` array.
    Each update ``r * n / i`` is done as ``(r / g) * (n / (i / g))`` with
    ``g = gcd(r, i)`` so nothing larger than the final value is formed.
    """
    table = np.asarray(table, dtype=np.int64)
    result = np.ones(table.shape[1], dtype=np.int64)
    total = np.zeros(table.shape[1], dtype=np.int64)
    for row in table:
        for i in range(1, int(row.max(initial=0)) + 1):
            mask = row >= i
            total[mask] += 1
            r, n = result[mask], total[mask]
            g = np.gcd(r, i)
            n_div = n // (i // g)
            r_div = r // g
            # float check first: int64 multiply wraps silently
            if np.any(r_div.astype(float) * n_div.astype(float) > INT64_MAX):
                raise OverflowError("repetitions exceed the signed 64-bit range")
            result[mask] = r_div * n_div
    return result


def _binom_checked(n, k):
    value = math.comb(n, k)
    if value > INT64_MAX:
        raise OverflowError(f"C({n}, {k}) exceeds the signed 64-bit range")
    return value


def num_profiles(num_players, num_actions):
    """Number of distinct profiles of ``num_players`` over ``num_actions``."""
    if num_players < 1 or num_actions < 1:
        raise ValueError("need at least one player and one action")
    return _binom_checked(num_players + num_actions - 1, num_players)


def num_configs(num_players, num_actions):
    """Number of opponent configurations (``num_players - 1`` opponents)."""
    if num_players < 1 or num_actions < 1:
        raise ValueError("need at least one player and one action")
    return _binom_checked(num_players + num_actions - 2, num_players - 1)


def _compositions(total, parts):
    # count vectors of length `parts` summing to `total`
    if parts == 0:
        return 1 if total == 0 else 0
    return math.comb(total + parts - 1, parts - 1)


def enumerate_configs(num_players, num_actions):
    """All opponent configurations as tuples, in canonical order."""
    if num_players < 1 or num_actions < 1:
        raise ValueError("need at least one player and one action")
    configs = []
    for combo in itertools.combinations_with_replacement(range(num_actions), num_players - 1):
        counts = [0] * num_actions
        for a in combo:
            counts[a] += 1
        configs.append(tuple(counts))
    return configs


@functools.lru_cache(maxsize=256)
def config_table(num_players, num_actions):
    """Read-only ``A x J`` int array whose columns are the canonical configurations."""
    total = num_players - 1
    if num_actions == 1:
        table = np.full((1, 1), total, dtype=np.int64)
    else:
        # recursive block construction in canonical order: first action's
        # count descends from `total` to 0, the rest recurse on the remainder
        blocks = []
        for first in range(total, -1, -1):
            rest = config_table(total - first + 1, num_actions - 1)
            head = np.full((1, rest.shape[1]), first, dtype=np.int64)
            blocks.append(np.vstack([head, rest]))
        table = np.hstack(blocks)
    table.setflags(write=False)
    return table


def profile_table(num_players, num_actions):
    """``A x num_profiles`` array of full profiles in canonical order."""
    return config_table(num_players + 1, num_actions)


def config_rank(config, num_players=None):
    """Index of ``config`` in canonical order.

    ``num_players`` is inferred as ``sum(config) + 1`` when omitted; when
    given, the configuration must sum to ``num_players - 1``.
    """
    counts = _check_counts(config)
    remaining = sum(counts)
    if num_players is not None and remaining != num_players - 1:
        raise RangeError(
            f"configuration {counts} sums to {remaining}, expected {num_players - 1}")
    rank = 0
    num_actions = len(counts)
    for k in range(num_actions - 1):
        # configurations placing more opponents on action k come first
        for m in range(counts[k] + 1, remaining + 1):
            rank += _compositions(remaining - m, num_actions - k - 1)
        remaining -= counts[k]
    return rank


def config_rank_columns(table):
    """Canonical rank of every column of an ``A x J`` count table.

    Uses the closed form of the inner sum in :func:`config_rank` (hockey
    stick identity): action ``k`` contributes ``C(rem - c_k + r - 1, r)``
    where ``r`` is the number of later actions.
    """
    table = np.asarray(table, dtype=np.int64)
    num_actions = table.shape[0]
    if table.shape[1] == 0:
        return np.zeros(0, dtype=np.int64)
    top = int(table.sum(0).max()) + num_actions
    binom = np.array([[math.comb(n, r) for r in range(num_actions)]
                      for n in range(top + 1)], dtype=np.int64)
    remaining = table.sum(0)
    rank = np.zeros(table.shape[1], dtype=np.int64)
    for k in range(num_actions - 1):
        later = num_actions - k - 1
        rank += binom[remaining - table[k] + later - 1, later]
        remaining = remaining - table[k]
    return rank


def config_unrank(index, num_players, num_actions):
    """Inverse of :func:`config_rank`."""
    total = num_players - 1
    if not 0 <= index < num_configs(num_players, num_actions):
        raise RangeError(
            f"index {index} out of range for P={num_players}, A={num_actions}")
    counts = []
    remaining = total
    for k in range(num_actions - 1):
        for m in range(remaining, -1, -1):
            block = _compositions(remaining - m, num_actions - k - 1)
            if index < block:
                counts.append(m)
                remaining -= m
                break
            index -= block
    counts.append(remaining)
    return tuple(counts)


def balanced_counts(total, num_actions):
    """Counts of ``total`` items over ``num_actions`` differing by at most one."""
    base, extra = divmod(total, num_actions)
    return [base + 1] * extra + [base] * (num_actions - extra)


def max_repetitions(num_players, num_actions):
    """Largest multinomial over all configurations (the most balanced one)."""
    return multinomial(balanced_counts(num_players - 1, num_actions))


def max_players_without_overflow(num_actions):
    """Largest ``P`` whose repetitions all fit in a signed 64-bit integer."""
    if num_actions < 2:
        raise ValueError("need at least two actions")
    players = 1
    while True:
        try:
            max_repetitions(players + 1, num_actions)
        except OverflowError:
            return players
        players += 1
