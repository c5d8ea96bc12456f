import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from scipy.optimize import minimize

from conftest import WORKED_MIXTURE, dominance_game, strict_dominance_game, interior_mixtures, matrix_game, rps_game
from symgames import combinatorics as comb
from symgames import generators as gen
from symgames import representations as rep
from symgames import solvers as sv
from symgames.errors import DimensionMismatch, NegativeWeight


def finite_difference_gradient(fn, mixture, h=1e-6):
    grad = np.empty(len(mixture))
    for s in range(len(mixture)):
        step = np.zeros(len(mixture))
        step[s] = h
        grad[s] = (fn(mixture + step) - fn(mixture - step)) / (2 * h)
    return grad


def assert_valid_mixtures(rows, tol=1e-9):
    rows = np.atleast_2d(rows)
    assert np.all(rows >= -tol)
    assert np.allclose(rows.sum(-1), 1, atol=tol)


def tie_margin(game, mixture):
    dev = game.deviation_payoffs(mixture)
    return np.min(np.abs(dev - dev @ mixture))


@pytest.fixture
def worked():
    return rep.build(gen.worked_example_game())


@pytest.fixture
def dominance():
    return rep.build(dominance_game())


class TestGain:
    def test_worked_values(self, worked):
        assert np.allclose(sv.gain_vector(rep.build(gen.worked_example_game(), "opp_config"),
                                          WORKED_MIXTURE), [0.961, 0, 0], atol=1e-12)
        norm = worked.normalization.scale
        assert sv.gain(worked, WORKED_MIXTURE) == pytest.approx(0.961 * norm, rel=1e-9)

    def test_zero_at_nash(self):
        game = rep.build(rps_game())
        assert sv.gain(game, np.full(3, 1 / 3)) == pytest.approx(0, abs=1e-9)

    def test_pure_dominated(self, dominance):
        raw = rep.build(dominance_game(), "opp_config")
        config = (dominance.num_players - 1, 0)
        best = raw.pure_payoff((1, dominance.num_players - 1), 0) \
            - raw.pure_payoff((0, dominance.num_players), 1)
        assert sv.gain(raw, [0, 1]) == pytest.approx(best, abs=1e-12)
        assert comb.config_rank(config) == 0

    def test_batch_rows(self, worked):
        mixtures = np.array([WORKED_MIXTURE, [1 / 3] * 3])
        assert np.allclose(sv.gain(worked, mixtures),
                           [sv.gain(worked, m) for m in mixtures])

    def test_gain_zero_iff_no_regret(self, rng):
        for spec in (rps_game(), dominance_game(), gen.random_game(4, 3, 1)):
            game = rep.build(spec)
            mixtures = np.vstack([rng.dirichlet(np.ones(spec.num_actions), 20),
                                  np.full((1, spec.num_actions), 1 / spec.num_actions),
                                  np.eye(spec.num_actions)])
            for m in mixtures:
                g, r = sv.gain(game, m), rep.regret(game, m)
                assert (g <= 1e-12) == (r <= 1e-12)

    def test_dimension_mismatch(self, worked):
        with pytest.raises(DimensionMismatch):
            sv.gain_gradient(worked, [0.5, 0.5])


class TestGainGradient:
    def test_worked_matches_finite_difference(self, worked):
        grad = sv.gain_gradient(worked, WORKED_MIXTURE)
        fd = finite_difference_gradient(lambda m: sv.gain(worked, m), WORKED_MIXTURE)
        assert np.max(np.abs(grad - fd)) / np.max(np.abs(grad)) <= 1e-4

    @pytest.mark.parametrize("seed", range(5))
    def test_random_games(self, seed):
        rng = np.random.default_rng(seed)
        game = rep.build(gen.random_game(5 + seed, 3 + seed % 2, seed))
        checked = 0
        for m in interior_mixtures(rng, game.num_actions, 40):
            if tie_margin(game, m) < 1e-3:
                continue
            grad = sv.gain_gradient(game, m)
            fd = finite_difference_gradient(lambda x: sv.gain(game, x), m)
            assert np.max(np.abs(grad - fd)) / np.max(np.abs(grad)) <= 1e-4
            checked += 1
        assert checked >= 20

    def test_zero_at_interior_nash(self):
        game = rep.build(rps_game())
        assert np.allclose(sv.gain_gradient(game, np.full(3, 1 / 3)), 0, atol=1e-8)

    def test_batch_matches_single(self, rng):
        game = rep.build(gen.random_game(6, 4, 2))
        mixtures = interior_mixtures(rng, 4, 6)
        batch = sv.gain_gradient(game, mixtures)
        for row, m in zip(batch, mixtures):
            assert np.allclose(row, sv.gain_gradient(game, m), rtol=1e-10)


class TestSimplexProject:
    def test_feasible_unchanged(self):
        assert np.allclose(sv.simplex_project([0.2, 0.5, 0.3]), [0.2, 0.5, 0.3])

    def test_symmetric(self):
        assert np.allclose(sv.simplex_project([1, 1, 1]), [1 / 3] * 3)

    def test_matches_qp(self):
        v = np.array([1.2, -0.1, 0.4])
        qp = minimize(lambda x: np.sum((x - v) ** 2), np.full(3, 1 / 3), method="SLSQP",
                      bounds=[(0, 1)] * 3, constraints={"type": "eq", "fun": lambda x: x.sum() - 1},
                      options={"ftol": 1e-14})
        assert np.allclose(sv.simplex_project(v), qp.x, atol=1e-6)
        assert np.allclose(sv.simplex_project(v), [0.9, 0, 0.1], atol=1e-12)

    def test_matches_grid(self):
        v = np.array([0.7, 0.9, -0.3])
        grid = sv.mixture_grid(3, 200)
        best = grid[np.argmin(((grid - v) ** 2).sum(1))]
        assert np.allclose(sv.simplex_project(v), best, atol=5e-3)

    def test_rows(self):
        rows = np.array([[1.2, -0.1, 0.4], [1, 1, 1]])
        assert np.allclose(sv.simplex_project(rows), [[0.9, 0, 0.1], [1 / 3] * 3])

    @settings(max_examples=200, deadline=None)
    @given(arrays(float, 4, elements=st.floats(-5, 5)), arrays(float, 4, elements=st.floats(-5, 5)))
    def test_idempotent_and_lipschitz(self, a, b):
        pa, pb = sv.simplex_project(a), sv.simplex_project(b)
        assert_valid_mixtures(pa)
        assert np.allclose(sv.simplex_project(pa), pa, atol=1e-12)
        assert np.linalg.norm(pa - pb) <= np.linalg.norm(a - b) + 1e-9


class TestReplicator:
    def test_rps_uniform_fixed(self):
        game = rep.build(rps_game())
        out = sv.replicator_dynamics(game, np.full(3, 1 / 3), sv.SolverConfig(iters=50))
        assert np.allclose(out, 1 / 3, atol=1e-12)

    def test_dominance_converges(self, dominance):
        out = sv.replicator_dynamics(dominance, [0.5, 0.5])
        assert out[0] >= 1 - 1e-6

    def test_worked_regret(self, worked):
        out = sv.replicator_dynamics(worked, np.full(3, 1 / 3))
        assert rep.regret(worked, out) <= 1e-3

    def test_fixed_point_on_support(self):
        # hawk-dove mixed equilibrium, action 2 unplayed
        game = rep.build(matrix_game([[0, 3, 0], [1, 2, 0], [-5, -5, -5]]))
        sigma = np.array([0.5, 0.5, 0])
        out = sv.replicator_dynamics(game, sigma, sv.SolverConfig(iters=1))
        assert np.allclose(out, sigma, atol=1e-12)

    def test_negative_weight(self):
        raw = rep.build(gen.worked_example_game(), "opp_config")
        with pytest.raises(NegativeWeight):
            sv.replicator_dynamics(raw, WORKED_MIXTURE)
        out = sv.replicator_dynamics(raw, WORKED_MIXTURE, sv.SolverConfig(iters=10, rd_offset=-4))
        assert_valid_mixtures(out)

    def test_zero_iters(self, worked):
        out = sv.replicator_dynamics(worked, WORKED_MIXTURE, sv.SolverConfig(iters=0))
        assert np.array_equal(out, WORKED_MIXTURE)


class TestDescent:
    def test_nash_unchanged(self):
        game = rep.build(rps_game())
        out = sv.gain_descent(game, np.full(3, 1 / 3), sv.SolverConfig(iters=20))
        assert np.allclose(out, 1 / 3, atol=1e-12)

    @pytest.mark.parametrize("num_actions", [2, 3, 4])
    def test_dominance_regret_decreases(self, num_actions):
        # action 0 pays 1, the rest 0: the largest normalized gap, which the
        # default step needs the full 1000 iterations to close from uniform
        game = rep.build(strict_dominance_game(3, num_actions))
        trace = []
        out = sv.gain_descent(game, np.full(num_actions, 1 / num_actions),
                              sv.SolverConfig(gd_step=1e-6), trace=trace)
        regrets = [rep.regret(game, m[0]) for m in trace]
        assert np.all(np.diff(regrets) <= 1e-12)
        assert rep.regret(game, out) <= 1e-3

    def test_gain_non_increasing_small_step(self):
        game = rep.build(gen.random_game(5, 3, 3))
        trace = []
        sv.gain_descent(game, [0.3, 0.3, 0.4], sv.SolverConfig(iters=300, gd_step=1e-7),
                        trace=trace)
        gains = [sv.gain(game, m[0]) for m in trace]
        assert np.all(np.diff(gains) <= 1e-9)
        assert gains[-1] < gains[0]

    def test_step_schedule(self, dominance):
        config = sv.SolverConfig(iters=5, gd_step=[1e-6, 2e-6])
        assert config.step_at(0) == 1e-6 and config.step_at(4) == 2e-6
        assert_valid_mixtures(sv.gain_descent(dominance, [0.5, 0.5], config))


class TestBetterResponse:
    def test_worked_value(self):
        raw = rep.build(gen.worked_example_game(), "opp_config")
        expected = np.array([0.1 + 0.961, 0.5, 0.4]) / 1.961
        assert np.allclose(sv.better_response_map(raw, WORKED_MIXTURE), expected, atol=1e-12)

    def test_nash_fixed(self):
        game = rep.build(rps_game())
        assert np.allclose(sv.better_response_map(game, np.full(3, 1 / 3)), 1 / 3)
        out = sv.iterated_better_response(game, np.full(3, 1 / 3), sv.SolverConfig(iters=30))
        assert np.allclose(out, 1 / 3, atol=1e-10)

    def test_dominance_converges(self, dominance):
        out = sv.iterated_better_response(dominance, [0.5, 0.5])
        assert out[0] > 0.999

    def test_close_to_fictitious_play(self, dominance):
        config = sv.SolverConfig(dedup_dist=1e-2)
        ibr = sv.iterated_better_response(dominance, [0.5, 0.5], config)
        fp = sv.fictitious_play(dominance, [0.5, 0.5], config)
        assert np.max(np.abs(ibr - fp)) <= config.dedup_dist


class TestFictitiousPlay:
    @pytest.mark.parametrize("k", [1, 5, 40])
    def test_dominance_closed_form(self, dominance, k):
        c = 1.0
        out = sv.fictitious_play(dominance, [0.5, 0.5], sv.SolverConfig(iters=k, fp_initial_weight=c))
        assert out[0] == pytest.approx((c / 2 + k) / (c + k), rel=1e-12)

    def test_large_weight_stays(self, dominance):
        c, iters = 1e4, 50
        out = sv.fictitious_play(dominance, [1, 0], sv.SolverConfig(iters=iters, fp_initial_weight=c))
        assert 1 - out[0] <= 1 / (c + iters)

    def test_ties_lowest_index(self):
        game = rep.build(matrix_game(np.zeros((3, 3)) + 1), "opp_config")
        out = sv.fictitious_play(game, np.full(3, 1 / 3), sv.SolverConfig(iters=3, fp_initial_weight=3))
        assert np.allclose(out, [4 / 6, 1 / 6, 1 / 6])

    def test_matching_pennies_valid(self):
        game = rep.build(matrix_game([[1, -1], [-1, 1]]))
        trace = []
        sv.fictitious_play(game, [0.9, 0.1], sv.SolverConfig(iters=200), trace=trace)
        assert_valid_mixtures(np.vstack(trace))

    def test_default_weight_is_actions(self, dominance):
        a = sv.fictitious_play(dominance, [0.5, 0.5], sv.SolverConfig(iters=3))
        b = sv.fictitious_play(dominance, [0.5, 0.5], sv.SolverConfig(iters=3, fp_initial_weight=2))
        assert np.array_equal(a, b)


class TestGrid:
    def test_sizes(self):
        assert len(sv.mixture_grid(3, 2)) == 6
        assert sv.mixture_grid(2, 1).tolist() == [[1, 0], [0, 1]]
        assert np.allclose(sv.mixture_grid(4, 0), 0.25)
        for a, k in [(3, 5), (4, 4), (5, 3)]:
            grid = sv.mixture_grid(a, k)
            assert len(grid) == comb.num_profiles(k, a)
            assert np.allclose(grid * k, np.round(grid * k))
            assert_valid_mixtures(grid)


@pytest.mark.parametrize("method", sv.METHODS)
def test_every_iterate_valid(method, rng):
    game = rep.build(gen.random_game(6, 4, 8))
    starts = np.vstack([sv.mixture_grid(4, 2), rng.dirichlet(np.ones(4), 3)])
    trace = []
    sv.SOLVERS[method](game, starts, sv.SolverConfig(iters=100), trace=trace)
    assert len(trace) == 101
    assert_valid_mixtures(np.vstack(trace))


@pytest.mark.parametrize("method", sv.METHODS)
def test_batch_matches_single_start(method):
    game = rep.build(gen.random_game(5, 3, 2))
    starts = sv.mixture_grid(3, 3)
    config = sv.SolverConfig(iters=50)
    batch = sv.SOLVERS[method](game, starts, config)
    for row, start in zip(batch, starts):
        assert np.allclose(row, sv.SOLVERS[method](game, start, config), atol=1e-10)


class TestFindEquilibria:
    def test_dominance_single_pure(self, dominance):
        found = sv.find_equilibria(dominance, ("rd", "gd"), grid=4)
        assert len(found) == 1
        assert np.allclose(found[0].mixture, [1, 0], atol=1e-6)
        assert found[0].regret <= 1e-6

    def test_rps_uniform(self):
        game = rep.build(rps_game())
        found = sv.find_equilibria(game, ("rd", "gd"), grid=3)
        assert any(np.max(np.abs(c.mixture - 1 / 3)) <= 1e-3 for c in found)

    def test_epsilon_zero_empty(self):
        game = rep.build(gen.random_game(6, 3, 5))
        found = sv.find_equilibria(game, ("gd",), sv.mixture_grid(3, 2)[1:2],
                                   sv.SolverConfig(iters=2, epsilon=0))
        assert found == []

    @pytest.mark.parametrize("seed", range(3))
    def test_output_invariants(self, seed):
        game = rep.build(gen.random_game(8, 3, seed))
        config = sv.SolverConfig(iters=300, epsilon=1e-2, dedup_dist=1e-2)
        found = sv.find_equilibria(game, sv.METHODS, grid=3, config=config)
        regrets = [c.regret for c in found]
        assert regrets == sorted(regrets)
        for c in found:
            assert rep.regret(game, c.mixture) <= config.epsilon
        for i, a in enumerate(found):
            for b in found[i + 1:]:
                assert np.max(np.abs(a.mixture - b.mixture)) > config.dedup_dist

    def test_parallel_identical(self):
        game = rep.build(gen.random_game(8, 3, 1))
        config = sv.SolverConfig(iters=200, epsilon=1e-2)
        seq = sv.find_equilibria(game, sv.METHODS, grid=3, config=config)
        par = sv.find_equilibria(game, sv.METHODS, grid=3, config=config, workers=4)
        assert [c.to_json() for c in seq] == [c.to_json() for c in par]

    def test_traces(self, dominance):
        found = sv.find_equilibria(dominance, ("rd",), grid=2, traces=True,
                                   config=sv.SolverConfig(iters=20, epsilon=1.0))
        assert all(len(c.trace) == 21 for c in found)
        assert np.allclose(found[0].trace[0], sv.mixture_grid(2, 2)[found[0].start_index])

    def test_unknown_method(self, dominance):
        with pytest.raises(ValueError):
            sv.find_equilibria(dominance, ("newton",))

    def test_json_roundtrip(self, dominance):
        found = sv.find_equilibria(dominance)
        data = json.loads(json.dumps(sv.candidates_to_json(found)))
        assert set(data[0]) == {"mixture", "regret", "solver", "start"}
        back = sv.candidates_from_json(data)
        assert np.allclose(back[0].mixture, found[0].mixture)
        assert back[0].solver == found[0].solver


def test_restricted_subgame_equilibrium():
    spec = matrix_game([[0, 3, 0], [1, 2, 0], [-5, -5, -5]])
    restricted = rep.restrict_support(spec, [0, 1])
    sub = restricted.subgame()
    found = sv.find_equilibria(sub, ("rd",), grid=4)
    interior = [c for c in found if np.all(c.mixture > 0.1)]
    assert interior and np.allclose(interior[0].mixture, [0.5, 0.5], atol=1e-3)
    full = rep.build(spec)
    gains = restricted.deviation_gains(interior[0].mixture)
    assert gains.max() <= 1e-3
    assert rep.regret(full, restricted.embed(interior[0].mixture)) <= 1e-3


def test_config_validation():
    with pytest.raises(ValueError):
        sv.SolverConfig(iters=-1)
    with pytest.raises(ValueError):
        sv.SolverConfig(epsilon=-1)
    with pytest.raises(ValueError):
        sv.SolverConfig(fp_initial_weight=0)
    with pytest.raises(ValueError):
        sv.SolverConfig(gd_step=[])
