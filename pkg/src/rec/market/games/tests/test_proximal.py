# -*- coding: utf-8 -*-
# test_proximal.py
# Copyright (C) 2026 rec.market developers
#
# This program is free software: you can redistribute it and/or modify
# it under the terms of the GNU General Public License as published by
# the Free Software Foundation, either version 3 of the License, or
# (at your option) any later version.
#
# This program is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# GNU General Public License for more details.
#
# You should have received a copy of the GNU General Public License
# along with this program.  If not, see <http://www.gnu.org/licenses/>.
"""
Tests for the proximal decomposition engine and its parameters.
"""
import os

from mock import Mock, patch
from twisted.python.threadpool import ThreadPool

from rec.market import config as market_config
from rec.market.billing import Billing
from rec.market.central import (
    solve_individual_benchmark,
    solve_potential_problem,
)
from rec.market.games.gnep import SharedConstraintGame
from rec.market.games.nep import NashGame, pda_solve
from rec.market.games.proximal import (
    MIN_TAU,
    GameConfig,
    ProximalDecomposition,
    Regularization,
    TraceRow,
    solve_game,
)
from rec.market.model import Design
from rec.market.tests import MarketTestCase, flexible_pair


class GameConfigTestCase(MarketTestCase):

    def test_defaults(self):
        config = GameConfig()
        self.assertIdentical(config.billing, Billing.CP)
        self.assertIdentical(config.tau, None)
        self.assertTrue(config.audit)

    def test_invalid(self):
        self.assertRaises(ValueError, GameConfig, tau=0.0)
        self.assertRaises(ValueError, GameConfig, rho=2.0)
        self.assertRaises(ValueError, GameConfig, tol_outer=0.0)
        self.assertRaises(ValueError, GameConfig, max_inner=0)
        self.assertRaises(ValueError, GameConfig, billing="shapley")

    def test_rho_schedule(self):
        config = GameConfig(rho=lambda k: 1.0 / k)
        self.assertClose(config.rho_at(4), 0.25)
        self.assertRaises(ValueError, GameConfig(rho=lambda k: 3.0).rho_at, 1)

    def test_automatic_tau(self):
        config = GameConfig()
        self.assertClose(config.resolve_tau(2.0, 1.05), 2.1)
        self.assertClose(config.resolve_tau(0.0, 1.05), MIN_TAU)

    def test_explicit_tau(self):
        self.assertClose(GameConfig(tau=3.0).resolve_tau(2.0, 1.05), 3.0)
        self.assertRaises(ValueError, GameConfig(tau=1.0).resolve_tau,
                          2.0, 1.05)

    def test_unenforced_tau(self):
        config = GameConfig(tau=1.0, enforce_tau_bound=False)
        self.assertClose(config.resolve_tau(2.0, 1.05), 1.0)


class EngineTestCase(MarketTestCase):

    def setUp(self):
        self.scenario = flexible_pair(alpha=0.05)
        self.game = NashGame(self.scenario, Billing.CP)

    def test_tau_must_be_positive(self):
        self.assertRaises(ValueError, ProximalDecomposition, self.game,
                          GameConfig(), 0.0)

    def test_equilibrium_start_is_fixed(self):
        optimum = solve_potential_problem(self.scenario, Design.D1)
        start = self.game.vectors(optimum.profile)
        state = solve_game(self.game, GameConfig(), 1.0, start)
        self.assertTrue(state.converged)
        self.assertEqual(state.outer, 1)
        self.assertEqual(state.inner_failures, 0)
        self.assertIdentical(state.price, None)
        for got, expected in zip(state.vectors, start):
            self.assertAllClose(got, expected, atol=1e-5)

    def test_trace(self):
        state = solve_game(self.game, GameConfig(), 1.0,
                           self.game.vectors(solve_potential_problem(
                               self.scenario, Design.D1).profile))
        self.assertEqual(len(state.trace), state.outer)
        row = state.trace[-1]
        self.assertIsInstance(row, TraceRow)
        self.assertIdentical(row.balance, None)
        self.assertClose(row.total_cost, self.game.total_cost(
            state.vectors))

    def test_observer(self):
        observer = Mock()
        report = pda_solve(self.scenario, observer=observer)
        self.assertEqual(observer.outer_step.call_count,
                         report.outer_iterations)
        row = observer.outer_step.call_args[0][0]
        self.assertEqual(row.outer, report.outer_iterations)


class RegularizationTestCase(MarketTestCase):

    def test_uniform(self):
        regularization = Regularization.uniform(0.5, 3)
        self.assertEqual(regularization.players, (0.5, 0.5, 0.5))
        self.assertIdentical(regularization.price, None)
        self.assertClose(Regularization.uniform(0.5, 2, price=True).price,
                         0.5)
        self.assertRaises(ValueError, Regularization.uniform, 0.0, 2)

    def test_scale(self):
        self.assertClose(Regularization((0.1, 0.4), None).scale, 0.4)

    def test_engine_checks_weights(self):
        game = NashGame(flexible_pair(), Billing.CP)
        self.assertRaises(ValueError, ProximalDecomposition, game,
                          GameConfig(), Regularization((1.0,), None))
        self.assertRaises(ValueError, ProximalDecomposition, game,
                          GameConfig(), Regularization((1.0, -1.0), None))
        engine = ProximalDecomposition(game, GameConfig(),
                                       Regularization((0.2, 0.6), None))
        self.assertClose(engine.tau, 0.6)

    def test_price_player_needs_weight(self):
        game = SharedConstraintGame(flexible_pair(), Billing.CP)
        self.assertRaises(ValueError, ProximalDecomposition, game,
                          GameConfig(), Regularization((1.0, 1.0), None))
        engine = ProximalDecomposition(game, GameConfig(), 2.0)
        self.assertEqual(engine.regularization, ((2.0, 2.0), 2.0))


class WorkerPoolTestCase(MarketTestCase):

    def test_one_pool_per_run(self):
        scenario = flexible_pair(alpha=0.05)
        game = NashGame(scenario, Billing.CP)
        start = game.vectors(solve_individual_benchmark(scenario).profile)
        config = GameConfig(max_outer=3, tol_outer=1e-12, audit=False)
        with patch.dict(os.environ, {market_config.THREADS_ENV: "2"}):
            os.environ.pop(market_config.DEBUG_ENV, None)
            with patch("rec.market.parallel.ThreadPool",
                       wraps=ThreadPool) as pool_class:
                state = solve_game(game, config, 1.0, start)
        self.assertTrue(state.inner >= state.outer)
        self.assertEqual(pool_class.call_count, 1)
