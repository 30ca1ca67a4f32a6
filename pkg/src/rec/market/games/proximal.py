# -*- coding: utf-8 -*-
# proximal.py
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
Proximal decomposition of the community games.

The engine solves a sequence of regularized games. In the regularized game
of outer iteration k every player minimizes its bill plus
tau_i/2 ||theta_i - y_i||^2 around a fixed center y; the players answer each
other in Jacobi sweeps (all of them against the same snapshot of their
rivals) until no strategy moves by more than tol_inner. The center is then
moved towards the fixed point just found, y <- (1 - rho) y + rho theta, and
the algorithm stops once the center moves by less than tol_outer.

Games with shared constraints add a price player. In the regularized game
it answers pi = eta + h(theta) / tau_pi, with eta its own center, computed on
the same snapshot as the members; eta is averaged like y.
"""
import logging
import time

from collections import namedtuple

import numpy as np
import scipy.sparse as sp

from rec.market import config as market_config
from rec.market import parallel
from rec.market.billing import Billing
from rec.market.qp import QpProblem, QpSettings, QpSolver
from rec.market.qp.solver import check_psd, raise_for_status
from rec.market.utils import check


logger = logging.getLogger(__name__)


DEFAULT_RHO = 1.0
DEFAULT_TOL_INNER = 1e-6
DEFAULT_TOL_OUTER = 1e-5
DEFAULT_TOL_BALANCE = 1e-6
DEFAULT_MAX_OUTER = 2000
DEFAULT_MAX_INNER = 200

# Regularization used when the theoretical bound vanishes (one player).
MIN_TAU = 1e-2

PLAYER_SETTINGS = QpSettings(eps_abs=1e-9, max_iter=50000)


TraceRow = namedtuple(
    'TraceRow', ['outer', 'inner', 'residual', 'total_cost', 'balance'])


class Regularization(namedtuple('Regularization', ['players', 'price'])):
    """
    Proximal weights of a run.

    :ivar players: one weight per member.
    :ivar price: the weight of the price player, None without shared
                 constraints.
    """
    __slots__ = ()

    @classmethod
    def uniform(cls, tau, n_players, price=False):
        check(tau > 0, "tau must be positive")
        tau = float(tau)
        return cls((tau,) * n_players, tau if price else None)

    @property
    def scale(self):
        """
        The largest member weight.
        """
        return max(self.players)


class GameConfig(object):
    """
    Parameters of the proximal decomposition.

    :param billing: the billing scheme of the game.
    :param tau: proximal weight; None picks the safety factor times the
                theoretical bound.
    :param rho: averaging weight, a number or a callable of the outer
                iteration, within (0, 2).
    :param enforce_tau_bound: refuse a tau below the bound if True, only
                              warn otherwise.
    :param audit: run the best response audit on the result.
    """

    def __init__(self, billing=Billing.CP, tau=None, rho=DEFAULT_RHO,
                 tol_inner=DEFAULT_TOL_INNER, tol_outer=DEFAULT_TOL_OUTER,
                 tol_balance=DEFAULT_TOL_BALANCE, max_outer=DEFAULT_MAX_OUTER,
                 max_inner=DEFAULT_MAX_INNER, enforce_tau_bound=True,
                 audit=True, qp_settings=None):
        self.billing = Billing.parse(billing)
        check(tau is None or tau > 0, "tau must be positive")
        if not callable(rho):
            check(0 < rho < 2, "rho must lie within (0, 2)")
        check(tol_inner > 0 and tol_outer > 0 and tol_balance > 0,
              "tolerances must be positive")
        check(max_outer >= 1 and max_inner >= 1,
              "iteration caps must be positive")
        self.tau = tau
        self.rho = rho
        self.tol_inner = tol_inner
        self.tol_outer = tol_outer
        self.tol_balance = tol_balance
        self.max_outer = max_outer
        self.max_inner = max_inner
        self.enforce_tau_bound = enforce_tau_bound
        self.audit = audit
        self.qp_settings = qp_settings or PLAYER_SETTINGS

    def rho_at(self, k):
        """
        Return the averaging weight of outer iteration k.
        """
        rho = self.rho(k) if callable(self.rho) else self.rho
        check(0 < rho < 2, "rho must lie within (0, 2)")
        return rho

    def resolve_tau(self, bound, safety):
        """
        Return the tau to run with, given the theoretical bound.

        :raise ValueError: if an explicit tau is below the enforced bound.
        """
        if self.tau is None:
            return max(safety * bound, MIN_TAU)
        if self.tau < bound:
            if self.enforce_tau_bound:
                raise ValueError("tau=%g is below the convergence bound %g"
                                 % (self.tau, bound))
            logger.warning("Running with tau=%g below the bound %g",
                           self.tau, bound)
        return self.tau

    def __repr__(self):
        return "<GameConfig %s tau=%s rho=%s>" % (
            self.billing.value, self.tau, self.rho)


class EquilibriumReport(object):
    """
    Outcome of an equilibrium computation.

    :ivar profile: the equilibrium CommunityProfile.
    :ivar bills: the bill of every member.
    :ivar cost: CostBreakdown of the profile.
    :ivar best_response_residual: largest unilateral improvement found by
                                  the audit, None if not audited.
    :ivar inefficiency: relative gap to the social optimum, if known.
    """

    def __init__(self, profile, bills, cost, billing, keys, tau,
                 outer_iterations, inner_iterations, trace, converged,
                 best_response_residual=None, inefficiency=None,
                 elapsed=0.0):
        self.profile = profile
        self.bills = bills
        self.cost = cost
        self.billing = billing
        self.keys = keys
        self.tau = tau
        self.outer_iterations = outer_iterations
        self.inner_iterations = inner_iterations
        self.trace = trace
        self.converged = converged
        self.best_response_residual = best_response_residual
        self.inefficiency = inefficiency
        self.elapsed = elapsed

    @property
    def total_cost(self):
        return self.cost.total

    @property
    def design(self):
        return self.profile.design

    def __repr__(self):
        return "<%s %s %s cost=%.6f outer=%d>" % (
            self.__class__.__name__, self.design.value, self.billing.value,
            self.total_cost, self.outer_iterations)


class DecompositionState(namedtuple(
        'DecompositionState',
        ['vectors', 'price', 'outer', 'inner', 'trace', 'converged',
         'inner_failures'])):
    """
    Raw result of a run of the engine.
    """
    __slots__ = ()


class ProximalDecomposition(object):
    """
    Jacobi proximal decomposition over an IGame.

    :param game: the game to solve.
    :type game: IGame
    :param config: the algorithm parameters.
    :type config: GameConfig
    :param tau: the proximal weights, or one weight for every player.
    :type tau: Regularization or float
    :param observer: an IProgressObserver, optional.
    """

    def __init__(self, game, config, tau, observer=None):
        if not isinstance(tau, Regularization):
            tau = Regularization.uniform(tau, game.N, game.has_price)
        check(len(tau.players) == game.N, "one weight per player")
        check(all(t > 0 for t in tau.players), "tau must be positive")
        if game.has_price:
            check(tau.price is not None and tau.price > 0,
                  "the price player needs a positive weight")
        self.game = game
        self.config = config
        self.regularization = tau
        self.observer = observer
        self._solvers = [self._player_solver(i) for i in range(game.N)]
        self._duals = [None] * game.N

    @property
    def tau(self):
        return self.regularization.scale

    def _player_solver(self, i):
        block = self.game.constraints(i)
        n = block.n_vars
        P = sp.csc_matrix(self.game.hessian(i)) + \
            self.regularization.players[i] * sp.identity(n, format="csc")
        check_psd(P)
        problem = QpProblem.from_constraints(
            P, np.zeros(n), block.A, block.lower, block.upper, block.lb,
            block.ub, labels=block.row_families,
            bound_labels=block.bound_families)
        return QpSolver(problem, self.config.qp_settings)

    def _respond(self, i, snapshot, price, centers):
        q = self.game.linear_cost(i, snapshot, price) - \
            self.regularization.players[i] * centers[i]
        solver = self._solvers[i]
        solver.update(q=q)
        solver.warm_start(snapshot[i], self._duals[i])
        solution = raise_for_status(solver.solve())
        self._duals[i] = solution.y
        return solution.x

    def _sweep(self, snapshot, price, centers, eta, pool=None):
        vectors = parallel.parallel_map(
            lambda i: self._respond(i, snapshot, price, centers),
            range(self.game.N), name="jacobi-sweep", pool=pool)
        new_price = None
        if self.game.has_price:
            h = self.game.shared_residual(snapshot)
            new_price = eta + h / self.regularization.price
        return vectors, new_price

    def run(self, start, start_price=None):
        """
        Run the algorithm from a starting strategy profile.

        The sweeps of the run share one worker pool.

        :param start: one vector per player.
        :type start: list
        :param start_price: starting price, zeros by default.
        :rtype: DecompositionState
        """
        size = min(market_config.pool_size(), self.game.N)
        with parallel.WorkerPool(size, name="jacobi-sweep") as pool:
            return self._run(start, start_price, pool)

    def _run(self, start, start_price, pool):
        game, config = self.game, self.config
        centers = [np.array(v, dtype=float) for v in start]
        theta = [v.copy() for v in centers]
        eta = price = None
        if game.has_price:
            T = game.layouts[0].T
            eta = np.zeros(T) if start_price is None else \
                np.array(start_price, dtype=float)
            price = eta.copy()

        trace = []
        inner_total = 0
        inner_failures = 0
        converged = False
        outer = 0
        for outer in range(1, config.max_outer + 1):
            sweeps = 0
            for sweeps in range(1, config.max_inner + 1):
                new_theta, new_price = self._sweep(theta, price, centers,
                                                   eta, pool)
                move = max(_inf_norm(a - b)
                           for a, b in zip(new_theta, theta))
                if game.has_price:
                    move = max(move, _inf_norm(new_price - price))
                theta, price = new_theta, new_price
                logger.debug("outer %d sweep %d: move %.3e", outer, sweeps,
                             move)
                if move <= config.tol_inner:
                    break
            else:
                inner_failures += 1
                logger.warning("Inner sweeps did not settle within %d "
                               "iterations at outer iteration %d",
                               config.max_inner, outer)
            inner_total += sweeps

            rho = config.rho_at(outer)
            new_centers = [(1.0 - rho) * y + rho * t
                           for y, t in zip(centers, theta)]
            residual = max(_inf_norm(a - b)
                           for a, b in zip(new_centers, centers))
            balance = None
            if game.has_price:
                new_eta = (1.0 - rho) * eta + rho * price
                residual = max(residual, _inf_norm(new_eta - eta))
                eta = new_eta
                balance = _inf_norm(game.shared_residual(theta))
            centers = new_centers

            row = TraceRow(outer, sweeps, residual, game.total_cost(theta),
                           balance)
            trace.append(row)
            if self.observer is not None:
                self.observer.outer_step(row)
            logger.debug("outer %d: residual %.3e cost %.6f", outer,
                         residual, row.total_cost)

            if residual <= config.tol_outer and (
                    balance is None or balance <= config.tol_balance):
                converged = True
                break

        return DecompositionState(theta, price, outer, inner_total, trace,
                                  converged, inner_failures)


def _inf_norm(v):
    return float(np.max(np.abs(v), initial=0.0))


def solve_game(game, config, tau, start, start_price=None, observer=None):
    """
    Run the proximal decomposition on a game.

    :param tau: the proximal weights, or one weight for every player.
    :type tau: Regularization or float
    :rtype: DecompositionState
    """
    started = time.time()
    engine = ProximalDecomposition(game, config, tau, observer=observer)
    state = engine.run(start, start_price)
    logger.info("Proximal decomposition (%s, tau=%g): %s after %d outer "
                "and %d inner iterations (%.2fs)", config.billing.value,
                engine.tau, "converged" if state.converged else "stopped",
                state.outer, state.inner, time.time() - started)
    return state
