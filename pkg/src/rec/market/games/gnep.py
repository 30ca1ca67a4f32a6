# -*- coding: utf-8 -*-
# gnep.py
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
Design D2 as a generalized Nash equilibrium problem.

The members trade on a local pool that must clear in every slot,
sum_i (e_com_i - i_com_i) = 0. The clearing condition couples the
strategy sets, so the game gets a price player who owns the multiplier
pi of the balance rows; members pay pi_t per unit of net pool export on
top of their bill, and earn it per unit of net import.
"""
import logging
import time

import numpy as np
import scipy.sparse as sp

from rec.market import config as market_config
from rec.market.billing import Billing, compute_keys
from rec.market.central import total_cost
from rec.market.errors import ConvergenceError
from rec.market.games.nep import (
    AUDIT_SETTINGS,
    DEFAULT_AUDIT_TOL,
    NashGame,
    audit_game,
    nep_tau_bound,
    potential_value,
    resolve_start,
)
from rec.market.games.proximal import (
    DEFAULT_TOL_BALANCE,
    MIN_TAU,
    EquilibriumReport,
    GameConfig,
    Regularization,
    solve_game,
)
from rec.market.metrics import inefficiency_or_none
from rec.market.model import (
    COMMUNITY_BALANCE,
    Design,
    balance_operator,
)
from rec.market.qp import QpProblem, solve_qp
from rec.market.utils import check


logger = logging.getLogger(__name__)


# Gap left between the member weights and their D1 bounds, in units of
# the largest D1 bound.
PRICE_GAP_FACTOR = 2.0

# Norm bound of the gradient of one member's pool balance.
BALANCE_GRADIENT_BOUND = 2.0


class SharedConstraintGame(NashGame):
    """
    The billing game of a community under design D2, with the pool
    balance as shared constraint.
    """
    design = Design.D2
    has_price = True

    def __init__(self, scenario, billing, keys=None):
        NashGame.__init__(self, scenario, billing, keys)
        self._H = [balance_operator(layout) for layout in self.layouts]

    def linear_cost(self, i, vectors, price=None):
        q = NashGame.linear_cost(self, i, vectors)
        if price is not None:
            q = q + self._H[i].T.dot(price)
        return q

    def shared_residual(self, vectors):
        return np.sum([H.dot(v) for H, v in zip(self._H, vectors)], axis=0)

    def extended_bill(self, i, vectors, price):
        """
        Return b_i + pi' h(theta).
        """
        return self.bill(i, vectors) + float(
            np.dot(price, self.shared_residual(vectors)))

    def best_response(self, i, vectors, settings=None):
        """
        Best response of player i with the balance of the pool fixed by
        its rivals: H_i v = -sum_{j != i} H_j v_j.
        """
        block = self.constraints(i)
        H = self._H[i]
        rivals = self.shared_residual(vectors) - H.dot(vectors[i])
        A = sp.vstack([block.A, H], format="csr")
        lower = np.concatenate([block.lower, -rivals])
        upper = np.concatenate([block.upper, -rivals])
        labels = list(block.row_families) + [COMMUNITY_BALANCE] * len(rivals)
        problem = QpProblem.from_constraints(
            self.hessian(i), self.linear_cost(i, vectors), A, lower, upper,
            block.lb, block.ub, labels=labels,
            bound_labels=block.bound_families)
        return solve_qp(problem, settings or AUDIT_SETTINGS).x


class PriceVector(object):
    """
    Prices of the local pool, one per slot.
    """

    def __init__(self, values):
        self.values = np.array(values, dtype=float)
        self.values.setflags(write=False)

    def __len__(self):
        return len(self.values)

    def __getitem__(self, t):
        return float(self.values[t])

    def __iter__(self):
        return iter(self.values.tolist())

    def __repr__(self):
        return "<PriceVector T=%d>" % (len(self),)


class GnepReport(EquilibriumReport):
    """
    Outcome of a D2 equilibrium computation.

    :ivar pi: the PriceVector of the pool.
    :ivar balance_residual: ||h(theta)||_inf at the result.
    :ivar price_tau: the proximal weight of the price player.
    :ivar price_residual: ||h(theta)||_inf / price_tau, the last move the
                          price player would make.
    """

    def __init__(self, pi, balance_residual, price_tau, *args, **kwargs):
        EquilibriumReport.__init__(self, *args, **kwargs)
        self.pi = pi
        self.balance_residual = balance_residual
        self.price_tau = price_tau
        self.price_residual = balance_residual / price_tau


def gnep_tau_bound(n_members, alpha, billing, max_key=None):
    """
    Smallest tau for which the regularized D2 game, price player
    included, converges.
    """
    billing = Billing.parse(billing)
    n = n_members
    if billing.keyed:
        check(max_key is not None, "keyed bounds need the largest key")
        a = alpha * (n - 1) * max_key
        return 2.0 * a + 2.0 * np.sqrt(a * a + n)
    a = alpha * (n - 1)
    return a + np.sqrt(a * a + 4.0 * n)


def tau_bound_gnep(scenario, billing, keys=None):
    """
    Return the regularization bound of the D2 game of a scenario.

    :rtype: float
    """
    return float(gnep_tau_bound(scenario.N, scenario.tariffs.alpha, billing,
                                keys.max if keys is not None else None))


def gnep_regularization(game, safety=market_config.TAU_SAFETY_FACTOR):
    """
    Return the split proximal weights of the D2 game.

    Member i gets safety (b_i + g), b_i its row of the D1 bound and g a
    gap of PRICE_GAP_FACTOR times the largest D1 bound. The price player
    gets safety N mu^2 / g, mu the balance gradient bound, which keeps the
    coupling matrix with its price row a P-matrix.

    :type game: SharedConstraintGame
    :rtype: Regularization
    """
    keyed = game.billing.keyed
    largest = game.keys.max if keyed else None
    bound = nep_tau_bound(game.N, game.scenario.tariffs.alpha, game.billing,
                          largest)
    gap = PRICE_GAP_FACTOR * max(bound, MIN_TAU)
    rows = [bound] * game.N
    if keyed and largest > 0:
        rows = [bound * game.weight(i) / largest for i in range(game.N)]
    price = BALANCE_GRADIENT_BOUND ** 2 * game.N / gap
    return Regularization(tuple(safety * (b + gap) for b in rows),
                          safety * price)


def extended_player_objective(scenario, i, profile, price, billing,
                              keys=None, schedule=None):
    """
    Return b_i + pi' h(theta), member i playing `schedule` if given.

    :rtype: float
    """
    if schedule is not None:
        profile = profile.replace(i, schedule)
    game = SharedConstraintGame(scenario, billing, keys)
    return game.extended_bill(i, game.vectors(profile),
                              np.asarray(price, dtype=float))


def potential_value_d2(profile, scenario, billing, keys=None):
    """
    Return the potential of the D2 game at a profile.

    :rtype: float
    """
    check(profile.design is Design.D2, "a D2 profile is required")
    return potential_value(profile, scenario, billing, keys)


def check_gne(profile, scenario, billing, keys=None, tol=DEFAULT_AUDIT_TOL,
              tol_balance=DEFAULT_TOL_BALANCE):
    """
    Audit a D2 profile: the largest unilateral gain with the pool balance
    of the rivals fixed, and the balance residual.

    The profile is certified when the gain is within tol and the balance
    within tol_balance.

    :return: the audit and ||h(theta)||_inf.
    :rtype: tuple
    """
    game = SharedConstraintGame(scenario, billing, keys)
    vectors = game.vectors(profile)
    balance = float(np.max(np.abs(game.shared_residual(vectors)),
                           initial=0.0))
    audit = audit_game(game, vectors, tol)
    certified = audit.certified and balance <= tol_balance
    return audit._replace(certified=certified), balance


def pda_shared_solve(scenario, config=None, start=None, keys=None,
                     social_optimum=None, observer=None):
    """
    Compute a variational equilibrium of the D2 game by proximal
    decomposition with a price player.

    :param start: None or "benchmark", "central", a CommunityProfile or a
                  CentralSolution; D1 profiles are embedded in D2. Central
                  solutions also provide the starting prices.
    :raise ConvergenceError: when max_outer is reached.
    :rtype: GnepReport
    """
    config = config or GameConfig()
    started = time.time()
    billing = config.billing
    if billing.keyed:
        logger.warning("%s billing with a shared constraint runs in a "
                       "heuristic-convergence regime", billing.value)
        if keys is None:
            keys = compute_keys(scenario, Design.D2, billing, social_optimum)
    game = SharedConstraintGame(scenario, billing, keys)
    if config.tau is None:
        regularization = gnep_regularization(game)
    else:
        tau = config.resolve_tau(tau_bound_gnep(scenario, billing, keys),
                                 market_config.TAU_SAFETY_FACTOR)
        regularization = Regularization.uniform(tau, game.N, price=True)
    profile, price = resolve_start(scenario, Design.D2, start)

    state = solve_game(game, config, regularization, game.vectors(profile),
                       start_price=price, observer=observer)
    profile = game.profile(state.vectors)
    bills = game.bills(state.vectors)
    balance = float(np.max(np.abs(game.shared_residual(state.vectors)),
                           initial=0.0))
    residual = None
    if config.audit and state.converged:
        residual = audit_game(
            game, state.vectors, DEFAULT_AUDIT_TOL).improvement
    report = GnepReport(
        PriceVector(state.price), balance, regularization.price, profile,
        bills, total_cost(profile, scenario), billing, keys,
        regularization.scale,
        state.outer, state.inner, state.trace, state.converged,
        best_response_residual=residual,
        inefficiency=inefficiency_or_none(bills, social_optimum),
        elapsed=time.time() - started)
    if not state.converged:
        raise ConvergenceError(
            "no generalized equilibrium within %d outer iterations" % (
                config.max_outer,), report=report)
    return report
