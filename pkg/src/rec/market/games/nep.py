# -*- coding: utf-8 -*-
# nep.py
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
Design D1 as a Nash equilibrium problem.

Each member minimizes its own bill over its individual set. The members
only interact through the upstream grid cost alpha * L^2:

  * net / vcg: b_i = K_i f(theta), a weighted potential game with
    potential f;
  * cp: b_i = c_i' theta_i + alpha l_i' L, an exact potential game with
    potential f - alpha/2 sum_t sum_i l_i L_-i.
"""
import logging
import time

from collections import namedtuple

import numpy as np
import scipy.sparse as sp

from zope.interface import implementer

from rec.market import config as market_config
from rec.market import parallel
from rec.market.billing import Billing, compute_keys
from rec.market.central import (
    CentralSolution,
    solve_centralized,
    solve_individual_benchmark,
    total_cost,
)
from rec.market.errors import ConvergenceError, DesignMismatchError
from rec.market.games.interfaces import IGame
from rec.market.games.proximal import (
    EquilibriumReport,
    GameConfig,
    Regularization,
    solve_game,
)
from rec.market.metrics import inefficiency_or_none
from rec.market.model import (
    CommunityProfile,
    Design,
    commodity_cost_vector,
    embed_in_d2,
    individual_constraints,
    net_load_operator,
    variable_layout,
)
from rec.market.qp import QpProblem, QpSettings, solve_qp
from rec.market.utils import check


logger = logging.getLogger(__name__)


DEFAULT_AUDIT_TOL = 1e-4

# Floor of the weight of a member, as a share of the largest key.
MIN_KEY_SHARE = 1e-6

AUDIT_SETTINGS = QpSettings(eps_abs=1e-9, max_iter=50000)


NashAudit = namedtuple('NashAudit',
                       ['improvement', 'improvements', 'tol', 'certified'])


@implementer(IGame)
class NashGame(object):
    """
    The billing game of a community under design D1.
    """
    design = Design.D1
    has_price = False

    def __init__(self, scenario, billing, keys=None):
        self.scenario = scenario
        self.billing = Billing.parse(billing)
        if self.billing.keyed:
            check(keys is not None, "%s games need distribution keys" % (
                self.billing.value,))
            check(len(keys) == scenario.N, "one key per member")
        self.keys = keys
        self.alpha = scenario.tariffs.alpha
        horizon = scenario.horizon
        self.layouts = [variable_layout(m, self.design, horizon)
                        for m in scenario.members]
        self._blocks = [individual_constraints(m, self.design, horizon)
                        for m in scenario.members]
        self._costs = [commodity_cost_vector(layout, scenario.tariffs)
                       for layout in self.layouts]
        self._G = [net_load_operator(layout) for layout in self.layouts]

    @property
    def N(self):
        return len(self.layouts)

    def weight(self, i):
        """
        The weight of player i in the potential: K_i, or 1 for cp.
        """
        if self.billing.keyed:
            return self.keys[i]
        return 1.0

    def constraints(self, i):
        return self._blocks[i]

    def hessian(self, i):
        G = self._G[i]
        return sp.csc_matrix(2.0 * self.alpha * self.weight(i) * G.T.dot(G))

    def net_loads(self, vectors):
        return [G.dot(v) for G, v in zip(self._G, vectors)]

    def linear_cost(self, i, vectors, price=None):
        loads = self.net_loads(vectors)
        rivals = np.sum(loads, axis=0) - loads[i]
        G = self._G[i]
        if self.billing.keyed:
            return self.weight(i) * (
                self._costs[i] + 2.0 * self.alpha * G.T.dot(rivals))
        return self._costs[i] + self.alpha * G.T.dot(rivals)

    def total_cost(self, vectors):
        L = np.sum(self.net_loads(vectors), axis=0)
        linear = sum(c.dot(v) for c, v in zip(self._costs, vectors))
        return float(linear + self.alpha * L.dot(L))

    def bill(self, i, vectors):
        if self.billing.keyed:
            return self.weight(i) * self.total_cost(vectors)
        loads = self.net_loads(vectors)
        L = np.sum(loads, axis=0)
        return float(self._costs[i].dot(vectors[i]) +
                     self.alpha * loads[i].dot(L))

    def bills(self, vectors):
        return [self.bill(i, vectors) for i in range(self.N)]

    def potential(self, vectors):
        if self.billing.keyed:
            return self.total_cost(vectors)
        loads = self.net_loads(vectors)
        L = np.sum(loads, axis=0)
        linear = sum(c.dot(v) for c, v in zip(self._costs, vectors))
        return float(linear + 0.5 * self.alpha * L.dot(L) +
                     0.5 * self.alpha * sum(l.dot(l) for l in loads))

    def shared_residual(self, vectors):
        return None

    def profile(self, vectors):
        return CommunityProfile.from_vectors(self.layouts, vectors,
                                             self.design)

    def vectors(self, profile):
        if profile.design is not self.design:
            raise DesignMismatchError("a %s game cannot use a %s profile" % (
                self.design.value, profile.design.value))
        return [np.array(v) for v in profile.vectors()]

    def best_response(self, i, vectors, settings=None):
        """
        Return the exact best response of player i to its rivals.

        :rtype: numpy.ndarray
        """
        block = self._blocks[i]
        problem = QpProblem.from_constraints(
            self.hessian(i), self.linear_cost(i, vectors), block.A,
            block.lower, block.upper, block.lb, block.ub,
            labels=block.row_families, bound_labels=block.bound_families)
        return solve_qp(problem, settings or AUDIT_SETTINGS).x


#
# Regularization bound
#

def nep_tau_bound(n_members, alpha, billing, max_key=None):
    """
    Smallest tau for which the regularized D1 game converges.

    cp: 2 alpha (N - 1); net / vcg: 4 alpha (N - 1) max K.
    """
    billing = Billing.parse(billing)
    if billing.keyed:
        check(max_key is not None, "keyed bounds need the largest key")
        return 4.0 * alpha * (n_members - 1) * max_key
    return 2.0 * alpha * (n_members - 1)


def tau_bound_nep(scenario, billing, keys=None):
    """
    Return the regularization bound of the D1 game of a scenario.

    :param keys: the distribution keys, required for net and vcg.
    :type keys: DistributionKeys
    :rtype: float
    """
    return nep_tau_bound(scenario.N, scenario.tariffs.alpha, billing,
                         keys.max if keys is not None else None)


def nep_regularization(game, tau):
    """
    Return the proximal weights of the D1 game for a scale tau.

    cp members all get tau. Under net and vcg member i gets
    tau K_i / max K; row i of the coupling matrix only holds K_i terms,
    so it stays dominated whenever tau is above the bound.

    :type game: NashGame
    :rtype: Regularization
    """
    if not game.billing.keyed:
        return Regularization.uniform(tau, game.N)
    weights = [game.weight(i) for i in range(game.N)]
    largest = max(weights)
    if largest <= 0:
        return Regularization.uniform(tau, game.N)
    return Regularization(
        tuple(tau * max(w / largest, MIN_KEY_SHARE) for w in weights), None)


#
# Bills and potential
#

def _game_for(scenario, billing, keys, design):
    design = Design.parse(design)
    if design is Design.D2:
        from rec.market.games.gnep import SharedConstraintGame
        return SharedConstraintGame(scenario, billing, keys)
    return NashGame(scenario, billing, keys)


def player_objective(scenario, i, profile, billing, keys=None,
                     schedule=None):
    """
    Return the bill of member i, its rivals playing `profile`.

    :param i: the member.
    :type i: int
    :param profile: the strategies of everybody.
    :type profile: CommunityProfile
    :param schedule: the strategy of member i, the one in `profile` if None.
    :type schedule: Schedule
    :rtype: float
    """
    if schedule is not None:
        profile = profile.replace(i, schedule)
    game = _game_for(scenario, billing, keys, profile.design)
    return game.bill(i, game.vectors(profile))


def potential_value(profile, scenario, billing, keys=None):
    """
    Return the potential of the game at a profile: f for net and vcg,
    f - alpha/2 sum_t sum_i l_i L_-i for cp.

    :rtype: float
    """
    game = _game_for(scenario, billing, keys, profile.design)
    return game.potential(game.vectors(profile))


def check_nash(profile, scenario, billing, keys=None,
               tol=DEFAULT_AUDIT_TOL):
    """
    Compute the largest gain a member gets by deviating alone.

    :rtype: NashAudit
    """
    game = _game_for(scenario, billing, keys, profile.design)
    return audit_game(game, game.vectors(profile), tol)


def audit_game(game, vectors, tol):

    def _improvement(i):
        if game.weight(i) == 0:
            return 0.0
        response = game.best_response(i, vectors)
        deviated = list(vectors)
        deviated[i] = response
        return game.bill(i, vectors) - game.bill(i, deviated)

    improvements = parallel.parallel_map(_improvement, range(game.N),
                                         name="audit")
    worst = max(improvements)
    return NashAudit(worst, improvements, tol, worst <= tol)


#
# Algorithm
#

def resolve_start(scenario, design, start):
    """
    Return (profile, price) to start an equilibrium computation from.

    :param start: None or "benchmark", "central", a CommunityProfile or a
                  CentralSolution.
    """
    design = Design.parse(design)
    price = None
    if start is None or start == "benchmark":
        profile = solve_individual_benchmark(scenario).profile
    elif start == "central":
        start = solve_centralized(scenario, design)
        profile, price = start.profile, start.prices
    elif isinstance(start, CentralSolution):
        profile, price = start.profile, start.prices
    elif isinstance(start, CommunityProfile):
        profile = start
    else:
        raise ValueError("unknown start %r" % (start,))
    if design is Design.D2 and profile.design is Design.D1:
        profile = embed_in_d2(profile, scenario)
    if profile.design is not design:
        raise DesignMismatchError("cannot start a %s game from a %s profile"
                                  % (design.value, profile.design.value))
    return profile, price


def pda_solve(scenario, config=None, start=None, keys=None,
              social_optimum=None, observer=None):
    """
    Compute a Nash equilibrium of the D1 game by proximal decomposition.

    :param scenario: a valid scenario.
    :type scenario: Scenario
    :param config: the algorithm parameters, GameConfig() by default.
    :type config: GameConfig
    :param start: where to start from, the individual benchmark by default.
    :param keys: distribution keys of net / vcg; computed if None.
    :type keys: DistributionKeys
    :param social_optimum: optimal total cost, to report the inefficiency.
    :type social_optimum: float
    :raise ConvergenceError: when max_outer is reached.
    :rtype: EquilibriumReport
    """
    config = config or GameConfig()
    started = time.time()
    billing = config.billing
    if billing.keyed and keys is None:
        keys = compute_keys(scenario, Design.D1, billing, social_optimum)
    game = NashGame(scenario, billing, keys)
    bound = tau_bound_nep(scenario, billing, keys)
    tau = config.resolve_tau(bound, market_config.TAU_SAFETY_FACTOR)
    regularization = nep_regularization(game, tau)
    profile, _ = resolve_start(scenario, Design.D1, start)

    state = solve_game(game, config, regularization, game.vectors(profile),
                       observer=observer)
    report = _report(game, scenario, config, keys, tau, state,
                     social_optimum, started)
    if not state.converged:
        raise ConvergenceError(
            "no equilibrium within %d outer iterations" % (
                config.max_outer,), report=report)
    return report


def _report(game, scenario, config, keys, tau, state, social_optimum,
            started):
    profile = game.profile(state.vectors)
    bills = game.bills(state.vectors)
    residual = None
    if config.audit and state.converged:
        residual = audit_game(
            game, state.vectors, DEFAULT_AUDIT_TOL).improvement
    return EquilibriumReport(
        profile, bills, total_cost(profile, scenario), config.billing, keys,
        tau, state.outer, state.inner, state.trace, state.converged,
        best_response_residual=residual,
        inefficiency=inefficiency_or_none(bills, social_optimum),
        elapsed=time.time() - started)
