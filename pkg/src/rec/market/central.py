# -*- coding: utf-8 -*-
# central.py
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
Centralized problems: the social optimum of each design, the potential
problem of the per-slot billing game, the individual benchmark and the
leave-one-out optima.
"""
import logging
import time

from collections import namedtuple

import numpy as np
import scipy.sparse as sp

from rec.market import parallel
from rec.market.errors import DesignMismatchError
from rec.market.model import (
    COMMUNITY_BALANCE,
    CommunityProfile,
    Design,
    balance_operator,
    commodity_cost_vector,
    individual_constraints,
    net_load_operator,
    variable_layout,
)
from rec.market.qp import QpProblem, QpSettings, solve_qp
from rec.market.utils import check


logger = logging.getLogger(__name__)


AGGREGATE = "aggregate"

CENTRAL_SETTINGS = QpSettings(eps_abs=1e-7, max_iter=50000)

# Solves of single members, LP-like in the benchmark.
MEMBER_SETTINGS = QpSettings(eps_abs=1e-8, max_iter=50000)


class CostBreakdown(namedtuple(
        'CostBreakdown',
        ['retail_import', 'retail_export', 'local_import', 'local_export',
         'upstream_grid', 'peak'])):
    """
    Components of a cost. Revenues are negative, so that the components
    sum to the total.
    """
    __slots__ = ()

    @property
    def total(self):
        return float(sum(self))

    def __add__(self, other):
        return CostBreakdown(*[a + b for a, b in zip(self, other)])


ZERO_COST = CostBreakdown(0.0, 0.0, 0.0, 0.0, 0.0, 0.0)


def member_cost(schedule, tariffs):
    """
    Return the commodity and peak costs of one member, without the
    upstream grid term.

    :rtype: CostBreakdown
    """
    beta_peak = tariffs.beta * schedule.p_bar
    lam = np.asarray
    if schedule.design is Design.D1:
        return CostBreakdown(
            float(lam(tariffs.lambda_imp).dot(schedule.l_pos)),
            -float(lam(tariffs.lambda_exp).dot(schedule.l_neg)),
            0.0, 0.0, 0.0, beta_peak)
    return CostBreakdown(
        float(lam(tariffs.lambda_imp).dot(schedule.flow("i_ret"))),
        -float(lam(tariffs.lambda_exp).dot(schedule.flow("e_ret"))),
        float(lam(tariffs.lambda_iloc).dot(schedule.flow("i_com"))),
        -float(lam(tariffs.lambda_eloc).dot(schedule.flow("e_com"))),
        0.0, beta_peak)


def upstream_cost(L, tariffs):
    """
    Return the upstream grid cost alpha * sum_t L_t^2.
    """
    L = np.asarray(L, dtype=float)
    return float(tariffs.alpha * L.dot(L))


def total_cost(profile, scenario, design=None):
    """
    Return the total cost of the community for a profile.

    :param profile: the community profile.
    :type profile: CommunityProfile
    :param scenario: the scenario.
    :type scenario: Scenario
    :param design: the design to price with; the profile's by default.
    :type design: Design
    :raise DesignMismatchError: if the profile is of another design.
    :rtype: CostBreakdown
    """
    if design is not None and Design.parse(design) is not profile.design:
        raise DesignMismatchError("cannot price a %s profile as %s" % (
            profile.design.value, Design.parse(design).value))
    cost = ZERO_COST
    for schedule in profile.schedules:
        cost = cost + member_cost(schedule, scenario.tariffs)
    return cost._replace(
        upstream_grid=upstream_cost(profile.L, scenario.tariffs))


class CentralSolution(object):
    """
    Optimum of a centralized problem.

    :ivar profile: the optimal community profile.
    :ivar cost: the CostBreakdown of the profile.
    :ivar objective: optimal value of the solved problem; the total cost,
                     or the potential for potential problems.
    :ivar prices: multipliers of the pool balance rows (design D2).
    :ivar solution: the underlying QpSolution.
    """

    def __init__(self, profile, cost, objective, prices, solution,
                 elapsed=0.0):
        self.profile = profile
        self.cost = cost
        self.objective = objective
        self.prices = prices
        self.solution = solution
        self.elapsed = elapsed

    @property
    def design(self):
        return self.profile.design

    @property
    def total_cost(self):
        return self.cost.total

    def __repr__(self):
        return "<CentralSolution %s cost=%.6f>" % (
            self.design.value, self.total_cost)


def community_problem(scenario, design, potential=False):
    """
    Stack all members into one QP.

    Variables are the member vectors followed by the aggregate net load
    L[0..T-1], tied to the members by L = sum_i (l_pos_i - l_neg_i). The
    objective is the total cost, or with `potential` the potential of the
    per-slot billing game: linear costs + alpha/2 L^2 + alpha/2 sum l_i^2.

    :return: the problem and the member layouts.
    :rtype: tuple
    """
    design = Design.parse(design)
    horizon, tariffs = scenario.horizon, scenario.tariffs
    T = horizon.T
    alpha = tariffs.alpha

    layouts, blocks = [], []
    for member in scenario.members:
        layouts.append(variable_layout(member, design, horizon))
        blocks.append(individual_constraints(member, design, horizon))

    diag_blocks, q_parts = [], []
    for layout in layouts:
        q_parts.append(commodity_cost_vector(layout, tariffs))
        if potential:
            G = net_load_operator(layout)
            diag_blocks.append(alpha * G.T.dot(G))
        else:
            diag_blocks.append(sp.csc_matrix((layout.size, layout.size)))
    weight = alpha if potential else 2.0 * alpha
    diag_blocks.append(weight * sp.identity(T, format="csc"))
    P = sp.block_diag(diag_blocks, format="csc")
    q = np.concatenate(q_parts + [np.zeros(T)])

    member_rows = sp.block_diag([b.A for b in blocks], format="csr")
    n_members = member_rows.shape[1]
    rows = [sp.hstack([member_rows, sp.csr_matrix((member_rows.shape[0],
                                                   T))])]
    lower = [np.concatenate([b.lower for b in blocks])]
    upper = [np.concatenate([b.upper for b in blocks])]
    labels = [f for b in blocks for f in b.row_families]

    aggregate = sp.hstack(
        [-net_load_operator(layout) for layout in layouts] +
        [sp.identity(T, format="csr")])
    rows.append(aggregate)
    lower.append(np.zeros(T))
    upper.append(np.zeros(T))
    labels += [AGGREGATE] * T

    if design is Design.D2:
        balance = sp.hstack(
            [balance_operator(layout) for layout in layouts] +
            [sp.csr_matrix((T, T))])
        rows.append(balance)
        lower.append(np.zeros(T))
        upper.append(np.zeros(T))
        labels += [COMMUNITY_BALANCE] * T

    lb = np.concatenate([b.lb for b in blocks] + [np.full(T, -np.inf)])
    ub = np.concatenate([b.ub for b in blocks] + [np.full(T, np.inf)])
    bound_labels = [f for b in blocks for f in b.bound_families] + \
        [None] * T
    check(len(lb) == n_members + T, "Inconsistent community layout")

    problem = QpProblem.from_constraints(
        P, q, sp.vstack(rows, format="csr"), np.concatenate(lower),
        np.concatenate(upper), lb, ub, labels=labels,
        bound_labels=bound_labels)
    return problem, layouts


def _split(vector, layouts):
    vectors, offset = [], 0
    for layout in layouts:
        vectors.append(vector[offset:offset + layout.size])
        offset += layout.size
    return vectors


def _solve_community(scenario, design, potential, settings):
    design = Design.parse(design)
    start = time.time()
    problem, layouts = community_problem(scenario, design, potential)
    solution = solve_qp(problem, settings or CENTRAL_SETTINGS)
    profile = CommunityProfile.from_vectors(
        layouts, _split(solution.x, layouts), design)
    prices = None
    if design is Design.D2:
        prices = solution.duals(COMMUNITY_BALANCE)
    elapsed = time.time() - start
    return CentralSolution(profile, total_cost(profile, scenario),
                           solution.objective, prices, solution,
                           elapsed=elapsed)


def solve_centralized(scenario, design, settings=None):
    """
    Minimize the total cost of the community.

    The optimal value is unique, the optimal profile need not be: the
    returned profile is one element of the optimal set.

    :param scenario: a valid scenario.
    :type scenario: Scenario
    :param design: the market design.
    :type design: Design
    :param settings: QP settings, CENTRAL_SETTINGS by default.
    :type settings: QpSettings
    :raise SolverError: if the QP solve fails.
    :rtype: CentralSolution
    """
    result = _solve_community(scenario, design, False, settings)
    logger.info("Centralized %s optimum: %.6f (%d iterations, %.2fs)",
                result.design.value, result.total_cost,
                result.solution.iterations, result.elapsed)
    return result


def solve_potential_problem(scenario, design, settings=None):
    """
    Minimize the potential of the per-slot billing game over the joint
    strategy set: the total cost minus alpha/2 sum_t sum_i l_i L_-i.

    Its minimizers are the equilibria of that game (for D2, the variational
    ones); `objective` holds the potential value, `prices` the pool prices.

    :rtype: CentralSolution
    """
    result = _solve_community(scenario, design, True, settings)
    logger.info("Potential %s optimum: %.6f (cost %.6f)",
                result.design.value, result.objective, result.total_cost)
    return result


class BenchmarkResult(object):
    """
    The no-community benchmark: every member minimizes alone its retail
    and peak costs, the upstream grid cost is added afterwards.

    :ivar profile: the D1 profile of the individual optima.
    :ivar member_costs: CostBreakdown of each member, no upstream term.
    :ivar cost: community CostBreakdown, upstream term included.
    """

    def __init__(self, profile, member_costs, cost, elapsed=0.0):
        self.profile = profile
        self.member_costs = member_costs
        self.cost = cost
        self.elapsed = elapsed

    @property
    def bills(self):
        return [c.total for c in self.member_costs]

    @property
    def total_cost(self):
        return self.cost.total


def solve_member_problem(member, horizon, c, design=Design.D1, P=None,
                         settings=None):
    """
    Minimize 1/2 v'Pv + c'v over the individual set of a member.

    :rtype: QpSolution
    """
    layout = variable_layout(member, design, horizon)
    block = individual_constraints(member, design, horizon)
    problem = QpProblem.from_constraints(
        P, c, block.A, block.lower, block.upper, block.lb, block.ub,
        labels=block.row_families, bound_labels=block.bound_families)
    check(problem.n == layout.size, "Cost vector does not fit the layout")
    return solve_qp(problem, settings or MEMBER_SETTINGS)


def solve_individual_benchmark(scenario, settings=None):
    """
    Solve the individual problem of every member.

    :param scenario: a valid scenario.
    :type scenario: Scenario
    :rtype: BenchmarkResult
    """
    start = time.time()
    horizon, tariffs = scenario.horizon, scenario.tariffs

    def _solve(member):
        layout = variable_layout(member, Design.D1, horizon)
        c = commodity_cost_vector(layout, tariffs)
        return solve_member_problem(member, horizon, c, settings=settings)

    solutions = parallel.parallel_map(_solve, scenario.members,
                                      name="benchmark")
    layouts = [variable_layout(m, Design.D1, horizon)
               for m in scenario.members]
    profile = CommunityProfile.from_vectors(
        layouts, [s.x for s in solutions], Design.D1)
    member_costs = [member_cost(sch, tariffs) for sch in profile]
    cost = total_cost(profile, scenario)
    elapsed = time.time() - start
    logger.info("Individual benchmark: %.6f (%.2fs)", cost.total, elapsed)
    return BenchmarkResult(profile, member_costs, cost, elapsed=elapsed)


def solve_leave_one_out(scenario, design, excluded, settings=None):
    """
    Return the optimal total cost of the community without one member.

    :param excluded: position of the member to leave out.
    :type excluded: int
    :raise ValueError: for a single member community.
    :rtype: float
    """
    check(scenario.N >= 2, "leave-one-out needs at least two members")
    check(0 <= excluded < scenario.N, "no member at %r" % (excluded,))
    result = _solve_community(scenario.without(excluded), design, False,
                              settings)
    logger.debug("Optimum without %s: %.6f",
                 scenario.members[excluded].id, result.total_cost)
    return result.total_cost


def leave_one_out_costs(scenario, design, settings=None):
    """
    Return the optimal total cost without each member, in member order.

    :rtype: list of float
    """
    return parallel.parallel_map(
        lambda i: solve_leave_one_out(scenario, design, i, settings),
        range(scenario.N), name="leave-one-out")
