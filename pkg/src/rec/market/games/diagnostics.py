# -*- coding: utf-8 -*-
# diagnostics.py
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
Numerical diagnostics of the convergence conditions of the games.

These helpers do not take part in any computation of equilibria. They
check, on concrete numbers, the structural facts the regularization
bounds rely on: the monotonicity of the game mapping, the spectrum of its
Jacobian blocks and the P-matrix property of the regularized coupling
matrices.
"""
import logging

from collections import namedtuple

import numpy as np
import scipy.sparse as sp

from rec.market import parallel
from rec.market.billing import Billing
from rec.market.games.gnep import (
    BALANCE_GRADIENT_BOUND,
    SharedConstraintGame,
)
from rec.market.games.nep import NashGame
from rec.market.model import (
    CommunityProfile,
    Design,
    individual_constraints,
    variable_layout,
)
from rec.market.qp import QpProblem, QpSettings, solve_qp
from rec.market.utils import check


logger = logging.getLogger(__name__)


SAMPLE_SETTINGS = QpSettings(eps_abs=1e-9, max_iter=50000)


JacobianBlocks = namedtuple(
    'JacobianBlocks', ['D', 'E', 'D_eigenvalues', 'E_eigenvalues', 'B'])


def jacobian_blocks(n_members, alpha):
    """
    Return the per-slot blocks of the Jacobian of the cp game mapping.

    Per slot, with the (l_pos, l_neg) pairs of the members stacked, the
    Jacobian is alpha (D + E): D is block diagonal with [[1, -1], [-1, 1]]
    blocks and E = ((-1)^(m + v)) has rank one.

    :rtype: JacobianBlocks
    """
    check(n_members >= 1, "at least one member")
    pair = np.array([[1.0, -1.0], [-1.0, 1.0]])
    D = np.kron(np.eye(n_members), pair)
    signs = np.array([(-1.0) ** m for m in range(2 * n_members)])
    E = np.outer(signs, signs)
    return JacobianBlocks(D, E, np.linalg.eigvalsh(D),
                          np.linalg.eigvalsh(E), alpha * (D + E))


def coupling_bound(alpha, billing, max_key=None):
    """
    Upper bound of the norm of the cross Jacobians J_j F_i.
    """
    if Billing.parse(billing).keyed:
        check(max_key is not None, "keyed bounds need the largest key")
        return 4.0 * alpha * max_key
    return 2.0 * alpha


def upsilon_matrix(n_members, alpha, tau, billing, max_key=None):
    """
    Return the regularized coupling matrix of the D1 game: tau on the
    diagonal, minus the cross Jacobian bound elsewhere. The members' own
    Hessians are only positive semidefinite, so they add nothing to the
    diagonal.

    :rtype: numpy.ndarray
    """
    bound = coupling_bound(alpha, billing, max_key)
    upsilon = -bound * np.ones((n_members, n_members))
    np.fill_diagonal(upsilon, tau)
    return upsilon


def extended_upsilon_matrix(n_members, alpha, tau, billing, max_key=None,
                            mu=BALANCE_GRADIENT_BOUND):
    """
    Return the coupling matrix of the D2 game extended with the price
    player as last row and column.

    :param mu: bound of the norm of each member's balance gradient.
    :rtype: numpy.ndarray
    """
    upsilon = np.empty((n_members + 1, n_members + 1))
    upsilon[:n_members, :n_members] = upsilon_matrix(
        n_members, alpha, tau, billing, max_key)
    upsilon[n_members, :n_members] = -mu
    upsilon[:n_members, n_members] = -mu
    upsilon[n_members, n_members] = tau
    return upsilon


def regularized_upsilon_matrix(regularization, alpha, billing, keys=None,
                               mu=BALANCE_GRADIENT_BOUND):
    """
    Return the coupling matrix of a run with per member weights.

    Row i holds the weight of member i on the diagonal and the cross
    Jacobian bound of member i elsewhere: 4 alpha K_i under net and vcg,
    2 alpha under cp. A price weight adds the price player as last row
    and column.

    :type regularization: Regularization
    :type keys: DistributionKeys
    :rtype: numpy.ndarray
    """
    n = len(regularization.players)
    if Billing.parse(billing).keyed:
        check(keys is not None, "keyed bounds need the keys")
        rows = np.array([4.0 * alpha * keys[i] for i in range(n)])
    else:
        rows = np.full(n, 2.0 * alpha)
    priced = regularization.price is not None
    upsilon = np.zeros((n + priced, n + priced))
    upsilon[:n, :n] = -np.outer(rows, np.ones(n))
    upsilon[range(n), range(n)] = regularization.players
    if priced:
        upsilon[n, :n] = -mu
        upsilon[:n, n] = -mu
        upsilon[n, n] = regularization.price
    return upsilon


def is_p_matrix(matrix, tol=0.0):
    """
    Tell whether all the leading principal minors of a matrix are positive.

    For the Z-matrices built above this is equivalent to all the
    principal minors being positive.

    :rtype: bool
    """
    matrix = np.asarray(matrix, dtype=float)
    check(matrix.ndim == 2 and matrix.shape[0] == matrix.shape[1],
          "a square matrix is required")
    for k in range(1, matrix.shape[0] + 1):
        if np.linalg.det(matrix[:k, :k]) <= tol:
            return False
    return True


def sample_feasible_profile(scenario, design, rng):
    """
    Draw a feasible profile: every member projects a random point on its
    individual set.

    :param rng: the random generator.
    :type rng: numpy.random.Generator
    :rtype: CommunityProfile
    """
    design = Design.parse(design)
    horizon = scenario.horizon
    targets = []
    for member in scenario.members:
        layout = variable_layout(member, design, horizon)
        scale = max(member.conn_limit, 1.0)
        targets.append(rng.uniform(-scale, 2.0 * scale, size=layout.size))

    def _project(args):
        member, target = args
        block = individual_constraints(member, design, horizon)
        n = block.n_vars
        problem = QpProblem.from_constraints(
            sp.identity(n, format="csc"), -target, block.A, block.lower,
            block.upper, block.lb, block.ub, labels=block.row_families,
            bound_labels=block.bound_families)
        return solve_qp(problem, SAMPLE_SETTINGS).x

    vectors = parallel.parallel_map(
        _project, list(zip(scenario.members, targets)), name="sampling")
    layouts = [variable_layout(m, design, horizon) for m in scenario.members]
    return CommunityProfile.from_vectors(layouts, vectors, design)


def game_mapping(game, vectors):
    """
    Return F = (grad_i b_i)_i at a strategy profile, stacked.

    :rtype: numpy.ndarray
    """
    return np.concatenate([
        game.hessian(i).dot(vectors[i]) + game.linear_cost(i, vectors)
        for i in range(game.N)])


def monotonicity_gap(scenario, billing, keys=None, pairs=20, seed=0,
                     design=Design.D1):
    """
    Return the smallest (theta - theta')' (F(theta) - F(theta')) found over
    random pairs of feasible profiles. Nonnegative values are consistent
    with a monotone game mapping.

    :rtype: float
    """
    design = Design.parse(design)
    if design is Design.D2:
        game = SharedConstraintGame(scenario, billing, keys)
    else:
        game = NashGame(scenario, billing, keys)
    rng = np.random.default_rng(seed)
    worst = np.inf
    for _ in range(pairs):
        first = game.vectors(sample_feasible_profile(scenario, design, rng))
        second = game.vectors(sample_feasible_profile(scenario, design, rng))
        gap = np.concatenate(first) - np.concatenate(second)
        value = float(gap.dot(game_mapping(game, first) -
                              game_mapping(game, second)))
        worst = min(worst, value)
    logger.info("Monotonicity over %d pairs: min %.3e", pairs, worst)
    return worst
