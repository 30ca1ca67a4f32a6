# -*- coding: utf-8 -*-
# solver.py
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
Operator splitting solver for convex quadratic programs.

The solver runs ADMM on the standard form of QpProblem with over-relaxation,
Ruiz equilibration, adaptive step size and detection of primal and dual
infeasibility. Once the iterates are close to optimal, the solver guesses
the active constraints and solves the equality constrained problem they
define ("polishing"), which yields solutions accurate to machine precision
whenever the guess is right.

A QpSolver keeps its factorizations between solves: callers that solve the
same constraint set many times with a changing linear cost (the players of
a game) update q and warm start instead of building a new solver.
"""
import logging

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from rec.market.errors import (
    InfeasibleProblemError,
    IterationLimitError,
    SolverError,
)
from rec.market.qp.problem import QpSolution, QpStatus
from rec.market.utils import check


logger = logging.getLogger(__name__)


RHO_MIN = 1e-6
RHO_MAX = 1e6
RHO_EQ_FACTOR = 1e3
RHO_EQ_TOL = 1e-8
SCALING_MIN = 1e-4
SCALING_MAX = 1e4
PSD_TOL = 1e-9
DENSE_PSD_LIMIT = 2000


class QpSettings(object):
    """
    Tolerances and limits of the solver.

    Pass any attribute as a keyword to override its default.
    """
    eps_abs = 1e-7
    eps_rel = 0.0
    eps_prim_inf = 1e-5
    eps_dual_inf = 1e-5
    rho = 0.1
    sigma = 1e-6
    alpha = 1.6
    max_iter = 25000
    check_interval = 5
    scaling = 10
    adaptive_rho = True
    adaptive_rho_interval = 25
    adaptive_rho_tolerance = 5.0
    polish = True
    polish_interval = 25
    polish_trigger = 1e-3
    delta = 1e-7
    polish_refine_iter = 5

    def __init__(self, **kwargs):
        for key, value in kwargs.items():
            if not hasattr(QpSettings, key):
                raise TypeError("unknown QP setting %r" % (key,))
            setattr(self, key, value)
        check(self.eps_abs >= 0 and self.eps_rel >= 0,
              "tolerances must be nonnegative")
        check(0 < self.alpha < 2, "alpha must lie within (0, 2)")
        check(self.rho > 0 and self.sigma > 0, "rho and sigma must be > 0")
        check(self.max_iter >= 1, "max_iter must be positive")

    def replace(self, **kwargs):
        """
        Return a copy with some settings changed.

        :rtype: QpSettings
        """
        values = dict(self.__dict__)
        values.update(kwargs)
        return QpSettings(**values)

    def __repr__(self):
        return "<QpSettings eps_abs=%g max_iter=%d>" % (
            self.eps_abs, self.max_iter)


# Defaults for the proximal subproblems of the games.
STRONGLY_CONVEX_SETTINGS = QpSettings(eps_abs=1e-8)


def _inf_norm(v):
    return float(np.max(np.abs(v), initial=0.0))


def _limit(norms):
    norms = np.where(norms < SCALING_MIN, 1.0, norms)
    return np.minimum(norms, SCALING_MAX)


def _col_max(M):
    if M.shape[0] == 0:
        return np.zeros(M.shape[1])
    return abs(M).max(axis=0).toarray().ravel()


def _row_max(M):
    if M.shape[1] == 0:
        return np.zeros(M.shape[0])
    return abs(M).max(axis=1).toarray().ravel()


def check_psd(P):
    """
    Raise ValueError unless P is symmetric positive semidefinite.

    Diagonally dominant matrices with a nonnegative diagonal pass at once,
    small matrices are checked through their eigenvalues. Larger matrices
    are only checked for symmetry and their diagonal.
    """
    P = sp.csc_matrix(P)
    scale = max(1.0, _inf_norm(P.data) if P.nnz else 0.0)
    asym = abs(P - P.T)
    check(asym.nnz == 0 or asym.max() <= 1e-12 * scale,
          "P must be symmetric")
    diag = P.diagonal()
    check(np.all(diag >= -PSD_TOL * scale),
          "P must have a nonnegative diagonal")
    off = np.asarray(abs(P).sum(axis=1)).ravel() - np.abs(diag)
    if np.all(diag + PSD_TOL * scale >= off):
        return
    if P.shape[0] <= DENSE_PSD_LIMIT:
        lowest = np.linalg.eigvalsh(P.toarray()).min()
        check(lowest >= -PSD_TOL * scale,
              "P must be positive semidefinite (eigenvalue %g)" % (lowest,))
    else:
        logger.debug("Skipping the PSD check of a %d x %d matrix",
                     P.shape[0], P.shape[1])


class QpSolver(object):
    """
    ADMM workspace for one constraint set.

    :param problem: the problem to solve.
    :type problem: QpProblem
    :param settings: solver settings.
    :type settings: QpSettings
    """

    def __init__(self, problem, settings=None):
        self.problem = problem
        self.settings = settings or QpSettings()
        self.n, self.m = problem.n, problem.m
        self._scale()
        self.rho = self.settings.rho
        self._rho_vec = self._rho_vector(self.rho)
        self._factorize()
        self.x = np.zeros(self.n)
        self.z = np.zeros(self.m)
        self.y = np.zeros(self.m)

    #
    # setup
    #

    def _scale(self):
        p, s = self.problem, self.settings
        P, A, q = p.P.copy(), p.A.copy(), p.q.copy()
        D = np.ones(self.n)
        E = np.ones(self.m)
        c = 1.0
        for _ in range(s.scaling):
            d = 1.0 / np.sqrt(_limit(np.maximum(_col_max(P), _col_max(A))))
            e = 1.0 / np.sqrt(_limit(_row_max(A)))
            Dk = sp.diags(d)
            P = Dk.dot(P).dot(Dk)
            A = sp.diags(e).dot(A).dot(Dk)
            q = d * q
            D *= d
            E *= e
            cost = max(np.mean(_col_max(P)) if self.n else 0.0,
                       _inf_norm(q))
            gamma = 1.0 / _limit(np.array([cost]))[0]
            P = P * gamma
            q = q * gamma
            c *= gamma
        self.D, self.E, self.c = D, E, c
        self.Ps = sp.csc_matrix(P)
        self.As = sp.csc_matrix(A)
        self.AsT = sp.csc_matrix(self.As.T)
        self.qs = q
        with np.errstate(invalid="ignore"):
            self.ls = E * p.l
            self.us = E * p.u
        self._equality = (self.us - self.ls) < RHO_EQ_TOL
        self._free = np.isinf(self.ls) & np.isinf(self.us)

    def _rho_vector(self, rho):
        rho_vec = np.full(self.m, rho)
        rho_vec[self._equality] = RHO_EQ_FACTOR * rho
        rho_vec[self._free] = RHO_MIN
        return np.clip(rho_vec, RHO_MIN, RHO_MAX)

    def _factorize(self):
        sigma = self.settings.sigma
        top = self.Ps + sigma * sp.identity(self.n, format="csc")
        if self.m:
            K = sp.bmat([[top, self.AsT],
                         [self.As, sp.diags(-1.0 / self._rho_vec)]],
                        format="csc")
        else:
            K = sp.csc_matrix(top)
        try:
            self._kkt = spla.splu(K)
        except RuntimeError as exc:
            raise SolverError("cannot factorize the KKT matrix: %s" % (exc,))

    #
    # updates
    #

    def update(self, q=None):
        """
        Change the linear cost; the scaling and factorization are kept.
        """
        if q is not None:
            q = np.asarray(q, dtype=float)
            check(q.shape == (self.n,), "q must have %d entries" % (self.n,))
            self.problem = self.problem.__class__(
                self.problem.P, q, self.problem.A, self.problem.l,
                self.problem.u, offset=self.problem.offset,
                labels=self.problem.labels)
            self.qs = self.c * self.D * q

    def warm_start(self, x=None, y=None):
        """
        Start the next solve from a primal and/or dual guess.
        """
        if x is not None:
            self.x = np.asarray(x, dtype=float) / self.D
            self.z = np.clip(self.As.dot(self.x), self.ls, self.us)
        if y is not None:
            self.y = self.c * np.asarray(y, dtype=float) / self.E

    #
    # residuals, in the units of the original problem
    #

    def _residuals(self, x, z, y):
        Ax = self.As.dot(x)
        Px = self.Ps.dot(x)
        ATy = self.AsT.dot(y)
        prim = _inf_norm((Ax - z) / self.E) if self.m else 0.0
        dual = _inf_norm((Px + self.qs + ATy) / self.D) / self.c
        eps_abs, eps_rel = self.settings.eps_abs, self.settings.eps_rel
        eps_prim = eps_abs + eps_rel * max(
            _inf_norm(Ax / self.E), _inf_norm(z / self.E))
        eps_dual = eps_abs + eps_rel * max(
            _inf_norm(Px / self.D), _inf_norm(ATy / self.D),
            _inf_norm(self.qs / self.D)) / self.c
        return prim, dual, eps_prim, eps_dual

    def _primal_infeasible(self, dy):
        eps = self.settings.eps_prim_inf
        v = self.E * dy
        norm = _inf_norm(v)
        if norm <= eps:
            return False
        v = v / norm
        p = self.problem
        pos, neg = np.maximum(v, 0.0), np.minimum(v, 0.0)
        fin_u, fin_l = np.isfinite(p.u), np.isfinite(p.l)
        if np.any(pos[~fin_u] > eps) or np.any(neg[~fin_l] < -eps):
            return False
        lhs = p.u[fin_u].dot(pos[fin_u]) + p.l[fin_l].dot(neg[fin_l])
        if lhs >= -eps:
            return False
        return _inf_norm(p.A.T.dot(v)) < eps

    def _dual_infeasible(self, dx):
        eps = self.settings.eps_dual_inf
        w = self.D * dx
        norm = _inf_norm(w)
        if norm <= eps:
            return False
        w = w / norm
        p = self.problem
        if p.q.dot(w) >= -eps:
            return False
        if _inf_norm(p.P.dot(w)) >= eps:
            return False
        Aw = p.A.dot(w)
        if np.any(np.isfinite(p.u) & (Aw > eps)):
            return False
        if np.any(np.isfinite(p.l) & (Aw < -eps)):
            return False
        return True

    #
    # adaptive step size
    #

    def _adapt_rho(self, x, z, y):
        Ax = self.As.dot(x)
        Px = self.Ps.dot(x)
        ATy = self.AsT.dot(y)
        tiny = 1e-30
        prim = _inf_norm(Ax - z) / max(_inf_norm(Ax), _inf_norm(z), tiny)
        dual = _inf_norm(Px + self.qs + ATy) / max(
            _inf_norm(Px), _inf_norm(ATy), _inf_norm(self.qs), tiny)
        rho = self.rho * np.sqrt(prim / max(dual, tiny))
        rho = float(np.clip(rho, RHO_MIN, RHO_MAX))
        factor = self.settings.adaptive_rho_tolerance
        if rho > factor * self.rho or rho < self.rho / factor:
            logger.debug("rho %g -> %g", self.rho, rho)
            self.rho = rho
            self._rho_vec = self._rho_vector(rho)
            self._factorize()
            return True
        return False

    #
    # polishing
    #

    def _polish(self, x, z, y, eps_prim, eps_dual):
        """
        Solve the equality constrained problem of the guessed active set.

        Return (x, z, y) when the polished point is optimal within the
        tolerances, None otherwise.
        """
        s = self.settings
        eq = self._equality
        low = ~eq & (z - self.ls < -y)
        upp = ~eq & (self.us - z < y)
        active = np.nonzero(eq | low | upp)[0]
        key = (tuple(np.nonzero(low)[0]), tuple(np.nonzero(upp)[0]))
        if key == getattr(self, "_last_polish", None):
            return None
        self._last_polish = key

        target = np.where(upp, self.us, self.ls)[active]
        Ared = self.As[active]
        k = len(active)
        delta = s.delta
        K = sp.bmat([[self.Ps, Ared.T], [Ared, None]], format="csc") \
            if k else sp.csc_matrix(self.Ps)
        reg = sp.diags(np.concatenate([np.full(self.n, delta),
                                       np.full(k, -delta)]))
        try:
            lu = spla.splu(sp.csc_matrix(K + reg))
        except RuntimeError:
            return None
        rhs = np.concatenate([-self.qs, target])
        w = np.concatenate([x, y[active]])
        for _ in range(s.polish_refine_iter + 1):
            w = w + lu.solve(rhs - K.dot(w))
        if not np.all(np.isfinite(w)):
            return None

        xp = w[:self.n]
        yp = np.zeros(self.m)
        yp[active] = w[self.n:]
        Ax = self.As.dot(xp)
        prim = _inf_norm(np.maximum(np.maximum(self.ls - Ax, Ax - self.us),
                                    0.0) / self.E) if self.m else 0.0
        dual = _inf_norm((self.Ps.dot(xp) + self.qs +
                          self.AsT.dot(yp)) / self.D) / self.c
        unscaled = self.E * yp / self.c
        wrong_sign = max(_inf_norm(np.maximum(unscaled[low], 0.0)),
                         _inf_norm(np.minimum(unscaled[upp], 0.0)))
        if prim <= eps_prim and dual <= eps_dual and wrong_sign <= eps_dual:
            return xp, np.clip(Ax, self.ls, self.us), yp
        logger.debug("Polish rejected: prim %.2e dual %.2e sign %.2e",
                     prim, dual, wrong_sign)
        return None

    #
    # main loop
    #

    def solve(self):
        """
        Run ADMM from the current iterates.

        :rtype: QpSolution
        """
        s = self.settings
        n = self.n
        alpha, sigma = s.alpha, s.sigma
        x, z, y = self.x, self.z, self.y
        self._last_polish = None
        status = QpStatus.ITERATION_LIMIT
        polished = False
        rho_updates = 0
        prim = dual = np.inf
        iteration = 0

        for iteration in range(1, s.max_iter + 1):
            rho_vec = self._rho_vec
            if self.m:
                sol = self._kkt.solve(np.concatenate(
                    [sigma * x - self.qs, z - y / rho_vec]))
                x_tilde = sol[:n]
                z_tilde = z + (sol[n:] - y) / rho_vec
            else:
                x_tilde = self._kkt.solve(sigma * x - self.qs)
                z_tilde = z
            x_new = alpha * x_tilde + (1.0 - alpha) * x
            z_relaxed = alpha * z_tilde + (1.0 - alpha) * z
            z_new = np.clip(z_relaxed + y / rho_vec, self.ls, self.us)
            y_new = y + rho_vec * (z_relaxed - z_new)
            dx, dy = x_new - x, y_new - y
            x, z, y = x_new, z_new, y_new

            if iteration % s.check_interval and iteration != 1:
                continue

            prim, dual, eps_prim, eps_dual = self._residuals(x, z, y)
            if prim <= eps_prim and dual <= eps_dual:
                status = QpStatus.OPTIMAL
                if s.polish:
                    result = self._polish(x, z, y, eps_prim, eps_dual)
                    if result is not None:
                        x, z, y = result
                        polished = True
                        prim, dual, _, _ = self._residuals(x, z, y)
                break
            if self._primal_infeasible(dy):
                status = QpStatus.PRIMAL_INFEASIBLE
                break
            if self._dual_infeasible(dx):
                status = QpStatus.DUAL_INFEASIBLE
                break

            trigger = max(s.polish_trigger, 1e3 * max(eps_prim, eps_dual))
            if (s.polish and iteration % s.polish_interval == 0 and
                    prim <= trigger and dual <= trigger):
                result = self._polish(x, z, y, eps_prim, eps_dual)
                if result is not None:
                    x, z, y = result
                    polished = True
                    status = QpStatus.OPTIMAL
                    prim, dual, _, _ = self._residuals(x, z, y)
                    break

            if s.adaptive_rho and iteration % s.adaptive_rho_interval == 0:
                if self._adapt_rho(x, z, y):
                    rho_updates += 1

        self.x, self.z, self.y = x, z, y
        if status in (QpStatus.PRIMAL_INFEASIBLE, QpStatus.DUAL_INFEASIBLE):
            x_out = y_out = None
        else:
            x_out = self.D * x
            y_out = self.E * y / self.c
        logger.debug("QP %dx%d: %s after %d iterations (polished=%s)",
                     self.n, self.m, status.value, iteration, polished)
        return QpSolution(self.problem, x_out, y_out, status, iteration,
                          prim, dual, polished=polished,
                          rho_updates=rho_updates)


def raise_for_status(solution):
    """
    Raise the error matching a non optimal solution status.

    :return: the solution, when optimal.
    :rtype: QpSolution
    """
    if solution.status is QpStatus.OPTIMAL:
        return solution
    if solution.status is QpStatus.PRIMAL_INFEASIBLE:
        raise InfeasibleProblemError(
            "the problem is primal infeasible", solution=solution)
    if solution.status is QpStatus.DUAL_INFEASIBLE:
        raise SolverError("the problem is unbounded", solution=solution)
    raise IterationLimitError(
        "no solution within %d iterations (prim %.2e, dual %.2e)" % (
            solution.iterations, solution.prim_res, solution.dual_res),
        solution=solution)


def solve_qp(problem, settings=None, x0=None, y0=None):
    """
    Solve a convex quadratic program.

    :param problem: the problem to solve.
    :type problem: QpProblem
    :param settings: solver settings, QpSettings() by default.
    :type settings: QpSettings
    :param x0: optional primal starting point.
    :param y0: optional dual starting point.
    :raise ValueError: if P is not symmetric positive semidefinite.
    :raise InfeasibleProblemError: on a certificate of infeasibility.
    :raise IterationLimitError: if max_iter is reached.
    :rtype: QpSolution
    """
    check_psd(problem.P)
    solver = QpSolver(problem, settings)
    solver.warm_start(x0, y0)
    return raise_for_status(solver.solve())


def solve_strongly_convex(problem, tau, center, settings=None, x0=None,
                          y0=None):
    """
    Solve `problem` plus the proximal term tau/2 ||x - center||^2.

    The minimizer is unique; the default tolerance is tighter than the
    one of solve_qp.

    :param problem: the problem to regularize.
    :type problem: QpProblem
    :param tau: proximal weight, positive.
    :type tau: float
    :param center: proximal center.
    :type center: numpy.ndarray
    :rtype: QpSolution
    """
    check(tau > 0, "tau must be positive")
    regularized = problem.with_proximal_term(tau, center)
    if x0 is None:
        x0 = center
    return solve_qp(regularized, settings or STRONGLY_CONVEX_SETTINGS,
                    x0=x0, y0=y0)
