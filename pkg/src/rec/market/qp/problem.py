# -*- coding: utf-8 -*-
# problem.py
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
Standard form of the quadratic programs solved by the package:

    minimize    1/2 x' P x + q' x + offset
    subject to  l <= A x <= u

Simple variable bounds are carried as rows of A. Every row has a label
(usually a constraint family) so that callers can pick the multipliers
they care about out of a solution.
"""
from enum import Enum

import numpy as np
import scipy.sparse as sp

from rec.market.utils import check


class QpStatus(Enum):
    OPTIMAL = "optimal"
    PRIMAL_INFEASIBLE = "infeasible"
    DUAL_INFEASIBLE = "unbounded"
    ITERATION_LIMIT = "iteration-limit"


class QpProblem(object):
    """
    A convex quadratic program in standard form.

    :ivar P: symmetric positive semidefinite matrix, n x n.
    :ivar q: linear cost, length n.
    :ivar A: constraint matrix, m x n.
    :ivar l: lower bounds of A x, length m, may hold -inf.
    :ivar u: upper bounds of A x, length m, may hold +inf.
    :ivar offset: constant term of the objective.
    :ivar labels: label of every row of A.
    """

    def __init__(self, P, q, A=None, l=None, u=None, offset=0.0,
                 labels=None):
        q = np.asarray(q, dtype=float).ravel()
        n = len(q)
        if P is None:
            P = sp.csc_matrix((n, n))
        if A is None:
            A = sp.csc_matrix((0, n))
            l = np.zeros(0)
            u = np.zeros(0)
        self.P = sp.csc_matrix(P, dtype=float)
        self.q = q
        self.A = sp.csc_matrix(A, dtype=float)
        self.l = np.asarray(l, dtype=float).ravel()
        self.u = np.asarray(u, dtype=float).ravel()
        self.offset = float(offset)
        m = self.A.shape[0]
        self.labels = tuple(labels) if labels is not None else (None,) * m

        check(self.P.shape == (n, n), "P must be %d x %d" % (n, n))
        check(self.A.shape[1] == n, "A must have %d columns" % (n,))
        check(len(self.l) == m and len(self.u) == m,
              "l and u must have %d entries" % (m,))
        check(len(self.labels) == m, "every row needs a label")
        check(not np.any(self.l > self.u), "l must not exceed u")
        check(not np.any(np.isnan(self.l)) and not np.any(np.isnan(self.u)),
              "bounds must not be nan")

    @classmethod
    def from_constraints(cls, P, q, A, lower, upper, lb, ub, offset=0.0,
                         labels=None, bound_labels=None):
        """
        Build a problem out of general rows plus simple variable bounds.

        Bounds that are infinite on both sides produce no row.
        """
        q = np.asarray(q, dtype=float).ravel()
        n = len(q)
        lb = np.asarray(lb, dtype=float)
        ub = np.asarray(ub, dtype=float)
        bounded = np.nonzero(np.isfinite(lb) | np.isfinite(ub))[0]
        eye = sp.identity(n, format="csr")[bounded]
        A = sp.vstack([sp.csr_matrix(A), eye], format="csc")
        l = np.concatenate([np.asarray(lower, dtype=float), lb[bounded]])
        u = np.concatenate([np.asarray(upper, dtype=float), ub[bounded]])
        m0 = len(lower)
        labels = list(labels) if labels is not None else [None] * m0
        if bound_labels is None:
            bound_labels = [None] * n
        labels += [bound_labels[k] for k in bounded]
        return cls(P, q, A, l, u, offset=offset, labels=labels)

    @property
    def n(self):
        return len(self.q)

    @property
    def m(self):
        return self.A.shape[0]

    def objective(self, x):
        """
        Return the objective value at x.
        """
        return float(0.5 * x.dot(self.P.dot(x)) + self.q.dot(x) +
                     self.offset)

    def rows(self, label):
        """
        Return the indices of the rows carrying a label.
        """
        return np.array([k for k, lab in enumerate(self.labels)
                         if lab == label], dtype=int)

    def with_proximal_term(self, tau, center):
        """
        Return this problem plus tau/2 ||x - center||^2.

        :rtype: QpProblem
        """
        center = np.asarray(center, dtype=float)
        P = self.P + tau * sp.identity(self.n, format="csc")
        q = self.q - tau * center
        offset = self.offset + 0.5 * tau * center.dot(center)
        return QpProblem(P, q, self.A, self.l, self.u, offset=offset,
                         labels=self.labels)

    def __repr__(self):
        return "<QpProblem n=%d m=%d>" % (self.n, self.m)


class QpSolution(object):
    """
    Result of a solve.

    The multipliers y satisfy P x + q + A' y = 0 at optimality: y is
    negative on active lower bounds and positive on active upper bounds.
    """

    def __init__(self, problem, x, y, status, iterations, prim_res,
                 dual_res, polished=False, rho_updates=0):
        self.problem = problem
        self.x = x
        self.y = y
        self.status = status
        self.iterations = iterations
        self.prim_res = prim_res
        self.dual_res = dual_res
        self.polished = polished
        self.rho_updates = rho_updates

    @property
    def objective(self):
        if self.x is None:
            return None
        return self.problem.objective(self.x)

    @property
    def optimal(self):
        return self.status is QpStatus.OPTIMAL

    def duals(self, label):
        """
        Return the multipliers of the rows carrying a label.
        """
        return self.y[self.problem.rows(label)]

    def kkt_residuals(self):
        """
        Return (stationarity, primal violation, complementarity gap) in
        the infinity norm.
        """
        p = self.problem
        x, y = self.x, self.y
        stationarity = p.P.dot(x) + p.q + p.A.T.dot(y)
        Ax = p.A.dot(x)
        violation = np.maximum(np.maximum(p.l - Ax, Ax - p.u), 0.0)
        y_low = np.minimum(y, 0.0)
        y_upp = np.maximum(y, 0.0)
        with np.errstate(invalid="ignore"):
            gap_low = np.where(np.isfinite(p.l), y_low * (Ax - p.l), 0.0)
            gap_upp = np.where(np.isfinite(p.u), y_upp * (p.u - Ax), 0.0)
        # multipliers on infinite sides are a violation of their own
        wrong = np.where(np.isfinite(p.l), 0.0, -y_low) + \
            np.where(np.isfinite(p.u), 0.0, y_upp)

        def norm(v):
            return float(np.max(np.abs(v), initial=0.0))

        return (norm(stationarity), norm(violation),
                max(norm(gap_low), norm(gap_upp), norm(wrong)))

    def __repr__(self):
        return "<QpSolution %s iter=%d obj=%s>" % (
            self.status.value, self.iterations, self.objective)
