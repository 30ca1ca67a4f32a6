# -*- coding: utf-8 -*-
# __init__.py
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
Convex quadratic programming for the community solvers.
"""
from rec.market.qp.problem import QpProblem, QpSolution, QpStatus
from rec.market.qp.solver import (
    QpSettings,
    QpSolver,
    solve_qp,
    solve_strongly_convex,
)

__all__ = ['QpProblem', 'QpSolution', 'QpStatus', 'QpSettings', 'QpSolver',
           'solve_qp', 'solve_strongly_convex']
