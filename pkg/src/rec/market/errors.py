# -*- coding: utf-8 -*-
# errors.py
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
Exceptions raised by rec.market.

Everything derives from RecMarketError, so that front ends can catch a
single class. The command line maps the main branches to exit codes.
"""


class RecMarketError(Exception):
    """
    Base class for all the errors of this package.
    """


#
# Scenario data
#

class ScenarioError(RecMarketError):
    """
    The scenario could not be read or is not valid.
    """


class ParseError(ScenarioError):
    """
    The scenario file is malformed.
    """


class ValidationError(ScenarioError):
    """
    A scenario field violates one of its invariants.

    :ivar member: id of the offending member, or None for community data.
    :ivar field: name of the offending field.
    """

    def __init__(self, message, member=None, field=None):
        if member is not None:
            message = "member %s: %s" % (member, message)
        ScenarioError.__init__(self, message)
        self.member = member
        self.field = field


class InfeasibleApplianceError(ValidationError):
    """
    An appliance cannot consume its daily energy inside its window.
    """


class DesignMismatchError(RecMarketError):
    """
    An operation was given data of the wrong market design.
    """


#
# Numerics
#

class SolverError(RecMarketError):
    """
    The QP solver did not return an optimal point.

    :ivar solution: the QpSolution reached when giving up, if any.
    """

    def __init__(self, message, solution=None):
        RecMarketError.__init__(self, message)
        self.solution = solution


class InfeasibleProblemError(SolverError):
    """
    The QP solver found a certificate of primal infeasibility.
    """


class IterationLimitError(SolverError):
    """
    The QP solver hit its iteration cap.
    """


class ConvergenceError(RecMarketError):
    """
    An equilibrium algorithm hit its iteration cap.

    :ivar report: the partial report with the last iterate and trace.
    """

    def __init__(self, message, report=None):
        RecMarketError.__init__(self, message)
        self.report = report


class UndefinedMetricError(RecMarketError):
    """
    A ratio has a zero denominator.
    """


class ComparisonError(RecMarketError):
    """
    Runs that do not share a scenario were asked to be compared.
    """
