# -*- coding: utf-8 -*-
# interfaces.py
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
Interfaces for the community games.
"""
from zope.interface import Interface, Attribute


class IGame(Interface):
    """
    I am a game among the members of a community: each player minimizes
    its bill over its individual constraint set.

    Strategies are passed around as lists of numpy vectors, one per player,
    laid out as the player's VariableLayout.
    """
    N = Attribute('The number of players.')
    layouts = Attribute('The VariableLayout of every player.')
    has_price = Attribute('True if a price player enforces shared '
                          'constraints.')

    def constraints(self, i):
        """
        Return the individual constraint set of a player.

        :param i: the player.
        :type i: int
        :rtype: LinearConstraintBlock
        """

    def hessian(self, i):
        """
        Return the Hessian of the bill of player i in its own strategy.

        :rtype: scipy.sparse matrix
        """

    def linear_cost(self, i, vectors, price=None):
        """
        Return the linear part of the bill of player i in its own strategy,
        rivals frozen at `vectors`, plus the price term if any.

        :rtype: numpy.ndarray
        """

    def bill(self, i, vectors):
        """
        Return the bill of player i.

        :rtype: float
        """

    def total_cost(self, vectors):
        """
        Return the total cost of the community.

        :rtype: float
        """

    def potential(self, vectors):
        """
        Return the value of the (weighted) potential of the game.

        :rtype: float
        """

    def shared_residual(self, vectors):
        """
        Return the residual of the shared constraints, None if there are
        none.
        """


class IProgressObserver(Interface):
    """
    I get notified at every outer iteration of an equilibrium algorithm.
    """

    def outer_step(self, row):
        """
        Called with the TraceRow of an outer iteration that just ended.

        :param row: the trace row.
        :type row: TraceRow
        """
