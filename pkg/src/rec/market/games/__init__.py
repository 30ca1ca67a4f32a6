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
Decentralized scheduling: the billing games of the two market designs and
the proximal decomposition that solves them.
"""
from rec.market.games.gnep import (
    GnepReport,
    PriceVector,
    SharedConstraintGame,
    check_gne,
    pda_shared_solve,
    tau_bound_gnep,
)
from rec.market.games.nep import (
    NashGame,
    check_nash,
    pda_solve,
    tau_bound_nep,
)
from rec.market.games.proximal import EquilibriumReport, GameConfig

__all__ = ['EquilibriumReport', 'GameConfig', 'GnepReport', 'NashGame',
           'PriceVector', 'SharedConstraintGame', 'check_gne', 'check_nash',
           'pda_shared_solve', 'pda_solve', 'tau_bound_gnep',
           'tau_bound_nep']
