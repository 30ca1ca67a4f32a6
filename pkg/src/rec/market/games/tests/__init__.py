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
Tests for the community games.
"""
import numpy as np

from rec.market.games.diagnostics import sample_feasible_profile
from rec.market.scenario import Appliance
from rec.market.tests import community, member


def shiftable_member(alpha=0.1):
    """
    One member of two steps with 2 kWh to place anywhere, at up to 2 kW.
    """
    return community([
        member("m", [0.0, 0.0], appliances=[Appliance((1, 1), 2.0, 2.0)]),
    ], alpha=alpha)


def sample_profiles(scenario, design, count, seed=5):
    """
    Random feasible profiles of the individual sets.
    """
    rng = np.random.default_rng(seed)
    return [sample_feasible_profile(scenario, design, rng)
            for _ in range(count)]


def unilateral_deviations(samples):
    """
    Yield (i, profile, deviated): member i of profile plays its schedule
    of another sample.
    """
    for profile in samples:
        for other in samples:
            if other is profile:
                continue
            for i in range(len(profile)):
                yield i, profile, profile.replace(i, other[i])
