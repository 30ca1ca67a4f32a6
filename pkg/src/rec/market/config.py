# -*- coding: utf-8 -*-
# config.py
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
Environment switches and package-wide defaults.
"""
import os


# Set to anything to run pool jobs sequentially in the calling thread.
DEBUG_ENV = "REC_MARKET_DEBUG"

# Size of the worker pool used for independent solves.
THREADS_ENV = "REC_MARKET_THREADS"
DEFAULT_THREADS = 4

# Set to 1 to run the full-size acceptance suites.
SLOW_TESTS_ENV = "REC_MARKET_SLOW_TESTS"

# Absolute tolerance when auditing constraints, in kWh.
FEASIBILITY_TOL = 1e-6

# Multiplier applied over the theoretical regularization bounds.
TAU_SAFETY_FACTOR = 1.05


def debug_enabled():
    """
    Return True if pool jobs must run sequentially.
    """
    return bool(os.environ.get(DEBUG_ENV))


def pool_size():
    """
    Return the configured number of worker threads.

    :rtype: int
    """
    try:
        size = int(os.environ.get(THREADS_ENV, DEFAULT_THREADS))
    except ValueError:
        size = DEFAULT_THREADS
    return max(1, size)


def slow_tests_enabled():
    """
    Return True if the full-size test suites were requested.
    """
    return os.environ.get(SLOW_TESTS_ENV, "0") != "0"
