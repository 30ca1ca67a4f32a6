# -*- coding: utf-8 -*-
# decorators.py
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
Useful decorators for the market package.
"""
import logging
import time

from functools import wraps


logger = logging.getLogger(__name__)


def timed(stage):
    """
    Decorator, for timing the stages of a run.

    The wall-clock time of every call of the decorated method is appended
    as a (stage, seconds) pair to the `timings` list of the instance, and
    logged. Calls that raise are timed too.

    :param stage: the name under which the time is recorded.
    :type stage: str
    """
    def decorator(f):

        @wraps(f)
        def wrapper(self, *args, **kwargs):
            started = time.time()
            try:
                return f(self, *args, **kwargs)
            finally:
                elapsed = time.time() - started
                self.timings.append((stage, elapsed))
                logger.info("Stage %s took %.3fs", stage, elapsed)
        return wrapper

    return decorator
