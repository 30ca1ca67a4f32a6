# -*- coding: utf-8 -*-
# utils.py
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
Requirement lists for setup.py.
"""


def parse_requirements(path='pkg/requirements.pip'):
    """
    Return the requirements of a pip requirements file, without comments
    and blank lines.

    @param path: the requirements file
    @type path: str
    """
    with open(path, 'r') as f:
        lines = [line.split('#', 1)[0].strip() for line in f]
    return [line for line in lines if line]
