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
Small helpers shared by the whole package.
"""
import hashlib
import json

import numpy as np


def check(condition, message="Assertion failed"):
    """
    Raise ValueError with `message` if `condition` does not hold.

    :param condition: the condition to verify.
    :type condition: bool
    :param message: the error message.
    :type message: str
    """
    if not condition:
        raise ValueError(message)


def as_profile(values, length=None):
    """
    Return an immutable tuple of floats out of a sequence of numbers.

    :param values: the sequence, or a scalar to broadcast over `length`.
    :param length: the expected length, if known.
    :rtype: tuple of float
    """
    if np.isscalar(values):
        check(length is not None, "Cannot broadcast a scalar profile")
        return tuple([float(values)] * length)
    return tuple(float(v) for v in values)


def accumulator(fun, lim):
    """
    A simple accumulator that uses a closure and a mutable
    object to collect items.
    When the count of items is greater than `lim`, the
    collection is flushed after invoking the function `fun`
    over each one of them.

    The returned accumulator can also be flushed at any moment
    by passing a boolean as a second parameter.

    :param fun: the function to call over the collection
                when its size is greater than `lim`
    :type fun: callable
    :param lim: the turning point for the collection
    :type lim: int
    :rtype: function

    >>> acc = accumulator(print, 2)
    >>> acc(1)
    >>> acc(2)
    1
    2
    >>> acc(3, flush=True)
    3
    """
    KEY = "items"
    _o = {KEY: []}

    def _accumulator(item, flush=False):
        collection = _o[KEY]
        if item is not None:
            collection.append(item)
        if len(collection) >= lim or flush:
            for thing in collection:
                fun(thing)
            _o[KEY] = []

    return _accumulator


def fingerprint(document):
    """
    Return a stable hex digest for a json-serializable document.

    :param document: the document to digest.
    :type document: dict
    :rtype: str
    """
    dump = json.dumps(document, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(dump.encode("utf-8")).hexdigest()
