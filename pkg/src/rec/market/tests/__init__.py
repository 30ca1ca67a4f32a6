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
Base classes and small communities for the market tests.
"""
import numpy as np

from twisted.trial import unittest

from rec.market import config
from rec.market.scenario import (
    Appliance,
    Battery,
    Horizon,
    MemberAssets,
    Scenario,
    Tariffs,
    validate_scenario,
)


ALPHA = 0.001

SLOW_REASON = "set %s=1 to run the full-size suites" % (
    config.SLOW_TESTS_ENV,)


def flat_tariffs(T, lambda_imp=0.16, lambda_exp=0.04, lambda_iloc=0.13,
                 lambda_eloc=0.05, alpha=ALPHA, beta=0.0):
    """
    Tariffs constant over the horizon.
    """
    return Tariffs(tuple([lambda_imp] * T), tuple([lambda_exp] * T),
                   tuple([lambda_iloc] * T), tuple([lambda_eloc] * T),
                   alpha, beta)


def member(mid, base_load, generation=None, appliances=(), battery=None,
           conn_limit=10.0):
    base_load = tuple(float(d) for d in base_load)
    if generation is None:
        generation = [0.0] * len(base_load)
    return MemberAssets(mid, base_load, tuple(float(g) for g in generation),
                        tuple(appliances), battery, conn_limit)


def community(members, dt=1.0, **tariffs):
    """
    A validated scenario out of members, with flat tariffs.
    """
    T = len(members[0].base_load)
    return validate_scenario(Scenario(Horizon(T, dt), flat_tariffs(
        T, **tariffs), tuple(members)))


def consumer_producer(T=1, alpha=ALPHA):
    """
    A consumer of 2 kWh per step and a producer of 1 kWh per step.
    """
    return community([
        member("consumer", [2.0] * T),
        member("producer", [0.0] * T, [1.0] * T),
    ], alpha=alpha)


def flexible_pair(alpha=0.01):
    """
    Two members of two steps, each with one shiftable appliance.
    """
    return community([
        member("a", [1.0, 0.0], [0.0, 0.5],
               appliances=[Appliance((1, 1), 1.0, 1.0)]),
        member("b", [0.0, 1.0], [0.3, 0.0],
               appliances=[Appliance((1, 1), 0.8, 1.0)]),
    ], alpha=alpha)


def grid(upper, step=0.1):
    """
    The multiples of step from 0 to upper.
    """
    return [round(step * k, 10) for k in range(int(round(upper / step)) + 1)]


def pair_loads(x, y):
    """
    Net loads of flexible_pair with x and y kWh of the appliances run in
    the first step.
    """
    return [np.array([1.0 + x, 0.5 - x]), np.array([y - 0.3, 1.8 - y])]


def commodity_costs(scenario, loads):
    tariffs = scenario.tariffs
    return [float(np.dot(tariffs.lambda_imp, np.maximum(l, 0.0)) -
                  np.dot(tariffs.lambda_exp, np.maximum(-l, 0.0)))
            for l in loads]


def cp_bills(scenario, loads):
    alpha = scenario.tariffs.alpha
    L = np.sum(loads, axis=0)
    return [c + alpha * float(l.dot(L))
            for c, l in zip(commodity_costs(scenario, loads), loads)]


def cp_potential(scenario, loads):
    alpha = scenario.tariffs.alpha
    L = np.sum(loads, axis=0)
    return sum(commodity_costs(scenario, loads)) + 0.5 * alpha * (
        L.dot(L) + sum(l.dot(l) for l in loads))


def d1_total_cost(scenario, loads):
    L = np.sum(loads, axis=0)
    return sum(commodity_costs(scenario, loads)) + \
        scenario.tariffs.alpha * L.dot(L)


def battery_trio(alpha=0.01):
    """
    Three members of three steps: a battery owner with PV, a flexible
    consumer and a plain consumer.
    """
    return community([
        member("pv", [0.2, 0.2, 0.6], [1.5, 1.0, 0.0],
               battery=Battery(1.0, 1.0, 2.0, 1.0)),
        member("flex", [0.5, 0.5, 0.5],
               appliances=[Appliance((1, 1, 1), 1.5, 1.0)]),
        member("plain", [0.4, 0.8, 0.3]),
    ], alpha=alpha)


def scaled_tariffs(scenario, factor):
    """
    The same scenario with every price and grid coefficient times factor.
    """
    tariffs = scenario.tariffs
    prices = [tuple(factor * p for p in series) for series in tariffs[:4]]
    return scenario._replace(tariffs=Tariffs(
        *(prices + [factor * tariffs.alpha, factor * tariffs.beta])))


def slow_tests():
    return config.slow_tests_enabled()


def skip_unless_slow():
    if not slow_tests():
        raise unittest.SkipTest(SLOW_REASON)


class MarketTestCase(unittest.TestCase):
    """
    TestCase with numerical assertions.
    """

    def assertAllClose(self, actual, expected, atol=1e-6, msg=None):
        actual = np.asarray(actual, dtype=float)
        expected = np.asarray(expected, dtype=float)
        if actual.shape != expected.shape or not np.allclose(
                actual, expected, rtol=0.0, atol=atol):
            raise self.failureException(
                msg or "%r != %r within %g" % (actual, expected, atol))

    def assertClose(self, actual, expected, atol=1e-6, msg=None):
        if not abs(float(actual) - float(expected)) <= atol:
            raise self.failureException(
                msg or "%r != %r within %g" % (actual, expected, atol))

    def assertRelClose(self, actual, expected, rtol=1e-4, msg=None):
        scale = max(1.0, abs(float(expected)))
        self.assertClose(actual, expected, rtol * scale, msg)
