# -*- coding: utf-8 -*-
# test_model.py
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
Tests for the member variable layout, the constraint sets and profiles.
"""
import numpy as np

from rec.market.errors import DesignMismatchError
from rec.market.model import (
    APPLIANCE_ENERGY,
    COMMUNITY_BALANCE,
    COMMUNITY_EXPORT,
    SOC_RETURN,
    STATE_OF_CHARGE,
    CommunityProfile,
    Design,
    Schedule,
    balance_operator,
    check_feasibility,
    commodity_cost_vector,
    embed_in_d2,
    individual_constraints,
    net_load,
    net_load_operator,
    shared_constraint_residual,
    split_net_load,
    variable_layout,
)
from rec.market.scenario import Appliance, Battery, Horizon
from rec.market.tests import (
    MarketTestCase,
    community,
    consumer_producer,
    flat_tariffs,
    member,
)


DAY = Horizon(24, 1.0)


def equipped_member(T=24):
    return member("equipped", [0.5] * T, [0.0] * T,
                  appliances=[Appliance(tuple([1] * T), 2.0, 1.0)],
                  battery=Battery(5.0, 5.0, 14.0, 7.0))


def d1_schedule(scenario, i, **blocks):
    layout = variable_layout(scenario.members[i], Design.D1,
                             scenario.horizon)
    vector = np.zeros(layout.size)
    for name, values in blocks.items():
        if name == "p_bar":
            vector[layout.p_bar] = values
        else:
            vector[layout[name]] = values
    return Schedule(layout, vector)


class LayoutTestCase(MarketTestCase):

    def test_d1_size(self):
        layout = variable_layout(equipped_member(), Design.D1, DAY)
        self.assertEqual(layout.size, 121)

    def test_d2_size(self):
        layout = variable_layout(equipped_member(), Design.D2, DAY)
        self.assertEqual(layout.size, 217)

    def test_bare_member(self):
        bare = member("bare", [0.0])
        layout = variable_layout(bare, Design.D1, Horizon(1, 1.0))
        self.assertEqual(layout.size, 3)
        self.assertEqual(layout.blocks, ("l_pos", "l_neg", "p_bar"))

    def test_variable_names(self):
        bare = member("bare", [0.0, 0.0])
        layout = variable_layout(bare, Design.D1, Horizon(2, 1.0))
        self.assertEqual(layout.variable_names(),
                         ["l_pos[0]", "l_pos[1]", "l_neg[0]", "l_neg[1]",
                          "p_bar"])


class ConstraintsTestCase(MarketTestCase):

    def test_no_battery_no_soc_rows(self):
        plain = member("plain", [1.0, 1.0])
        layout = variable_layout(plain, Design.D1, Horizon(2, 1.0))
        block = individual_constraints(plain, Design.D1, Horizon(2, 1.0))
        self.assertNotIn("s", layout)
        self.assertEqual(block.rows_of(STATE_OF_CHARGE), [])
        self.assertEqual(block.rows_of(SOC_RETURN), [])

    def test_battery_rows(self):
        owner = member("owner", [0.0, 0.0],
                       battery=Battery(5.0, 5.0, 14.0, 7.0))
        horizon = Horizon(2, 1.0)
        layout = variable_layout(owner, Design.D1, horizon)
        block = individual_constraints(owner, Design.D1, horizon)
        soc_rows = block.rows_of(STATE_OF_CHARGE)
        self.assertEqual(len(soc_rows), 2)
        A = block.A.toarray()
        s, soc = layout["s"], layout["soc"]
        first = soc_rows[0]
        self.assertEqual(A[first, soc.start], 1.0)
        self.assertEqual(A[first, s.start], -1.0)
        self.assertEqual(block.lower[first], 7.0)
        self.assertEqual(block.upper[first], 7.0)
        (ret,) = block.rows_of(SOC_RETURN)
        self.assertAllClose(A[ret, s], [1.0, 1.0])
        self.assertEqual(block.lb[soc.start], 0.0)
        self.assertEqual(block.ub[soc.start], 14.0)
        self.assertEqual(block.lb[s.start], -5.0)

    def test_zero_window_forces_zero(self):
        idle = member("idle", [0.0, 0.0],
                      appliances=[Appliance((0, 0), 0.0, 1.0)])
        horizon = Horizon(2, 1.0)
        layout = variable_layout(idle, Design.D1, horizon)
        block = individual_constraints(idle, Design.D1, horizon)
        self.assertAllClose(block.ub[layout.appliance(0)], [0.0, 0.0])
        self.assertAllClose(block.violations(np.zeros(layout.size)).get(
            APPLIANCE_ENERGY, 0.0), 0.0)

    def test_d2_flow_rows(self):
        producer = member("p", [0.0], [1.0])
        horizon = Horizon(1, 1.0)
        block = individual_constraints(producer, Design.D2, horizon)
        self.assertEqual(len(block.rows_of(COMMUNITY_EXPORT)), 1)


class OperatorsTestCase(MarketTestCase):

    def test_net_load_operator(self):
        bare = member("bare", [0.0, 0.0])
        layout = variable_layout(bare, Design.D1, Horizon(2, 1.0))
        v = np.array([3.0, 0.0, 1.0, 2.0, 0.0])
        self.assertAllClose(net_load_operator(layout).dot(v), [2.0, -2.0])

    def test_balance_operator_needs_d2(self):
        bare = member("bare", [0.0])
        layout = variable_layout(bare, Design.D1, Horizon(1, 1.0))
        self.assertRaises(DesignMismatchError, balance_operator, layout)

    def test_d2_cost_signs(self):
        bare = member("bare", [0.0])
        layout = variable_layout(bare, Design.D2, Horizon(1, 1.0))
        c = commodity_cost_vector(layout, flat_tariffs(1, beta=0.1))
        self.assertAllClose(c[layout["i_ret"]], [0.16])
        self.assertAllClose(c[layout["i_com"]], [0.13])
        self.assertAllClose(c[layout["e_com"]], [-0.05])
        self.assertAllClose(c[layout["e_ret"]], [-0.04])
        self.assertAllClose(c[layout["l_pos"]], [0.0])
        self.assertClose(c[layout.p_bar], 0.1)


class NetLoadTestCase(MarketTestCase):

    def test_split(self):
        self.assertEqual(split_net_load(0.0), (0.0, 0.0, 0.0))
        self.assertEqual(split_net_load(-0.8).exported, 0.8)

    def test_net_load_of_schedule(self):
        owner = member("owner", [0.5], [0.3],
                       appliances=[Appliance((1,), 1.0, 1.0)],
                       battery=Battery(1.0, 1.0, 2.0, 1.0))
        layout = variable_layout(owner, Design.D1, Horizon(1, 1.0))
        vector = np.zeros(layout.size)
        vector[layout.appliance(0)] = 1.0
        vector[layout["s"]] = 1.0
        value = net_load(Schedule(layout, vector), owner, 0, 1.0)
        self.assertClose(value.value, 2.2)
        self.assertClose(value.imported, 2.2)
        self.assertClose(value.exported, 0.0)

    def test_schedule_is_read_only(self):
        bare = member("bare", [0.0])
        layout = variable_layout(bare, Design.D1, Horizon(1, 1.0))
        schedule = Schedule.zeros(layout)
        self.assertRaises(ValueError, schedule.vector.__setitem__, 0, 1.0)
        self.assertRaises(DesignMismatchError, schedule.flow, "i_com")


class FeasibilityTestCase(MarketTestCase):

    def setUp(self):
        self.scenario = consumer_producer()
        self.profile = CommunityProfile([
            d1_schedule(self.scenario, 0, l_pos=[2.0], p_bar=2.0),
            d1_schedule(self.scenario, 1, l_neg=[1.0]),
        ], Design.D1)

    def test_feasible_profile(self):
        report = check_feasibility(self.profile, self.scenario)
        self.assertTrue(report.feasible)
        self.assertNotIn(COMMUNITY_BALANCE, report.violations)
        self.assertNotIn(COMMUNITY_EXPORT, report.violations)
        self.assertAllClose(self.profile.L, [1.0])

    def test_appliance_energy_violation(self):
        scenario = community([
            member("m", [0.5, 0.5],
                   appliances=[Appliance((1, 1), 1.0, 1.0)])])
        profile = CommunityProfile([
            d1_schedule(scenario, 0, x0=[0.45, 0.45], l_pos=[0.95, 0.95],
                        p_bar=0.95)], Design.D1)
        report = check_feasibility(profile, scenario)
        self.assertFalse(report.feasible)
        gap, family, offender = report.offenders[0]
        self.assertEqual(family, APPLIANCE_ENERGY)
        self.assertEqual(offender, "m")
        self.assertClose(gap, 0.1, atol=1e-9)

    def test_unbalanced_pool(self):
        profile = embed_in_d2(self.profile, self.scenario)
        self.assertTrue(check_feasibility(profile, self.scenario).feasible)
        producer = profile[1]
        producer = producer.replace("e_ret", [0.0]).replace("e_com", [1.0])
        profile = profile.replace(1, producer)
        self.assertAllClose(shared_constraint_residual(profile), [1.0])
        report = check_feasibility(profile, self.scenario)
        self.assertFalse(report.feasible)
        self.assertEqual(report.offenders[0][1], COMMUNITY_BALANCE)
        self.assertClose(report.max_violation, 1.0)

    def test_balanced_exchange(self):
        profile = embed_in_d2(self.profile, self.scenario)
        consumer = profile[0].replace("i_ret", [1.0]).replace(
            "i_com", [1.0])
        producer = profile[1].replace("e_ret", [0.0]).replace(
            "e_com", [1.0])
        profile = CommunityProfile([consumer, producer], Design.D2)
        self.assertAllClose(shared_constraint_residual(profile), [0.0])
        self.assertTrue(check_feasibility(profile, self.scenario).feasible)

    def test_design_mismatch(self):
        self.assertRaises(DesignMismatchError, check_feasibility,
                          self.profile, self.scenario, Design.D2)
        self.assertRaises(DesignMismatchError, shared_constraint_residual,
                          self.profile)
