# -*- coding: utf-8 -*-
# test_billing.py
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
Tests for the billing schemes and the distribution keys.
"""
from rec.market.billing import (
    Billing,
    DistributionKeys,
    bill_changes,
    bill_cp,
    bill_ex_post,
    bill_proportional,
    compute_bills,
    compute_keys,
    keys_net,
    keys_vcg,
    minimal_absolute_net_load,
)
from rec.market.central import solve_centralized, solve_individual_benchmark
from rec.market.errors import DesignMismatchError
from rec.market.model import Design
from rec.market.tests import (
    MarketTestCase,
    battery_trio,
    community,
    consumer_producer,
    member,
    scaled_tariffs,
)


class BillingEnumTestCase(MarketTestCase):

    def test_parse(self):
        self.assertIdentical(Billing.parse("CP"), Billing.CP)
        self.assertIdentical(Billing.parse(Billing.VCG), Billing.VCG)
        self.assertRaises(ValueError, Billing.parse, "shapley")

    def test_keyed(self):
        self.assertTrue(Billing.NET.keyed)
        self.assertTrue(Billing.VCG.keyed)
        self.assertFalse(Billing.CP.keyed)


class KeysTestCase(MarketTestCase):

    def test_must_sum_to_one(self):
        self.assertRaises(ValueError, DistributionKeys, [0.5, 0.6])
        self.assertRaises(ValueError, DistributionKeys, [1.5, -0.5])

    def test_normalize(self):
        keys = DistributionKeys.normalize([1.0, 3.0], Billing.NET)
        self.assertAllClose(keys.K, [0.25, 0.75])
        self.assertFalse(keys.fallback)
        self.assertClose(keys.max, 0.75)
        self.assertEqual(len(keys), 2)

    def test_degenerate_fallback(self):
        keys = DistributionKeys.normalize([0.0, 0.0, 0.0], Billing.VCG)
        self.assertAllClose(keys.K, [1.0 / 3] * 3)
        self.assertTrue(keys.fallback)

    def test_minimal_net_load(self):
        scenario = consumer_producer()
        self.assertClose(minimal_absolute_net_load(
            scenario.members[0], scenario.horizon), 2.0, atol=1e-6)
        self.assertClose(minimal_absolute_net_load(
            scenario.members[1], scenario.horizon), 1.0, atol=1e-6)

    def test_net_keys(self):
        keys = keys_net(consumer_producer())
        self.assertAllClose(keys.K, [2.0 / 3, 1.0 / 3], atol=1e-6)
        self.assertIdentical(keys.scheme, Billing.NET)

    def test_net_keys_fallback(self):
        scenario = community([member("a", [0.0]), member("b", [0.0])])
        keys = keys_net(scenario)
        self.assertTrue(keys.fallback)
        self.assertAllClose(keys.K, [0.5, 0.5])

    def test_vcg_keys(self):
        # C* = 0.281; without the consumer -0.039, without the producer
        # 0.324
        keys = keys_vcg(consumer_producer(), Design.D1)
        self.assertAllClose(keys.K, [0.32 / 0.363, 0.043 / 0.363],
                            atol=1e-4)

    def test_vcg_keys_symmetric(self):
        scenario = community([member("a", [1.0]), member("b", [1.0])])
        keys = keys_vcg(scenario, Design.D2)
        self.assertAllClose(keys.K, [0.5, 0.5], atol=1e-6)

    def test_vcg_single_member(self):
        scenario = community([member("solo", [1.0])])
        self.assertRaises(ValueError, keys_vcg, scenario, Design.D1)

    def test_compute_keys(self):
        scenario = consumer_producer()
        self.assertIdentical(compute_keys(scenario, Design.D1, "cp"), None)
        keys = compute_keys(scenario, Design.D1, "net")
        self.assertIdentical(keys.scheme, Billing.NET)

    def test_keys_ignore_tariff_scale(self):
        for scenario in (consumer_producer(), battery_trio()):
            self.assertAllClose(keys_net(scaled_tariffs(scenario, 3.0)).K,
                                keys_net(scenario).K, atol=1e-9)
        scenario = consumer_producer()
        self.assertAllClose(
            keys_vcg(scaled_tariffs(scenario, 3.0), Design.D1).K,
            keys_vcg(scenario, Design.D1).K, atol=1e-4)


class BillTestCase(MarketTestCase):

    def setUp(self):
        self.scenario = consumer_producer()
        self.profile = solve_individual_benchmark(self.scenario).profile

    def test_per_slot_bills(self):
        bills = bill_cp(self.profile, self.scenario)
        self.assertAllClose(bills, [0.322, -0.041], atol=1e-6)
        self.assertClose(sum(bills), 0.281, atol=1e-6)

    def test_per_slot_design_mismatch(self):
        self.assertRaises(DesignMismatchError, bill_cp, self.profile,
                          self.scenario, Design.D2)

    def test_proportional(self):
        keys = DistributionKeys([0.25, 0.75])
        self.assertAllClose(bill_proportional(keys, 2.0), [0.5, 1.5])

    def test_keyed_bills_sum_to_total(self):
        keys = DistributionKeys([0.4, 0.6], Billing.NET)
        bills = compute_bills(self.profile, self.scenario, "net", keys)
        self.assertClose(sum(bills), 0.281, atol=1e-6)
        self.assertClose(bills[0], 0.4 * 0.281, atol=1e-6)

    def test_keyed_bills_need_keys(self):
        self.assertRaises(ValueError, compute_bills, self.profile,
                          self.scenario, Billing.VCG)

    def test_ex_post(self):
        central = solve_centralized(self.scenario, Design.D2)
        bills = bill_ex_post(central.profile, self.scenario, Design.D2,
                             Billing.CP)
        self.assertClose(sum(bills), central.total_cost, atol=1e-6)
        self.assertRaises(DesignMismatchError, bill_ex_post,
                          central.profile, self.scenario, Design.D1,
                          Billing.CP)

    def test_changes(self):
        changes = bill_changes([1.1, 0.5, 2.0], [1.0, 0.0, -1.0])
        self.assertClose(changes[0], 10.0)
        self.assertIdentical(changes[1], None)
        self.assertClose(changes[2], 300.0)
        self.assertRaises(ValueError, bill_changes, [1.0], [1.0, 2.0])
