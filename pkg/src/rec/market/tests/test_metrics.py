# -*- coding: utf-8 -*-
# test_metrics.py
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
Tests for the key performance indicators.
"""
import pandas as pd

from rec.market.central import solve_centralized, solve_individual_benchmark
from rec.market.errors import UndefinedMetricError
from rec.market.fields import fields
from rec.market.metrics import (
    MINUS,
    PLUS,
    compute_inefficiency,
    compute_kpis,
    compute_par,
    compute_scr,
    compute_ssr,
    inefficiency_or_none,
    member_characteristics,
    par_of,
)
from rec.market.model import Design
from rec.market.tests import (
    MarketTestCase,
    battery_trio,
    community,
    consumer_producer,
    flexible_pair,
    member,
    scaled_tariffs,
)


class ParTestCase(MarketTestCase):

    def test_flat(self):
        self.assertClose(par_of([1.0] * 24), 1.0)

    def test_spike(self):
        self.assertClose(par_of([0.0, 0.0, 3.0, 0.0]), 4.0)

    def test_mixed(self):
        self.assertClose(par_of([2.0, 2.0, 4.0, 8.0]), 2.0)

    def test_empty(self):
        self.assertRaises(UndefinedMetricError, par_of, [0.0, 0.0])

    def test_profile(self):
        profile = solve_individual_benchmark(consumer_producer(T=3)).profile
        self.assertClose(compute_par(profile, PLUS), 1.0, atol=1e-6)
        self.assertClose(compute_par(profile, MINUS), 1.0, atol=1e-6)
        self.assertRaises(ValueError, compute_par, profile, "*")


class RatioTestCase(MarketTestCase):

    def setUp(self):
        self.scenario = consumer_producer()

    def test_no_community(self):
        profile = solve_individual_benchmark(self.scenario).profile
        # the production is sold, the load is bought
        self.assertClose(compute_scr(profile, self.scenario), 0.0, atol=1e-6)
        self.assertClose(compute_ssr(profile, self.scenario), 0.0, atol=1e-6)

    def test_pool(self):
        profile = solve_centralized(self.scenario, Design.D2).profile
        self.assertClose(compute_scr(profile, self.scenario), 1.0, atol=1e-5)
        self.assertClose(compute_ssr(profile, self.scenario), 0.5, atol=1e-5)

    def test_d1_design_on_d1_profile(self):
        profile = solve_centralized(self.scenario, Design.D1).profile
        self.assertClose(compute_scr(profile, self.scenario, Design.D1),
                         0.0, atol=1e-5)

    def test_tariff_scale(self):
        for scenario in (consumer_producer(T=3), flexible_pair()):
            scaled = scaled_tariffs(scenario, 3.0)
            for design in Design:
                profile = solve_centralized(scenario, design).profile
                other = solve_centralized(scaled, design).profile
                self.assertClose(compute_scr(other, scaled),
                                 compute_scr(profile, scenario), atol=1e-4)
                self.assertClose(compute_ssr(other, scaled),
                                 compute_ssr(profile, scenario), atol=1e-4)

    def test_undefined(self):
        scenario = community([member("solo", [1.0])])
        profile = solve_individual_benchmark(scenario).profile
        self.assertRaises(UndefinedMetricError, compute_scr, profile,
                          scenario)
        self.assertClose(compute_ssr(profile, scenario), 0.0, atol=1e-6)


class InefficiencyTestCase(MarketTestCase):

    def test_value(self):
        self.assertClose(compute_inefficiency([1.0, 1.0], 1.6), 0.25)

    def test_undefined(self):
        self.assertRaises(UndefinedMetricError, compute_inefficiency,
                          [1.0], 0.0)
        self.assertIdentical(inefficiency_or_none([1.0], 0.0), None)
        self.assertIdentical(inefficiency_or_none([1.0], None), None)


class KpiTestCase(MarketTestCase):

    def test_report(self):
        scenario = consumer_producer()
        benchmark = solve_individual_benchmark(scenario)
        kpis = compute_kpis(benchmark.profile, scenario, benchmark.bills,
                            social_optimum=0.281)
        self.assertClose(kpis.total_cost, 0.281, atol=1e-6)
        self.assertClose(kpis.par_plus, 1.0, atol=1e-6)
        self.assertClose(kpis.inefficiency, (0.28 - 0.281) / 0.281,
                         atol=1e-5)
        self.assertEqual(len(kpis.bills), 2)

    def test_undefined_are_none(self):
        scenario = community([member("solo", [1.0])])
        benchmark = solve_individual_benchmark(scenario)
        kpis = compute_kpis(benchmark.profile, scenario, benchmark.bills)
        self.assertIdentical(kpis.scr, None)
        self.assertIdentical(kpis.par_minus, None)
        self.assertIdentical(kpis.inefficiency, None)

    def test_as_dict(self):
        scenario = consumer_producer()
        benchmark = solve_individual_benchmark(scenario)
        values = compute_kpis(benchmark.profile, scenario,
                              benchmark.bills).as_dict()
        self.assertEqual(set(values), set([
            fields.SCR_KEY, fields.SSR_KEY, fields.PAR_PLUS_KEY,
            fields.PAR_MINUS_KEY, fields.TOTAL_COST_KEY,
            fields.INEFFICIENCY_KEY]))


class CharacteristicsTestCase(MarketTestCase):

    def test_battery_trio(self):
        frame = member_characteristics(battery_trio())
        self.assertEqual(list(frame.columns),
                         list(fields.CHARACTERISTICS_COLUMNS))
        rows = frame.set_index(fields.MEMBER_KEY)
        self.assertClose(rows.loc["pv", fields.PV_CAPACITY_KEY], 1.5)
        self.assertClose(rows.loc["pv", fields.BATTERY_CAPACITY_KEY], 2.0)
        self.assertClose(rows.loc["pv", fields.FLEXIBILITY_KEY], 2.0)
        self.assertClose(rows.loc["flex", fields.CONSUMPTION_KEY], 3.0)
        self.assertClose(rows.loc["flex", fields.FLEXIBILITY_KEY], 0.5)
        self.assertClose(rows.loc["plain", fields.FLEXIBILITY_KEY], 0.0)

    def test_no_consumption(self):
        frame = member_characteristics(community([
            member("idle", [0.0], [1.0]), member("load", [1.0])]))
        self.assertTrue(pd.isnull(frame[fields.FLEXIBILITY_KEY][0]))
        self.assertClose(frame[fields.FLEXIBILITY_KEY][1], 0.0)
