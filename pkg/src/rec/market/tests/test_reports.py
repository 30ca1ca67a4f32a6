# -*- coding: utf-8 -*-
# test_reports.py
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
Tests for the run outputs, comparisons and batch statistics.
"""
import json
import os

import numpy as np
import pandas as pd

from rec.market.billing import Billing, bill_cp
from rec.market.central import solve_centralized, solve_individual_benchmark
from rec.market.errors import ComparisonError
from rec.market.fields import fields
from rec.market.metrics import compute_kpis
from rec.market.model import Design, check_feasibility
from rec.market.reports import (
    RunResult,
    _clean,
    batch_tables,
    compare_runs,
    profile_frame,
    read_profile,
    write_comparison,
    write_run,
)
from rec.market.tests import MarketTestCase, consumer_producer, flexible_pair


def benchmark_result(scenario):
    benchmark = solve_individual_benchmark(scenario)
    return RunResult(
        fields.MODE_BENCHMARK, scenario, benchmark.profile, benchmark.bills,
        benchmark.cost, compute_kpis(benchmark.profile, scenario,
                                     benchmark.bills),
        timings=[("benchmark", 0.5)],
        feasibility=check_feasibility(benchmark.profile, scenario))


def central_result(scenario, design=Design.D2):
    central = solve_centralized(scenario, design)
    bills = bill_cp(central.profile, scenario)
    return RunResult(
        fields.MODE_CENTRAL, scenario, central.profile, bills, central.cost,
        compute_kpis(central.profile, scenario, bills, central.total_cost),
        billing=Billing.CP, prices=central.prices,
        social_optimum=central.total_cost)


class CleanTestCase(MarketTestCase):

    def test_missing_values(self):
        self.assertEqual(_clean(None), fields.NOT_AVAILABLE)
        self.assertEqual(_clean(float("nan")), fields.NOT_AVAILABLE)
        self.assertEqual(_clean([1, None]), [1, fields.NOT_AVAILABLE])

    def test_numbers(self):
        self.assertEqual(_clean(np.float64(0.1) + np.float64(0.2)), 0.3)
        self.assertEqual(_clean(np.int64(3)), 3)
        self.assertIdentical(_clean(np.bool_(True)), True)
        self.assertEqual(_clean(-0.0), 0.0)


class WriteRunTestCase(MarketTestCase):

    def setUp(self):
        self.scenario = consumer_producer()
        self.directory = self.mktemp()

    def test_files(self):
        write_run(benchmark_result(self.scenario), self.directory)
        for name in (fields.SCENARIO_FILE, fields.SCHEDULES_FILE,
                     fields.PROFILE_FILE, fields.BILLS_FILE,
                     fields.KPIS_FILE, fields.TIMINGS_FILE,
                     fields.SUMMARY_FILE):
            self.assertTrue(os.path.isfile(os.path.join(self.directory,
                                                        name)), name)
        self.assertFalse(os.path.exists(os.path.join(self.directory,
                                                     fields.TRACE_FILE)))
        self.assertFalse(os.path.exists(os.path.join(self.directory,
                                                     fields.PRICES_FILE)))

    def test_summary(self):
        summary = write_run(benchmark_result(self.scenario), self.directory)
        with open(os.path.join(self.directory, fields.SUMMARY_FILE)) as f:
            self.assertEqual(json.load(f), summary)
        self.assertEqual(summary[fields.MODE_KEY], fields.MODE_BENCHMARK)
        self.assertEqual(summary[fields.DESIGN_KEY], "D1")
        self.assertEqual(summary[fields.BILLING_KEY], fields.NOT_AVAILABLE)
        self.assertClose(summary[fields.TOTAL_COST_KEY], 0.281, atol=1e-6)
        self.assertEqual(summary[fields.INEFFICIENCY_KEY],
                         fields.NOT_AVAILABLE)
        self.assertTrue(summary[fields.FEASIBLE_KEY])
        self.assertEqual(len(summary[fields.SCENARIO_HASH_KEY]), 64)

    def test_summary_is_deterministic(self):
        first = write_run(benchmark_result(self.scenario), self.directory)
        second = write_run(benchmark_result(self.scenario), self.mktemp())
        self.assertEqual(first, second)

    def test_csv_tables(self):
        write_run(central_result(self.scenario), self.directory)
        bills = pd.read_csv(os.path.join(self.directory, fields.BILLS_FILE))
        self.assertEqual(list(bills.columns), list(fields.BILLS_COLUMNS))
        self.assertEqual(list(bills[fields.MEMBER_KEY]),
                         ["consumer", "producer"])
        prices = pd.read_csv(os.path.join(self.directory,
                                          fields.PRICES_FILE))
        self.assertEqual(list(prices.columns), list(fields.PRICES_COLUMNS))
        kpis = pd.read_csv(os.path.join(self.directory, fields.KPIS_FILE))
        self.assertEqual(list(kpis[fields.KPI_KEY]), list(fields.KPIS))

    def test_profile_frame(self):
        scenario = consumer_producer(T=2)
        d1 = profile_frame(solve_individual_benchmark(scenario).profile,
                           scenario)
        self.assertEqual(len(d1), 4)
        self.assertEqual(list(d1.columns), list(fields.PROFILE_COLUMNS))
        self.assertTrue(d1[fields.I_COM_KEY].isnull().all())
        d2 = profile_frame(solve_centralized(scenario, Design.D2).profile,
                           scenario)
        self.assertClose(d2[fields.E_COM_KEY].sum(), 2.0, atol=1e-5)

    def test_read_profile(self):
        result = central_result(flexible_pair())
        write_run(result, self.directory)
        profile = read_profile(self.directory, flexible_pair())
        self.assertIdentical(profile.design, Design.D2)
        self.assertAllClose(profile.vector(), result.profile.vector(),
                            atol=1e-12)

    def test_read_profile_other_members(self):
        write_run(benchmark_result(self.scenario), self.directory)
        self.assertRaises(ValueError, read_profile, self.directory,
                          flexible_pair())


class CompareTestCase(MarketTestCase):

    def setUp(self):
        scenario = consumer_producer()
        self.benchmark = self.mktemp()
        self.central = self.mktemp()
        write_run(benchmark_result(scenario), self.benchmark)
        write_run(central_result(scenario), self.central)

    def test_comparison(self):
        comparison, deltas = compare_runs([self.benchmark, self.central],
                                          names=["bench", "pool"])
        self.assertEqual(list(comparison[fields.RUN_KEY]), ["pool", "bench"])
        savings = comparison.set_index(fields.RUN_KEY)[fields.SAVINGS_KEY]
        self.assertClose(savings["bench"], 0.0)
        self.assertClose(savings["pool"], 0.04 / 0.281, atol=1e-5)
        self.assertEqual(len(deltas), 4)
        reference = deltas[deltas[fields.RUN_KEY] == "bench"]
        self.assertAllClose(reference[fields.DELTA_KEY], [0.0, 0.0])

    def test_write(self):
        comparison, deltas = compare_runs([self.benchmark, self.central])
        directory = self.mktemp()
        write_comparison(comparison, deltas, directory)
        self.assertTrue(os.path.isfile(os.path.join(
            directory, fields.COMPARISON_FILE)))
        self.assertTrue(os.path.isfile(os.path.join(
            directory, fields.DELTAS_FILE)))

    def test_other_scenario(self):
        other = self.mktemp()
        write_run(benchmark_result(flexible_pair()), other)
        self.assertRaises(ComparisonError, compare_runs,
                          [self.benchmark, other])

    def test_missing_run(self):
        self.assertRaises(ComparisonError, compare_runs,
                          [self.benchmark, self.mktemp()])
        self.assertRaises(ComparisonError, compare_runs, [])


class BatchTestCase(MarketTestCase):

    def test_statistics(self):
        summaries = [
            {fields.SCR_KEY: 0.5, fields.TOTAL_COST_KEY: 1.0},
            {fields.SCR_KEY: 1.0, fields.TOTAL_COST_KEY: 3.0},
            {fields.SCR_KEY: fields.NOT_AVAILABLE,
             fields.TOTAL_COST_KEY: 2.0},
        ]
        days, stats = batch_tables(summaries, [1, 2, 3])
        self.assertEqual(list(days[fields.SEED_KEY]), [1, 2, 3])
        stats = stats.set_index(fields.KPI_KEY)
        self.assertClose(stats.loc[fields.SCR_KEY, fields.MEAN_KEY], 0.75)
        self.assertClose(stats.loc[fields.SCR_KEY, fields.STD_KEY], 0.25)
        self.assertClose(stats.loc[fields.TOTAL_COST_KEY, fields.MEAN_KEY],
                         2.0)
