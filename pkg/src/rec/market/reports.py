# -*- coding: utf-8 -*-
# reports.py
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
Run outputs: flat CSV tables and one json summary per run directory.

Every table has a fixed column order (see fields). The summary holds
everything that is deterministic for a given scenario and configuration;
wall-clock times go to their own table.
"""
import json
import logging
import os

import numpy as np
import pandas as pd

from rec.market import __version__
from rec.market.billing import bill_changes
from rec.market.errors import ComparisonError
from rec.market.fields import fields
from rec.market.model import CommunityProfile, Design, variable_layout
from rec.market.scenario import scenario_to_dict, write_scenario
from rec.market.utils import check, fingerprint


logger = logging.getLogger(__name__)


FLOAT_FORMAT = "%.10g"
SUMMARY_DIGITS = 12


class RunResult(object):
    """
    Everything a run produced.

    :ivar mode: one of fields.MODES.
    :ivar profile: the resulting CommunityProfile.
    :ivar bills: the member bills.
    :ivar cost: the CostBreakdown of the profile.
    :ivar kpis: the KpiReport.
    :ivar keys: the distribution keys, for keyed schemes.
    :ivar ex_post_bills: the centralized optimum billed with the same
                         scheme, for game runs.
    :ivar prices: pool prices, for D2 runs that have them.
    :ivar game: the equilibrium report of game runs.
    :ivar timings: (stage, seconds) pairs.
    :ivar feasibility: the FeasibilityReport of the profile.
    """

    def __init__(self, mode, scenario, profile, bills, cost, kpis,
                 billing=None, keys=None, ex_post_bills=None, prices=None,
                 social_optimum=None, game=None, seed=None, timings=None,
                 feasibility=None):
        self.mode = mode
        self.scenario = scenario
        self.profile = profile
        self.bills = list(bills)
        self.cost = cost
        self.kpis = kpis
        self.billing = billing
        self.keys = keys
        self.ex_post_bills = ex_post_bills
        self.prices = prices
        self.social_optimum = social_optimum
        self.game = game
        self.seed = seed
        self.timings = timings or []
        self.feasibility = feasibility

    @property
    def design(self):
        return self.profile.design

    @property
    def total_cost(self):
        return self.cost.total


def _clean(value):
    """
    Make a value json friendly: rounded floats, "n/a" for missing ones.
    """
    if value is None:
        return fields.NOT_AVAILABLE
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if not np.isfinite(value):
            return fields.NOT_AVAILABLE
        return float("%.*g" % (SUMMARY_DIGITS, value)) + 0.0
    if isinstance(value, dict):
        return dict((k, _clean(v)) for k, v in value.items())
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    return value


#
# Tables
#

def profile_frame(profile, scenario):
    """
    One row per member and time step. Virtual flows are empty in D1.

    :rtype: pandas.DataFrame
    """
    rows = []
    for member, schedule in zip(scenario.members, profile):
        appliances = schedule.x.sum(axis=0) if len(schedule.x) else \
            np.zeros(scenario.T)
        flows = dict((name, None) for name in fields.FLOW_KEYS)
        for t in range(scenario.T):
            if "i_com" in schedule.layout:
                flows = dict((name, float(schedule.flow(name)[t]))
                             for name in fields.FLOW_KEYS)
            row = {
                fields.MEMBER_KEY: member.id,
                fields.T_KEY: t,
                fields.L_POS_KEY: float(schedule.l_pos[t]),
                fields.L_NEG_KEY: float(schedule.l_neg[t]),
                fields.NET_LOAD_KEY: float(schedule.l[t]),
                fields.APPLIANCES_KEY: float(appliances[t]),
                fields.BATTERY_KEY: float(schedule.s[t]),
                fields.SOC_KEY: float(schedule.soc[t]),
                fields.PEAK_KEY: schedule.p_bar,
            }
            row.update(flows)
            rows.append(row)
    return pd.DataFrame(rows, columns=fields.PROFILE_COLUMNS)


def bills_frame(result):
    """
    :rtype: pandas.DataFrame
    """
    n = len(result.bills)
    keys = list(result.keys.K) if result.keys is not None else [None] * n
    ex_post = result.ex_post_bills or [None] * n
    changes = [None] * n
    if result.ex_post_bills is not None:
        changes = bill_changes(result.bills, result.ex_post_bills)
    rows = []
    for i, member in enumerate(result.scenario.members):
        rows.append({
            fields.MEMBER_KEY: member.id,
            fields.BILL_KEY: result.bills[i],
            fields.KEY_KEY: keys[i],
            fields.EX_POST_KEY: ex_post[i],
            fields.CHANGE_KEY: changes[i],
        })
    return pd.DataFrame(rows, columns=fields.BILLS_COLUMNS)


def kpis_frame(kpis):
    """
    One row per indicator; undefined ones read "n/a".

    :rtype: pandas.DataFrame
    """
    values = kpis.as_dict()
    rows = [{fields.KPI_KEY: name,
             fields.VALUE_KEY: (fields.NOT_AVAILABLE if values[name] is None
                                else FLOAT_FORMAT % values[name])}
            for name in fields.KPIS]
    return pd.DataFrame(rows, columns=fields.KPIS_COLUMNS)


def trace_frame(trace):
    """
    :rtype: pandas.DataFrame
    """
    return pd.DataFrame([row._asdict() for row in trace],
                        columns=fields.TRACE_COLUMNS)


def prices_frame(prices):
    """
    :rtype: pandas.DataFrame
    """
    return pd.DataFrame({fields.T_KEY: np.arange(len(prices)),
                         fields.PRICE_KEY: [float(p) for p in prices]},
                        columns=fields.PRICES_COLUMNS)


def timings_frame(timings):
    """
    :rtype: pandas.DataFrame
    """
    return pd.DataFrame(list(timings), columns=fields.TIMINGS_COLUMNS)


def summary_document(result):
    """
    Return the deterministic summary of a run.

    :rtype: dict
    """
    doc = {
        fields.VERSION_KEY: __version__,
        fields.MODE_KEY: result.mode,
        fields.DESIGN_KEY: result.design.value,
        fields.BILLING_KEY: (result.billing.value if result.billing
                             else None),
        fields.SEED_KEY: result.seed,
        fields.SCENARIO_HASH_KEY: fingerprint(
            scenario_to_dict(result.scenario)),
        fields.TOTAL_COST_KEY: result.total_cost,
        fields.COST_KEY: dict(result.cost._asdict()),
        fields.SOCIAL_OPTIMUM_KEY: result.social_optimum,
        fields.MEMBER_KEY: [m.id for m in result.scenario.members],
        fields.BILL_KEY: result.bills,
    }
    doc.update(result.kpis.as_dict())
    game = result.game
    if game is not None:
        doc.update({
            fields.TAU_KEY: game.tau,
            fields.OUTER_KEY: game.outer_iterations,
            fields.INNER_KEY: game.inner_iterations,
            fields.CONVERGED_KEY: game.converged,
            fields.BEST_RESPONSE_KEY: game.best_response_residual,
        })
        if hasattr(game, "balance_residual"):
            doc[fields.BALANCE_KEY] = game.balance_residual
            doc[fields.PRICE_TAU_KEY] = game.price_tau
    if result.feasibility is not None:
        doc[fields.FEASIBLE_KEY] = result.feasibility.feasible
        doc[fields.MAX_VIOLATION_KEY] = result.feasibility.max_violation
    return _clean(doc)


def schedules_document(profile, scenario):
    """
    Return the full decision vectors of a profile, by member id.

    :rtype: dict
    """
    return {
        fields.DESIGN_KEY: profile.design.value,
        fields.MEMBER_KEY: [m.id for m in scenario.members],
        fields.VECTOR_KEY: [[float(x) for x in s.vector] for s in profile],
    }


def read_profile(directory, scenario):
    """
    Read back the profile a run wrote, to start another run from it.

    :raise ValueError: if the run is about other members.
    :rtype: CommunityProfile
    """
    path = os.path.join(directory, fields.SCHEDULES_FILE)
    with open(path, 'r') as f:
        doc = json.load(f)
    check(doc[fields.MEMBER_KEY] == [m.id for m in scenario.members],
          "%s is about other members" % (path,))
    design = Design.parse(doc[fields.DESIGN_KEY])
    layouts = [variable_layout(m, design, scenario.horizon)
               for m in scenario.members]
    return CommunityProfile.from_vectors(
        layouts, [np.array(v) for v in doc[fields.VECTOR_KEY]], design)


def _write_csv(frame, directory, name):
    path = os.path.join(directory, name)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT,
                 na_rep=fields.NOT_AVAILABLE)
    return path


def write_json(document, path):
    with open(path, 'w') as f:
        json.dump(document, f, indent=1, sort_keys=True)
        f.write("\n")


def write_run(result, directory):
    """
    Write all the outputs of a run into a directory, creating it.

    :param result: the run to persist.
    :type result: RunResult
    :param directory: the output directory.
    :type directory: str
    :return: the summary document.
    :rtype: dict
    """
    if not os.path.isdir(directory):
        os.makedirs(directory)
    write_scenario(result.scenario,
                   os.path.join(directory, fields.SCENARIO_FILE))
    write_json(schedules_document(result.profile, result.scenario),
               os.path.join(directory, fields.SCHEDULES_FILE))
    _write_csv(profile_frame(result.profile, result.scenario), directory,
               fields.PROFILE_FILE)
    _write_csv(bills_frame(result), directory, fields.BILLS_FILE)
    _write_csv(kpis_frame(result.kpis), directory, fields.KPIS_FILE)
    if result.game is not None:
        _write_csv(trace_frame(result.game.trace), directory,
                   fields.TRACE_FILE)
    if result.prices is not None:
        _write_csv(prices_frame(result.prices), directory,
                   fields.PRICES_FILE)
    _write_csv(timings_frame(result.timings), directory,
               fields.TIMINGS_FILE)
    summary = summary_document(result)
    write_json(summary, os.path.join(directory, fields.SUMMARY_FILE))
    logger.info("Wrote %s run outputs to %s", result.mode, directory)
    return summary


#
# Comparisons
#

def read_summary(directory):
    """
    :raise ComparisonError: if the directory holds no run.
    :rtype: dict
    """
    path = os.path.join(directory, fields.SUMMARY_FILE)
    try:
        with open(path, 'r') as f:
            return json.load(f)
    except (IOError, OSError, ValueError) as exc:
        raise ComparisonError("cannot read run %s: %s" % (directory, exc))


def read_bills(directory):
    """
    :rtype: pandas.DataFrame
    """
    path = os.path.join(directory, fields.BILLS_FILE)
    try:
        return pd.read_csv(path, na_values=[fields.NOT_AVAILABLE])
    except (IOError, OSError, ValueError) as exc:
        raise ComparisonError("cannot read bills of %s: %s" % (
            directory, exc))


def _number(value):
    if value is None or value == fields.NOT_AVAILABLE:
        return np.nan
    return float(value)


def compare_runs(directories, names=None):
    """
    Compare runs made on the same scenario.

    The first table has one row per run, cheapest first, with costs,
    indicators and the savings relative to the benchmark run if there is
    one. The second one has the bill of every member in every run, with
    the delta over the first run given.

    :param directories: the run directories.
    :param names: labels of the runs, the directory names by default.
    :raise ComparisonError: if the runs are not about the same scenario.
    :return: the comparison and the bill deltas.
    :rtype: tuple of pandas.DataFrame
    """
    if len(directories) < 1:
        raise ComparisonError("nothing to compare")
    names = names or [os.path.basename(os.path.normpath(d))
                      for d in directories]
    summaries = [read_summary(d) for d in directories]
    hashes = set(s.get(fields.SCENARIO_HASH_KEY) for s in summaries)
    if len(hashes) != 1:
        raise ComparisonError("runs are about different scenarios")

    benchmark = None
    for summary in summaries:
        if summary.get(fields.MODE_KEY) == fields.MODE_BENCHMARK:
            benchmark = _number(summary[fields.TOTAL_COST_KEY])
            break

    rows = []
    for name, summary in zip(names, summaries):
        cost = _number(summary[fields.TOTAL_COST_KEY])
        savings = np.nan
        if benchmark is not None and benchmark != 0:
            savings = (benchmark - cost) / abs(benchmark)
        row = {fields.RUN_KEY: name,
               fields.MODE_KEY: summary.get(fields.MODE_KEY),
               fields.DESIGN_KEY: summary.get(fields.DESIGN_KEY),
               fields.BILLING_KEY: summary.get(fields.BILLING_KEY),
               fields.SAVINGS_KEY: savings}
        for kpi in fields.KPIS:
            row[kpi] = _number(summary.get(kpi))
        rows.append(row)
    columns = [fields.RUN_KEY, fields.MODE_KEY, fields.DESIGN_KEY,
               fields.BILLING_KEY] + list(fields.KPIS) + [fields.SAVINGS_KEY]
    comparison = pd.DataFrame(rows, columns=columns).sort_values(
        [fields.TOTAL_COST_KEY, fields.RUN_KEY], kind="mergesort")
    comparison = comparison.reset_index(drop=True)

    bills = [read_bills(d) for d in directories]
    members = list(bills[0][fields.MEMBER_KEY])
    for frame in bills[1:]:
        if list(frame[fields.MEMBER_KEY]) != members:
            raise ComparisonError("runs bill different members")
    reference = bills[0][fields.BILL_KEY].values
    deltas = []
    for name, frame in zip(names, bills):
        for i, member in enumerate(members):
            bill = float(frame[fields.BILL_KEY].values[i])
            deltas.append({
                fields.RUN_KEY: name,
                fields.MEMBER_KEY: member,
                fields.BILL_KEY: bill,
                fields.DELTA_KEY: bill - float(reference[i]),
                fields.CHANGE_KEY: float(frame[fields.CHANGE_KEY].values[i]),
            })
    deltas = pd.DataFrame(deltas, columns=[
        fields.RUN_KEY, fields.MEMBER_KEY, fields.BILL_KEY,
        fields.DELTA_KEY, fields.CHANGE_KEY])
    return comparison, deltas


def write_comparison(comparison, deltas, directory):
    if not os.path.isdir(directory):
        os.makedirs(directory)
    _write_csv(comparison, directory, fields.COMPARISON_FILE)
    _write_csv(deltas, directory, fields.DELTAS_FILE)


#
# Batches
#

def batch_tables(summaries, seeds):
    """
    Per-day table of a batch and the mean and standard deviation of its
    numeric columns.

    :param summaries: the summary document of every day.
    :param seeds: the seed of every day.
    :return: the per-day table and the statistics.
    :rtype: tuple of pandas.DataFrame
    """
    rows = []
    for seed, summary in zip(seeds, summaries):
        row = {fields.SEED_KEY: seed}
        for kpi in fields.KPIS:
            row[kpi] = _number(summary.get(kpi))
        rows.append(row)
    days = pd.DataFrame(rows, columns=[fields.SEED_KEY] + list(fields.KPIS))
    numeric = days[list(fields.KPIS)]
    stats = pd.DataFrame({
        fields.KPI_KEY: list(fields.KPIS),
        fields.MEAN_KEY: numeric.mean(skipna=True).values,
        fields.STD_KEY: numeric.std(ddof=0, skipna=True).values,
    }, columns=[fields.KPI_KEY, fields.MEAN_KEY, fields.STD_KEY])
    return days, stats


def write_batch(days, stats, directory):
    if not os.path.isdir(directory):
        os.makedirs(directory)
    _write_csv(days, directory, fields.BATCH_FILE)
    _write_csv(stats, directory, fields.BATCH_STATS_FILE)
