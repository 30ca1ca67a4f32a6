# -*- coding: utf-8 -*-
# fields.py
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
Keys of the persisted documents and report columns.
"""


class WithReportFields(object):
    """
    Container class for class-attributes to be shared by the writers and
    readers of run outputs.
    """
    # identification
    MEMBER_KEY = "member"
    T_KEY = "t"
    DESIGN_KEY = "design"
    MODE_KEY = "mode"
    BILLING_KEY = "billing"
    SEED_KEY = "seed"
    SCENARIO_KEY = "scenario"
    SCENARIO_HASH_KEY = "scenario_sha256"
    VERSION_KEY = "version"

    # modes of a run
    MODE_BENCHMARK = "benchmark"
    MODE_CENTRAL = "central"
    MODE_GAME = "game"
    MODES = (MODE_BENCHMARK, MODE_CENTRAL, MODE_GAME)

    # schedules
    L_POS_KEY = "l_pos"
    L_NEG_KEY = "l_neg"
    NET_LOAD_KEY = "l"
    APPLIANCES_KEY = "appliances"
    BATTERY_KEY = "s"
    SOC_KEY = "soc"
    PEAK_KEY = "p_bar"
    I_COM_KEY = "i_com"
    E_COM_KEY = "e_com"
    I_RET_KEY = "i_ret"
    E_RET_KEY = "e_ret"
    FLOW_KEYS = (I_COM_KEY, E_COM_KEY, I_RET_KEY, E_RET_KEY)
    PROFILE_COLUMNS = (MEMBER_KEY, T_KEY, L_POS_KEY, L_NEG_KEY,
                       NET_LOAD_KEY, APPLIANCES_KEY, BATTERY_KEY, SOC_KEY,
                       PEAK_KEY) + FLOW_KEYS

    # bills
    BILL_KEY = "bill"
    KEY_KEY = "key"
    EX_POST_KEY = "ex_post_bill"
    CHANGE_KEY = "change_pct"
    BILLS_COLUMNS = (MEMBER_KEY, BILL_KEY, KEY_KEY, EX_POST_KEY, CHANGE_KEY)

    # prices of the pool
    PRICE_KEY = "pi"
    PRICES_COLUMNS = (T_KEY, PRICE_KEY)

    # costs
    TOTAL_COST_KEY = "total_cost"
    COST_KEY = "cost"
    SOCIAL_OPTIMUM_KEY = "social_optimum"

    # indicators
    KPI_KEY = "kpi"
    VALUE_KEY = "value"
    SCR_KEY = "scr"
    SSR_KEY = "ssr"
    PAR_PLUS_KEY = "par_plus"
    PAR_MINUS_KEY = "par_minus"
    INEFFICIENCY_KEY = "inefficiency"
    KPIS = (SCR_KEY, SSR_KEY, PAR_PLUS_KEY, PAR_MINUS_KEY, TOTAL_COST_KEY,
            INEFFICIENCY_KEY)
    KPIS_COLUMNS = (KPI_KEY, VALUE_KEY)
    NOT_AVAILABLE = "n/a"

    # game runs
    TAU_KEY = "tau"
    PRICE_TAU_KEY = "price_tau"
    RHO_KEY = "rho"
    OUTER_KEY = "outer"
    INNER_KEY = "inner"
    RESIDUAL_KEY = "residual"
    BALANCE_KEY = "balance"
    CONVERGED_KEY = "converged"
    BEST_RESPONSE_KEY = "best_response_residual"
    FEASIBLE_KEY = "feasible"
    MAX_VIOLATION_KEY = "max_violation"
    VECTOR_KEY = "vector"
    TRACE_COLUMNS = (OUTER_KEY, INNER_KEY, RESIDUAL_KEY, TOTAL_COST_KEY,
                     BALANCE_KEY)

    # timings
    STAGE_KEY = "stage"
    SECONDS_KEY = "seconds"
    TIMINGS_COLUMNS = (STAGE_KEY, SECONDS_KEY)

    # member characteristics
    PV_CAPACITY_KEY = "pv_capacity"
    BATTERY_CAPACITY_KEY = "battery_capacity"
    BATTERY_POWER_KEY = "battery_power"
    CONSUMPTION_KEY = "consumption"
    FLEXIBILITY_KEY = "flexibility"
    CHARACTERISTICS_COLUMNS = (MEMBER_KEY, PV_CAPACITY_KEY,
                               BATTERY_CAPACITY_KEY, BATTERY_POWER_KEY,
                               CONSUMPTION_KEY, FLEXIBILITY_KEY)

    # comparisons and batches
    RUN_KEY = "run"
    SAVINGS_KEY = "savings"
    DELTA_KEY = "delta"
    MEAN_KEY = "mean"
    STD_KEY = "std"

    # file names
    PROFILE_FILE = "profile.csv"
    BILLS_FILE = "bills.csv"
    PRICES_FILE = "prices.csv"
    KPIS_FILE = "kpis.csv"
    TRACE_FILE = "trace.csv"
    TIMINGS_FILE = "timings.csv"
    SUMMARY_FILE = "summary.json"
    SCENARIO_FILE = "scenario.json"
    SCHEDULES_FILE = "schedules.json"
    COMPARISON_FILE = "comparison.csv"
    DELTAS_FILE = "bill_deltas.csv"
    BATCH_FILE = "batch.csv"
    BATCH_STATS_FILE = "batch_stats.csv"

fields = WithReportFields  # alias for convenience
