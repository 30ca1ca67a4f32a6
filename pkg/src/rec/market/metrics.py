# -*- coding: utf-8 -*-
# metrics.py
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
Key performance indicators of a community profile.
"""
import logging

from collections import namedtuple

import numpy as np
import pandas as pd

from rec.market.central import total_cost
from rec.market.errors import UndefinedMetricError
from rec.market.fields import fields
from rec.market.model import Design


logger = logging.getLogger(__name__)


PLUS = "+"
MINUS = "-"


class KpiReport(namedtuple(
        'KpiReport',
        ['scr', 'ssr', 'par_plus', 'par_minus', 'total_cost', 'bills',
         'inefficiency'])):
    """
    The indicators of one run. Undefined ratios are None.
    """
    __slots__ = ()

    def as_dict(self):
        return {
            fields.SCR_KEY: self.scr,
            fields.SSR_KEY: self.ssr,
            fields.PAR_PLUS_KEY: self.par_plus,
            fields.PAR_MINUS_KEY: self.par_minus,
            fields.TOTAL_COST_KEY: self.total_cost,
            fields.INEFFICIENCY_KEY: self.inefficiency,
        }


def _exported(profile, design):
    if Design.parse(design) is Design.D2:
        return sum(float(s.flow("e_ret").sum()) for s in profile)
    return sum(float(s.l_neg.sum()) for s in profile)


def _imported(profile, design):
    if Design.parse(design) is Design.D2:
        return sum(float(s.flow("i_ret").sum()) for s in profile)
    return sum(float(s.l_pos.sum()) for s in profile)


def compute_scr(profile, scenario, design=None):
    """
    Self-consumption ratio: the share of the local production that is not
    sold to the retailer.

    :raise UndefinedMetricError: when nothing is produced.
    :rtype: float
    """
    design = design or profile.design
    generated = sum(float(np.sum(m.generation)) for m in scenario.members)
    if generated <= 0:
        raise UndefinedMetricError("SCR is undefined without generation")
    return 1.0 - _exported(profile, design) / generated


def compute_ssr(profile, scenario, design=None):
    """
    Self-sufficiency ratio: the share of the load that is not bought from
    the retailer. The load is the signed net load plus the generation.

    :raise UndefinedMetricError: when the load is zero.
    :rtype: float
    """
    design = design or profile.design
    load = sum(float(s.l.sum()) + float(np.sum(m.generation))
               for s, m in zip(profile, scenario.members))
    if load <= 0:
        raise UndefinedMetricError("SSR is undefined without load")
    return 1.0 - _imported(profile, design) / load


def compute_par(profile, sign=PLUS):
    """
    Peak to average ratio of the community imports (+) or exports (-).

    :raise UndefinedMetricError: when the community never imports (exports).
    :rtype: float
    """
    if sign == PLUS:
        series = np.sum([s.l_pos for s in profile], axis=0)
    elif sign == MINUS:
        series = np.sum([s.l_neg for s in profile], axis=0)
    else:
        raise ValueError("sign must be %r or %r" % (PLUS, MINUS))
    return par_of(series)


def par_of(series):
    """
    Return T max(series) / sum(series).
    """
    series = np.asarray(series, dtype=float)
    total = float(series.sum())
    if total <= 0:
        raise UndefinedMetricError("PAR is undefined for an empty profile")
    return len(series) * float(series.max()) / total


def compute_inefficiency(bills, social_optimum):
    """
    Return (sum of bills - C*) / C*.

    :raise UndefinedMetricError: for a zero optimum.
    :rtype: float
    """
    if social_optimum == 0:
        raise UndefinedMetricError("inefficiency is undefined for C* = 0")
    return (float(np.sum(bills)) - social_optimum) / social_optimum


def _or_none(fun, *args):
    try:
        return fun(*args)
    except UndefinedMetricError as e:
        logger.debug("KPI not available: %s", e)
        return None


def inefficiency_or_none(bills, social_optimum):
    """
    The inefficiency, or None if there is no usable optimum.
    """
    if social_optimum is None:
        return None
    return _or_none(compute_inefficiency, bills, social_optimum)


def compute_kpis(profile, scenario, bills, social_optimum=None):
    """
    Gather every indicator of a profile.

    :param bills: the member bills of the run.
    :param social_optimum: C* of the design, for the inefficiency.
    :rtype: KpiReport
    """
    design = profile.design
    return KpiReport(
        _or_none(compute_scr, profile, scenario, design),
        _or_none(compute_ssr, profile, scenario, design),
        _or_none(compute_par, profile, PLUS),
        _or_none(compute_par, profile, MINUS),
        total_cost(profile, scenario).total,
        [float(b) for b in bills],
        inefficiency_or_none(bills, social_optimum))


def member_characteristics(scenario):
    """
    Return the characteristics of the members, one row each: PV capacity
    proxy, battery, total consumption and flexibility level.

    :rtype: pandas.DataFrame
    """
    dt = scenario.dt
    rows = []
    for member in scenario.members:
        flexible = sum(a.energy_total for a in member.appliances)
        consumption = float(np.sum(member.base_load)) + flexible
        capacity = member.battery.capacity if member.battery else 0.0
        power = member.battery.charge_max if member.battery else 0.0
        flexibility = None
        if consumption > 0:
            flexibility = (flexible + capacity) / consumption
        rows.append({
            fields.MEMBER_KEY: member.id,
            fields.PV_CAPACITY_KEY: float(np.max(member.generation,
                                                 initial=0.0)) / dt,
            fields.BATTERY_CAPACITY_KEY: capacity,
            fields.BATTERY_POWER_KEY: power,
            fields.CONSUMPTION_KEY: consumption,
            fields.FLEXIBILITY_KEY: flexibility,
        })
    return pd.DataFrame(rows, columns=fields.CHARACTERISTICS_COLUMNS)
