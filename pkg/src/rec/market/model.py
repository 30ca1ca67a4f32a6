# -*- coding: utf-8 -*-
# model.py
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
Decision variables of the community members and their constraints.

Every solver of the package works on the same per-member variable vector,
laid out as:

    x[0][0..T-1], ..., x[A-1][0..T-1]    appliance energies (kWh)
    s[0..T-1], soc[0..T-1]               battery power (kW), state of charge
                                         (kWh); only with a battery
    l_pos[0..T-1], l_neg[0..T-1]         imported / exported net load (kWh)
    i_com, e_com, i_ret, e_ret           virtual flows (kWh); design D2 only
    p_bar                                daily peak power (kW)

The constraints of one member are carried by a LinearConstraintBlock:
general rows lower <= A v <= upper plus simple bounds lb <= v <= ub, each
tagged with the constraint family it belongs to.
"""
import logging

from collections import namedtuple, OrderedDict
from enum import Enum

import numpy as np
import scipy.sparse as sp

from rec.market import config
from rec.market.errors import DesignMismatchError
from rec.market.utils import check


logger = logging.getLogger(__name__)


class Design(Enum):
    """
    Market designs: D1 couples members through the grid tariff only, D2
    adds the internal pool for excess generation.
    """
    D1 = "D1"
    D2 = "D2"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).upper())
        except ValueError:
            raise ValueError("unknown design %r" % (value,))


# Constraint families, as reported by the feasibility audit.
NET_LOAD = "net load"
PEAK = "peak"
APPLIANCE_ENERGY = "appliance energy"
APPLIANCE_WINDOW = "appliance window"
BATTERY_POWER = "battery power"
STATE_OF_CHARGE = "state of charge"
SOC_RETURN = "soc return"
IMPORT_CAP = "import cap"
EXPORT_CAP = "export cap"
PEAK_CAP = "peak cap"
COMMUNITY_EXPORT = "community export"
COMMUNITY_IMPORT = "community import"
RETAIL_IMPORT = "retail import"
RETAIL_EXPORT = "retail export"
COMMUNITY_BALANCE = "community balance"

FAMILIES = (
    NET_LOAD, PEAK, APPLIANCE_ENERGY, APPLIANCE_WINDOW, BATTERY_POWER,
    STATE_OF_CHARGE, SOC_RETURN, IMPORT_CAP, EXPORT_CAP, PEAK_CAP,
    COMMUNITY_EXPORT, COMMUNITY_IMPORT, RETAIL_IMPORT, RETAIL_EXPORT,
    COMMUNITY_BALANCE)

DEFAULT_FEASIBILITY_TOL = config.FEASIBILITY_TOL

D2_FLOWS = ("i_com", "e_com", "i_ret", "e_ret")


#
# Layout
#

class VariableLayout(object):
    """
    Ordered description of the variables of one member.

    Blocks are addressed by name ("x0", "x1", ..., "s", "soc", "l_pos",
    "l_neg", "i_com", "e_com", "i_ret", "e_ret", "p_bar"); indexing a
    layout with a name returns the slice of that block.
    """

    def __init__(self, n_appliances, has_battery, design, T):
        self.n_appliances = n_appliances
        self.has_battery = has_battery
        self.design = design
        self.T = T

        blocks = ["x%d" % (a,) for a in range(n_appliances)]
        if has_battery:
            blocks += ["s", "soc"]
        blocks += ["l_pos", "l_neg"]
        if design is Design.D2:
            blocks += list(D2_FLOWS)

        self._slices = OrderedDict()
        offset = 0
        for name in blocks:
            self._slices[name] = slice(offset, offset + T)
            offset += T
        self._slices["p_bar"] = slice(offset, offset + 1)
        self.size = offset + 1

    def __getitem__(self, name):
        return self._slices[name]

    def __contains__(self, name):
        return name in self._slices

    def __len__(self):
        return self.size

    def __eq__(self, other):
        return (isinstance(other, VariableLayout) and
                self.blocks == other.blocks and self.T == other.T)

    def __ne__(self, other):
        return not self == other

    def __repr__(self):
        return "<VariableLayout %s n=%d>" % (self.design.value, self.size)

    @property
    def blocks(self):
        return tuple(self._slices.keys())

    @property
    def p_bar(self):
        return self._slices["p_bar"].start

    def appliance(self, a):
        return self._slices["x%d" % (a,)]

    def variable_names(self):
        """
        Return the expanded name of every variable, e.g. "l_pos[3]".
        """
        names = []
        for name, sl in self._slices.items():
            if name == "p_bar":
                names.append(name)
            else:
                names.extend("%s[%d]" % (name, t)
                             for t in range(sl.stop - sl.start))
        return names


def variable_layout(member, design, horizon):
    """
    Return the variable layout of a member.

    :param member: the member assets.
    :type member: MemberAssets
    :param design: the market design.
    :type design: Design
    :param horizon: the scheduling horizon.
    :type horizon: Horizon
    :rtype: VariableLayout
    """
    return VariableLayout(len(member.appliances), member.battery is not None,
                          Design.parse(design), horizon.T)


#
# Constraint blocks
#

class LinearConstraintBlock(object):
    """
    Linear constraints of one member: lower <= A v <= upper, lb <= v <= ub.

    Equalities have lower == upper, one-sided rows carry an infinite side.
    """

    def __init__(self, A, lower, upper, row_families, lb, ub,
                 bound_families):
        self.A = sp.csr_matrix(A)
        self.lower = np.asarray(lower, dtype=float)
        self.upper = np.asarray(upper, dtype=float)
        self.row_families = tuple(row_families)
        self.lb = np.asarray(lb, dtype=float)
        self.ub = np.asarray(ub, dtype=float)
        self.bound_families = tuple(bound_families)
        check(self.A.shape == (len(self.lower), len(self.lb)),
              "Inconsistent constraint block dimensions")

    @property
    def n_vars(self):
        return self.A.shape[1]

    def rows_of(self, family):
        """
        Return the indices of the rows of a family.
        """
        return [k for k, f in enumerate(self.row_families) if f == family]

    def violations(self, v):
        """
        Return the largest violation per constraint family at `v`.

        :param v: a point of the member variable space.
        :type v: numpy.ndarray
        :rtype: dict
        """
        result = {}
        Av = self.A.dot(v)
        row_gap = np.maximum(np.maximum(self.lower - Av, Av - self.upper), 0)
        bound_gap = np.maximum(np.maximum(self.lb - v, v - self.ub), 0)
        for gaps, families in ((row_gap, self.row_families),
                               (bound_gap, self.bound_families)):
            for gap, family in zip(gaps, families):
                if family is None:
                    continue
                result[family] = max(result.get(family, 0.0), float(gap))
        return result


class _RowBuilder(object):

    def __init__(self, n):
        self.n = n
        self.rows, self.cols, self.vals = [], [], []
        self.lower, self.upper, self.families = [], [], []

    def add(self, coefficients, lower, upper, family):
        row = len(self.lower)
        for col, val in coefficients:
            self.rows.append(row)
            self.cols.append(col)
            self.vals.append(val)
        self.lower.append(lower)
        self.upper.append(upper)
        self.families.append(family)

    def matrix(self):
        return sp.csr_matrix(
            (self.vals, (self.rows, self.cols)),
            shape=(len(self.lower), self.n))


def individual_constraints(member, design, horizon):
    """
    Build the individual constraint set of a member.

    :param member: the member assets.
    :type member: MemberAssets
    :param design: the market design.
    :type design: Design
    :param horizon: the scheduling horizon.
    :type horizon: Horizon
    :rtype: LinearConstraintBlock
    """
    design = Design.parse(design)
    layout = variable_layout(member, design, horizon)
    T, dt = horizon.T, horizon.dt
    n = layout.size
    inf = np.inf

    lb = np.full(n, -inf)
    ub = np.full(n, inf)
    bound_families = [None] * n

    def bound(name, lo, hi, family):
        sl = layout[name]
        lb[sl] = lo
        ub[sl] = hi
        for k in range(sl.start, sl.stop):
            bound_families[k] = family

    rows = _RowBuilder(n)
    l_pos, l_neg, p_bar = layout["l_pos"], layout["l_neg"], layout.p_bar

    for t in range(T):
        coefficients = [(l_pos.start + t, 1.0), (l_neg.start + t, -1.0)]
        for a in range(len(member.appliances)):
            coefficients.append((layout.appliance(a).start + t, -1.0))
        if layout.has_battery:
            coefficients.append((layout["s"].start + t, -dt))
        rhs = member.base_load[t] - member.generation[t]
        rows.add(coefficients, rhs, rhs, NET_LOAD)

    for t in range(T):
        rows.add([(l_pos.start + t, 1.0 / dt), (p_bar, -1.0)],
                 -inf, 0.0, PEAK)

    for a, app in enumerate(member.appliances):
        sl = layout.appliance(a)
        rows.add([(sl.start + t, float(app.window[t]))
                  for t in range(T) if app.window[t]],
                 app.energy_total, app.energy_total, APPLIANCE_ENERGY)
        lb[sl] = 0.0
        ub[sl] = [app.power_max * w * dt for w in app.window]
        for k in range(sl.start, sl.stop):
            bound_families[k] = APPLIANCE_WINDOW

    battery = member.battery
    if battery is not None:
        s, soc = layout["s"], layout["soc"]
        bound("s", -battery.discharge_max, battery.charge_max, BATTERY_POWER)
        bound("soc", 0.0, battery.capacity, STATE_OF_CHARGE)
        rows.add([(soc.start, 1.0), (s.start, -dt)],
                 battery.soc_init, battery.soc_init, STATE_OF_CHARGE)
        for t in range(1, T):
            rows.add([(soc.start + t, 1.0), (soc.start + t - 1, -1.0),
                      (s.start + t, -dt)], 0.0, 0.0, STATE_OF_CHARGE)
        rows.add([(s.start + t, dt) for t in range(T)], 0.0, 0.0,
                 SOC_RETURN)

    bound("l_pos", 0.0, member.conn_limit, IMPORT_CAP)
    bound("l_neg", 0.0, 0.0, EXPORT_CAP)
    ub[l_neg] = member.generation
    lb[p_bar] = 0.0
    ub[p_bar] = member.conn_limit / dt
    bound_families[p_bar] = PEAK_CAP

    if design is Design.D2:
        i_com, e_com = layout["i_com"], layout["e_com"]
        i_ret, e_ret = layout["i_ret"], layout["e_ret"]
        bound("e_com", 0.0, inf, COMMUNITY_EXPORT)
        bound("i_com", 0.0, inf, COMMUNITY_IMPORT)
        bound("i_ret", 0.0, inf, RETAIL_IMPORT)
        bound("e_ret", 0.0, inf, RETAIL_EXPORT)
        for t in range(T):
            rows.add([(e_com.start + t, 1.0), (l_neg.start + t, -1.0)],
                     -inf, 0.0, COMMUNITY_EXPORT)
        for t in range(T):
            rows.add([(i_com.start + t, 1.0), (l_pos.start + t, -1.0)],
                     -inf, 0.0, COMMUNITY_IMPORT)
        for t in range(T):
            rows.add([(i_ret.start + t, 1.0), (i_com.start + t, 1.0),
                      (l_pos.start + t, -1.0)], 0.0, 0.0, RETAIL_IMPORT)
        for t in range(T):
            rows.add([(e_ret.start + t, 1.0), (e_com.start + t, 1.0),
                      (l_neg.start + t, -1.0)], 0.0, 0.0, RETAIL_EXPORT)

    return LinearConstraintBlock(rows.matrix(), rows.lower, rows.upper,
                                 rows.families, lb, ub, bound_families)


#
# Linear maps shared by the cost functions
#

def net_load_operator(layout):
    """
    Return the T x n matrix G with G v = l_pos - l_neg.

    :rtype: scipy.sparse.csr_matrix
    """
    T = layout.T
    eye = sp.identity(T, format="csr")
    G = sp.lil_matrix((T, layout.size))
    G[:, layout["l_pos"]] = eye
    G[:, layout["l_neg"]] = -eye
    return G.tocsr()


def balance_operator(layout):
    """
    Return the T x n matrix H with H v = e_com - i_com (design D2).

    :rtype: scipy.sparse.csr_matrix
    """
    if layout.design is not Design.D2:
        raise DesignMismatchError("virtual flows only exist in design D2")
    T = layout.T
    eye = sp.identity(T, format="csr")
    H = sp.lil_matrix((T, layout.size))
    H[:, layout["e_com"]] = eye
    H[:, layout["i_com"]] = -eye
    return H.tocsr()


def commodity_cost_vector(layout, tariffs):
    """
    Return the linear cost coefficients of a member: retail and local
    commodity prices and the peak penalty.

    D1 charges l_pos at lambda_imp and pays l_neg at lambda_exp. D2 charges
    retail and community purchases at lambda_imp / lambda_iloc and pays
    retail and community sales at lambda_exp / lambda_eloc.

    :rtype: numpy.ndarray
    """
    c = np.zeros(layout.size)
    if layout.design is Design.D1:
        c[layout["l_pos"]] = tariffs.lambda_imp
        c[layout["l_neg"]] = np.negative(tariffs.lambda_exp)
    else:
        c[layout["i_ret"]] = tariffs.lambda_imp
        c[layout["i_com"]] = tariffs.lambda_iloc
        c[layout["e_com"]] = np.negative(tariffs.lambda_eloc)
        c[layout["e_ret"]] = np.negative(tariffs.lambda_exp)
    c[layout.p_bar] = tariffs.beta
    return c


#
# Schedules
#

NetLoad = namedtuple('NetLoad', ['value', 'imported', 'exported'])


def split_net_load(value):
    """
    Split a signed net load into its import and export parts.

    :rtype: NetLoad
    """
    value = float(value)
    return NetLoad(value, max(0.0, value), max(0.0, -value))


class Schedule(object):
    """
    The decision vector of one member, with named access to its blocks.
    """

    def __init__(self, layout, vector):
        vector = np.array(vector, dtype=float)
        check(vector.shape == (layout.size,),
              "Schedule vector does not match its layout")
        vector.setflags(write=False)
        self.layout = layout
        self.vector = vector

    @classmethod
    def zeros(cls, layout):
        return cls(layout, np.zeros(layout.size))

    def __getitem__(self, name):
        return self.vector[self.layout[name]]

    @property
    def design(self):
        return self.layout.design

    @property
    def x(self):
        return np.array([self.vector[self.layout.appliance(a)]
                         for a in range(self.layout.n_appliances)]
                        ).reshape(self.layout.n_appliances, self.layout.T)

    @property
    def s(self):
        if "s" in self.layout:
            return self["s"]
        return np.zeros(self.layout.T)

    @property
    def soc(self):
        if "soc" in self.layout:
            return self["soc"]
        return np.zeros(self.layout.T)

    @property
    def l_pos(self):
        return self["l_pos"]

    @property
    def l_neg(self):
        return self["l_neg"]

    @property
    def l(self):
        return self["l_pos"] - self["l_neg"]

    @property
    def p_bar(self):
        return float(self.vector[self.layout.p_bar])

    def flow(self, name):
        """
        Return a virtual flow (i_com, e_com, i_ret or e_ret).
        """
        if name not in self.layout:
            raise DesignMismatchError(
                "%s only exists in design D2" % (name,))
        return self[name]

    def replace(self, name, values):
        """
        Return a copy of this schedule with one block replaced.

        :rtype: Schedule
        """
        vector = self.vector.copy()
        vector[self.layout[name]] = values
        return Schedule(self.layout, vector)

    def __repr__(self):
        return "<Schedule %s n=%d>" % (self.design.value, self.layout.size)


def net_load(schedule, member, t, dt):
    """
    Return the signed net load of a member at step t and its split.

    :param schedule: the member schedule.
    :type schedule: Schedule
    :param member: the member assets.
    :type member: MemberAssets
    :param t: the time step.
    :type t: int
    :param dt: step duration in hours.
    :type dt: float
    :rtype: NetLoad
    """
    consumption = float(schedule.x[:, t].sum()) if len(schedule.x) else 0.0
    value = (consumption + member.base_load[t] +
             float(schedule.s[t]) * dt - member.generation[t])
    return split_net_load(value)


class CommunityProfile(object):
    """
    The schedules of every member of a community.
    """

    def __init__(self, schedules, design):
        self.schedules = tuple(schedules)
        self.design = Design.parse(design)
        for schedule in self.schedules:
            if schedule.design is not self.design:
                raise DesignMismatchError(
                    "schedule of design %s in a %s profile" % (
                        schedule.design.value, self.design.value))

    @classmethod
    def from_vectors(cls, layouts, vectors, design):
        return cls([Schedule(layout, v)
                    for layout, v in zip(layouts, vectors)], design)

    @property
    def N(self):
        return len(self.schedules)

    @property
    def L(self):
        """
        Aggregate net load of the community, per step.
        """
        return np.sum([sch.l for sch in self.schedules], axis=0)

    def vectors(self):
        return [sch.vector for sch in self.schedules]

    def layouts(self):
        return [sch.layout for sch in self.schedules]

    def vector(self):
        """
        Return the stacked decision vector of all members.
        """
        return np.concatenate(self.vectors())

    def replace(self, i, schedule):
        """
        Return a copy of this profile with the schedule of member i
        replaced.
        """
        schedules = list(self.schedules)
        schedules[i] = schedule
        return CommunityProfile(schedules, self.design)

    def __len__(self):
        return len(self.schedules)

    def __iter__(self):
        return iter(self.schedules)

    def __getitem__(self, i):
        return self.schedules[i]


def shared_constraint_residual(profile):
    """
    Return h, the imbalance of the community pool per step:
    sum of e_com minus sum of i_com.

    :param profile: a design D2 community profile.
    :type profile: CommunityProfile
    :rtype: numpy.ndarray
    """
    if profile.design is not Design.D2:
        raise DesignMismatchError("the pool balance only exists in D2")
    return np.sum([sch.flow("e_com") - sch.flow("i_com")
                   for sch in profile.schedules], axis=0)


#
# Feasibility audit
#

class FeasibilityReport(object):
    """
    Largest constraint violation per family, and the worst offenders.

    :ivar violations: family -> largest violation over all members.
    :ivar offenders: list of (violation, family, member id), worst first,
                     restricted to violations above tolerance.
    """

    def __init__(self, violations, offenders, tol):
        self.violations = violations
        self.offenders = offenders
        self.tol = tol

    @property
    def feasible(self):
        return not self.offenders

    @property
    def max_violation(self):
        return max(self.violations.values()) if self.violations else 0.0

    def __repr__(self):
        if self.feasible:
            return "<FeasibilityReport feasible>"
        return "<FeasibilityReport %d offenders, worst %s>" % (
            len(self.offenders), self.offenders[0][1])


def check_feasibility(profile, scenario, design=None,
                      tol=DEFAULT_FEASIBILITY_TOL):
    """
    Audit a community profile against every constraint family.

    :param profile: the profile to audit.
    :type profile: CommunityProfile
    :param scenario: the scenario the profile was computed for.
    :type scenario: Scenario
    :param design: the design to audit against; the profile's by default.
    :type design: Design
    :param tol: absolute tolerance.
    :type tol: float
    :rtype: FeasibilityReport
    """
    design = profile.design if design is None else Design.parse(design)
    if design is not profile.design:
        raise DesignMismatchError("profile is %s, audit asked for %s" % (
            profile.design.value, design.value))
    check(len(profile) == scenario.N,
          "Profile and scenario have different sizes")

    violations = dict((family, 0.0) for family in FAMILIES)
    offenders = []
    for member, schedule in zip(scenario.members, profile.schedules):
        block = individual_constraints(member, design, scenario.horizon)
        for family, gap in block.violations(schedule.vector).items():
            violations[family] = max(violations[family], gap)
            if gap > tol:
                offenders.append((gap, family, member.id))

    if design is Design.D2:
        imbalance = float(np.max(np.abs(
            shared_constraint_residual(profile)), initial=0.0))
        violations[COMMUNITY_BALANCE] = imbalance
        if imbalance > tol:
            offenders.append((imbalance, COMMUNITY_BALANCE, None))
    else:
        del violations[COMMUNITY_BALANCE]
    for family in (COMMUNITY_EXPORT, COMMUNITY_IMPORT, RETAIL_IMPORT,
                   RETAIL_EXPORT):
        if design is Design.D1:
            violations.pop(family, None)

    offenders.sort(key=lambda item: -item[0])
    if offenders:
        logger.debug("Infeasible profile, worst: %s", offenders[0])
    return FeasibilityReport(violations, offenders, tol)


def embed_in_d2(profile, scenario):
    """
    Map a D1 profile into the D2 strategy space, without any exchange
    through the pool: retail flows carry the whole net load.

    :param profile: a design D1 profile.
    :type profile: CommunityProfile
    :rtype: CommunityProfile
    """
    if profile.design is not Design.D1:
        raise DesignMismatchError("only D1 profiles can be embedded")
    schedules = []
    for member, schedule in zip(scenario.members, profile.schedules):
        layout = variable_layout(member, Design.D2, scenario.horizon)
        vector = np.zeros(layout.size)
        for name in schedule.layout.blocks:
            vector[layout[name]] = schedule[name]
        vector[layout["i_ret"]] = schedule.l_pos
        vector[layout["e_ret"]] = schedule.l_neg
        schedules.append(Schedule(layout, vector))
    return CommunityProfile(schedules, Design.D2)
