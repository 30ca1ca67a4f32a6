# -*- coding: utf-8 -*-
# scenario.py
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
Community scenarios: members, profiles, tariffs and horizon.

A scenario is an immutable description of one day of a renewable energy
community. It is read from (and written to) a single json document:

    {
      "horizon": {"T": 24, "dt": 1.0},
      "tariffs": {"lambda_imp": [...], "lambda_exp": [...],
                  "lambda_iloc": [...], "lambda_eloc": [...],
                  "alpha": 0.00109488, "beta": 0.1096737},
      "members": [
        {"id": "m00",
         "base_load": [...], "generation": [...], "conn_limit": 20.0,
         "appliances": [{"window": [0, 1, ...], "energy_total": 1.2,
                         "power_max": 1.5}],
         "battery": {"charge_max": 5.0, "discharge_max": 5.0,
                     "capacity": 14.0, "soc_init": 7.0}}
      ]
    }

Price profiles may also be given as a single number, which is broadcast
over the horizon. `battery` may be null or absent. Energies are in kWh,
powers in kW, prices in money/kWh, alpha in money/kWh^2 and beta in
money/kW. See docs/scenario.rst.
"""
import json
import logging
import math

from collections import namedtuple

import numpy as np

from rec.market.errors import (
    InfeasibleApplianceError,
    ParseError,
    ValidationError,
)
from rec.market.utils import as_profile, check


logger = logging.getLogger(__name__)


DEFAULT_T = 24
DEFAULT_DT = 1.0

PV_HIGH = "high"
PV_LOW = "low"

# Fraction of the installed capacity reached at noon, per day type.
PV_DAY_FACTOR = {PV_HIGH: 0.8, PV_LOW: 0.12}

# Off-peak hours of the bi-hourly tariff (21h to 4h).
OFF_PEAK_HOURS = frozenset([21, 22, 23, 0, 1, 2, 3])

PEAK_PRICES = {"lambda_imp": 0.16, "lambda_exp": 0.04,
               "lambda_iloc": 0.13, "lambda_eloc": 0.05}
OFF_PEAK_PRICES = {"lambda_imp": 0.08, "lambda_exp": 0.02,
                   "lambda_iloc": 0.065, "lambda_eloc": 0.032}
GRID_ALPHA = 0.00109488
PEAK_BETA = 0.1096737

# (name, daily energy kWh, max power kW, minimum window hours)
APPLIANCE_CATALOGUE = (
    ("dishwasher", 1.2, 1.5, 3),
    ("washing machine", 1.0, 2.0, 4),
    ("clothes dryer", 2.5, 3.0, 4),
    ("electric vehicle", 10.0, 7.4, 6),
    ("heat pump", 8.0, 3.0, 12),
)

BATTERY_CAPACITY = 14.0
BATTERY_POWER = 5.0


Horizon = namedtuple('Horizon', ['T', 'dt'])

Tariffs = namedtuple(
    'Tariffs',
    ['lambda_imp', 'lambda_exp', 'lambda_iloc', 'lambda_eloc',
     'alpha', 'beta'])

Appliance = namedtuple(
    'Appliance', ['window', 'energy_total', 'power_max'])

Battery = namedtuple(
    'Battery', ['charge_max', 'discharge_max', 'capacity', 'soc_init'])

MemberAssets = namedtuple(
    'MemberAssets',
    ['id', 'base_load', 'generation', 'appliances', 'battery',
     'conn_limit'])


class Scenario(namedtuple('Scenario', ['horizon', 'tariffs', 'members'])):
    """
    One day of a community: a horizon, the tariffs and the members.
    """
    __slots__ = ()

    @property
    def N(self):
        return len(self.members)

    @property
    def T(self):
        return self.horizon.T

    @property
    def dt(self):
        return self.horizon.dt

    def without(self, index):
        """
        Return the same scenario with the member at `index` removed.

        :param index: position of the member to drop.
        :type index: int
        :rtype: Scenario
        """
        members = self.members[:index] + self.members[index + 1:]
        return Scenario(self.horizon, self.tariffs, members)


#
# Validation
#

def _check_profile(values, T, member, field, nonnegative=True):
    if len(values) != T:
        raise ValidationError(
            "%s has length %d, expected %d" % (field, len(values), T),
            member=member, field=field)
    if not all(math.isfinite(v) for v in values):
        raise ValidationError(
            "%s has non finite values" % (field,),
            member=member, field=field)
    if nonnegative and min(values) < 0:
        raise ValidationError(
            "%s has negative values" % (field,),
            member=member, field=field)


def validate_scenario(scenario):
    """
    Check every invariant of a scenario.

    :param scenario: the scenario to check.
    :type scenario: Scenario
    :raise ValidationError: naming the offending member and field.
    :raise InfeasibleApplianceError: if an appliance cannot be scheduled.
    :return: the same scenario, for chaining.
    :rtype: Scenario
    """
    horizon = scenario.horizon
    if horizon.T < 1:
        raise ValidationError("T must be at least 1", field="T")
    if not horizon.dt > 0:
        raise ValidationError("dt must be positive", field="dt")
    T, dt = horizon.T, horizon.dt

    tariffs = scenario.tariffs
    for name in ('lambda_imp', 'lambda_exp', 'lambda_iloc', 'lambda_eloc'):
        _check_profile(getattr(tariffs, name), T, None, name)
    for name in ('alpha', 'beta'):
        value = getattr(tariffs, name)
        if not (math.isfinite(value) and value >= 0):
            raise ValidationError(
                "%s must be a nonnegative number" % (name,), field=name)
    for t in range(T):
        if not tariffs.lambda_exp[t] < tariffs.lambda_imp[t]:
            raise ValidationError(
                "lambda_exp must be below lambda_imp at t=%d" % (t,),
                field="lambda_exp")
        if not tariffs.lambda_eloc[t] < tariffs.lambda_iloc[t]:
            raise ValidationError(
                "lambda_eloc must be below lambda_iloc at t=%d" % (t,),
                field="lambda_eloc")

    if len(scenario.members) < 1:
        raise ValidationError("a community needs at least one member",
                              field="members")
    seen = set()
    for member in scenario.members:
        mid = member.id
        if mid in seen:
            raise ValidationError("duplicated id", member=mid, field="id")
        seen.add(mid)
        _check_profile(member.base_load, T, mid, "base_load")
        _check_profile(member.generation, T, mid, "generation")
        if not member.conn_limit > 0:
            raise ValidationError("conn_limit must be positive",
                                  member=mid, field="conn_limit")
        for a, app in enumerate(member.appliances):
            field = "appliances[%d]" % (a,)
            _check_profile(app.window, T, mid, field + ".window")
            if any(w not in (0, 1) for w in app.window):
                raise ValidationError("window must be binary",
                                      member=mid, field=field + ".window")
            if app.energy_total < 0 or app.power_max < 0:
                raise ValidationError(
                    "energy_total and power_max must be nonnegative",
                    member=mid, field=field)
            available = sum(app.window) * app.power_max * dt
            if app.energy_total > available + 1e-12:
                raise InfeasibleApplianceError(
                    "%s needs %g kWh but its window allows %g kWh" % (
                        field, app.energy_total, available),
                    member=mid, field=field)
        battery = member.battery
        if battery is not None:
            if battery.charge_max < 0 or battery.discharge_max < 0:
                raise ValidationError(
                    "battery powers must be nonnegative",
                    member=mid, field="battery")
            if not 0 <= battery.soc_init <= battery.capacity:
                raise ValidationError(
                    "soc_init must lie within [0, capacity]",
                    member=mid, field="battery.soc_init")
    return scenario


#
# Reading and writing
#

def _require(doc, key, where):
    try:
        return doc[key]
    except (KeyError, TypeError):
        raise ParseError("missing key %r in %s" % (key, where))


def scenario_from_dict(doc):
    """
    Build and validate a scenario out of a decoded json document.

    :param doc: the decoded document.
    :type doc: dict
    :rtype: Scenario
    """
    try:
        hdoc = _require(doc, "horizon", "document")
        horizon = Horizon(int(hdoc.get("T", DEFAULT_T)),
                          float(hdoc.get("dt", DEFAULT_DT)))
        T = horizon.T

        tdoc = _require(doc, "tariffs", "document")
        tariffs = Tariffs(
            lambda_imp=as_profile(_require(tdoc, "lambda_imp", "tariffs"), T),
            lambda_exp=as_profile(_require(tdoc, "lambda_exp", "tariffs"), T),
            lambda_iloc=as_profile(
                _require(tdoc, "lambda_iloc", "tariffs"), T),
            lambda_eloc=as_profile(
                _require(tdoc, "lambda_eloc", "tariffs"), T),
            alpha=float(_require(tdoc, "alpha", "tariffs")),
            beta=float(_require(tdoc, "beta", "tariffs")))

        members = []
        for position, mdoc in enumerate(_require(doc, "members", "document")):
            where = "members[%d]" % (position,)
            appliances = tuple(
                Appliance(
                    window=tuple(
                        int(w) for w in _require(adoc, "window", where)),
                    energy_total=float(_require(adoc, "energy_total", where)),
                    power_max=float(_require(adoc, "power_max", where)))
                for adoc in mdoc.get("appliances", ()))
            bdoc = mdoc.get("battery")
            battery = None
            if bdoc is not None:
                battery = Battery(
                    charge_max=float(_require(bdoc, "charge_max", where)),
                    discharge_max=float(
                        _require(bdoc, "discharge_max", where)),
                    capacity=float(_require(bdoc, "capacity", where)),
                    soc_init=float(_require(bdoc, "soc_init", where)))
            members.append(MemberAssets(
                id=str(mdoc.get("id", "m%02d" % (position,))),
                base_load=as_profile(_require(mdoc, "base_load", where), T),
                generation=as_profile(mdoc.get("generation", 0.0), T),
                appliances=appliances,
                battery=battery,
                conn_limit=float(_require(mdoc, "conn_limit", where))))
    except (TypeError, ValueError) as exc:
        raise ParseError("malformed scenario: %s" % (exc,))

    return validate_scenario(Scenario(horizon, tariffs, tuple(members)))


def scenario_to_dict(scenario):
    """
    Return the json document describing a scenario.

    :rtype: dict
    """
    tariffs = scenario.tariffs
    return {
        "horizon": {"T": scenario.horizon.T, "dt": scenario.horizon.dt},
        "tariffs": {
            "lambda_imp": list(tariffs.lambda_imp),
            "lambda_exp": list(tariffs.lambda_exp),
            "lambda_iloc": list(tariffs.lambda_iloc),
            "lambda_eloc": list(tariffs.lambda_eloc),
            "alpha": tariffs.alpha,
            "beta": tariffs.beta,
        },
        "members": [
            {"id": member.id,
             "base_load": list(member.base_load),
             "generation": list(member.generation),
             "conn_limit": member.conn_limit,
             "appliances": [
                 {"window": list(app.window),
                  "energy_total": app.energy_total,
                  "power_max": app.power_max}
                 for app in member.appliances],
             "battery": (None if member.battery is None
                         else dict(member.battery._asdict()))}
            for member in scenario.members],
    }


def load_scenario(path):
    """
    Read and validate a scenario file.

    :param path: path to the json scenario file.
    :type path: str
    :raise ParseError: if the file is not a well formed scenario.
    :raise ValidationError: if an invariant does not hold.
    :rtype: Scenario
    """
    try:
        with open(path, 'r') as f:
            doc = json.load(f)
    except ValueError as exc:
        raise ParseError("%s: %s" % (path, exc))
    scenario = scenario_from_dict(doc)
    logger.info("Loaded scenario %s: N=%d T=%d", path, scenario.N,
                scenario.T)
    return scenario


def write_scenario(scenario, path):
    """
    Write a scenario file that load_scenario reads back identically.

    :param scenario: the scenario to write.
    :type scenario: Scenario
    :param path: destination path.
    :type path: str
    """
    with open(path, 'w') as f:
        json.dump(scenario_to_dict(scenario), f, indent=1, sort_keys=True)
        f.write("\n")


#
# Synthetic communities
#

def bihourly_tariffs(horizon):
    """
    Return the bi-hourly tariffs of the reference use case.

    Off-peak prices apply between 21h and 4h.

    :param horizon: the horizon to build the profiles for.
    :type horizon: Horizon
    :rtype: Tariffs
    """
    profiles = dict((name, []) for name in PEAK_PRICES)
    for t in range(horizon.T):
        hour = int(math.floor(t * horizon.dt)) % 24
        prices = OFF_PEAK_PRICES if hour in OFF_PEAK_HOURS else PEAK_PRICES
        for name, value in prices.items():
            profiles[name].append(value)
    return Tariffs(alpha=GRID_ALPHA, beta=PEAK_BETA,
                   **dict((k, tuple(v)) for k, v in profiles.items()))


def _hours(horizon):
    return (np.arange(horizon.T) * horizon.dt) % 24.0


def _base_load(rng, horizon):
    hours = _hours(horizon)
    daily = rng.uniform(6.0, 30.0)
    morning = np.exp(-0.5 * ((hours - rng.uniform(6.5, 8.5)) / 1.5) ** 2)
    evening = np.exp(-0.5 * ((hours - rng.uniform(18.0, 20.5)) / 2.0) ** 2)
    shape = 0.35 + 0.8 * morning + 1.2 * evening
    shape = shape * rng.uniform(0.85, 1.15, size=horizon.T)
    kw = daily / 24.0 * shape / shape.mean()
    return np.clip(kw * horizon.dt, 0.0, None)


def _generation(capacity, pv_level, horizon):
    if capacity <= 0:
        return np.zeros(horizon.T)
    hours = _hours(horizon)
    bell = np.where((hours >= 6.0) & (hours <= 20.0),
                    np.exp(-0.5 * ((hours - 13.0) / 2.6) ** 2), 0.0)
    return capacity * PV_DAY_FACTOR[pv_level] * bell * horizon.dt


def _appliance(rng, horizon, kind):
    _, energy, power, min_hours = kind
    T, dt = horizon.T, horizon.dt
    needed = int(math.ceil(energy / (power * dt)))
    length = min(T, max(needed, int(math.ceil(min_hours / dt))))
    length = int(rng.integers(length, T + 1))
    start = int(rng.integers(0, T - length + 1))
    window = [0] * T
    for t in range(start, start + length):
        window[t] = 1
    # short horizons cannot host a full cycle
    energy = min(energy, 0.8 * length * power * dt)
    return Appliance(tuple(window), float(round(energy, 6)), float(power))


def generate_synthetic(seed, n_members, horizon=None, pv_level=PV_HIGH,
                       battery_penetration=0.5):
    """
    Draw a reproducible synthetic community.

    Base loads follow a noisy double-peak daily curve, PV follows a bell
    curve over daylight hours, scaled by a capacity uniform in [0, 10] kWc
    and by the day type. Batteries go to floor(penetration * N) members,
    half charged.

    :param seed: seed of the random generator.
    :type seed: int
    :param n_members: community size.
    :type n_members: int
    :param horizon: the horizon, 24 steps of one hour by default.
    :type horizon: Horizon
    :param pv_level: "high" or "low".
    :type pv_level: str
    :param battery_penetration: fraction of members owning a battery.
    :type battery_penetration: float
    :rtype: Scenario
    """
    check(n_members >= 1, "n_members must be at least 1")
    check(pv_level in PV_DAY_FACTOR, "pv_level must be high or low")
    check(0.0 <= battery_penetration <= 1.0,
          "battery_penetration must lie within [0, 1]")
    horizon = horizon or Horizon(DEFAULT_T, DEFAULT_DT)
    rng = np.random.default_rng(seed)

    n_batteries = int(math.floor(battery_penetration * n_members))
    owners = set(int(i) for i in rng.permutation(n_members)[:n_batteries])

    members = []
    for i in range(n_members):
        base_load = _base_load(rng, horizon)
        capacity = float(rng.uniform(0.0, 10.0))
        if rng.uniform() < 0.15:
            capacity = 0.0
        generation = _generation(capacity, pv_level, horizon)
        n_appliances = int(rng.integers(0, 4))
        picks = rng.choice(len(APPLIANCE_CATALOGUE), size=n_appliances,
                           replace=False)
        appliances = tuple(
            _appliance(rng, horizon, APPLIANCE_CATALOGUE[int(p)])
            for p in sorted(picks))
        battery = None
        if i in owners:
            battery = Battery(BATTERY_POWER, BATTERY_POWER,
                              BATTERY_CAPACITY, 0.5 * BATTERY_CAPACITY)
        peak = (float(base_load.max()) +
                sum(a.power_max for a in appliances) * horizon.dt +
                (BATTERY_POWER * horizon.dt if battery else 0.0))
        members.append(MemberAssets(
            id="m%02d" % (i,),
            base_load=as_profile(np.round(base_load, 6)),
            generation=as_profile(np.round(generation, 6)),
            appliances=appliances,
            battery=battery,
            conn_limit=float(math.ceil(peak + 1.0))))

    scenario = Scenario(horizon, bihourly_tariffs(horizon), tuple(members))
    logger.debug("Generated scenario seed=%s N=%d pv=%s", seed, n_members,
                 pv_level)
    return validate_scenario(scenario)
