# -*- coding: utf-8 -*-
# billing.py
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
Allocation of the community cost among its members.

Three schemes:

  * net: bills proportional to keys from the minimal absolute net load each
    member can reach on its own;
  * vcg: bills proportional to keys from the absolute marginal cost each
    member brings to the community optimum;
  * cp: each member pays its own commodity and peak costs plus its share
    l_i * alpha * L of the upstream cost at every step.
"""
import logging

from collections import namedtuple
from enum import Enum

import numpy as np

from rec.market import parallel
from rec.market.central import (
    leave_one_out_costs,
    member_cost,
    solve_centralized,
    solve_member_problem,
    total_cost,
)
from rec.market.errors import DesignMismatchError
from rec.market.model import Design, variable_layout
from rec.market.utils import check


logger = logging.getLogger(__name__)


KEY_SUM_TOL = 1e-9

# Minimal net loads and marginal costs below these are solver noise.
NET_LOAD_TOL = 1e-6
MARGINAL_TOL = 1e-6


class Billing(Enum):
    NET = "net"
    VCG = "vcg"
    CP = "cp"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError("unknown billing scheme %r" % (value,))

    @property
    def keyed(self):
        """
        True for the schemes that split the total cost with keys.
        """
        return self is not Billing.CP


class DistributionKeys(namedtuple('DistributionKeys',
                                  ['K', 'scheme', 'fallback'])):
    """
    Fractions of the community cost, one per member.

    :ivar K: tuple of nonnegative fractions summing to one.
    :ivar scheme: the Billing scheme the keys come from.
    :ivar fallback: True if uniform keys replaced a degenerate computation.
    """
    __slots__ = ()

    def __new__(cls, K, scheme=None, fallback=False):
        K = tuple(float(k) for k in K)
        check(len(K) >= 1, "keys need at least one member")
        check(all(k >= 0 for k in K), "keys must be nonnegative")
        check(abs(sum(K) - 1.0) <= KEY_SUM_TOL, "keys must sum to one")
        return super(DistributionKeys, cls).__new__(cls, K, scheme, fallback)

    @classmethod
    def uniform(cls, n, scheme=None):
        return cls([1.0 / n] * n, scheme, fallback=True)

    @classmethod
    def normalize(cls, weights, scheme=None):
        """
        Keys proportional to nonnegative weights, uniform if they all
        vanish.
        """
        weights = np.asarray(weights, dtype=float)
        total = weights.sum()
        if total <= 0:
            logger.warning("Degenerate %s keys: falling back to uniform",
                           scheme.value if scheme else "distribution")
            return cls.uniform(len(weights), scheme)
        K = weights / total
        K[-1] = 1.0 - K[:-1].sum()
        return cls(np.maximum(K, 0.0), scheme)

    @property
    def max(self):
        return max(self.K)

    def __len__(self):
        return len(self.K)

    def __getitem__(self, i):
        return self.K[i]


def minimal_absolute_net_load(member, horizon):
    """
    Return min sum_t |l_t| over the individual set of a member.

    :rtype: float
    """
    layout = variable_layout(member, Design.D1, horizon)
    c = np.zeros(layout.size)
    c[layout["l_pos"]] = 1.0
    c[layout["l_neg"]] = 1.0
    value = float(solve_member_problem(member, horizon, c).objective)
    return 0.0 if value < NET_LOAD_TOL else value


def keys_net(scenario, design=Design.D1):
    """
    Keys proportional to the minimal daily absolute net load of each
    member, computed on its D1 individual set whatever the design.

    :rtype: DistributionKeys
    """
    Design.parse(design)
    minima = parallel.parallel_map(
        lambda member: minimal_absolute_net_load(member, scenario.horizon),
        scenario.members, name="net-keys")
    keys = DistributionKeys.normalize(minima, Billing.NET)
    logger.info("Net keys computed, max K=%.4f", keys.max)
    return keys


def keys_vcg(scenario, design, optimum=None):
    """
    Keys proportional to |C*(N) - C*(N without i)|, with C* the optimal
    total cost of the design.

    :param optimum: C*(N) if already known.
    :type optimum: float
    :raise ValueError: for a single member community.
    :rtype: DistributionKeys
    """
    design = Design.parse(design)
    check(scenario.N >= 2, "VCG keys need at least two members")
    if optimum is None:
        optimum = solve_centralized(scenario, design).total_cost
    without = leave_one_out_costs(scenario, design)
    noise = MARGINAL_TOL * max(1.0, abs(optimum))
    marginals = [abs(optimum - c) for c in without]
    marginals = [0.0 if m < noise else m for m in marginals]
    keys = DistributionKeys.normalize(marginals, Billing.VCG)
    logger.info("VCG keys computed, max K=%.4f", keys.max)
    return keys


def compute_keys(scenario, design, billing, optimum=None):
    """
    Return the keys of a keyed scheme, None for cp.
    """
    billing = Billing.parse(billing)
    if billing is Billing.NET:
        return keys_net(scenario, design)
    if billing is Billing.VCG:
        return keys_vcg(scenario, design, optimum)
    return None


def bill_proportional(keys, total):
    """
    Return K_i * total for every member.

    :rtype: list of float
    """
    return [k * float(total) for k in keys.K]


def bill_cp(profile, scenario, design=None):
    """
    Return the per-slot bills of a profile.

    :raise DesignMismatchError: if the profile is of another design.
    :rtype: list of float
    """
    if design is not None and Design.parse(design) is not profile.design:
        raise DesignMismatchError("cannot bill a %s profile as %s" % (
            profile.design.value, Design.parse(design).value))
    tariffs = scenario.tariffs
    L = profile.L
    return [member_cost(schedule, tariffs).total +
            tariffs.alpha * float(schedule.l.dot(L))
            for schedule in profile.schedules]


def compute_bills(profile, scenario, billing, keys=None):
    """
    Bill a profile under any scheme.

    :rtype: list of float
    """
    billing = Billing.parse(billing)
    if billing is Billing.CP:
        return bill_cp(profile, scenario)
    check(keys is not None, "%s bills need keys" % (billing.value,))
    return bill_proportional(keys, total_cost(profile, scenario).total)


def bill_ex_post(profile, scenario, design, billing, keys=None):
    """
    Allocate a centralized optimum after the fact with a billing scheme.

    :rtype: list of float
    """
    if Design.parse(design) is not profile.design:
        raise DesignMismatchError("ex-post allocation of a %s profile as %s"
                                  % (profile.design.value, design))
    return compute_bills(profile, scenario, billing, keys)


def bill_changes(game_bills, ex_post_bills):
    """
    Return the percentage change of each game bill over its ex-post
    counterpart; None where the ex-post bill is zero.

    :rtype: list
    """
    check(len(game_bills) == len(ex_post_bills),
          "bill lists have different lengths")
    changes = []
    for game, ex_post in zip(game_bills, ex_post_bills):
        if ex_post == 0:
            changes.append(None)
        else:
            changes.append(100.0 * (game - ex_post) / abs(ex_post))
    return changes
