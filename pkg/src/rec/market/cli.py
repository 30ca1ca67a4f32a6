# -*- coding: utf-8 -*-
# cli.py
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
Command line front end.

  rec-market generate   draw a synthetic community and write it
  rec-market run        benchmark, centralized or game run on a scenario
  rec-market batch      the same run over a list of seeds (days)
  rec-market compare    compare run directories made on one scenario

Exit codes: 0 success, 2 invalid input, 3 solver failure, 4 no
convergence. Errors are printed on stderr as one json object.
"""
import argparse
import json
import logging
import os
import sys

from zope.interface import implementer

from rec.market import __version__
from rec.market.billing import Billing, bill_ex_post, compute_keys
from rec.market.central import (
    member_cost,
    solve_centralized,
    solve_individual_benchmark,
)
from rec.market.decorators import timed
from rec.market.errors import (
    ComparisonError,
    ConvergenceError,
    DesignMismatchError,
    ScenarioError,
    SolverError,
)
from rec.market.fields import fields
from rec.market.games.gnep import pda_shared_solve
from rec.market.games.interfaces import IProgressObserver
from rec.market.games.nep import pda_solve
from rec.market.games.proximal import (
    DEFAULT_MAX_INNER,
    DEFAULT_MAX_OUTER,
    DEFAULT_RHO,
    DEFAULT_TOL_BALANCE,
    DEFAULT_TOL_INNER,
    DEFAULT_TOL_OUTER,
    GameConfig,
)
from rec.market.metrics import compute_kpis
from rec.market.model import Design, check_feasibility
from rec.market.reports import (
    RunResult,
    batch_tables,
    compare_runs,
    read_profile,
    write_batch,
    write_comparison,
    write_run,
)
from rec.market.scenario import (
    DEFAULT_DT,
    DEFAULT_T,
    PV_DAY_FACTOR,
    PV_HIGH,
    Horizon,
    generate_synthetic,
    load_scenario,
    write_scenario,
)
from rec.market.utils import accumulator, check


logger = logging.getLogger(__name__)


EXIT_OK = 0
EXIT_INVALID = 2
EXIT_SOLVER = 3
EXIT_NO_CONVERGENCE = 4

DEFAULT_MEMBERS = 55
DEFAULT_BATTERY_PENETRATION = 0.5

# Outer iterations between two progress lines.
PROGRESS_EVERY = 10

TAU_AUTO = "auto"
START_CHOICES = (fields.MODE_BENCHMARK, fields.MODE_CENTRAL)

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


class RunRequest(object):
    """
    What to run: where the scenario comes from, the design, the mode and
    the game parameters.

    :param scenario_path: a scenario file, or None to generate from `seed`.
    :param seed: seed of the synthetic scenario.
    :param start: "benchmark", "central" or a run directory.
    :param tau: TAU_AUTO or a positive number.
    """

    def __init__(self, design, mode, output, scenario_path=None, seed=None,
                 members=DEFAULT_MEMBERS, T=DEFAULT_T, dt=DEFAULT_DT,
                 pv_level=PV_HIGH,
                 battery_penetration=DEFAULT_BATTERY_PENETRATION,
                 billing=None, tau=TAU_AUTO, rho=DEFAULT_RHO,
                 tol_inner=DEFAULT_TOL_INNER, tol_outer=DEFAULT_TOL_OUTER,
                 tol_balance=DEFAULT_TOL_BALANCE,
                 max_outer=DEFAULT_MAX_OUTER, max_inner=DEFAULT_MAX_INNER,
                 start=fields.MODE_BENCHMARK, enforce_tau_bound=True,
                 audit=True):
        check(mode in fields.MODES, "unknown mode %r" % (mode,))
        check((scenario_path is None) != (seed is None),
              "give either a scenario file or a seed")
        if mode == fields.MODE_GAME:
            check(billing is not None, "game runs need a billing scheme")
        check(start in START_CHOICES or os.path.isdir(start),
              "start must be %s or a run directory" % (
                  " or ".join(START_CHOICES),))
        check(tau == TAU_AUTO or float(tau) > 0,
              "tau must be 'auto' or positive")
        self.design = Design.parse(design)
        self.mode = mode
        self.output = output
        self.scenario_path = scenario_path
        self.seed = seed
        self.members = members
        self.horizon = Horizon(T, dt)
        self.pv_level = pv_level
        self.battery_penetration = battery_penetration
        self.billing = Billing.parse(billing) if billing else None
        self.tau = tau
        self.rho = rho
        self.tol_inner = tol_inner
        self.tol_outer = tol_outer
        self.tol_balance = tol_balance
        self.max_outer = max_outer
        self.max_inner = max_inner
        self.start = start
        self.enforce_tau_bound = enforce_tau_bound
        self.audit = audit

    @classmethod
    def from_args(cls, args, seed=None, output=None):
        """
        Build a request out of parsed command line arguments.
        """
        return cls(
            args.design, args.mode, output or args.output,
            scenario_path=args.scenario,
            seed=seed if seed is not None else args.seed,
            members=args.members, T=args.T, dt=args.dt,
            pv_level=args.pv, battery_penetration=args.batteries,
            billing=args.billing, tau=args.tau, rho=args.rho,
            tol_inner=args.tol_inner, tol_outer=args.tol_outer,
            tol_balance=args.tol_balance, max_outer=args.max_outer,
            max_inner=args.max_inner, start=args.start,
            enforce_tau_bound=not args.allow_small_tau,
            audit=not args.no_audit)

    def game_config(self):
        """
        :rtype: GameConfig
        """
        tau = None if self.tau == TAU_AUTO else float(self.tau)
        return GameConfig(
            billing=self.billing, tau=tau, rho=self.rho,
            tol_inner=self.tol_inner, tol_outer=self.tol_outer,
            tol_balance=self.tol_balance, max_outer=self.max_outer,
            max_inner=self.max_inner,
            enforce_tau_bound=self.enforce_tau_bound, audit=self.audit)


@implementer(IProgressObserver)
class ProgressLogger(object):
    """
    Logs a line every PROGRESS_EVERY outer iterations.
    """

    def __init__(self, every=PROGRESS_EVERY):
        self.rows = []
        self._log = accumulator(self._flush, every)

    def _flush(self, row):
        logger.debug("outer %d: residual %.3e", row.outer, row.residual)
        if row.outer % PROGRESS_EVERY == 0:
            logger.info("outer %d: %d inner sweeps, residual %.3e, total "
                        "cost %.6f", row.outer, row.inner, row.residual,
                        row.total_cost)

    def outer_step(self, row):
        self.rows.append(row)
        self._log(row)

    def flush(self):
        self._log(None, flush=True)


class Runner(object):
    """
    Carries out one RunRequest and writes its outputs.
    """

    def __init__(self, request):
        self.request = request
        self.timings = []
        self.scenario = None
        self.central = None
        self.keys = None

    @timed("scenario")
    def load(self):
        request = self.request
        if request.scenario_path is not None:
            self.scenario = load_scenario(request.scenario_path)
        else:
            self.scenario = generate_synthetic(
                request.seed, request.members, request.horizon,
                request.pv_level, request.battery_penetration)
        return self.scenario

    @timed("benchmark")
    def benchmark(self):
        return solve_individual_benchmark(self.scenario)

    @timed("central")
    def solve_central(self):
        self.central = solve_centralized(self.scenario, self.request.design)
        return self.central

    @timed("keys")
    def solve_keys(self):
        optimum = self.central.total_cost if self.central else None
        self.keys = compute_keys(self.scenario, self.request.design,
                                 self.request.billing, optimum)
        return self.keys

    @timed("game")
    def solve_game(self, observer):
        request = self.request
        start = request.start
        if start == fields.MODE_CENTRAL:
            start = self.central
        elif start != fields.MODE_BENCHMARK:
            start = read_profile(start, self.scenario)
        solve = pda_solve
        if request.design is Design.D2:
            solve = pda_shared_solve
        return solve(self.scenario, request.game_config(), start=start,
                     keys=self.keys,
                     social_optimum=self.central.total_cost,
                     observer=observer)

    def _result(self, profile, bills, cost, **kwargs):
        request = self.request
        social_optimum = kwargs.pop('social_optimum', None)
        return RunResult(
            request.mode, self.scenario, profile, bills, cost,
            compute_kpis(profile, self.scenario, bills, social_optimum),
            billing=request.billing, social_optimum=social_optimum,
            seed=request.seed, timings=self.timings,
            feasibility=check_feasibility(profile, self.scenario),
            **kwargs)

    def _billed(self, profile):
        if self.request.billing is None:
            return None
        if self.request.billing.keyed and self.keys is None:
            self.solve_keys()
        return bill_ex_post(profile, self.scenario, profile.design,
                            self.request.billing, self.keys)

    def run(self):
        """
        Run and write the outputs.

        :raise ConvergenceError: after writing the last iterate, if a game
                                 did not converge.
        :rtype: RunResult
        """
        request = self.request
        self.load()
        if request.mode == fields.MODE_BENCHMARK:
            bench = self.benchmark()
            bills = self._billed(bench.profile) or bench.bills
            result = self._result(bench.profile, bills, bench.cost,
                                  keys=self.keys)
        elif request.mode == fields.MODE_CENTRAL:
            central = self.solve_central()
            bills = self._billed(central.profile) or \
                [member_cost(s, self.scenario.tariffs).total
                 for s in central.profile]
            result = self._result(central.profile, bills, central.cost,
                                  keys=self.keys, prices=central.prices,
                                  social_optimum=central.total_cost)
        else:
            self.solve_central()
            if request.billing.keyed:
                self.solve_keys()
            observer = ProgressLogger()
            try:
                report = self.solve_game(observer)
            except ConvergenceError as e:
                observer.flush()
                if e.report is not None:
                    write_run(self._game_result(e.report), request.output)
                raise
            observer.flush()
            result = self._game_result(report)

        if result.feasibility is not None and \
                not result.feasibility.feasible:
            logger.warning("The %s profile violates its constraints by %g",
                           request.mode, result.feasibility.max_violation)
        write_run(result, request.output)
        return result

    def _game_result(self, report):
        ex_post = bill_ex_post(self.central.profile, self.scenario,
                               self.request.design, self.request.billing,
                               self.keys)
        return self._result(
            report.profile, report.bills, report.cost, keys=self.keys,
            ex_post_bills=ex_post, prices=getattr(report, 'pi', None),
            social_optimum=self.central.total_cost, game=report)


#
# Sub-commands
#

def _run_requests(args):
    seeds = args.seed if args.seed is not None else [None]
    requests = []
    for seed in seeds:
        output = args.output
        if len(seeds) > 1:
            output = os.path.join(args.output, "seed-%d" % (seed,))
        requests.append(RunRequest.from_args(args, seed=seed, output=output))
    return requests


def do_run(args):
    for request in _run_requests(args):
        result = Runner(request).run()
        print("%s %s: total cost %.6f -> %s" % (
            request.mode, request.design.value, result.total_cost,
            request.output))
    return EXIT_OK


def do_batch(args):
    check(args.seed is not None and args.scenario is None,
          "batches run over seeds")
    summaries = []
    for request in _run_requests(args):
        Runner(request).run()
        with open(os.path.join(request.output, fields.SUMMARY_FILE)) as f:
            summaries.append(json.load(f))
    days, stats = batch_tables(summaries, args.seed)
    write_batch(days, stats, args.output)
    print(stats.to_string(index=False))
    return EXIT_OK


def do_compare(args):
    comparison, deltas = compare_runs(args.runs)
    if args.output:
        write_comparison(comparison, deltas, args.output)
    print(comparison.to_string(index=False))
    return EXIT_OK


def do_generate(args):
    scenario = generate_synthetic(
        args.seed, args.members, Horizon(args.T, args.dt), args.pv,
        args.batteries)
    write_scenario(scenario, args.output)
    print("wrote %d members to %s" % (scenario.N, args.output))
    return EXIT_OK


def _positive_int(value):
    number = int(value)
    if number < 1:
        raise argparse.ArgumentTypeError("%s is not a positive integer" % (
            value,))
    return number


def _add_community_arguments(parser):
    parser.add_argument('--members', type=_positive_int,
                        default=DEFAULT_MEMBERS,
                        help='members of a synthetic community')
    parser.add_argument('--T', type=_positive_int, default=DEFAULT_T,
                        help='time steps of the horizon')
    parser.add_argument('--dt', type=float, default=DEFAULT_DT,
                        help='step duration, in hours')
    parser.add_argument('--pv', choices=sorted(PV_DAY_FACTOR),
                        default=PV_HIGH, help='PV production of the day')
    parser.add_argument('--batteries', type=float,
                        default=DEFAULT_BATTERY_PENETRATION,
                        help='share of members owning a battery')


def _add_run_arguments(parser):
    parser.add_argument('--scenario', help='a scenario json file')
    parser.add_argument('--seed', type=int, nargs='+',
                        help='seeds of synthetic scenarios')
    _add_community_arguments(parser)
    parser.add_argument('--design', choices=[d.value for d in Design],
                        default=Design.D1.value)
    parser.add_argument('--mode', choices=fields.MODES,
                        default=fields.MODE_CENTRAL)
    parser.add_argument('--billing', choices=[b.value for b in Billing])
    parser.add_argument('--tau', default=TAU_AUTO,
                        help="one proximal weight for every player, or 'auto' "
                             "for weights set from the convergence bounds")
    parser.add_argument('--rho', type=float, default=DEFAULT_RHO)
    parser.add_argument('--tol-inner', type=float, default=DEFAULT_TOL_INNER)
    parser.add_argument('--tol-outer', type=float, default=DEFAULT_TOL_OUTER)
    parser.add_argument('--tol-balance', type=float,
                        default=DEFAULT_TOL_BALANCE)
    parser.add_argument('--max-outer', type=_positive_int,
                        default=DEFAULT_MAX_OUTER)
    parser.add_argument('--max-inner', type=_positive_int,
                        default=DEFAULT_MAX_INNER)
    parser.add_argument('--start', default=fields.MODE_BENCHMARK,
                        help="'benchmark', 'central' or a run directory")
    parser.add_argument('--allow-small-tau', action='store_true',
                        help='only warn when tau is below the bound')
    parser.add_argument('--no-audit', action='store_true',
                        help='skip the best response audit of games')
    parser.add_argument('--output', '-o', required=True,
                        help='output directory')


def build_parser():
    parser = argparse.ArgumentParser(
        prog='rec-market',
        description='Day-ahead scheduling of renewable energy communities.')
    parser.add_argument('--version', action='version',
                        version='%(prog)s ' + __version__)
    parser.add_argument('--verbose', '-v', action='count', default=0,
                        help='more logs, repeat for debug')
    parser.add_argument('--log-file', help='write logs to this file')
    commands = parser.add_subparsers(dest='command')
    commands.required = True

    run = commands.add_parser('run', help='run one scenario')
    _add_run_arguments(run)
    run.set_defaults(func=do_run)

    batch = commands.add_parser('batch', help='run a list of seeds')
    _add_run_arguments(batch)
    batch.set_defaults(func=do_batch)

    compare = commands.add_parser('compare', help='compare runs')
    compare.add_argument('runs', nargs='+', help='run directories')
    compare.add_argument('--output', '-o', help='where to write tables')
    compare.set_defaults(func=do_compare)

    generate = commands.add_parser('generate',
                                   help='write a synthetic scenario')
    generate.add_argument('--seed', type=int, required=True)
    _add_community_arguments(generate)
    generate.add_argument('--output', '-o', required=True,
                          help='scenario file to write')
    generate.set_defaults(func=do_generate)
    return parser


def setup_logging(verbose, log_file=None):
    level = logging.WARNING
    if verbose == 1:
        level = logging.INFO
    elif verbose > 1:
        level = logging.DEBUG
    logging.basicConfig(level=level, format=LOG_FORMAT, filename=log_file)


def exit_code_for(error):
    """
    Return the exit code of an error.
    """
    if isinstance(error, ConvergenceError):
        return EXIT_NO_CONVERGENCE
    if isinstance(error, SolverError):
        return EXIT_SOLVER
    return EXIT_INVALID


def report_error(error, stream=None):
    """
    Print an error on stderr as a json object.
    """
    stream = stream or sys.stderr
    doc = {"error": error.__class__.__name__,
           "message": str(error),
           "exit_code": exit_code_for(error)}
    for attr in ("member", "field"):
        if getattr(error, attr, None) is not None:
            doc[attr] = getattr(error, attr)
    stream.write(json.dumps(doc, sort_keys=True) + "\n")
    return doc["exit_code"]


def main(argv=None):
    """
    Entry point of the rec-market command.

    :rtype: int
    """
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(args.verbose, args.log_file)
    try:
        return args.func(args)
    except (ScenarioError, DesignMismatchError, ComparisonError,
            SolverError, ConvergenceError, ValueError, IOError,
            OSError) as e:
        logger.error("%s failed: %s", args.command, e)
        if args.verbose > 1:
            logger.exception(e)
        return report_error(e)


if __name__ == "__main__":
    sys.exit(main())
