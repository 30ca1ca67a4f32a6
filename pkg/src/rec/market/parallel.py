# -*- coding: utf-8 -*-
# parallel.py
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
Dispatch of independent solves to a Twisted thread pool.

Jobs are pure functions over frozen inputs. Results are stored by index, so
the outcome never depends on the order in which workers finish.
"""
import logging
import threading

from twisted.python.failure import Failure
from twisted.python.threadpool import ThreadPool

from rec.market import config


logger = logging.getLogger(__name__)


def _errback(name, failure):
    """
    Log a failure coming back from a worker.

    :param name: the name of the failed job.
    :type name: str
    :param failure: a twisted failure
    :type failure: Failure
    """
    logger.warning('Error in job: %s' % (name,))
    logger.exception(failure.getTraceback())


class WorkerPool(object):
    """
    A Twisted thread pool kept running across many batches of jobs.

    Use it as a context manager, the threads are stopped on exit. No thread
    is started if the REC_MARKET_DEBUG environment variable is set or if
    the pool has a single worker: jobs then run in the calling thread.

    :param size: the number of threads, REC_MARKET_THREADS by default.
    :type size: int
    :param name: a label for logs and thread names.
    :type name: str
    """

    def __init__(self, size=None, name="rec-market"):
        self.size = config.pool_size() if size is None else size
        self.name = name
        self._pool = None

    @property
    def running(self):
        return self._pool is not None

    def start(self):
        if self._pool is None and not config.debug_enabled() \
                and self.size > 1:
            self._pool = ThreadPool(minthreads=self.size,
                                    maxthreads=self.size, name=self.name)
            self._pool.start()
        return self

    def stop(self):
        if self._pool is not None:
            self._pool.stop()
            self._pool = None

    def __enter__(self):
        return self.start()

    def __exit__(self, *exc_info):
        self.stop()

    def map(self, fun, items, name=None):
        """
        Apply `fun` to every item in the pool threads.

        This acts as a barrier: it returns once every job is done. If any
        job raised, the first error (in item order) is raised again here.

        :param fun: a callable taking one item.
        :type fun: callable
        :param items: the items to process.
        :type items: iterable
        :return: the list of results, in item order.
        :rtype: list
        """
        items = list(items)
        name = name or getattr(fun, '__name__', 'job')
        if self._pool is None or len(items) <= 1:
            return [fun(item) for item in items]

        results = [None] * len(items)
        errors = [None] * len(items)
        pending = [len(items)]
        lock = threading.Lock()
        done = threading.Event()

        def _on_result(index, success, result):
            if success:
                results[index] = result
            else:
                errors[index] = result
                _errback(name, result)
            with lock:
                pending[0] -= 1
                if pending[0] == 0:
                    done.set()

        for index, item in enumerate(items):
            self._pool.callInThreadWithCallback(
                lambda success, result, index=index: _on_result(
                    index, success, result),
                fun, item)
        done.wait()

        for failure in errors:
            if isinstance(failure, Failure):
                failure.raiseException()
        return results


def parallel_map(fun, items, name=None, pool=None):
    """
    Apply `fun` to every item, possibly in worker threads.

    Without a running `pool`, a pool sized for the items is started for
    this call only.

    :param pool: a started WorkerPool to reuse, optional.
    :type pool: WorkerPool
    :return: the list of results, in item order.
    :rtype: list
    """
    items = list(items)
    if pool is not None:
        return pool.map(fun, items, name)
    size = min(config.pool_size(), len(items))
    with WorkerPool(size, name or getattr(fun, '__name__', 'job')) as pool:
        return pool.map(fun, items, name)
