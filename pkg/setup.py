# -*- coding: utf-8 -*-
# setup.py
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
Setup file for rec.market
"""
import re
from setuptools import setup
from setuptools import find_packages

from pkg import utils


def get_version():
    """
    Read the version out of the package, without importing it.
    """
    with open('src/rec/market/_version.py') as f:
        return re.search(r"version_version = '([^']+)'", f.read()).group(1)


trove_classifiers = [
    'Development Status :: 4 - Beta',
    'Environment :: Console',
    'Framework :: Twisted',
    'Intended Audience :: Science/Research',
    'License :: OSI Approved :: GNU General Public License '
    'v3 (GPLv3)',
    'Operating System :: OS Independent',
    'Programming Language :: Python',
    'Programming Language :: Python :: 3',
    'Topic :: Scientific/Engineering :: Mathematics',
    'Topic :: Software Development :: Libraries',
]

VERSION = get_version()

setup(
    name='rec.market',
    version=VERSION,
    license='GPLv3+',
    author='rec.market developers',
    description='Day-ahead scheduling and billing of renewable energy '
                'communities: centralized optima and game-theoretic '
                'equilibria.',
    long_description=open('README.rst').read(),
    classifiers=trove_classifiers,
    namespace_packages=["rec"],
    package_dir={'': 'src'},
    packages=find_packages('src'),
    test_suite='rec.market.load_tests.load_tests',
    install_requires=utils.parse_requirements(),
    tests_require=utils.parse_requirements('pkg/requirements-testing.pip'),
    entry_points={
        'console_scripts': [
            'rec-market = rec.market.cli:main',
        ],
    },
)
