# This file is rewritten by the release tooling. Source checkouts carry the
# development version below.

version_version = '0.3.0'
version_full = 'dev'


def get_versions(default={}, verbose=False):
    return {'version': version_version, 'full': version_full}
