# Copyright (c) 2026, the rankdyn developers.
# Distributed under the LGPLv2.1+ License. See LICENSE for more info.
"""Version information for rankdyn.

This file is generated by rankdyn (``setup_version.py``).
"""
SHORT_VERSION = '0.1.0'
VERSION = '0.1.0'
FULL_VERSION = '0.1.0'
GIT_REVISION = 'Unknown'
GIT_VERSION = '0.1.0'
RELEASE = True

if not RELEASE:
    VERSION = GIT_VERSION
