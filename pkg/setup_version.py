# Copyright (c) 2026, the rankdyn developers.
# Distributed under the LGPLv2.1+ License. See LICENSE for more info.
"""
rankdyn - Nonparametric Thurstone models for rankings that change over time.
Copyright (C) 2026, the rankdyn developers.

This file writes the version of rankdyn, read from version.json, into
rankdyn/version.py and setup.py.
"""
import argparse
import json
import os
import pathlib
import re
import subprocess


# Current version numbers:
CURRENT_VERSION_FILE = pathlib.Path('version.json')
# The version module of the package:
VERSION_FILE = pathlib.Path('rankdyn').joinpath('version.py')
SETUP_PY = pathlib.Path('setup.py')
VERSION_DEV_FMT = '{major:d}.{minor:d}.{micro:d}.dev{dev:d}'
VERSION_FMT = '{major:d}.{minor:d}.{micro:d}'
VERSION_TXT = '''# Copyright (c) 2026, the rankdyn developers.
# Distributed under the LGPLv2.1+ License. See LICENSE for more info.
"""Version information for rankdyn.

This file is generated by rankdyn (``setup_version.py``).
"""
SHORT_VERSION = '{version:s}'
VERSION = '{version:s}'
FULL_VERSION = '{version:s}'
GIT_REVISION = '{git_revision:s}'
GIT_VERSION = '{git_version:s}'
RELEASE = {release:}

if not RELEASE:
    VERSION = GIT_VERSION
'''
BUMPS = ('major', 'minor', 'micro', 'dev')


def version_string(version):
    """Return the version numbers as a string like ``0.1.0.dev2``."""
    fmt = VERSION_FMT if version['release'] else VERSION_DEV_FMT
    return fmt.format(**version)


def git_revision():
    """Return the hash of the checked out commit, or ``'Unknown'``."""
    env = {
        key: os.environ[key]
        for key in ('SYSTEMROOT', 'PATH')
        if key in os.environ
    }
    env.update(LANGUAGE='C', LANG='C', LC_ALL='C')
    try:
        out = subprocess.run(
            ['git', 'rev-parse', 'HEAD'],
            capture_output=True,
            env=env,
            check=True,
        ).stdout
    except (OSError, subprocess.CalledProcessError):
        return 'Unknown'
    return out.strip().decode('ascii') or 'Unknown'


def stored_git_revision():
    """Return the revision recorded in an existing version.py."""
    if not VERSION_FILE.is_file():
        return 'Unknown'
    match = re.search(
        r"^GIT_REVISION = '(.*)'$", VERSION_FILE.read_text(), re.MULTILINE
    )
    return match.group(1) if match else 'Unknown'


def write_version_py(version):
    """Write rankdyn/version.py and return the version string."""
    text = version_string(version)
    if pathlib.Path('.git').is_dir():
        revision = git_revision()
    else:
        revision = stored_git_revision()
    git_version = text
    if not version['release']:
        git_version = '{}dev{:d}+{}'.format(
            text.split('dev')[0], version['dev'], revision[:7]
        )
    VERSION_FILE.write_text(
        VERSION_TXT.format(
            version=text,
            git_revision=revision,
            git_version=git_version,
            release=version['release'],
        )
    )
    return text


def write_version_in_setup_py(text):
    """Update the FULL_VERSION line of setup.py."""
    comment = '# Automatically set by setup_version.py'
    lines = SETUP_PY.read_text().splitlines(keepends=True)
    with open(SETUP_PY, 'wt') as sfile:
        for line in lines:
            if line.startswith('FULL_VERSION ='):
                line = "FULL_VERSION = '{}'  {}\n".format(text, comment)
            sfile.write(line)


def bump_version(args, version):
    """Return the version with the requested number incremented.

    Numbers below the bumped one are reset to zero.
    """
    new_version = version.copy()
    for position, name in enumerate(BUMPS):
        if getattr(args, 'bump_{}'.format(name)):
            new_version[name] += 1
            for lower in BUMPS[position + 1:]:
                new_version[lower] = 0
    return new_version


def main(args):
    """Generate version information and update the relevant files."""
    with open(CURRENT_VERSION_FILE, 'r') as json_file:
        version = json.load(json_file)
    version = bump_version(args, version)
    text = write_version_py(version)
    print('Setting version to: {}'.format(text))
    write_version_in_setup_py(text)
    with open(CURRENT_VERSION_FILE, 'w') as json_file:
        json.dump(version, json_file, indent=4)


def get_argument_parser():
    """Return a parser for arguments."""
    parser = argparse.ArgumentParser()
    for name in BUMPS:
        parser.add_argument(
            '--bump_{}'.format(name),
            action='store_true',
            help='Increment the {} version.'.format(name),
        )
    return parser


if __name__ == '__main__':
    main(get_argument_parser().parse_args())
