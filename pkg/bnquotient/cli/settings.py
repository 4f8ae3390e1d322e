"""
Settings for the ``bnq`` command, read from a ``[bnq]`` table in a TOML file.
"""

#  bnquotient: invariant dual subspaces and observability of Boolean networks
#  Copyright (c) 2026. bnquotient developers
#
#  Licensed under the Apache License, Version 2.0 (the "License");
#  you may not use this file except in compliance with the License.
#  You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
#  Unless required by applicable law or agreed to in writing, software
#  distributed under the License is distributed on an "AS IS" BASIS,
#  WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
#  See the License for the specific language governing permissions and
#  limitations under the License.

from dataclasses import dataclass, fields, replace
from typing import Optional

import click
from tomlkit import comment, document, dumps, parse, table
from tomlkit.exceptions import ParseError

DEFAULT_PATH = 'bnq.toml'
ENGINES = ('algebraic', 'refine', 'structural')


@dataclass(frozen=True)
class Settings:
    max_vars: int = 20
    """Largest number of variables a network may have"""

    engine: str = 'refine'
    """Invariant engine used when none is given on the command line"""

    verify: bool = False
    """Cross-check every engine on each invariant computation"""

    path: Optional[str] = None
    """File the settings were read from"""


def _check(settings: Settings, source: str) -> Settings:
    if not isinstance(settings.max_vars, int) or isinstance(settings.max_vars, bool) or settings.max_vars < 1:
        raise click.ClickException(f'{source}: max_vars must be a positive integer')
    if settings.engine not in ENGINES:
        raise click.ClickException(f'{source}: engine must be one of {", ".join(ENGINES)}')
    if not isinstance(settings.verify, bool):
        raise click.ClickException(f'{source}: verify must be true or false')
    return settings


def load(path: Optional[str] = None) -> Settings:
    """
    Load settings

    :param path: TOML file to read. When None, ``bnq.toml`` in the working directory is used if it exists.
    :return: the settings, defaults filled in
    """
    if path is None:
        try:
            with open(DEFAULT_PATH, 'r', encoding='utf-8') as fp:
                text = fp.read()
        except FileNotFoundError:
            return Settings()
        path = DEFAULT_PATH
    else:
        try:
            with open(path, 'r', encoding='utf-8') as fp:
                text = fp.read()
        except OSError as err:
            raise click.FileError(path, err.strerror)

    try:
        doc = parse(text)
    except ParseError as err:
        raise click.ClickException(f'{path}: {err}')

    known = {f.name for f in fields(Settings)} - {'path'}
    values = {}
    for key, value in doc.get('bnq', {}).items():
        if key not in known:
            raise click.ClickException(f'{path}: unknown setting {key!r}')
        values[key] = value.unwrap() if hasattr(value, 'unwrap') else value
    return _check(replace(Settings(path=path), **values), path)


def write_default(path: str):
    """Write a settings file holding the defaults, with a comment on each value"""
    defaults = Settings()
    settings = table()
    settings.add('max_vars', defaults.max_vars)
    settings['max_vars'].comment('largest network that will be compiled')
    settings.add('engine', defaults.engine)
    settings['engine'].comment('one of ' + ', '.join(ENGINES))
    settings.add('verify', defaults.verify)
    settings.item('verify').comment('cross-check every engine')

    doc = document()
    doc.add(comment('bnq settings'))
    doc.add('bnq', settings)
    with open(path, 'w', encoding='utf-8') as fp:
        fp.write(dumps(doc))


def set_value(path: str, key: str, text: str):
    """
    Change one setting in a settings file, keeping its formatting and comments

    :param path: path-like file location
    :param key: setting name
    :param text: new value as typed on the command line
    """
    defaults = Settings()
    if key not in {f.name for f in fields(Settings)} - {'path'}:
        raise click.BadParameter(f'unknown setting {key!r}')
    default = getattr(defaults, key)
    if isinstance(default, bool):
        if text.lower() not in ('true', 'false'):
            raise click.BadParameter(f'{key} must be true or false')
        value = text.lower() == 'true'
    elif isinstance(default, int):
        try:
            value = int(text)
        except ValueError:
            raise click.BadParameter(f'{key} must be an integer')
    else:
        value = text
    _check(replace(defaults, **{key: value}), key)

    with open(path, 'r+', encoding='utf-8') as fp:
        doc = parse(fp.read())
        if 'bnq' not in doc:
            doc.add('bnq', table())
        doc['bnq'][key] = value
        fp.seek(0)
        fp.write(dumps(doc))
        fp.truncate()
