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

import json
import logging
import os.path
from contextlib import contextmanager
from dataclasses import replace

import click

import bnquotient
from bnquotient.cli import settings as bnq_settings
from bnquotient.errors import (BnSemanticError, BnSyntaxError, DimensionError, EngineMismatchError,
                               EnginePreconditionError, NotEquitableError)
from bnquotient.invariant import DualSubspace, cross_check, smallest_invariant
from bnquotient.network import parse_expr
from bnquotient.observability import (ObservedBn, analyze, check_observability_conditions,
                                      construct_observable_output)
from bnquotient.partition import quotient
from bnquotient.stg import attractors, to_dot, to_json

engine_choice = click.Choice(bnq_settings.ENGINES)


class AnalysisError(click.ClickException):
    """A failure reported with its own exit code: 1 parse, 2 semantic, 3 engine precondition"""

    def __init__(self, message: str, exit_code: int):
        super().__init__(message)
        self.exit_code = exit_code


@contextmanager
def reporting_errors():
    try:
        yield
    except BnSyntaxError as err:
        raise AnalysisError(f'parse error: {err}', 1)
    except (BnSemanticError, DimensionError, NotEquitableError) as err:
        raise AnalysisError(str(err), 2)
    except (EnginePreconditionError, EngineMismatchError) as err:
        raise AnalysisError(str(err), 3)


class EchoHandler(logging.Handler):
    """Sends log records to stderr through click"""

    def emit(self, record):
        click.echo(self.format(record), err=True)


def load_model(obj: bnq_settings.Settings, file):
    with reporting_errors():
        return bnquotient.read(file, max_vars=obj.max_vars)


def emit(text: str, out):
    if out:
        with open(out, 'w', encoding='utf-8') as fp:
            fp.write(text)
        click.echo(f'Wrote {out}', err=True)
    else:
        click.echo(text)


@click.group()
@click.option('--config', envvar='BNQ_CONFIG', metavar='FILE', default=None,
              type=click.Path(dir_okay=False),
              help='Settings file.  [default: bnq.toml if present]')
@click.option('--max-vars', envvar='BN_MAX_VARS', type=click.IntRange(min=1), default=None,
              help='Largest number of variables a network may have.  [default: 20]')
@click.option('--verbose', '-v', count=True, help='Log progress to stderr. Repeat for more detail.')
@click.version_option()
@click.pass_context
def cli(ctx, config, max_vars, verbose):
    """Analyze Boolean networks: invariant subspaces, equitable partitions and observability."""
    handler = EchoHandler()
    handler.setFormatter(logging.Formatter('%(levelname)s %(name)s: %(message)s'))
    root = logging.getLogger('bnquotient')
    root.handlers = [handler]
    root.setLevel(max(logging.DEBUG, logging.WARNING - 10 * verbose))

    if ctx.invoked_subcommand == 'config':
        ctx.obj = bnq_settings.Settings(path=config)
        return

    obj = bnq_settings.load(config)
    if max_vars is not None:
        obj = replace(obj, max_vars=max_vars)
    ctx.obj = obj


@cli.command('compile')
@click.argument('file', type=click.Path(exists=True, dir_okay=False))
@click.pass_obj
def compile_(obj, file):
    """Print the transition matrix of FILE in delta notation, then as JSON."""
    model = load_model(obj, file)
    m = model.m
    click.echo(str(m))
    document = {'n_states': m.cols, 'M': list(m.col_index)}
    if model.network is not None:
        document['vars'] = list(model.network.var_names)
    click.echo(json.dumps(document))


@cli.command(short_help='Smallest invariant subspace')
@click.argument('file', type=click.Path(exists=True, dir_okay=False))
@click.option('--subset', '-s', metavar='STATES', help='Comma separated states generating the subspace, e.g. "1,4,5".')
@click.option('--function', '-f', 'function', metavar='EXPR', help='Boolean function generating the subspace.')
@click.option('--engine', '-e', type=engine_choice, default=None, help='Engine to use.  [default: from settings]')
@click.option('--verify/--no-verify', default=None, help='Run every engine and make sure they agree.')
@click.option('--dot', is_flag=True, help='Also print the quotient graph in DOT.')
@click.option('--out', '-o', type=click.Path(dir_okay=False, writable=True), help='Write the DOT output here.')
@click.pass_obj
def invariant(obj, file, subset, function, engine, verify, dot, out):
    """
    Find the smallest invariant dual subspace containing a function of the state of FILE.

    The function is either the indicator of a set of states (--subset) or a Boolean
    expression over the network's variables (--function). Prints the cells, the quotient
    transition matrix H and the number of steps k as JSON.
    """
    if (subset is None) == (function is None):
        raise click.UsageError('give exactly one of --subset and --function')
    engine = engine or obj.engine
    verify = obj.verify if verify is None else verify

    model = load_model(obj, file)
    with reporting_errors():
        if subset is not None:
            try:
                states = [int(s) for s in subset.split(',') if s.strip()]
            except ValueError:
                raise click.BadParameter(f'{subset!r} is not a comma separated list of states', param_hint='--subset')
            g0 = DualSubspace.from_subset(states, model.stg.n_vertices)
        else:
            if model.network is None:
                raise BnSemanticError('--function needs a network with named variables')
            g0 = DualSubspace.from_function(parse_expr(function), model.network.var_names)

        if verify:
            results = cross_check(model.stg, g0)
            # structural is skipped for disconnected graphs and raises its precondition error here
            result = results[engine] if engine in results else smallest_invariant(model.stg, g0, engine)
        else:
            result = smallest_invariant(model.stg, g0, engine)

    click.echo(json.dumps(result.to_json()))
    if dot:
        q, _ = quotient(model.stg, result.partition)
        emit(to_dot(q, 'quotient'), out)


@cli.command(short_help='Observability analysis')
@click.argument('file', type=click.Path(exists=True, dir_okay=False))
@click.option('--construct-output', '-c', is_flag=True,
              help='Build an output matrix that makes the network observable.')
@click.option('--engine', '-e', type=engine_choice, default=None, help='Engine to use.  [default: from settings]')
@click.option('--dot', is_flag=True, help='Also print the state transition graph in DOT, colored by output.')
@click.option('--out', '-o', type=click.Path(dir_okay=False, writable=True), help='Write the DOT output here.')
@click.pass_obj
def observability(obj, file, construct_output, engine, dot, out):
    """
    Report whether the outputs of FILE determine its initial state.

    With --construct-output, ignore any declared outputs and print an output matrix
    that makes the network observable instead.
    """
    model = load_model(obj, file)
    with reporting_errors():
        if construct_output:
            e = construct_observable_output(model.m)
            click.echo(str(e))
            click.echo(json.dumps({'E': list(e.col_index), 'symbols': e.rows}))
        else:
            if model.e is None:
                raise BnSemanticError(f'{file} declares no outputs; use --construct-output to build one')
            e = model.e
            bn = ObservedBn(model.m, e)
            report = analyze(bn, engine or obj.engine)
            holds, diagnostics = check_observability_conditions(bn)
            document = report.to_json()
            document['conditions'] = holds
            document['diagnostics'] = str(diagnostics)
            click.echo(json.dumps(document))

    if dot:
        colors = {v: e[v] for v in model.stg.vertices()}
        emit(to_dot(model.stg, 'stg', colors), out)


@cli.command(short_help='Export the state transition graph')
@click.argument('file', type=click.Path(exists=True, dir_okay=False))
@click.option('--format', '-f', 'fmt', type=click.Choice(['json', 'dot']), default='json', show_default=True,
              help='Output format.')
@click.option('--out', '-o', type=click.Path(dir_okay=False, writable=True), help='Write the output here.')
@click.pass_obj
def stg(obj, file, fmt, out):
    """Print the state transition graph of FILE, in JSON with its attractors, or in DOT."""
    model = load_model(obj, file)
    if fmt == 'dot':
        emit(to_dot(model.stg), out)
    else:
        document = to_json(model.stg, model.e.col_index if model.e is not None else None)
        document['attractors'] = attractors(model.stg)
        emit(json.dumps(document), out)


@cli.command('config', short_help='Create or edit the settings file')
@click.option('--init', is_flag=True, help='Write a settings file with the defaults.')
@click.option('--set', 'assignments', metavar='KEY=VALUE', multiple=True, help='Change a setting.')
@click.pass_obj
def config(obj, init, assignments):
    """
    Create or edit the settings file, then show the settings in effect.

    The file is the one given by --config, or bnq.toml in the working directory.
    """
    path = obj.path or bnq_settings.DEFAULT_PATH
    if init:
        if os.path.exists(path):
            click.confirm(f'Settings file {path} already exists. Would you like to overwrite it?', abort=True)
        bnq_settings.write_default(path)
        click.echo(f'Created new settings file at {path}')

    for assignment in assignments:
        key, sep, value = assignment.partition('=')
        if not sep:
            raise click.BadParameter(f'{assignment!r} is not in the form KEY=VALUE', param_hint='--set')
        try:
            bnq_settings.set_value(path, key.strip(), value.strip())
        except FileNotFoundError:
            raise click.FileError(path, 'does not exist. Create it by running bnq config --init.')
        click.echo(f'Set {key.strip()} = {value.strip()} in {path}')

    current = bnq_settings.load(path if (init or assignments or obj.path) else None)
    for name in ('max_vars', 'engine', 'verify'):
        click.echo(f'{name} = {json.dumps(getattr(current, name))}')


if __name__ == '__main__':
    cli()
