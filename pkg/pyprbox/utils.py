from __future__ import absolute_import

import datetime
import json
import logging
import os
import platform
from collections import OrderedDict

import numpy as np

from .compiler import Compiler
from .exceptions import StrategyError
from .parser import Parser
from .runtime import read_text, write_text

log = logging.getLogger(__name__)


def process(src, filename=None, parser=Parser, compiler=Compiler, **kwargs):
    """Parse a strategy document and write it back in canonical form."""
    _parser = parser(src, filename=filename)
    network = _parser.parse()
    _compiler = compiler(network, **kwargs)
    return _compiler.compile()


def load_network(path, parser=Parser):
    return parser(read_text(path), filename=path).parse()


def looks_like_behavior(doc):
    return isinstance(doc, dict) and 'table' in doc and 'counts' not in doc


def load_document(path):
    try:
        return json.loads(read_text(path))
    except ValueError as e:
        raise StrategyError('%s is not valid JSON: %s' % (path, e))


class RunManifest(object):
    """What a run was asked to do and what it wrote."""

    def __init__(self, command, config=None, seed=None, inputs=None):
        from . import __version__

        self.command = command
        self.config = OrderedDict(sorted((config or {}).items()))
        self.seed = seed
        self.inputs = list(inputs or [])
        self.outputs = []
        self.status = None
        self.versions = OrderedDict([
            ('pyprbox', __version__),
            ('numpy', np.__version__),
            ('python', platform.python_version()),
        ])
        self.timestamp = datetime.datetime.now(datetime.timezone.utc).isoformat()

    def output(self, directory, name, text):
        """Write ``text`` to ``directory/name`` and record it."""
        path = os.path.join(directory, name)
        write_text(path, text)
        self.outputs.append(path)
        log.debug('wrote %s', path)
        return path

    def data(self):
        return OrderedDict([
            ('command', self.command),
            ('config', self.config),
            ('seed', self.seed),
            ('versions', self.versions),
            ('inputs', self.inputs),
            ('outputs', self.outputs),
            ('status', self.status),
            ('timestamp', self.timestamp),
        ])

    def to_json(self):
        return json.dumps(self.data(), indent=1, default=str) + '\n'

    def finish(self, directory=None):
        if directory:
            path = os.path.join(directory, 'manifest.json')
            write_text(path, self.to_json())
            return path
        log.debug('manifest:\n%s', self.to_json())
        return None
