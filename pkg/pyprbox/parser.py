import json

import six

from . import lexer
from .exceptions import StrategyError
from .nodes import PARTIES, DecisionNode, NetworkStrategy, PartyStrategy, check_counts


class Parser(object):
    """Builds a :class:`NetworkStrategy` from the JSON strategy format.

    The parser only checks the document's shape. Tree well-formedness and
    table totality are left to :func:`pyprbox.strategy.validate` so that a
    malformed strategy can still be loaded and reported on.
    """

    def __init__(self, source, filename=None, **options):
        if isinstance(source, six.binary_type):
            source = six.text_type(source, 'utf8')
        self.input = source
        self.filename = filename
        self.options = options
        self.path = []

    def parse(self):
        if isinstance(self.input, six.string_types):
            try:
                doc = json.loads(self.input)
            except ValueError as e:
                raise StrategyError('%s is not valid JSON: %s' % (self.filename or 'strategy', e))
        else:
            doc = self.input
        return self.parseNetwork(doc)

    def error(self, message):
        where = '/'.join(str(p) for p in self.path) or '<root>'
        return StrategyError('%s in file %s at %s' % (message, self.filename, where))

    def expect(self, doc, key, kind):
        if not isinstance(doc, dict) or key not in doc:
            raise self.error('expected field "%s"' % key)
        value = doc[key]
        if not isinstance(value, kind):
            raise self.error('field "%s" has the wrong type %s' % (key, type(value).__name__))
        return value

    def parseNetwork(self, doc):
        raw = self.expect(doc, 'counts', (dict, list))
        if isinstance(raw, dict):
            try:
                raw = [raw['AB'], raw['AC'], raw['BC']]
            except KeyError as e:
                raise self.error('counts is missing pair %s' % e)
        counts = check_counts(raw)
        strategies = {}
        for party in PARTIES:
            self.path.append(party)
            strategies[party] = self.parseParty(party, counts, self.expect(doc, party, dict))
            self.path.pop()
        return NetworkStrategy(counts, strategies)

    def parseParty(self, party, counts, doc):
        trees = self.expect(doc, 'trees', (list, dict))
        if isinstance(trees, dict):
            trees = [trees.get('0'), trees.get('1')]
        if len(trees) != 2:
            raise self.error('expected one tree per setting, got %d' % len(trees))
        roots = []
        for setting, tree in enumerate(trees):
            self.path.append('trees/%d' % setting)
            roots.append(self.parseTree(tree))
            self.path.pop()
        width = sum(counts.pair(party, q) for q in PARTIES if q != party)
        self.path.append('output_table')
        table = self.parseTable(self.expect(doc, 'output_table', list), width)
        self.path.pop()
        return PartyStrategy(party, counts, roots, table)

    def parseTree(self, doc):
        if doc is None:
            return None
        if not isinstance(doc, dict):
            raise self.error('a tree node must be an object or null')
        try:
            box = lexer.box(self.expect(doc, 'box', six.string_types))
        except ValueError as e:
            raise self.error(str(e))
        bit = self.expect(doc, 'input', int)
        if bit not in (0, 1):
            raise self.error('input must be 0 or 1, got %r' % (bit,))
        children = []
        for key in ('on0', 'on1'):
            self.path.append(key)
            children.append(self.parseTree(doc.get(key)))
            self.path.pop()
        return DecisionNode(box, bit, *children)

    def parseTable(self, rows, width):
        table = {}
        for number, row in enumerate(rows):
            if not isinstance(row, list) or len(row) != 3:
                raise self.error('row %d should be [bits, setting, outcome]' % number)
            bits, setting, symbol = row
            try:
                word = lexer.bits(bits, width)
                value = lexer.outcome_bit(symbol)
            except ValueError as e:
                raise self.error('row %d: %s' % (number, e))
            if setting not in (0, 1):
                raise self.error('row %d: setting must be 0 or 1' % number)
            if (word, setting) in table:
                raise self.error('row %d repeats assignment %s for setting %d' % (number, bits, setting))
            table[(word, setting)] = value
        return table


def deserialize(source, filename=None, **options):
    return Parser(source, filename=filename, **options).parse()
