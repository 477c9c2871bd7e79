"""Per-party wirings: validation, walking, sampling."""
import logging
from collections import namedtuple

from .compiler import Visitor
from .exceptions import StrategyError
from .nodes import (
    PARTIES,
    PARTY_NAMES,
    DecisionNode,
    NetworkStrategy,
    Node,
    PartyStrategy,
    Transcript,
    bit_of,
    check_counts,
    own_boxes,
)
from .runtime import make_rng

log = logging.getLogger(__name__)


class Violation(namedtuple('Violation', 'kind where detail')):
    __slots__ = ()

    def __str__(self):
        return '%s: %s (%s)' % (self.kind, self.where, self.detail)


class ValidationReport(Node):
    def __init__(self, violations):
        self.violations = list(violations)

    @property
    def ok(self):
        return not self.violations

    def __bool__(self):
        return self.ok

    __nonzero__ = __bool__

    def kinds(self):
        return set(v.kind for v in self.violations)

    def __str__(self):
        if self.ok:
            return 'valid'
        return '\n'.join(str(v) for v in self.violations)


class Validator(Visitor):
    def __init__(self, network):
        self.network = network
        self.counts = network.counts
        self.violations = []

    def report(self, kind, where, detail):
        self.violations.append(Violation(kind, where, detail))

    def validate(self):
        for party in PARTIES:
            strategy = self.network.strategies.get(party)
            if strategy is None:
                self.report('missing tree', PARTY_NAMES[party], 'no strategy for this party')
                continue
            boxes = frozenset(own_boxes(party, self.counts))
            for setting in (0, 1):
                where = '%s setting %d' % (PARTY_NAMES[party], setting)
                tree = strategy.trees[setting] if setting < len(strategy.trees) else None
                if tree is None:
                    if boxes:
                        self.report('missing tree', where, '%d boxes but no root' % len(boxes))
                    continue
                self.visit(tree, party, where + ' at root', boxes)
            self.checkTable(party, strategy)
        return ValidationReport(self.violations)

    def visitDecisionNode(self, node, party, where, remaining):
        box = node.box
        if box.counterpart not in PARTIES or box.counterpart == party:
            self.report('wrong counterpart', where, 'box %s' % (box,))
        elif not 0 <= box.index < self.counts.pair(party, box.counterpart):
            self.report('out-of-range index', where, 'box %s, only %d shared with %s' % (
                box, self.counts.pair(party, box.counterpart), PARTY_NAMES[box.counterpart]))
        elif box not in remaining:
            self.report('repeated box', where, 'box %s already queried on this path' % (box,))
        if node.input not in (0, 1):
            self.report('invalid input', where, 'input %r' % (node.input,))
        rest = remaining - {box}
        for bit, child in ((0, node.on0), (1, node.on1)):
            path = '%s/on%d' % (where, bit)
            if child is None:
                if rest:
                    self.report('missing child', path, '%d boxes still unqueried' % len(rest))
            else:
                self.visit(child, party, path, rest)

    def checkTable(self, party, strategy):
        size = 1 << len(own_boxes(party, self.counts))
        missing = [(w, s) for s in (0, 1) for w in range(size) if (w, s) not in strategy.output_table]
        if missing:
            self.report('partial output table', PARTY_NAMES[party], '%d of %d rows missing, first is word %d setting %d' % (
                (len(missing), 2 * size) + missing[0]))
        bad = [k for k, v in strategy.output_table.items() if v not in (0, 1)]
        if bad:
            self.report('invalid outcome', PARTY_NAMES[party], '%d rows with a non-binary outcome' % len(bad))


def validate(network):
    return Validator(network).validate()


def ensure_valid(network):
    report = validate(network)
    if not report.ok:
        raise StrategyError('invalid network:\n%s' % report, report.violations)
    return network


def trace(tree, resolve):
    """Follow ``tree`` asking ``resolve(box, input)`` for each output."""
    transcript = Transcript()
    seen = set()
    node = tree
    while node is not None:
        if node.box in seen:
            raise StrategyError('repeated box %s on a path' % (node.box,))
        seen.add(node.box)
        output = resolve(node.box, node.input)
        transcript.append(node.box, node.input, output)
        node = node.child(output)
    return transcript


def walk(tree, assignment):
    """Transcript of the unique path selected by ``assignment`` (box -> output bit)."""

    def resolve(box, _input):
        try:
            return assignment[box]
        except KeyError:
            raise StrategyError('tree queries box %s which is not in the assignment' % (box,))

    transcript = trace(tree, resolve)
    if len(transcript) != len(assignment):
        raise StrategyError('path ended after %d of %d boxes (missing child)' % (len(transcript), len(assignment)))
    return transcript


def word_assignment(strategy, word):
    width = strategy.width
    return dict((box, bit_of(word, i, width)) for i, box in enumerate(strategy.boxes))


def walk_word(strategy, setting, word):
    return walk(strategy.trees[setting], word_assignment(strategy, word))


def chain_tree(boxes, input=0):
    """Query ``boxes`` in order with a fixed input, ignoring outputs."""
    tree = None
    for box in reversed(boxes):
        tree = DecisionNode(box, input, tree, tree)
    return tree


def constant_table(width, outcome):
    return dict(((w, s), outcome) for s in (0, 1) for w in range(1 << width))


def trivial_strategy(party, counts, outcome=1):
    boxes = own_boxes(party, counts)
    tree = chain_tree(boxes)
    return PartyStrategy(party, counts, (tree, tree), constant_table(len(boxes), outcome))


def trivial_network(counts=(1, 1, 1), outcome=1):
    """Every box queried in string order with input 0; constant output."""
    counts = check_counts(counts)
    return NetworkStrategy(counts, dict((p, trivial_strategy(p, counts, outcome)) for p in PARTIES))


def random_tree(rng, boxes):
    if not boxes:
        return None
    k = int(rng.integers(len(boxes)))
    rest = boxes[:k] + boxes[k + 1:]
    return DecisionNode(boxes[k], int(rng.integers(2)), random_tree(rng, rest), random_tree(rng, rest))


def random_strategy(rng, party, counts):
    boxes = own_boxes(party, counts)
    size = 1 << len(boxes)
    trees = (random_tree(rng, boxes), random_tree(rng, boxes))
    table = {}
    for setting in (0, 1):
        for word, bit in enumerate(rng.integers(2, size=size)):
            table[(word, setting)] = int(bit)
    return PartyStrategy(party, counts, trees, table)


def sample_random_network(counts, seed):
    counts = check_counts(counts)
    rng = seed if hasattr(seed, 'integers') else make_rng(seed)
    return NetworkStrategy(counts, dict((p, random_strategy(rng, p, counts)) for p in PARTIES))
