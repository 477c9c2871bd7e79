import numbers
from collections import namedtuple
from itertools import permutations

PARTIES = ('A', 'B', 'C')
PARTY_NAMES = {'A': 'Alice', 'B': 'Bob', 'C': 'Charlie'}
ORDERINGS = tuple(''.join(p) for p in permutations(PARTIES))

# the six box-output strings, named by owner then counterpart
SLOTS = ('a_b', 'a_c', 'b_a', 'b_c', 'c_a', 'c_b')

MAX_OWNED_BOXES = 16


def slot_name(party, counterpart):
    return '%s_%s' % (party.lower(), counterpart.lower())


class Node(object):
    debug = False

    def __str__(self):
        return self.__dict__.__str__()


class BoxRef(namedtuple('BoxRef', 'counterpart index')):
    __slots__ = ()

    def __str__(self):
        return '%s:%d' % (self.counterpart, self.index)


class Counts(namedtuple('Counts', 'n_ab n_ac n_bc')):
    __slots__ = ()

    def pair(self, p, q):
        key = ''.join(sorted((p, q)))
        return {'AB': self.n_ab, 'AC': self.n_ac, 'BC': self.n_bc}[key]

    @property
    def total(self):
        return self.n_ab + self.n_ac + self.n_bc

    def __str__(self):
        return '%d,%d,%d' % self


class SettingTriple(namedtuple('SettingTriple', 'x y z')):
    __slots__ = ()

    @property
    def index(self):
        return 4 * self.x + 2 * self.y + self.z

    @classmethod
    def from_index(cls, index):
        return cls((index >> 2) & 1, (index >> 1) & 1, index & 1)

    def of(self, party):
        return self['ABC'.index(party)]

    @property
    def symbol(self):
        return ''.join(
            name + ("'" if bit else '') for name, bit in zip('abc', self)
        )

    def __str__(self):
        return self.symbol


class OutcomeTriple(namedtuple('OutcomeTriple', 'A B C')):
    __slots__ = ()

    @property
    def index(self):
        return 4 * self.A + 2 * self.B + self.C

    @classmethod
    def from_index(cls, index):
        return cls((index >> 2) & 1, (index >> 1) & 1, index & 1)

    def of(self, party):
        return self['ABC'.index(party)]

    @property
    def symbol(self):
        return ''.join(outcome_symbol(bit) for bit in self)

    def __str__(self):
        return self.symbol


# table row order: abc, abc', ab'c, ... a'b'c'
SETTINGS = tuple(SettingTriple.from_index(i) for i in range(8))
# table column order: +++, ++0, +0+, ... 000
OUTCOMES = tuple(OutcomeTriple.from_index(i) for i in reversed(range(8)))


def outcome_symbol(bit):
    return '+' if bit else '0'


Step = namedtuple('Step', 'box input output')


class Transcript(Node):
    def __init__(self, steps=None):
        self.steps = list(steps or [])

    def append(self, box, input, output):
        self.steps.append(Step(box, input, output))

    @property
    def inputs(self):
        return dict((s.box, s.input) for s in self.steps)

    @property
    def outputs(self):
        return dict((s.box, s.output) for s in self.steps)

    def __len__(self):
        return len(self.steps)

    def __iter__(self):
        return iter(self.steps)

    def __eq__(self, other):
        return isinstance(other, Transcript) and self.steps == other.steps

    def __str__(self):
        return '; '.join('%s input %d output %d' % s for s in self.steps)


class DecisionNode(Node):
    """Query ``box`` with ``input``; continue at ``on0`` or ``on1`` by the
    box's output. ``None`` is a leaf."""

    def __init__(self, box, input, on0=None, on1=None):
        self.box = box
        self.input = input
        self.on0 = on0
        self.on1 = on1

    def child(self, output):
        return self.on1 if output else self.on0

    def __eq__(self, other):
        if not isinstance(other, DecisionNode):
            return False
        return (self.box, self.input, self.on0, self.on1) == (
            other.box, other.input, other.on0, other.on1)

    def __ne__(self, other):
        return not self == other

    __hash__ = None


def own_boxes(party, counts):
    """The party's boxes in string order: counterparts in party order, then index."""
    return tuple(
        BoxRef(q, i)
        for q in PARTIES
        if q != party
        for i in range(counts.pair(party, q))
    )


def split_word(word, widths):
    """Split a big-endian word into consecutive fields of the given widths."""
    parts = []
    shift = sum(widths)
    for width in widths:
        shift -= width
        parts.append((word >> shift) & ((1 << width) - 1))
    return tuple(parts)


def join_word(parts, widths):
    word = 0
    for part, width in zip(parts, widths):
        word = (word << width) | part
    return word


def bit_string(word, width):
    return format(word, '0%db' % width) if width else ''


def bit_of(word, position, width):
    return (word >> (width - 1 - position)) & 1


class PartyStrategy(Node):
    """Decision trees per own setting plus the final output table.

    ``output_table`` maps ``(word, setting)`` to an outcome bit, where
    ``word`` packs the party's own box outputs big-endian in
    :func:`own_boxes` order.
    """

    def __init__(self, party, counts, trees, output_table):
        self.party = party
        self.counts = counts
        self.trees = tuple(trees)
        self.output_table = dict(output_table)
        self.boxes = own_boxes(party, counts)
        self._rows = None

    @property
    def width(self):
        return len(self.boxes)

    @property
    def widths(self):
        return tuple(self.counts.pair(self.party, q) for q in PARTIES if q != self.party)

    @property
    def counterparts(self):
        return tuple(q for q in PARTIES if q != self.party)

    def output(self, word, setting):
        if self._rows is None:
            size = 1 << self.width
            self._rows = tuple(
                tuple(self.output_table[(w, s)] for w in range(size)) for s in (0, 1)
            )
        return self._rows[setting][word]

    def replace(self, trees=None, output_table=None):
        return PartyStrategy(
            self.party,
            self.counts,
            self.trees if trees is None else trees,
            self.output_table if output_table is None else output_table,
        )

    def __eq__(self, other):
        if not isinstance(other, PartyStrategy):
            return False
        return (self.party, self.counts, self.trees, self.output_table) == (
            other.party, other.counts, other.trees, other.output_table)

    def __ne__(self, other):
        return not self == other

    __hash__ = None


class NetworkStrategy(Node):
    def __init__(self, counts, strategies):
        self.counts = Counts(*counts)
        self.strategies = dict(strategies)

    def __getitem__(self, party):
        return self.strategies[party]

    def replace(self, party, strategy):
        strategies = dict(self.strategies)
        strategies[party] = strategy
        return NetworkStrategy(self.counts, strategies)

    def __eq__(self, other):
        if not isinstance(other, NetworkStrategy):
            return False
        return self.counts == other.counts and self.strategies == other.strategies

    def __ne__(self, other):
        return not self == other

    __hash__ = None


def check_counts(counts):
    from .exceptions import CapExceeded, StrategyError

    if len(counts) != 3:
        raise StrategyError('counts need three entries (n_AB, n_AC, n_BC), got %r' % (counts,))
    for n in counts:
        if isinstance(n, bool) or not isinstance(n, numbers.Integral):
            raise StrategyError('box counts must be integers, got %r' % (n,))
    counts = Counts(*(int(n) for n in counts))
    if any(n < 0 for n in counts):
        raise StrategyError('box counts must be >= 0, got %s' % (counts,))
    for party in PARTIES:
        owned = len(own_boxes(party, counts))
        if owned > MAX_OWNED_BOXES:
            raise CapExceeded(
                '%s owns %d boxes; at most %d are supported (output table would need 2^%d rows per setting)'
                % (PARTY_NAMES[party], owned, MAX_OWNED_BOXES, owned)
            )
    return counts
