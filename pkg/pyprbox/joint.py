"""The joint distribution of all box outputs for one settings triple.

Parties are processed in a chosen order P1, P2, P3. Both of P1's strings and
P2's string shared with P3 are free (uniform); P2's string shared with P1 and
all of P3's strings are forced box by box through
:func:`pyprbox.boxes.pr_determined_output`. Every completed assignment gets
weight 2^-(n_AB + n_AC + n_BC), and the support does not depend on the order.
"""
import csv
import io
import logging
from collections import namedtuple
from fractions import Fraction

from .boxes import pr_determined_output
from .lexer import bits as parse_bits
from .nodes import (
    ORDERINGS,
    PARTIES,
    SLOTS,
    Counts,
    Node,
    SettingTriple,
    bit_of,
    bit_string,
    join_word,
    slot_name,
    split_word,
)
from .strategy import ensure_valid

log = logging.getLogger(__name__)

DEFAULT_ORDERING = ('C', 'A', 'B')


class FullAssignment(namedtuple('FullAssignment', SLOTS)):
    """Six output words, one per (owner, counterpart) string."""

    __slots__ = ()

    def strings(self, counts):
        return tuple(bit_string(word, slot_width(slot, counts)) for slot, word in zip(SLOTS, self))

    def party_word(self, party, counts):
        others = [q for q in PARTIES if q != party]
        parts = [getattr(self, slot_name(party, q)) for q in others]
        return join_word(parts, [counts.pair(party, q) for q in others])


def slot_width(slot, counts):
    return counts.pair(slot[0].upper(), slot[2].upper())


class JointDistribution(Node):
    def __init__(self, settings, counts, support, ordering=DEFAULT_ORDERING):
        self.settings = SettingTriple(*settings)
        self.counts = Counts(*counts)
        self.support = dict(support)
        self.ordering = tuple(ordering)

    def total(self):
        return sum(self.support.values(), Fraction(0))

    def marginal(self, slots):
        return marginal(self, slots)

    def items(self):
        return sorted(self.support.items())

    def __len__(self):
        return len(self.support)

    def __eq__(self, other):
        return isinstance(other, JointDistribution) and (self.settings, self.support) == (other.settings, other.support)

    def __ne__(self, other):
        return not self == other

    __hash__ = None

    def to_csv(self):
        out = io.StringIO()
        writer = csv.writer(out, lineterminator='\n')
        writer.writerow(list(SLOTS) + ['probability'])
        for assignment, p in self.items():
            writer.writerow(list(assignment.strings(self.counts)) + ['%d/%d' % (p.numerator, p.denominator)])
        return out.getvalue()


class JointBuilder(object):
    def __init__(self, network, settings, ordering=DEFAULT_ORDERING):
        self.network = network
        self.counts = network.counts
        self.settings = SettingTriple(*settings)
        self.ordering = tuple(ordering)
        if ''.join(self.ordering) not in ORDERINGS:
            raise ValueError('not an ordering of the three parties: %r' % (ordering,))

    def free_slots(self):
        first, second, third = self.ordering
        return [(first, q) for q in PARTIES if q != first] + [(second, third)]

    def complete(self, free, parties=None):
        """Walk ``parties`` (default: all, in order) given the free words.

        Returns the dictionaries of output bits and input bits, keyed by
        (owner, counterpart) then box index.
        """
        counts = self.counts
        outputs = {}
        inputs = {}
        done = set()
        for party in parties or self.ordering:
            node = self.network[party].trees[self.settings.of(party)]
            while node is not None:
                q, i = node.box
                if q in done:
                    output = pr_determined_output(outputs[(q, party)][i], node.input, inputs[(q, party)][i])
                else:
                    output = bit_of(free[(party, q)], i, counts.pair(party, q))
                outputs.setdefault((party, q), {})[i] = output
                inputs.setdefault((party, q), {})[i] = node.input
                node = node.child(output)
            done.add(party)
        return outputs, inputs

    def assignment(self, outputs):
        words = []
        for slot in SLOTS:
            key = (slot[0].upper(), slot[2].upper())
            width = slot_width(slot, self.counts)
            bits = outputs.get(key, {})
            words.append(join_word([bits[i] for i in range(width)], [1] * width))
        return FullAssignment(*words)

    def build(self):
        free = self.free_slots()
        widths = [self.counts.pair(p, q) for p, q in free]
        total = sum(widths)
        weight = Fraction(1, 1 << total)
        support = {}
        for free_word in range(1 << total):
            values = dict(zip(free, split_word(free_word, widths)))
            outputs, _ = self.complete(values)
            point = self.assignment(outputs)
            support[point] = support.get(point, Fraction(0)) + weight
        return JointDistribution(self.settings, self.counts, support, self.ordering)


def build_joint(network, settings, ordering=DEFAULT_ORDERING, checked=False):
    if not checked:
        ensure_valid(network)
    return JointBuilder(network, settings, ordering).build()


def a_c_function(network, a_b, c_a, c_b, x, z, checked=False):
    """Alice's outputs on her boxes with Charlie, given a_b and Charlie's strings.

    Bob plays no part: Charlie walks first with (c_a, c_b), then Alice with
    her Bob-side outputs read from ``a_b``.
    """
    if not checked:
        ensure_valid(network)
    counts = network.counts
    free = {
        ('C', 'A'): parse_bits(c_a, counts.n_ac),
        ('C', 'B'): parse_bits(c_b, counts.n_bc),
        ('A', 'B'): parse_bits(a_b, counts.n_ab),
    }
    builder = JointBuilder(network, (x, 0, z), ('C', 'A', 'B'))
    outputs, _ = builder.complete(free, parties=('C', 'A'))
    bits = outputs.get(('A', 'C'), {})
    return ''.join(str(bits[i]) for i in range(counts.n_ac))


class OrderingReport(Node):
    def __init__(self, identical, counterexample=None):
        self.identical = identical
        self.counterexample = counterexample

    def __bool__(self):
        return self.identical

    __nonzero__ = __bool__


def check_ordering_invariance(network, settings, checked=False):
    if not checked:
        ensure_valid(network)
    reference = None
    for ordering in ORDERINGS:
        joint = build_joint(network, settings, tuple(ordering), checked=True)
        if reference is None:
            reference = joint
            continue
        if joint.support != reference.support:
            keys = sorted(set(joint.support) | set(reference.support))
            for key in keys:
                if joint.support.get(key, 0) != reference.support.get(key, 0):
                    example = (ordering, key, reference.support.get(key, Fraction(0)), joint.support.get(key, Fraction(0)))
                    log.warning('ordering %s differs from %s at %s', ordering, ''.join(reference.ordering), key)
                    return OrderingReport(False, example)
    return OrderingReport(True)


def marginal(joint, slots):
    slots = tuple(slots)
    if not slots:
        raise ValueError('marginal needs at least one slot')
    unknown = [s for s in slots if s not in SLOTS]
    if unknown:
        raise ValueError('unknown slots %s; choose from %s' % (', '.join(unknown), ', '.join(SLOTS)))
    result = {}
    for assignment, p in joint.support.items():
        key = tuple(getattr(assignment, s) for s in slots)
        result[key] = result.get(key, Fraction(0)) + p
    return result


# joint-law checks; each returns a list of failure messages


def _uniform(dist, size, label):
    expected = Fraction(1, size)
    if len(dist) != size:
        return ['%s: support has %d points, expected %d' % (label, len(dist), size)]
    wrong = [(k, p) for k, p in sorted(dist.items()) if p != expected]
    if wrong:
        return ['%s: %s has probability %s, expected %s' % (label, wrong[0][0], wrong[0][1], expected)]
    return []


def check_party_uniformity(joint):
    """Each party's two strings are jointly uniform."""
    failures = []
    for party in PARTIES:
        slots = [slot_name(party, q) for q in PARTIES if q != party]
        size = 1 << sum(slot_width(s, joint.counts) for s in slots)
        failures += _uniform(marginal(joint, slots), size, '(%s) at %s' % (', '.join(slots), joint.settings))
    return failures


def check_three_strings(joint):
    """(a_b, c_a, c_b) is uniform and a_b is independent of Charlie's strings."""
    counts = joint.counts
    label = '(a_b, c_a, c_b) at %s' % (joint.settings,)
    three = marginal(joint, ('a_b', 'c_a', 'c_b'))
    failures = _uniform(three, 1 << counts.total, label)
    a_b = marginal(joint, ('a_b',))
    charlie = marginal(joint, ('c_a', 'c_b'))
    for (x, y, z), p in sorted(three.items()):
        if p != a_b.get((x,), 0) * charlie.get((y, z), 0):
            failures.append('%s does not factor at %s' % (label, (x, y, z)))
            break
    return failures


def check_bob_determined(joint):
    """Given (a_b, c_a, c_b) there is exactly one (b_a, b_c, a_c)."""
    seen = {}
    for a in joint.support:
        seen.setdefault((a.a_b, a.c_a, a.c_b), set()).add((a.b_a, a.b_c, a.a_c))
    return [
        '(b_a, b_c, a_c) takes %d values given (a_b, c_a, c_b) = %s at %s' % (len(v), k, joint.settings)
        for k, v in sorted(seen.items())
        if len(v) != 1
    ]


def check_support_weights(joint):
    size = 1 << joint.counts.total
    failures = _uniform(joint.support, size, 'support at %s' % (joint.settings,))
    if joint.total() != 1:
        failures.append('support at %s sums to %s' % (joint.settings, joint.total()))
    return failures
