"""Observable behaviors P(ABC|XYZ), their no-signaling audit, and a
sequential Monte Carlo sampler."""
import csv
import io
import json
import logging
import math
from collections import namedtuple
from fractions import Fraction

import numpy as np

from . import lexer
from .joint import DEFAULT_ORDERING, build_joint
from .nodes import OUTCOMES, PARTIES, SETTINGS, Node, OutcomeTriple, SettingTriple, own_boxes
from .runtime import RNG_ALGORITHM, fraction_str, json_value, make_rng
from .strategy import ensure_valid

log = logging.getLogger(__name__)

EXACT = 'exact'
FLOAT = 'float'
TOLERANCE = 1e-12
CHUNK = 1 << 16


def _zero(mode):
    return Fraction(0) if mode == EXACT else 0.0


class Behavior(Node):
    """An 8x8 table indexed by settings index (4x+2y+z) and outcome index
    (4A+2B+C, '+' = 1)."""

    def __init__(self, mode, rows, meta=None):
        if mode not in (EXACT, FLOAT):
            raise ValueError('mode must be "exact" or "float", got %r' % (mode,))
        self.mode = mode
        self.rows = tuple(tuple(row) for row in rows)
        self.meta = dict(meta or {})
        if len(self.rows) != 8 or any(len(row) != 8 for row in self.rows):
            raise ValueError('a behavior needs 8 rows of 8 probabilities')

    @property
    def tolerance(self):
        return 0 if self.mode == EXACT else TOLERANCE

    def prob(self, settings, outcome):
        return self.rows[SettingTriple(*settings).index][OutcomeTriple(*outcome).index]

    def row(self, settings):
        return self.rows[SettingTriple(*settings).index]

    def conditional(self, predicate, settings):
        """P(predicate(outcome) | settings)."""
        row = self.row(settings)
        return sum((row[o.index] for o in OUTCOMES if predicate(o)), _zero(self.mode))

    def marginal(self, settings, parties):
        result = {}
        row = self.row(settings)
        for o in OUTCOMES:
            key = tuple(o.of(p) for p in parties)
            result[key] = result.get(key, _zero(self.mode)) + row[o.index]
        return result

    def is_normalized(self):
        for row in self.rows:
            if any(v < -self.tolerance for v in row):
                return False
            if abs(sum(row, _zero(self.mode)) - 1) > self.tolerance:
                return False
        return True

    def __eq__(self, other):
        return isinstance(other, Behavior) and self.mode == other.mode and self.rows == other.rows

    def __ne__(self, other):
        return not self == other

    __hash__ = None

    def to_json(self):
        table = {}
        for s in SETTINGS:
            for o in OUTCOMES:
                table['%s|%s' % (s.symbol, o.symbol)] = json_value(self.rows[s.index][o.index])
        doc = {'mode': self.mode, 'meta': self.meta, 'table': table}
        return json.dumps(doc, indent=1) + '\n'

    @classmethod
    def from_json(cls, source):
        doc = json.loads(source) if not isinstance(source, dict) else source
        mode = doc.get('mode', EXACT)
        rows = [[_zero(mode)] * 8 for _ in range(8)]
        seen = set()
        for key, value in doc['table'].items():
            s, o = lexer.cell(key)
            rows[s.index][o.index] = lexer.fraction(value) if mode == EXACT else float(value)
            seen.add((s.index, o.index))
        if len(seen) != 64:
            raise ValueError('behavior table has %d of 64 entries' % len(seen))
        return cls(mode, rows, doc.get('meta'))

    def to_csv(self):
        out = io.StringIO()
        writer = csv.writer(out, lineterminator='\n')
        writer.writerow(['setting'] + [o.symbol for o in OUTCOMES])
        for s in SETTINGS:
            row = self.rows[s.index]
            writer.writerow([s.symbol] + [
                fraction_str(row[o.index]) if self.mode == EXACT else repr(float(row[o.index])) for o in OUTCOMES
            ])
        return out.getvalue()


def from_function(mode, prob):
    """Behavior from ``prob(settings, outcome)``."""
    rows = [[_zero(mode)] * 8 for _ in range(8)]
    for s in SETTINGS:
        for o in OUTCOMES:
            rows[s.index][o.index] = prob(s, o)
    return Behavior(mode, rows)


def deterministic(outcome_of):
    """Exact behavior where ``outcome_of(settings)`` happens with certainty."""
    return from_function(EXACT, lambda s, o: Fraction(1) if tuple(o) == tuple(outcome_of(s)) else Fraction(0))


def mix(first, second, weight):
    """weight * first + (1 - weight) * second."""
    exact = first.mode == second.mode == EXACT and isinstance(weight, (int, Fraction))
    if exact:
        weight = Fraction(weight)
        rows = [[weight * a + (1 - weight) * b for a, b in zip(r1, r2)] for r1, r2 in zip(first.rows, second.rows)]
        return Behavior(EXACT, rows)
    weight = float(weight)
    rows = [[weight * float(a) + (1 - weight) * float(b) for a, b in zip(r1, r2)] for r1, r2 in zip(first.rows, second.rows)]
    return Behavior(FLOAT, rows)


def induced_behavior(network, ordering=DEFAULT_ORDERING):
    ensure_valid(network)
    counts = network.counts
    strategies = [network[p] for p in PARTIES]
    rows = [[Fraction(0)] * 8 for _ in range(8)]
    for s in SETTINGS:
        joint = build_joint(network, s, ordering, checked=True)
        row = rows[s.index]
        for point, p in joint.support.items():
            outcome = [
                strategy.output(point.party_word(party, counts), s.of(party))
                for party, strategy in zip(PARTIES, strategies)
            ]
            row[OutcomeTriple(*outcome).index] += p
    return Behavior(EXACT, rows, {'source': 'network', 'ordering': ''.join(ordering)})


class FlatStrategy(object):
    """A party's trees as index arrays, for stepping many rounds at once."""

    def __init__(self, strategy):
        self.party = strategy.party
        self.width = strategy.width
        position = dict((box, k) for k, box in enumerate(strategy.boxes))
        boxes, inputs, children = [], [], []

        def add(node):
            if node is None:
                return -1
            index = len(boxes)
            boxes.append(position[node.box])
            inputs.append(node.input)
            children.append([-1, -1])
            children[index][0] = add(node.on0)
            children[index][1] = add(node.on1)
            return index

        self.roots = np.array([add(tree) for tree in strategy.trees])
        self.box = np.array(boxes or [0], dtype=np.int64)
        self.input = np.array(inputs or [0], dtype=np.int64)
        self.child = np.array(children or [[-1, -1]], dtype=np.int64)
        size = 1 << self.width
        self.table = np.array([[strategy.output(w, s) for w in range(size)] for s in (0, 1)], dtype=np.int64)
        # counterpart of each own box and that box's position on the counterpart side
        self.counterpart = np.array([PARTIES.index(b.counterpart) for b in strategy.boxes] or [0], dtype=np.int64)
        self.counterpart_position = np.array(
            [own_boxes(b.counterpart, strategy.counts).index(type(b)(strategy.party, b.index)) for b in strategy.boxes] or [0],
            dtype=np.int64,
        )


def _simulate_chunk(flats, ordering, n, rng):
    settings = rng.integers(8, size=n)
    own_setting = {'A': (settings >> 2) & 1, 'B': (settings >> 1) & 1, 'C': settings & 1}
    rows = np.arange(n)
    outputs = {}
    inputs = {}
    outcome = {}
    done = set()
    for party in ordering:
        flat = flats[party]
        out = np.zeros((n, max(flat.width, 1)), dtype=np.int64)
        inp = np.zeros_like(out)
        word = np.zeros(n, dtype=np.int64)
        node = flat.roots[own_setting[party]]
        for _ in range(flat.width):
            pos = flat.box[node]
            bit_in = flat.input[node]
            bit_out = rng.integers(2, size=n)
            for q in done:
                mask = flat.counterpart[pos] == PARTIES.index(q)
                if not mask.any():
                    continue
                there = flat.counterpart_position[pos[mask]]
                bit_out[mask] = outputs[q][rows[mask], there] ^ (bit_in[mask] & inputs[q][rows[mask], there])
            out[rows, pos] = bit_out
            inp[rows, pos] = bit_in
            word |= bit_out << (flat.width - 1 - pos)
            node = flat.child[node, bit_out]
        outputs[party] = out
        inputs[party] = inp
        outcome[party] = flat.table[own_setting[party], word]
        done.add(party)
    cells = settings * 8 + 4 * outcome['A'] + 2 * outcome['B'] + outcome['C']
    return np.bincount(cells, minlength=64)


def simulate_rounds(network, ordering=DEFAULT_ORDERING, rounds=10 ** 6, seed=0):
    """Empirical behavior from ``rounds`` sequential rounds.

    Settings are uniform over the 8 triples. Parties act in ``ordering``;
    an output whose counterpart side is still unread is a fair coin, the
    rest are forced. Rounds are drawn in chunks, chunk ``k`` from the
    ``k``-th jumped Philox stream of ``seed``.
    """
    if rounds <= 0:
        raise ValueError('rounds must be a positive integer, got %r' % (rounds,))
    ensure_valid(network)
    ordering = tuple(ordering)
    flats = dict((p, FlatStrategy(network[p])) for p in PARTIES)
    tally = np.zeros(64, dtype=np.int64)
    done = 0
    chunk = 0
    while done < rounds:
        n = min(CHUNK, rounds - done)
        tally += _simulate_chunk(flats, ordering, n, make_rng(seed, chunk))
        done += n
        chunk += 1
    counts = tally.reshape(8, 8)
    per_setting = counts.sum(axis=1)
    rows = [
        [float(c) / per_setting[s] if per_setting[s] else 0.0 for c in counts[s]]
        for s in range(8)
    ]
    log.debug('simulated %d rounds in %d chunks', rounds, chunk)
    meta = {
        'source': 'monte-carlo',
        'rounds': int(rounds),
        'seed': seed,
        'rng': RNG_ALGORITHM,
        'ordering': ''.join(ordering),
        'setting_rounds': [int(c) for c in per_setting],
    }
    return Behavior(FLOAT, rows, meta)


def standard_errors(behavior, rounds_per_setting):
    """Binomial standard error of each cell given the true behavior."""
    return [
        [math.sqrt(float(p) * (1 - float(p)) / n) if n else float('inf') for p in row]
        for row, n in zip(behavior.rows, rounds_per_setting)
    ]


def within_sigmas(empirical, exact, sigmas=4):
    """Cells where ``empirical`` is farther than ``sigmas`` standard errors from ``exact``."""
    errors = standard_errors(exact, empirical.meta['setting_rounds'])
    far = []
    for s in SETTINGS:
        for o in OUTCOMES:
            gap = abs(empirical.rows[s.index][o.index] - float(exact.rows[s.index][o.index]))
            if gap > sigmas * errors[s.index][o.index] + TOLERANCE:
                far.append((s, o, gap))
    return far


class Equality(namedtuple('Equality', 'name lhs rhs')):
    __slots__ = ()


def _label(parties, outcome_bits):
    return ','.join('%s=%s' % (p, '+' if b else '0') for p, b in zip(parties, outcome_bits))


def _cells(settings, parties, outcome_bits):
    return tuple(
        (settings.index, o.index)
        for o in OUTCOMES
        if tuple(o.of(p) for p in parties) == tuple(outcome_bits)
    )


def _with(assigned):
    return SettingTriple(*(assigned[p] for p in PARTIES))


def no_signaling_equalities():
    """The full (3,2,2) no-signaling set.

    One-party marginals are compared across the three non-reference
    settings of the other two parties; two-party marginals across the
    remote party's setting.
    """
    equalities = []
    for party in PARTIES:
        others = [q for q in PARTIES if q != party]
        for own in (0, 1):
            for k in (0, 1):
                reference = _with({party: own, others[0]: 0, others[1]: 0})
                for u, v in ((0, 1), (1, 0), (1, 1)):
                    s = _with({party: own, others[0]: u, others[1]: v})
                    name = 'P(%s|%s) = P(%s|%s)' % (_label(party, (k,)), s, _label(party, (k,)), reference)
                    equalities.append(Equality(name, _cells(s, party, (k,)), _cells(reference, party, (k,))))
    for remote in reversed(PARTIES):
        pair = [q for q in PARTIES if q != remote]
        for sp in (0, 1):
            for sq in (0, 1):
                for k in (0, 1):
                    for l in (0, 1):
                        s1 = _with({pair[0]: sp, pair[1]: sq, remote: 1})
                        s0 = _with({pair[0]: sp, pair[1]: sq, remote: 0})
                        label = _label(pair, (k, l))
                        name = 'P(%s|%s) = P(%s|%s)' % (label, s1, label, s0)
                        equalities.append(Equality(name, _cells(s1, pair, (k, l)), _cells(s0, pair, (k, l))))
    return equalities


class AuditReport(Node):
    def __init__(self, violations):
        self.violations = list(violations)

    @property
    def ok(self):
        return not self.violations

    def __bool__(self):
        return self.ok

    __nonzero__ = __bool__

    def __str__(self):
        return 'no-signaling holds' if self.ok else '\n'.join(self.violations)


def cell_sum(behavior, cells):
    return sum((behavior.rows[s][o] for s, o in cells), _zero(behavior.mode))


def check_no_signaling(behavior):
    tolerance = behavior.tolerance
    violations = []
    for eq in no_signaling_equalities():
        lhs, rhs = cell_sum(behavior, eq.lhs), cell_sum(behavior, eq.rhs)
        if (lhs != rhs) if tolerance == 0 else (abs(lhs - rhs) > tolerance):
            violations.append('%s violated: %s != %s' % (eq.name, lhs, rhs))
    return AuditReport(violations)


def signaling_fixture(receiver='A', sender='B'):
    """Deterministic table where ``receiver`` outputs ``sender``'s setting."""
    def outcome(s):
        return tuple(s.of(sender) if p == receiver else 0 for p in PARTIES)

    behavior = deterministic(outcome)
    behavior.meta['source'] = 'signaling fixture'
    return behavior
