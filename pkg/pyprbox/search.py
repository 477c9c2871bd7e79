"""Searching strategy space for networks with small E(F).

Every evaluated value is exact. A value below 1/8 is a bound violation:
it is logged at CRITICAL together with the network and raised.
"""
import csv
import io
import logging
from collections import Counter
from fractions import Fraction

import numpy as np

from .behavior import induced_behavior
from .bell import BOUND, expected_F
from .compiler import serialize
from .exceptions import BoundViolation
from .nodes import PARTIES, BoxRef, Counts, DecisionNode, NetworkStrategy, Node, PartyStrategy, bit_of, own_boxes
from .runtime import fraction_str, make_rng
from .strategy import random_tree, sample_random_network, trivial_network, walk_word

log = logging.getLogger(__name__)

MODES = ('exhaustive', 'random', 'local')
EXHAUSTIVE_COUNTS = Counts(1, 1, 1)
EXHAUSTIVE_LABEL = 'exhaustive over canonical forms'


class SearchConfig(Node):
    def __init__(self, counts=EXHAUSTIVE_COUNTS, mode='exhaustive', budget=1000, seed=0, symmetry=True, **options):
        self.counts = Counts(*counts)
        self.mode = mode
        self.budget = int(budget)
        self.seed = seed
        self.symmetry = symmetry
        self.patience = options.get('patience', 50)
        self.start = options.get('start')
        if mode not in MODES:
            raise ValueError('search mode must be one of %s, got "%s"' % (', '.join(MODES), mode))
        if mode == 'exhaustive' and (self.counts != EXHAUSTIVE_COUNTS or not symmetry):
            raise ValueError('exhaustive search needs counts 1,1,1 and symmetry reduction')
        if mode != 'exhaustive' and self.budget <= 0:
            raise ValueError('budget must be positive, got %d' % self.budget)


class SearchResult(Node):
    def __init__(self, best_value, best_network, histogram, evaluated, exhausted, label):
        self.best_value = best_value
        self.best_network = best_network
        self.histogram = histogram
        self.evaluated = evaluated
        self.exhausted = exhausted
        self.label = label

    def histogram_csv(self):
        out = io.StringIO()
        writer = csv.writer(out, lineterminator='\n')
        writer.writerow(['E(F)', 'count'])
        for value, count in sorted(self.histogram.items()):
            writer.writerow([fraction_str(value), count])
        return out.getvalue()


def canonicalize(strategy, counts=None):
    """Local response of a party: per setting, per own output word, the
    word of inputs fed to the own boxes and the final outcome.

    Strategies with equal forms induce the same behavior in every network.
    """
    boxes = strategy.boxes
    position = dict((box, k) for k, box in enumerate(boxes))
    width = len(boxes)
    form = []
    for setting in (0, 1):
        rows = []
        for word in range(1 << width):
            inputs = 0
            for step in walk_word(strategy, setting, word):
                inputs |= step.input << (width - 1 - position[step.box])
            rows.append((inputs, strategy.output(word, setting)))
        form.append(tuple(rows))
    return tuple(form)


def all_trees(boxes):
    """Every complete decision tree over ``boxes``."""
    if not boxes:
        return [None]
    trees = []
    for k, box in enumerate(boxes):
        rest = boxes[:k] + boxes[k + 1:]
        subtrees = all_trees(rest)
        for bit in (0, 1):
            for on0 in subtrees:
                for on1 in subtrees:
                    trees.append(DecisionNode(box, bit, on0, on1))
    return trees


def setting_forms(party, counts):
    """Canonical single-setting forms with one (tree, outcome row) each."""
    boxes = own_boxes(party, counts)
    size = 1 << len(boxes)
    forms = {}
    for tree in all_trees(boxes):
        for table in range(1 << size):
            row = tuple(bit_of(table, w, size) for w in range(size))
            output = dict(((w, s), row[w]) for w in range(size) for s in (0, 1))
            strategy = PartyStrategy(party, counts, (tree, tree), output)
            forms.setdefault(canonicalize(strategy)[0], []).append((tree, row))
    return forms


def strategy_from(party, counts, first, second):
    """Party strategy whose settings use the (tree, row) pairs ``first`` and ``second``."""
    size = 1 << len(own_boxes(party, counts))
    output = {}
    for setting, (_, row) in enumerate((first, second)):
        for w in range(size):
            output[(w, setting)] = row[w]
    return PartyStrategy(party, counts, (first[0], second[0]), output)


def evaluate(network):
    value = expected_F(induced_behavior(network))
    if value < BOUND:
        log.critical('E(F) = %s < 1/8 for network:\n%s', value, serialize(network))
        raise BoundViolation('E(F) = %s violates the bound 1/8' % value, value, network)
    return value


class FormTables(object):
    """Forms of one party at counts 1,1,1 as arrays over (form, word)."""

    def __init__(self, party):
        self.party = party
        self.forms = setting_forms(party, EXHAUSTIVE_COUNTS)
        self.keys = sorted(self.forms)
        self.inputs = np.array([[inputs for inputs, _ in key] for key in self.keys], dtype=np.int64)
        self.outputs = np.array([[output for _, output in key] for key in self.keys], dtype=np.int64)
        self.words = np.arange(4)

    def __len__(self):
        return len(self.keys)

    def position(self, counterpart):
        return own_boxes(self.party, EXHAUSTIVE_COUNTS).index(BoxRef(counterpart, 0))

    def input_bits(self, counterpart):
        return (self.inputs >> (1 - self.position(counterpart))) & 1

    def output_bits(self, counterpart):
        return (self.words >> (1 - self.position(counterpart))) & 1

    def representative(self, index):
        return self.forms[self.keys[index]][0]


def pair_consistency(p, q):
    """K[f, g, w, v]: box shared by ``p`` and ``q`` is consistent when p plays
    form f with word w and q plays form g with word v."""
    out_p = p.output_bits(q.party)[None, None, :, None]
    out_q = q.output_bits(p.party)[None, None, None, :]
    in_p = p.input_bits(q.party)[:, None, :, None]
    in_q = q.input_bits(p.party)[None, :, None, :]
    return ((out_p ^ out_q) == (in_p & in_q)).astype(np.int64)


def _outcomes_equal(p, q):
    return (p.outputs[:, None, :, None] == q.outputs[None, :, None, :]).astype(np.int64)


class ExhaustiveSearch(object):
    """Minimum of 64 E(F) over all canonical forms at counts 1,1,1.

    Writing c for counts out of 8 consistent assignments,

        64 E(F) = 4 c(A!=C | A_a, C_c) + sum_y c(A!=B | A_a, B_y)
                  + c(even | A_a', B_b, C_c') + 8 - c(even | A_a', B_b', C_c')

    The first two terms only involve pairs, so they are computed with the
    third party's boxes unread.
    """

    def __init__(self):
        self.alice = FormTables('A')
        self.bob = FormTables('B')
        self.charlie = FormTables('C')
        self.k_ab = pair_consistency(self.alice, self.bob)
        self.k_ac = pair_consistency(self.alice, self.charlie)
        self.k_bc = pair_consistency(self.bob, self.charlie)
        self.c1 = np.einsum('acwv,acwv->ac', self.k_ac, 1 - _outcomes_equal(self.alice, self.charlie))
        self.c2 = np.einsum('abwv,abwv->ab', self.k_ab, 1 - _outcomes_equal(self.alice, self.bob))
        equal_bc = _outcomes_equal(self.bob, self.charlie)
        self.even_if_zero = self.k_bc * equal_bc
        self.even_if_one = self.k_bc * (1 - equal_bc)

    def even_counts(self, a1):
        """c(even | A_a' = a1, B, C_c') for all (B, C_c')."""
        total = np.zeros((len(self.bob), len(self.charlie)), dtype=np.int64)
        for w in range(4):
            tensor = self.even_if_one if self.alice.outputs[a1, w] else self.even_if_zero
            total += np.einsum('bv,cu,bcvu->bc', self.k_ab[a1, :, w, :], self.k_ac[a1, :, w, :], tensor)
        return total

    def run(self):
        m1 = self.c1.min(axis=1)
        c2 = self.c2.astype(np.int16)
        best = None
        histogram = Counter()
        for a1 in range(len(self.alice)):
            c3 = self.even_counts(a1).astype(np.int16)
            with_b = (c2[:, :, None] + c3[None, :, :]).min(axis=1)
            with_b_prime = (c2[:, :, None] - c3[None, :, :]).min(axis=1)
            total = 4 * m1[:, None] + with_b + with_b_prime + 8
            values, counts = np.unique(total, return_counts=True)
            for value, count in zip(values, counts):
                histogram[Fraction(int(value), 64)] += int(count)
            a0, c_prime = np.unravel_index(np.argmin(total), total.shape)
            if best is None or total[a0, c_prime] < best[0]:
                best = (int(total[a0, c_prime]), int(a0), a1, int(c_prime), c3)
        value, a0, a1, c_prime, c3 = best
        network = self.network(a0, a1, c_prime, c3)
        log.info('%d x %d x %d forms per setting, minimum 64 E(F) = %d', len(self.alice), len(self.bob), len(self.charlie), value)
        return Fraction(value, 64), network, histogram

    def network(self, a0, a1, c_prime, c3):
        c0 = int(np.argmin(self.c1[a0]))
        b0 = int(np.argmin(self.c2[a0] + c3[:, c_prime]))
        b1 = int(np.argmin(self.c2[a0] - c3[:, c_prime]))
        counts = EXHAUSTIVE_COUNTS
        strategies = {
            'A': strategy_from('A', counts, self.alice.representative(a0), self.alice.representative(a1)),
            'B': strategy_from('B', counts, self.bob.representative(b0), self.bob.representative(b1)),
            'C': strategy_from('C', counts, self.charlie.representative(c0), self.charlie.representative(c_prime)),
        }
        return NetworkStrategy(counts, strategies)


def exhaustive(config):
    search = ExhaustiveSearch()
    value, network, histogram = search.run()
    if value < BOUND:
        log.critical('E(F) = %s < 1/8 for network:\n%s', value, serialize(network))
        raise BoundViolation('E(F) = %s violates the bound 1/8' % value, value, network)
    exact = evaluate(network)
    if exact != value:
        raise AssertionError('reconstructed network has E(F) = %s, count tables gave %s' % (exact, value))
    evaluated = len(search.alice) ** 2 * len(search.bob) ** 2 * len(search.charlie) ** 2
    return SearchResult(value, network, histogram, evaluated, False, EXHAUSTIVE_LABEL)


def random_search(config):
    rng = make_rng(config.seed)
    histogram = Counter()
    best = None
    for _ in range(config.budget):
        network = sample_random_network(config.counts, rng)
        value = evaluate(network)
        histogram[value] += 1
        if best is None or value < best[0]:
            best = (value, network)
    log.info('budget of %d random networks exhausted, best E(F) = %s', config.budget, best[0])
    return SearchResult(best[0], best[1], histogram, config.budget, True, 'random sample')


# local moves; each returns a new network or None when the move does not apply


def _subtrees(tree, path=(), used=()):
    if tree is None:
        return
    yield path, tree, used
    for bit in (0, 1):
        for item in _subtrees(tree.child(bit), path + (bit,), used + (tree.box,)):
            yield item


def _graft(tree, path, new):
    if not path:
        return new
    bit, rest = path[0], path[1:]
    if bit:
        return DecisionNode(tree.box, tree.input, tree.on0, _graft(tree.on1, rest, new))
    return DecisionNode(tree.box, tree.input, _graft(tree.on0, rest, new), tree.on1)


def _pick_node(rng, strategy, setting):
    nodes = list(_subtrees(strategy.trees[setting]))
    if not nodes:
        return None
    return nodes[int(rng.integers(len(nodes)))]


def _with_tree(network, party, setting, tree):
    strategy = network[party]
    trees = list(strategy.trees)
    trees[setting] = tree
    return network.replace(party, strategy.replace(trees=tuple(trees)))


def flip_table_entry(rng, network, party, setting):
    strategy = network[party]
    word = int(rng.integers(1 << strategy.width))
    table = dict(strategy.output_table)
    table[(word, setting)] ^= 1
    return network.replace(party, strategy.replace(output_table=table))


def flip_input(rng, network, party, setting):
    picked = _pick_node(rng, network[party], setting)
    if picked is None:
        return None
    path, node, _ = picked
    new = DecisionNode(node.box, 1 - node.input, node.on0, node.on1)
    return _with_tree(network, party, setting, _graft(network[party].trees[setting], path, new))


def swap_subtrees(rng, network, party, setting):
    picked = _pick_node(rng, network[party], setting)
    if picked is None:
        return None
    path, node, _ = picked
    new = DecisionNode(node.box, node.input, node.on1, node.on0)
    return _with_tree(network, party, setting, _graft(network[party].trees[setting], path, new))


def reroot(rng, network, party, setting):
    picked = _pick_node(rng, network[party], setting)
    if picked is None:
        return None
    path, _, used = picked
    remaining = tuple(b for b in network[party].boxes if b not in used)
    return _with_tree(network, party, setting, _graft(network[party].trees[setting], path, random_tree(rng, remaining)))


MOVES = (flip_table_entry, flip_input, swap_subtrees, reroot)


def local_search(config):
    rng = make_rng(config.seed)
    current = config.start or trivial_network(config.counts)
    value = evaluate(current)
    histogram = Counter([value])
    best = (value, current)
    evaluated = 1
    stale = 0
    restarts = 0
    while evaluated < config.budget:
        move = MOVES[int(rng.integers(len(MOVES)))]
        party = PARTIES[int(rng.integers(3))]
        candidate = move(rng, current, party, int(rng.integers(2)))
        if candidate is None:
            stale += 1
        else:
            candidate_value = evaluate(candidate)
            evaluated += 1
            histogram[candidate_value] += 1
            if candidate_value < value:
                current, value, stale = candidate, candidate_value, 0
                if value < best[0]:
                    best = (value, current)
            else:
                stale += 1
        if stale >= config.patience and evaluated < config.budget:
            current = sample_random_network(config.counts, rng)
            value = evaluate(current)
            evaluated += 1
            histogram[value] += 1
            stale = 0
            restarts += 1
            if value < best[0]:
                best = (value, current)
    log.info('local search: %d evaluations, %d restarts, best E(F) = %s', evaluated, restarts, best[0])
    return SearchResult(best[0], best[1], histogram, evaluated, True, 'local search')


def minimize_EF(config):
    if config.mode == 'exhaustive':
        return exhaustive(config)
    if config.mode == 'random':
        return random_search(config)
    return local_search(config)


def collapse_ratio(party='A', counts=EXHAUSTIVE_COUNTS):
    """Per-party strategies divided by per-party canonical forms."""
    forms = setting_forms(party, counts)
    per_setting = sum(len(v) for v in forms.values())
    return Fraction(per_setting ** 2, len(forms) ** 2)


def equivalent_pairs(rng, party='A', counts=EXHAUSTIVE_COUNTS, pairs=200):
    """Random pairs of different strategies with equal canonical forms."""
    anywhere = list(setting_forms(party, counts).values())
    groups = [v for v in anywhere if len(v) > 1]
    result = []
    for _ in range(pairs):
        group = groups[int(rng.integers(len(groups)))]
        i, j = rng.choice(len(group), size=2, replace=False)
        other = anywhere[int(rng.integers(len(anywhere)))]
        rep = other[int(rng.integers(len(other)))]
        first = strategy_from(party, counts, group[int(i)], rep)
        second = strategy_from(party, counts, group[int(j)], rep)
        result.append((first, second))
    return result


def check_canonical_soundness(pairs=200, networks=20, seed=0, party='A', counts=EXHAUSTIVE_COUNTS):
    """Embed equal-form pairs into random networks and compare behaviors.

    Returns the list of (pair index, network index) where they differ.
    """
    rng = make_rng(seed)
    failures = []
    for k, (first, second) in enumerate(equivalent_pairs(rng, party, counts, pairs)):
        if canonicalize(first) != canonicalize(second):
            raise AssertionError('pair %d does not share a canonical form' % k)
        for n in range(networks):
            host = sample_random_network(counts, rng)
            if induced_behavior(host.replace(party, first)) != induced_behavior(host.replace(party, second)):
                failures.append((k, n))
    return failures
