from fractions import Fraction
from pathlib import Path

import pytest

from pyprbox import lexer
from pyprbox.compiler import serialize
from pyprbox.exceptions import CapExceeded, StrategyError
from pyprbox.nodes import BoxRef, Counts, DecisionNode, bit_string, join_word, own_boxes, split_word
from pyprbox.parser import deserialize
from pyprbox.runtime import read_text
from pyprbox.search import all_trees
from pyprbox.strategy import (
    chain_tree,
    ensure_valid,
    sample_random_network,
    trivial_network,
    validate,
    walk,
    walk_word,
)
from pyprbox.utils import load_network, process

CASES = Path(__file__).parent / 'cases'


def load_case(name):
    return deserialize(read_text(str(CASES / name)), filename=name)


EXPECTED_VIOLATIONS = {
    'trivial.json': set(),
    'wired.json': set(),
    'repeated_box.json': {'repeated box'},
    'missing_child.json': {'missing child'},
    'out_of_range.json': {'out-of-range index'},
    'partial_table.json': {'partial output table'},
    'wrong_counterpart.json': {'wrong counterpart'},
}


@pytest.mark.parametrize('name', sorted(EXPECTED_VIOLATIONS))
def test_case_files(name):
    report = validate(load_case(name))
    expected = EXPECTED_VIOLATIONS[name]
    if expected:
        assert not report.ok
        assert expected <= report.kinds()
    else:
        assert report.ok, str(report)


class TestOwnBoxes(object):
    def test_it_orders_by_counterpart_then_index(self):
        counts = Counts(2, 1, 3)
        assert own_boxes('A', counts) == (BoxRef('B', 0), BoxRef('B', 1), BoxRef('C', 0))
        assert own_boxes('B', counts) == (BoxRef('A', 0), BoxRef('A', 1), BoxRef('C', 0), BoxRef('C', 1), BoxRef('C', 2))
        assert own_boxes('C', counts) == (BoxRef('A', 0), BoxRef('B', 0), BoxRef('B', 1), BoxRef('B', 2))

    def test_words_are_big_endian(self):
        assert split_word(0b10110, (2, 3)) == (0b10, 0b110)
        assert join_word((0b10, 0b110), (2, 3)) == 0b10110
        assert bit_string(5, 4) == '0101'
        assert bit_string(0, 0) == ''

    def test_it_caps_owned_boxes(self):
        with pytest.raises(CapExceeded):
            trivial_network((9, 8, 0))
        assert trivial_network((8, 8, 0)).counts == Counts(8, 8, 0)

    def test_it_rejects_negative_counts(self):
        with pytest.raises(StrategyError):
            trivial_network((1, -1, 1))


class TestWalk(object):
    def test_it_follows_the_outputs(self):
        network = load_case('wired.json')
        transcript = walk_word(network['A'], 0, 0b01)
        # a_c = 1 is read first and sent as the input of the B box
        assert [(str(s.box), s.input, s.output) for s in transcript] == [('C:0', 0, 1), ('B:0', 1, 0)]

    def test_it_rejects_a_missing_child(self):
        network = load_case('missing_child.json')
        tree = network['A'].trees[1]
        with pytest.raises(StrategyError):
            walk(tree, {BoxRef('B', 0): 0, BoxRef('C', 0): 1})

    def test_it_rejects_a_repeated_box(self):
        network = load_case('repeated_box.json')
        with pytest.raises(StrategyError):
            walk(network['A'].trees[0], {BoxRef('B', 0): 0, BoxRef('C', 0): 0})

    def test_chain_tree_ignores_outputs(self):
        boxes = own_boxes('B', Counts(1, 1, 2))
        tree = chain_tree(boxes, input=1)
        for word in range(8):
            assignment = dict((box, (word >> (2 - i)) & 1) for i, box in enumerate(boxes))
            assert [s.box for s in walk(tree, assignment)] == list(boxes)

    def test_each_assignment_has_its_own_path(self):
        boxes = own_boxes('A', Counts(1, 1, 1))
        for tree in all_trees(boxes):
            paths = set()
            for word in range(4):
                assignment = dict((box, (word >> (1 - i)) & 1) for i, box in enumerate(boxes))
                transcript = walk(tree, assignment)
                assert sorted(transcript.outputs) == sorted(boxes)
                assert transcript.outputs == assignment
                paths.add(tuple(transcript))
            assert len(paths) == 4

    def test_three_boxes_with_each_counterpart(self):
        counts = Counts(3, 3, 1)
        b1, b2, b3 = (BoxRef('B', i) for i in range(3))
        c1, c2, c3 = (BoxRef('C', i) for i in range(3))
        after_b2 = DecisionNode(c2, 0, chain_tree([b3, c1, c3]), chain_tree([c1, b3, c3]))
        tree = DecisionNode(
            b1, 0,
            chain_tree([b2, b3, c1, c2, c3]),
            DecisionNode(b2, 1, after_b2, chain_tree([b3, c1, c2, c3], input=1)),
        )
        strategy = trivial_network(counts)['A'].replace(trees=(tree, tree))
        assert validate(trivial_network(counts).replace('A', strategy)).ok

        assignment = dict((box, 0) for box in own_boxes('A', counts))
        assignment[b1] = 1
        steps = list(walk(tree, assignment))
        assert [(str(s.box), s.input) for s in steps[:3]] == [('B:0', 0), ('B:1', 1), ('C:1', 0)]
        assert len(steps) == 6


class TestSampling(object):
    def test_it_is_deterministic_per_seed(self):
        assert sample_random_network((2, 1, 2), 7) == sample_random_network((2, 1, 2), 7)
        assert sample_random_network((2, 1, 2), 7) != sample_random_network((2, 1, 2), 8)

    @pytest.mark.parametrize('counts', [(1, 1, 1), (2, 2, 2), (0, 2, 1), (3, 0, 0)])
    def test_sampled_networks_are_valid(self, counts):
        for seed in range(10):
            assert validate(sample_random_network(counts, seed)).ok

    def test_a_thousand_sampled_networks_are_valid(self):
        for seed in range(1000):
            report = validate(sample_random_network((1, 1, 1), seed))
            assert report.ok, 'seed %d: %s' % (seed, report)


class TestSerialization(object):
    def test_the_trivial_file_matches_the_trivial_network(self):
        assert load_case('trivial.json') == trivial_network()

    def test_it_round_trips(self):
        network = sample_random_network((2, 1, 2), 3)
        assert deserialize(serialize(network)) == network
        wired = load_case('wired.json')
        assert deserialize(serialize(wired)) == wired

    def test_it_reports_broken_json(self):
        with pytest.raises(StrategyError) as e:
            load_case('not_json.json')
        assert 'not valid JSON' in str(e.value)

    def test_it_rejects_fractional_counts(self):
        source = read_text(str(CASES / 'trivial.json')).replace('"AB": 1', '"AB": 1.5', 1)
        with pytest.raises(StrategyError) as e:
            deserialize(source)
        assert 'must be integers' in str(e.value)
        with pytest.raises(StrategyError):
            trivial_network((1, True, 1))

    def test_it_reports_where_a_field_is_wrong(self):
        source = read_text(str(CASES / 'trivial.json')).replace('"input": 0', '"input": 2', 1)
        with pytest.raises(StrategyError) as e:
            deserialize(source, filename='broken.json')
        assert 'broken.json' in str(e.value)
        assert 'A/trees/0' in str(e.value)

    def test_ensure_valid_carries_the_violations(self):
        with pytest.raises(StrategyError) as e:
            ensure_valid(load_case('partial_table.json'))
        assert [v.kind for v in e.value.violations] == ['partial output table']


class TestLexer(object):
    def test_settings_and_outcomes(self):
        assert lexer.setting("ab'c").index == 2
        assert lexer.outcome('+0+').index == 5
        s, o = lexer.cell("a'b'c'|000")
        assert (s.index, o.index) == (7, 0)

    @pytest.mark.parametrize('text', ['abd', "a''bc", '+-+', 'B:x'])
    def test_it_rejects_garbage(self, text):
        with pytest.raises(ValueError):
            if ':' in text:
                lexer.box(text)
            elif text[0] in '+0-':
                lexer.outcome(text)
            else:
                lexer.setting(text)

    def test_fractions(self):
        assert lexer.fraction(' 3 / 8') == Fraction(3, 8)
        assert lexer.fraction('-2') == -2
        with pytest.raises(ValueError):
            lexer.fraction('1/0')

    def test_orderings_and_counts(self):
        assert lexer.ordering('cab') == ('C', 'A', 'B')
        assert lexer.counts('1, 2,3') == (1, 2, 3)
        with pytest.raises(ValueError):
            lexer.ordering('AAB')


def test_process_rewrites_a_file_canonically():
    source = read_text(str(CASES / 'wired.json'))
    assert process(source, filename='wired.json', indent=None) == serialize(load_case('wired.json'), indent=None)
    assert deserialize(process(source)) == load_case('wired.json')
    assert load_network(str(CASES / 'wired.json')) == load_case('wired.json')
