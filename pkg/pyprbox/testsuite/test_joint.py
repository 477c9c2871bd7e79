from fractions import Fraction
from pathlib import Path

import pytest

from pyprbox.checks import verify_joint
from pyprbox.joint import (
    JointDistribution,
    a_c_function,
    build_joint,
    check_bob_determined,
    check_ordering_invariance,
    check_party_uniformity,
    check_support_weights,
    check_three_strings,
    marginal,
)
from pyprbox.nodes import ORDERINGS, SETTINGS, Counts
from pyprbox.parser import deserialize
from pyprbox.runtime import read_text
from pyprbox.strategy import sample_random_network, trivial_network

CASES = Path(__file__).parent / 'cases'

LAWS = (check_party_uniformity, check_three_strings, check_bob_determined, check_support_weights)


def wired():
    return deserialize(read_text(str(CASES / 'wired.json')))


def random_networks(counts, number, offset=0):
    return [sample_random_network(counts, offset + seed) for seed in range(number)]


class TestJointLaws(object):
    @pytest.mark.parametrize('counts, number', [((1, 1, 1), 40), ((2, 2, 2), 6), ((0, 2, 1), 10), ((2, 0, 1), 10)])
    def test_laws_hold_on_random_networks(self, counts, number):
        for network in random_networks(counts, number):
            for s in SETTINGS:
                joint = build_joint(network, s)
                for law in LAWS:
                    assert law(joint) == [], (law.__name__, s)

    def test_support_is_dyadic(self):
        joint = build_joint(wired(), SETTINGS[5])
        assert len(joint) == 8
        assert set(joint.support.values()) == {Fraction(1, 8)}
        assert joint.total() == 1

    def test_charlie_is_uniform(self):
        network = sample_random_network((2, 1, 2), 11)
        for s in SETTINGS:
            dist = marginal(build_joint(network, s), ('c_a', 'c_b'))
            assert len(dist) == 8
            assert set(dist.values()) == {Fraction(1, 8)}

    def test_no_boxes(self):
        joint = build_joint(trivial_network((0, 0, 0)), SETTINGS[0])
        assert joint.total() == 1
        assert len(joint) == 1

    @pytest.mark.slow
    def test_law_property_suite(self):
        for network in random_networks((1, 1, 1), 1000, offset=10 ** 5):
            for s in SETTINGS:
                joint = build_joint(network, s, checked=True)
                for law in LAWS:
                    assert law(joint) == [], (law.__name__, s)


class TestOrderings(object):
    @pytest.mark.parametrize('counts, number', [((1, 1, 1), 30), ((2, 2, 2), 3)])
    def test_all_orderings_agree(self, counts, number):
        for network in random_networks(counts, number, offset=100):
            for s in SETTINGS:
                assert check_ordering_invariance(network, s)

    def test_orderings_give_equal_joints(self):
        network = wired()
        joints = [build_joint(network, SETTINGS[3], tuple(o)) for o in ORDERINGS]
        assert all(j == joints[0] for j in joints)

    @pytest.mark.slow
    def test_ordering_property_suite(self):
        for counts, number in (((1, 1, 1), 1000), ((2, 2, 2), 100)):
            for network in random_networks(counts, number, offset=2 * 10 ** 5):
                for s in SETTINGS:
                    assert check_ordering_invariance(network, s, checked=True)

    def test_it_rejects_a_bad_ordering(self):
        with pytest.raises(ValueError):
            build_joint(wired(), SETTINGS[0], ('A', 'A', 'B'))


class TestAcFunction(object):
    def test_it_ignores_bob(self):
        network = wired()
        other = network.replace('B', sample_random_network((1, 1, 1), 5)['B'])
        for a_b in ('0', '1'):
            for c_a in ('0', '1'):
                for c_b in ('0', '1'):
                    assert a_c_function(network, a_b, c_a, c_b, 0, 0) == a_c_function(other, a_b, c_a, c_b, 0, 0)

    def test_it_matches_the_joint(self):
        network = sample_random_network((1, 2, 1), 4)
        joint = build_joint(network, SETTINGS[1])
        counts = network.counts
        for point in joint.support:
            a_b, a_c, _, _, c_a, c_b = point.strings(counts)
            assert a_c_function(network, a_b, c_a, c_b, 0, 1) == a_c

    def test_it_validates_bit_strings(self):
        with pytest.raises(ValueError):
            a_c_function(wired(), '01', '0', '0', 0, 0)


class TestCorruptedJoint(object):
    def corrupted(self):
        joint = build_joint(trivial_network(), SETTINGS[0])
        support = dict(joint.support)
        point = sorted(support)[0]
        weight = support.pop(point)
        support[point._replace(b_a=1 - point.b_a)] = weight
        return JointDistribution(joint.settings, joint.counts, support)

    def test_failure_is_localized(self):
        report = verify_joint(self.corrupted())
        assert [r.name for r in report.failures()] == ['party uniformity']
        assert '(b_a, b_c)' in report.failures()[0].detail
        assert report.failures()[0].detail.startswith('P(p_q, p_r) = 2^-(n_pq + n_pr) violated: ')

    def test_a_true_joint_passes(self):
        assert verify_joint(build_joint(wired(), SETTINGS[2])).ok

    def test_moved_weight_breaks_the_weights(self):
        joint = build_joint(trivial_network(), SETTINGS[0])
        support = dict(joint.support)
        first, second = sorted(support)[:2]
        support[first] += support.pop(second)
        broken = JointDistribution(joint.settings, joint.counts, support)
        assert check_support_weights(broken)
        assert check_three_strings(broken)


class TestMarginal(object):
    def test_it_rejects_unknown_slots(self):
        joint = build_joint(wired(), SETTINGS[0])
        with pytest.raises(ValueError):
            marginal(joint, ('a_x',))
        with pytest.raises(ValueError):
            marginal(joint, ())

    def test_csv(self):
        text = build_joint(trivial_network(), SETTINGS[0]).to_csv()
        lines = text.splitlines()
        assert lines[0] == 'a_b,a_c,b_a,b_c,c_a,c_b,probability'
        assert len(lines) == 9
        assert all(line.endswith(',1/8') for line in lines[1:])

    def test_counts_of_a_joint(self):
        assert build_joint(wired(), SETTINGS[0]).counts == Counts(1, 1, 1)
