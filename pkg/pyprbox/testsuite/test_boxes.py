from fractions import Fraction

import pytest

from pyprbox.boxes import CorrelatedBoxes, pathological_signaling_demo, pr_box_probability, pr_determined_output


@pytest.mark.parametrize('a, x, y', [(a, x, y) for a in (0, 1) for x in (0, 1) for y in (0, 1)])
def test_determined_output_satisfies_the_box(a, x, y):
    b = pr_determined_output(a, y, x)
    assert a ^ b == x & y


@pytest.mark.parametrize('a, x, y', [(a, x, y) for a in (0, 1) for x in (0, 1) for y in (0, 1)])
def test_determined_output_is_its_own_inverse(a, x, y):
    b = pr_determined_output(a, y, x)
    assert pr_determined_output(b, x, y) == a


def test_determined_output_rejects_non_bits():
    with pytest.raises(ValueError):
        pr_determined_output(2, 0, 0)
    with pytest.raises(ValueError):
        pr_determined_output(0, -1, 0)


def test_box_law_is_normalized():
    for x in (0, 1):
        for y in (0, 1):
            assert sum(pr_box_probability(a, b, x, y) for a in (0, 1) for b in (0, 1)) == 1
            # each side alone is a fair coin
            assert sum(pr_box_probability(0, b, x, y) for b in (0, 1)) == Fraction(1, 2)


class TestSignalingDemo(object):
    @pytest.mark.parametrize('message', [0, 1])
    def test_it_decodes_the_message(self, message):
        assert pathological_signaling_demo(message) == message

    def test_branches_are_equally_likely(self):
        branches = CorrelatedBoxes().branches()
        assert sum(p for p, _ in branches) == 1
        assert sorted(coin for _, coin in branches) == [0, 1]

    def test_the_decoded_bit_ignores_the_coin(self):
        boxes = CorrelatedBoxes()
        for message in (0, 1):
            assert set(boxes.run(message, coin) for _, coin in boxes.branches()) == {message}
