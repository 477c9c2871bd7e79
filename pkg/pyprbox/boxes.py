"""PR box semantics.

A PR box takes a bit from each side and returns a bit to each side with

    P(a, b | x, y) = 1/2   if a XOR b == x AND y
                     0     otherwise

Whichever side reads first sees a fair coin; the other side's output is
then fixed by :func:`pr_determined_output`.
"""
import logging
from fractions import Fraction

log = logging.getLogger(__name__)

HALF = Fraction(1, 2)


def _bit(value, name='bit'):
    if value not in (0, 1):
        raise ValueError('%s must be 0 or 1, got %r' % (name, value))
    return int(value)


def pr_determined_output(counterpart_output, own_input, counterpart_input):
    """Output forced on a box whose other side has already been read."""
    return _bit(counterpart_output, 'counterpart_output') ^ (
        _bit(own_input, 'own_input') & _bit(counterpart_input, 'counterpart_input')
    )


def pr_box_probability(a, b, x, y):
    if (_bit(a) ^ _bit(b)) == (_bit(x) & _bit(y)):
        return HALF
    return Fraction(0)


class CorrelatedBoxes(object):
    """Two PR boxes shared by the same pair whose outputs on the sending
    side are perfectly correlated.

    Each box taken alone is a valid PR box. Jointly they are not a product of
    independent boxes, and that is enough to open a signaling channel.
    """

    def __init__(self):
        self.boxes = 2

    def branches(self):
        # the shared coin: both sender outputs equal it
        return [(HALF, 0), (HALF, 1)]

    def run(self, message, coin):
        sender_in_1 = 0
        sender_out_1 = coin
        sender_in_2 = sender_out_1 ^ message
        sender_out_2 = coin
        receiver_in_2 = 1
        return pr_determined_output(sender_out_2, receiver_in_2, sender_in_2)


def pathological_signaling_demo(message):
    """Send ``message`` through correlated boxes; returns the decoded bit.

    Enumerates both equally likely branches of the correlated outputs and
    checks the receiver decodes the same bit on each.
    """
    message = _bit(message, 'message')
    boxes = CorrelatedBoxes()
    decoded = {}
    for weight, coin in boxes.branches():
        bit = boxes.run(message, coin)
        decoded[bit] = decoded.get(bit, Fraction(0)) + weight
    if len(decoded) != 1:
        raise AssertionError('decoded bit depends on the shared coin: %r' % decoded)
    (bit, weight), = decoded.items()
    assert weight == 1
    log.debug('message %d decoded as %d with probability %s', message, bit, weight)
    return bit
