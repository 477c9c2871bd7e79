from __future__ import absolute_import

import io
from fractions import Fraction

import charset_normalizer
import numpy as np
import six

RNG_ALGORITHM = 'Philox-4x64'


def make_rng(seed, jump=0):
    """Counter-based generator; ``jump`` selects an independent stream."""
    bit_generator = np.random.Philox(seed)
    if jump:
        bit_generator = bit_generator.jumped(jump)
    return np.random.Generator(bit_generator)


def is_exact(value):
    return isinstance(value, six.integer_types + (Fraction,))


def fraction_str(value):
    value = Fraction(value)
    if value.denominator == 1:
        return '%d' % value.numerator
    return '%d/%d' % (value.numerator, value.denominator)


def float_str(value):
    return '%.7g' % float(value)


def format_value(value):
    """Exact values print as "p/q", floats with 7 significant digits."""
    if is_exact(value):
        return fraction_str(value)
    return float_str(value)


def json_value(value):
    if is_exact(value):
        return fraction_str(value)
    return float(value)


def open(
    file, mode='r', buffering=-1, encoding=None, errors=None, newline=None, closefd=True
):
    if encoding is None and 'b' not in mode and 'r' in mode:
        charset_match = charset_normalizer.from_path(file).best()
        encoding = charset_match and charset_match.encoding

    decoded = io.open(
        file,
        mode=mode,
        buffering=buffering,
        encoding=encoding,
        errors=errors,
        newline=newline,
        closefd=closefd,
    )

    return decoded


def read_text(file):
    with open(file) as handle:
        return handle.read()


def write_text(file, text):
    # line endings are written as given
    with io.open(file, 'w', encoding='utf-8', newline='') as handle:
        handle.write(text)
