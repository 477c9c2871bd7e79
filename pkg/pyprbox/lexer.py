import re
from fractions import Fraction

import six

from .nodes import ORDERINGS, BoxRef, OutcomeTriple, SettingTriple

RE_BOX = re.compile(r'^([ABC]):(\d+)$')
RE_SETTING = re.compile(r"^a('?)b('?)c('?)$")
RE_OUTCOME = re.compile(r'^([+0])([+0])([+0])$')
RE_CELL = re.compile(r"^(a'?b'?c'?)\|([+0]{3})$")
RE_FRACTION = re.compile(r'^\s*(-?\d+)\s*(?:/\s*(\d+))?\s*$')
RE_BITS = re.compile(r'^[01]*$')
RE_COUNTS = re.compile(r'^\s*(\d+)\s*,\s*(\d+)\s*,\s*(\d+)\s*$')


def _text(value):
    if isinstance(value, six.binary_type):
        value = six.text_type(value, 'utf8')
    if not isinstance(value, six.string_types):
        raise ValueError('expected a string but got %r' % (value,))
    return value


def _match(regex, value, what):
    m = regex.match(_text(value))
    if not m:
        raise ValueError('invalid %s "%s"' % (what, value))
    return m


def box(label):
    counterpart, index = _match(RE_BOX, label, 'box label').groups()
    return BoxRef(counterpart, int(index))


def setting(label):
    return SettingTriple(*(1 if g else 0 for g in _match(RE_SETTING, label, 'setting triple').groups()))


def outcome(label):
    return OutcomeTriple(*(1 if g == '+' else 0 for g in _match(RE_OUTCOME, label, 'outcome triple').groups()))


def cell(key):
    settings, outcomes = _match(RE_CELL, key, 'behavior cell').groups()
    return setting(settings), outcome(outcomes)


def outcome_bit(symbol):
    symbol = _text(symbol)
    if symbol not in ('+', '0'):
        raise ValueError('invalid outcome symbol "%s"' % symbol)
    return 1 if symbol == '+' else 0


def fraction(text):
    numerator, denominator = _match(RE_FRACTION, text, 'fraction').groups()
    if denominator is not None and int(denominator) == 0:
        raise ValueError('fraction "%s" has a zero denominator' % text)
    return Fraction(int(numerator), int(denominator or 1))


def bits(text, width=None):
    text = _match(RE_BITS, text, 'bit string').group(0)
    if width is not None and len(text) != width:
        raise ValueError('bit string "%s" should have %d bits' % (text, width))
    return int(text, 2) if text else 0


def ordering(text):
    text = _text(text).upper()
    if text not in ORDERINGS:
        raise ValueError('ordering must be one of %s, got "%s"' % (', '.join(ORDERINGS), text))
    return tuple(text)


def counts(text):
    return tuple(int(g) for g in _match(RE_COUNTS, text, 'counts').groups())
