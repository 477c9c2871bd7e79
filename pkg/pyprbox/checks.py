"""Named verification checks run by ``pyprbox verify``.

Checks are registered with :func:`register_check` and receive the running
:class:`Verifier`; each returns ``(passed, detail)``.
"""
from __future__ import absolute_import

import logging
from collections import OrderedDict, namedtuple

from . import joint as joint_laws
from .behavior import Behavior, check_no_signaling, induced_behavior
from .bell import check_inequality
from .exceptions import NetworkRequired
from .lp import fixed_output_bound, fixed_output_chain
from .nodes import SETTINGS
from .runtime import format_value
from .transform import derandomize, fix_output, verify_chain

log = logging.getLogger(__name__)


class CheckResult(namedtuple('CheckResult', 'name passed detail')):
    __slots__ = ()

    def __str__(self):
        return '%s %s: %s' % ('PASS' if self.passed else 'FAIL', self.name, self.detail)


class VerificationReport(object):
    def __init__(self, results):
        self.results = list(results)

    @property
    def ok(self):
        return all(r.passed for r in self.results)

    def failures(self):
        return [r for r in self.results if not r.passed]

    def __str__(self):
        return '\n'.join(str(r) for r in self.results)


class Verifier(object):
    checks = OrderedDict()
    network_only = set()
    laws = {}

    def __init__(self, subject, **options):
        self.subject = subject
        self.options = options
        self.ordering = options.get('ordering', ('C', 'A', 'B'))
        self._joints = None
        self._behavior = None

    @classmethod
    def register_check(cls, name, f, network_only=True, law=None):
        cls.checks[name] = f
        if law:
            cls.laws[name] = law
        else:
            cls.laws.pop(name, None)
        if network_only:
            cls.network_only.add(name)
        else:
            cls.network_only.discard(name)

    @property
    def is_network(self):
        return not isinstance(self.subject, Behavior)

    @property
    def network(self):
        if not self.is_network:
            raise NetworkRequired('network required: this check needs the strategy, not only its behavior')
        return self.subject

    @property
    def joints(self):
        if self._joints is None:
            self._joints = [joint_laws.build_joint(self.network, s, self.ordering) for s in SETTINGS]
        return self._joints

    @property
    def behavior(self):
        if self._behavior is None:
            self._behavior = self.subject if not self.is_network else induced_behavior(self.subject, self.ordering)
        return self._behavior

    def selected(self):
        only = self.options.get('only')
        skip = set(self.options.get('skip', ()))
        for name in self.checks:
            if only is not None and name not in only:
                continue
            if name in skip:
                continue
            if name in self.network_only and not self.is_network:
                log.info('skipping %s: needs a network', name)
                continue
            yield name

    def verify(self):
        results = []
        for name in self.selected():
            passed, detail = self.checks[name](self)
            if not passed and name in self.laws:
                detail = '%s violated: %s' % (self.laws[name], detail)
            results.append(CheckResult(name, bool(passed), detail))
            log.debug('%s', results[-1])
        return VerificationReport(results)


def register_check(name=None, network_only=True, law=None):
    """Add a check to :class:`Verifier`; ``law`` is the identity it tests, shown on failure."""

    def decorator(f):
        Verifier.register_check(name or f.__name__, f, network_only, law)
        return f

    return decorator


def _law_check(verifier, law):
    failures = []
    for joint in verifier.joints:
        failures += law(joint)
    if failures:
        return False, failures[0] + ('' if len(failures) == 1 else ' (and %d more)' % (len(failures) - 1))
    return True, 'holds at all 8 settings'


def verify_joint(joint):
    """Runs the joint-law checks on a single joint distribution."""
    results = []
    for name, law in JOINT_LAWS:
        failures = law(joint)
        detail = 'holds'
        if failures:
            detail = '%s violated: %s' % (Verifier.laws[name], failures[0])
        results.append(CheckResult(name, not failures, detail))
    return VerificationReport(results)


JOINT_LAWS = (
    ('party uniformity', joint_laws.check_party_uniformity),
    ('three-string uniformity', joint_laws.check_three_strings),
    ("Bob's strings determined", joint_laws.check_bob_determined),
    ('support weights', joint_laws.check_support_weights),
)


@register_check('party uniformity', law='P(p_q, p_r) = 2^-(n_pq + n_pr)')
def party_uniformity(verifier):
    return _law_check(verifier, joint_laws.check_party_uniformity)


@register_check('three-string uniformity', law='P(a_b, c_a, c_b) = P(a_b) P(c_a, c_b) = 2^-(n_AB + n_AC + n_BC)')
def three_string_uniformity(verifier):
    return _law_check(verifier, joint_laws.check_three_strings)


@register_check("Bob's strings determined", law='(b_a, b_c, a_c) = f(a_b, c_a, c_b)')
def bob_determined(verifier):
    return _law_check(verifier, joint_laws.check_bob_determined)


@register_check('support weights', law='P(support point) = 2^-(n_AB + n_AC + n_BC)')
def support_weights(verifier):
    return _law_check(verifier, joint_laws.check_support_weights)


@register_check('ordering invariance', law='joint law identical under all 6 orderings')
def ordering_invariance(verifier):
    if not verifier.options.get('check_orderings', True):
        return True, 'skipped'
    for s in SETTINGS:
        report = joint_laws.check_ordering_invariance(verifier.network, s, checked=True)
        if not report:
            ordering, key, expected, got = report.counterexample
            return False, 'ordering %s gives %s to %s at %s, reference gives %s' % (ordering, got, key, s, expected)
    return True, '6/6 orderings identical'


@register_check('no-signaling', network_only=False, law='P(o_p | s) independent of the other settings')
def no_signaling(verifier):
    audit = check_no_signaling(verifier.behavior)
    return audit.ok, str(audit).splitlines()[0] if not audit.ok else str(audit)


@register_check('bell bound', network_only=False, law='E(F) >= 1/8')
def bell_bound(verifier):
    report = check_inequality(verifier.behavior)
    return report.satisfies_bound, 'E(F) = %s, %s' % (format_value(report.value), report.verdict)


@register_check('transform chain')
def transform_chain(verifier):
    report = verify_chain(verifier.network)
    failures = report.failures()
    if failures:
        return False, str(failures[0])
    return True, '%d inequalities hold, E_S(F) = %s' % (len(report.checks), format_value(report.value))


_bounds = {}


def fixed_output_optimum(fixed):
    if fixed not in _bounds:
        _bounds[fixed] = fixed_output_bound(fixed).value
    return _bounds[fixed]


@register_check('fixed-output lp', network_only=False, law='max over NS with A fixed = 1')
def fixed_output_lp(verifier):
    values = dict((k, fixed_output_optimum(k)) for k in ('+', '0'))
    if any(v != 1 for v in values.values()):
        return False, 'optimum %s for "+" and %s for "0", expected 1' % (values['+'], values['0'])
    if verifier.is_network:
        fixed, surgery = fix_output(derandomize(verifier.network)[0])
        report = fixed_output_chain(induced_behavior(fixed, verifier.ordering), surgery.k_star)
        if not report.ok:
            return False, 'on the fixed-output strategy: %s' % report.failures()[0]
    return True, '1 (exact)'
