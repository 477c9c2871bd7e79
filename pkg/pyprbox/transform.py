"""Strategy surgery on Alice's setting-a behavior.

``derandomize`` makes Alice pretend her boxes with Bob returned a fixed
string a_b*, chosen to maximize her agreement with Charlie on abc.
``fix_output`` then replaces her setting-a output by the constant k* that
minimizes her disagreement with Bob when Charlie uses c'. ``verify_chain``
checks every inequality linking E(F) of the original strategy to the
fixed-output sum.
"""
import json
import logging
from collections import OrderedDict, namedtuple
from fractions import Fraction

from .behavior import Behavior, check_no_signaling, induced_behavior
from .bell import BOUND, expected_F
from .compiler import Visitor
from .exceptions import NetworkRequired, PreconditionError
from .joint import JointBuilder
from .nodes import DecisionNode, Node, bit_of, bit_string, join_word, outcome_symbol, split_word
from .runtime import fraction_str
from .strategy import ensure_valid

log = logging.getLogger(__name__)

ABC = (0, 0, 0)
AB_C = (0, 1, 0)


def differ(p, q):
    return lambda o: o.of(p) != o.of(q)


def agree(p, q):
    return lambda o: o.of(p) == o.of(q)


def parity(value):
    return lambda o: (o.A ^ o.B ^ o.C) == value


def fixed_output_terms(behavior):
    """The four probabilities whose sum is at least one once Alice's
    setting-a output is fixed."""
    return OrderedDict([
        ("P(A!=B|abc')", behavior.conditional(differ('A', 'B'), (0, 0, 1))),
        ("P(A!=B|ab'c')", behavior.conditional(differ('A', 'B'), (0, 1, 1))),
        ("P(A^B^C=0|a'bc')", behavior.conditional(parity(0), (1, 0, 1))),
        ("P(A^B^C=1|a'b'c')", behavior.conditional(parity(1), (1, 1, 1))),
    ])


class SurgeryReport(Node):
    def __init__(self, a_b_star=None, k_star=None, values=None, discrepancies=None):
        self.a_b_star = a_b_star
        self.k_star = k_star
        self.values = OrderedDict(values or ())
        self.discrepancies = list(discrepancies or [])

    def merge(self, other):
        return SurgeryReport(
            self.a_b_star if other.a_b_star is None else other.a_b_star,
            self.k_star if other.k_star is None else other.k_star,
            list(self.values.items()) + list(other.values.items()),
            self.discrepancies + other.discrepancies,
        )

    def data(self):
        return OrderedDict([
            ('a_b_star', self.a_b_star),
            ('k_star', self.k_star),
            ('values', OrderedDict((k, fraction_str(v)) for k, v in self.values.items())),
            ('discrepancies', self.discrepancies),
        ])

    def to_json(self):
        return json.dumps(self.data(), indent=1) + '\n'


class AgreementTable(object):
    """Inner sums over Charlie's strings of [A(a_b, A_c, a) == C(c_a, c_b, z)]."""

    def __init__(self, network, settings):
        self.network = network
        self.counts = network.counts
        self.builder = JointBuilder(network, settings, ('C', 'A', 'B'))
        self.settings = settings

    def inner(self, a_b):
        n_ab, n_ac, n_bc = self.counts
        alice, charlie = self.network['A'], self.network['C']
        weight = Fraction(1, 1 << (n_ac + n_bc))
        total = Fraction(0)
        for c_a in range(1 << n_ac):
            for c_b in range(1 << n_bc):
                free = {('C', 'A'): c_a, ('C', 'B'): c_b, ('A', 'B'): a_b}
                outputs, _ = self.builder.complete(free, parties=('C', 'A'))
                bits = outputs.get(('A', 'C'), {})
                a_c = join_word([bits[i] for i in range(n_ac)], [1] * n_ac)
                a = alice.output(join_word((a_b, a_c), (n_ab, n_ac)), self.settings[0])
                c = charlie.output(join_word((c_a, c_b), (n_ac, n_bc)), self.settings[2])
                if a == c:
                    total += weight
        return total

    def sums(self):
        return [self.inner(a_b) for a_b in range(1 << self.counts.n_ab)]


def maximizers(sums):
    best = max(sums)
    return [a_b for a_b, value in enumerate(sums) if value == best]


class Derandomizer(Visitor):
    """Rewrites a tree so every A_b node continues as if its output were
    the matching bit of a_b*."""

    def __init__(self, a_b_star, n_ab):
        self.a_b_star = a_b_star
        self.n_ab = n_ab

    def visitDecisionNode(self, node):
        if node.box.counterpart == 'B':
            kept = self.visit(node.child(bit_of(self.a_b_star, node.box.index, self.n_ab)))
            return DecisionNode(node.box, node.input, kept, kept)
        return DecisionNode(node.box, node.input, self.visit(node.on0), self.visit(node.on1))


def derandomize(network):
    ensure_valid(network)
    counts = network.counts
    n_ab, n_ac = counts.n_ab, counts.n_ac
    sums = AgreementTable(network, ABC).sums()
    a_b_star = maximizers(sums)[0]
    discrepancies = []
    other = AgreementTable(network, AB_C).sums()
    if a_b_star not in maximizers(other):
        discrepancies.append(
            "a_b*=%s maximizes agreement under abc but not under ab'c" % bit_string(a_b_star, n_ab))
        log.warning(discrepancies[-1])

    alice = network['A']
    tree = Derandomizer(a_b_star, n_ab).visit(alice.trees[0])
    table = dict(alice.output_table)
    for word in range(1 << (n_ab + n_ac)):
        _, a_c = split_word(word, (n_ab, n_ac))
        table[(word, 0)] = alice.output_table[(join_word((a_b_star, a_c), (n_ab, n_ac)), 0)]
    derandomized = network.replace('A', alice.replace(trees=(tree, alice.trees[1]), output_table=table))

    before = induced_behavior(network)
    after = induced_behavior(derandomized)
    values = [
        ('max inner sum', sums[a_b_star]),
        ('P_S(A=C|abc)', before.conditional(agree('A', 'C'), ABC)),
        ("P_S(A=C|ab'c)", before.conditional(agree('A', 'C'), AB_C)),
        ("P_S'(A=C|abc)", after.conditional(agree('A', 'C'), ABC)),
        ("P_S'(A=C|ab'c)", after.conditional(agree('A', 'C'), AB_C)),
    ]
    log.debug('a_b* = %s', bit_string(a_b_star, n_ab))
    return derandomized, SurgeryReport(bit_string(a_b_star, n_ab), None, values, discrepancies)


def setting_a_dependence(strategy):
    """First (a_c, a_b, a_b') where Alice's setting-a output changes with a_b."""
    n_ab, n_ac = strategy.widths
    for a_c in range(1 << n_ac):
        reference = strategy.output_table[(join_word((0, a_c), (n_ab, n_ac)), 0)]
        for a_b in range(1, 1 << n_ab):
            if strategy.output_table[(join_word((a_b, a_c), (n_ab, n_ac)), 0)] != reference:
                return a_c, 0, a_b
    return None


def fix_output(network):
    ensure_valid(network)
    alice = network['A']
    n_ab, n_ac = alice.widths
    dependence = setting_a_dependence(alice)
    if dependence is not None:
        a_c, first, second = dependence
        raise PreconditionError(
            "Alice's setting-a output still depends on A_b: with a_c=%s, a_b=%s and a_b=%s give different outcomes"
            % (bit_string(a_c, n_ac), bit_string(first, n_ab), bit_string(second, n_ab)))
    before = induced_behavior(network)
    cost = {}
    for k in (1, 0):
        cost[k] = sum(before.conditional(lambda o, k=k: o.B != k, (0, y, 1)) for y in (0, 1))
    k_star = 1 if cost[1] <= cost[0] else 0
    table = dict(alice.output_table)
    for word in range(1 << (n_ab + n_ac)):
        table[(word, 0)] = k_star
    fixed = network.replace('A', alice.replace(output_table=table))
    after = induced_behavior(fixed)
    values = [
        ("sum_y P_S'(B=0|ayc')", cost[1]),
        ("sum_y P_S'(B=+|ayc')", cost[0]),
        ("sum_y P_S'(A!=B|ayc')", sum(before.conditional(differ('A', 'B'), (0, y, 1)) for y in (0, 1))),
        ("sum_y P_S''(A!=B|ayc')", sum(after.conditional(differ('A', 'B'), (0, y, 1)) for y in (0, 1))),
    ]
    return fixed, SurgeryReport(None, outcome_symbol(k_star), values)


class ChainCheck(namedtuple('ChainCheck', 'name holds detail')):
    __slots__ = ()

    def __str__(self):
        return '%s %s: %s' % ('PASS' if self.holds else 'FAIL', self.name, self.detail)


class ChainReport(Node):
    def __init__(self, surgery, checks, value, bounds):
        self.surgery = surgery
        self.checks = list(checks)
        self.value = value
        self.bounds = bounds

    @property
    def ok(self):
        return all(c.holds for c in self.checks)

    def __bool__(self):
        return self.ok

    __nonzero__ = __bool__

    def failures(self):
        return [c for c in self.checks if not c.holds]

    def __str__(self):
        return '\n'.join(str(c) for c in self.checks)


def _product_form(behavior, settings):
    joint = behavior.marginal(settings, 'AB')
    a = behavior.marginal(settings, 'A')
    b = behavior.marginal(settings, 'B')
    return all(joint[(i, j)] == a[(i,)] * b[(j,)] for i in (0, 1) for j in (0, 1))


def _rows_equal(first, second, indices):
    return all(first.rows[i] == second.rows[i] for i in indices)


def verify_chain(network):
    if isinstance(network, Behavior):
        raise NetworkRequired('network required: a behavior alone has no strategy to transform')
    ensure_valid(network)
    s1, report1 = derandomize(network)
    s2, report2 = fix_output(s1)
    surgery = report1.merge(report2)
    p0, p1, p2 = induced_behavior(network), induced_behavior(s1), induced_behavior(s2)

    checks = []

    def check(name, holds, detail):
        checks.append(ChainCheck(name, bool(holds), detail))

    for label, settings in (('abc', ABC), ("ab'c", AB_C)):
        old = p0.conditional(agree('A', 'C'), settings)
        new = p1.conditional(agree('A', 'C'), settings)
        check('agreement with Charlie does not drop (%s)' % label, new >= old, '%s >= %s' % (new, old))
    best = surgery.values['max inner sum']
    attained = p1.conditional(agree('A', 'C'), ABC)
    check('derandomized strategy attains the maximal inner sum', attained == best, '%s == %s' % (attained, best))

    for label, y in (('b', 0), ("b'", 1)):
        lhs = p1.conditional(differ('A', 'B'), (0, y, 1))
        rhs = 2 * p0.conditional(differ('A', 'C'), (0, y, 0)) + p0.conditional(differ('A', 'B'), (0, y, 1))
        check("disagreement with Bob stays bounded (%s)" % label, lhs <= rhs, '%s <= %s' % (lhs, rhs))
        check("Alice and Bob independent under a%sc'" % label, _product_form(p1, (0, y, 1)), "P_S'(A,B|a%sc') factors" % label)

    check("only Alice's setting a changes", _rows_equal(p0, p1, range(4, 8)) and _rows_equal(p1, p2, range(4, 8)),
          "rows a'.. identical across S, S', S''")
    bc = [[b.marginal(s, 'BC') for s in ((x, y, z) for x in (0, 1) for y in (0, 1) for z in (0, 1))] for b in (p0, p1, p2)]
    check('Bob-Charlie marginal unchanged', bc[0] == bc[1] == bc[2], "P(B,C|xyz) identical across S, S', S''")
    for label, behavior in (("S'", p1), ("S''", p2)):
        audit = check_no_signaling(behavior)
        check('%s is nonsignaling' % label, audit.ok, str(audit).splitlines()[0])

    value = expected_F(p0)
    t1 = sum(fixed_output_terms(p1).values())
    t2 = sum(fixed_output_terms(p2).values())
    check("E_S(F) >= (1/8) S' terms", value >= t1 / 8, '%s >= %s' % (value, t1 / 8))
    check("S' terms >= S'' terms", t1 >= t2, '%s >= %s' % (t1, t2))
    check("S'' terms >= 1", t2 >= 1, '%s >= 1' % t2)
    check('E_S(F) >= 1/8', value >= BOUND, '%s >= 1/8' % value)

    for key, term in fixed_output_terms(p1).items():
        surgery.values["S' " + key] = term
    for key, term in fixed_output_terms(p2).items():
        surgery.values["S'' " + key] = term
    surgery.values['E_S(F)'] = value
    report = ChainReport(surgery, checks, value, (t1 / 8, t2 / 8))
    if not report.ok:
        log.error('inequality chain fails:\n%s', '\n'.join(str(c) for c in report.failures()))
    return report
