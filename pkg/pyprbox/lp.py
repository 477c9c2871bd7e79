"""Exact linear programming over the (3,2,2) no-signaling polytope.

Programs are ``min c.x`` subject to ``A x = b`` and ``x >= 0``, with every
coefficient a Fraction. The solver is a dense two-phase simplex using
Bland's rule. An optimum is only returned after the primal point and the
dual vector have been checked against the original system by substitution;
infeasibility and unboundedness come with certificates checked the same way.
"""
import json
import logging
from collections import OrderedDict, namedtuple
from fractions import Fraction

from . import lexer
from .behavior import EXACT, Behavior, check_no_signaling, no_signaling_equalities
from .bell import bell_score
from .exceptions import CertificateError, Infeasible, LPError, Unbounded
from .nodes import OUTCOMES, SETTINGS, Node, OutcomeTriple, SettingTriple
from .runtime import fraction_str
from .transform import ChainCheck, ChainReport, differ, parity

log = logging.getLogger(__name__)

Row = namedtuple('Row', 'name coefficients rhs')

VARIABLES = tuple(
    '%s|%s' % (SettingTriple.from_index(v // 8).symbol, OutcomeTriple.from_index(v % 8).symbol)
    for v in range(64)
)

FIXED_OUTPUT_OBJECTIVE = (
    ((0, 0, 1), differ('A', 'B')),
    ((0, 1, 1), differ('A', 'B')),
    ((1, 0, 1), parity(0)),
    ((1, 1, 1), parity(1)),
)


def variable(settings, outcome):
    """Column of P(outcome|settings): 8 * settings index + outcome index."""
    return 8 * SettingTriple(*settings).index + OutcomeTriple(*outcome).index


class LinearProgram(Node):
    def __init__(self, variables, objective, equalities, name='lp'):
        self.variables = tuple(variables)
        self.objective = [Fraction(c) for c in objective]
        self.equalities = [Row(r.name, dict((j, Fraction(v)) for j, v in r.coefficients.items()), Fraction(r.rhs))
                           for r in equalities]
        self.name = name
        n = len(self.variables)
        if len(self.objective) != n:
            raise LPError('%d objective coefficients for %d variables' % (len(self.objective), n))
        for row in self.equalities:
            bad = [j for j in row.coefficients if not 0 <= j < n]
            if bad:
                raise LPError('row "%s" refers to column %d of %d' % (row.name, bad[0], n))

    def matrix(self):
        n = len(self.variables)
        dense = []
        for row in self.equalities:
            line = [Fraction(0)] * n
            for j, v in row.coefficients.items():
                line[j] = v
            dense.append(line)
        return dense

    def rhs(self):
        return [row.rhs for row in self.equalities]

    def data(self):
        return OrderedDict([
            ('name', self.name),
            ('sense', 'min'),
            ('variables', list(self.variables)),
            ('objective', [fraction_str(c) for c in self.objective]),
            ('equalities', [
                OrderedDict([
                    ('name', row.name),
                    ('coefficients', OrderedDict(
                        (self.variables[j], fraction_str(v)) for j, v in sorted(row.coefficients.items()) if v)),
                    ('rhs', fraction_str(row.rhs)),
                ])
                for row in self.equalities
            ]),
        ])

    def to_json(self):
        return json.dumps(self.data(), indent=1) + '\n'


class LPSolution(Node):
    def __init__(self, program, value, x, y):
        self.program = program
        self.value = value
        self.x = list(x)
        self.y = list(y)

    def behavior(self):
        if len(self.x) != 64:
            raise LPError('solution of "%s" is not a behavior' % self.program.name)
        return Behavior(EXACT, [self.x[8 * s:8 * s + 8] for s in range(8)], {'source': 'lp:%s' % self.program.name})

    def data(self):
        return OrderedDict([
            ('program', self.program.name),
            ('status', 'optimal'),
            ('value', fraction_str(self.value)),
            ('primal', OrderedDict((name, fraction_str(v)) for name, v in zip(self.program.variables, self.x) if v)),
            ('dual', OrderedDict((row.name, fraction_str(v)) for row, v in zip(self.program.equalities, self.y) if v)),
        ])

    def to_json(self):
        return json.dumps(self.data(), indent=1) + '\n'


def _dot(u, v):
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def _column(matrix, j):
    return [row[j] for row in matrix]


class Simplex(object):
    """Two-phase tableau simplex; artificial columns are kept so the final
    tableau carries the basis inverse for reading off duals."""

    def __init__(self, program):
        self.program = program
        self.A = program.matrix()
        self.b = program.rhs()
        self.c = program.objective
        self.m = len(self.A)
        self.n = len(self.c)
        self.flipped = [value < 0 for value in self.b]
        self.tableau = []
        for i in range(self.m):
            sign = -1 if self.flipped[i] else 1
            unit = [Fraction(0)] * self.m
            unit[i] = Fraction(1)
            self.tableau.append([sign * v for v in self.A[i]] + unit + [sign * self.b[i]])
        self.basis = [self.n + i for i in range(self.m)]
        self.z = None
        self.pivots = 0

    def price(self, cost):
        """Reduced-cost row for ``cost``; its last entry is minus the objective value."""
        z = list(cost) + [Fraction(0)]
        for i, row in enumerate(self.tableau):
            weight = cost[self.basis[i]]
            if weight:
                z = [a - weight * b for a, b in zip(z, row)]
        self.z = z

    def pivot(self, r, c):
        row = self.tableau[r]
        p = row[c]
        row = [v / p for v in row]
        self.tableau[r] = row
        nonzero = [j for j, v in enumerate(row) if v]
        for i, other in enumerate(self.tableau):
            if i != r and other[c]:
                f = other[c]
                for j in nonzero:
                    other[j] -= f * row[j]
        if self.z[c]:
            f = self.z[c]
            for j in nonzero:
                self.z[j] -= f * row[j]
        self.basis[r] = c
        self.pivots += 1

    def run(self):
        """Iterate until optimal (returns None) or unbounded (returns the entering column)."""
        while True:
            basic = set(self.basis)
            entering = None
            for j in range(self.n):
                if j not in basic and self.z[j] < 0:
                    entering = j
                    break
            if entering is None:
                return None
            leaving = None
            best = None
            for i, row in enumerate(self.tableau):
                if row[entering] > 0:
                    ratio = row[-1] / row[entering]
                    if best is None or ratio < best or (ratio == best and self.basis[i] < self.basis[leaving]):
                        best, leaving = ratio, i
            if leaving is None:
                return entering
            self.pivot(leaving, entering)

    def duals(self, art_cost):
        y = [art_cost - self.z[self.n + k] for k in range(self.m)]
        return [-v if flipped else v for v, flipped in zip(y, self.flipped)]

    def evict_artificials(self):
        for i in range(self.m):
            if self.basis[i] < self.n:
                continue
            for j in range(self.n):
                if self.tableau[i][j] != 0:
                    self.pivot(i, j)
                    break
            else:
                log.debug('row "%s" is redundant', self.program.equalities[i].name)

    def solve(self):
        n, m = self.n, self.m
        self.price([Fraction(0)] * n + [Fraction(1)] * m)
        self.run()
        infeasibility = -self.z[-1]
        if infeasibility > 0:
            farkas = self.duals(Fraction(1))
            verify_farkas(self.A, self.b, farkas)
            raise Infeasible('program "%s" is infeasible' % self.program.name, farkas)
        self.evict_artificials()
        self.price(list(self.c) + [Fraction(0)] * m)
        entering = self.run()
        if entering is not None:
            ray = [Fraction(0)] * n
            ray[entering] = Fraction(1)
            for i, row in enumerate(self.tableau):
                if self.basis[i] < n:
                    ray[self.basis[i]] = -row[entering]
            verify_ray(self.A, self.c, ray)
            raise Unbounded('program "%s" is unbounded' % self.program.name, ray)
        x = [Fraction(0)] * n
        for i, row in enumerate(self.tableau):
            if self.basis[i] < n:
                x[self.basis[i]] = row[-1]
        y = self.duals(Fraction(0))
        value = _dot(self.c, x)
        verify_optimum(self.A, self.b, self.c, x, y)
        log.debug('program "%s" solved after %d pivots, value %s', self.program.name, self.pivots, value)
        return LPSolution(self.program, value, x, y)


def verify_optimum(A, b, c, x, y):
    for i, row in enumerate(A):
        if _dot(row, x) != b[i]:
            raise CertificateError('primal point violates equality %d' % i)
    if any(v < 0 for v in x):
        raise CertificateError('primal point has a negative entry')
    for j in range(len(c)):
        reduced = c[j] - _dot(_column(A, j), y)
        if reduced < 0:
            raise CertificateError('dual vector violates the constraint of column %d' % j)
        if x[j] > 0 and reduced != 0:
            raise CertificateError('complementary slackness fails at column %d' % j)
    if _dot(b, y) != _dot(c, x):
        raise CertificateError('duality gap %s' % (_dot(c, x) - _dot(b, y)))


def verify_farkas(A, b, y):
    for j in range(len(A[0]) if A else 0):
        if _dot(_column(A, j), y) > 0:
            raise CertificateError('Farkas vector fails at column %d' % j)
    if _dot(b, y) <= 0:
        raise CertificateError('Farkas vector does not separate the right-hand side')


def verify_ray(A, c, d):
    if any(v < 0 for v in d):
        raise CertificateError('ray has a negative entry')
    for i, row in enumerate(A):
        if _dot(row, d) != 0:
            raise CertificateError('ray leaves equality %d' % i)
    if _dot(c, d) >= 0:
        raise CertificateError('ray does not decrease the objective')


def solve(program):
    return Simplex(program).solve()


def ns_rows():
    """Normalization of every settings row plus the full no-signaling set."""
    rows = []
    for s in SETTINGS:
        rows.append(Row('sum P(.|%s) = 1' % (s,), dict((variable(s, o), 1) for o in OUTCOMES), 1))
    for eq in no_signaling_equalities():
        coefficients = {}
        for s, o in eq.lhs:
            coefficients[8 * s + o] = coefficients.get(8 * s + o, 0) + 1
        for s, o in eq.rhs:
            coefficients[8 * s + o] = coefficients.get(8 * s + o, 0) - 1
        rows.append(Row(eq.name, coefficients, 0))
    return rows


def behavior_program(objective, extra=(), name='lp'):
    """Program over the 64 cells P(outcome|settings)."""
    return LinearProgram(VARIABLES, objective, ns_rows() + list(extra), name)


def fixed_output_objective():
    objective = [Fraction(0)] * 64
    for settings, predicate in FIXED_OUTPUT_OBJECTIVE:
        for o in OUTCOMES:
            if predicate(o):
                objective[variable(settings, o)] += 1
    return objective


def _fixed_bit(fixed):
    if fixed in (None, 'none'):
        return None
    if fixed in (0, 1):
        return int(fixed)
    return lexer.outcome_bit(fixed)


def fixed_output_rows(bit):
    rows = []
    for s in SETTINGS:
        if s.x == 0:
            cells = dict((variable(s, o), 1) for o in OUTCOMES if o.A == bit)
            rows.append(Row('P(A=%s|%s) = 1' % ('+' if bit else '0', s), cells, 1))
    return rows


def fixed_output_program(fixed='+'):
    bit = _fixed_bit(fixed)
    extra = fixed_output_rows(bit) if bit is not None else []
    label = 'fixed-output-%s' % ('none' if bit is None else ('+' if bit else '0'))
    return behavior_program(fixed_output_objective(), extra, label)


def fixed_output_bound(fixed='+'):
    """Minimum over NS of the four-term sum with Alice's setting-a outcome
    fixed to ``fixed`` ('+', '0', or None for no constraint)."""
    return solve(fixed_output_program(fixed))


def min_bell_program():
    objective = [Fraction(0)] * 64
    for s in SETTINGS:
        for o in OUTCOMES:
            objective[variable(s, o)] = Fraction(bell_score(o, s), 8)
    return behavior_program(objective, name='min-bell')


def min_bell():
    return solve(min_bell_program())


def ns_membership(behavior):
    return check_no_signaling(behavior)


# chains of cells; between consecutive lines the relation is '=' or '<='
CHAIN_PLUS = (
    ('=', ["ab'c'|+++"]),
    ('=', ["ab'c'|+++", "ab'c'|0++"]),
    ('=', ["a'b'c'|+++", "a'b'c'|0++"]),
    ('<=', ["a'b'c'|+++", "a'b'c'|0++", "a'b'c'|00+"]),
    ('=', ["a'b'c'|+++", "a'bc'|0++", "a'bc'|00+"]),
    ('<=', ["a'b'c'|+++", "a'bc'|0++", "a'bc'|00+", "a'bc'|+0+"]),
    ('=', ["a'b'c'|+++", "a'bc'|0++", "abc'|00+", "abc'|+0+"]),
    ('=', ["a'b'c'|+++", "a'bc'|0++", "abc'|+0+"]),
)

CHAIN_ZERO = (
    ('=', ["ab'c'|++0"]),
    ('=', ["ab'c'|++0", "ab'c'|0+0"]),
    ('=', ["a'b'c'|++0", "a'b'c'|0+0"]),
    ('<=', ["a'b'c'|++0", "a'b'c'|+00", "a'b'c'|0+0"]),
    ('=', ["a'bc'|++0", "a'bc'|+00", "a'b'c'|0+0"]),
    ('<=', ["a'bc'|++0", "a'bc'|+00", "a'bc'|000", "a'b'c'|0+0"]),
    ('=', ["a'bc'|++0", "abc'|+00", "abc'|000", "a'b'c'|0+0"]),
    ('=', ["a'bc'|++0", "abc'|+00", "a'b'c'|0+0"]),
)


def swap_outcomes(behavior, parties='AB'):
    """Exchange '0' and '+' for ``parties``."""
    def flipped(o):
        return OutcomeTriple(*(1 - o.of(p) if p in parties else o.of(p) for p in 'ABC'))

    rows = [[behavior.rows[s.index][flipped(OutcomeTriple.from_index(j)).index] for j in range(8)] for s in SETTINGS]
    return Behavior(behavior.mode, rows, dict(behavior.meta, swapped=parties))


def _cells_value(behavior, keys):
    total = Fraction(0) if behavior.mode == EXACT else 0.0
    for key in keys:
        s, o = lexer.cell(key)
        total += behavior.prob(s, o)
    return total


def _holds(relation, lhs, rhs, tolerance):
    if relation == '=':
        return abs(lhs - rhs) <= tolerance
    return lhs <= rhs + tolerance


def fixed_output_chain(behavior, fixed='+'):
    """Check, cell by cell, why the four-term sum is at least one on a
    nonsignaling behavior whose Alice output is fixed at setting a."""
    bit = _fixed_bit(fixed)
    if bit is None:
        raise ValueError('fixed_output_chain needs a fixed outcome, "+" or "0"')
    if bit == 0:
        behavior = swap_outcomes(behavior, 'AB')
    tolerance = behavior.tolerance
    checks = []
    for s in SETTINGS:
        if s.x == 0:
            p = behavior.conditional(lambda o: o.A == 1, s)
            checks.append(ChainCheck('Alice fixed at %s' % (s,), abs(p - 1) <= tolerance, 'P(A=+|%s) = %s' % (s, p)))
    ns = check_no_signaling(behavior)
    checks.append(ChainCheck('nonsignaling', ns.ok, str(ns).splitlines()[0]))

    ends = []
    for label, chain in (('first chain', CHAIN_PLUS), ('second chain', CHAIN_ZERO)):
        values = [_cells_value(behavior, cells) for _, cells in chain]
        for k in range(1, len(chain)):
            relation = chain[k][0]
            holds = _holds(relation, values[k - 1], values[k], tolerance)
            checks.append(ChainCheck(
                '%s step %d' % (label, k), holds,
                '%s %s %s' % (' + '.join(chain[k - 1][1]), relation, ' + '.join(chain[k][1]))))
        ends.append(values[-1])

    total = sum(fixed_output_terms_value(behavior))
    leftover = _cells_value(behavior, ["ab'c'|+0+", "ab'c'|+00"])
    one = behavior.conditional(lambda o: o.A == 1, (0, 1, 1))
    checks.append(ChainCheck('P(A=+|ab\'c\') is covered', one <= ends[0] + ends[1] + leftover + tolerance,
                             '%s <= %s' % (one, ends[0] + ends[1] + leftover)))
    checks.append(ChainCheck('cover is inside the four-term sum', ends[0] + ends[1] + leftover <= total + tolerance,
                             '%s <= %s' % (ends[0] + ends[1] + leftover, total)))
    checks.append(ChainCheck('four-term sum >= 1', total >= 1 - tolerance, '%s >= 1' % total))
    report = ChainReport(None, checks, total, None)
    if not report.ok:
        log.error('fixed-output chain fails:\n%s', '\n'.join(str(c) for c in report.failures()))
    return report


def fixed_output_terms_value(behavior):
    return [behavior.conditional(predicate, settings) for settings, predicate in FIXED_OUTPUT_OBJECTIVE]
