import errno
import logging
import os
import sys
from optparse import OptionParser

from . import lexer
from .behavior import Behavior, induced_behavior, simulate_rounds
from .bell import LABELS, check_inequality, quantum_behavior
from .boxes import pathological_signaling_demo
from .checks import Verifier
from .compiler import serialize
from .exceptions import BoundViolation, NetworkRequired, PRBoxError, StrategyError
from .joint import build_joint
from .lp import fixed_output_bound, min_bell
from .nodes import ORDERINGS, SETTINGS
from .runtime import format_value
from .search import SearchConfig, minimize_EF
from .strategy import sample_random_network, validate
from .transform import derandomize, fix_output, verify_chain
from .utils import RunManifest, load_document, load_network, looks_like_behavior

log = logging.getLogger('pyprbox')

USAGE = """usage: %prog COMMAND [options] [args]

commands:
  validate FILE          check a strategy file
  behavior [FILE]        behavior induced by a network (or --quantum)
  verify [FILE]          joint laws, orderings, no-signaling, surgery chain, fixed-output LP
  transform FILE         apply both surgeries and check the inequality chain
  search                 look for networks with small E(F)
  lp                     fixed-output bound over nonsignaling behaviors
  sample                 write a random network
  joint FILE [SETTINGS]  joint distribution of all box outputs as CSV
  demo                   signaling through correlated boxes"""

OK, FAILED, USAGE_ERROR = 0, 1, 2


def build_parser():
    parser = OptionParser(USAGE)
    parser.add_option("--seed", dest="seed", type="int", default=0, help="Random seed (default: 0)")
    parser.add_option("--rounds", dest="rounds", type="int", default=10 ** 6, help="Monte Carlo rounds (default: 10^6)")
    parser.add_option(
        "--ordering", dest="ordering", default="CAB", help="Order in which parties read their boxes (default: CAB)"
    )
    parser.add_option("--mode", dest="mode", choices=["exact", "mc"], default="exact", help="exact or mc (default: exact)")
    parser.add_option("-o", "--out", dest="out", help="Write outputs and manifest.json to DIR", metavar="DIR")
    parser.add_option(
        "--format", dest="format", choices=["json", "csv"], default="json", help="Format on standard output (default: json)"
    )
    parser.add_option("--counts", dest="counts", default="1,1,1", help="Boxes per pair n_AB,n_AC,n_BC (default: 1,1,1)")
    parser.add_option("--budget", dest="budget", type="int", default=1000, help="Search evaluations (default: 1000)")
    parser.add_option(
        "--search-mode",
        dest="search_mode",
        choices=["exhaustive", "random", "local"],
        default="exhaustive",
        help="exhaustive, random or local (default: exhaustive)",
    )
    parser.add_option("--quantum", dest="quantum", action="store_true", default=False, help="Use the quantum behavior")
    parser.add_option(
        "--check-orderings", dest="check_orderings", action="store_true", default=False,
        help="Compare the joint distribution under all six orderings",
    )
    parser.add_option("--lp-only", dest="lp_only", action="store_true", default=False, help="Only solve the fixed-output LP")
    parser.add_option("--fixed", dest="fixed", choices=["+", "0", "none"], default="+", help="Alice's fixed outcome (default: +)")
    parser.add_option(
        "--explore", dest="explore", action="store_true", default=False,
        help="Also minimize E(F) over all nonsignaling behaviors",
    )
    parser.add_option("-v", "--verbose", dest="verbose", action="store_true", default=False, help="Log debug messages")
    return parser


def emit(options, manifest, name, text, stdout=True):
    if options.out:
        return manifest.output(options.out, name, text)
    if stdout:
        sys.stdout.write(text)


def say(line):
    sys.stdout.write(line + '\n')


def need_file(args, what='strategy file'):
    if not args:
        raise ValueError('missing %s' % what)
    return args[0]


def load_valid(path):
    network = load_network(path)
    report = validate(network)
    if not report.ok:
        say(str(report))
        raise StrategyError('%s is not a valid strategy' % path, report.violations)
    return network


def cmd_validate(options, args, manifest):
    network = load_network(need_file(args))
    report = validate(network)
    say(str(report))
    return OK if report.ok else FAILED


def _orderings_identical(network):
    identical = 0
    for ordering in ORDERINGS:
        if all(
            build_joint(network, s, tuple(ordering), checked=True).support
            == build_joint(network, s, tuple(ORDERINGS[0]), checked=True).support
            for s in SETTINGS
        ):
            identical += 1
    return identical


def cmd_behavior(options, args, manifest):
    ordering = lexer.ordering(options.ordering)
    if options.quantum:
        behavior = quantum_behavior()
    else:
        network = load_valid(need_file(args))
        if options.mode == 'mc':
            behavior = simulate_rounds(network, ordering, options.rounds, options.seed)
        else:
            behavior = induced_behavior(network, ordering)
        if options.check_orderings:
            say('%d/6 orderings identical' % _orderings_identical(network))
    emit(options, manifest, 'behavior.json', behavior.to_json(), options.format == 'json')
    emit(options, manifest, 'behavior.csv', behavior.to_csv(), options.format == 'csv')
    report = check_inequality(behavior)
    say('E(%s) = E(%s) = %s' % (LABELS[0], LABELS[1], format_value(report.value)))
    say(report.verdict)
    return OK


def cmd_verify(options, args, manifest):
    if options.lp_only:
        status = OK
        for fixed in ('+', '0'):
            value = fixed_output_bound(fixed).value
            say("fixed '%s': %s (exact)" % (fixed, format_value(value)))
            if value != 1:
                status = FAILED
        return status
    path = need_file(args, 'strategy or behavior file')
    doc = load_document(path)
    subject = Behavior.from_json(doc) if looks_like_behavior(doc) else load_valid(path)
    report = Verifier(subject, ordering=lexer.ordering(options.ordering)).verify()
    say(str(report))
    emit(options, manifest, 'verify.txt', str(report) + '\n', stdout=False)
    return OK if report.ok else FAILED


def cmd_transform(options, args, manifest):
    path = need_file(args)
    doc = load_document(path)
    if looks_like_behavior(doc):
        raise NetworkRequired('network required: %s holds a behavior, the surgeries need a strategy' % path)
    network = load_valid(path)
    derandomized, first = derandomize(network)
    fixed, second = fix_output(derandomized)
    chain = verify_chain(network)
    emit(options, manifest, 'derandomized.json', serialize(derandomized), stdout=False)
    emit(options, manifest, 'fixed.json', serialize(fixed), stdout=False)
    emit(options, manifest, 'surgery.json', chain.surgery.to_json())
    say('a_b* = %s, k* = %s' % (first.a_b_star or '(empty)', second.k_star))
    say(str(chain))
    return OK if chain.ok else FAILED


def cmd_search(options, args, manifest):
    config = SearchConfig(
        counts=lexer.counts(options.counts),
        mode=options.search_mode,
        budget=options.budget,
        seed=options.seed,
    )
    try:
        result = minimize_EF(config)
    except BoundViolation as e:
        emit(options, manifest, 'violation.json', serialize(e.network), stdout=False)
        return FAILED
    emit(options, manifest, 'best.json', serialize(result.best_network), stdout=False)
    emit(options, manifest, 'best-behavior.json', induced_behavior(result.best_network).to_json(), stdout=False)
    emit(options, manifest, 'histogram.csv', result.histogram_csv(), stdout=False)
    say('best E(F) = %s (%s)' % (format_value(result.best_value), result.label))
    say('%d evaluated' % result.evaluated)
    if result.exhausted:
        say('budget exhausted: partial results')
    return OK


def cmd_lp(options, args, manifest):
    fixed = None if options.fixed == 'none' else options.fixed
    solution = fixed_output_bound(fixed)
    name = solution.program.name
    emit(options, manifest, '%s.program.json' % name, solution.program.to_json(), stdout=False)
    emit(options, manifest, '%s.solution.json' % name, solution.to_json(), stdout=False)
    say('%s: %s (exact)' % (name, format_value(solution.value)))
    if options.explore:
        explored = min_bell()
        emit(options, manifest, 'min-bell.solution.json', explored.to_json(), stdout=False)
        say('min E(F) over nonsignaling behaviors: %s (exact)' % format_value(explored.value))
    return OK


def cmd_sample(options, args, manifest):
    network = sample_random_network(lexer.counts(options.counts), options.seed)
    emit(options, manifest, 'network.json', serialize(network))
    return OK


def cmd_joint(options, args, manifest):
    network = load_valid(need_file(args))
    settings = lexer.setting(args[1]) if len(args) > 1 else SETTINGS[0]
    joint = build_joint(network, settings, lexer.ordering(options.ordering), checked=True)
    emit(options, manifest, 'joint-%s.csv' % settings.symbol.replace("'", 'p'), joint.to_csv())
    return OK


def cmd_demo(options, args, manifest):
    for message in (0, 1):
        say('message %d decoded as %d with probability 1' % (message, pathological_signaling_demo(message)))
    return OK


COMMANDS = {
    'validate': cmd_validate,
    'behavior': cmd_behavior,
    'verify': cmd_verify,
    'transform': cmd_transform,
    'search': cmd_search,
    'lp': cmd_lp,
    'sample': cmd_sample,
    'joint': cmd_joint,
    'demo': cmd_demo,
}


def main(argv=None):
    parser = build_parser()
    options, args = parser.parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.DEBUG if options.verbose else logging.INFO,
        format='%(levelname)s: %(message)s',
    )
    if not args:
        parser.error('missing command')
    command, rest = args[0], args[1:]
    handler = COMMANDS.get(command)
    if handler is None:
        parser.error('unknown command "%s", choose from %s' % (command, ', '.join(sorted(COMMANDS))))

    manifest = RunManifest(command, vars(options), options.seed, rest)
    try:
        if options.out and not os.path.isdir(options.out):
            os.makedirs(options.out)
        status = handler(options, rest, manifest)
    except EnvironmentError as e:
        if e.errno == errno.ENOENT:
            log.error('file not found: %s', e.filename)
        else:
            log.error('%s', e)
        status = USAGE_ERROR
    except (ValueError, NetworkRequired) as e:
        log.error('%s', e)
        status = USAGE_ERROR
    except PRBoxError as e:
        log.error('%s', e)
        status = FAILED
    manifest.status = status
    # failed runs get a manifest too, as long as the output directory exists
    manifest.finish(options.out if options.out and os.path.isdir(options.out) else None)
    return status


if __name__ == '__main__':
    sys.exit(main())
