import pytest

from pyprbox.bell import quantum_behavior
from pyprbox.checks import Verifier, register_check
from pyprbox.strategy import sample_random_network, trivial_network


@pytest.fixture
def extra_check():
    @register_check('always fails', network_only=False)
    def always_fails(verifier):
        return False, 'on purpose'

    yield 'always fails'
    Verifier.checks.pop('always fails')
    Verifier.network_only.discard('always fails')


def names(report):
    return [r.name for r in report.results]


def test_a_network_passes_every_check():
    report = Verifier(sample_random_network((1, 1, 1), 40)).verify()
    assert report.ok, str(report)
    assert names(report)[:4] == ['party uniformity', 'three-string uniformity', "Bob's strings determined", 'support weights']
    assert 'fixed-output lp' in names(report)


def test_behaviors_skip_network_checks():
    report = Verifier(quantum_behavior()).verify()
    assert names(report) == ['no-signaling', 'bell bound', 'fixed-output lp']
    assert [r.name for r in report.failures()] == ['bell bound']
    assert 'bound VIOLATED' in report.failures()[0].detail


def test_only_and_skip():
    network = trivial_network()
    assert names(Verifier(network, only=['bell bound']).verify()) == ['bell bound']
    skipped = Verifier(network, skip=['transform chain', 'fixed-output lp', 'ordering invariance']).verify()
    assert 'transform chain' not in names(skipped)
    assert skipped.ok


def test_orderings_can_be_skipped():
    report = Verifier(trivial_network(), only=['ordering invariance'], check_orderings=False).verify()
    assert report.results[0].detail == 'skipped'
    report = Verifier(trivial_network(), only=['ordering invariance']).verify()
    assert report.results[0].detail == '6/6 orderings identical'


def test_registered_checks_run(extra_check):
    report = Verifier(trivial_network(), only=[extra_check]).verify()
    assert not report.ok
    assert str(report) == 'FAIL always fails: on purpose'


def test_failures_name_the_violated_law():
    report = Verifier(quantum_behavior(), only=['bell bound']).verify()
    assert str(report).startswith('FAIL bell bound: E(F) >= 1/8 violated: E(F) = 0.0732233')
    passed = Verifier(trivial_network(), only=['bell bound']).verify()
    assert str(passed) == 'PASS bell bound: E(F) = 1/8, bound satisfied (tight)'
