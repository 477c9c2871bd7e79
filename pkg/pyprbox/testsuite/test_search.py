import logging
from fractions import Fraction

import pytest

from pyprbox import search
from pyprbox.exceptions import BoundViolation
from pyprbox.nodes import BoxRef, DecisionNode, PartyStrategy
from pyprbox.runtime import make_rng
from pyprbox.search import (
    EXHAUSTIVE_COUNTS,
    EXHAUSTIVE_LABEL,
    MOVES,
    SearchConfig,
    all_trees,
    canonicalize,
    check_canonical_soundness,
    collapse_ratio,
    evaluate,
    minimize_EF,
    setting_forms,
)
from pyprbox.strategy import constant_table, sample_random_network, trivial_network, validate

B0 = BoxRef('B', 0)
C0 = BoxRef('C', 0)


def alice(tree, table=None):
    return PartyStrategy('A', EXHAUSTIVE_COUNTS, (tree, tree), table or constant_table(2, 1))


@pytest.fixture(scope='module')
def exhaustive_result():
    return minimize_EF(SearchConfig())


class TestCanonicalForms(object):
    def test_query_order_does_not_matter_with_fixed_inputs(self):
        first = DecisionNode(B0, 0, DecisionNode(C0, 1, None, None), DecisionNode(C0, 1, None, None))
        second = DecisionNode(C0, 1, DecisionNode(B0, 0, None, None), DecisionNode(B0, 0, None, None))
        assert canonicalize(alice(first)) == canonicalize(alice(second))

    def test_adaptive_inputs_are_distinguished(self):
        fixed = DecisionNode(B0, 0, DecisionNode(C0, 0, None, None), DecisionNode(C0, 0, None, None))
        adaptive = DecisionNode(B0, 0, DecisionNode(C0, 0, None, None), DecisionNode(C0, 1, None, None))
        assert canonicalize(alice(fixed)) != canonicalize(alice(adaptive))

    def test_output_tables_are_distinguished(self):
        tree = DecisionNode(B0, 0, DecisionNode(C0, 0, None, None), DecisionNode(C0, 0, None, None))
        table = constant_table(2, 1)
        table[(3, 0)] = 0
        assert canonicalize(alice(tree)) != canonicalize(alice(tree, table))

    def test_form_counts(self):
        assert len(all_trees((B0, C0))) == 16
        assert all_trees(()) == [None]
        forms = setting_forms('A', EXHAUSTIVE_COUNTS)
        assert len(forms) == 192
        assert sum(len(v) for v in forms.values()) == 16 * 16
        assert collapse_ratio() == Fraction(16, 9)

    def test_equal_forms_give_equal_behaviors(self):
        assert check_canonical_soundness(pairs=20, networks=5, seed=2) == []
        assert check_canonical_soundness(pairs=10, networks=3, seed=3, party='C') == []

    @pytest.mark.slow
    def test_equal_forms_give_equal_behaviors_at_scale(self):
        assert check_canonical_soundness(pairs=200, networks=20, seed=0) == []


class TestConfig(object):
    def test_defaults(self):
        config = SearchConfig()
        assert config.mode == 'exhaustive'
        assert config.counts == EXHAUSTIVE_COUNTS

    @pytest.mark.parametrize('kwargs', [
        dict(mode='annealing'),
        dict(mode='exhaustive', counts=(2, 1, 1)),
        dict(mode='exhaustive', symmetry=False),
        dict(mode='random', budget=0),
    ])
    def test_rejected(self, kwargs):
        with pytest.raises(ValueError):
            SearchConfig(**kwargs)


class TestExhaustive(object):
    def test_the_minimum_is_the_bound(self, exhaustive_result):
        assert exhaustive_result.best_value == Fraction(1, 8)
        assert exhaustive_result.label == EXHAUSTIVE_LABEL
        assert not exhaustive_result.exhausted

    def test_the_minimizer_is_reconstructed(self, exhaustive_result):
        network = exhaustive_result.best_network
        assert validate(network).ok
        assert evaluate(network) == Fraction(1, 8)

    def test_histogram(self, exhaustive_result):
        histogram = exhaustive_result.histogram
        assert min(histogram) == Fraction(1, 8)
        assert sum(histogram.values()) == 192 ** 3
        lines = exhaustive_result.histogram_csv().splitlines()
        assert lines[0] == 'E(F),count'
        assert lines[1].startswith('1/8,')


class TestHeuristics(object):
    def test_random_search(self):
        result = minimize_EF(SearchConfig((1, 1, 1), 'random', budget=50, seed=3))
        assert result.evaluated == 50
        assert sum(result.histogram.values()) == 50
        assert result.best_value >= Fraction(1, 8)
        assert result.exhausted
        assert evaluate(result.best_network) == result.best_value

    @pytest.mark.slow
    def test_a_hundred_thousand_random_networks(self):
        result = minimize_EF(SearchConfig((1, 1, 1), 'random', budget=10 ** 5, seed=0))
        assert result.evaluated == 10 ** 5
        assert sum(result.histogram.values()) == 10 ** 5
        assert min(result.histogram) == result.best_value >= Fraction(1, 8)

    def test_random_search_is_seeded(self):
        config = SearchConfig((2, 1, 1), 'random', budget=20, seed=8)
        assert minimize_EF(config).histogram == minimize_EF(config).histogram

    def test_local_search_from_the_trivial_network(self):
        result = minimize_EF(SearchConfig((1, 1, 1), 'local', budget=40, seed=1, patience=10))
        assert result.evaluated == 40
        assert result.best_value == Fraction(1, 8)

    def test_moves_keep_networks_valid(self):
        rng = make_rng(12)
        for seed in range(5):
            network = sample_random_network((2, 1, 1), seed)
            for move in MOVES:
                for party in 'ABC':
                    for setting in (0, 1):
                        candidate = move(rng, network, party, setting)
                        if candidate is not None:
                            assert validate(candidate).ok, move.__name__


def test_a_violation_is_logged_and_raised(monkeypatch, caplog):
    monkeypatch.setattr(search, 'expected_F', lambda behavior: Fraction(1, 16))
    network = trivial_network()
    with caplog.at_level(logging.CRITICAL, logger='pyprbox.search'):
        with pytest.raises(BoundViolation) as e:
            evaluate(network)
    assert e.value.value == Fraction(1, 16)
    assert e.value.network == network
    assert [r.levelname for r in caplog.records] == ['CRITICAL']
    assert 'E(F) = 1/16 < 1/8' in caplog.records[0].getMessage()
