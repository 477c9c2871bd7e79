import json
import logging
import os
from pathlib import Path

import pytest

from pyprbox.behavior import induced_behavior
from pyprbox.bell import quantum_behavior
from pyprbox.convert import main
from pyprbox.parser import deserialize
from pyprbox.runtime import read_text, write_text

CASES = Path(__file__).parent / 'cases'


def case(name):
    return str(CASES / ('%s.json' % name))


@pytest.fixture
def behavior_file(tmp_path):
    path = str(tmp_path / 'quantum.json')
    write_text(path, quantum_behavior().to_json())
    return path


class TestValidate(object):
    def test_valid(self, capsys):
        assert main(['validate', case('trivial')]) == 0
        assert capsys.readouterr().out == 'valid\n'

    def test_invalid(self, capsys):
        assert main(['validate', case('out_of_range')]) == 1

    def test_not_json(self):
        assert main(['validate', case('not_json')]) == 1

    def test_missing_file(self, tmp_path, caplog):
        assert main(['validate', str(tmp_path / 'nothing.json')]) == 2
        assert 'file not found' in caplog.text

    def test_missing_argument(self, caplog):
        assert main(['validate']) == 2
        assert 'missing strategy file' in caplog.text


class TestBehavior(object):
    def test_quantum(self, capsys):
        assert main(['behavior', '--quantum']) == 0
        out = capsys.readouterr().out
        assert 'E(F) = E(B) = 0.0732233\n' in out
        assert out.endswith('bound VIOLATED\n')

    def test_trivial_network(self, capsys):
        assert main(['behavior', case('trivial'), '--check-orderings', '--format', 'csv']) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == '6/6 orderings identical'
        assert lines[1] == 'setting,+++,++0,+0+,+00,0++,0+0,00+,000'
        assert lines[-2:] == ['E(F) = E(B) = 1/8', 'bound satisfied (tight)']

    def test_written_behavior_reads_back(self, tmp_path, capsys):
        out = str(tmp_path / 'run')
        assert main(['behavior', case('wired'), '--out', out]) == 0
        written = read_text(os.path.join(out, 'behavior.json'))
        assert json.loads(written) == json.loads(induced_behavior(deserialize(read_text(case('wired')))).to_json())
        manifest = json.loads(read_text(os.path.join(out, 'manifest.json')))
        assert manifest['command'] == 'behavior'
        assert [os.path.basename(p) for p in manifest['outputs']] == ['behavior.json', 'behavior.csv']

    def test_monte_carlo(self, capsys):
        assert main(['behavior', case('trivial'), '--mode', 'mc', '--rounds', '2000', '--seed', '5']) == 0
        assert 'E(F) = E(B) = 0.125' in capsys.readouterr().out


class TestVerify(object):
    def test_lp_only(self, capsys):
        assert main(['verify', '--lp-only']) == 0
        out = capsys.readouterr().out
        assert "fixed '+': 1 (exact)" in out
        assert "fixed '0': 1 (exact)" in out

    def test_network(self, capsys):
        assert main(['verify', case('wired')]) == 0
        assert 'FAIL' not in capsys.readouterr().out

    def test_quantum_behavior_fails_the_bound(self, behavior_file, capsys):
        assert main(['verify', behavior_file]) == 1
        assert 'FAIL bell bound' in capsys.readouterr().out

    def test_broken_json_fails_like_validate(self):
        assert main(['verify', case('not_json')]) == 1
        assert main(['transform', case('not_json')]) == 1

    def test_a_failed_run_still_writes_its_manifest(self, behavior_file, tmp_path):
        out = str(tmp_path / 'failed')
        assert main(['verify', behavior_file, '--out', out]) == 1
        manifest = json.loads(read_text(os.path.join(out, 'manifest.json')))
        assert manifest['status'] == 1
        assert [os.path.basename(p) for p in manifest['outputs']] == ['verify.txt']

    def test_a_usage_error_still_writes_its_manifest(self, tmp_path):
        out = str(tmp_path / 'missing')
        assert main(['validate', str(tmp_path / 'nothing.json'), '-o', out]) == 2
        manifest = json.loads(read_text(os.path.join(out, 'manifest.json')))
        assert manifest['status'] == 2
        assert manifest['outputs'] == []


class TestTransform(object):
    def test_trivial_network(self, tmp_path, capsys):
        out = str(tmp_path / 'surgery')
        assert main(['transform', case('trivial'), '-o', out]) == 0
        assert capsys.readouterr().out.startswith('a_b* = 0, k* = +\n')
        for name in ('derandomized.json', 'fixed.json', 'surgery.json', 'manifest.json'):
            assert os.path.exists(os.path.join(out, name))

    def test_a_behavior_is_refused(self, behavior_file, caplog):
        assert main(['transform', behavior_file]) == 2
        assert 'network required' in caplog.text


class TestOtherCommands(object):
    def test_sample(self, tmp_path):
        out = str(tmp_path / 'sample')
        assert main(['sample', '--seed', '7', '--counts', '2,1,1', '--out', out]) == 0
        network = deserialize(read_text(os.path.join(out, 'network.json')))
        assert network.counts == (2, 1, 1)
        manifest = json.loads(read_text(os.path.join(out, 'manifest.json')))
        assert manifest['seed'] == 7

    def test_joint(self, capsys):
        assert main(['joint', case('trivial'), "a'bc"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == 'a_b,a_c,b_a,b_c,c_a,c_b,probability'
        assert len(lines) == 9

    def test_search(self, capsys):
        assert main(['search', '--search-mode', 'random', '--budget', '5', '--seed', '1']) == 0
        out = capsys.readouterr().out
        assert '5 evaluated' in out
        assert 'budget exhausted' in out

    def test_lp(self, tmp_path, capsys):
        out = str(tmp_path / 'lp')
        assert main(['lp', '--out', out]) == 0
        assert capsys.readouterr().out == 'fixed-output-+: 1 (exact)\n'
        for name in ('fixed-output-+.program.json', 'fixed-output-+.solution.json', 'manifest.json'):
            assert os.path.exists(os.path.join(out, name))
        manifest = json.loads(read_text(os.path.join(out, 'manifest.json')))
        assert manifest['status'] == 0

    def test_lp_with_alice_fixed_at_zero(self, capsys):
        assert main(['lp', '--fixed', '0']) == 0
        assert capsys.readouterr().out == 'fixed-output-0: 1 (exact)\n'

    def test_lp_explore(self, capsys):
        assert main(['lp', '--fixed', 'none', '--explore']) == 0
        out = capsys.readouterr().out
        assert 'fixed-output-none: 0 (exact)' in out
        assert 'min E(F) over nonsignaling behaviors: 0 (exact)' in out

    def test_demo(self, capsys):
        assert main(['demo']) == 0
        assert capsys.readouterr().out == (
            'message 0 decoded as 0 with probability 1\nmessage 1 decoded as 1 with probability 1\n')


@pytest.mark.parametrize('argv', [[], ['frobnicate']])
def test_usage_errors(argv):
    with pytest.raises(SystemExit) as e:
        main(argv)
    assert e.value.code == 2


def test_verbose_logs_debug(caplog):
    with caplog.at_level(logging.DEBUG, logger='pyprbox'):
        assert main(['lp', '-v']) == 0
    assert any(r.levelno == logging.DEBUG for r in caplog.records)
