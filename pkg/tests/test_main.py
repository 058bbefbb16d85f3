import json

import pytest

from core.fock import fock_distinguishable, state_to_json
from main import EXIT_CHECK_FAILED, EXIT_ERROR, EXIT_OK, main


def _run(capsys, argv):
    code = main(argv)
    return code, capsys.readouterr().out


def test_filter_scenario_succeeds(capsys, tmp_path):
    code, out = _run(capsys, ['--scenario', 'filter', '--out-dir', str(tmp_path)])
    assert code == EXIT_OK
    document = json.loads(out)
    assert document['passed'] is True
    assert document['reports'][0]['scenario'] == 'filter'


def test_hom_scenario_writes_csv(capsys, tmp_path):
    code, out = _run(capsys, ['--scenario', 'hom', '--grid', '0,0.5,1', '--out-dir', str(tmp_path), '--oracle'])
    assert code == EXIT_OK
    assert (tmp_path / 'hom_dip.csv').read_text().splitlines()[0] == 'overlap,coincidence'
    assert len(json.loads(out)['reports'][0]['quantities']['curve']) == 3


def test_bad_grid_is_a_usage_error(capsys, tmp_path):
    code, out = _run(capsys, ['--scenario', 'hom', '--grid', '0,1.5', '--out-dir', str(tmp_path)])
    assert code == EXIT_ERROR
    assert out == ''


@pytest.mark.parametrize("argv", [
    ['--scenario', 'bogus'],
    ['--grid', 'a,b'],
    ['--preset', 'nothing'],
])
def test_usage_errors(capsys, argv):
    assert main(argv) == EXIT_ERROR


def test_schmidt_from_state_file(capsys, tmp_path):
    path = tmp_path / 'state.json'
    path.write_text(json.dumps(state_to_json(fock_distinguishable(2, (1, 2)))))
    code, out = _run(capsys, ['--scenario', 'schmidt', '--spec', str(path)])
    assert code == EXIT_OK
    quantities = json.loads(out)['reports'][0]['quantities']
    assert quantities['schmidt_rank'] == 2


def test_malformed_state_file(capsys, tmp_path):
    path = tmp_path / 'state.json'
    path.write_text(json.dumps({'shape': [2, 1]}))
    assert main(['--scenario', 'schmidt', '--spec', str(path)]) == EXIT_ERROR
    assert main(['--scenario', 'schmidt', '--spec', str(tmp_path / 'missing.json')]) == EXIT_ERROR


def test_schmidt_preset(capsys):
    code, out = _run(capsys, ['--scenario', 'schmidt', '--preset', 'filtered'])
    assert code == EXIT_OK
    assert json.loads(out)['reports'][0]['inputs']['state'] == 'filtered'


def test_search_output_is_deterministic(capsys, tmp_path):
    path = tmp_path / 'spec.json'
    path.write_text(json.dumps({'S': 2, 'input_ports': [1, 2], 'output_ports': [1, 2],
                                'restarts': 2, 'max_iters': 100, 'seed': 5}))
    argv = ['--scenario', 'search', '--spec', str(path)]
    first_code, first = _run(capsys, argv)
    second_code, second = _run(capsys, argv)
    assert first_code == second_code == EXIT_OK
    assert first == second
    result = json.loads(first)['reports'][0]['quantities']['result']
    assert result['converged'] is False


def test_failed_check_exit_code(capsys, monkeypatch):
    monkeypatch.setattr('core.scenarios.postselected_filter_probability', lambda alpha, beta: 0.0)
    code, out = _run(capsys, ['--scenario', 'filter'])
    assert code == EXIT_CHECK_FAILED
    assert json.loads(out)['passed'] is False
