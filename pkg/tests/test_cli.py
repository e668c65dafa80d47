"""Tests for the csbm command line interface"""

import json

import numpy as np
import pandas as pd
import pytest

from csbm import cli, models
from csbm.utils import data


FIG1 = {
    'type': 'csbm', 'n': 1000, 'K': 3,
    'Pi': (0.02 * np.array([[1.6, 1.2, .05], [1.2, 1.6, .05], [.05, .05, 1.2]])).tolist(),
    'centers': [[0., 0., 1.], [-1., 1., 0.], [0., 0., 1.]],
    'sigma': .2 ** .5,
}


@pytest.fixture
def fig1_files(tmp_path):
    config = tmp_path / 'fig1.json'
    config.write_text(json.dumps(FIG1))
    prefix = tmp_path / 'fig1'
    code = cli.main(['generate', '--model', 'csbm', '--config', str(config), '--seed', '1',
                     '--out-prefix', str(prefix)])
    assert code == cli.EXIT_OK
    return prefix


def test_generate_fig1(fig1_files):
    labels = data.read_labels(f"{fig1_files}.labels.txt")
    assert labels.shape == (1000,)
    A = data.read_edges(f"{fig1_files}.edges.tsv")
    assert A.shape == (1000, 1000)
    X = data.read_covariates(f"{fig1_files}.covariates.csv")
    assert X.shape == (1000, 3)


def test_generate_deterministic(tmp_path, fig1_files):
    config = tmp_path / 'fig1.json'
    prefix = tmp_path / 'again'
    cli.main(['generate', '--model', 'csbm', '--config', str(config), '--seed', '1',
              '--out-prefix', str(prefix)])
    for suffix in ('.edges.tsv', '.labels.txt', '.covariates.csv'):
        with open(f"{fig1_files}{suffix}", 'rb') as f, open(f"{prefix}{suffix}", 'rb') as g:
            assert f.read() == g.read()


def test_generate_empty_graph(tmp_path):
    config = tmp_path / 'sbm.json'
    config.write_text(json.dumps({'type': 'sbm', 'n': 10, 'K': 2, 'Pi': [[0, 0], [0, 0]]}))
    prefix = tmp_path / 'empty'
    assert cli.main(['generate', '--model', 'sbm', '--config', str(config),
                     '--out-prefix', str(prefix)]) == cli.EXIT_OK
    assert (tmp_path / 'empty.edges.tsv').read_text() == '# n=10\n'
    assert not (tmp_path / 'empty.covariates.csv').exists()


def test_generate_invalid_config(tmp_path, capsys):
    config = tmp_path / 'bad.json'
    config.write_text('{"type": "sbm",\n "n": }')
    code = cli.main(['generate', '--model', 'sbm', '--config', str(config),
                     '--out-prefix', str(tmp_path / 'x')])
    assert code == cli.EXIT_INPUT
    assert f"{config}:2" in capsys.readouterr().err


def test_cluster_kmeans_without_graph(tmp_path, fig1_files, capsys):
    out = tmp_path / 'kmeans.txt'
    code = cli.main(['cluster', '--algo', 'kmeans', '--covariates',
                     f"{fig1_files}.covariates.csv", '--k', '3', '--out', str(out)])
    assert code == cli.EXIT_OK
    assert data.read_labels(out).shape == (1000,)
    assert 'iterations=0 converged=true' in capsys.readouterr().err


def test_cluster_refines_em_emb(tmp_path, fig1_files, capsys):
    common = ['--graph', f"{fig1_files}.edges.tsv", '--covariates',
              f"{fig1_files}.covariates.csv", '--k', '3']
    emb, refined = tmp_path / 'emb.txt', tmp_path / 'refined.txt'
    assert cli.main(['cluster', '--algo', 'em-emb', *common, '--out', str(emb)]) == 0
    assert cli.main(['cluster', '--algo', 'ir-ls', '--init', 'em-emb', '--sigma',
                     str(.2 ** .5), '--iters', '30', *common, '--out', str(refined)]) == 0
    capsys.readouterr()

    truth = f"{fig1_files}.labels.txt"
    scores = []
    for pred in (emb, refined):
        cli.main(['evaluate', '--pred', str(pred), '--truth', truth, '--metrics', 'nmi'])
        scores.append(float(capsys.readouterr().out))
    assert scores[1] >= scores[0]


def test_cluster_file_init_fixed_point(tmp_path):
    z = np.repeat(np.arange(3), 10)
    Pi = np.array([[.6, .1, .2], [.1, .5, .05], [.2, .05, .4]])
    graph, labels, out = tmp_path / 'p.tsv', tmp_path / 'truth.txt', tmp_path / 'out.txt'
    data.write_edges(graph, models.expected_matrix(z, Pi))
    data.write_labels(labels, z)
    for algo in ('ir-ls', 'sir-ls', 'ir-lss', 'ir-map', 'ir-ssbm'):
        code = cli.main(['cluster', '--algo', algo, '--graph', str(graph), '--k', '3',
                         '--init', f"file:{labels}", '--out', str(out)])
        assert code == cli.EXIT_OK
        assert np.array_equal(data.read_labels(out), z)


@pytest.mark.parametrize('args', [
    ['cluster', '--algo', 'ir-ls', '--k', '2', '--out', 'x.txt'],
    ['cluster', '--algo', 'kmeans', '--k', '2', '--out', 'x.txt'],
    ['cluster', '--algo', 'louvain', '--k', '2', '--out', 'x.txt'],
    ['evaluate', '--pred', 'a.txt'],
    ['experiment', '--out', 'r.csv'],
])
def test_usage_errors(args):
    assert cli.main(args) == cli.EXIT_USAGE


def test_cluster_missing_sigma(tmp_path, fig1_files):
    code = cli.main(['cluster', '--algo', 'ir-ls', '--graph', f"{fig1_files}.edges.tsv",
                     '--covariates', f"{fig1_files}.covariates.csv", '--k', '3',
                     '--out', str(tmp_path / 'z.txt')])
    assert code == cli.EXIT_USAGE


def test_cluster_malformed_graph(tmp_path, capsys):
    graph = tmp_path / 'bad.tsv'
    graph.write_text('# n=2\n0\t5\t1\n')
    code = cli.main(['cluster', '--algo', 'a-sc', '--graph', str(graph), '--k', '2',
                     '--out', str(tmp_path / 'z.txt')])
    assert code == cli.EXIT_INPUT
    assert f"{graph}:2:" in capsys.readouterr().err


def write_labels(path, labels):
    data.write_labels(path, np.asarray(labels))
    return str(path)


def test_evaluate(tmp_path, capsys):
    truth = write_labels(tmp_path / 'truth.txt', [0, 0, 1, 1, 2])
    same = write_labels(tmp_path / 'same.txt', [0, 0, 1, 1, 2])
    relabeled = write_labels(tmp_path / 'relabeled.txt', [2, 2, 0, 0, 1])
    for pred in (same, relabeled):
        assert cli.main(['evaluate', '--pred', pred, '--truth', truth]) == cli.EXIT_OK
        assert capsys.readouterr().out.strip() == '1.0,0.0'


def test_evaluate_three_nodes(tmp_path, capsys):
    truth = write_labels(tmp_path / 'truth.txt', [0, 0, 0])
    pred = write_labels(tmp_path / 'pred.txt', [1, 1, 0])
    cli.main(['evaluate', '--pred', pred, '--truth', truth, '--metrics', 'error_rate'])
    assert capsys.readouterr().out.strip() == '0.3333333333333333'


def test_evaluate_length_mismatch(tmp_path):
    truth = write_labels(tmp_path / 'truth.txt', [0, 0, 1])
    pred = write_labels(tmp_path / 'pred.txt', [0, 1])
    assert cli.main(['evaluate', '--pred', pred, '--truth', truth]) == cli.EXIT_INPUT


def test_experiment_preset(tmp_path, capsys):
    out = tmp_path / 'results.csv'
    code = cli.main(['experiment', '--preset', 'fig1_csbm', '--scale', '.2', '--reps', '5',
                     '--out', str(out)])
    assert code == cli.EXIT_OK
    frame = data.read_results(out)
    assert len(frame) == 5 * 7
    summary = pd.read_csv(data.summary_path(out))
    assert len(summary) == 7
    assert 'records=35' in capsys.readouterr().err


def test_experiment_config_deterministic(tmp_path):
    config = tmp_path / 'exp.json'
    config.write_text(json.dumps({
        'name': 'threshold',
        'model': {'type': 'cssbm', 'n': 100, 'K': 2},
        'algorithms': [{'method': 'IR-LSS', 'init': 'em-emb'}],
        'sweep': {'param': 'snr_ratio', 'values': [1., 2.]},
        'repetitions': 2,
    }))
    frames = []
    for name in ('a.csv', 'b.csv'):
        out = tmp_path / name
        assert cli.main(['experiment', '--config', str(config), '--seed', '4',
                         '--out', str(out)]) == cli.EXIT_OK
        frames.append(data.read_results(out).drop(columns='wall_time_ms'))
    pd.testing.assert_frame_equal(frames[0], frames[1])
    assert len(frames[0]) == 4


def test_experiment_invalid_config(tmp_path, capsys):
    config = tmp_path / 'exp.json'
    config.write_text(json.dumps({
        'model': {'type': 'sbm', 'n': 10, 'K': 2, 'Pi': [[.5, .1], [.1, .5]]},
        'algorithms': [{'method': 'IR-LS'}],
    }))
    code = cli.main(['experiment', '--config', str(config), '--out', str(tmp_path / 'r.csv')])
    assert code == cli.EXIT_INPUT
    assert 'algorithms[0].init' in capsys.readouterr().err
