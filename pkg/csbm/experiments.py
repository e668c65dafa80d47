"""
Monte Carlo experiments.
========================

Config-driven harness running clustering algorithms on synthetic graphs,
and the named presets reproducing the benchmark studies.

An experiment is a generator (``model``), a list of algorithms, a number
of repetitions and an optional sweep over one model parameter. Every
(sweep value, repetition) cell generates one dataset from its own seed
sub-stream and runs every algorithm on it.

.. autosummary::
    :toctree: generated/
    :nosignatures:

    run_experiment
    preset
    summarize
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
import math
import time
from typing import Optional

from easydict import EasyDict
import numpy as np
from tqdm import tqdm

from csbm import init, linalg, metrics, models, refine, utils
from csbm.utils.logging import RefinementTrace


REFINE_METHODS = ('IR-LS', 'sIR-LS', 'IR-LSS', 'IR-MAP', 'IR-SSBM')
BASELINE_METHODS = ('EM-Emb', 'A-SC', 'L-SC', 'K-SC', 'ORL-SC', 'kmeans', 'signed-SC')
METHODS = {name.lower(): name for name in REFINE_METHODS + BASELINE_METHODS}

INITS = ('em-emb', 'a-sc', 'l-sc', 'signed-sc', 'random', 'truth')
MODEL_TYPES = ('sbm', 'csbm', 'cssbm', 'signed')

# baselines sharing their computation with the initialization of the same name
BASELINE_INITS = {'EM-Emb': 'em-emb', 'A-SC': 'a-sc', 'L-SC': 'l-sc', 'signed-SC': 'signed-sc'}


def canonical_method(method):
    try:
        return METHODS[str(method).lower()]
    except KeyError:
        raise ValueError(f"Unknown algorithm {method}, expected one of "
                         f"{sorted(METHODS.values())}.") from None


def check_init(init_name):
    name = str(init_name).lower()
    if name in INITS:
        return name
    if name.startswith('corrupt:'):
        try:
            fraction = float(name.split(':', 1)[1])
        except ValueError:
            raise ValueError(f"Invalid corruption fraction in {init_name}.") from None
        if not 0 <= fraction <= 1:
            raise ValueError(f"Corruption fraction must lie in [0, 1], got {fraction}.")
        return name
    raise ValueError(f"Unknown init {init_name}, expected one of {INITS} or corrupt:<fraction>.")


@dataclass(frozen=True)
class AlgorithmSpec:
    """One algorithm entry of an experiment.

    ``name`` identifies the algorithm in the results, ``method`` selects the
    implementation. Refinement methods need an ``init``. ``options`` accepts
    ``covariates`` (bool, use X), ``estimate_sigma`` (bool) and
    ``clamp_eps`` (float)."""
    name: str
    method: str
    init: Optional[str] = None
    T: Optional[int] = None
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, 'method', canonical_method(self.method))
        if self.method in REFINE_METHODS:
            if self.init is None:
                raise ValueError(f"{self.name}: refinement methods need an init.")
            object.__setattr__(self, 'init', check_init(self.init))
        if self.T is not None and self.T < 0:
            raise ValueError(f"{self.name}: T must be non negative, got {self.T}.")


@dataclass(frozen=True)
class Sweep:
    param: str
    values: tuple


@dataclass(frozen=True)
class ExperimentConfig:
    """Declarative Monte Carlo experiment.

    ``model`` is a dict with a ``type`` among 'sbm', 'csbm', 'cssbm' and
    'signed' and the parameters of that model; see :func:`resolve_model`.
    """
    name: str
    model: dict
    algorithms: tuple
    repetitions: int = 1
    base_seed: int = 0
    sweep: Optional[Sweep] = None
    output: Optional[str] = None
    heavy: bool = False

    def __post_init__(self):
        if self.repetitions < 1:
            raise ValueError(f"repetitions must be at least 1, got {self.repetitions}.")
        if len(self.algorithms) == 0:
            raise ValueError("At least one algorithm is required.")
        names = [algo.name for algo in self.algorithms]
        if len(set(names)) != len(names):
            raise ValueError(f"Algorithm names must be unique, got {names}.")
        resolve_model(self.model, None if self.sweep is None else self.sweep.param,
                      None if self.sweep is None else self.sweep.values[0])

    @property
    def n_cells(self):
        return (1 if self.sweep is None else len(self.sweep.values)) * self.repetitions


@dataclass(frozen=True)
class RunRecord:
    """One row of results: one algorithm on one (sweep value, repetition) cell.

    ``trajectory`` holds the Hamming distance to the truth after every
    refinement iteration; it is not written to the results file. Equality
    ignores the wall time."""
    sweep_param: str
    sweep_value: Optional[float]
    run: int
    algo: str
    seed: int
    nmi: float
    error_rate: float
    iters: int
    converged: bool
    wall_time_ms: float = field(compare=False)
    trajectory: tuple = field(default=(), compare=False)

    def as_row(self):
        return [self.sweep_param, '' if self.sweep_value is None else self.sweep_value,
                self.run, self.algo, self.seed, self.nmi, self.error_rate, self.iters,
                self.converged, self.wall_time_ms]


# Configuration

def _field(config, key, path, default=None, required=False):
    if key in config:
        return config[key]
    if required:
        raise ValueError(f"{path}{key}: missing required field.")
    return default


def config_from_dict(config):
    """Validates a config document into an ExperimentConfig.

    Errors name the offending field, e.g. ``algorithms[2].init``."""
    config = EasyDict(config)
    algorithms = []
    for index, entry in enumerate(_field(config, 'algorithms', '', required=True)):
        path = f"algorithms[{index}]."
        method = _field(entry, 'method', path, default=entry.get('name'))
        if method is None:
            raise ValueError(f"{path}method: missing required field.")
        try:
            method = canonical_method(method)
        except ValueError as err:
            raise ValueError(f"{path}method: {err}") from None
        init_name = _field(entry, 'init', path)
        if method in REFINE_METHODS:
            if init_name is None:
                raise ValueError(f"{path}init: missing required field.")
            try:
                init_name = check_init(init_name)
            except ValueError as err:
                raise ValueError(f"{path}init: {err}") from None
        T = _field(entry, 'T', path)
        if T is not None and (int(T) != T or T < 0):
            raise ValueError(f"{path}T: expected a non negative integer, got {T}.")
        algorithms.append(AlgorithmSpec(
            name=str(_field(entry, 'name', path, default=method)), method=method,
            init=init_name, T=None if T is None else int(T),
            options=dict(_field(entry, 'options', path, default={}))))

    sweep = _field(config, 'sweep', '')
    if sweep is not None:
        values = tuple(float(v) for v in _field(sweep, 'values', 'sweep.', required=True))
        if len(values) == 0:
            raise ValueError("sweep.values: empty sweep.")
        sweep = Sweep(param=str(_field(sweep, 'param', 'sweep.', required=True)), values=values)

    model = dict(_field(config, 'model', '', required=True))
    try:
        resolve_model(model, None if sweep is None else sweep.param,
                      None if sweep is None else sweep.values[0])
    except (KeyError, AttributeError, TypeError, ValueError) as err:
        raise ValueError(f"model: {err}") from None

    repetitions = _field(config, 'repetitions', '', default=1)
    if int(repetitions) != repetitions or repetitions < 1:
        raise ValueError(f"repetitions: expected a positive integer, got {repetitions}.")
    return ExperimentConfig(
        name=str(_field(config, 'name', '', default='experiment')),
        model=model,
        algorithms=tuple(algorithms),
        repetitions=int(repetitions),
        base_seed=int(_field(config, 'base_seed', '', default=0)),
        sweep=sweep,
        output=_field(config, 'output', ''),
        heavy=bool(_field(config, 'heavy', '', default=False)))


def resolve_model(model, sweep_param=None, sweep_value=None):
    """Concrete generator parameters, with the swept parameter substituted.

    Model types and their parameters:
      sbm: n, K, Pi, membership, weights, self_loops
      csbm: as sbm, plus centers (K x d) and sigma
      cssbm: n, K and either explicit p, q, centers, sigma; or ``snr_ratio`` r
        (SNR = r log n, split evenly between graph and covariates); or ``c``
        (p = 4c log n / n, q = c log n / n, centers 1 and 2,
        sigma^2 = 1 / (2c log n))
      signed: n, K, p, eta

    Returns:
      model: EasyDict
        with n, K, type, and Pi, centers, sigma, p, eta as relevant.
    """
    model = EasyDict(dict(model))
    if sweep_param is not None:
        if sweep_param not in model and sweep_param not in ('snr_ratio', 'c', 'eta', 'p', 'q',
                                                              'sigma', 'n'):
            raise ValueError(f"Unknown sweep parameter {sweep_param}.")
        model[sweep_param] = sweep_value
    kind = model.get('type')
    if kind not in MODEL_TYPES:
        raise ValueError(f"type must be one of {MODEL_TYPES}, got {kind}.")
    n, K = int(model.n), int(model.K)
    model.n, model.K = n, K
    if K < 1 or K > n:
        raise ValueError(f"Expected 1 <= K <= n, got K={K}, n={n}.")

    if kind == 'signed':
        models.SignedSbmSpec(n, K, float(model.p), float(model.eta),
                             membership=model.get('membership', 'multinomial'))
        return model

    if kind == 'cssbm':
        model.membership = model.get('membership', 'balanced')
        log_n = math.log(n)
        if model.get('snr_ratio') is not None:
            r = float(model.snr_ratio)
            p_prime, q_prime = 2 * r * K, r * K / 2
            gap = math.sqrt(4 * r * log_n)
            if K == 2:
                model.centers = [[0.], [gap]]
            else:
                model.centers = (gap / math.sqrt(2) * np.eye(K)).tolist()
            model.sigma = 1.
            model.p, model.q = p_prime * log_n / n, q_prime * log_n / n
        elif model.get('c') is not None:
            c = float(model.c)
            if K != 2:
                raise ValueError("The c parametrization is defined for K=2.")
            model.p, model.q = 4 * c * log_n / n, c * log_n / n
            model.centers = [[1.], [2.]]
            model.sigma = math.sqrt(1. / (2 * c * log_n))
        model.Pi = models.symmetric_pi(K, float(model.p), float(model.q)).tolist()

    models.SbmSpec(n, K, np.asarray(model.Pi, dtype=float),
                   membership=model.get('membership', 'multinomial'),
                   weights=model.get('weights'), self_loops=bool(model.get('self_loops', False)))
    if kind in ('csbm', 'cssbm'):
        spec = models.CovariateSpec(np.asarray(model.centers, dtype=float), float(model.sigma))
        if spec.K != K:
            raise ValueError(f"centers must have {K} rows, got {spec.K}.")
    return model


def generate_dataset(model, rng):
    """Draws (A, X, z) for a resolved model; X is None without covariates."""
    rng = linalg.make_rng(rng)
    if model.type == 'signed':
        spec = models.SignedSbmSpec(model.n, model.K, float(model.p), float(model.eta),
                                    membership=model.get('membership', 'multinomial'))
        A, z = models.generate_signed_sbm(spec, rng)
        return EasyDict(A=A, X=None, z=z, K=model.K, sigma=None)
    spec = models.SbmSpec(model.n, model.K, np.asarray(model.Pi, dtype=float),
                          membership=model.get('membership', 'multinomial'),
                          weights=model.get('weights'),
                          self_loops=bool(model.get('self_loops', False)))
    z = models.generate_partition(spec, rng)
    A = models.generate_sbm(z, spec.Pi, self_loops=spec.self_loops, rng=rng)
    X, sigma = None, None
    if model.type in ('csbm', 'cssbm'):
        cov = models.CovariateSpec(np.asarray(model.centers, dtype=float), float(model.sigma))
        X = models.generate_covariates(z, cov, rng)
        sigma = cov.sigma
    return EasyDict(A=A, X=X, z=z, K=model.K, sigma=sigma)


# Running

class _Cell:
    """One generated dataset and the initializations computed on it."""

    def __init__(self, data, seed):
        self.data = data
        self.seed = seed
        self._inits = {}
        self._kernel = None

    def kernel(self):
        if self._kernel is None:
            self._kernel = init.gaussian_kernel(self.data.X)
        return self._kernel

    def compute_init(self, name):
        d = self.data
        seed = linalg.seed_int(self.seed, 'init', name)
        if name == 'em-emb':
            return init.em_emb(d.A, d.X, d.K, seed=seed)
        if name == 'a-sc':
            return init.spectral_cluster(d.A, d.K, mode='adjacency', seed=seed)
        if name == 'l-sc':
            return init.spectral_cluster(d.A, d.K, mode='sym_laplacian', seed=seed)
        if name == 'signed-sc':
            return init.signed_spectral_init(d.A, d.K, seed=seed)
        if name == 'random':
            return init.random_init(d.z.shape[0], d.K, rng=seed)
        if name == 'truth':
            return d.z.copy()
        fraction = float(name.split(':', 1)[1])
        return init.corrupt_labels(d.z, d.K, fraction, rng=seed)

    def initial_labels(self, name):
        if name not in self._inits:
            self._inits[name] = self.compute_init(name)
        return self._inits[name]

    def run_baseline(self, algo):
        d = self.data
        if algo.method in BASELINE_INITS:
            name = BASELINE_INITS[algo.method]
            labels = self.compute_init(name)
            self._inits.setdefault(name, labels)
            return labels
        seed = linalg.seed_int(self.seed, 'algo', algo.name)
        if algo.method == 'K-SC':
            return init.spectral_cluster(self.kernel(), d.K, mode='sym_laplacian', seed=seed)
        if algo.method == 'ORL-SC':
            labels, _ = init.orl_sc(d.A, self.kernel(), d.K, d.z, seed=seed)
            return labels
        return linalg.kmeans(d.X, d.K, seed=seed)


def _run_algorithm(cell, algo):
    """Runs one algorithm and captures failures.

    Returns (labels, iters, converged, trajectory, wall_time_ms); a failing
    algorithm reports the last partition it produced, or the initial one."""
    d = cell.data
    trace = None
    start = time.perf_counter()
    try:
        if algo.method in REFINE_METHODS:
            z0 = init.ensure_nonempty(cell.initial_labels(algo.init), d.K)
            X = d.X if algo.options.get('covariates', True) else None
            trace = RefinementTrace(z_true=d.z)
            start = time.perf_counter()
            z, trace = refine.ir_cluster(
                d.A, X, d.K, sigma_noise=d.sigma if X is not None else None, z0=z0,
                T=algo.T, variant=algo.method, clamp_eps=algo.options.get('clamp_eps'),
                estimate_sigma=bool(algo.options.get('estimate_sigma', False)),
                callback=trace)
            elapsed = (time.perf_counter() - start) * 1e3
            return z, trace.n_iter, trace.converged, tuple(trace.trace_hamming[1:]), elapsed
        z = cell.run_baseline(algo)
        elapsed = (time.perf_counter() - start) * 1e3
        return z, 0, True, (), elapsed
    except Exception:
        elapsed = (time.perf_counter() - start) * 1e3
        if trace is not None and trace.trace_labels:
            z = trace.trace_labels[-1]
            trajectory = tuple(trace.trace_hamming[1:])
            iters = trace.n_iter
        else:
            z = np.zeros(d.z.shape[0], dtype=np.int64)
            trajectory, iters = (), 0
        return z, iters, False, trajectory, elapsed


def _sweep_value(config, sweep_index):
    if config.sweep is None:
        return '', None
    return config.sweep.param, config.sweep.values[sweep_index]


def run_cell(config, sweep_index, rep):
    """Records of every algorithm on the (sweep_index, rep) cell."""
    param, value = _sweep_value(config, sweep_index)
    model = resolve_model(config.model, param or None, value)
    cell_seed = linalg.seed_int(config.base_seed, sweep_index, rep)
    data = generate_dataset(model, linalg.make_rng(cell_seed, 'data'))
    cell = _Cell(data, cell_seed)

    records = []
    for algo in config.algorithms:
        z, iters, converged, trajectory, elapsed = _run_algorithm(cell, algo)
        records.append(RunRecord(
            sweep_param=param, sweep_value=value, run=rep, algo=algo.name, seed=cell_seed,
            nmi=metrics.nmi(z, data.z),
            error_rate=metrics.misclustering_rate(z, data.z, K=data.K),
            iters=int(iters), converged=bool(converged), wall_time_ms=float(elapsed),
            trajectory=trajectory))
    return records


def _run_cell_args(args):
    return run_cell(*args)


def run_experiment(config, n_jobs=1, verbose=0):
    """Runs every (sweep value, repetition) cell of an experiment.

    Args:
      config: ExperimentConfig

      n_jobs: int
        number of worker processes; records do not depend on it.

      verbose: int
        1 shows a progress bar.

    Returns:
      records: list of RunRecord
        sorted by (sweep index, repetition, algorithm order).
    """
    n_sweep = 1 if config.sweep is None else len(config.sweep.values)
    cells = [(config, s, rep) for s in range(n_sweep) for rep in range(config.repetitions)]

    if n_jobs is not None and n_jobs > 1:
        with ProcessPoolExecutor(max_workers=n_jobs) as executor:
            iterator = executor.map(_run_cell_args, cells)
            if verbose == 1:
                iterator = tqdm(iterator, total=len(cells))
            results = list(iterator)
    else:
        iterator = cells
        if verbose == 1:
            iterator = tqdm(iterator, total=len(cells))
        results = [run_cell(*args) for args in iterator]

    order = {algo.name: k for k, algo in enumerate(config.algorithms)}
    keyed = []
    for (_, s, rep), records in zip(cells, results):
        keyed += [((s, rep, order[r.algo]), r) for r in records]
    keyed.sort(key=lambda item: item[0])
    return [record for _, record in keyed]


def summarize(records):
    """Per (sweep value, algorithm) statistics of the records.

    Returns:
      summary: pandas.DataFrame
        columns sweep_param, sweep_value, algo, runs, nmi_mean, nmi_sd,
        nmi_min, nmi_max, error_rate_mean, error_rate_sd, error_rate_min,
        error_rate_max, exact_recovery, wall_time_ms_mean; standard
        deviations are population ones (ddof=0).
    """
    if len(records) == 0:
        raise ValueError("Cannot summarize an empty list of records.")
    frame = utils.data.records_frame(records)
    frame['exact'] = (frame['error_rate'] == 0).astype(float)
    keys = ['sweep_param', 'sweep_value', 'algo']
    grouped = frame.groupby(keys, sort=False)

    def sd(values):
        return values.std(ddof=0)

    summary = grouped.agg(
        runs=('nmi', 'size'),
        nmi_mean=('nmi', 'mean'), nmi_sd=('nmi', sd),
        nmi_min=('nmi', 'min'), nmi_max=('nmi', 'max'),
        error_rate_mean=('error_rate', 'mean'), error_rate_sd=('error_rate', sd),
        error_rate_min=('error_rate', 'min'), error_rate_max=('error_rate', 'max'),
        exact_recovery=('exact', 'mean'),
        wall_time_ms_mean=('wall_time_ms', 'mean'),
    ).reset_index()
    return summary


# Presets

FIG1_PI = 0.02 * np.array([[1.6, 1.2, .05], [1.2, 1.6, .05], [.05, .05, 1.2]])
FIG1_CENTERS = [[0., 0., 1.], [-1., 1., 0.], [0., 0., 1.]]
FIG1_SIGMA = math.sqrt(.2)


def _scaled(n, scale, K):
    return max(int(round(n * scale)), 2 * K)


def _covariate_comparison(T=30):
    return (
        AlgorithmSpec('IR-LS', 'IR-LS', init='em-emb', T=T),
        AlgorithmSpec('sIR-LS', 'sIR-LS', init='em-emb', T=T),
        AlgorithmSpec('IR-MAP', 'IR-MAP', init='em-emb', T=T),
        AlgorithmSpec('EM-Emb', 'EM-Emb'),
        AlgorithmSpec('ORL-SC', 'ORL-SC'),
        AlgorithmSpec('L-SC', 'L-SC'),
        AlgorithmSpec('K-SC', 'K-SC'),
    )


def _fig1_csbm(scale):
    model = dict(type='csbm', n=_scaled(1000, scale, 3), K=3, Pi=FIG1_PI.tolist(),
                 membership='multinomial', centers=FIG1_CENTERS, sigma=FIG1_SIGMA)
    return dict(name='fig1_csbm', model=model, algorithms=_covariate_comparison(),
                repetitions=40)


def _signed(name, p_full, p_ci, scale):
    if scale < 1:
        model = dict(type='signed', n=int(round(10000 * scale)), K=5, p=p_ci, eta=.05)
    else:
        model = dict(type='signed', n=int(round(10000 * scale)), K=20, p=p_full, eta=.05)
    algorithms = (
        AlgorithmSpec('signed-SC', 'signed-SC'),
        AlgorithmSpec('IR-SSBM', 'IR-SSBM', init='signed-sc', T=20),
        AlgorithmSpec('IR-SBM', 'sIR-LS', init='signed-sc', T=20,
                      options={'covariates': False}),
    )
    etas = tuple(round(.05 * k, 2) for k in range(1, 10))
    return dict(name=name, model=model, algorithms=algorithms, repetitions=20,
                sweep=Sweep('eta', etas), heavy=scale >= 1)


def _heterophilic(scale):
    Pi = [[.2, .05, .1], [.05, .15, .05], [.1, .05, .03]]
    model = dict(type='sbm', n=_scaled(1000, scale, 3), K=3, Pi=Pi)
    algorithms = (
        AlgorithmSpec('A-SC', 'A-SC'),
        AlgorithmSpec('L-SC', 'L-SC'),
        AlgorithmSpec('IR-LS', 'IR-LS', init='a-sc'),
        AlgorithmSpec('sIR-LS', 'sIR-LS', init='a-sc'),
        AlgorithmSpec('IR-MAP(1)', 'IR-MAP', init='a-sc', T=1),
    )
    return dict(name='heterophilic', model=model, algorithms=algorithms, repetitions=40)


def _rank_deficient(scale):
    Pi = 0.02 * np.array([[1.5, 1.5, .05], [1.5, 1.5, .05], [.05, .05, 1.5]])
    model = dict(type='csbm', n=_scaled(1000, scale, 3), K=3, Pi=Pi.tolist(),
                 centers=FIG1_CENTERS, sigma=FIG1_SIGMA)
    return dict(name='rank_deficient', model=model, algorithms=_covariate_comparison(),
                repetitions=40)


def _random_init_snr(scale):
    model = dict(type='cssbm', n=_scaled(1000, scale, 2), K=2, c=.5)
    algorithms = (
        AlgorithmSpec('sIR-LS', 'sIR-LS', init='random'),
        AlgorithmSpec('IR-MAP', 'IR-MAP', init='random'),
    )
    return dict(name='random_init_snr', model=model, algorithms=algorithms, repetitions=20,
                sweep=Sweep('c', (.25, .375, .5, .625, .75, 1.)))


def _threshold_phase(scale):
    model = dict(type='cssbm', n=_scaled(1000, scale, 2), K=2, snr_ratio=1.)
    algorithms = (AlgorithmSpec('IR-LSS', 'IR-LSS', init='em-emb'),)
    return dict(name='threshold_phase', model=model, algorithms=algorithms, repetitions=20,
                sweep=Sweep('snr_ratio', (.5, .75, 1., 1.25, 1.5, 2.)))


def _random_vs_emb(scale):
    Pi = 0.02 * np.array([[1.6, 1.2, .5], [1.2, 1.6, .5], [.5, .5, 1.2]])
    model = dict(type='csbm', n=_scaled(1000, scale, 3), K=3, Pi=Pi.tolist(),
                 centers=FIG1_CENTERS, sigma=FIG1_SIGMA)
    algorithms = (
        AlgorithmSpec('IR-LS/em-emb', 'IR-LS', init='em-emb', T=30),
        AlgorithmSpec('IR-LS/random', 'IR-LS', init='random', T=30),
        AlgorithmSpec('sIR-LS/em-emb', 'sIR-LS', init='em-emb', T=30),
        AlgorithmSpec('sIR-LS/random', 'sIR-LS', init='random', T=30),
    )
    return dict(name='random_vs_emb', model=model, algorithms=algorithms, repetitions=20)


def _contraction_echo(scale):
    model = dict(type='cssbm', n=_scaled(1000, scale, 2), K=2, snr_ratio=2.)
    algorithms = (AlgorithmSpec('IR-LSS', 'IR-LSS', init='corrupt:0.05'),)
    return dict(name='contraction_echo', model=model, algorithms=algorithms, repetitions=20)


PRESETS = {
    'fig1_csbm': _fig1_csbm,
    'fig3_signed': lambda scale: _signed('fig3_signed', .01, .04, scale),
    'signed_p003': lambda scale: _signed('signed_p003', .03, .12, scale),
    'heterophilic': _heterophilic,
    'rank_deficient': _rank_deficient,
    'random_init_snr': _random_init_snr,
    'threshold_phase': _threshold_phase,
    'random_vs_emb': _random_vs_emb,
    'contraction_echo': _contraction_echo,
}


def preset(name, scale=1., reps=None, seed=0):
    """Named experiment configuration.

    Args:
      name: str
        one of :data:`PRESETS`.

      scale: float
        multiplies the number of nodes. The signed presets switch to their
        desk-scale variant (K=5, denser graph) when scale < 1.

      reps: int, optional
        overrides the number of repetitions.

      seed: int
        base seed.

    Returns:
      config: ExperimentConfig
    """
    if name not in PRESETS:
        raise ValueError(f"Unknown preset {name}, available presets: {', '.join(PRESETS)}.")
    if not scale > 0:
        raise ValueError(f"scale must be positive, got {scale}.")
    settings = PRESETS[name](scale)
    if reps is not None:
        settings['repetitions'] = reps
    return ExperimentConfig(base_seed=seed, **settings)
