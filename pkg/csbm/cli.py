"""
Command line interface.
=======================

``csbm generate``, ``csbm cluster``, ``csbm evaluate`` and ``csbm experiment``.

Exit codes: 0 on success (a clustering that did not converge still succeeds),
2 on usage errors, 3 on malformed inputs or configs.
"""

import argparse
import sys

from csbm import __version__
from csbm import experiments, init, linalg, metrics, refine
from csbm.utils import data


EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INPUT = 3

ALGORITHMS = ('ir-ls', 'sir-ls', 'ir-lss', 'ir-ssbm', 'ir-map', 'em-emb', 'a-sc', 'l-sc',
              'k-sc', 'kmeans')
REFINE_ALGORITHMS = ('ir-ls', 'sir-ls', 'ir-lss', 'ir-ssbm', 'ir-map')
INIT_CHOICES = ('em-emb', 'a-sc', 'l-sc', 'signed-sc', 'random')


class UsageError(Exception):
    """Invalid combination of command line flags."""


def _init_choice(value):
    if value in INIT_CHOICES or value.startswith('file:'):
        return value
    raise argparse.ArgumentTypeError(
        f"invalid init {value!r}, expected one of {', '.join(INIT_CHOICES)} or file:<path>")


def build_parser():
    parser = argparse.ArgumentParser(
        prog='csbm', description="Iterative refinement clustering of graphs with covariates.")
    parser.add_argument('--version', action='version', version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest='command', required=True)

    gen = commands.add_parser('generate', help="sample a synthetic dataset")
    gen.add_argument('--model', required=True, choices=['sbm', 'cssbm', 'csbm', 'signed'])
    gen.add_argument('--config', required=True, help="JSON document with the model parameters")
    gen.add_argument('--seed', type=int, default=0)
    gen.add_argument('--out-prefix', required=True)

    clu = commands.add_parser('cluster', help="cluster a graph and/or covariates")
    clu.add_argument('--algo', required=True, choices=ALGORITHMS)
    clu.add_argument('--graph')
    clu.add_argument('--covariates')
    clu.add_argument('--k', type=int, required=True)
    clu.add_argument('--sigma', type=float)
    clu.add_argument('--estimate-sigma', action='store_true')
    clu.add_argument('--init', type=_init_choice)
    clu.add_argument('--iters', type=int)
    clu.add_argument('--seed', type=int, default=0)
    clu.add_argument('--out', required=True)

    ev = commands.add_parser('evaluate', help="compare predicted and true labels")
    ev.add_argument('--pred', required=True)
    ev.add_argument('--truth', required=True)
    ev.add_argument('--metrics', default='nmi,error_rate')

    exp = commands.add_parser('experiment', help="run a Monte Carlo experiment")
    source = exp.add_mutually_exclusive_group(required=True)
    source.add_argument('--preset', choices=sorted(experiments.PRESETS))
    source.add_argument('--config')
    exp.add_argument('--scale', type=float, default=1.)
    exp.add_argument('--reps', type=int)
    exp.add_argument('--seed', type=int, default=0)
    exp.add_argument('--out', required=True)
    exp.add_argument('--n-jobs', type=int, default=1)
    exp.add_argument('--verbose', type=int, default=0)
    return parser


def cmd_generate(args):
    config = data.read_config(args.config)
    config_type = config.get('type', args.model)
    if config_type != args.model:
        raise ValueError(f"type: config is for model {config_type}, --model is {args.model}.")
    config.type = args.model
    try:
        model = experiments.resolve_model(config)
    except (KeyError, AttributeError, TypeError) as err:
        raise ValueError(f"{args.config}: missing or invalid field {err}") from None
    dataset = experiments.generate_dataset(model, linalg.make_rng(args.seed, 'data'))

    prefix = args.out_prefix
    data.write_edges(f"{prefix}.edges.tsv", dataset.A)
    data.write_labels(f"{prefix}.labels.txt", dataset.z)
    if dataset.X is not None:
        data.write_covariates(f"{prefix}.covariates.csv", dataset.X)
    return EXIT_OK


def _run_init(name, A, X, K, seed):
    """Initialization named ``name``, seeded like the harness does."""
    seed = linalg.seed_int(seed, 'init', name)
    if name == 'em-emb':
        return init.em_emb(A, X, K, seed=seed)
    if name == 'a-sc':
        return init.spectral_cluster(A, K, mode='adjacency', seed=seed)
    if name == 'l-sc':
        return init.spectral_cluster(A, K, mode='sym_laplacian', seed=seed)
    if name == 'signed-sc':
        return init.signed_spectral_init(A, K, seed=seed)
    return init.random_init(A.shape[0], K, rng=seed)


def _initial_labels(args, A, X, K):
    name = args.init
    if name is None:
        name = 'signed-sc' if args.algo == 'ir-ssbm' else 'em-emb'
    if name.startswith('file:'):
        return data.read_labels(name[len('file:'):], K=K)
    return _run_init(name, A, X, K, args.seed)


def _check_cluster_flags(args):
    needs_graph = args.algo not in ('k-sc', 'kmeans')
    if needs_graph and args.graph is None:
        raise UsageError(f"--algo {args.algo} requires --graph")
    if args.algo in ('k-sc', 'kmeans') and args.covariates is None:
        raise UsageError(f"--algo {args.algo} requires --covariates")
    uses_sigma = args.algo in ('ir-ls', 'sir-ls', 'ir-lss', 'ir-map')
    if uses_sigma and args.covariates is not None and args.sigma is None \
            and not args.estimate_sigma:
        raise UsageError(f"--algo {args.algo} with --covariates requires --sigma "
                         f"or --estimate-sigma")
    if args.sigma is not None and not args.sigma > 0:
        raise UsageError("--sigma must be positive")
    if args.k < 1:
        raise UsageError("--k must be positive")
    if args.iters is not None and args.iters < 0:
        raise UsageError("--iters must be non negative")
    if args.init is not None and args.algo not in REFINE_ALGORITHMS:
        raise UsageError("--init only applies to refinement algorithms")


def cmd_cluster(args):
    _check_cluster_flags(args)
    A = data.read_edges(args.graph) if args.graph is not None else None
    X = data.read_covariates(args.covariates) if args.covariates is not None else None
    if A is not None and X is not None and X.shape[0] != A.shape[0]:
        raise data.InputFormatError(f"{args.covariates}:1: {X.shape[0]} rows for a graph "
                                    f"with {A.shape[0]} nodes")
    K = args.k
    iterations, converged = 0, True

    if args.algo in REFINE_ALGORITHMS:
        z0 = init.ensure_nonempty(_initial_labels(args, A, X, K), K)
        if z0.shape[0] != A.shape[0]:
            raise data.InputFormatError(f"{args.init}: {z0.shape[0]} labels for a graph "
                                        f"with {A.shape[0]} nodes")
        z, trace = refine.ir_cluster(A, X, K, sigma_noise=args.sigma, z0=z0, T=args.iters,
                                     variant=args.algo, estimate_sigma=args.estimate_sigma)
        iterations, converged = trace.n_iter, trace.converged
    elif args.algo in ('em-emb', 'a-sc', 'l-sc'):
        z = _run_init(args.algo, A, X, K, args.seed)
    elif args.algo == 'k-sc':
        z = init.spectral_cluster(init.gaussian_kernel(X), K, mode='sym_laplacian',
                                  seed=args.seed)
    else:
        z = linalg.kmeans(X, K, seed=args.seed)

    data.write_labels(args.out, z)
    print(f"iterations={iterations} converged={str(converged).lower()}", file=sys.stderr)
    return EXIT_OK


METRICS = {
    'nmi': metrics.nmi,
    'error_rate': metrics.misclustering_rate,
}


def cmd_evaluate(args):
    names = [name.strip() for name in args.metrics.split(',') if name.strip()]
    unknown = [name for name in names if name not in METRICS]
    if unknown or not names:
        raise UsageError(f"--metrics must list names among {', '.join(METRICS)}")
    pred = data.read_labels(args.pred)
    truth = data.read_labels(args.truth)
    if pred.shape[0] != truth.shape[0]:
        raise data.InputFormatError(f"{args.pred}:{pred.shape[0]}: {pred.shape[0]} labels, "
                                    f"{args.truth} has {truth.shape[0]}")
    values = [METRICS[name](pred, truth) for name in names]
    print(",".join(repr(float(value)) for value in values))
    return EXIT_OK


def cmd_experiment(args):
    if not args.scale > 0:
        raise UsageError("--scale must be positive")
    if args.reps is not None and args.reps < 1:
        raise UsageError("--reps must be positive")
    if args.preset is not None:
        config = experiments.preset(args.preset, scale=args.scale, reps=args.reps, seed=args.seed)
    else:
        document = data.read_config(args.config)
        document.base_seed = args.seed
        if args.reps is not None:
            document.repetitions = args.reps
        if args.scale != 1. and 'model' in document and 'n' in document.model:
            document.model.n = max(int(round(document.model.n * args.scale)), 1)
        config = experiments.config_from_dict(document)

    records = experiments.run_experiment(config, n_jobs=args.n_jobs, verbose=args.verbose)
    data.write_results(args.out, records)
    data.write_frame(data.summary_path(args.out), experiments.summarize(records))
    failed = sum(not record.converged for record in records)
    print(f"records={len(records)} not_converged={failed}", file=sys.stderr)
    return EXIT_OK


COMMANDS = {
    'generate': cmd_generate,
    'cluster': cmd_cluster,
    'evaluate': cmd_evaluate,
    'experiment': cmd_experiment,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return EXIT_USAGE if err.code else EXIT_OK
    try:
        return COMMANDS[args.command](args)
    except UsageError as err:
        parser.print_usage(sys.stderr)
        print(f"csbm {args.command}: error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except (data.InputFormatError, ValueError, OSError) as err:
        print(f"csbm {args.command}: error: {err}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == '__main__':
    sys.exit(main())
