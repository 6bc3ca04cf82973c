"""
Command-Line Interface
train | encode | eval | synth | bench

    python -m src.cli synth --out-dir data
    python -m src.cli train --features data/train_features.csv --meta data/train_meta.csv \
        --model model.txt --codes codes.csv --history history.csv --k 15
    python -m src.cli eval --train-features ... --train-meta ... \
        --test-features ... --test-meta ... --out-dir run

Exit codes: 0 success, 1 runtime error, 2 usage error.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from src.coding.config import load_config
from src.coding.encoder import Encoder
from src.coding.engine import CroDomScTrainer
from src.coding.evaluation import METHODS, boxplot_figure, compare_methods, evaluate_split, summarize
from src.coding.exceptions import CroDomScError, InvalidConfigError, InvalidHyperparamsError
from src.coding.models import Hyperparams, SolverSettings
from src.storage.formats import (
    FLOAT_FORMAT, load_dataset, load_model, read_matrix, save_dataset, save_model,
    write_codes, write_history, write_metrics
)
from utils.sample_data import SynthConfig, generate

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2

# flag name -> Hyperparams field
HYPER_FLAGS = {
    'k': 'n_codewords',
    'alpha': 'alpha',
    'beta': 'beta',
    'gamma': 'gamma',
    'c': 'norm_bound',
    'iters': 'max_iter',
    'tol': 'tol',
    'seed': 'seed',
    'laplacian': 'laplacian',
}

# flag name -> SynthConfig field
SYNTH_FLAGS = {
    'n_features': 'n_features',
    'n_atoms': 'n_atoms',
    'n_source': 'n_source',
    'n_target': 'n_target',
    'n_test': 'n_test',
    'n_classes': 'n_classes',
    'sparsity': 'sparsity',
    'shift': 'shift',
    'noise': 'noise',
    'label_fraction': 'target_label_fraction',
    'synth_seed': 'seed',
}


class UsageError(Exception):
    """Bad flag values detected after argument parsing"""


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that raises instead of exiting"""

    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _add_hyper_flags(parser: argparse.ArgumentParser):
    group = parser.add_argument_group('hyperparameters (default: config file)')
    group.add_argument('--k', type=int, help='number of codewords K')
    group.add_argument('--alpha', type=float, help='L1 weight (> 0)')
    group.add_argument('--beta', type=float, help='label Laplacian weight (>= 0)')
    group.add_argument('--gamma', type=float, help='MMD weight (>= 0)')
    group.add_argument('--c', type=float, help='squared-norm bound on codewords (> 0)')
    group.add_argument('--iters', type=int, help='maximum outer iterations T')
    group.add_argument('--tol', type=float, help='relative objective change to stop early')
    group.add_argument('--seed', type=int, help='initialization seed')
    group.add_argument('--laplacian', choices=['absolute', 'signed'], help='degree convention')


def _add_synth_flags(parser: argparse.ArgumentParser, seed_flag: str = '--seed'):
    group = parser.add_argument_group('synthetic data (default: config file)')
    group.add_argument('--n-features', type=int, help='feature dimension D')
    group.add_argument('--n-atoms', type=int, help='ground-truth atoms K_true')
    group.add_argument('--n-source', type=int, help='source samples')
    group.add_argument('--n-target', type=int, help='training target samples')
    group.add_argument('--n-test', type=int, help='held-out target samples')
    group.add_argument('--n-classes', type=int, help='number of classes')
    group.add_argument('--sparsity', type=int, help='nonzeros per code')
    group.add_argument('--shift', type=float, help='norm of the target offset')
    group.add_argument('--noise', type=float, help='noise scale')
    group.add_argument('--label-fraction', type=float, help='labeled fraction of targets')
    group.add_argument(seed_flag, dest='synth_seed', type=int, help='data seed')


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog='crodomsc', description='Cross-domain sparse coding')
    parser.add_argument('--config', help='YAML config (default: $CRODOMSC_CONFIG or config/crodomsc.yaml)')
    parser.add_argument('--log-level', default='WARNING',
                        choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'])
    commands = parser.add_subparsers(dest='command', parser_class=_Parser)
    commands.required = True

    train = commands.add_parser('train', help='learn a codebook and training codes')
    train.add_argument('--features', required=True)
    train.add_argument('--meta', required=True)
    train.add_argument('--model', required=True, help='output model file')
    train.add_argument('--codes', required=True, help='output codes file')
    train.add_argument('--history', help='output history file (default: <codes stem>_history.csv)')
    _add_hyper_flags(train)

    encode = commands.add_parser('encode', help='code new samples with a trained model')
    encode.add_argument('--model', required=True)
    encode.add_argument('--features', required=True)
    encode.add_argument('--codes', required=True, help='output codes file')

    evaluate = commands.add_parser('eval', help='train, encode a test set and score it')
    evaluate.add_argument('--train-features', required=True)
    evaluate.add_argument('--train-meta', required=True)
    evaluate.add_argument('--test-features', required=True)
    evaluate.add_argument('--test-meta', required=True)
    evaluate.add_argument('--out-dir', help='write model, codes, history and metrics here')
    _add_hyper_flags(evaluate)

    synth = commands.add_parser('synth', help='write a synthetic train/test pair')
    synth.add_argument('--out-dir', required=True)
    _add_synth_flags(synth)

    bench = commands.add_parser('bench', help='compare regularizer variants over splits')
    bench.add_argument('--splits', type=int, default=10)
    bench.add_argument('--methods', nargs='+', choices=list(METHODS), default=list(METHODS))
    bench.add_argument('--results', help='write per-split results CSV')
    bench.add_argument('--html', help='write the accuracy boxplot as HTML')
    _add_hyper_flags(bench)
    _add_synth_flags(bench, seed_flag='--data-seed')

    return parser


def _overrides(args: argparse.Namespace, mapping: dict) -> dict:
    return {field: getattr(args, flag) for flag, field in mapping.items()
            if getattr(args, flag, None) is not None}


def _hyperparams(args, config) -> Hyperparams:
    return Hyperparams.from_config(config).with_updates(**_overrides(args, HYPER_FLAGS))


def _synth_config(args, config) -> SynthConfig:
    return SynthConfig.from_config(config).with_updates(**_overrides(args, SYNTH_FLAGS))


def _print_pair(key: str, value: float):
    print(f"{key},{FLOAT_FORMAT % value}")


def default_history_path(codes_path: str) -> Path:
    """History file written beside the codes file"""
    codes = Path(codes_path)
    return codes.with_name(f"{codes.stem}_history.csv")


def run_train(args, config) -> int:
    hyper = _hyperparams(args, config)
    settings = SolverSettings.from_config(config)
    dataset = load_dataset(args.features, args.meta)

    result = CroDomScTrainer(hyper, settings).fit(dataset)
    save_model(result.model, args.model)
    write_codes(result.codes, args.codes)
    write_history(result.history, args.history or default_history_path(args.codes))
    logger.info("Trained %d codewords on %d samples (%s)",
                hyper.n_codewords, dataset.n_samples, result.stop_reason.value)
    return EXIT_OK


def run_encode(args, config) -> int:
    model = load_model(args.model)
    features = read_matrix(args.features)
    codes = Encoder(model, SolverSettings.from_config(config)).encode_batch(features.T)
    write_codes(codes, args.codes)
    return EXIT_OK


def run_eval(args, config) -> int:
    hyper = _hyperparams(args, config)
    settings = SolverSettings.from_config(config)
    train = load_dataset(args.train_features, args.train_meta)
    test = load_dataset(args.test_features, args.test_meta, for_training=False)

    report = evaluate_split(train, test, hyper, settings)

    if args.out_dir:
        out_dir = Path(args.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        save_model(report.fit.model, out_dir / 'model.txt')
        write_codes(report.fit.codes, out_dir / 'train_codes.csv')
        write_codes(report.test_codes, out_dir / 'test_codes.csv')
        write_history(report.fit.history, out_dir / 'history.csv')
        write_metrics({'accuracy': report.accuracy, 'mmd': report.mmd},
                      out_dir / 'metrics.csv')

    _print_pair('accuracy', report.accuracy)
    _print_pair('mmd', report.mmd)
    return EXIT_OK


def run_synth(args, config) -> int:
    synth_config = _synth_config(args, config)
    train, test, _ = generate(synth_config)

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    save_dataset(train, out_dir / 'train_features.csv', out_dir / 'train_meta.csv')
    save_dataset(test, out_dir / 'test_features.csv', out_dir / 'test_meta.csv')
    logger.info("Wrote %d training and %d test samples to %s",
                train.n_samples, test.n_samples, out_dir)
    return EXIT_OK


def run_bench(args, config) -> int:
    if args.splits < 1:
        raise UsageError("--splits must be >= 1")
    hyper = _hyperparams(args, config)
    synth_config = _synth_config(args, config)
    results = compare_methods(synth_config, hyper, args.splits, methods=args.methods,
                              settings=SolverSettings.from_config(config))

    if args.results:
        results.to_csv(args.results, index=False, float_format=FLOAT_FORMAT, lineterminator='\n')
    if args.html:
        boxplot_figure(results).write_html(args.html, include_plotlyjs='cdn')

    print(summarize(results).to_csv(float_format='%.4f', lineterminator='\n'), end='')
    return EXIT_OK


COMMANDS = {
    'train': run_train,
    'encode': run_encode,
    'eval': run_eval,
    'synth': run_synth,
    'bench': run_bench,
}


def cli(argv: Optional[List[str]] = None) -> int:
    """Run one subcommand; returns the process exit code"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:
        # --help
        return int(exc.code or 0)

    logging.basicConfig(level=getattr(logging, args.log_level), stream=sys.stderr,
                        format='%(levelname)s %(name)s: %(message)s')

    try:
        config = load_config(args.config)
        return COMMANDS[args.command](args, config)
    except (UsageError, InvalidHyperparamsError, InvalidConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (CroDomScError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


def main():
    sys.exit(cli())


if __name__ == '__main__':
    main()
