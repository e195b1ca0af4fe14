"""
Command line interface, installed as ``dfr``.

Every subcommand writes a JSON document to standard output on success
and logs to standard error.  The exit status is 0 on success, 1 when
the command fails and 2 on usage errors.

"""
import argparse
import json
import logging
import logging.config
import pathlib
import sys
import time

import sprockets.dfr
from sprockets.dfr import (dataset as dataset_io, errors, masking, pipeline,
                          reproduce)

LOGGER = logging.getLogger(__name__)


def _emit(document):
    sys.stdout.write(json.dumps(document, sort_keys=True, allow_nan=False))
    sys.stdout.write('\n')


def _parse_taps(value):
    try:
        return tuple(int(t) for t in value.split(','))
    except ValueError:
        raise argparse.ArgumentTypeError(
            'taps must be comma separated integers, got {!r}'.format(value))


def _parse_grid(value):
    try:
        return tuple(float(v) for v in value.split(','))
    except ValueError:
        raise argparse.ArgumentTypeError(
            'grid must be comma separated numbers, got {!r}'.format(value))


def _positive_int(value):
    try:
        number = int(value)
    except ValueError:
        number = 0
    if number < 1:
        raise argparse.ArgumentTypeError(
            'expected a positive integer, got {!r}'.format(value))
    return number


def _config(args):
    overrides = {'jobs': args.jobs}
    if getattr(args, 'representation', None):
        overrides['representation'] = args.representation
    if args.config is None:
        return pipeline.ExperimentConfig(**overrides)
    return pipeline.load_config(args.config, **overrides)


def cmd_mask(args):
    poly = (masking.default_polynomial(args.m) if args.poly is None
            else masking.PrimitivePolynomial(args.m, args.poly))
    init = (masking.default_init(args.m) if args.init is None
            else masking.parse_bits(args.init))
    mask = masking.mask_matrix(poly, init, args.vars)
    document = mask.to_dict()
    document['polynomial'] = str(poly)
    _emit(document)


def cmd_train(args):
    dataset = dataset_io.load(args.dataset)
    config = _config(args)
    model = pipeline.fit(dataset, config)
    pipeline.save_model(model, args.out)
    report = pipeline.evaluate(model, dataset.train, config.jobs)
    LOGGER.info('wrote %s', args.out)
    _emit({'dataset': dataset.name, 'model': str(args.out),
           'train_accuracy': report.accuracy,
           'n_train': report.n_instances,
           'config': config.to_dict()})


def _split(dataset, name):
    return dataset.train if name == 'train' else dataset.test


def cmd_predict(args):
    model = pipeline.load_model(args.model)
    dataset = dataset_io.load(args.dataset)
    instances = _split(dataset, args.split)
    predicted = pipeline.predict_all(model, instances, args.jobs)
    _emit({'dataset': dataset.name, 'split': args.split,
           'predictions': [{'id': i.id, 'label': i.label, 'predicted': p}
                           for i, p in zip(instances, predicted)]})


def cmd_eval(args):
    model = pipeline.load_model(args.model)
    dataset = dataset_io.load(args.dataset)
    report = pipeline.evaluate(model, _split(dataset, args.split), args.jobs,
                               verbose=args.predictions)
    document = report.to_dict()
    if args.report:
        pathlib.Path(args.report).write_text(
            json.dumps(document, sort_keys=True) + '\n', encoding='utf-8')
    if args.confusion_csv:
        pathlib.Path(args.confusion_csv).write_text(report.confusion_csv(),
                                                    encoding='utf-8')
    _emit(document)


def cmd_grid(args):
    dataset = dataset_io.load(args.dataset)
    result = pipeline.grid_search(
        dataset, _config(args), gammas=args.gammas, etas=args.etas,
        holdout=args.holdout, folds=args.folds, seed=args.seed)
    _emit(result.to_dict())


def cmd_convert(args):
    dataset = dataset_io.convert(args.source, name=args.name)
    dataset_io.save(dataset, args.out)
    _emit(dataset.summary())


def cmd_synth(args):
    dataset = dataset_io.synth(
        n_classes=args.classes, n_vars=args.vars, n_train=args.train,
        n_test=args.test, t_range=(args.t_min, args.t_max), seed=args.seed,
        noise=args.noise)
    dataset_io.save(dataset, args.out)
    _emit(dataset.summary())


def cmd_reproduce(args):
    if args.table == 3:
        rows = reproduce.representation_rows(
            args.data_dir, degrees=args.m or (5,), jobs=args.jobs)
    else:
        rows = reproduce.method_rows(
            args.data_dir, datasets=args.dataset or reproduce.DATASETS,
            jobs=args.jobs)
    if args.markdown:
        pathlib.Path(args.markdown).write_text(reproduce.to_markdown(rows),
                                               encoding='utf-8')
    else:
        sys.stderr.write(reproduce.to_markdown(rows))
    _emit(reproduce.report(rows))


def cmd_serve(args):
    model = pipeline.load_model(args.model)
    sprockets.dfr.serve(model, {'port': args.port, 'debug': args.verbose},
                        log_config=sprockets.dfr.get_logging_config(
                            args.verbose))


def build_parser():
    parser = argparse.ArgumentParser(
        prog='dfr', description='Digital delayed feedback reservoir '
        'classifier for multivariate time series.')
    parser.add_argument('--version', action='version',
                        version='%(prog)s ' + sprockets.dfr.__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('-v', '--verbose', action='store_true',
                        help='log debug messages')
    common.add_argument('--jobs', type=_positive_int,
                        default=pipeline.default_jobs(),
                        help='worker processes (default: %(default)s)')
    subparsers = parser.add_subparsers(dest='command', metavar='command')
    subparsers.required = True

    def add(name, function, help_text):
        sub = subparsers.add_parser(name, parents=[common], help=help_text)
        sub.set_defaults(function=function)
        return sub

    sub = add('mask', cmd_mask, 'print an input mask')
    sub.add_argument('--m', type=int, default=5, help='polynomial degree')
    sub.add_argument('--poly', type=_parse_taps,
                     help='polynomial taps, e.g. 1,0 for x^3 + x + 1')
    sub.add_argument('--init', help='initial value bits, e.g. 001')
    sub.add_argument('--vars', type=int, default=1,
                     help='number of input variables')

    config_help = 'configuration file or preset name'
    sub = add('train', cmd_train, 'train and save a model')
    sub.add_argument('dataset', help='RCTS-v1 dataset file')
    sub.add_argument('--config', help=config_help)
    sub.add_argument('--representation', help='override the representation')
    sub.add_argument('--out', required=True, help='model bundle to write')

    for name, function, help_text in (
            ('predict', cmd_predict, 'list per-instance predictions'),
            ('eval', cmd_eval, 'evaluate a saved model')):
        sub = add(name, function, help_text)
        sub.add_argument('model', help='model bundle')
        sub.add_argument('dataset', help='RCTS-v1 dataset file')
        sub.add_argument('--split', choices=('train', 'test'),
                         default='test')
        if name == 'eval':
            sub.add_argument('--report', help='also write the report here')
            sub.add_argument('--confusion-csv',
                             help='write the confusion matrix as CSV')
            sub.add_argument('--predictions', action='store_true',
                             help='include per-instance predictions')

    sub = add('grid', cmd_grid, 'grid search gamma and eta')
    sub.add_argument('dataset', help='RCTS-v1 dataset file')
    sub.add_argument('--config', help=config_help)
    sub.add_argument('--representation', help='override the representation')
    sub.add_argument('--gammas', type=_parse_grid,
                     default=pipeline.DEFAULT_GRID)
    sub.add_argument('--etas', type=_parse_grid,
                     default=pipeline.DEFAULT_GRID)
    scheme = sub.add_mutually_exclusive_group()
    scheme.add_argument('--holdout', type=float,
                        default=pipeline.DEFAULT_HOLDOUT,
                        help='validation fraction (default: %(default)s)')
    scheme.add_argument('--folds', type=int, help='stratified folds')
    sub.add_argument('--seed', type=int, default=pipeline.DEFAULT_SEED)

    sub = add('convert', cmd_convert, 'convert a CSV directory tree')
    sub.add_argument('source', help='directory with <split>/<label>/*.csv')
    sub.add_argument('out', help='RCTS-v1 file to write')
    sub.add_argument('--name', help='dataset name')

    sub = add('synth', cmd_synth, 'generate a synthetic dataset')
    sub.add_argument('out', help='RCTS-v1 file to write')
    sub.add_argument('--classes', type=int, default=2)
    sub.add_argument('--vars', type=int, default=2)
    sub.add_argument('--train', type=int, default=60)
    sub.add_argument('--test', type=int, default=60)
    sub.add_argument('--t-min', type=int, default=20)
    sub.add_argument('--t-max', type=int, default=40)
    sub.add_argument('--seed', type=int, default=7)
    sub.add_argument('--noise', type=float, default=0.25)

    sub = add('reproduce', cmd_reproduce,
              'compare with published accuracies')
    sub.add_argument('--table', type=int, choices=(3, 6), default=6)
    sub.add_argument('--dataset', action='append', type=str.upper,
                     choices=reproduce.DATASETS,
                     help='dataset to include, may be repeated')
    sub.add_argument('--m', action='append', type=int,
                     choices=sorted(reproduce.REPRESENTATION_ACCURACY),
                     help='mask degree, may be repeated')
    sub.add_argument('--data-dir', default='data',
                     help='directory of <name>.jsonl files')
    sub.add_argument('--markdown', help='write the markdown table here')

    sub = add('serve', cmd_serve, 'serve predictions over HTTP')
    sub.add_argument('model', help='model bundle')
    sub.add_argument('--port', type=int, default=8000)

    return parser


def main(argv=None):
    """
    Run the command line.

    :param list|None argv: arguments without the program name
    :returns: the process exit status
    :rtype: int

    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as error:
        return error.code
    if args.command == 'reproduce' and args.table == 3 and args.dataset \
            and args.dataset != ['ARAB']:
        parser.print_usage(sys.stderr)
        sys.stderr.write('dfr: error: --table 3 only covers ARAB\n')
        return 2
    if args.command != 'serve':
        logging.config.dictConfig(
            sprockets.dfr.get_logging_config(args.verbose))

    started = time.monotonic()
    try:
        args.function(args)
    except (errors.DFRError, OSError) as error:
        LOGGER.error('%s failed: %s', args.command, error,
                     exc_info=args.verbose)
        return 1
    LOGGER.info('%s finished in %.2fs', args.command,
                time.monotonic() - started)
    return 0


if __name__ == '__main__':
    sys.exit(main())
