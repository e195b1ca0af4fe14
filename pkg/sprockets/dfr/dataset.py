"""
Time series datasets and the RCTS-v1 interchange format.

An RCTS-v1 file is UTF-8 line-delimited JSON.  The first line is the
header::

   {"format": "rcts-v1", "name": "...", "n_vars": 2, "classes": ["a", "b"]}

and every following line is one instance::

   {"id": "...", "label": "a", "split": "train",
    "series": [[channel 0 values...], [channel 1 values...]]}

- :func:`load` / :func:`save`: read and write RCTS-v1 files
- :func:`synth`: seeded synthetic sinusoid dataset
- :func:`convert`: import a directory of CSV files

"""
import dataclasses
import json
import logging
import math
import pathlib
import typing

import numpy as np

from sprockets.dfr import errors

FORMAT = 'rcts-v1'
SPLITS = ('train', 'test')

LOGGER = logging.getLogger(__name__)


@dataclasses.dataclass(frozen=True)
class TimeSeriesInstance:
    """
    One labeled multivariate series.

    .. attribute:: series

       Read-only array of shape ``(N_u, T)``, one row per channel.

    """
    id: str
    label: str
    series: np.ndarray

    def __post_init__(self):
        series = np.array(self.series, dtype=np.float64)
        if series.ndim != 2 or series.shape[0] < 1:
            raise errors.DimensionError(
                'instance {!r}: series must have shape (N_u, T), '
                'got {}'.format(self.id, series.shape))
        if series.shape[1] < 1:
            raise errors.DimensionError(
                'instance {!r}: series is empty'.format(self.id))
        if not np.all(np.isfinite(series)):
            raise errors.NonFiniteError(
                'instance {!r}: series has non-finite values'.format(self.id))
        series.setflags(write=False)
        object.__setattr__(self, 'series', series)

    @property
    def n_vars(self):
        return self.series.shape[0]

    @property
    def length(self):
        """Number of samples ``T``."""
        return self.series.shape[1]


@dataclasses.dataclass(frozen=True)
class Dataset:
    """
    Named collection of train and test instances.

    :param str name: dataset name
    :param int n_vars: number of channels ``N_u``
    :param tuple classes: class labels in index order
    :param tuple train: training instances
    :param tuple test: testing instances

    """
    name: str
    n_vars: int
    classes: typing.Tuple[str, ...]
    train: typing.Tuple[TimeSeriesInstance, ...] = ()
    test: typing.Tuple[TimeSeriesInstance, ...] = ()

    def __post_init__(self):
        classes = tuple(self.classes)
        object.__setattr__(self, 'classes', classes)
        object.__setattr__(self, 'train', tuple(self.train))
        object.__setattr__(self, 'test', tuple(self.test))
        if len(set(classes)) != len(classes):
            raise errors.ConfigurationError(
                'dataset {!r} has duplicate classes'.format(self.name))
        for instance in self.train + self.test:
            if instance.n_vars != self.n_vars:
                raise errors.DimensionError(
                    'instance {!r} has {} channels, dataset {!r} has '
                    '{}'.format(instance.id, instance.n_vars, self.name,
                                self.n_vars))
            if instance.label not in classes:
                raise errors.DimensionError(
                    'instance {!r} has unknown label {!r}'.format(
                        instance.id, instance.label))

    @property
    def instances(self):
        return self.train + self.test

    @property
    def t_min(self):
        return min(i.length for i in self.instances)

    @property
    def t_max(self):
        return max(i.length for i in self.instances)

    def summary(self):
        """Dataset shape in the layout of a dataset summary table."""
        return {
            'name': self.name,
            'n_vars': self.n_vars,
            'n_classes': len(self.classes),
            'train': len(self.train),
            'test': len(self.test),
            't_min': self.t_min if self.instances else None,
            't_max': self.t_max if self.instances else None,
        }


def _reject_constant(name):
    raise ValueError('non-finite number {}'.format(name))


def _decode(line, path, lineno):
    try:
        text = line.decode('utf-8')
    except UnicodeDecodeError as error:
        raise errors.DatasetFormatError(
            'invalid UTF-8: {}'.format(error), path, lineno)
    try:
        return json.loads(text, parse_constant=_reject_constant)
    except ValueError as error:
        raise errors.DatasetFormatError(
            'invalid JSON: {}'.format(error), path, lineno)


def _parse_header(document, path):
    if not isinstance(document, dict) or document.get('format') != FORMAT:
        raise errors.DatasetFormatError(
            'header must declare "format": "{}"'.format(FORMAT), path, 1)
    name = document.get('name')
    n_vars = document.get('n_vars')
    classes = document.get('classes')
    if not isinstance(name, str):
        raise errors.DatasetFormatError('header needs a string name', path, 1)
    if not isinstance(n_vars, int) or isinstance(n_vars, bool) or n_vars < 1:
        raise errors.DatasetFormatError(
            'n_vars must be a positive integer, got {!r}'.format(n_vars),
            path, 1)
    if (not isinstance(classes, list) or not classes or
            not all(isinstance(c, str) for c in classes)):
        raise errors.DatasetFormatError(
            'classes must be a non-empty list of strings', path, 1)
    if len(set(classes)) != len(classes):
        raise errors.DatasetFormatError('duplicate class in header', path, 1)
    return name, n_vars, tuple(classes)


def _parse_instance(document, n_vars, classes, path, lineno):
    if not isinstance(document, dict):
        raise errors.DatasetFormatError(
            'instance must be a JSON object', path, lineno)
    for key in ('id', 'label', 'split', 'series'):
        if key not in document:
            raise errors.DatasetFormatError(
                'instance is missing {!r}'.format(key), path, lineno)
    if document['split'] not in SPLITS:
        raise errors.DatasetFormatError(
            'split must be one of {}, got {!r}'.format(
                SPLITS, document['split']), path, lineno)
    if document['label'] not in classes:
        raise errors.DatasetFormatError(
            'unknown label {!r}'.format(document['label']), path, lineno)
    series = document['series']
    if not isinstance(series, list) or len(series) != n_vars:
        raise errors.DatasetFormatError(
            'expected {} channels, got {}'.format(
                n_vars, len(series) if isinstance(series, list) else None),
            path, lineno)
    lengths = set()
    for channel in series:
        if not isinstance(channel, list):
            raise errors.DatasetFormatError(
                'channels must be lists of numbers', path, lineno)
        for value in channel:
            if (isinstance(value, bool) or
                    not isinstance(value, (int, float)) or
                    not math.isfinite(value)):
                raise errors.DatasetFormatError(
                    'invalid sample value {!r}'.format(value), path, lineno)
        lengths.add(len(channel))
    if len(lengths) != 1:
        raise errors.DatasetFormatError(
            'channels have different lengths {}'.format(sorted(lengths)),
            path, lineno)
    if 0 in lengths:
        raise errors.DatasetFormatError('series is empty', path, lineno)
    instance = TimeSeriesInstance(str(document['id']), document['label'],
                                  np.asarray(series, dtype=np.float64))
    return document['split'], instance


def load(path):
    """
    Read an RCTS-v1 file.

    :param path: file to read
    :rtype: Dataset
    :raises sprockets.dfr.errors.DatasetFormatError: describing the
        first problem found, with its line number
    :raises OSError: if the file cannot be read

    """
    path = pathlib.Path(path)
    splits = {split: [] for split in SPLITS}
    header = None
    with path.open('rb') as stream:
        for lineno, line in enumerate(stream, start=1):
            if not line.strip():
                continue
            document = _decode(line, path, lineno)
            if header is None:
                if lineno != 1:
                    raise errors.DatasetFormatError(
                        'header must be on the first line', path, lineno)
                header = _parse_header(document, path)
                continue
            split, instance = _parse_instance(document, header[1], header[2],
                                              path, lineno)
            splits[split].append(instance)
    if header is None:
        raise errors.DatasetFormatError('file is empty', path, 1)
    name, n_vars, classes = header
    dataset = Dataset(name, n_vars, classes, splits['train'], splits['test'])
    LOGGER.debug('loaded %s from %s: %d train, %d test', name, path,
                 len(dataset.train), len(dataset.test))
    return dataset


def save(dataset, path):
    """
    Write `dataset` as an RCTS-v1 file.

    Values are written with :func:`repr` precision so that reading the
    file back yields bit-identical arrays.

    :raises sprockets.dfr.errors.EmptySplitError: if either split is
        empty

    """
    for split in SPLITS:
        if not getattr(dataset, split):
            raise errors.EmptySplitError(
                'empty split: dataset {!r} has no {} instances'.format(
                    dataset.name, split))
    header = {'format': FORMAT, 'name': dataset.name,
              'n_vars': dataset.n_vars, 'classes': list(dataset.classes)}
    with pathlib.Path(path).open('w', encoding='utf-8') as stream:
        stream.write(json.dumps(header, allow_nan=False) + '\n')
        for split in SPLITS:
            for instance in getattr(dataset, split):
                document = {'id': instance.id, 'label': instance.label,
                            'split': split,
                            'series': instance.series.tolist()}
                stream.write(json.dumps(document, allow_nan=False) + '\n')


def synth(n_classes=2, n_vars=2, n_train=60, n_test=60, t_range=(20, 40),
          seed=7, noise=0.25):
    """
    Generate a seeded dataset of noisy sinusoids.

    :param int n_classes: number of classes (labels ``c0``, ``c1``, ...)
    :param int n_vars: number of channels
    :param int n_train: number of training instances
    :param int n_test: number of testing instances
    :param tuple t_range: inclusive ``(min, max)`` series length
    :param int seed: seed of :func:`numpy.random.default_rng`
    :param float noise: standard deviation of the additive noise
    :rtype: Dataset

    Instance ``i`` of a split belongs to class ``i % n_classes``.  For
    every instance, in order, the generator draws the length from
    ``integers(t_min, t_max + 1)``, then for each channel a phase from
    ``uniform(0, 2π)`` and ``T`` noise samples from ``normal(0, noise)``.
    Channel ``v`` of class ``c`` oscillates with frequency
    ``0.05 + 0.15 c / max(1, n_classes - 1) + 0.01 v`` cycles per
    sample.  Training instances are drawn before testing instances.

    """
    t_min, t_max = (int(t) for t in t_range)
    for name, value in (('n_classes', n_classes), ('n_vars', n_vars),
                        ('n_train', n_train), ('n_test', n_test),
                        ('t_min', t_min)):
        if int(value) < 1:
            raise errors.ConfigurationError(
                '{} must be at least 1, got {!r}'.format(name, value))
    if t_max < t_min:
        raise errors.ConfigurationError(
            'invalid length range ({}, {})'.format(t_min, t_max))
    if noise < 0:
        raise errors.ConfigurationError('noise must be non-negative')

    rng = np.random.default_rng(seed)
    classes = tuple('c{}'.format(c) for c in range(n_classes))
    spread = 0.15 / max(1, n_classes - 1)

    def make(split, count):
        instances = []
        for i in range(count):
            label = i % n_classes
            length = int(rng.integers(t_min, t_max + 1))
            steps = np.arange(length)
            channels = []
            for v in range(n_vars):
                frequency = 0.05 + spread * label + 0.01 * v
                phase = rng.uniform(0.0, 2.0 * math.pi)
                channels.append(
                    np.sin(2.0 * math.pi * frequency * steps + phase) +
                    rng.normal(0.0, noise, length))
            instances.append(TimeSeriesInstance(
                '{}-{:04d}'.format(split, i), classes[label],
                np.vstack(channels)))
        return instances

    train = make('train', n_train)
    test = make('test', n_test)
    return Dataset('synth-{}c{}v-s{}'.format(n_classes, n_vars, seed),
                   n_vars, classes, train, test)


def convert(directory, name=None):
    """
    Import a directory of CSV files.

    The expected layout is ``<directory>/<split>/<label>/<id>.csv``
    where ``<split>`` is ``train`` or ``test``.  Each CSV file has one
    row per time step and one comma separated column per channel,
    without a header.  Classes are ordered by first appearance in the
    sorted training directory listing, then the testing one.

    :param directory: root of the layout
    :param str|None name: dataset name, defaults to the directory name
    :rtype: Dataset
    :raises sprockets.dfr.errors.DatasetFormatError: on unreadable or
        inconsistent files

    """
    root = pathlib.Path(directory)
    if not root.is_dir():
        raise errors.DatasetFormatError('not a directory', root)
    classes = []
    splits = {split: [] for split in SPLITS}
    n_vars = None
    for split in SPLITS:
        split_dir = root / split
        if not split_dir.is_dir():
            continue
        for label_dir in sorted(p for p in split_dir.iterdir() if p.is_dir()):
            if label_dir.name not in classes:
                classes.append(label_dir.name)
            for csv_file in sorted(label_dir.glob('*.csv')):
                try:
                    values = np.loadtxt(csv_file, delimiter=',', ndmin=2,
                                        dtype=np.float64)
                except ValueError as error:
                    raise errors.DatasetFormatError(str(error), csv_file)
                if n_vars is None:
                    n_vars = values.shape[1]
                elif values.shape[1] != n_vars:
                    raise errors.DatasetFormatError(
                        'expected {} columns, got {}'.format(
                            n_vars, values.shape[1]), csv_file)
                try:
                    splits[split].append(TimeSeriesInstance(
                        csv_file.stem, label_dir.name, values.T))
                except errors.DFRError as error:
                    raise errors.DatasetFormatError(str(error), csv_file)
    if n_vars is None:
        raise errors.DatasetFormatError('no CSV files found', root)
    dataset = Dataset(name or root.name, n_vars, classes, splits['train'],
                      splits['test'])
    LOGGER.info('converted %s: %d train, %d test, %d classes', root,
                len(dataset.train), len(dataset.test), len(classes))
    return dataset
