"""
Comparison of measured accuracies against published reference numbers.

Datasets are looked up as ``<data_dir>/<name>.jsonl`` (lower case).
Rows whose dataset file is missing are reported as ``skipped``; rows
that cannot run, for instance because a dataset has more variables
than the mask has entries, are reported as ``error``.

"""
import dataclasses
import logging
import pathlib
import typing

from sprockets.dfr import dataset as dataset_io, errors, pipeline

LOGGER = logging.getLogger(__name__)

TOLERANCE = 3.0
DRS_TOLERANCE = 5.0

DATASETS = ('ARAB', 'AUS', 'CHAR', 'CMU', 'ECG', 'JPVOW', 'KICK', 'LIB',
            'NET', 'UWAV', 'WAF', 'WALK')

SHAPES = {
    # n_vars, n_classes, train, test, t_min, t_max
    'ARAB': (13, 10, 6600, 2200, 4, 93),
    'AUS': (22, 95, 1140, 1425, 45, 136),
    'CHAR': (3, 20, 300, 2558, 109, 205),
    'CMU': (62, 2, 29, 29, 127, 580),
    'ECG': (2, 2, 100, 100, 39, 152),
    'JPVOW': (12, 9, 270, 370, 7, 29),
    'KICK': (62, 2, 16, 10, 274, 841),
    'LIB': (2, 15, 180, 180, 45, 45),
    'NET': (4, 13, 803, 534, 50, 994),
    'UWAV': (3, 8, 200, 427, 315, 315),
    'WAF': (6, 2, 298, 896, 104, 198),
    'WALK': (62, 2, 28, 16, 128, 1918),
}
"""Published dataset shapes."""

KINDS = ('LRS', 'DRS', 'MRS_UPAD', 'MRS_XPAD', 'OMS', 'RMS', 'DPRR')

REPRESENTATION_ACCURACY = {
    3: (44.9, 18.2, 89.3, 89.1, 90.9, 85.4, 88.5),
    4: (52.6, 22.0, 93.0, 92.6, 95.3, 95.0, 96.5),
    5: (54.1, 26.0, 93.5, 93.2, 96.2, 96.0, 97.5),
    6: (60.1, 38.1, 94.3, 94.7, 96.0, 98.0, 98.0),
}
"""Published ARAB accuracy (%) per mask degree, in :data:`KINDS` order."""

METHODS = ('MLP', 'FCN', 'ResNet', 'Encoder', 'MCDCNN', 'Time-CNN',
           'TWIESN', 'DFR_DRS', 'DFR_DPRR')

METHOD_ACCURACY = {
    'ARAB': (96.9, 99.4, 99.6, 98.1, 95.9, 95.8, 85.3, 27.8, 98.0),
    'AUS': (93.3, 97.5, 97.4, 93.8, 85.4, 72.6, 72.4, 34.4, 95.6),
    'CHAR': (96.9, 99.0, 99.0, 97.1, 93.8, 96.0, 92.0, 33.9, 96.2),
    'CMU': (60.0, 100.0, 99.7, 98.3, 51.4, 97.6, 89.3, 93.1, 100.0),
    'ECG': (74.8, 87.2, 86.7, 87.2, 50.0, 84.1, 73.7, 67.0, 88.0),
    'JPVOW': (97.6, 99.3, 99.2, 97.6, 94.4, 95.6, 96.5, 62.4, 97.8),
    'KICK': (61.0, 54.0, 51.0, 61.0, 56.0, 62.0, 67.0, 60.0, 80.0),
    'LIB': (78.0, 96.4, 95.4, 78.3, 65.1, 63.7, 79.4, 30.0, 78.3),
    'NET': (55.0, 89.1, 62.7, 77.7, 63.0, 89.0, 94.5, 92.5, 95.9),
    'UWAV': (90.1, 93.4, 92.6, 90.8, 84.5, 85.9, 75.4, 26.2, 86.2),
    'WAF': (89.4, 98.2, 98.9, 98.6, 65.8, 94.8, 94.9, 90.2, 99.0),
    'WALK': (70.0, 100.0, 100.0, 100.0, 45.0, 100.0, 94.4, 100.0, 100.0),
}
"""Published accuracy (%) per dataset, in :data:`METHODS` order."""


@dataclasses.dataclass
class Row:
    """One published-versus-measured comparison."""
    table: str
    dataset: str
    representation: str
    m: int
    published: float
    status: str = 'ok'
    measured: typing.Optional[float] = None
    message: typing.Optional[str] = None
    baselines: typing.Dict[str, float] = dataclasses.field(
        default_factory=dict)

    @property
    def tolerance(self):
        return DRS_TOLERANCE if self.representation == 'DRS' else TOLERANCE

    @property
    def delta(self):
        if self.measured is None:
            return None
        return round(self.measured - self.published, 2)

    @property
    def within(self):
        if self.measured is None:
            return None
        return abs(self.measured - self.published) <= self.tolerance

    def to_dict(self):
        document = {
            'table': self.table, 'dataset': self.dataset,
            'representation': self.representation, 'm': self.m,
            'published': self.published, 'measured': self.measured,
            'delta': self.delta, 'tolerance': self.tolerance,
            'within': self.within, 'status': self.status,
            'message': self.message,
        }
        if self.baselines:
            document['baselines'] = dict(self.baselines)
        return document


def dataset_path(data_dir, name):
    return pathlib.Path(data_dir) / '{}.jsonl'.format(name.lower())


def check_shape(dataset, name):
    """
    Compare `dataset` with the published shape of `name`.

    :returns: human readable mismatches, empty when the shapes agree
    :rtype: list

    """
    expected = SHAPES[name.upper()]
    summary = dataset.summary()
    actual = (summary['n_vars'], summary['n_classes'], summary['train'],
              summary['test'], summary['t_min'], summary['t_max'])
    labels = ('n_vars', 'n_classes', 'train', 'test', 't_min', 't_max')
    return ['{} is {}, published {}'.format(label, got, want)
            for label, got, want in zip(labels, actual, expected)
            if got != want]


def _load(data_dir, name):
    path = dataset_path(data_dir, name)
    if not path.is_file():
        return None
    dataset = dataset_io.load(path)
    for mismatch in check_shape(dataset, name):
        LOGGER.warning('%s: %s', name, mismatch)
    return dataset


def _measure(row, dataset, config):
    try:
        model = pipeline.fit(dataset, config)
        report = pipeline.evaluate(model, dataset.test, config.jobs)
    except errors.DFRError as error:
        LOGGER.error('%s %s (m=%d) failed: %s', row.dataset,
                     row.representation, row.m, error)
        row.status, row.message = 'error', str(error)
    else:
        row.measured = round(100.0 * report.accuracy, 2)
        LOGGER.info('%s %s (m=%d): measured %.2f, published %.1f',
                    row.dataset, row.representation, row.m, row.measured,
                    row.published)
    return row


def _skip(rows, path):
    for row in rows:
        row.status = 'skipped'
        row.message = 'dataset file {} not found'.format(path)
    LOGGER.warning('skipping %d rows: %s not found', len(rows), path)
    return rows


def representation_rows(data_dir, degrees=(5,), kinds=KINDS, jobs=1):
    """
    Compare every representation on ARAB for each mask degree.

    Uses the ``arab_table2_<kind>`` presets with ``m`` overridden.

    """
    rows = []
    for m in degrees:
        if m not in REPRESENTATION_ACCURACY:
            raise errors.ConfigurationError(
                'no published numbers for m={}'.format(m))
        for kind in kinds:
            kind = kind.upper()
            rows.append(Row('3', 'ARAB', kind, m,
                            REPRESENTATION_ACCURACY[m][KINDS.index(kind)]))
    dataset = _load(data_dir, 'ARAB')
    if dataset is None:
        return _skip(rows, dataset_path(data_dir, 'ARAB'))
    for row in rows:
        config = pipeline.load_config(
            'arab_table2_{}'.format(row.representation.lower()), m=row.m,
            jobs=jobs)
        _measure(row, dataset, config)
    return rows


def method_rows(data_dir, datasets=DATASETS, kinds=('DRS', 'DPRR'), jobs=1):
    """Compare DFR accuracies with the per-dataset presets."""
    rows = []
    for name in datasets:
        name = name.upper()
        if name not in METHOD_ACCURACY:
            raise errors.ConfigurationError(
                'unknown dataset {!r}, expected one of {}'.format(
                    name, ', '.join(DATASETS)))
        published = dict(zip(METHODS, METHOD_ACCURACY[name]))
        baselines = {k: v for k, v in published.items()
                     if not k.startswith('DFR_')}
        dataset_rows = [
            Row('6', name, kind.upper(), 5,
                published['DFR_{}'.format(kind.upper())],
                baselines=baselines)
            for kind in kinds]
        dataset = _load(data_dir, name)
        if dataset is None:
            rows.extend(_skip(dataset_rows, dataset_path(data_dir, name)))
            continue
        for row in dataset_rows:
            config = pipeline.load_config(
                '{}_{}'.format(name.lower(), row.representation.lower()),
                jobs=jobs)
            rows.append(_measure(row, dataset, config))
    return rows


def ordering_holds(rows, m=5):
    """
    Check the published ranking of the representations at degree `m`.

    DPRR, OMS and RMS are at least as good as both MRS variants, both
    MRS variants beat LRS, and LRS beats DRS.  Returns ``None`` if a
    representation was not measured.

    """
    measured = {r.representation: r.measured for r in rows
                if r.table == '3' and r.m == m}
    if any(measured.get(k) is None for k in KINDS):
        return None
    mrs = (measured['MRS_UPAD'], measured['MRS_XPAD'])
    return (all(measured[k] >= v for k in ('DPRR', 'OMS', 'RMS')
                for v in mrs) and
            all(v >= measured['LRS'] for v in mrs) and
            measured['LRS'] >= measured['DRS'])


def _cell(value):
    return '-' if value is None else '{:.1f}'.format(value)


def to_markdown(rows):
    """Render comparison rows as a markdown table."""
    baseline_names = [m for m in METHODS if not m.startswith('DFR_')]
    show_baselines = any(r.baselines for r in rows)
    header = ['table', 'dataset', 'representation', 'm', 'published',
              'measured', 'delta', 'status']
    if show_baselines:
        header.extend(baseline_names)
    lines = ['| ' + ' | '.join(header) + ' |',
             '|' + '---|' * len(header)]
    for row in rows:
        cells = [row.table, row.dataset, row.representation, str(row.m),
                 _cell(row.published), _cell(row.measured),
                 '-' if row.delta is None else '{:+.1f}'.format(row.delta),
                 row.status if row.within is not False else 'outside']
        if show_baselines:
            cells.extend(_cell(row.baselines.get(n)) for n in baseline_names)
        lines.append('| ' + ' | '.join(cells) + ' |')
    return '\n'.join(lines) + '\n'


def report(rows):
    """JSON document of a comparison run."""
    document = {'rows': [row.to_dict() for row in rows]}
    degrees = sorted({r.m for r in rows if r.table == '3'})
    if degrees:
        document['ordering'] = {str(m): ordering_holds(rows, m)
                                for m in degrees}
    return document
