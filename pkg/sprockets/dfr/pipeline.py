"""
Experiment orchestration.

- :class:`ExperimentConfig`: hyperparameters of one experiment
- :class:`Model`: trained readout bundled with everything needed to
  reproduce its predictions
- :func:`fit` / :func:`evaluate`: train and score a model
- :func:`grid_search`: select ``γ`` and ``η`` on validation data
- :func:`save_model` / :func:`load_model`: JSON model bundles

"""
import concurrent.futures
import dataclasses
import itertools
import json
import logging
import math
import os
import pathlib
import time
import typing

import numpy as np
from sklearn import metrics, model_selection, preprocessing

from sprockets.dfr import (dataset as dataset_io, errors, masking, readout,
                          representations, reservoir)

MODEL_FORMAT = 'dfrmodel-v1'
DEFAULT_GRID = (0.03, 0.1, 0.3, 1.0)
DEFAULT_HOLDOUT = 0.2
DEFAULT_SEED = 20190701
PRESET_DIR = pathlib.Path(__file__).parent / 'presets'

LOGGER = logging.getLogger(__name__)


def _positive(name, value):
    value = float(value)
    if not (math.isfinite(value) and value > 0.0):
        raise errors.ConfigurationError(
            '{} must be a positive real, got {!r}'.format(name, value))
    return value


def _non_negative(name, value):
    value = float(value)
    if not (math.isfinite(value) and value >= 0.0):
        raise errors.ConfigurationError(
            '{} must be a non-negative real, got {!r}'.format(name, value))
    return value


@dataclasses.dataclass(frozen=True)
class ExperimentConfig:
    """
    Hyperparameters of one experiment.

    :param str representation: representation kind, e.g. ``"DPRR"``
    :param float gamma: input gain ``γ``
    :param float eta: feedback gain ``η``
    :param float theta: virtual node interval ``θ``
    :param float beta: ridge strength of the output layer
    :param float lam: ridge strength ``λ`` of OMS and RMS; ``lambda``
        in JSON documents
    :param int m: degree of the mask polynomial
    :param tuple|None taps: polynomial taps, the default polynomial of
        degree `m` when omitted
    :param tuple|None init: LFSR initial value, ``(0, ..., 0, 1)`` when
        omitted
    :param int p: nonlinearity exponent
    :param int|None t_max: MRS length, the longest training series when
        omitted
    :param bool normalize: z-score the channels with statistics of the
        training split
    :param int jobs: worker processes used for reservoir runs; never
        serialized

    """
    representation: str = 'DPRR'
    gamma: float = 0.03
    eta: float = 1.0
    theta: float = 0.25
    beta: float = 0.01
    lam: float = 1.0
    m: int = 5
    taps: typing.Optional[typing.Tuple[int, ...]] = None
    init: typing.Optional[typing.Tuple[int, ...]] = None
    p: int = 2
    t_max: typing.Optional[int] = None
    normalize: bool = False
    jobs: int = dataclasses.field(default=1, compare=False)

    def __post_init__(self):
        set_ = object.__setattr__
        set_(self, 'representation',
             representations.Kind.parse(self.representation).value)
        set_(self, 'gamma', _positive('gamma', self.gamma))
        set_(self, 'eta', _positive('eta', self.eta))
        set_(self, 'theta', _positive('theta', self.theta))
        set_(self, 'beta', _non_negative('beta', self.beta))
        set_(self, 'lam', _non_negative('lambda', self.lam))
        if not masking.MIN_DEGREE <= int(self.m) <= masking.MAX_DEGREE:
            raise errors.ConfigurationError(
                'm must be between {} and {}, got {!r}'.format(
                    masking.MIN_DEGREE, masking.MAX_DEGREE, self.m))
        set_(self, 'm', int(self.m))
        if self.taps is not None:
            set_(self, 'taps', masking.PrimitivePolynomial(
                self.m, tuple(self.taps)).taps)
        if self.init is not None:
            init = masking.parse_bits(self.init)
            if len(init) != self.m:
                raise errors.ConfigurationError(
                    'init must have {} bits, got {!r}'.format(
                        self.m, self.init))
            set_(self, 'init', init)
        if int(self.p) != self.p or self.p < 1:
            raise errors.ConfigurationError(
                'p must be an integer >= 1, got {!r}'.format(self.p))
        set_(self, 'p', int(self.p))
        if self.t_max is not None:
            if int(self.t_max) != self.t_max or self.t_max < 1:
                raise errors.ConfigurationError(
                    't_max must be a positive integer, got {!r}'.format(
                        self.t_max))
            set_(self, 't_max', int(self.t_max))
        set_(self, 'normalize', bool(self.normalize))
        if int(self.jobs) != self.jobs or self.jobs < 1:
            raise errors.ConfigurationError(
                'jobs must be a positive integer, got {!r}'.format(self.jobs))
        set_(self, 'jobs', int(self.jobs))

    @property
    def kind(self):
        return representations.Kind(self.representation)

    def polynomial(self):
        """The configured mask polynomial."""
        if self.taps is None:
            return masking.default_polynomial(self.m)
        return masking.PrimitivePolynomial(self.m, self.taps)

    def initial_value(self):
        if self.init is None:
            return masking.default_init(self.m)
        return self.init

    def rep_kind(self, t_max=None):
        """
        Build the :class:`~sprockets.dfr.representations.RepresentationKind`.

        :param int|None t_max: MRS length used when the configuration
            does not set one

        """
        return representations.RepresentationKind(
            self.kind, t_max=self.t_max or t_max, lam=self.lam)

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)

    def to_dict(self):
        """JSON document of the configuration, without ``jobs``."""
        return {
            'representation': self.representation,
            'gamma': self.gamma,
            'eta': self.eta,
            'theta': self.theta,
            'beta': self.beta,
            'lambda': self.lam,
            'm': self.m,
            'taps': None if self.taps is None else list(self.taps),
            'init': None if self.init is None else list(self.init),
            'p': self.p,
            't_max': self.t_max,
            'normalize': self.normalize,
        }

    @classmethod
    def from_dict(cls, document, **overrides):
        """
        Create a configuration from a JSON document.

        :raises sprockets.dfr.errors.ConfigurationError: on unknown keys
            or invalid values

        """
        if not isinstance(document, dict):
            raise errors.ConfigurationError(
                'configuration must be a JSON object')
        kwargs = dict(document)
        if 'lambda' in kwargs:
            kwargs['lam'] = kwargs.pop('lambda')
        fields = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(kwargs) - fields)
        if unknown:
            raise errors.ConfigurationError(
                'unknown configuration keys: {}'.format(', '.join(unknown)))
        for key in ('taps', 'init'):
            if isinstance(kwargs.get(key), list):
                kwargs[key] = tuple(kwargs[key])
        kwargs.update(overrides)
        try:
            return cls(**kwargs)
        except (TypeError, ValueError) as error:
            if isinstance(error, errors.DFRError):
                raise
            raise errors.ConfigurationError(str(error))


def preset_names():
    """Names of the bundled configuration presets."""
    return sorted(p.stem for p in PRESET_DIR.glob('*.json'))


def _resolve_config_path(name):
    path = pathlib.Path(name)
    if path.is_file():
        return path
    stem = path.name[:-5] if path.name.endswith('.json') else path.name
    preset = PRESET_DIR / '{}.json'.format(stem)
    if preset.is_file():
        return preset
    raise errors.ConfigurationError(
        'no configuration file or preset named {!r}'.format(str(name)))


def load_config(name, **overrides):
    """
    Read an :class:`ExperimentConfig` from a file or a bundled preset.

    :param str name: a path, or a preset name such as ``arab_dprr``
        (``arab_dprr.json`` and ``presets/arab_dprr.json`` work too)
    :param overrides: field values replacing those of the file

    """
    path = _resolve_config_path(name)
    try:
        document = json.loads(path.read_text(encoding='utf-8'))
    except ValueError as error:
        raise errors.ConfigurationError(
            '{}: invalid JSON: {}'.format(path, error))
    LOGGER.debug('loaded configuration from %s', path)
    return ExperimentConfig.from_dict(document, **overrides)


@dataclasses.dataclass(frozen=True)
class Normalizer:
    """
    Per-channel z-score ``(u - mean) / scale``.

    Channels without variance keep a scale of one.

    """
    mean: typing.Tuple[float, ...]
    scale: typing.Tuple[float, ...]

    @classmethod
    def fit(cls, instances):
        """Fit the statistics over every time step of `instances`."""
        samples = np.hstack([i.series for i in instances]).T
        scaler = preprocessing.StandardScaler().fit(samples)
        return cls(tuple(float(v) for v in scaler.mean_),
                   tuple(float(v) for v in scaler.scale_))

    def apply(self, series):
        values = reservoir.as_series(series)
        if values.shape[0] != len(self.mean):
            raise errors.DimensionError(
                'series has {} channels but the normalizer {}'.format(
                    values.shape[0], len(self.mean)))
        mean = np.asarray(self.mean)[:, np.newaxis]
        scale = np.asarray(self.scale)[:, np.newaxis]
        return (values - mean) / scale

    def to_dict(self):
        return {'mean': list(self.mean), 'scale': list(self.scale)}

    @classmethod
    def from_dict(cls, document):
        return cls(tuple(document['mean']), tuple(document['scale']))


@dataclasses.dataclass(frozen=True)
class Featurizer:
    """Picklable series-to-representation function for worker processes."""
    kind: representations.RepresentationKind
    mask: masking.MaskMatrix
    params: reservoir.DfrParams
    normalizer: typing.Optional[Normalizer] = None

    def __call__(self, series):
        values = reservoir.as_series(series)
        if self.normalizer is not None:
            values = self.normalizer.apply(values)
        return representations.represent(self.kind, values, self.mask,
                                         self.params)


def parallel_map(function, items, jobs=1):
    """
    Apply `function` to `items` in order, possibly in worker processes.

    Results are returned in input order so that the outcome does not
    depend on `jobs`.

    """
    items = list(items)
    if jobs <= 1 or len(items) < 2:
        return [function(item) for item in items]
    workers = min(jobs, len(items))
    chunksize = max(1, len(items) // (workers * 4))
    with concurrent.futures.ProcessPoolExecutor(workers) as executor:
        return list(executor.map(function, items, chunksize=chunksize))


@dataclasses.dataclass(frozen=True)
class Model:
    """
    A trained readout with its mask, reservoir, and configuration.

    .. attribute:: t_max

       Length limit of inference series for MRS models, the longest
       training series otherwise.

    """
    readout: readout.ReadoutModel
    mask: masking.MaskMatrix
    params: reservoir.DfrParams
    config: ExperimentConfig
    t_max: int
    normalizer: typing.Optional[Normalizer] = None

    @property
    def classes(self):
        return self.readout.classes

    @property
    def n_vars(self):
        return self.mask.n_vars

    @property
    def featurizer(self):
        return Featurizer(self.readout.rep_kind, self.mask, self.params,
                          self.normalizer)

    def represent(self, series):
        return self.featurizer(series)

    def predict(self, series):
        """Return the predicted label of one series."""
        return readout.predict(self.readout, self.represent(series))

    def to_dict(self):
        return {
            'format': MODEL_FORMAT,
            'config': self.config.to_dict(),
            'params': self.params.to_dict(),
            'mask': self.mask.to_dict(),
            'readout': self.readout.to_dict(),
            't_max': self.t_max,
            'normalizer': (None if self.normalizer is None
                           else self.normalizer.to_dict()),
        }

    @classmethod
    def from_dict(cls, document):
        if not isinstance(document, dict):
            raise errors.ModelFormatError('model bundle must be an object')
        if document.get('format') != MODEL_FORMAT:
            raise errors.ModelFormatError(
                'unsupported model format {!r}, expected {!r}'.format(
                    document.get('format'), MODEL_FORMAT))
        try:
            params = reservoir.DfrParams(**document['params'])
            mask = masking.MaskMatrix.from_dict(document['mask'])
            model_readout = readout.ReadoutModel.from_dict(
                document['readout'])
            config = ExperimentConfig.from_dict(document['config'])
            normalizer = (None if document['normalizer'] is None
                          else Normalizer.from_dict(document['normalizer']))
            model = cls(model_readout, mask, params, config,
                        int(document['t_max']), normalizer)
        except (KeyError, TypeError, ValueError) as error:
            raise errors.ModelFormatError(
                'malformed model bundle: {}'.format(error))
        expected = model_readout.rep_kind.n_features(mask.n_nodes,
                                                     mask.n_vars)
        if mask.n_nodes != params.n_nodes or \
                model_readout.n_features != expected:
            raise errors.ModelFormatError(
                'model bundle is inconsistent: {} nodes, {} mask rows, '
                '{} readout features'.format(params.n_nodes, mask.n_nodes,
                                             model_readout.n_features))
        return model


def fit(dataset, config):
    """
    Train a model on the training split of `dataset`.

    :param sprockets.dfr.dataset.Dataset dataset: only ``train``,
        ``classes``, ``n_vars`` and ``name`` are read
    :param ExperimentConfig config: the experiment
    :rtype: Model
    :raises sprockets.dfr.errors.EmptySplitError: if there are no
        training instances

    The result depends only on the training split and the
    configuration.

    """
    train = dataset.train
    if not train:
        raise errors.EmptySplitError(
            'empty split: dataset {!r} has no training instances'.format(
                dataset.name))
    poly = config.polynomial()
    mask = masking.mask_matrix(poly, config.initial_value(), dataset.n_vars)
    params = reservoir.DfrParams(config.gamma, config.eta, config.theta,
                                 poly.n_nodes, config.p)
    t_max = config.t_max or max(i.length for i in train)
    normalizer = Normalizer.fit(train) if config.normalize else None
    featurizer = Featurizer(config.rep_kind(t_max), mask, params, normalizer)

    LOGGER.info('fitting %s on %s: %d instances, N_x=%d, N_u=%d',
                config.representation, dataset.name, len(train),
                params.n_nodes, dataset.n_vars)
    reps = parallel_map(featurizer, [i.series for i in train], config.jobs)
    model_readout = readout.train(reps, [i.label for i in train],
                                  config.beta, classes=dataset.classes)
    return Model(model_readout, mask, params, config, t_max, normalizer)


@dataclasses.dataclass(frozen=True)
class EvalReport:
    """
    Classification results over a set of instances.

    ``confusion[i][j]`` counts instances of class ``i`` predicted as
    class ``j``.  ``wall_time`` is informational and is not part of
    :meth:`to_dict`.

    """
    accuracy: float
    classes: typing.Tuple[str, ...]
    confusion: typing.Tuple[typing.Tuple[int, ...], ...]
    recall: typing.Dict[str, typing.Optional[float]]
    n_instances: int
    config: typing.Dict[str, typing.Any]
    predictions: typing.Optional[typing.Tuple[dict, ...]] = None
    wall_time: float = dataclasses.field(default=0.0, compare=False)

    def to_dict(self):
        document = {
            'accuracy': self.accuracy,
            'classes': list(self.classes),
            'confusion': [list(row) for row in self.confusion],
            'recall': dict(self.recall),
            'n_instances': self.n_instances,
            'config': dict(self.config),
        }
        if self.predictions is not None:
            document['predictions'] = [dict(p) for p in self.predictions]
        return document

    def confusion_csv(self):
        """The confusion matrix as CSV with a header row and column."""
        lines = [','.join(['true\\predicted'] + list(self.classes))]
        for label, row in zip(self.classes, self.confusion):
            lines.append(','.join([label] + [str(v) for v in row]))
        return '\n'.join(lines) + '\n'


def predict_all(model, instances, jobs=1):
    """Predict the label of every instance, in order."""
    reps = parallel_map(model.featurizer, [i.series for i in instances],
                        jobs)
    return [readout.predict(model.readout, rep) for rep in reps]


def evaluate(model, instances, jobs=1, verbose=False):
    """
    Score `model` on `instances`.

    :param Model model: the trained model
    :param instances: usually ``dataset.test``
    :param int jobs: worker processes for the reservoir runs
    :param bool verbose: include per-instance predictions
    :rtype: EvalReport
    :raises sprockets.dfr.errors.DimensionError: if an instance has the
        wrong number of channels or a label the model does not know

    """
    instances = list(instances)
    if not instances:
        raise errors.EmptySplitError('empty split: nothing to evaluate')
    unknown = sorted({i.label for i in instances} - set(model.classes))
    if unknown:
        raise errors.DimensionError(
            'labels {} are not known to the model'.format(unknown))

    started = time.monotonic()
    predicted = predict_all(model, instances, jobs)
    truth = [i.label for i in instances]
    confusion = metrics.confusion_matrix(truth, predicted,
                                         labels=list(model.classes))
    correct = int(np.trace(confusion))
    recall = {}
    for label, row in zip(model.classes, confusion):
        total = int(row.sum())
        recall[label] = None if total == 0 else int(
            row[model.classes.index(label)]) / total
    predictions = None
    if verbose:
        predictions = tuple(
            {'id': i.id, 'label': i.label, 'predicted': p}
            for i, p in zip(instances, predicted))
    wall_time = time.monotonic() - started

    report = EvalReport(
        accuracy=correct / len(instances),
        classes=model.classes,
        confusion=tuple(tuple(int(v) for v in row) for row in confusion),
        recall=recall,
        n_instances=len(instances),
        config=model.config.to_dict(),
        predictions=predictions,
        wall_time=wall_time)
    LOGGER.info('evaluated %d instances: accuracy %.4f in %.2fs',
                len(instances), report.accuracy, wall_time)
    return report


@dataclasses.dataclass(frozen=True)
class GridResult:
    """
    Outcome of :func:`grid_search`.

    .. attribute:: scores

       One ``{"gamma", "eta", "score"}`` row per grid point, in
       evaluation order (``γ`` outer, ``η`` inner).

    """
    best: ExperimentConfig
    best_score: float
    scores: typing.Tuple[dict, ...]

    def to_dict(self):
        return {'best': self.best.to_dict(), 'best_score': self.best_score,
                'scores': [dict(row) for row in self.scores]}


def _validation_splits(labels, holdout, folds, seed):
    indices = np.arange(len(labels))
    if folds is not None:
        try:
            splitter = model_selection.StratifiedKFold(
                n_splits=folds, shuffle=True, random_state=seed)
            return [(list(a), list(b))
                    for a, b in splitter.split(indices, labels)]
        except ValueError as error:
            LOGGER.warning('stratified folds unavailable (%s), using '
                           'unstratified folds', error)
            splitter = model_selection.KFold(
                n_splits=folds, shuffle=True, random_state=seed)
            return [(list(a), list(b)) for a, b in splitter.split(indices)]
    try:
        train, valid = model_selection.train_test_split(
            indices, test_size=holdout, random_state=seed, stratify=labels)
    except ValueError as error:
        LOGGER.warning('stratified holdout unavailable (%s), using an '
                       'unstratified split', error)
        train, valid = model_selection.train_test_split(
            indices, test_size=holdout, random_state=seed)
    return [(sorted(train), sorted(valid))]


def _score(dataset, config, splits):
    """Mean validation accuracy of `config` over `splits`."""
    train = dataset.train
    accuracies = []
    for train_indices, valid_indices in splits:
        subset = dataset_io.Dataset(
            dataset.name, dataset.n_vars, dataset.classes,
            [train[i] for i in train_indices])
        model = fit(subset, config)
        report = evaluate(model, [train[i] for i in valid_indices],
                          config.jobs)
        accuracies.append(report.accuracy)
    return float(np.mean(accuracies))


def grid_search(dataset, config, gammas=DEFAULT_GRID, etas=DEFAULT_GRID,
                holdout=DEFAULT_HOLDOUT, folds=None, seed=DEFAULT_SEED):
    """
    Select ``γ`` and ``η`` by exhaustive search on validation data.

    :param sprockets.dfr.dataset.Dataset dataset: only the training
        split is read; validation data is carved out of it
    :param ExperimentConfig config: the other hyperparameters
    :param gammas: candidate input gains
    :param etas: candidate feedback gains
    :param float holdout: validation fraction when `folds` is omitted
    :param int|None folds: number of stratified folds
    :param int seed: seed of the validation split
    :rtype: GridResult
    :raises sprockets.dfr.errors.ConfigurationError: on an empty grid
        or an invalid validation scheme

    Ties go to the point evaluated first.

    """
    gammas, etas = list(gammas), list(etas)
    if not gammas or not etas:
        raise errors.ConfigurationError('grid must not be empty')
    if folds is not None:
        if int(folds) != folds or folds < 2:
            raise errors.ConfigurationError(
                'folds must be an integer >= 2, got {!r}'.format(folds))
    elif not 0.0 < holdout < 1.0:
        raise errors.ConfigurationError(
            'holdout fraction must be in (0, 1), got {!r}'.format(holdout))
    train = dataset.train
    if not train:
        raise errors.EmptySplitError(
            'empty split: dataset {!r} has no training instances'.format(
                dataset.name))

    if config.kind in (representations.Kind.MRS_UPAD,
                       representations.Kind.MRS_XPAD) and \
            config.t_max is None:
        config = config.replace(t_max=max(i.length for i in train))
    splits = _validation_splits([i.label for i in train], holdout, folds,
                                seed)

    rows = []
    best, best_score = None, -1.0
    for gamma, eta in itertools.product(gammas, etas):
        candidate = config.replace(gamma=gamma, eta=eta)
        score = _score(dataset, candidate, splits)
        LOGGER.info('gamma=%s eta=%s: validation accuracy %.4f', gamma, eta,
                    score)
        rows.append({'gamma': candidate.gamma, 'eta': candidate.eta,
                     'score': score})
        if score > best_score:
            best, best_score = candidate, score
    return GridResult(best, best_score, tuple(rows))


def dumps_model(model):
    """Serialize `model` to the canonical bundle text."""
    return json.dumps(model.to_dict(), sort_keys=True, allow_nan=False)


def save_model(model, path):
    """Write `model` as a JSON bundle."""
    pathlib.Path(path).write_text(dumps_model(model) + '\n',
                                  encoding='utf-8')


def load_model(path):
    """
    Read a model bundle written by :func:`save_model`.

    :rtype: Model
    :raises sprockets.dfr.errors.ModelFormatError: if the file is not a
        valid bundle

    """
    text = pathlib.Path(path).read_text(encoding='utf-8')
    try:
        document = json.loads(text)
    except ValueError as error:
        raise errors.ModelFormatError(
            '{}: invalid JSON: {}'.format(path, error))
    return Model.from_dict(document)


def default_jobs():
    """Number of worker processes to use by default."""
    return os.cpu_count() or 1
