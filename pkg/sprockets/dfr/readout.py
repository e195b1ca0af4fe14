"""
Ridge regression output layer.

The output layer computes ``y = W_out r′`` with ``r′ = [r, 1]`` and
picks the class with the largest score.  ``W_out`` is fitted in
closed form against one-hot targets.  DRS representations contribute
one sample per time step and are classified by voting.

"""
import dataclasses
import logging
import typing

import numpy as np

from sprockets.dfr import errors, linalg, representations

LOGGER = logging.getLogger(__name__)


@dataclasses.dataclass(frozen=True)
class ReadoutModel:
    """
    Trained output layer.

    .. attribute:: w_out

       Read-only array of shape ``(N_y, N_r + 1)``; the last column
       multiplies the constant term.

    .. attribute:: classes

       Class labels in index order.

    .. attribute:: rep_kind

       The :class:`~sprockets.dfr.representations.RepresentationKind`
       the model was trained on.

    .. attribute:: beta

       Ridge strength used for training.

    """
    w_out: np.ndarray
    classes: typing.Tuple[str, ...]
    rep_kind: representations.RepresentationKind
    beta: float

    def __post_init__(self):
        w_out = linalg.as_matrix(self.w_out, 'W_out').copy()
        classes = tuple(self.classes)
        if len(set(classes)) != len(classes):
            raise errors.ConfigurationError(
                'class labels must be unique, got {!r}'.format(classes))
        if w_out.shape[0] != len(classes):
            raise errors.DimensionError(
                'W_out has {} rows for {} classes'.format(
                    w_out.shape[0], len(classes)))
        w_out.setflags(write=False)
        object.__setattr__(self, 'w_out', w_out)
        object.__setattr__(self, 'classes', classes)
        object.__setattr__(self, 'beta', float(self.beta))

    @property
    def n_features(self):
        """``N_r``, the representation length the model expects."""
        return self.w_out.shape[1] - 1

    def to_dict(self):
        return {
            'classes': list(self.classes),
            'beta': self.beta,
            'representation': self.rep_kind.to_dict(),
            'w_out': self.w_out.tolist(),
        }

    @classmethod
    def from_dict(cls, document):
        return cls(
            np.asarray(document['w_out'], dtype=np.float64),
            tuple(document['classes']),
            representations.RepresentationKind.from_dict(
                document['representation']),
            document['beta'])


def _augment(samples):
    return np.vstack([samples, np.ones((1, samples.shape[1]))])


def train(reps, labels, beta, classes=None):
    """
    Fit ``W_out = Y R′ᵀ (R′ R′ᵀ + βE)⁻¹``.

    :param list reps: training representations of a single kind
    :param list labels: class label of each representation
    :param float beta: non-negative ridge strength
    :param list|None classes: class order; defaults to the order of
        first appearance in `labels`
    :rtype: ReadoutModel
    :raises sprockets.dfr.errors.InsufficientClassesError: if fewer
        than two distinct labels are present
    :raises sprockets.dfr.errors.DimensionError: if the inputs do not
        line up

    The constant coordinate is regularized like every other one.

    """
    reps = list(reps)
    labels = list(labels)
    if len(reps) != len(labels):
        raise errors.DimensionError(
            '{} representations but {} labels'.format(len(reps), len(labels)))
    if not reps:
        raise errors.EmptySplitError('no training representations')
    if classes is None:
        classes = list(dict.fromkeys(labels))
    classes = tuple(classes)
    index = {label: position for position, label in enumerate(classes)}
    unknown = sorted({str(label) for label in labels if label not in index})
    if unknown:
        raise errors.DimensionError(
            'labels {} are not in the class list'.format(unknown))
    if len(set(labels)) < 2:
        raise errors.InsufficientClassesError(
            'training requires at least 2 distinct labels, got {}'.format(
                sorted(set(map(str, labels)))))

    kind = reps[0].kind
    n_features = reps[0].n_features
    for rep in reps:
        if rep.kind != kind or rep.n_features != n_features:
            raise errors.RepresentationMismatch(
                'representations must share one kind and length: '
                '{} of length {} vs {} of length {}'.format(
                    kind.tag.value, n_features, rep.kind.tag.value,
                    rep.n_features))

    blocks = [rep.samples() for rep in reps]
    targets = np.zeros((len(classes), sum(b.shape[1] for b in blocks)))
    column = 0
    for block, label in zip(blocks, labels):
        targets[index[label], column:column + block.shape[1]] = 1.0
        column += block.shape[1]
    samples = _augment(np.hstack(blocks))
    LOGGER.debug('fitting %d x %d readout on %d samples', len(classes),
                 samples.shape[0], samples.shape[1])
    w_out = linalg.ridge_solve(targets, samples, beta)
    return ReadoutModel(w_out, classes, kind, beta)


def _check(model, rep):
    if rep.kind.tag is not model.rep_kind.tag:
        raise errors.RepresentationMismatch(
            'model expects {} but got {}'.format(
                model.rep_kind.tag.value, rep.kind.tag.value))
    if rep.n_features != model.n_features:
        raise errors.DimensionError(
            'model expects {} features but got {}'.format(
                model.n_features, rep.n_features))


def scores(model, rep):
    """
    Return the class scores ``W_out r′``.

    :returns: a vector of length ``N_y``, or an ``(T, N_y)`` array
        for DRS
    :rtype: numpy.ndarray

    """
    _check(model, rep)
    values = np.dot(model.w_out, _augment(rep.samples()))
    return values.T if rep.is_sequence else values[:, 0]


def predict(model, rep):
    """
    Return the label with the largest score.

    Ties go to the lowest class index.

    """
    if rep.is_sequence:
        return predict_drs(model, rep)
    return model.classes[int(np.argmax(scores(model, rep)))]


def vote(model, rep):
    """
    Return the per-class counts of the per-step labels of a DRS.

    :rtype: numpy.ndarray

    """
    if model.rep_kind.tag is not representations.Kind.DRS:
        raise errors.RepresentationMismatch(
            'voting requires a DRS model, got {}'.format(
                model.rep_kind.tag.value))
    if rep.features.shape[0] < 1:
        raise errors.EmptyTrajectoryError('no steps to vote on')
    step_labels = np.argmax(scores(model, rep), axis=1)
    return np.bincount(step_labels, minlength=len(model.classes))


def predict_drs(model, rep):
    """
    Classify every step of a DRS and return the most frequent label.

    Ties go to the lowest class index.

    """
    return model.classes[int(np.argmax(vote(model, rep)))]
