"""
Fixed-length reservoir representations.

A trajectory has ``T · N_x`` features and ``T`` varies between
instances, so it is summarized before it reaches the output layer:

- LRS: the last state
- DRS: every state, classified separately and voted
- MRS: all states up to ``T_max``, zero padded on the input (upad) or
  on the states (xpad)
- OMS / RMS: ridge regressed one-step-ahead predictors of the input /
  of the state
- DPRR: accumulated products of each state with the previous
  augmented state

"""
import dataclasses
import enum
import typing

import numpy as np

from sprockets.dfr import errors, linalg, reservoir


class Kind(str, enum.Enum):
    LRS = 'LRS'
    DRS = 'DRS'
    MRS_UPAD = 'MRS_UPAD'
    MRS_XPAD = 'MRS_XPAD'
    OMS = 'OMS'
    RMS = 'RMS'
    DPRR = 'DPRR'

    @classmethod
    def parse(cls, value):
        try:
            return cls(str(getattr(value, 'value', value)).upper())
        except ValueError:
            raise errors.ConfigurationError(
                'unknown representation {!r}, expected one of {}'.format(
                    value, ', '.join(k.value for k in cls)))


_MRS_KINDS = (Kind.MRS_UPAD, Kind.MRS_XPAD)
_RIDGE_KINDS = (Kind.OMS, Kind.RMS)


@dataclasses.dataclass(frozen=True)
class RepresentationKind:
    """
    Representation tag with its parameters.

    :param Kind tag: which representation
    :param int|None t_max: maximal series length, MRS kinds only
    :param float|None lam: ridge strength ``λ``, OMS and RMS only

    """
    tag: Kind
    t_max: typing.Optional[int] = None
    lam: typing.Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, 'tag', Kind.parse(self.tag))
        if self.tag in _MRS_KINDS:
            if self.t_max is None or int(self.t_max) < 1:
                raise errors.ConfigurationError(
                    '{} requires t_max >= 1, got {!r}'.format(
                        self.tag.value, self.t_max))
            object.__setattr__(self, 't_max', int(self.t_max))
        else:
            object.__setattr__(self, 't_max', None)
        if self.tag in _RIDGE_KINDS:
            if self.lam is None or not float(self.lam) >= 0.0:
                raise errors.ConfigurationError(
                    '{} requires lambda >= 0, got {!r}'.format(
                        self.tag.value, self.lam))
            object.__setattr__(self, 'lam', float(self.lam))
        else:
            object.__setattr__(self, 'lam', None)

    def n_features(self, n_nodes, n_vars):
        """
        Length ``N_r`` of a representation of this kind.

        For DRS this is the length of each per-step vector.

        """
        if self.tag in (Kind.LRS, Kind.DRS):
            return n_nodes
        if self.tag in _MRS_KINDS:
            return self.t_max * n_nodes
        if self.tag is Kind.OMS:
            return n_vars * (n_nodes + 1)
        return n_nodes * (n_nodes + 1)

    def to_dict(self):
        return {'kind': self.tag.value, 't_max': self.t_max,
                'lambda': self.lam}

    @classmethod
    def from_dict(cls, document):
        return cls(document['kind'], document.get('t_max'),
                   document.get('lambda'))


@dataclasses.dataclass(frozen=True)
class Representation:
    """
    A reservoir representation.

    .. attribute:: features

       Read-only vector of length ``N_r``; for DRS an array of shape
       ``(T, N_x)`` holding one vector per step.

    """
    kind: RepresentationKind
    features: np.ndarray

    def __post_init__(self):
        features = np.array(self.features, dtype=np.float64)
        expected = 2 if self.kind.tag is Kind.DRS else 1
        if features.ndim != expected:
            raise errors.DimensionError(
                '{} features must be {}-D, got shape {}'.format(
                    self.kind.tag.value, expected, features.shape))
        if not np.all(np.isfinite(features)):
            raise errors.NonFiniteError(
                '{} representation has non-finite features'.format(
                    self.kind.tag.value))
        features.setflags(write=False)
        object.__setattr__(self, 'features', features)

    @property
    def is_sequence(self):
        return self.kind.tag is Kind.DRS

    @property
    def n_features(self):
        """``N_r``, the per-step length for DRS."""
        return self.features.shape[-1]

    def samples(self):
        """Feature vectors as columns: ``(N_r, 1)`` or ``(N_x, T)``."""
        if self.is_sequence:
            return self.features.T
        return self.features[:, np.newaxis]


def _require_steps(traj):
    if traj.length < 1:
        raise errors.EmptyTrajectoryError(
            'trajectory has no input steps')


def _augmented(states):
    # x'(k) = [x(k), 1] as columns
    return np.vstack([states.T, np.ones((1, states.shape[0]))])


def lrs(traj):
    """Last reservoir state ``x(T)``."""
    _require_steps(traj)
    return Representation(RepresentationKind(Kind.LRS), traj.states[-1])


def drs(traj):
    """Every reservoir state ``x(1), ..., x(T)``."""
    _require_steps(traj)
    return Representation(RepresentationKind(Kind.DRS), traj.states[1:])


def _check_t_max(length, t_max):
    if length > t_max:
        raise errors.SeriesTooLongError(
            'series exceeds T_max: {} steps, T_max is {}'.format(
                length, t_max))


def mrs_xpad(traj, t_max):
    """
    States ``x(1..T)`` followed by ``t_max - T`` zero states, time-major.

    :raises sprockets.dfr.errors.SeriesTooLongError: if ``T > t_max``

    """
    _require_steps(traj)
    _check_t_max(traj.length, t_max)
    features = np.zeros(t_max * traj.n_nodes)
    features[:traj.length * traj.n_nodes] = linalg.flatten(traj.states[1:])
    return Representation(RepresentationKind(Kind.MRS_XPAD, t_max=t_max),
                          features)


def mrs_upad(series, mask, params, t_max):
    """
    Run the reservoir on the input padded with zero vectors to `t_max`.

    Unlike :func:`mrs_xpad` the trailing states keep evolving.

    :raises sprockets.dfr.errors.SeriesTooLongError: if ``T > t_max``

    """
    values = reservoir.as_series(series)
    if values.shape[1] < 1:
        raise errors.EmptyTrajectoryError('series has no input steps')
    _check_t_max(values.shape[1], t_max)
    padded = np.zeros((values.shape[0], t_max))
    padded[:, :values.shape[1]] = values
    traj = reservoir.run(padded, mask, params)
    return Representation(RepresentationKind(Kind.MRS_UPAD, t_max=t_max),
                          linalg.flatten(traj.states[1:]))


def oms(series, traj, lam):
    """
    Output model space: ``vec(U⁺ X′ᵀ (X′ X′ᵀ + λE)⁻¹)``.

    ``U⁺`` holds the inputs ``u(1..T)`` and ``X′`` the augmented states
    ``x′(0..T−1)``.

    """
    _require_steps(traj)
    values = reservoir.as_series(series)
    if values.shape[1] != traj.length:
        raise errors.DimensionError(
            'series has {} steps but the trajectory has {}'.format(
                values.shape[1], traj.length))
    fitted = linalg.ridge_solve(values, _augmented(traj.states[:-1]), lam)
    return Representation(RepresentationKind(Kind.OMS, lam=lam),
                          linalg.flatten(fitted))


def rms(traj, lam):
    """
    Reservoir model space: ``vec(X⁺ X′ᵀ (X′ X′ᵀ + λE)⁻¹)``.

    ``X⁺`` holds the states ``x(1..T)``.

    """
    _require_steps(traj)
    fitted = linalg.ridge_solve(traj.states[1:].T,
                                _augmented(traj.states[:-1]), lam)
    return Representation(RepresentationKind(Kind.RMS, lam=lam),
                          linalg.flatten(fitted))


class DprrAccumulator:
    """
    Running sum of ``x(k) x′(k−1)ᵀ``.

    Feed the states in order with :meth:`update`; the previous state
    starts as the zero initial state.

    """

    def __init__(self, n_nodes):
        self.n_nodes = n_nodes
        self.steps = 0
        self._sum = np.zeros((n_nodes, n_nodes + 1))
        self._previous = np.zeros(n_nodes + 1)
        self._previous[-1] = 1.0

    def update(self, state):
        state = np.asarray(state, dtype=np.float64)
        if state.shape != (self.n_nodes,):
            raise errors.DimensionError(
                'state has shape {}, expected ({},)'.format(
                    state.shape, self.n_nodes))
        self._sum += np.outer(state, self._previous)
        self._previous[:-1] = state
        self.steps += 1

    def representation(self):
        if self.steps < 1:
            raise errors.EmptyTrajectoryError(
                'no states were accumulated')
        return Representation(RepresentationKind(Kind.DPRR),
                              linalg.flatten(self._sum))


def dprr(traj):
    """
    Dot-product-based representation ``vec(Σₖ x(k) x′(k−1)ᵀ)``.

    Entry ``(i, j)`` for ``j ≤ N_x`` is ``Σₖ x(k)ᵢ x(k−1)ⱼ``; the last
    column holds ``Σₖ x(k)ᵢ``.

    """
    _require_steps(traj)
    accumulator = DprrAccumulator(traj.n_nodes)
    for state in traj.states[1:]:
        accumulator.update(state)
    return accumulator.representation()


def unshifted_gram(traj):
    """
    Return ``Σₖ x(k) x(k)ᵀ`` over ``k = 1..T``.

    Unlike the shifted DPRR matrix this one is symmetric.

    """
    _require_steps(traj)
    total = np.zeros((traj.n_nodes, traj.n_nodes))
    for state in traj.states[1:]:
        total += np.outer(state, state)
    return total


def represent(kind, series, mask, params):
    """
    Run the reservoir over `series` and build a representation.

    :param RepresentationKind kind: what to build
    :param series: a :class:`~sprockets.dfr.dataset.TimeSeriesInstance`
        or an array of shape ``(N_u, T)``
    :param sprockets.dfr.masking.MaskMatrix mask: the input mask
    :param sprockets.dfr.reservoir.DfrParams params: the reservoir
    :rtype: Representation

    DPRR is accumulated while the reservoir runs, so no trajectory is
    kept for it.

    """
    tag = kind.tag
    if tag is Kind.MRS_UPAD:
        return mrs_upad(series, mask, params, kind.t_max)
    if tag is Kind.DPRR:
        accumulator = DprrAccumulator(params.n_nodes)
        for state in reservoir.iterate(series, mask, params):
            accumulator.update(state)
        return accumulator.representation()

    traj = reservoir.run(series, mask, params)
    if tag is Kind.LRS:
        return lrs(traj)
    if tag is Kind.DRS:
        return drs(traj)
    if tag is Kind.MRS_XPAD:
        return mrs_xpad(traj, kind.t_max)
    if tag is Kind.OMS:
        return oms(series, traj, kind.lam)
    return rms(traj, kind.lam)
