"""
Discretized Mackey-Glass delayed feedback reservoir.

The reservoir is a single nonlinear element in a delay loop that is
time-multiplexed into ``N_x`` virtual nodes spaced ``θ`` apart.  With
the nonlinearity held constant over one node interval the
differential equation has the exact solution
``x(θ) = x₀ e^(−θ) + (1 − e^(−θ)) f``, which gives the node cascade
implemented by :func:`step`.

"""
import dataclasses
import math

import numpy as np

from sprockets.dfr import errors, masking


@dataclasses.dataclass(frozen=True)
class DfrParams:
    """
    Reservoir hyperparameters.

    :param float gamma: input gain ``γ``
    :param float eta: feedback gain ``η``
    :param float theta: virtual node interval ``θ`` (dimensionless)
    :param int n_nodes: number of virtual nodes ``N_x``
    :param int p: nonlinearity exponent, 2 for the digital design

    ``decay`` (``e^(−θ)``) and ``gain`` (``1 − e^(−θ)``) are computed
    once when the instance is created.

    """
    gamma: float
    eta: float
    theta: float
    n_nodes: int
    p: int = 2
    decay: float = dataclasses.field(init=False, repr=False)
    gain: float = dataclasses.field(init=False, repr=False)

    def __post_init__(self):
        for name in ('gamma', 'eta', 'theta'):
            value = float(getattr(self, name))
            if not (math.isfinite(value) and value > 0.0):
                raise errors.ConfigurationError(
                    '{} must be a positive real, got {!r}'.format(
                        name, getattr(self, name)))
            object.__setattr__(self, name, value)
        if int(self.n_nodes) != self.n_nodes or self.n_nodes < 1:
            raise errors.ConfigurationError(
                'n_nodes must be a positive integer, got {!r}'.format(
                    self.n_nodes))
        if int(self.p) != self.p or self.p < 1:
            raise errors.ConfigurationError(
                'p must be an integer >= 1, got {!r}'.format(self.p))
        object.__setattr__(self, 'n_nodes', int(self.n_nodes))
        object.__setattr__(self, 'p', int(self.p))
        decay = math.exp(-self.theta)
        object.__setattr__(self, 'decay', decay)
        object.__setattr__(self, 'gain', 1.0 - decay)

    @property
    def tau(self):
        """Total loop delay ``τ = N_x θ``."""
        return self.n_nodes * self.theta

    def to_dict(self):
        return {'gamma': self.gamma, 'eta': self.eta, 'theta': self.theta,
                'n_nodes': self.n_nodes, 'p': self.p}


@dataclasses.dataclass(frozen=True)
class Trajectory:
    """
    Reservoir states ``x(0), x(1), ..., x(T)``.

    .. attribute:: states

       Read-only array of shape ``(T + 1, N_x)``; row 0 is the zero
       initial state.  Keeping ``x(k - 1)`` next to ``x(k)`` is what
       the time-shifted representations need.

    """
    states: np.ndarray

    def __post_init__(self):
        states = np.array(self.states, dtype=np.float64)
        if states.ndim != 2 or states.shape[0] < 1 or states.shape[1] < 1:
            raise errors.DimensionError(
                'trajectory states must have shape (T + 1, N_x), '
                'got {}'.format(states.shape))
        if np.any(states[0] != 0.0):
            raise errors.DimensionError(
                'trajectories start from the zero state')
        if not np.all(np.isfinite(states)):
            raise errors.NonFiniteError('trajectory has non-finite states')
        states.setflags(write=False)
        object.__setattr__(self, 'states', states)

    @property
    def n_nodes(self):
        return self.states.shape[1]

    @property
    def length(self):
        """Number of input steps ``T``."""
        return self.states.shape[0] - 1

    def __len__(self):
        return self.length


def nonlinearity(x, j, params):
    """
    Mackey-Glass nonlinearity ``η t / (1 + t**p)`` with ``t = x + γ j``.

    :param float x: delayed state of the node
    :param float j: masked input of the node
    :param DfrParams params: reservoir parameters
    :rtype: float
    :raises sprockets.dfr.errors.NonlinearityPoleError: if the
        denominator vanishes (odd `p` only)

    """
    t = x + params.gamma * j
    denominator = 1 + t ** params.p
    if denominator == 0:
        raise errors.NonlinearityPoleError(
            'nonlinearity pole at t={!r} with p={}'.format(t, params.p))
    return params.eta * t / denominator


def step(prev, j, params):
    """
    Advance the reservoir by one input step.

    :param prev: the previous state ``x(k - 1)``
    :param j: the masked input ``j(k)``
    :param DfrParams params: reservoir parameters
    :returns: the new state ``x(k)``
    :rtype: numpy.ndarray
    :raises sprockets.dfr.errors.DimensionError: on a length mismatch

    Node ``n`` mixes the freshly computed node ``n - 1`` with the
    nonlinearity of its own previous value; node 1 continues from the
    last node of the previous step.  The loop is inherently sequential.

    """
    prev = np.asarray(prev, dtype=np.float64)
    j = np.asarray(j, dtype=np.float64)
    n_nodes = params.n_nodes
    if prev.shape != (n_nodes,) or j.shape != (n_nodes,):
        raise errors.DimensionError(
            'state {} and input {} must both have length {}'.format(
                prev.shape, j.shape, n_nodes))
    previous = prev.tolist()
    inputs = j.tolist()
    decay, gain = params.decay, params.gain
    state = [0.0] * n_nodes
    node = previous[-1]
    for n in range(n_nodes):
        node = node * decay + gain * nonlinearity(previous[n], inputs[n],
                                                  params)
        state[n] = node
    return np.array(state, dtype=np.float64)


def as_series(series):
    """Return the ``(N_u, T)`` array of an instance or array-like."""
    values = getattr(series, 'series', series)
    values = np.asarray(values, dtype=np.float64)
    if values.ndim != 2:
        raise errors.DimensionError(
            'series must have shape (N_u, T), got {}'.format(values.shape))
    return values


def _check_dimensions(values, mask, params):
    if values.shape[0] != mask.n_vars:
        raise errors.DimensionError(
            'series has {} variables but the mask expects {}'.format(
                values.shape[0], mask.n_vars))
    if mask.n_nodes != params.n_nodes:
        raise errors.DimensionError(
            'mask has {} nodes but the reservoir has {}'.format(
                mask.n_nodes, params.n_nodes))


def iterate(series, mask, params):
    """
    Yield the states ``x(1), ..., x(T)`` one at a time.

    :param series: a :class:`~sprockets.dfr.dataset.TimeSeriesInstance`
        or an array of shape ``(N_u, T)``
    :param sprockets.dfr.masking.MaskMatrix mask: the input mask
    :param DfrParams params: reservoir parameters

    """
    values = as_series(series)
    _check_dimensions(values, mask, params)
    state = np.zeros(params.n_nodes)
    for k in range(values.shape[1]):
        state = step(state, masking.apply_mask(mask, values[:, k]), params)
        yield state


def run(series, mask, params):
    """
    Run the reservoir over a whole series from the zero state.

    :rtype: Trajectory
    :raises sprockets.dfr.errors.DimensionError: if the series, mask
        and parameters disagree on their dimensions

    """
    values = as_series(series)
    _check_dimensions(values, mask, params)
    states = np.zeros((values.shape[1] + 1, params.n_nodes))
    for k, state in enumerate(iterate(values, mask, params), start=1):
        states[k] = state
    return Trajectory(states)
