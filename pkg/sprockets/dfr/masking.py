"""
Input masks built from maximal-length sequences.

- :class:`PrimitivePolynomial`: generator polynomial of an LFSR
- :class:`MaskMatrix`: the ``N_x × N_u`` matrix of ``±1`` entries
- :func:`mask_matrix`: builds the mask for a number of input variables
- :func:`apply_mask`: computes ``j(k) = M u(k)``

A mask column is generated as follows: compute the m-sequence of the
polynomial, insert a zero right after the first run of ``m - 1``
zeros (or at the beginning if there is none), append the first
``m - 1`` bits of the result, and map ``0`` to ``-1``.  A zero run
that wraps around the end of the m-sequence is first rotated to its
end.  The result has ``2**m + m - 1`` entries and, read with windows
of ``m`` consecutive entries, contains every ``m``-bit pattern.
Further columns are rotations of the first one.

"""
import dataclasses
import typing

import numpy as np
from scipy import signal

from sprockets.dfr import errors

MIN_DEGREE = 3
MAX_DEGREE = 16


@dataclasses.dataclass(frozen=True)
class PrimitivePolynomial:
    """
    Generator polynomial ``G(x) = x**m + sum(x**e for e in taps)``.

    :param int degree: the degree ``m``
    :param tuple taps: exponents with a non-zero coefficient, without
        the leading ``x**m`` term and including the constant term ``0``

    The polynomial ``x**3 + x + 1`` is ``PrimitivePolynomial(3, (1, 0))``
    and produces the recurrence ``a[n] = a[n-2] + a[n-3]`` (mod 2).

    """
    degree: int
    taps: typing.Tuple[int, ...]

    def __post_init__(self):
        taps = tuple(sorted({int(t) for t in self.taps}, reverse=True))
        object.__setattr__(self, 'taps', taps)
        if not MIN_DEGREE <= self.degree <= MAX_DEGREE:
            raise errors.ConfigurationError(
                'polynomial degree must be between {} and {}, got {}'.format(
                    MIN_DEGREE, MAX_DEGREE, self.degree))
        if 0 not in taps:
            raise errors.ConfigurationError(
                'constant term of a primitive polynomial must be 1')
        if any(t < 0 or t >= self.degree for t in taps):
            raise errors.ConfigurationError(
                'taps of a degree {} polynomial must be in [0, {}), '
                'got {}'.format(self.degree, self.degree, list(taps)))
        if len(taps) < 2:
            raise errors.ConfigurationError(
                'x**{} + 1 is not primitive'.format(self.degree))
        if not _has_maximal_period(self.degree, taps):
            raise errors.ConfigurationError(
                '{} is not primitive: its sequence period is shorter '
                'than {}'.format(self, 2 ** self.degree - 1))

    @property
    def n_nodes(self):
        """Length of a mask column, ``2**m + m - 1``."""
        return 2 ** self.degree + self.degree - 1

    def __str__(self):
        terms = ['x^{}'.format(self.degree)]
        for tap in self.taps:
            terms.append('1' if tap == 0 else
                         'x' if tap == 1 else 'x^{}'.format(tap))
        return ' + '.join(terms)


def _has_maximal_period(degree, taps):
    period = 2 ** degree - 1
    seq, _ = signal.max_len_seq(degree, length=period,
                                taps=[t for t in taps if t])
    seq = np.concatenate([seq, seq[:degree - 1]]).astype(np.int64)
    windows = np.zeros(period, dtype=np.int64)
    for offset in range(degree):
        windows = (windows << 1) | seq[offset:offset + period]
    return np.unique(windows).size == period


DEFAULT_POLYNOMIALS = {
    3: PrimitivePolynomial(3, (1, 0)),
    4: PrimitivePolynomial(4, (1, 0)),
    5: PrimitivePolynomial(5, (2, 0)),
    6: PrimitivePolynomial(6, (1, 0)),
}
"""Primitive trinomials used when no polynomial is configured."""


def default_polynomial(degree):
    """
    Return the default primitive polynomial of `degree`.

    :raises sprockets.dfr.errors.ConfigurationError: if there is no
        default for `degree`

    """
    try:
        return DEFAULT_POLYNOMIALS[degree]
    except KeyError:
        raise errors.ConfigurationError(
            'no default primitive polynomial for degree {}; '
            'configure the taps explicitly'.format(degree))


def default_init(degree):
    """Return the default initial value ``(0, ..., 0, 1)``."""
    return (0,) * (degree - 1) + (1,)


def parse_bits(value):
    """
    Convert ``'001'``, ``[0, 0, 1]`` or ``(0, 0, 1)`` to a bit tuple.

    :raises sprockets.dfr.errors.ConfigurationError: on anything that
        is not made of zeros and ones

    """
    try:
        bits = tuple(int(b) for b in value)
    except (TypeError, ValueError):
        bits = (None,)
    if any(b not in (0, 1) for b in bits):
        raise errors.ConfigurationError(
            'bit vector must contain only 0 and 1, got {!r}'.format(value))
    return bits


def _check_init(poly, init):
    init = parse_bits(init)
    if len(init) != poly.degree:
        raise errors.ConfigurationError(
            'initial value must have {} bits, got {}'.format(
                poly.degree, len(init)))
    if not any(init):
        raise errors.DegenerateStateError(
            'initial value must not be all zeros')
    return init


def msequence(poly, init, length):
    """
    Generate `length` bits of the maximal-length sequence of `poly`.

    :param PrimitivePolynomial poly: the generator polynomial
    :param init: the first ``m`` bits of the sequence
    :param int length: number of bits to produce
    :rtype: tuple
    :raises sprockets.dfr.errors.DegenerateStateError: if `init` is
        all zeros

    """
    init = _check_init(poly, init)
    if length < 1:
        raise errors.ConfigurationError(
            'sequence length must be positive, got {}'.format(length))
    # the constant term is implicit in the shift register feedback
    taps = [t for t in poly.taps if t]
    seq, _ = signal.max_len_seq(poly.degree, state=init, length=length,
                                taps=taps)
    return tuple(int(b) for b in seq)


def _insert_zero(bits, degree):
    run = degree - 1
    period = len(bits)
    cyclic = bits + bits[:run]
    for index in range(period):
        if not any(cyclic[index:index + run]):
            position = index + run
            break
    else:
        return (0,) + bits
    if position > period:
        # the zero run wraps around; rotate it to the end of the sequence
        shift = position - period
        bits = bits[shift:] + bits[:shift]
        position = period
    return bits[:position] + (0,) + bits[position:]


def column_bits(poly, init):
    """
    Return the 0/1 column before mapping zeros to ``-1``.

    The column is cyclic over its first ``2**m`` entries; its first
    ``m - 1`` bits are repeated at the end.  They equal ``init[:m-1]``
    unless the zero run of the m-sequence wraps around its end.

    :rtype: tuple

    """
    init = _check_init(poly, init)
    bits = msequence(poly, init, 2 ** poly.degree - 1)
    cycle = _insert_zero(bits, poly.degree)
    return cycle + cycle[:poly.degree - 1]


def mask_column(poly, init):
    """
    Build a single ``±1`` mask column of length ``2**m + m - 1``.

    :rtype: numpy.ndarray

    """
    bits = np.array(column_bits(poly, init), dtype=np.float64)
    return 2.0 * bits - 1.0


@dataclasses.dataclass(frozen=True)
class MaskMatrix:
    """
    Immutable ``N_x × N_u`` matrix of ``±1`` entries.

    .. attribute:: values

       Read-only :class:`numpy.ndarray` of shape ``(n_nodes, n_vars)``.

    .. attribute:: poly

       The :class:`PrimitivePolynomial` the columns were derived from.

    .. attribute:: init

       The LFSR initial value as a bit tuple.

    """
    values: np.ndarray
    poly: PrimitivePolynomial
    init: typing.Tuple[int, ...]

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64)
        if values.ndim != 2:
            raise errors.DimensionError(
                'mask must be two dimensional, got shape {}'.format(
                    values.shape))
        if values.shape[0] != self.poly.n_nodes:
            raise errors.DimensionError(
                'mask has {} rows but a degree {} polynomial needs {}'.format(
                    values.shape[0], self.poly.degree, self.poly.n_nodes))
        if not np.all(np.abs(values) == 1.0):
            raise errors.DimensionError('mask entries must be -1 or +1')
        values.setflags(write=False)
        object.__setattr__(self, 'values', values)
        object.__setattr__(self, 'init', parse_bits(self.init))

    @property
    def n_nodes(self):
        return self.values.shape[0]

    @property
    def n_vars(self):
        return self.values.shape[1]

    @property
    def stride(self):
        """Rotation between consecutive columns."""
        return self.n_nodes // self.n_vars

    def to_dict(self):
        """Return the JSON document describing this mask."""
        return {
            'm': self.poly.degree,
            'taps': list(self.poly.taps),
            'init': list(self.init),
            'n_vars': self.n_vars,
            'n_nodes': self.n_nodes,
            'rows': [[int(v) for v in row] for row in self.values],
        }

    @classmethod
    def from_dict(cls, document):
        """
        Rebuild a mask from :meth:`to_dict` output.

        :raises sprockets.dfr.errors.DimensionError: if the stored rows
            do not match the regenerated mask

        """
        poly = PrimitivePolynomial(int(document['m']),
                                   tuple(document['taps']))
        mask = mask_matrix(poly, document['init'], int(document['n_vars']))
        if not np.array_equal(mask.values,
                              np.asarray(document['rows'], dtype=np.float64)):
            raise errors.DimensionError(
                'stored mask rows do not match the generating polynomial')
        return mask


def mask_matrix(poly, init, n_vars):
    """
    Build the mask for `n_vars` input variables.

    Column ``a`` is the first column rotated downward by
    ``a * (N_x // n_vars)`` positions.

    :param PrimitivePolynomial poly: the generator polynomial
    :param init: the LFSR initial value
    :param int n_vars: number of input variables ``N_u``
    :rtype: MaskMatrix
    :raises sprockets.dfr.errors.MaskSizeError: if there are more
        variables than mask entries

    """
    column = mask_column(poly, init)
    n_nodes = column.shape[0]
    if n_vars < 1:
        raise errors.MaskSizeError(
            'number of variables must be positive, got {}'.format(n_vars))
    if n_vars > n_nodes:
        raise errors.MaskSizeError(
            'more variables than mask length: {} variables, {} nodes '
            '(degree {})'.format(n_vars, n_nodes, poly.degree))
    stride = n_nodes // n_vars
    values = np.stack([np.roll(column, a * stride) for a in range(n_vars)],
                      axis=1)
    return MaskMatrix(values, poly, parse_bits(init))


def apply_mask(mask, u):
    """
    Compute the masked input ``j = M u``.

    :param MaskMatrix mask: the mask
    :param u: input vector of length ``N_u``
    :rtype: numpy.ndarray
    :raises sprockets.dfr.errors.DimensionError: on a length mismatch

    """
    u = np.asarray(u, dtype=np.float64)
    if u.ndim != 1 or u.shape[0] != mask.n_vars:
        raise errors.DimensionError(
            'input has shape {} but the mask expects {} variables'.format(
                u.shape, mask.n_vars))
    return np.dot(mask.values, u)
