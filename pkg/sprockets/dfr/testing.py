"""
Reference implementations for equivalence tests.

The oracles transcribe the defining formulas as plainly as possible in
pure Python.  They import nothing from the rest of the package and
only accept small inputs.

- :func:`oracle_dprr`: triple loop over the shifted state products
- :func:`oracle_ridge`: explicit inverse via Gauss-Jordan elimination
- :func:`oracle_step`: node-by-node cascade of one input step

"""
import dataclasses
import math
import typing

MAX_NODES = 12
MAX_STEPS = 50
MAX_RIDGE = 64


class OracleSizeError(ValueError):
    """Input too large for a reference implementation."""


@dataclasses.dataclass(frozen=True)
class OracleResult:
    """
    Reference value and the name of the oracle that produced it.

    ``value`` is a list of floats or a list of rows.

    """
    value: typing.Any
    description: str


def _rows(matrix):
    return [[float(v) for v in row] for row in matrix]


def oracle_dprr(traj):
    """
    Accumulate ``x(k)ᵢ · x′(k−1)ⱼ`` with explicit loops.

    :param traj: the states ``x(0), ..., x(T)`` as rows (a
        :class:`~sprockets.dfr.reservoir.Trajectory` or nested lists)
    :returns: the row-major flattened ``N_x × (N_x + 1)`` sums

    """
    states = _rows(getattr(traj, 'states', traj))
    n_nodes = len(states[0])
    steps = len(states) - 1
    if n_nodes > MAX_NODES or steps > MAX_STEPS:
        raise OracleSizeError('oracle_dprr supports N_x <= {} and '
                              'T <= {}'.format(MAX_NODES, MAX_STEPS))
    total = [[0.0] * (n_nodes + 1) for _ in range(n_nodes)]
    for k in range(1, steps + 1):
        shifted = states[k - 1] + [1.0]
        for i in range(n_nodes):
            for j in range(n_nodes + 1):
                total[i][j] += states[k][i] * shifted[j]
    flat = [v for row in total for v in row]
    return OracleResult(flat, 'triple loop over shifted state products')


def _invert(matrix):
    n = len(matrix)
    work = [row[:] + [1.0 if i == j else 0.0 for j in range(n)]
            for i, row in enumerate(matrix)]
    for col in range(n):
        pivot = max(range(col, n), key=lambda r: abs(work[r][col]))
        if work[pivot][col] == 0.0:
            raise ZeroDivisionError('matrix is singular')
        work[col], work[pivot] = work[pivot], work[col]
        factor = work[col][col]
        work[col] = [v / factor for v in work[col]]
        for r in range(n):
            if r != col and work[r][col] != 0.0:
                scale = work[r][col]
                work[r] = [a - scale * b for a, b in zip(work[r], work[col])]
    return [row[n:] for row in work]


def _multiply(a, b):
    return [[sum(a[i][k] * b[k][j] for k in range(len(b)))
             for j in range(len(b[0]))] for i in range(len(a))]


def _transpose(a):
    return [list(col) for col in zip(*a)]


def oracle_ridge(a, b, reg):
    """
    Compute ``A Bᵀ (B Bᵀ + reg E)⁻¹`` with an explicit inverse.

    :returns: the result as a list of rows

    """
    a, b = _rows(a), _rows(b)
    if len(b) > MAX_RIDGE or len(b[0]) > MAX_RIDGE * 4:
        raise OracleSizeError('oracle_ridge supports at most {} rows'.format(
            MAX_RIDGE))
    bt = _transpose(b)
    gram = _multiply(b, bt)
    for i in range(len(gram)):
        gram[i][i] += reg
    value = _multiply(_multiply(a, bt), _invert(gram))
    return OracleResult(value, 'explicit inverse of the regularized Gram')


def oracle_step(prev, j, params):
    """
    Transcribe the node cascade of one input step.

    ``params`` needs ``gamma``, ``eta``, ``theta`` and ``p`` attributes.

    """
    prev = [float(v) for v in prev]
    j = [float(v) for v in j]
    n_nodes = len(prev)
    if n_nodes > MAX_NODES:
        raise OracleSizeError('oracle_step supports at most {} nodes'.format(
            MAX_NODES))
    decay = math.exp(-params.theta)
    gain = 1.0 - decay
    x = [0.0] * n_nodes
    last = prev[n_nodes - 1]
    for n in range(n_nodes):
        t = prev[n] + params.gamma * j[n]
        f = params.eta * t / (1 + t ** params.p)
        x[n] = last * decay + gain * f
        last = x[n]
    return OracleResult(x, 'node-by-node cascade')


def trajectory_fixture():
    """
    Two-node, two-step trajectory with a hand-computed DPRR.

    :returns: ``(states, expected)`` where ``expected`` is
        ``[3, 6, 4, 4, 8, 6]``

    """
    states = [[0.0, 0.0], [1.0, 2.0], [3.0, 4.0]]
    return states, [3.0, 6.0, 4.0, 4.0, 8.0, 6.0]
