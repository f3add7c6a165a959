"""Per-state matrix game solving: mixed max-min via a small dense simplex,
pure max-min / min-max enumeration, and deterministic joint argmax extraction.

Matrix convention: rows are the focal player's actions, columns the
opponents' joint actions, entries the focal player's values.  All argmax and
argmin ties break to the lowest index so that independent replicas derive
identical decisions from identical tables.
"""

from __future__ import annotations

import numpy as np

from .games import ContractViolation, GameSpec

__all__ = [
    "greedy_joint_argmax",
    "matrix_view",
    "pure_maxmin",
    "pure_minmax",
    "solve_maxmin",
    "solve_zero_sum",
    "unravel_joint",
]

_EPS = 1e-12


class SolverError(RuntimeError):
    """The simplex failed to terminate; impossible for finite matrices."""


def _validate(m: np.ndarray) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise ContractViolation("matrix must be 2-D and non-empty")
    if not np.all(np.isfinite(m)):
        raise ContractViolation("matrix entries must be finite")
    return m


def _as_matrix(m: np.ndarray) -> np.ndarray:
    # shape check only: the pure saddle ops sit on the learning hot path,
    # and non-finite entries propagate into their outputs anyway
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise ContractViolation("matrix must be 2-D and non-empty")
    return m


def _simplex_standard(M: np.ndarray):
    """Maximize 1'w subject to M w <= 1, w >= 0 for M > 0 (Bland's rule).

    Returns (w, duals, objective).  The slack basis is feasible, and the
    objective is bounded because every column of M has a positive entry.
    """
    m, n = M.shape
    T = np.zeros((m + 1, n + m + 1))
    T[:m, :n] = M
    T[:m, n:n + m] = np.eye(m)
    T[:m, -1] = 1.0
    T[m, :n] = -1.0
    basis = list(range(n, n + m))
    for _ in range(10000):
        negative = np.nonzero(T[m, :n + m] < -_EPS)[0]
        if negative.size == 0:
            break
        enter = int(negative[0])        # Bland's rule: lowest index enters
        leave, best = -1, np.inf
        for r in range(m):
            coef = T[r, enter]
            if coef > _EPS:
                ratio = T[r, -1] / coef
                if ratio < best - _EPS or (abs(ratio - best) <= _EPS and
                                           (leave < 0 or basis[r] < basis[leave])):
                    best, leave = ratio, r
        if leave < 0:
            raise SolverError("unbounded tableau on a finite matrix")
        piv = T[leave, enter]
        T[leave] /= piv
        col = T[:, enter].copy()
        col[leave] = 0.0
        T -= col[:, None] * T[leave]
        basis[leave] = enter
    else:
        raise SolverError("simplex failed to terminate")
    w = np.zeros(n)
    for r, b in enumerate(basis):
        if b < n:
            w[b] = T[r, -1]
    duals = T[m, n:n + m].copy()
    return w, duals, T[m, -1]


def solve_zero_sum(m: np.ndarray):
    """Value and both optimal mixed strategies of a zero-sum matrix game.

    The row player maximizes, the column player minimizes.  Solved through
    the standard positivity shift and the bounded-form LP pair.
    """
    m = _validate(m)
    shift = float(m.min())
    M = m - shift + 1.0  # strictly positive
    w, duals, obj = _simplex_standard(M)
    if obj <= _EPS:
        raise SolverError("degenerate objective on a positive matrix")
    value = 1.0 / obj + shift - 1.0
    col_strategy = w / obj
    row_strategy = duals / obj
    # normalization guards against simplex round-off
    row_strategy = np.clip(row_strategy, 0.0, None)
    row_strategy /= row_strategy.sum()
    col_strategy = np.clip(col_strategy, 0.0, None)
    col_strategy /= col_strategy.sum()
    return row_strategy, col_strategy, value


def solve_maxmin(m: np.ndarray):
    """Mixed strategy maximizing the minimum column payoff, with its value."""
    row_strategy, _cols, value = solve_zero_sum(m)
    return row_strategy, value


def pure_maxmin(m: np.ndarray):
    """(row index, value) of max over rows of min over columns."""
    m = _as_matrix(m)
    mins = m.min(axis=1)
    row = int(np.argmax(mins))
    return row, float(mins[row])


def pure_minmax(m: np.ndarray):
    """(column index, value) of min over columns of max over rows."""
    m = _as_matrix(m)
    maxs = m.max(axis=0)
    col = int(np.argmin(maxs))
    return col, float(maxs[col])


def matrix_view(values: np.ndarray, focal: int,
                action_counts: tuple[int, ...]) -> np.ndarray:
    """Reshape a flat joint-action value row into (focal actions, others').

    Two-player views come back as plain (possibly transposed) reshapes with
    no copy; only 3+ player tensors pay for a moveaxis.
    """
    arr = np.asarray(values).reshape(action_counts)
    if focal == 0:
        return arr.reshape(action_counts[0], -1)
    if len(action_counts) == 2:
        return arr.T
    arr = np.moveaxis(arr, focal, 0)
    return arr.reshape(action_counts[focal], -1)


def unravel_joint(index: int, action_counts) -> tuple[int, ...]:
    """Joint-action index -> per-seat actions (C order)."""
    out = []
    for n in reversed(action_counts):
        index, a = divmod(index, n)
        out.append(a)
    out.reverse()
    return tuple(out)


def greedy_joint_argmax(q, s: int) -> tuple[int, ...]:
    """Joint action maximizing ``q`` at state ``s``; lowest joint index wins."""
    table = q.values if hasattr(q, "values") else q
    idx = int(np.argmax(table[s]))
    counts = q.action_counts if hasattr(q, "action_counts") else None
    if counts is None:
        raise ContractViolation("q table must expose action_counts")
    return unravel_joint(idx, counts)
