"""Dense two-phase tableau simplex with Bland's rule.

Small and slow on purpose: it is the self-contained reference backend used
to cross-check the HiGHS adapter, not the production path.
"""
from __future__ import annotations

import numpy as np

_TOL = 1e-9


class SimplexError(RuntimeError):
    pass


def _pivot(T: np.ndarray, basis: list[int], r: int, c: int) -> None:
    T[r] /= T[r, c]
    col = T[:, c].copy()
    col[r] = 0.0
    T -= np.outer(col, T[r])
    basis[r] = c


def _run(T: np.ndarray, basis: list[int], ncols: int, max_iter: int) -> str:
    """Minimise the objective held in the last row over the first ``ncols`` columns."""
    m = T.shape[0] - 1
    for _ in range(max_iter):
        red = T[-1, :ncols]
        cand = np.nonzero(red < -_TOL)[0]
        if len(cand) == 0:
            return "optimal"
        c = int(cand[0])
        colv = T[:m, c]
        pos = np.nonzero(colv > _TOL)[0]
        if len(pos) == 0:
            return "unbounded"
        ratios = T[pos, -1] / colv[pos]
        best = ratios.min()
        ties = pos[ratios <= best + _TOL * max(1.0, abs(best))]
        r = int(min(ties, key=lambda i: basis[i]))
        _pivot(T, basis, r, c)
    raise SimplexError(f"simplex did not converge in {max_iter} iterations")


def solve_standard(A: np.ndarray, b: np.ndarray, senses: list[str], c: np.ndarray, max_iter: int = 50000):
    """Minimise ``c @ y`` subject to ``A y (senses) b`` and ``y >= 0``.

    Returns ``(status, y, objective)`` with status one of ``optimal``,
    ``infeasible``, ``unbounded``.
    """
    A = np.array(A, dtype=float).reshape(len(b), len(c))
    b = np.array(b, dtype=float)
    senses = list(senses)
    m, n = A.shape
    for i in range(m):
        if b[i] < 0:
            A[i] *= -1
            b[i] *= -1
            senses[i] = {"<=": ">=", ">=": "<=", "=": "="}[senses[i]]
    n_slack = sum(s != "=" for s in senses)
    n_art = sum(s != "<=" for s in senses)
    width = n + n_slack + n_art
    T = np.zeros((m + 1, width + 1))
    T[:m, :n] = A
    T[:m, -1] = b
    basis: list[int] = [0] * m
    s_col, a_col = n, n + n_slack
    arts = []
    for i, s in enumerate(senses):
        if s == "<=":
            T[i, s_col] = 1.0
            basis[i] = s_col
            s_col += 1
        else:
            if s == ">=":
                T[i, s_col] = -1.0
                s_col += 1
            T[i, a_col] = 1.0
            basis[i] = a_col
            arts.append(a_col)
            a_col += 1
    if arts:
        T[-1, arts] = 1.0
        for i, bc in enumerate(basis):
            if bc in arts:
                T[-1] -= T[i]
        _run(T, basis, width, max_iter)
        if -T[-1, -1] > 1e-7 * max(1.0, np.abs(b).max(initial=0.0)):
            return "infeasible", None, None
        # drive remaining artificials out of the basis, dropping redundant rows
        keep = []
        for i, bc in enumerate(basis):
            if bc >= n + n_slack:
                nz = np.nonzero(np.abs(T[i, : n + n_slack]) > 1e-9)[0]
                if len(nz):
                    _pivot(T, basis, i, int(nz[0]))
                    keep.append(i)
            else:
                keep.append(i)
        T = np.vstack([T[keep], T[-1:]])
        basis = [basis[i] for i in keep]
        T = np.delete(T, np.arange(n + n_slack, width), axis=1)
        width = n + n_slack
    T[-1, :] = 0.0
    T[-1, :n] = c
    for i, bc in enumerate(basis):
        if T[-1, bc] != 0.0:
            T[-1] -= T[-1, bc] * T[i]
    status = _run(T, basis, width, max_iter)
    if status == "unbounded":
        return "unbounded", None, None
    y = np.zeros(width)
    for i, bc in enumerate(basis):
        y[bc] = T[i, -1]
    y = y[:n]
    return "optimal", y, float(c @ y)
