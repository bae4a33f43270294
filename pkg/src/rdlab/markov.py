"""Transition matrices of local digit-factor suprema and their Perron root.

States are windows of ``J`` decimal digits ``(a_1, ..., a_J)`` encoded as
``j = sum a_l 10**(l-1)``. Appending a digit ``d`` and dropping ``a_1`` moves
state ``j`` to ``j // 10 + d * 10**(J-1)``, and that edge carries the weight
``G(a_1, ..., a_J, d)**t``. The matrix is stored column-wise as a
``(10**J, 10)`` array: ``values[j, d]`` is the weight of the edge leaving
``j`` with appended digit ``d``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import ConvergenceError, ResourceError
from .fourier import g_table

MAX_J = 5
MAX_ITER = 10**6

LAMBDA_L1_BOUND = 2.24190
LAMBDA_MOMENT_BOUND = 1.36854
MOMENT_T = 235 / 154


@dataclass(frozen=True)
class TransitionMatrix:
    J: int
    t: float
    a0: int
    values: np.ndarray
    window: str = "forward"

    @property
    def n_states(self) -> int:
        return 10**self.J

    def successors(self, j: int) -> np.ndarray:
        return j // 10 + np.arange(10) * 10 ** (self.J - 1)

    def matvec(self, v: np.ndarray) -> np.ndarray:
        """``M v``."""
        N = self.n_states
        w = (self.values * v[:, None]).reshape(N // 10, 10, 10).sum(axis=1)
        return w.T.ravel()

    def rmatvec(self, v: np.ndarray) -> np.ndarray:
        """``M^T v``."""
        N = self.n_states
        idx = (np.arange(N) // 10)[:, None] + np.arange(10)[None, :] * (N // 10)
        return (self.values * v[idx]).sum(axis=1)

    def to_sparse(self) -> sp.csr_matrix:
        N = self.n_states
        cols = np.repeat(np.arange(N), 10)
        rows = (cols // 10) + np.tile(np.arange(10), N) * (N // 10)
        return sp.csr_matrix((self.values.ravel(), (rows, cols)), shape=(N, N))


def build_matrix(a0: int, J: int, t: float, window: str = "forward") -> TransitionMatrix:
    """Assemble ``M_t`` for excluded digit ``a0`` from the cached suprema."""
    if not 1 <= J <= MAX_J:
        raise ResourceError(f"J must lie in [1, {MAX_J}]")
    if t <= 0:
        raise ValueError("t must be positive")
    G = g_table(a0, J, window)
    # word W = j + d * 10**J has digits (a_1, ..., a_J, d)
    values = (G**t).reshape(10, 10**J).T.copy()
    values.setflags(write=False)
    return TransitionMatrix(J, float(t), int(a0), values, window)


@dataclass(frozen=True)
class EigenReport:
    a0: int
    J: int
    t: float
    lam: float
    upper_bound: float
    lower_bound: float
    residual: float
    iterations: int

    def as_record(self) -> dict:
        return {
            "op": "eigen",
            "a0": self.a0,
            "J": self.J,
            "t": self.t,
            "lambda": self.lam,
            "certified_upper": self.upper_bound,
            "certified_lower": self.lower_bound,
            "residual": self.residual,
            "iterations": self.iterations,
            "definition": "Perron root of M_t; bounds are min/max of (Mv)_i/v_i",
        }


def dominant_eigenvalue(
    M: TransitionMatrix, tol: float = 1e-10, max_iter: int = MAX_ITER, transpose: bool = False
) -> EigenReport:
    """Power iteration from the all-ones vector with l1 renormalization.

    Stops once ``||Mv - lam v||_1 / ||v||_1 <= tol``. The Collatz-Wielandt
    quotients ``min_i (Mv)_i / v_i <= lam <= max_i (Mv)_i / v_i`` of the final
    positive iterate are reported as certified bounds.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    apply = M.rmatvec if transpose else M.matvec
    v = np.full(M.n_states, 1.0 / M.n_states)
    for it in range(1, max_iter + 1):
        w = apply(v)
        lam = w.sum() / v.sum()
        residual = np.abs(w - lam * v).sum() / np.abs(v).sum()
        if residual <= tol:
            ratio = w / v
            return EigenReport(M.a0, M.J, M.t, float(lam), float(ratio.max()), float(ratio.min()), float(residual), it)
        v = w / w.sum()
    raise ConvergenceError(f"power iteration did not converge in {max_iter} steps")


def eigenvalue(a0: int, J: int, t: float, tol: float = 1e-10, window: str = "forward") -> EigenReport:
    return dominant_eigenvalue(build_matrix(a0, J, t, window), tol)


def path_sums(a0: int, J: int, t: float, k_max: int, window: str = "forward") -> np.ndarray:
    """``path_sum`` for every ``k = 1..k_max`` in one backward sweep.

    ``path_sum(k) = sum over digit strings t_1..t_k of prod_i G(t_i, ..., t_{i+J})**t``
    with ``t_j = 0`` for ``j > k``. Shifting the padding block one step to the
    right is the same as prepending a digit, so the k-th value is the total mass
    after ``k`` applications of ``M^T`` to the indicator of the all-zero state.
    """
    if k_max < 1:
        raise ValueError("k must be at least 1")
    M = build_matrix(a0, J, t, window)
    v = np.zeros(M.n_states)
    v[0] = 1.0
    out = np.empty(k_max)
    log_scale = 0.0
    for k in range(k_max):
        v = M.rmatvec(v)
        s = v.sum()
        log_scale += math.log(s)
        v /= s
        out[k] = log_scale
    return np.exp(out)


def path_sum(a0: int, J: int, t: float, k: int, window: str = "forward") -> float:
    return float(path_sums(a0, J, t, k, window)[-1])


def brute_path_sum(a0: int, J: int, t: float, k: int, window: str = "forward") -> float:
    """Enumerate all ``10**k`` strings directly; an oracle for small ``k``."""
    G = g_table(a0, J, window) ** t
    words = np.arange(10**k, dtype=np.int64)
    # t_1 is the most significant digit of the k-digit string
    digits = [(words // 10 ** (k - i)) % 10 for i in range(1, k + 1)] + [np.zeros_like(words)] * J
    prod = np.ones(words.size)
    for i in range(k):
        W = sum(digits[i + j] * 10**j for j in range(J + 1))
        prod *= G[W]
    return float(prod.sum())
