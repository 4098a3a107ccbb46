"""N x N truncations of phi(S*) and their power orbits.

For phi = sum_{k<=d} a_k z^k the operator phi(S*) acts on l^2(N_0) by
``(phi(S*) x)_i = sum_k a_k x_{i+k}``.  Its N x N truncation is the upper
triangular Toeplitz matrix ``A[i, j] = a_{j-i}`` for ``0 <= j - i <= d``.
Because information only flows towards lower indices, the truncation is
exact on vectors supported in the first N coordinates, and the n-th iterate
of a general vector is exact on its first ``N - d*n`` coordinates.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Sequence

import numpy as np
import scipy.fft

from hyplab.symbol import Symbol, sup_norm_bound

__all__ = [
    "TruncatedOperator",
    "OrbitRecord",
    "build_truncation",
    "apply",
    "apply_fast",
    "prefers_fast",
    "orbit",
    "CROSSOVER_FACTOR",
]

# direct path for d <= CROSSOVER_FACTOR * log2(N), circulant path above
CROSSOVER_FACTOR = 2.0
# shortest overlap-save block
MIN_BLOCK = 1024


def fft_workers() -> int:
    """Thread cap for the transforms, from ``HYPLAB_THREADS`` (default 1)."""
    try:
        return max(1, int(os.environ.get("HYPLAB_THREADS", "1")))
    except ValueError:
        return 1


@dataclass(frozen=True, eq=False)
class TruncatedOperator:
    dim: int
    coeffs: np.ndarray
    norm_bound: float
    tail_bound: float = 0.0
    label: str = ""

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @cached_property
    def circulant_size(self) -> int:
        """Length of each circulant block used by :func:`apply_fast`.

        Small problems use one circulant holding all ``dim + degree`` entries.
        Large ones are cut into overlap-save blocks of a power-of-two length
        about 16x the bandwidth, which keeps the transforms cache-resident.
        """
        whole = scipy.fft.next_fast_len(self.dim + self.degree)
        block = 1 << max(MIN_BLOCK.bit_length() - 1, (16 * (self.degree + 1) - 1).bit_length())
        return min(whole, block)

    @cached_property
    def _circulant_spectrum(self) -> np.ndarray:
        m = self.circulant_size
        col = np.zeros(m, dtype=complex)
        col[0] = self.coeffs[0]
        # first column of the circulant: a_k sits at position -k mod m
        col[m - np.arange(1, self.degree + 1)] = self.coeffs[1:]
        return scipy.fft.fft(col)

    def dense(self) -> np.ndarray:
        n = self.dim
        out = np.zeros((n, n), dtype=complex)
        for k, a in enumerate(self.coeffs[: n]):
            out[np.arange(n - k), np.arange(k, n)] = a
        return out


def build_truncation(s: Symbol, N: int) -> TruncatedOperator:
    """The N x N upper-triangular Toeplitz matrix realizing the polynomial part of phi(S*).

    The symbol's tail bound is kept as extra operator-norm uncertainty.
    """
    if N < 1:
        raise ValueError("dimension must be at least 1")
    coeffs = s.as_array()
    coeffs.setflags(write=False)
    return TruncatedOperator(
        dim=int(N),
        coeffs=coeffs,
        norm_bound=sup_norm_bound(s),
        tail_bound=s.tail_bound,
        label=s.label,
    )


def _check_input(op: TruncatedOperator, x) -> np.ndarray:
    x = np.asarray(x, dtype=complex)
    if x.ndim not in (1, 2) or x.shape[0] != op.dim:
        raise ValueError(f"expected leading dimension {op.dim}, got shape {x.shape}")
    return x


def apply(op: TruncatedOperator, x) -> np.ndarray:
    """Banded product, O(N d).  ``x`` may also be an (N, m) block of columns."""
    x = _check_input(op, x)
    n = op.dim
    y = op.coeffs[0] * x
    for k in range(1, min(op.degree, n - 1) + 1):
        y[: n - k] += op.coeffs[k] * x[k:]
    return y


def apply_fast(op: TruncatedOperator, x) -> np.ndarray:
    """Circulant-embedding product, O(N log d); same contract as :func:`apply`.

    Overlap-save: block b covers inputs ``[b*step, b*step + m)`` and its
    circulant product is exact on the first ``step = m - d`` outputs, since
    row i only reads inputs i..i+d.
    """
    x = _check_input(op, x)
    n, d, m = op.dim, op.degree, op.circulant_size
    step = m - d
    nblocks = -(-n // step)
    padded = np.zeros((nblocks * step + d,) + x.shape[1:], dtype=complex)
    padded[:n] = x
    # strided view of the overlapping windows; the transform makes the copy
    blocks = np.lib.stride_tricks.sliding_window_view(padded, m, axis=0)[::step]
    if x.ndim == 2:
        blocks = np.moveaxis(blocks, -1, 1)
    spec = op._circulant_spectrum.reshape((1, m) + (1,) * (x.ndim - 1))
    workers = fft_workers()
    xf = scipy.fft.fft(blocks, axis=1, workers=workers)
    xf *= spec
    y = scipy.fft.ifft(xf, axis=1, workers=workers, overwrite_x=True)[:, :step]
    return y.reshape((nblocks * step,) + x.shape[1:])[:n]


def prefers_fast(op: TruncatedOperator, factor: Optional[float] = None) -> bool:
    factor = CROSSOVER_FACTOR if factor is None else factor
    return op.degree > factor * math.log2(max(op.dim, 2))


def power(op: TruncatedOperator, x, n: int, fast: Optional[bool] = None) -> np.ndarray:
    """``A^n x`` by repeated application."""
    use_fast = prefers_fast(op) if fast is None else fast
    step = apply_fast if use_fast else apply
    y = _check_input(op, x).copy()
    for _ in range(n):
        y = step(op, y)
    return y


@dataclass
class OrbitRecord:
    schedule: list[int]
    iterate_norms: list[float]
    # per target: (best distance, achieving power)
    visit_distances: list[tuple[float, int]] = field(default_factory=list)
    # per target and scheduled power: running best (distance, power); feeds the CSV
    running_best: list[list[tuple[float, int]]] = field(default_factory=list)

    def csv_header(self) -> list[str]:
        head = ["n", "iterate_norm"]
        for t in range(len(self.visit_distances)):
            head += [f"best_distance_{t}", f"best_n_{t}"]
        return head

    def csv_rows(self) -> list[list[str]]:
        rows = []
        for k, (n, norm) in enumerate(zip(self.schedule, self.iterate_norms)):
            row = [str(n), repr(norm)]
            for per_target in self.running_best:
                dist, best_n = per_target[k]
                row += [repr(dist), str(best_n)]
            rows.append(row)
        return rows


def orbit(
    op: TruncatedOperator,
    x,
    schedule: Sequence[int],
    targets: Sequence = (),
    fast: Optional[bool] = None,
) -> OrbitRecord:
    """Iterate ``A`` on ``x``, recording norms and target distances at scheduled powers."""
    x = _check_input(op, x)
    if x.ndim != 1:
        raise ValueError("orbit expects a single vector")
    schedule = [int(n) for n in schedule]
    if not schedule:
        raise ValueError("empty schedule")
    if any(b <= a for a, b in zip(schedule, schedule[1:])) or schedule[0] < 0:
        raise ValueError("schedule must be strictly increasing and nonnegative")
    targets = [_check_input(op, g) for g in targets]

    step = apply_fast if (prefers_fast(op) if fast is None else fast) else apply
    norms: list[float] = []
    best = [(math.inf, -1)] * len(targets)
    running: list[list[tuple[float, int]]] = [[] for _ in targets]
    y, done = x.copy(), 0
    for n in schedule:
        for _ in range(n - done):
            y = step(op, y)
        done = n
        norms.append(float(np.linalg.norm(y)))
        for t, g in enumerate(targets):
            dist = float(np.linalg.norm(y - g))
            if dist < best[t][0]:
                best[t] = (dist, n)
            running[t].append(best[t])
    return OrbitRecord(schedule=schedule, iterate_norms=norms, visit_distances=best, running_best=running)
