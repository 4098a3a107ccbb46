"""Essential spectrum of phi(S*) and finite-dimensional evidence of non-Fredholmness.

* ``essential_spectrum_curve`` samples phi on the unit circle, the image of
  sigma_e(S*) = T under phi.
* ``sigma_min_probe`` measures the smallest singular value of A_N - mu I;
  its decay in N is the finite shadow of mu being in the essential spectrum.
* ``lemma_witness`` / ``min_norm_preimage_growth`` reproduce the sparse
  sequence whose preimage under S* - lambda I (|lambda| = 1) leaves l^2.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import scipy.linalg

from hyplab.shiftop import build_truncation
from hyplab.symbol import Symbol, evaluate

__all__ = [
    "SpectrumCurve",
    "WitnessSequence",
    "ProbeConvergenceError",
    "essential_spectrum_curve",
    "sigma_min_probe",
    "lemma_witness",
    "witness_indices",
    "min_norm_preimage_growth",
    "canonical_preimage",
    "WITNESS_FULL_NORM",
]

DENSE_THRESHOLD = 512
UNIMODULAR_TOL = 1e-12

# l^2 norm of the untruncated witness: sqrt(sum_n 4^-n)
WITNESS_FULL_NORM = float(np.sqrt(4.0 / 3.0))


class ProbeConvergenceError(RuntimeError):
    """Inverse iteration stopped before reaching the requested accuracy."""


@dataclass(frozen=True, eq=False)
class SpectrumCurve:
    label: str
    thetas: np.ndarray
    points: np.ndarray
    # sum k |a_k|, a Lipschitz constant for theta -> phi(e^{i theta})
    derivative_bound: float

    @property
    def size(self) -> int:
        return len(self.points)

    def max_step(self) -> float:
        """Largest gap between consecutive samples, wraparound included."""
        return float(np.max(np.abs(np.roll(self.points, -1) - self.points)))

    def step_bound(self) -> float:
        return self.derivative_bound * 2 * np.pi / self.size

    def csv_rows(self) -> list[list[str]]:
        return [
            [str(k), repr(float(t)), repr(float(p.real)), repr(float(p.imag))]
            for k, (t, p) in enumerate(zip(self.thetas, self.points))
        ]


def essential_spectrum_curve(s: Symbol, M: int) -> SpectrumCurve:
    """phi(e^{2 pi i k / M}) for k < M; exact essential-spectrum points for polynomial symbols."""
    if M < 8:
        raise ValueError("need at least 8 samples")
    thetas = 2 * np.pi * np.arange(M) / M
    points = evaluate(s, np.exp(1j * thetas))
    deriv = float(sum(k * abs(a) for k, a in enumerate(s.coeffs)))
    return SpectrumCurve(label=s.label, thetas=thetas, points=points, derivative_bound=deriv)


def sigma_min_probe(
    s: Symbol,
    mu: complex,
    N: int,
    dense_threshold: int = DENSE_THRESHOLD,
    tol: float = 1e-8,
    maxiter: int = 1000,
    seed: int = 0,
) -> float:
    """Smallest singular value of the truncation ``B = A_N - mu I``.

    Dense SVD up to ``dense_threshold``.  Above it, the smallest eigenvalue
    of the banded Hermitian matrix ``B^H B`` is taken from LAPACK's banded
    solver.  Squaring costs accuracy only when sigma is tiny compared with
    ||B||; then sigma is refined by inverse iteration on ``B^H B`` (two
    banded triangular solves per step), which converges fast because a tiny
    singular value is isolated.  A zero diagonal (``a_0 == mu``) makes B
    singular and returns 0.0 directly.
    """
    if N < 2:
        raise ValueError("N must be at least 2")
    op = build_truncation(s, N)
    c = op.coeffs[: N].copy()
    c[0] -= mu
    if c[0] == 0:
        return 0.0
    if N <= dense_threshold:
        dense = op.dense() - mu * np.eye(N)
        return float(scipy.linalg.svdvals(dense)[-1])
    lam = scipy.linalg.eig_banded(_normal_band(c, N), lower=True, eigvals_only=True,
                                  select="i", select_range=(0, 0))[0]
    scale = float(np.sum(np.abs(c))) ** 2
    if lam >= SQUARING_SAFE * scale:
        return float(np.sqrt(lam))
    return _inverse_iteration(c, N, tol, maxiter, seed)


# sigma^2 above this fraction of ||B||^2 keeps about 1e-10 relative accuracy after squaring
SQUARING_SAFE = 1e-6


def _normal_band(c: np.ndarray, N: int) -> np.ndarray:
    """Lower band storage of ``B^H B`` for upper-triangular Toeplitz B with first row c."""
    d = len(c) - 1
    band = np.zeros((d + 1, N), dtype=complex)
    for m in range(d + 1):
        # (B^H B)[j+m, j] = sum_{t <= j} conj(c[t+m]) c[t]
        for t in range(d + 1 - m):
            band[m, t: N - m] += np.conj(c[t + m]) * c[t]
    return band


def _inverse_iteration(c: np.ndarray, N: int, tol: float, maxiter: int, seed: int) -> float:
    d = min(len(c) - 1, N - 1)
    upper = np.zeros((d + 1, N), dtype=complex)
    lower = np.zeros((d + 1, N), dtype=complex)
    for k in range(d + 1):
        upper[d - k, k:] = c[k]
        lower[k, : N - k] = np.conj(c[k])

    rng = np.random.default_rng(seed)
    v = rng.normal(size=N) + 1j * rng.normal(size=N)
    v /= np.linalg.norm(v)
    sigma_old = np.inf
    with np.errstate(over="raise", invalid="raise", divide="raise"):
        for _ in range(maxiter):
            try:
                w = scipy.linalg.solve_banded((d, 0), lower, v, check_finite=False)
                u = scipy.linalg.solve_banded((0, d), upper, w, check_finite=False)
                # v^H (B^H B)^{-1} v = ||B^{-H} v||^2 for unit v
                sigma = 1.0 / np.linalg.norm(w)
                v = u / np.linalg.norm(u)
            except (FloatingPointError, np.linalg.LinAlgError) as exc:
                raise ProbeConvergenceError("smallest singular value outside double range") from exc
            if abs(sigma - sigma_old) <= tol * sigma:
                return float(sigma)
            sigma_old = sigma
    raise ProbeConvergenceError(f"no convergence to rtol={tol} in {maxiter} iterations")


def witness_indices(N: int) -> list[int]:
    """Positions i_0 = 0, i_1 = 1, i_{n+1} = i_n + 2^(2^n) below N."""
    out = [0] if N > 0 else []
    i, n = 1, 1
    while i < N:
        out.append(i)
        i += 2 ** (2 ** n)
        n += 1
    return out


@dataclass(frozen=True, eq=False)
class WitnessSequence:
    length: int
    indices: tuple[int, ...]
    lam: Optional[complex]
    entries: np.ndarray

    def norm(self) -> float:
        return float(np.linalg.norm(self.entries))


def lemma_witness(N: int, lam: Optional[complex] = None) -> WitnessSequence:
    """Truncation to N entries of (1, 1/2, 0,0,0, 1/4, 0 x 15, 1/8, ...).

    Entry 2^-n sits at i_n, separated from the next by exactly 2^(2^n) - 1
    zeros.  With ``lam`` given, entry i is multiplied by lam^(i+1).
    """
    if N < 1:
        raise ValueError("N must be at least 1")
    idx = witness_indices(N)
    entries = np.zeros(N, dtype=complex)
    entries[idx] = 2.0 ** -np.arange(len(idx))
    if lam is not None:
        lam = complex(lam)
        if abs(abs(lam) - 1) > UNIMODULAR_TOL:
            raise ValueError("modulation factor must be unimodular")
        entries[idx] *= lam ** (np.asarray(idx) + 1)
    return WitnessSequence(length=N, indices=tuple(idx), lam=lam, entries=entries)


def _check_unimodular(lam: complex) -> complex:
    lam = complex(lam)
    if abs(abs(lam) - 1) > UNIMODULAR_TOL:
        raise ValueError("lambda must lie on the unit circle")
    return lam


def _particular_solution(lam: complex, y: np.ndarray, N: int) -> np.ndarray:
    # x_{n+1} = y_n + lam x_n with x_0 = 0
    p = np.zeros(N, dtype=complex)
    for n in range(N - 1):
        p[n + 1] = y[n] + lam * p[n]
    return p


def min_norm_preimage_growth(lam: complex, y, sizes: Sequence[int]) -> list[float]:
    """Minimal l^2 norm of truncated solutions of (S* - lam I) x = y.

    For each N the first N - 1 equations fix x up to the free value a = x_0:
    ``x = a (1, lam, lam^2, ...) + p``.  The norm is affine in a, so the
    minimum over a is a one-dimensional least-squares problem solved exactly.
    Unbounded growth in N says y is outside the range of S* - lam I.
    """
    lam = _check_unimodular(lam)
    sizes = [int(n) for n in sizes]
    if not sizes or any(b <= a for a, b in zip(sizes, sizes[1:])) or sizes[0] < 1:
        raise ValueError("sizes must be strictly increasing positive integers")
    y = np.asarray(y, dtype=complex)
    if y.ndim != 1 or len(y) < sizes[-1] - 1:
        raise ValueError(f"y needs at least {sizes[-1] - 1} entries, got shape {y.shape}")

    p = _particular_solution(lam, y, sizes[-1])
    u = lam ** np.arange(sizes[-1])
    out = []
    for N in sizes:
        pn, un = p[:N], u[:N]
        a = -np.vdot(un, pn) / np.vdot(un, un).real
        out.append(float(np.linalg.norm(pn + a * un)))
    return out


def canonical_preimage(lam: complex, y, N: int) -> np.ndarray:
    """Truncated preimage with ``x_0 = -sum_n lam^-(n+1) y_n``, the only
    starting value that can give an l^2 solution on the full sequence."""
    lam = _check_unimodular(lam)
    y = np.asarray(y, dtype=complex)
    if len(y) < N - 1:
        raise ValueError(f"y needs at least {N - 1} entries")
    a = -np.sum(y * lam ** -(np.arange(len(y)) + 1.0))
    return _particular_solution(lam, y, N) + a * lam ** np.arange(N)
