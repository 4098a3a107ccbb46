"""Eigenvector machinery behind the hereditary hypercyclicity of phi(S*).

For |lambda| < 1 the sequence v_lambda = (1, lambda, lambda^2, ...) satisfies
S* v = lambda v, hence phi(S*) v = phi(lambda) v.  Kernels with
|phi(lambda)| < 1 (sublevel) contract under iteration, kernels with
|phi(lambda)| > 1 (superlevel) expand; density of both spans is what drives
hypercyclicity.  This module samples such kernels, fits targets with them,
and greedily builds vectors whose scheduled iterates visit given targets.

Coefficient convention: kernels are the coefficient sequences (lambda^n), so
the pairing <f, v_lambda> = sum f_n conj(lambda)^n evaluates f at conj(lambda).
"""

from __future__ import annotations

import enum
import logging
import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
import scipy.linalg
from scipy.stats import qmc

from hyplab.shiftop import apply, build_truncation
from hyplab.symbol import Symbol, evaluate

__all__ = [
    "KernelVector",
    "EigenFamily",
    "Region",
    "SpanFit",
    "StepDiagnostics",
    "ConstructionResult",
    "RegionEmptyError",
    "IllConditionedGramError",
    "kernel_vector",
    "kernel_matrix",
    "kernel_gram",
    "eigen_residual_bound",
    "sample_eigen_family",
    "span_residual",
    "construct_hypercyclic_approx",
]

log = logging.getLogger(__name__)

BOUNDARY_GUARD = 1e-6
GRAM_COND_LIMIT = 1e15
MIN_SEPARATION = 1e-6
DEFAULT_RIDGE = 1e-10


class RegionEmptyError(LookupError):
    """No admissible eigenvalue found at the searched resolution."""


class IllConditionedGramError(np.linalg.LinAlgError):
    def __init__(self, cond: float):
        super().__init__(f"Gram condition estimate {cond:.3e} exceeds {GRAM_COND_LIMIT:.0e}; retry with ridge > 0")
        self.cond = cond


@dataclass(frozen=True, eq=False)
class KernelVector:
    lam: complex
    entries: np.ndarray
    tail_norm: float

    @property
    def dim(self) -> int:
        return len(self.entries)


def kernel_vector(lam: complex, N: int) -> KernelVector:
    """First N coefficients of the Cauchy kernel, with the l^2 norm of the rest."""
    lam = complex(lam)
    if abs(lam) > 1 - BOUNDARY_GUARD:
        raise ValueError(f"|lambda| = {abs(lam)} too close to the unit circle")
    if N < 1:
        raise ValueError("N must be at least 1")
    r = abs(lam)
    # (1 - r)(1 + r) avoids the cancellation in 1 - r^2 near the circle
    tail = r**N / np.sqrt((1 - r) * (1 + r))
    return KernelVector(lam=lam, entries=kernel_matrix([lam], N)[:, 0], tail_norm=float(tail))


def kernel_matrix(lams, N: int) -> np.ndarray:
    """Columns v_lambda truncated to N entries, shape (N, len(lams)).

    Built by running products, so ``v[n] = fl(lam * v[n-1])`` and the backward
    shift maps each column to exactly ``lam`` times itself on the first N-1
    entries.  Complex ``**`` is off by ~1e-14 relative at n ~ 250.
    """
    lams = np.asarray(lams, dtype=complex)
    steps = np.empty((N, len(lams)), dtype=complex)
    steps[0] = 1
    steps[1:] = lams[None, :]
    return np.cumprod(steps, axis=0)


def kernel_gram(lams, N: int) -> np.ndarray:
    """``G[j, k] = sum_{n<N} (lam_j conj(lam_k))^n`` in closed form."""
    lams = np.asarray(lams, dtype=complex)
    w = lams[:, None] * np.conj(lams)[None, :]
    return (1 - w**N) / (1 - w)


def eigen_residual_bound(s: Symbol, lam: complex, N: int) -> float:
    """Bound on ``||A_N v - phi(lam) v||`` for the truncated kernel v.

    The residual lives on the last d coordinates: entry N-j (1 <= j <= d)
    misses the terms a_k lam^(N-j+k) with k >= j, each of modulus <= |lam|^N.
    """
    a = np.abs(s.as_array())
    partial = np.cumsum(a[::-1])[::-1]  # partial[j] = sum_{k>=j} |a_k|
    return float(abs(lam) ** N * np.sqrt(np.sum(partial[1:] ** 2)))


class Region(str, enum.Enum):
    SUBLEVEL = "sublevel"
    SUPERLEVEL = "superlevel"


@dataclass(frozen=True, eq=False)
class EigenFamily:
    label: str
    region: Region
    lams: np.ndarray
    values: np.ndarray
    margin: float
    interior_margin: float

    def __len__(self) -> int:
        return len(self.lams)

    def head(self, count: int) -> "EigenFamily":
        return EigenFamily(self.label, self.region, self.lams[:count], self.values[:count],
                           self.margin, self.interior_margin)

    def csv_rows(self) -> list[list[str]]:
        return [[repr(float(l.real)), repr(float(l.imag)), repr(float(v.real)), repr(float(v.imag))]
                for l, v in zip(self.lams, self.values)]


def sample_eigen_family(
    s: Symbol,
    region,
    count: int,
    margin: float = 1e-3,
    interior_margin: float = 1e-3,
    max_radius: Optional[float] = None,
    max_candidates: int = 1 << 16,
) -> EigenFamily:
    """Pick ``count`` eigenvalues from {|phi| <= 1 - margin} or {|phi| >= 1 + margin}.

    Candidates come from an unscrambled 2-d Halton sequence mapped
    area-uniformly onto the disc of radius ``min(max_radius, 1 - interior_margin)``,
    so families are deterministic and a smaller count is a prefix of a larger
    one.  Points closer than 1e-6 to an accepted one are skipped.
    """
    region = Region(region)
    if count < 1:
        raise ValueError("count must be positive")
    radius = 1 - interior_margin if max_radius is None else min(max_radius, 1 - interior_margin)

    halton = qmc.Halton(d=2, scramble=False)
    picked: list[complex] = []
    seen = 0
    while len(picked) < count and seen < max_candidates:
        batch = halton.random(min(4096, max_candidates - seen))
        seen += len(batch)
        cand = radius * np.sqrt(batch[:, 0]) * np.exp(2j * np.pi * batch[:, 1])
        mod = np.abs(evaluate(s, cand))
        ok = mod <= 1 - margin if region is Region.SUBLEVEL else mod >= 1 + margin
        for z in cand[ok]:
            if all(abs(z - p) >= MIN_SEPARATION for p in picked):
                picked.append(complex(z))
                if len(picked) == count:
                    break
    if len(picked) < count:
        raise RegionEmptyError(
            f"found {len(picked)} of {count} {region.value} points for {s.label or 'symbol'} "
            f"among {seen} candidates"
        )
    lams = np.array(picked)
    return EigenFamily(label=s.label, region=region, lams=lams, values=evaluate(s, lams),
                       margin=margin, interior_margin=1 - radius)


@dataclass(frozen=True, eq=False)
class SpanFit:
    residuals: np.ndarray
    coeffs: np.ndarray  # shape (len(family), n_targets)
    cond: float


def span_residual(targets, fam: EigenFamily, N: int, ridge: float = 0.0) -> SpanFit:
    """Regularized least-squares fit of each target by the family's kernels.

    Minimizes ``||sum_j c_j v_j - g||^2 + ridge ||c||^2`` through the normal
    equations built from the closed-form Gram matrix.  With ``ridge == 0`` a
    condition estimate above 1e15 raises :class:`IllConditionedGramError`.
    """
    if len(fam) == 0:
        raise ValueError("empty family")
    if ridge < 0:
        raise ValueError("ridge must be nonnegative")
    G = np.atleast_2d(np.asarray(targets, dtype=complex))
    if G.shape[1] != N:
        raise ValueError(f"targets must have length {N}")
    G = G.T

    gram = kernel_gram(fam.lams, N)
    cond = float(np.linalg.cond(gram))
    if ridge == 0 and cond > GRAM_COND_LIMIT:
        raise IllConditionedGramError(cond)
    V = kernel_matrix(fam.lams, N)
    # V^H V is the transpose of the Gram matrix as defined above
    normal = gram.T + ridge * np.eye(len(fam))
    with warnings.catch_warnings():
        # conditioning is reported through ``cond``; scipy's warning adds nothing
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        coeffs = scipy.linalg.solve(normal, V.conj().T @ G, assume_a="her")
    residuals = np.linalg.norm(V @ coeffs - G, axis=0)
    return SpanFit(residuals=residuals, coeffs=coeffs, cond=cond)


@dataclass(frozen=True)
class StepDiagnostics:
    step: int
    power: int
    residual: float  # ||A^n x - g|| right after this step
    update_norm: float
    damping: float  # max over the superlevel family of |phi(lam)|^-n
    cond: float  # condition estimate of the column-scaled design matrix
    step_length: float = 1.0  # |t| in x <- x + t u


@dataclass(eq=False)
class ConstructionResult:
    x: np.ndarray
    schedule: list[int]
    errors: list[float]  # ||A^{n_k} x - g_k||, re-verified by dense iteration
    eps: float
    steps: list[StepDiagnostics] = field(default_factory=list)

    @property
    def success(self) -> bool:
        return all(e <= self.eps for e in self.errors)

    @property
    def failed_step(self) -> Optional[int]:
        for k, e in enumerate(self.errors):
            if e > self.eps:
                return k
        return None

    def to_kv(self) -> str:
        lines = [f"success={str(self.success).lower()}", f"eps={self.eps!r}",
                 f"schedule={','.join(map(str, self.schedule))}"]
        if not self.success:
            k = self.failed_step
            lines += [f"failed_step={k}", f"failed_residual={self.errors[k]!r}"]
        for k, e in enumerate(self.errors):
            lines.append(f"error_{k}={e!r}")
        for d in self.steps:
            lines += [f"step_{d.step}_residual={d.residual!r}", f"step_{d.step}_update_norm={d.update_norm!r}",
                      f"step_{d.step}_damping={d.damping!r}", f"step_{d.step}_cond={d.cond!r}",
                      f"step_{d.step}_step_length={d.step_length!r}"]
        lines.append(f"x_norm={float(np.linalg.norm(self.x))!r}")
        return "\n".join(lines) + "\n"


def _powers_of_block(op, V: np.ndarray, schedule: Sequence[int]) -> list[np.ndarray]:
    out, Y, done = [], V, 0
    for n in schedule:
        for _ in range(n - done):
            Y = apply(op, Y)
        done = n
        out.append(Y)
    return out


def _dense_verify(dense: np.ndarray, x: np.ndarray, schedule, targets) -> list[float]:
    errs, y, done = [], x.copy(), 0
    for n, g in zip(schedule, targets):
        for _ in range(n - done):
            y = dense @ y
        done = n
        errs.append(float(np.linalg.norm(y - g)))
    return errs


def _ridge_fit(columns: np.ndarray, rhs: np.ndarray, ridge: float):
    """Least squares on normalized columns with Tikhonov damping; returns raw coefficients."""
    scale = np.linalg.norm(columns, axis=0)
    scale[scale == 0] = 1.0
    design = np.vstack([columns / scale, np.sqrt(ridge) * np.eye(columns.shape[1])])
    padded = np.concatenate([rhs, np.zeros(columns.shape[1])])
    c, _, _, sv = scipy.linalg.lstsq(design, padded, lapack_driver="gelsd")
    cond = float(sv[0] / sv[-1]) if sv[-1] > 0 else float("inf")
    return c / scale, cond


def construct_hypercyclic_approx(
    s: Symbol,
    targets,
    schedule: Sequence[int],
    eps: float = 1e-2,
    N: int = 512,
    superlevel: Optional[EigenFamily] = None,
    sublevel: Optional[EigenFamily] = None,
    family_size: int = 64,
    max_radius: float = 0.75,
    ridge: Optional[float] = None,
    basis: str = "kernels",
) -> ConstructionResult:
    """Greedy search for x with ``||A^{n_k} x - g_k|| <= eps`` for every k.

    Step k fits the current miss ``g_k - A^{n_k} x`` with
    ``u_k = sum_j c_j v_j`` over the superlevel family.  After ``n_k`` powers
    the columns are ``phi(lam_j)^{n_k} v_j`` (taken here exactly on the
    truncation, tails included), so ``u_k`` itself is damped by
    ``|phi(lam_j)|^{-n_k}``.  Whatever ``u_k`` still does at earlier powers
    ``n_i`` is then cancelled by a sublevel combination, which in turn fades
    under the larger power ``n_k``.  Ridge defaults to 1e-10 here.

    ``basis="coordinates"`` replaces the kernels by e_0, ..., e_{N-1}.  Nothing
    contracts in that basis, so each step solves one stacked system: hit
    ``g_k`` at ``n_k`` while keeping every earlier miss as it was (ridge
    defaults to 0).  Kernel spans with |lambda| < 1 are numerically confined
    to the first ~100 coordinates and cannot place mass far out, which is
    exactly what the Rolewicz shift 2S* needs; the coordinate basis can.

    Feasibility is not guaranteed: check ``result.success`` and
    ``result.failed_step``.  Reported errors come from an independent dense
    matrix iteration, not from the fitting path.
    """
    schedule = [int(n) for n in schedule]
    targets = [np.asarray(g, dtype=complex) for g in targets]
    if len(targets) != len(schedule) or not schedule:
        raise ValueError("need one target per scheduled power")
    if any(b <= a for a, b in zip(schedule, schedule[1:])) or schedule[0] < 0:
        raise ValueError("schedule must be strictly increasing")
    if any(g.shape != (N,) for g in targets):
        raise ValueError(f"targets must have length {N}")
    if basis not in ("kernels", "coordinates"):
        raise ValueError(f"unknown basis {basis!r}")

    op = build_truncation(s, N)
    if basis == "kernels":
        ridge = DEFAULT_RIDGE if ridge is None else ridge
        if superlevel is None:
            superlevel = sample_eigen_family(s, Region.SUPERLEVEL, family_size, max_radius=max_radius)
        if sublevel is None and len(schedule) > 1:
            sublevel = sample_eigen_family(s, Region.SUBLEVEL, family_size, max_radius=max_radius)
        V_sup = kernel_matrix(superlevel.lams, N)
        sup_powers = _powers_of_block(op, V_sup, schedule)
        if sublevel is not None:
            V_sub = kernel_matrix(sublevel.lams, N)
            sub_powers = _powers_of_block(op, V_sub, schedule)
        damping_base = float(np.max(np.abs(superlevel.values)))
    else:
        ridge = 0.0 if ridge is None else ridge
        basis_powers = _powers_of_block(op, np.eye(N, dtype=complex), schedule)
        damping_base = float("nan")

    x = np.zeros(N, dtype=complex)
    dense = op.dense()
    best_x, best_err = x, _dense_verify(dense, x, schedule, targets)
    steps = []
    for k, n in enumerate(schedule):
        hits = _powers_of_block(op, x[:, None], schedule[: k + 1])
        miss = targets[k] - hits[k][:, 0]
        if basis == "kernels":
            c, cond = _ridge_fit(sup_powers[k], miss, ridge)
            u = V_sup @ c
            if k > 0:
                spoil = np.concatenate([sup_powers[i] @ c for i in range(k)])
                d, _ = _ridge_fit(np.vstack(sub_powers[:k]), -spoil, ridge)
                u = u + V_sub @ d
        else:
            rows = np.vstack([basis_powers[k]] + basis_powers[:k])
            hold = [np.zeros(N, dtype=complex)] * k
            u, cond = _ridge_fit(rows, np.concatenate([miss] + hold), ridge)
        # least-squares step length on the stacked visits so far; t = 1 when
        # the fit is clean, smaller when rounding has wrecked it
        both = _powers_of_block(op, np.stack([x, u], axis=1), schedule[: k + 1])
        r = np.concatenate([b[:, 0] - g for b, g in zip(both, targets)])
        w = np.concatenate([b[:, 1] for b in both])
        ww = np.vdot(w, w).real
        t = -np.vdot(w, r) / ww if ww > 0 and np.isfinite(ww) else 0.0
        if not np.isfinite(t) or np.linalg.norm(r + t * w) > np.linalg.norm(r):
            t = 0.0
        x = x + t * u
        after = _powers_of_block(op, x[:, None], [n])[0][:, 0]
        steps.append(StepDiagnostics(
            step=k,
            power=n,
            residual=float(np.linalg.norm(after - targets[k])),
            update_norm=float(np.linalg.norm(u)),
            damping=damping_base ** -n,
            cond=cond,
            step_length=float(abs(t)),
        ))
        log.debug("step %d (n=%d): residual %.3e, |u| %.3e", k, n, steps[-1].residual, steps[-1].update_norm)
        err = _dense_verify(dense, x, schedule, targets)
        if max(err) <= max(best_err):
            best_x, best_err = x, err

    # the last iterate is normally the best; when rounding has taken over the
    # returned vector is the best verified one, never worse than x = 0
    return ConstructionResult(x=best_x, schedule=schedule, errors=best_err, eps=eps, steps=steps)
