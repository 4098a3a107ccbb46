"""Disc-algebra symbols and one-sided certificates for the two hypotheses

    phi(T) meets T      (boundary hypothesis)
    phi(D) meets T      (disc hypothesis)

under which phi(S*) is shown to carry a hypercyclic subspace.

A symbol is a finite Taylor polynomial ``sum a_k z^k`` together with a
certified bound ``tail_bound`` on the uniform distance over the closed disc
between the true function and that polynomial.  Everything here is evaluated
on the polynomial part; callers widen every certificate by ``tail_bound``.

Certificates are one-sided: a returned witness proves the hypothesis (up to
``tol + tail_bound``), while ``None`` only means nothing was found.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

__all__ = [
    "Symbol",
    "BoundaryWitness",
    "DiscWitness",
    "HypothesisReport",
    "Verdict",
    "evaluate",
    "sup_norm_bound",
    "check_boundary_hypothesis",
    "check_disc_hypothesis",
    "main_theorem_check",
    "parse_symbol_line",
    "format_symbol_line",
    "REPORT_CSV_COLUMNS",
]

# evaluation just outside the closed disc is tolerated up to this slack
DISC_SLACK = 1e-12

DEFAULT_BOUNDARY_GRID = 4096
DEFAULT_DISC_GRID = 128
DEFAULT_MARGIN = 1e-3
DEFAULT_TOL = 1e-10

_MAX_BISECTIONS = 200


@dataclass(frozen=True)
class Symbol:
    """Polynomial part ``coeffs`` = (a_0, ..., a_d) of phi plus a uniform tail bound."""

    coeffs: tuple[complex, ...]
    tail_bound: float = 0.0
    label: str = ""

    def __post_init__(self):
        coeffs = tuple(complex(c) for c in self.coeffs)
        if not coeffs:
            raise ValueError("symbol needs at least one coefficient")
        if len(coeffs) > 1 and coeffs[-1] == 0:
            raise ValueError("trailing coefficient is zero; strip it or use Symbol.polynomial")
        if not all(math.isfinite(c.real) and math.isfinite(c.imag) for c in coeffs):
            raise ValueError("coefficients must be finite")
        tail = float(self.tail_bound)
        if not (math.isfinite(tail) and tail >= 0):
            raise ValueError(f"tail_bound must be finite and nonnegative, got {self.tail_bound!r}")
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "tail_bound", tail)

    @classmethod
    def polynomial(cls, *coeffs, tail_bound: float = 0.0, label: str = "") -> "Symbol":
        """Build from (a_0, a_1, ...), dropping trailing zeros."""
        cs = [complex(c) for c in coeffs]
        while len(cs) > 1 and cs[-1] == 0:
            cs.pop()
        return cls(tuple(cs), tail_bound=tail_bound, label=label)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def as_array(self) -> np.ndarray:
        return np.asarray(self.coeffs, dtype=complex)

    def __call__(self, z):
        return evaluate(self, z)


def _horner(coeffs: Sequence[complex], z: np.ndarray) -> np.ndarray:
    acc = np.zeros(z.shape, dtype=complex)
    for a in reversed(coeffs):
        acc = acc * z + a
    return acc


def evaluate(s: Symbol, z):
    """Horner evaluation of the polynomial part of ``s`` at ``z`` (scalar or array).

    Scalars are routed through the same array kernel, so ``evaluate(s, z[k])``
    reproduces ``evaluate(s, z)[k]`` bit for bit.

    Raises ValueError for any point with ``|z| > 1 + 1e-12``; the tail bound
    says nothing outside the closed disc.
    """
    scalar = np.ndim(z) == 0
    zz = np.atleast_1d(np.asarray(z, dtype=complex))
    if zz.size and np.max(np.abs(zz)) > 1 + DISC_SLACK:
        raise ValueError("evaluation point outside the closed unit disc")
    out = _horner(s.coeffs, zz)
    return complex(out[0]) if scalar else out


def sup_norm_bound(s: Symbol) -> float:
    """``sum |a_k| + tail_bound``; majorizes sup |phi| on the closed disc and ||phi(S*)||."""
    return float(np.sum(np.abs(s.as_array()))) + s.tail_bound


class Verdict(str, enum.Enum):
    SUBSPACE_GUARANTEED = "subspace_guaranteed"
    HYPERCYCLIC_ONLY = "hypercyclic_only"
    NO_CONCLUSION = "no_conclusion"


@dataclass(frozen=True)
class BoundaryWitness:
    theta: float
    lam: complex
    value: complex
    defect: float


@dataclass(frozen=True)
class DiscWitness:
    z_low: complex
    z_high: complex
    z_cross: complex
    value_low: complex
    value_high: complex
    value_cross: complex
    margin: float

    @property
    def cross_defect(self) -> float:
        return abs(abs(self.value_cross) - 1.0)


def _modulus_gap(s: Symbol, z) -> np.ndarray:
    return np.abs(evaluate(s, z)) - 1.0


def check_boundary_hypothesis(
    s: Symbol, grid_size: int = DEFAULT_BOUNDARY_GRID, tol: float = DEFAULT_TOL
) -> Optional[BoundaryWitness]:
    """Look for theta with ``||phi(e^{i theta})| - 1| <= tol``.

    Samples ``|phi| - 1`` on ``grid_size`` equispaced angles.  The first grid
    point already within ``tol`` wins; otherwise the first sign change (with
    wraparound) is bisected.  Returns None when neither is found.
    """
    if grid_size < 8:
        raise ValueError("grid_size must be at least 8")
    if not tol > 0:
        raise ValueError("tol must be positive")

    thetas = 2 * np.pi * np.arange(grid_size) / grid_size
    gaps = _modulus_gap(s, np.exp(1j * thetas))

    close = np.flatnonzero(np.abs(gaps) <= tol)
    if close.size:
        k = int(close[0])
        return _boundary_witness(s, float(thetas[k]))

    nxt = np.roll(gaps, -1)
    for k in np.flatnonzero(np.sign(gaps) != np.sign(nxt)):
        lo = float(thetas[k])
        hi = lo + 2 * np.pi / grid_size
        theta = _bisect(lambda t: float(_modulus_gap(s, np.exp(1j * t))), lo, hi, float(gaps[k]), tol)
        if theta is not None:
            return _boundary_witness(s, theta % (2 * np.pi))
    return None


def _boundary_witness(s: Symbol, theta: float) -> BoundaryWitness:
    lam = complex(np.exp(1j * theta))
    value = evaluate(s, lam)
    return BoundaryWitness(theta=theta, lam=lam, value=value, defect=abs(abs(value) - 1.0))


def _bisect(f, lo: float, hi: float, f_lo: float, tol: float) -> Optional[float]:
    # invariant: f(lo) and f(hi) have opposite signs
    for _ in range(_MAX_BISECTIONS):
        mid = 0.5 * (lo + hi)
        f_mid = f(mid)
        if abs(f_mid) <= tol:
            return mid
        if mid in (lo, hi):
            return None
        if (f_mid < 0) == (f_lo < 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return None


def check_disc_hypothesis(
    s: Symbol,
    grid_size: int = DEFAULT_DISC_GRID,
    margin: float = DEFAULT_MARGIN,
    tol: float = DEFAULT_TOL,
) -> Optional[DiscWitness]:
    """Certify that ``|phi|`` takes the value 1 somewhere in the open disc.

    The polar grid uses radii ``i / grid_size`` (i < grid_size) and angles
    ``2 pi j / grid_size``, so every node is strictly inside D.  The deepest
    sublevel point (min |phi|) and the highest superlevel point (max |phi|)
    serve as witnesses when they clear ``1 -/+ margin``; ``|phi| - 1`` is then
    bisected along the straight segment joining them, which stays in D.
    """
    if grid_size < 8:
        raise ValueError("grid_size must be at least 8")
    if not (margin > 0 and tol > 0):
        raise ValueError("margin and tol must be positive")

    radii = np.arange(grid_size) / grid_size
    angles = 2 * np.pi * np.arange(grid_size) / grid_size
    nodes = (radii[:, None] * np.exp(1j * angles)[None, :]).ravel()
    mod = np.abs(evaluate(s, nodes))

    i_low, i_high = int(np.argmin(mod)), int(np.argmax(mod))
    if not (mod[i_low] < 1 - margin and mod[i_high] > 1 + margin):
        return None
    z_low, z_high = complex(nodes[i_low]), complex(nodes[i_high])

    def gap(t: float) -> float:
        return float(_modulus_gap(s, z_low + t * (z_high - z_low)))

    t = _bisect(gap, 0.0, 1.0, gap(0.0), tol)
    if t is None:
        return None
    z_cross = z_low + t * (z_high - z_low)
    return DiscWitness(
        z_low=z_low,
        z_high=z_high,
        z_cross=z_cross,
        value_low=evaluate(s, z_low),
        value_high=evaluate(s, z_high),
        value_cross=evaluate(s, z_cross),
        margin=margin,
    )


REPORT_CSV_COLUMNS = (
    "label", "verdict", "theta_star", "defect",
    "zlow_re", "zlow_im", "zhigh_re", "zhigh_im", "zc_re", "zc_im",
)


@dataclass(frozen=True)
class HypothesisReport:
    label: str
    boundary: Optional[BoundaryWitness]
    disc: Optional[DiscWitness]
    tail_bound: float
    tolerances: dict = field(default_factory=dict)

    @property
    def verdict(self) -> Verdict:
        if self.disc is None:
            return Verdict.NO_CONCLUSION
        if self.boundary is None:
            return Verdict.HYPERCYCLIC_ONLY
        return Verdict.SUBSPACE_GUARANTEED

    def to_kv(self) -> str:
        lines = [f"label={self.label}", f"verdict={self.verdict.value}", f"tail_bound={self.tail_bound!r}"]
        for key, val in sorted(self.tolerances.items()):
            lines.append(f"{key}={val!r}")
        b = self.boundary
        lines.append(f"boundary_witness={'found' if b else 'not_found'}")
        if b:
            lines += [f"theta_star={b.theta!r}", f"defect={b.defect!r}",
                      f"phi_lambda_re={b.value.real!r}", f"phi_lambda_im={b.value.imag!r}"]
        d = self.disc
        lines.append(f"disc_witness={'found' if d else 'not_found'}")
        if d:
            for name, z in (("zlow", d.z_low), ("zhigh", d.z_high), ("zc", d.z_cross)):
                lines += [f"{name}_re={z.real!r}", f"{name}_im={z.imag!r}"]
            lines += [f"abs_phi_zlow={abs(d.value_low)!r}", f"abs_phi_zhigh={abs(d.value_high)!r}",
                      f"cross_defect={d.cross_defect!r}"]
        return "\n".join(lines) + "\n"

    def csv_row(self) -> list[str]:
        b, d = self.boundary, self.disc
        row = [self.label, self.verdict.value]
        row += [repr(b.theta), repr(b.defect)] if b else ["", ""]
        if d:
            for z in (d.z_low, d.z_high, d.z_cross):
                row += [repr(z.real), repr(z.imag)]
        else:
            row += [""] * 6
        return row


def main_theorem_check(
    s: Symbol,
    boundary_grid: int = DEFAULT_BOUNDARY_GRID,
    disc_grid: int = DEFAULT_DISC_GRID,
    margin: float = DEFAULT_MARGIN,
    tol: float = DEFAULT_TOL,
) -> HypothesisReport:
    """Run both checks.  The verdict never asserts that a hypothesis fails."""
    return HypothesisReport(
        label=s.label,
        boundary=check_boundary_hypothesis(s, boundary_grid, tol),
        disc=check_disc_hypothesis(s, disc_grid, margin, tol),
        tail_bound=s.tail_bound,
        tolerances={"boundary_grid": boundary_grid, "disc_grid": disc_grid, "margin": margin, "tol": tol},
    )


def parse_symbol_line(line: str) -> Symbol:
    """Parse ``label ; a0_re a0_im ; a1_re a1_im ; ... ; tail=<real>``.

    The ``tail=`` field is optional and defaults to 0; trailing zero
    coefficients are dropped.
    """
    fields = [f.strip() for f in line.strip().split(";")]
    if len(fields) < 2:
        raise ValueError(f"expected 'label ; re im ; ...', got {line!r}")
    label, rest = fields[0], fields[1:]
    tail = 0.0
    if rest and rest[-1].startswith("tail="):
        tail = float(rest.pop()[len("tail="):])
    coeffs = []
    for f in rest:
        parts = f.split()
        if len(parts) != 2:
            raise ValueError(f"coefficient field {f!r} must hold 're im'")
        coeffs.append(complex(float(parts[0]), float(parts[1])))
    if not coeffs:
        raise ValueError(f"no coefficients in {line!r}")
    return Symbol.polynomial(*coeffs, tail_bound=tail, label=label)


def format_symbol_line(s: Symbol) -> str:
    parts = [s.label] + [f"{c.real!r} {c.imag!r}" for c in s.coeffs] + [f"tail={s.tail_bound!r}"]
    return " ; ".join(parts)
