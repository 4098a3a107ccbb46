"""Config-driven experiment runner: ``hyplab <kind> --config <path>``.

A config is a flat list of ``key = value`` lines; ``#`` starts a comment.
Every key has a default, so an empty file runs each kind on a preset symbol.
The symbol comes from ``preset``, an inline ``symbol`` line
(``label ; re im ; ... ; tail=x``) or ``symbol_file`` (first non-comment
line), with ``--preset`` on the command line taking precedence.

Each run writes its CSVs, an SVG for the plot-bearing kinds and a
``summary.txt`` key=value report into the output directory.  Exit status is
0 on success, 2 when a hypothesis witness is not found, 1 on errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import math
import os
import statistics
import sys
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np

from hyplab.dynamics import (
    Region,
    RegionEmptyError,
    construct_hypercyclic_approx,
    sample_eigen_family,
)
from hyplab.shiftop import apply, apply_fast, build_truncation, orbit
from hyplab.spectral import (
    essential_spectrum_curve,
    lemma_witness,
    min_norm_preimage_growth,
    sigma_min_probe,
)
from hyplab.symbol import (
    REPORT_CSV_COLUMNS,
    Symbol,
    Verdict,
    main_theorem_check,
    parse_symbol_line,
)

__all__ = [
    "KINDS",
    "PRESETS",
    "ConfigError",
    "ExperimentConfig",
    "load_config",
    "parse_config",
    "run",
    "bench",
    "main",
    "read_vector_csv",
    "write_csv",
]

log = logging.getLogger(__name__)

EXIT_OK, EXIT_ERROR, EXIT_NOT_FOUND = 0, 1, 2

KINDS = ("check", "spectrum", "witness", "orbit", "construct", "bench")


def _expo_symbol() -> Symbol:
    coeffs = [1 / (2 * math.factorial(k)) for k in range(21)]
    # terms beyond k = 40 are below 1e-48 and vanish in the sum
    tail = math.fsum(1 / (2 * math.factorial(k)) for k in range(21, 41))
    return Symbol.polynomial(*coeffs, tail_bound=tail, label="expo")


PRESETS: dict[str, Callable[[], Symbol]] = {
    "shift": lambda: Symbol.polynomial(0, 1, label="shift"),
    "rolewicz2": lambda: Symbol.polynomial(0, 2, label="rolewicz2"),
    "half": lambda: Symbol.polynomial(0, 0.5, label="half"),
    "onepluszz": lambda: Symbol.polynomial(1, 1, label="onepluszz"),
    "expo": _expo_symbol,
}

DEFAULT_PRESET = {
    "check": "onepluszz",
    "spectrum": "shift",
    "witness": "shift",
    "orbit": "rolewicz2",
    "construct": "rolewicz2",
    "bench": "shift",
}


def _ints(text: str) -> tuple[int, ...]:
    return tuple(int(t) for t in text.replace(",", " ").split())


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(t) for t in text.replace(",", " ").split())


def _str(text: str) -> str:
    return text


# key -> (parser, default); the defaults are the documented ones
PARAMS: dict[str, tuple[Callable[[str], object], object]] = {
    "kind": (_str, ""),
    "preset": (_str, ""),
    "symbol": (_str, ""),
    "symbol_file": (_str, ""),
    "out": (_str, "hyplab_out"),
    "seed": (int, 0),
    # check
    "boundary_grid": (int, 4096),
    "disc_grid": (int, 128),
    "margin": (float, 1e-3),
    "tol": (float, 1e-10),
    # spectrum
    "M": (int, 360),
    "probe_sizes": (_ints, ()),
    "probe_mu_re": (float, 1.0),
    "probe_mu_im": (float, 0.0),
    # witness
    "lam_re": (float, 1.0),
    "lam_im": (float, 0.0),
    "sizes": (_ints, (64, 256, 1024, 4096)),
    # orbit / construct
    "N": (int, 512),
    "schedule": (_ints, (40, 80, 120)),
    "targets": (int, 3),
    "support": (int, 8),
    "x_file": (_str, ""),
    "x_scale": (float, 1.0),
    "eps": (float, 1e-2),
    "family_size": (int, 64),
    "max_radius": (float, 0.75),
    "ridge": (_str, ""),
    "basis": (_str, "coordinates"),
    "fast": (_str, "auto"),
    # bench
    "bench_exponents": (_ints, tuple(range(10, 17))),
    "bench_degrees": (_ints, (4, 16, 64)),
    "bench_repeats": (int, 5),
    "bench_tol": (float, 1e-10),
}


class ConfigError(ValueError):
    """Malformed config; the message names the line and field."""


@dataclass
class ExperimentConfig:
    kind: str
    symbol: Symbol
    params: dict = field(default_factory=dict)
    out_dir: Path = Path("hyplab_out")
    seed: int = 0

    def __getitem__(self, key: str):
        return self.params[key]


def parse_config(text: str, source: str = "<config>") -> dict:
    """Parse key=value lines into typed values, defaults filled in."""
    values = {k: default for k, (_, default) in PARAMS.items()}
    seen: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        # the symbol line uses ';' only, so '#' is always a comment
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (t.strip() for t in line.split("=", 1))
        if key not in PARAMS:
            raise ConfigError(f"{source}:{lineno}: unknown field {key!r}")
        if key in seen:
            raise ConfigError(f"{source}:{lineno}: field {key!r} already set on line {seen[key]}")
        parser = PARAMS[key][0]
        try:
            values[key] = parser(value)
        except ValueError as exc:
            raise ConfigError(f"{source}:{lineno}: field {key!r}: cannot parse {value!r} ({exc})") from None
        seen[key] = lineno
    return values


def _resolve_symbol(values: dict, kind: str, base: Path) -> Symbol:
    sources = [k for k in ("preset", "symbol", "symbol_file") if values[k]]
    if len(sources) > 1:
        raise ConfigError(f"symbol given more than once: {', '.join(sources)}")
    try:
        if values["symbol"]:
            return parse_symbol_line(values["symbol"])
        if values["symbol_file"]:
            path = base / values["symbol_file"]
            for line in path.read_text().splitlines():
                if line.strip() and not line.lstrip().startswith("#"):
                    return parse_symbol_line(line)
            raise ConfigError(f"field 'symbol_file': no symbol line in {path}")
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"field 'symbol': {exc}") from None
    name = values["preset"] or DEFAULT_PRESET[kind]
    if name not in PRESETS:
        raise ConfigError(f"field 'preset': unknown preset {name!r} (choose from {', '.join(PRESETS)})")
    return PRESETS[name]()


def load_config(
    kind: str,
    path: Optional[str] = None,
    out: Optional[str] = None,
    preset: Optional[str] = None,
    seed: Optional[int] = None,
) -> ExperimentConfig:
    """Read a config file and apply command-line overrides."""
    if kind not in KINDS:
        raise ConfigError(f"unknown experiment kind {kind!r}")
    text, base = "", Path.cwd()
    if path is not None:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
        base = Path(path).resolve().parent
    values = parse_config(text, source=str(path or "<empty>"))
    if values["kind"] and values["kind"] != kind:
        raise ConfigError(f"field 'kind': config is for {values['kind']!r}, run as {kind!r}")
    if preset is not None:
        values.update(preset=preset, symbol="", symbol_file="")
    if seed is not None:
        values["seed"] = seed
    if not 0 <= values["seed"] < 2**64:
        raise ConfigError("field 'seed': must be an unsigned 64-bit integer")
    if out is not None:
        values["out"] = out
    symbol = _resolve_symbol(values, kind, base)
    return ExperimentConfig(kind=kind, symbol=symbol, params=values, out_dir=Path(values["out"]), seed=values["seed"])


# --------------------------------------------------------------------- files

def _atomic_write(path: Path, data: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_csv(path: Path, header: Sequence[str], rows: Sequence[Sequence[str]]) -> Path:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        if len(row) != len(header):
            raise ValueError(f"{path.name}: row has {len(row)} fields, header has {len(header)}")
        w.writerow(row)
    _atomic_write(path, buf.getvalue())
    return path


def vector_rows(x: np.ndarray) -> list[list[str]]:
    return [[str(i), repr(float(v.real)), repr(float(v.imag))] for i, v in enumerate(x)]


def read_vector_csv(path) -> np.ndarray:
    """Read an ``index, re, im`` CSV; indices must be 0..n-1 in order."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or [c.strip() for c in rows[0]] != ["index", "re", "im"]:
        raise ValueError(f"{path}: expected header 'index,re,im'")
    out = []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != 3 or int(row[0]) != lineno - 2:
            raise ValueError(f"{path}:{lineno}: malformed row {row}")
        out.append(complex(float(row[1]), float(row[2])))
    return np.array(out, dtype=complex)


def _svg_plot(
    series: Sequence[tuple[str, np.ndarray, np.ndarray]],
    title: str,
    xlabel: str,
    ylabel: str,
    logx: bool = False,
    logy: bool = False,
    equal_aspect: bool = False,
    closed: bool = False,
) -> str:
    """Polyline plot with a frame and corner labels."""
    W, H, pad = 480, 360, 48
    colors = ("#1f4e79", "#b03a2e", "#1e8449", "#7d3c98", "#b9770e")

    def tx(v, use_log):
        v = np.asarray(v, dtype=float)
        return np.log10(np.maximum(v, 1e-300)) if use_log else v

    xs = [tx(x, logx) for _, x, _ in series]
    ys = [tx(y, logy) for _, _, y in series]
    finite = [np.isfinite(a) for a in ys]
    allx = np.concatenate([x[f] for x, f in zip(xs, finite)])
    ally = np.concatenate([y[f] for y, f in zip(ys, finite)])
    x0, x1 = float(allx.min()), float(allx.max())
    y0, y1 = float(ally.min()), float(ally.max())
    if x1 == x0:
        x0, x1 = x0 - 1, x1 + 1
    if y1 == y0:
        y0, y1 = y0 - 1, y1 + 1
    if equal_aspect:
        span = max(x1 - x0, y1 - y0)
        cx, cy = (x0 + x1) / 2, (y0 + y1) / 2
        x0, x1, y0, y1 = cx - span / 2, cx + span / 2, cy - span / 2, cy + span / 2
    sx = (W - 2 * pad) / (x1 - x0)
    sy = (H - 2 * pad) / (y1 - y0)

    def fmt(v, use_log):
        return f"1e{v:.3g}" if use_log else f"{v:.4g}"

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">',
        f'<rect x="{pad}" y="{pad}" width="{W - 2 * pad}" height="{H - 2 * pad}" fill="none" stroke="#444"/>',
        f'<text x="{W / 2}" y="{pad / 2}" text-anchor="middle" font-size="14">{title}</text>',
        f'<text x="{W / 2}" y="{H - 8}" text-anchor="middle" font-size="12">{xlabel}</text>',
        f'<text x="12" y="{H / 2}" text-anchor="middle" font-size="12" '
        f'transform="rotate(-90 12 {H / 2})">{ylabel}</text>',
        f'<text x="{pad}" y="{H - pad + 14}" font-size="10">{fmt(x0, logx)}</text>',
        f'<text x="{W - pad}" y="{H - pad + 14}" text-anchor="end" font-size="10">{fmt(x1, logx)}</text>',
        f'<text x="{pad - 4}" y="{H - pad}" text-anchor="end" font-size="10">{fmt(y0, logy)}</text>',
        f'<text x="{pad - 4}" y="{pad + 10}" text-anchor="end" font-size="10">{fmt(y1, logy)}</text>',
    ]
    for k, ((name, _, _), x, y, f) in enumerate(zip(series, xs, ys, finite)):
        px = pad + (x[f] - x0) * sx
        py = H - pad - (y[f] - y0) * sy
        pts = " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(px, py))
        tag = "polygon" if closed else "polyline"
        color = colors[k % len(colors)]
        out.append(f'<{tag} points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        out.append(f'<text x="{W - pad - 4}" y="{pad + 14 + 14 * k}" text-anchor="end" '
                   f'font-size="11" fill="{color}">{name}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


# ------------------------------------------------------------------- kinds

@dataclass
class Outcome:
    status: int
    summary: dict
    files: list[Path]


def _random_targets(rng: np.random.Generator, count: int, N: int, support: int) -> list[np.ndarray]:
    if not 1 <= support <= N:
        raise ConfigError(f"field 'support': need 1 <= support <= N, got {support}")
    out = []
    for _ in range(count):
        g = np.zeros(N, dtype=complex)
        v = rng.standard_normal(support) + 1j * rng.standard_normal(support)
        g[:support] = v / np.linalg.norm(v)
        out.append(g)
    return out


def _run_check(cfg: ExperimentConfig) -> Outcome:
    rep = main_theorem_check(cfg.symbol, cfg["boundary_grid"], cfg["disc_grid"], cfg["margin"], cfg["tol"])
    path = write_csv(cfg.out_dir / "report.csv", REPORT_CSV_COLUMNS, [rep.csv_row()])
    summary = dict(line.split("=", 1) for line in rep.to_kv().splitlines())
    status = EXIT_OK if rep.verdict is Verdict.SUBSPACE_GUARANTEED else EXIT_NOT_FOUND
    return Outcome(status, summary, [path])


def _run_spectrum(cfg: ExperimentConfig) -> Outcome:
    curve = essential_spectrum_curve(cfg.symbol, cfg["M"])
    files = [write_csv(cfg.out_dir / "spectrum.csv", ["k", "theta", "mu_re", "mu_im"], curve.csv_rows())]
    circle = np.exp(1j * np.linspace(0, 2 * np.pi, 241))
    svg = _svg_plot(
        [("phi(T)", curve.points.real, curve.points.imag), ("T", circle.real, circle.imag)],
        title=f"essential spectrum: {cfg.symbol.label}", xlabel="Re", ylabel="Im",
        equal_aspect=True, closed=True,
    )
    files.append(cfg.out_dir / "spectrum.svg")
    _atomic_write(files[-1], svg)
    summary = {"label": cfg.symbol.label, "M": cfg["M"], "max_step": repr(curve.max_step()),
               "step_bound": repr(curve.step_bound()),
               "min_modulus": repr(float(np.min(np.abs(curve.points)))),
               "max_modulus": repr(float(np.max(np.abs(curve.points))))}
    if cfg["probe_sizes"]:
        mu = complex(cfg["probe_mu_re"], cfg["probe_mu_im"])
        rows = [[str(n), repr(sigma_min_probe(cfg.symbol, mu, n, seed=cfg.seed))] for n in cfg["probe_sizes"]]
        files.append(write_csv(cfg.out_dir / "probe.csv", ["N", "sigma_min"], rows))
        summary.update(probe_mu_re=repr(mu.real), probe_mu_im=repr(mu.imag), probe_sigma_last=rows[-1][1])
    return Outcome(EXIT_OK, summary, files)


def _run_witness(cfg: ExperimentConfig) -> Outcome:
    lam = complex(cfg["lam_re"], cfg["lam_im"])
    sizes = cfg["sizes"]
    y = lemma_witness(max(sizes), lam)
    grow = min_norm_preimage_growth(lam, y.entries, sizes)
    e0 = np.zeros(max(sizes), dtype=complex)
    e0[0] = 1
    control = min_norm_preimage_growth(lam, e0, sizes)
    files = [
        write_csv(cfg.out_dir / "growth.csv", ["N", "min_norm"], [[str(n), repr(v)] for n, v in zip(sizes, grow)]),
        write_csv(cfg.out_dir / "control.csv", ["N", "min_norm"], [[str(n), repr(v)] for n, v in zip(sizes, control)]),
        write_csv(cfg.out_dir / "witness.csv", ["index", "re", "im"], vector_rows(y.entries)),
    ]
    svg = _svg_plot(
        [("witness", np.array(sizes), np.array(grow)), ("e0 control", np.array(sizes), np.array(control))],
        title="minimal preimage norm", xlabel="N", ylabel="min norm", logx=True, logy=True,
    )
    files.append(cfg.out_dir / "growth.svg")
    _atomic_write(files[-1], svg)
    summary = {"lam_re": repr(lam.real), "lam_im": repr(lam.imag),
               "sizes": ",".join(map(str, sizes)), "witness_norm": repr(y.norm()),
               "growth_first": repr(grow[0]), "growth_last": repr(grow[-1]),
               "growth_ratio": repr(grow[-1] / grow[0]) if grow[0] > 0 else "inf",
               "monotone": str(all(b >= a for a, b in zip(grow, grow[1:]))).lower(),
               "control_max": repr(max(control))}
    return Outcome(EXIT_OK, summary, files)


def _fast_flag(value: str) -> Optional[bool]:
    table = {"auto": None, "true": True, "false": False}
    if value not in table:
        raise ConfigError(f"field 'fast': expected auto/true/false, got {value!r}")
    return table[value]


def _run_orbit(cfg: ExperimentConfig) -> Outcome:
    rng = np.random.default_rng(cfg.seed)
    N = cfg["N"]
    if cfg["x_file"]:
        x = read_vector_csv(cfg["x_file"])
        if len(x) != N:
            raise ConfigError(f"field 'x_file': vector has {len(x)} entries, N = {N}")
    else:
        x = rng.standard_normal(N) + 1j * rng.standard_normal(N)
        x /= np.linalg.norm(x)
    x = cfg["x_scale"] * x
    targets = _random_targets(rng, cfg["targets"], N, cfg["support"])
    op = build_truncation(cfg.symbol, N)
    rec = orbit(op, x, cfg["schedule"], targets, fast=_fast_flag(cfg["fast"]))
    files = [
        write_csv(cfg.out_dir / "orbit.csv", rec.csv_header(), rec.csv_rows()),
        write_csv(cfg.out_dir / "x0.csv", ["index", "re", "im"], vector_rows(x)),
    ]
    n = np.array(rec.schedule, dtype=float)
    series = [("iterate norm", n, np.array(rec.iterate_norms))]
    series += [(f"best distance {t}", n, np.array([d for d, _ in run]))
               for t, run in enumerate(rec.running_best)]
    svg = _svg_plot(series, title=f"orbit: {cfg.symbol.label}", xlabel="n", ylabel="norm", logy=True)
    files.append(cfg.out_dir / "orbit.svg")
    _atomic_write(files[-1], svg)
    summary = {"label": cfg.symbol.label, "N": N, "schedule": ",".join(map(str, rec.schedule)),
               "final_norm": repr(rec.iterate_norms[-1])}
    for t, (d, best_n) in enumerate(rec.visit_distances):
        summary[f"best_distance_{t}"] = repr(d)
        summary[f"best_n_{t}"] = best_n
    return Outcome(EXIT_OK, summary, files)


def _run_construct(cfg: ExperimentConfig) -> Outcome:
    rng = np.random.default_rng(cfg.seed)
    N = cfg["N"]
    targets = _random_targets(rng, cfg["targets"], N, cfg["support"])
    schedule = cfg["schedule"][: len(targets)]
    if len(schedule) != len(targets):
        raise ConfigError(f"field 'schedule': {len(cfg['schedule'])} powers for {len(targets)} targets")
    ridge = float(cfg["ridge"]) if cfg["ridge"] else None
    files = []
    superlevel = sublevel = None
    if cfg["basis"] == "kernels":
        superlevel = sample_eigen_family(cfg.symbol, Region.SUPERLEVEL, cfg["family_size"], max_radius=cfg["max_radius"])
        sublevel = sample_eigen_family(cfg.symbol, Region.SUBLEVEL, cfg["family_size"], max_radius=cfg["max_radius"])
        for fam in (superlevel, sublevel):
            files.append(write_csv(cfg.out_dir / f"family_{fam.region.value}.csv",
                                   ["lambda_re", "lambda_im", "phi_re", "phi_im"], fam.csv_rows()))
    res = construct_hypercyclic_approx(
        cfg.symbol, targets, schedule, eps=cfg["eps"], N=N, superlevel=superlevel, sublevel=sublevel,
        ridge=ridge, basis=cfg["basis"],
    )
    files.append(write_csv(cfg.out_dir / "x.csv", ["index", "re", "im"], vector_rows(res.x)))
    for k, g in enumerate(targets):
        files.append(write_csv(cfg.out_dir / f"target_{k}.csv", ["index", "re", "im"], vector_rows(g)))
    files.append(cfg.out_dir / "construct.txt")
    _atomic_write(files[-1], res.to_kv())
    summary = {"label": cfg.symbol.label, "basis": cfg["basis"], "N": N}
    summary.update(line.split("=", 1) for line in res.to_kv().splitlines())
    return Outcome(EXIT_OK if res.success else EXIT_ERROR, summary, files)


def _median_time(fn, repeats: int) -> float:
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return statistics.median(times)


def bench(cfg: ExperimentConfig) -> Outcome:
    """Median wall time of apply vs apply_fast over the (N, d) sweep."""
    rng = np.random.default_rng(cfg.seed)
    rows, worst = [], 0.0
    timings: dict[tuple[int, int, str], float] = {}
    for e in cfg["bench_exponents"]:
        N = 1 << e
        x = rng.standard_normal(N) + 1j * rng.standard_normal(N)
        for d in cfg["bench_degrees"]:
            coeffs = rng.standard_normal(d + 1) + 1j * rng.standard_normal(d + 1)
            op = build_truncation(Symbol.polynomial(*coeffs, label=f"random{d}"), N)
            ref, fast = apply(op, x), apply_fast(op, x)
            rel = float(np.linalg.norm(fast - ref) / np.linalg.norm(ref))
            if rel > cfg["bench_tol"]:
                raise RuntimeError(f"fast and direct paths disagree at N={N}, d={d}: relative {rel:.2e}")
            worst = max(worst, rel)
            for path, fn in (("direct", apply), ("fast", apply_fast)):
                sec = _median_time(lambda: fn(op, x), cfg["bench_repeats"])
                timings[N, d, path] = sec
                rows.append([str(N), str(d), path, repr(sec)])
    files = [write_csv(cfg.out_dir / "bench.csv", ["N", "d", "path", "seconds"], rows)]
    summary = {"rows": len(rows), "max_relative_disagreement": repr(worst)}
    status = EXIT_OK
    key = (1 << 16, 64)
    if (*key, "fast") in timings:
        speedup = timings[(*key, "direct")] / timings[(*key, "fast")]
        summary["speedup_65536_64"] = repr(speedup)
        summary["fast_wins_65536_64"] = str(speedup > 1).lower()
        if speedup <= 1:
            log.error("fast path did not beat the direct path at N=65536, d=64")
            status = EXIT_ERROR
    return Outcome(status, summary, files)


RUNNERS: dict[str, Callable[[ExperimentConfig], Outcome]] = {
    "check": _run_check,
    "spectrum": _run_spectrum,
    "witness": _run_witness,
    "orbit": _run_orbit,
    "construct": _run_construct,
    "bench": bench,
}


def run(cfg: ExperimentConfig) -> int:
    """Run one experiment; write its artifacts and ``summary.txt``; return the exit status."""
    try:
        outcome = RUNNERS[cfg.kind](cfg)
    except RegionEmptyError as exc:
        outcome = Outcome(EXIT_NOT_FOUND, {"label": cfg.symbol.label, "error": str(exc)}, [])
    lines = [f"kind={cfg.kind}", f"seed={cfg.seed}", f"exit_status={outcome.status}"]
    lines += [f"{k}={v}" for k, v in outcome.summary.items()]
    lines.append("files=" + ",".join(p.name for p in outcome.files))
    _atomic_write(cfg.out_dir / "summary.txt", "\n".join(lines) + "\n")
    return outcome.status


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = argparse.ArgumentParser(prog="hyplab", description=__doc__.splitlines()[0])
    parser.add_argument("kind", choices=KINDS)
    parser.add_argument("--config", help="key=value config file (optional; defaults apply)")
    parser.add_argument("--out", help="output directory (overrides 'out')")
    parser.add_argument("--preset", choices=sorted(PRESETS), help="symbol preset (overrides the config)")
    parser.add_argument("--seed", type=int, help="unsigned 64-bit seed (overrides 'seed')")
    parser.add_argument("-v", "--verbose", action="store_true")
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.kind, args.config, args.out, args.preset, args.seed)
        status = run(cfg)
    except ConfigError as exc:
        print(f"hyplab: config error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except Exception as exc:  # noqa: BLE001 -- report, never traceback, at the CLI boundary
        print(f"hyplab: {args.kind} failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    print((cfg.out_dir / "summary.txt").read_text(), end="")
    return status


if __name__ == "__main__":
    sys.exit(main())
