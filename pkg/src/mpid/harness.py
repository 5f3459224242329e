"""
Experiment driver: rank sweeps, column-dimension sweeps and the
column-skeleton reduced-order model, with CSV and SVG output.

A factorization under underflow is a recorded outcome: the affected cells
are emitted with ``status="underflow"`` and a NaN error value.
"""

import math
from dataclasses import dataclass
from xml.sax.saxutils import escape

import numpy as np

from .errors import ConfigError, UnderflowError
from .id import Variant, id_from_qr, rel_spectral_error
from .io import load_matrix
from .mgsqr import mgsqr
from .precision import DOUBLE, SIMULATED_HALF, SINGLE, round_matrix
from .synth import DECAY_EXPONENTS, gen_decay_matrix, profile, singular_values

__all__ = [
    "VARIANTS", "ExperimentConfig", "ResultRow", "CSV_HEADER", "load_dataset",
    "run_rank_sweep", "run_coldim_sweep", "run_rom", "run", "format_csv",
    "emit_csv", "render_svg", "emit_svg",
]

VARIANTS = {
    "double": (DOUBLE, Variant.DOUBLE),
    "single": (SINGLE, Variant.LOW),
    "half": (SIMULATED_HALF, Variant.LOW),
    "mixed_single": (SINGLE, Variant.MIXED),
    "mixed_half": (SIMULATED_HALF, Variant.MIXED),
}

EXPERIMENTS = ("rank_sweep", "coldim_sweep", "rom")
DEFAULT_K_LIST = tuple(range(5, 52, 2))
DEFAULT_N_LIST = tuple(range(100, 1001, 100))
CSV_HEADER = "experiment,dataset,variant,k,n,seed,error_kind,error_value,status"


@dataclass
class ExperimentConfig:
    experiment: str = "rank_sweep"
    dataset: str = "slow"
    variants: tuple = ("double", "single", "half", "mixed_single", "mixed_half")
    k_list: tuple = DEFAULT_K_LIST
    n_list: tuple = DEFAULT_N_LIST
    baseline: str = "double"
    seed: int = 0
    seeds: int = 1
    pinv_precision: str = "double"
    summation: str = "compensated"
    m: int = 1000
    cols: int = 1000
    holdout: tuple = ()
    header: bool = False
    out: str = None
    svg: str = None
    spectral_tol: float = 1e-10

    def validate(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}")
        if not self.dataset.startswith("file:") and self.dataset not in DECAY_EXPONENTS:
            raise ConfigError(f"dataset must be slow, medium, fast or file:PATH, got {self.dataset!r}")
        unknown = [v for v in self.variants if v not in VARIANTS]
        if unknown or not self.variants:
            raise ConfigError(f"unknown or empty variants {unknown}; choose from {sorted(VARIANTS)}")
        if self.baseline not in ("double", "truth"):
            raise ConfigError(f"baseline must be 'double' or 'truth', got {self.baseline!r}")
        if self.pinv_precision not in ("double", "ctx"):
            raise ConfigError(f"pinv precision must be 'double' or 'ctx', got {self.pinv_precision!r}")
        if self.summation not in ("compensated", "plain"):
            raise ConfigError(f"summation must be 'compensated' or 'plain', got {self.summation!r}")
        if self.seeds < 1:
            raise ConfigError("seeds must be at least 1")
        if not self.k_list or min(self.k_list) < 1:
            raise ConfigError("k list must hold positive ranks")
        if self.experiment == "coldim_sweep":
            if len(self.k_list) != 1:
                raise ConfigError("the column-dimension sweep takes a single k")
            if not self.n_list or min(self.n_list) < 1:
                raise ConfigError("the column-dimension sweep needs a list of positive n")
        if self.experiment == "rom" and not self.dataset.startswith("file:") and not self.holdout:
            raise ConfigError("rom on a synthetic dataset needs held-out columns (--holdout)")
        return self

    def seed_list(self):
        return list(range(self.seed, self.seed + self.seeds))


@dataclass(frozen=True)
class ResultRow:
    experiment: str
    dataset: str
    variant: str
    k: int
    n: int
    seed: int
    error_kind: str
    error_value: float = math.nan
    status: str = "ok"

    def sort_key(self):
        return (self.dataset, self.variant, self.k, self.n, self.seed)


def load_dataset(cfg, seed, n_cols=None):
    """The data matrix for one seed and its exact singular values (None for
    file data)."""
    if cfg.dataset.startswith("file:"):
        A = load_matrix(cfg.dataset[5:], header=cfg.header)
        return A, None
    prof = profile(cfg.dataset, m=cfg.m, n=n_cols or cfg.cols, seed=seed)
    return gen_decay_matrix(prof), singular_values(prof)


def _context(cfg, name):
    ctx, variant = VARIANTS[name]
    return ctx.with_summation(cfg.summation == "compensated"), variant


class _Path:
    """One factorization run to the largest requested rank; lower ranks are
    truncations.  Records the rank at which underflow stopped it."""

    def __init__(self, A, ctx, kmax):
        self.status = "ok"
        self.qr = None
        self.max_rank = kmax
        try:
            A_in = A if ctx.is_double else round_matrix(A, ctx.storage)
        except OverflowError:
            self.status, self.max_rank = "overflow", 0
            return
        try:
            self.qr = mgsqr(A_in, kmax, ctx)
        except UnderflowError as exc:
            self.qr = exc.partial if exc.step else None
            self.max_rank = exc.step

    def cell(self, k):
        """(status, rank-k factorization or None)."""
        if self.status == "overflow":
            return "overflow", None
        if k > self.max_rank:
            return "underflow", None
        return "ok", self.qr.truncate(k)


def _approx(cfg, A, name, path, k):
    status, qr = path.cell(k)
    if status != "ok":
        return status, None
    _, variant = _context(cfg, name)
    return "ok", id_from_qr(qr, variant, pinv_precision=cfg.pinv_precision).reconstruct(A)


def _sweep_cells(cfg, experiment, A, label_n, ks, seed):
    """Rows for every (variant, k) on one matrix."""
    kmax = max(ks)
    if kmax > min(A.shape):
        raise ConfigError(f"rank {kmax} exceeds min dimension of {A.shape[0]}x{A.shape[1]}")
    kind = "rel_spectral_vs_double" if cfg.baseline == "double" else "rel_spectral_vs_truth"
    paths = {}

    def path_for(name):
        ctx, _ = _context(cfg, name)
        # variants sharing a context share one factorization
        if ctx not in paths:
            paths[ctx] = _Path(A, ctx, kmax)
        return paths[ctx]

    references = {}
    if cfg.baseline == "double":
        for k in ks:
            references[k] = _approx(cfg, A, "double", path_for("double"), k)
    rows = []
    for name in cfg.variants:
        for k in ks:
            if name == "double" and cfg.baseline == "double":
                status, Ahat = references[k]
            else:
                status, Ahat = _approx(cfg, A, name, path_for(name), k)
            if cfg.baseline == "truth":
                ref = A
            else:
                ref_status, ref = references[k]
                if status == "ok":
                    status = ref_status
            value = math.nan
            if status == "ok":
                value = rel_spectral_error(ref, Ahat, tol=cfg.spectral_tol, seed=seed)
            rows.append(ResultRow(experiment, cfg.dataset, name, k, label_n, seed, kind, value, status))
    return rows


def _sorted(rows):
    return sorted(rows, key=ResultRow.sort_key)


def run_rank_sweep(cfg):
    """Error versus target rank on the full matrix, one row per
    (variant, k, seed)."""
    cfg.validate()
    rows = []
    for seed in cfg.seed_list():
        A, _ = load_dataset(cfg, seed)
        rows += _sweep_cells(cfg, "rank_sweep", A, A.shape[1], sorted(set(cfg.k_list)), seed)
    return _sorted(rows)


def run_coldim_sweep(cfg):
    """Error versus column count for a fixed rank; each matrix is a prefix
    of the full-width dataset."""
    cfg.validate()
    k = cfg.k_list[0]
    rows = []
    for seed in cfg.seed_list():
        A_full, _ = load_dataset(cfg, seed, n_cols=max(cfg.cols, max(cfg.n_list)))
        for n in sorted(set(cfg.n_list)):
            if n > A_full.shape[1]:
                raise ConfigError(f"n = {n} exceeds the {A_full.shape[1]} available columns")
            rows += _sweep_cells(cfg, "coldim_sweep", A_full[:, :n], n, [k], seed)
    return _sorted(rows)


def run_rom(cfg):
    """Reduced-order model: predict every column from a k-column skeleton.

    Emits, per (variant, k), the mean squared error of each requested
    held-out column (experiment ``rom:col=J``, 0-based J) and the mean of
    that quantity over all non-skeleton columns (``rom:mean``).
    """
    cfg.validate()
    rows = []
    for seed in cfg.seed_list():
        A, _ = load_dataset(cfg, seed)
        m, n = A.shape
        for j in cfg.holdout:
            if not 0 <= j < n:
                raise ConfigError(f"held-out column {j} out of range for {n} columns")
        ks = sorted(set(cfg.k_list))
        if max(ks) > min(m, n):
            raise ConfigError(f"rank {max(ks)} exceeds min dimension of {m}x{n}")
        paths = {}
        for name in cfg.variants:
            ctx, variant = _context(cfg, name)
            if ctx not in paths:
                paths[ctx] = _Path(A, ctx, max(ks))
            path = paths[ctx]
            for k in ks:
                status, qr = path.cell(k)
                labels = [f"rom:col={j}" for j in cfg.holdout] + ["rom:mean"]
                if status != "ok":
                    rows += [ResultRow(lab, cfg.dataset, name, k, n, seed, "mse_column", math.nan, status)
                             for lab in labels]
                    continue
                approx = id_from_qr(qr, variant, pinv_precision=cfg.pinv_precision)
                mse = np.mean((A - approx.reconstruct(A)) ** 2, axis=0)
                others = np.ones(n, dtype=bool)
                others[approx.indices] = False
                values = [mse[j] for j in cfg.holdout]
                values.append(mse[others].mean() if others.any() else 0.0)
                rows += [ResultRow(lab, cfg.dataset, name, k, n, seed, "mse_column", float(v))
                         for lab, v in zip(labels, values)]
    return _sorted(rows)


def run(cfg):
    runner = {"rank_sweep": run_rank_sweep, "coldim_sweep": run_coldim_sweep, "rom": run_rom}
    return runner[cfg.validate().experiment](cfg)


def _format_value(v):
    return "nan" if math.isnan(v) else f"{v:.16e}"


def format_csv(rows):
    lines = [CSV_HEADER]
    for r in rows:
        lines.append(",".join([r.experiment, r.dataset, r.variant, str(r.k), str(r.n),
                               str(r.seed), r.error_kind, _format_value(r.error_value), r.status]))
    return "\n".join(lines) + "\n"


def emit_csv(rows, path):
    if not rows:
        raise ValueError("no rows to write")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_csv(rows))


def _series(rows):
    """Group rows into plotted series keyed by variant (plus dataset or seed
    when a file mixes several)."""
    xkey = "n" if rows[0].experiment == "coldim_sweep" else "k"
    datasets = {r.dataset for r in rows}
    seeds = {r.seed for r in rows}
    experiments = {r.experiment for r in rows}
    groups = {}
    for r in rows:
        label = r.variant
        if len(experiments) > 1:
            label = f"{r.experiment} {label}"
        if len(datasets) > 1:
            label = f"{r.dataset} {label}"
        if len(seeds) > 1:
            label = f"{label} seed {r.seed}"
        groups.setdefault(label, []).append(r)
    series = {}
    for label, grp in groups.items():
        grp = sorted(grp, key=lambda r: getattr(r, xkey))
        pts = []
        for r in grp:
            if r.status != "ok":
                break  # curve stops at the first failed cell
            pts.append((getattr(r, xkey), r.error_value))
        series[label] = pts
    return xkey, series


_PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
            "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"]


def render_svg(rows, title=None, width=640, height=420):
    """Single-panel line chart with a log-scale y axis."""
    if not rows:
        raise ValueError("no rows to plot")
    xkey, series = _series(rows)
    left, right, top, bottom = 70, 150, 30, 50
    pw, ph = width - left - right, height - top - bottom
    xs = [x for pts in series.values() for x, _ in pts]
    ys = [y for pts in series.values() for _, y in pts if y > 0]
    xlo, xhi = (min(xs), max(xs)) if xs else (0, 1)
    if xhi == xlo:
        xhi = xlo + 1
    ylo = math.floor(math.log10(min(ys))) if ys else -16
    yhi = math.ceil(math.log10(max(ys))) if ys else 0
    if yhi == ylo:
        yhi = ylo + 1

    def px(x):
        return left + (x - xlo) / (xhi - xlo) * pw

    def py(y):
        y = max(y, 10.0 ** ylo)
        return top + (yhi - math.log10(y)) / (yhi - ylo) * ph

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    if title:
        out.append(f'<text x="{left + pw / 2:.1f}" y="{top - 10}" text-anchor="middle" '
                   f'font-size="14">{escape(title)}</text>')
    for e in range(ylo, yhi + 1):
        y = py(10.0 ** e)
        out.append(f'<line x1="{left}" y1="{y:.2f}" x2="{left + pw}" y2="{y:.2f}" stroke="#dddddd"/>')
        out.append(f'<text x="{left - 6}" y="{y + 4:.2f}" text-anchor="end" font-size="11">1e{e}</text>')
    for x in sorted(set(xs)):
        out.append(f'<text x="{px(x):.2f}" y="{top + ph + 16}" text-anchor="middle" font-size="10">{x}</text>')
    out.append(f'<text x="{left + pw / 2:.1f}" y="{height - 10}" text-anchor="middle" '
               f'font-size="12">{xkey}</text>')
    for i, (label, pts) in enumerate(sorted(series.items())):
        color = _PALETTE[i % len(_PALETTE)]
        ly = top + 14 + 16 * i
        out.append(f'<text x="{left + pw + 10}" y="{ly}" font-size="11" fill="{color}">{escape(label)}</text>')
        if not pts:
            continue
        coords = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in pts)
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{coords}"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_svg(rows, path, title=None):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(render_svg(rows, title))
