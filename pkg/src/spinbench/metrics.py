"""Success probability, time-to-solution, and report generation.

``tts`` implements the standard expected time to observe an optimal sample
with 99% confidence: ``t_sample * max(log(1 - 0.99) / log(1 - p), 1)``
(natural logs; the clamp keeps TTS >= t_sample when p is large, and p = 0
gives infinity).
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from .model import SampleSet
from .rng import derive_rng

__all__ = [
    "TTS_TARGET",
    "BenchmarkRow",
    "HistogramResult",
    "estimate_pgs",
    "tts",
    "t_sample",
    "histogram",
    "bootstrap_ci",
    "REPORT_COLUMNS",
    "render_cell",
    "write_report_rows",
    "write_report_structured",
]

TTS_TARGET = 0.99


def estimate_pgs(samples: SampleSet, opt_value: float, tol: float = 1e-9) -> float:
    """Fraction of samples (by multiplicity) whose energy attains the
    verified optimum within ``tol``."""
    if not samples.entries:
        raise ValueError("empty sample set")
    total = samples.total_multiplicity
    hits = sum(
        e.multiplicity for e in samples.entries if abs(e.energy - float(opt_value)) <= tol
    )
    return hits / total


def tts(p_gs: float, t_sample_ms: float, target: float = TTS_TARGET) -> float:
    """Expected time (ms) to see an optimal sample with ``target`` confidence."""
    if not 0.0 <= p_gs <= 1.0:
        raise ValueError(f"p_gs = {p_gs} outside [0, 1]")
    if t_sample_ms <= 0:
        raise ValueError(f"t_sample_ms must be positive, got {t_sample_ms}")
    if p_gs == 0.0:
        return math.inf
    if p_gs == 1.0:
        return float(t_sample_ms)
    ratio = math.log(1.0 - target) / math.log(1.0 - p_gs)
    return float(t_sample_ms) * max(ratio, 1.0)


def t_sample(total_wall_ms: float, num_samples: int) -> float:
    """Wall time per returned sample, in milliseconds."""
    if total_wall_ms <= 0:
        raise ValueError("total_wall_ms must be positive")
    if num_samples < 1:
        raise ValueError("num_samples must be >= 1")
    return float(total_wall_ms) / int(num_samples)


@dataclass
class HistogramResult:
    """Weighted histogram with aligned bins plus the weighted mean."""

    bin_lows: list[float]
    counts: list[int]
    bin_width: float
    mean: float
    optimum: float | None = None


def histogram(
    samples: SampleSet,
    value_fn: str | Callable = "energy",
    bin_width: float = 1.0,
    optimum: float | None = None,
) -> HistogramResult:
    """Histogram of a per-sample statistic (default: energy).

    ``value_fn`` may be "energy" or a callable mapping a configuration to a
    value (e.g. a cut evaluator). Bins are aligned to multiples of
    ``bin_width``, so integer-valued statistics land on integer bins.
    """
    if not samples.entries:
        raise ValueError("empty sample set")
    if bin_width <= 0:
        raise ValueError("bin_width must be positive")
    if value_fn == "energy":
        values = [e.energy for e in samples.entries]
    else:
        values = [float(value_fn(e.config)) for e in samples.entries]
    weights = [e.multiplicity for e in samples.entries]
    idx = [math.floor(v / bin_width + 1e-9) for v in values]
    lo, hi = min(idx), max(idx)
    counts = [0] * (hi - lo + 1)
    for b, w in zip(idx, weights):
        counts[b - lo] += w
    mean = sum(v * w for v, w in zip(values, weights)) / sum(weights)
    return HistogramResult(
        bin_lows=[b * bin_width for b in range(lo, hi + 1)],
        counts=counts,
        bin_width=float(bin_width),
        mean=mean,
        optimum=optimum,
    )


def bootstrap_ci(
    samples: SampleSet,
    opt_value: float,
    resamples: int = 1000,
    level: float = 0.95,
    seed: int = 0,
    tol: float = 1e-9,
) -> tuple[float, float]:
    """Percentile bootstrap interval for the ground-state probability.

    Resamples the success indicator over the weighted sample multiset
    (equivalently, binomial resampling of the hit count); deterministic for
    a fixed seed.
    """
    if not samples.entries:
        raise ValueError("empty sample set")
    if not 0 < level < 1:
        raise ValueError("level must be in (0, 1)")
    total = samples.total_multiplicity
    p_hat = estimate_pgs(samples, opt_value, tol)
    rng = derive_rng(seed)
    draws = rng.binomial(total, p_hat, size=resamples) / total
    alpha = (1.0 - level) / 2.0
    lo, hi = np.quantile(draws, [alpha, 1.0 - alpha])
    return float(lo), float(hi)


REPORT_COLUMNS = (
    "instance",
    "family",
    "opt",
    "p_gs_raw",
    "p_gs_post",
    "t_sample_ms",
    "tts_raw_ms",
    "tts_post_ms",
    "n_samples",
    "ci_low",
    "ci_high",
)


@dataclass
class BenchmarkRow:
    """One benchmarked instance: raw and postprocessed success statistics.

    ``opt_value`` is in the instance's natural units (cut value for max-cut,
    ground energy otherwise); the bootstrap interval bounds the
    postprocessed ground-state probability.
    """

    instance: str
    family: str
    opt_value: float
    p_gs_raw: float
    p_gs_post: float
    t_sample_ms: float
    tts_raw_ms: float
    tts_post_ms: float
    n_samples: int
    ci_low: float
    ci_high: float

    def __post_init__(self):
        for name in ("p_gs_raw", "p_gs_post"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} = {p} outside [0, 1]")
        for p, t in ((self.p_gs_raw, self.tts_raw_ms), (self.p_gs_post, self.tts_post_ms)):
            if p == 0.0 and not math.isinf(t):
                raise ValueError("tts must be infinite exactly when p_gs = 0")
            if p > 0.0 and t < self.t_sample_ms - 1e-12:
                raise ValueError("tts must be >= t_sample when p_gs > 0")

    def cells(self) -> list:
        return [
            self.instance,
            self.family,
            self.opt_value,
            self.p_gs_raw,
            self.p_gs_post,
            self.t_sample_ms,
            self.tts_raw_ms,
            self.tts_post_ms,
            self.n_samples,
            self.ci_low,
            self.ci_high,
        ]


def render_cell(value) -> str:
    """Render one report cell; infinities become the literal "inf"."""
    if isinstance(value, float):
        if math.isinf(value):
            return "inf"
        return repr(value)
    return str(value)


def write_report_rows(path, rows: Iterable[BenchmarkRow], header_comment: str | None = None):
    """Delimiter-separated report with the fixed column header."""
    with open(path, "w", encoding="utf-8", newline="") as f:
        if header_comment:
            f.write(f"# {header_comment}\n")
        writer = csv.writer(f)
        writer.writerow(REPORT_COLUMNS)
        for row in rows:
            writer.writerow([render_cell(c) for c in row.cells()])


def write_report_structured(path, rows: Iterable[BenchmarkRow], *, seed: int, parameters: dict):
    """Structured-text report embedding the seed and full parameter echo."""
    doc = {
        "format_version": 1,
        "seed": seed,
        "parameters": parameters,
        "columns": list(REPORT_COLUMNS),
        "rows": [
            {k: (render_cell(v) if isinstance(v, float) and math.isinf(v) else v)
             for k, v in zip(REPORT_COLUMNS, r.cells())}
            for r in rows
        ],
    }
    with open(path, "w", encoding="utf-8") as f:
        json.dump(doc, f, indent=1)
        f.write("\n")
