"""Monte Carlo checks of the analytic predictions and threshold sweeps.

Reports serialize to JSON (floats with 17 significant digits, so values
round-trip exactly) or CSV (header row always present, LF line endings).
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from . import analytic
from .analytic import IsolatedBoundForm, Kind
from .errors import KroneckerError
from .model import InitiatorMatrix, ModelParams, validate_initiator
from .sampler import count_features, sample

#: Width of the acceptance band, in standard errors.
SIGMA_BAND = 4.0
#: Normal quantile for the two-sided 95% zero-fraction interval.
Z_95 = 1.96

DEFAULT_VERIFY_REPLICATES = 2000
DEFAULT_SWEEP_REPLICATES = 500

FEATURES = ("isolated", "edges", "loops", "triangles")


@dataclass(frozen=True)
class FeatureRecord:
    """One empirical feature mean set against one analytic prediction."""

    feature: str
    analytic_name: str
    analytic_kind: str
    analytic_value: float
    empirical_mean: float
    std_error: float
    z_score: float | None = None
    bound_violated: bool | None = None

    FIELDS = (
        "feature",
        "analytic_name",
        "analytic_kind",
        "analytic_value",
        "empirical_mean",
        "std_error",
        "z_score",
        "bound_violated",
    )

    def to_dict(self) -> dict:
        return {name: getattr(self, name) for name in self.FIELDS}

    @classmethod
    def from_dict(cls, d: dict) -> "FeatureRecord":
        return cls(
            feature=d["feature"],
            analytic_name=d["analytic_name"],
            analytic_kind=d["analytic_kind"],
            analytic_value=float(d["analytic_value"]),
            empirical_mean=float(d["empirical_mean"]),
            std_error=float(d["std_error"]),
            z_score=None if d["z_score"] is None else float(d["z_score"]),
            bound_violated=d["bound_violated"],
        )


def params_dict(params: ModelParams) -> dict:
    return {"alpha": params.alpha, "beta": params.beta, "gamma": params.gamma, "k": params.k}


def _params_from(d: dict) -> ModelParams:
    return ModelParams.of(float(d["alpha"]), float(d["beta"]), float(d["gamma"]), int(d["k"]))


@dataclass(frozen=True)
class MonteCarloReport:
    params: ModelParams
    replicates: int
    seed: int
    sampler: str
    records: tuple[FeatureRecord, ...]
    wall_time: float

    def record(self, feature: str, kind: str = "Exact") -> FeatureRecord:
        for r in self.records:
            if r.feature == feature and r.analytic_kind == kind:
                return r
        raise KeyError((feature, kind))

    def to_dict(self) -> dict:
        return {
            "params": params_dict(self.params),
            "replicates": self.replicates,
            "seed": self.seed,
            "sampler": self.sampler,
            "records": [r.to_dict() for r in self.records],
            "wall_time": self.wall_time,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MonteCarloReport":
        return cls(
            params=_params_from(d["params"]),
            replicates=int(d["replicates"]),
            seed=int(d["seed"]),
            sampler=d["sampler"],
            records=tuple(FeatureRecord.from_dict(r) for r in d["records"]),
            wall_time=float(d["wall_time"]),
        )


@dataclass(frozen=True)
class SweepSpec:
    """A path of initiators crossed with a list of powers."""

    path: tuple[InitiatorMatrix, ...]
    ks: tuple[int, ...]
    replicates: int = DEFAULT_SWEEP_REPLICATES
    seed: int = 0
    feature: str = "edges"
    sampler: str = "auto"

    def __post_init__(self) -> None:
        if self.feature not in ("edges", "loops"):
            raise ValueError(f"sweep feature must be 'edges' or 'loops', got {self.feature!r}")
        if self.replicates < 0:
            raise ValueError("replicates must be >= 0")
        for theta in self.path:
            if not isinstance(theta, InitiatorMatrix):
                raise TypeError(f"path entries must be InitiatorMatrix, got {theta!r}")
        object.__setattr__(self, "path", tuple(self.path))
        object.__setattr__(self, "ks", tuple(int(k) for k in self.ks))


@dataclass(frozen=True)
class SweepRow:
    alpha: float
    beta: float
    gamma: float
    k: int
    threshold_margin: float
    exact_P_zero: float
    empirical_P_zero: float | None
    empirical_CI_halfwidth: float | None
    replicates: int

    FIELDS = (
        "alpha",
        "beta",
        "gamma",
        "k",
        "threshold_margin",
        "exact_P_zero",
        "empirical_P_zero",
        "empirical_CI_halfwidth",
        "replicates",
    )

    def to_dict(self) -> dict:
        return {name: getattr(self, name) for name in self.FIELDS}

    @classmethod
    def from_dict(cls, d: dict) -> "SweepRow":
        opt = lambda x: None if x is None else float(x)  # noqa: E731
        return cls(
            float(d["alpha"]),
            float(d["beta"]),
            float(d["gamma"]),
            int(d["k"]),
            float(d["threshold_margin"]),
            float(d["exact_P_zero"]),
            opt(d["empirical_P_zero"]),
            opt(d["empirical_CI_halfwidth"]),
            int(d["replicates"]),
        )

    @property
    def within_ci(self) -> bool:
        if self.empirical_P_zero is None:
            return True
        return abs(self.empirical_P_zero - self.exact_P_zero) <= self.empirical_CI_halfwidth


@dataclass(frozen=True)
class SweepReport:
    feature: str
    rows: tuple[SweepRow, ...] = field(default_factory=tuple)

    def to_dict(self) -> dict:
        return {"feature": self.feature, "rows": [r.to_dict() for r in self.rows]}

    @classmethod
    def from_dict(cls, d: dict) -> "SweepReport":
        return cls(d["feature"], tuple(SweepRow.from_dict(r) for r in d["rows"]))


# --------------------------------------------------------------------------
# Monte Carlo


def _replicate_counts(params: ModelParams, seed: int, replicates: Sequence[int], sampler: str):
    out = np.empty((len(replicates), len(FEATURES)), dtype=np.int64)
    for i, r in enumerate(replicates):
        c = count_features(sample(params, seed, r, sampler))
        out[i] = (c.isolated, c.edges, c.loops, c.triangles)
    return out


def _collect(params: ModelParams, seed: int, replicates: int, sampler: str, workers: int) -> np.ndarray:
    indices = list(range(replicates))
    if workers <= 1 or replicates < 2 * workers:
        return _replicate_counts(params, seed, indices, sampler)
    chunks = [indices[i::workers] for i in range(workers)]
    counts = np.empty((replicates, len(FEATURES)), dtype=np.int64)
    with ProcessPoolExecutor(workers) as pool:
        futures = [pool.submit(_replicate_counts, params, seed, c, sampler) for c in chunks]
        for chunk, fut in zip(chunks, futures):
            counts[chunk] = fut.result()
    return counts


def _pairings(params: ModelParams) -> list[tuple[str, str, analytic.FeaturePrediction]]:
    pairs = [
        ("isolated", "isolated_exact", analytic.expected_isolated_exact(params)),
        (
            "isolated",
            "isolated_bound_derivation",
            analytic.isolated_upper_bound(params, IsolatedBoundForm.DERIVATION),
        ),
        ("edges", "edges_exact", analytic.expected_edges_exact(params)),
        ("loops", "self_loops", analytic.expected_self_loops(params)),
    ]
    if params.k <= analytic.K_MAX_TRIANGLE_ORACLE:
        pairs.append(("triangles", "triangles_exact", analytic.expected_triangles_exact(params)))
    pairs.append(("triangles", "triangle_bound", analytic.triangle_upper_bound(params)))
    return pairs


def run_monte_carlo(
    params: ModelParams,
    replicates: int = DEFAULT_VERIFY_REPLICATES,
    seed: int = 0,
    sampler: str = "auto",
    workers: int = 1,
) -> MonteCarloReport:
    """Sample ``replicates`` graphs and compare feature means with the predictions.

    Exact predictions get a z-score; upper bounds get a violation flag set
    when the mean exceeds the bound by more than ``SIGMA_BAND`` standard errors.
    """
    if replicates < 2:
        raise ValueError("need at least 2 replicates for a standard error")
    start = time.perf_counter()
    counts = _collect(params, seed, replicates, sampler, workers).astype(float)
    means = counts.mean(axis=0)
    errors = counts.std(axis=0, ddof=1) / math.sqrt(replicates)
    records = []
    for feature, name, pred in _pairings(params):
        col = FEATURES.index(feature)
        mean, se = float(means[col]), float(errors[col])
        z = violated = None
        if pred.kind is Kind.EXACT:
            z = (mean - pred.value) / se if se > 0 else None
        elif pred.kind is Kind.UPPER_BOUND:
            violated = mean - pred.value > SIGMA_BAND * se
        records.append(FeatureRecord(feature, name, pred.kind.value, pred.value, mean, se, z, violated))
    return MonteCarloReport(
        params, replicates, seed, sampler, tuple(records), time.perf_counter() - start
    )


# --------------------------------------------------------------------------
# sweeps


def threshold_margin(theta: InitiatorMatrix, feature: str) -> float:
    a, b, g = theta.as_tuple()
    return a + 2 * b + g - 1.0 if feature == "edges" else a + g - 1.0


def exact_zero_probability(params: ModelParams, feature: str) -> float:
    if feature == "edges":
        return analytic.prob_no_edges_exact(params, include_loops=False)
    return analytic.prob_no_loops_exact(params)


def parameter_path(
    vary: str, start: float, stop: float, steps: int, alpha: float, beta: float, gamma: float
) -> tuple[InitiatorMatrix, ...]:
    """Initiators with one entry swept over ``linspace(start, stop, steps)``.

    Raises the initiator validation error of the first invalid point.
    """
    if vary not in ("alpha", "beta", "gamma"):
        raise ValueError(f"vary must be alpha, beta or gamma, got {vary!r}")
    if steps < 1:
        raise ValueError("steps must be >= 1")
    path = []
    for x in np.linspace(start, stop, steps):
        values = {"alpha": alpha, "beta": beta, "gamma": gamma, vary: float(x)}
        try:
            path.append(validate_initiator(values["alpha"], values["beta"], values["gamma"]))
        except KroneckerError as exc:
            raise type(exc)(f"sweep point {vary}={float(x)!r}: {exc}") from None
    return tuple(path)


def run_sweep(spec: SweepSpec) -> SweepReport:
    """Exact and empirical ``P[no edges]`` (or ``P[no loops]``) along a parameter path.

    Point ``i`` draws replicate indices ``i*R .. i*R + R - 1`` so no two
    points share a stream.  Rows are sorted by threshold margin, then k.
    """
    rows = []
    point = 0
    R = spec.replicates
    for theta in spec.path:
        margin = threshold_margin(theta, spec.feature)
        for k in spec.ks:
            params = ModelParams(theta, k)
            exact = exact_zero_probability(params, spec.feature)
            p_hat = half = None
            if R:
                zeros = 0
                for r in range(point * R, (point + 1) * R):
                    g = sample(params, spec.seed, r, spec.sampler)
                    zeros += (g.n_edges if spec.feature == "edges" else g.n_loops) == 0
                p_hat = zeros / R
                half = Z_95 * math.sqrt(p_hat * (1.0 - p_hat) / R)
            rows.append(SweepRow(*theta.as_tuple(), k, margin, exact, p_hat, half, R))
            point += 1
    rows.sort(key=lambda row: (row.threshold_margin, row.k))
    return SweepReport(spec.feature, tuple(rows))


# --------------------------------------------------------------------------
# emission

Report = Union[MonteCarloReport, SweepReport]


def _format_float(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite value {x!r}")
    return format(x, ".17g")


def dumps_json(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON text with every float written to 17 significant digits."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if obj is None or isinstance(obj, (bool, str)):
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _format_float(float(obj))
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(key))}: {dumps_json(val, indent, _level + 1)}" for key, val in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [pad + dumps_json(val, indent, _level + 1) for val in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _csv_cell(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return _format_float(x)
    return str(x)


def csv_text(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_csv_cell(x) for x in row])
    return buf.getvalue()


def emit_report(report: Report, fmt: str = "json") -> bytes:
    """Serialize a report as UTF-8 ``json`` or ``csv``."""
    fmt = fmt.lower()
    if fmt == "json":
        return (dumps_json(report.to_dict()) + "\n").encode("utf-8")
    if fmt != "csv":
        raise ValueError(f"unknown report format {fmt!r}")
    if isinstance(report, SweepReport):
        text = csv_text(("feature",) + SweepRow.FIELDS, [(report.feature,) + tuple(r.to_dict().values()) for r in report.rows])
    else:
        p = report.params
        head = ("alpha", "beta", "gamma", "k", "replicates", "seed")
        lead = (p.alpha, p.beta, p.gamma, p.k, report.replicates, report.seed)
        text = csv_text(head + FeatureRecord.FIELDS, [lead + tuple(r.to_dict().values()) for r in report.records])
    return text.encode("utf-8")


def monte_carlo_report_from_json(data: bytes | str) -> MonteCarloReport:
    return MonteCarloReport.from_dict(json.loads(data))


def sweep_report_from_json(data: bytes | str) -> SweepReport:
    return SweepReport.from_dict(json.loads(data))
