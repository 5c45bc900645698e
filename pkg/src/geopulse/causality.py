"""Daily series construction and lag-causality F-tests.

For candidate x and target y at lag L, the restricted model regresses y_t
on an intercept and y_{t-1..t-L}; the unrestricted model adds x_{t-1..t-L}.
Both models share the same sample (the first L days are dropped once), so

    F = ((SSR_r - SSR_u) / L) / (SSR_u / (n - 2L - 1)),  n = len - L

is the exact nested F statistic. SSRs for both models come from a single
Cholesky factorization of the augmented Gram matrix, which also makes
SSR_u <= SSR_r hold exactly in floating point. The design is centered and
column-scaled first (ridge-free; affine transforms of x cannot move F).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from datetime import date, datetime, timedelta

import numpy as np

from .errors import (
    EmptyWindow,
    InsufficientData,
    MalformedFile,
    RankDeficient,
    WindowMismatch,
)
from .fdist import f_upper_tail
from .ingest import day_range

SENTIMENT_CODE = {"negative": "NEG", "neutral": "NEU", "positive": "POS"}
SENTIMENT_ORDER = ("NEG", "NEU", "POS")


@dataclass
class LabeledSeries:
    name: str
    start: date
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 1:
            raise ValueError("series values must be one-dimensional")

    @property
    def dates(self) -> list[date]:
        return day_range(self.start, self.end)

    @property
    def end(self) -> date:
        return self.start + timedelta(days=len(self.values) - 1)


@dataclass
class LagResult:
    lag: int
    f_stat: float | None
    p_value: float | None
    significant: bool
    status: str  # "ok" | "untestable"


@dataclass
class GrangerReport:
    candidate: str
    target: str
    alpha: float
    max_lag: int
    rows: list = field(default_factory=list)

    @property
    def significant_lags(self) -> list[int]:
        return [r.lag for r in self.rows if r.significant]

    @property
    def significant_count(self) -> int:
        return len(self.significant_lags)

    @property
    def untestable_lags(self) -> list[int]:
        return [r.lag for r in self.rows if r.status != "ok"]

    def min_p(self):
        """(p, lag) over testable lags; (None, None) when nothing tested."""
        best = None
        for r in self.rows:
            if r.status == "ok" and (best is None or r.p_value < best[0]):
                best = (r.p_value, r.lag)
        return best if best else (None, None)


def build_series(
    topic_sentiment_dates,
    window_start: date,
    window_end: date,
) -> list[LabeledSeries]:
    """One zero-filled daily series per (topic, sentiment) pair.

    topic_sentiment_dates: iterable of (topic, sentiment_label, date); noise
    topics (< 0) are excluded.
    """
    if window_start > window_end:
        raise EmptyWindow("window start after end")
    n_days = (window_end - window_start).days + 1
    counts: dict[tuple, np.ndarray] = {}
    for topic, label, d in topic_sentiment_dates:
        topic = int(topic)
        if topic < 0:
            continue
        code = SENTIMENT_CODE.get(label, label)
        key = (topic, code)
        if key not in counts:
            counts[key] = np.zeros(n_days)
        offset = (d - window_start).days
        if 0 <= offset < n_days:
            counts[key][offset] += 1.0
    topics = sorted({t for t, _ in counts})
    out = []
    for topic in topics:
        for code in SENTIMENT_ORDER:
            values = counts.get((topic, code))
            if values is None:
                values = np.zeros(n_days)
            out.append(LabeledSeries(name=f"tp{topic}:{code}", start=window_start, values=values))
    return out


def load_target(path, name: str, window_start: date, window_end: date) -> tuple[LabeledSeries, int]:
    """Read a (date, value) file, align to the window, clamp negatives to 0.

    Returns (series, clamp_warning_count). A header line is tolerated.
    Raises MalformedFile for unparseable rows and WindowMismatch when any
    window day is missing.
    """
    by_day: dict[date, float] = {}
    clamped = 0
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    for lineno, row in enumerate(rows, 1):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != 2:
            raise MalformedFile(f"{path}:{lineno}: expected 2 columns, got {len(row)}")
        raw_date, raw_value = row[0].strip(), row[1].strip()
        try:
            day = datetime.strptime(raw_date, "%Y-%m-%d").date()
        except ValueError:
            if lineno == 1:
                continue  # header
            raise MalformedFile(f"{path}:{lineno}: bad date {raw_date!r}") from None
        try:
            value = float(raw_value)
        except ValueError:
            raise MalformedFile(f"{path}:{lineno}: bad value {raw_value!r}") from None
        if value < 0:
            value = 0.0
            clamped += 1
        by_day[day] = value
    values = []
    for day in day_range(window_start, window_end):
        if day not in by_day:
            raise WindowMismatch(f"{path}: missing {day.isoformat()}")
        values.append(by_day[day])
    return LabeledSeries(name=name, start=window_start, values=np.array(values)), clamped


def difference(series: LabeledSeries, order: int) -> LabeledSeries:
    """n-th order differencing; shortens the series by `order` days."""
    if order <= 0:
        return series
    values = np.diff(series.values, n=order)
    return LabeledSeries(
        name=series.name, start=series.start + timedelta(days=order), values=values
    )


def ols_fit(X: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, float]:
    """Least squares by QR; raises RankDeficient on collinear columns."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    n, k = X.shape
    if n <= k:
        raise InsufficientData(f"{n} observations for {k} coefficients")
    Q, R = np.linalg.qr(X)
    diag = np.abs(np.diag(R))
    if diag.min() <= max(n, k) * np.finfo(float).eps * max(diag.max(), 1e-30):
        raise RankDeficient("design matrix has collinear columns")
    coef = np.linalg.solve(R, Q.T @ y)
    resid = y - X @ coef
    return coef, float(resid @ resid)


def nested_ssr(X: np.ndarray, y: np.ndarray, k_restricted: int) -> tuple[float, float]:
    """SSRs of y on the first k_restricted columns of X and on all of X.

    One Cholesky of X'X; with L c = X'y, the prefix sums of c^2 give the
    residual sums for every column prefix, so the restricted SSR equals the
    unrestricted SSR plus a sum of squares and the nesting inequality holds
    exactly in floating point. y lying in span(X) is a perfect fit
    (SSR_u = 0), not a rank error; collinear X columns raise RankDeficient.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    n, k = X.shape
    if not 0 < k_restricted <= k:
        raise ValueError("k_restricted out of range")
    if n <= k:
        raise InsufficientData(f"{n} observations for {k} coefficients")
    gram = X.T @ X
    try:
        chol = np.linalg.cholesky(gram)
    except np.linalg.LinAlgError:
        raise RankDeficient("Gram matrix is not positive definite") from None
    diag = np.abs(np.diag(chol))
    if diag.min() <= max(n, k) * np.finfo(float).eps * max(diag.max(), 1e-30):
        raise RankDeficient("design matrix has collinear columns")
    c = np.linalg.solve(chol, X.T @ y)  # lower-triangular system
    c2 = c * c
    yty = float(y @ y)
    ssr_r = yty - float(np.sum(c2[:k_restricted]))
    ssr_r = max(ssr_r, 0.0)
    ssr_u = ssr_r - float(np.sum(c2[k_restricted:]))
    ssr_u = min(max(ssr_u, 0.0), ssr_r)
    return ssr_r, ssr_u


def _full_lag_matrix(x: np.ndarray, y: np.ndarray, max_lag: int) -> np.ndarray:
    """Column j-1 holds y shifted by j; columns max_lag+j-1 hold x shifted.

    Rows before `lag` are unused for a lag-`lag` design and stay zero.
    """
    T = len(y)
    full = np.zeros((T, 2 * max_lag))
    for j in range(1, max_lag + 1):
        full[j:, j - 1] = y[:-j]
        full[j:, max_lag + j - 1] = x[:-j]
    return full


def _lag_design(x: np.ndarray, y: np.ndarray, lag: int, full: np.ndarray | None = None):
    """Centered, column-scaled lag design shared by both nested models."""
    T = len(y)
    n = T - lag
    y_t = y[lag:]
    if full is None:
        full = _full_lag_matrix(x, y, lag)
    max_lag = full.shape[1] // 2
    M = np.hstack([full[lag:, :lag], full[lag:, max_lag:max_lag + lag]])
    M = M - M.mean(axis=0)
    norms = np.linalg.norm(M, axis=0)
    scale_floor = np.sqrt(n) * 1e-12 * max(1.0, float(np.max(np.abs(M))) if M.size else 1.0)
    if np.any(norms <= scale_floor):
        raise RankDeficient("a lagged regressor is constant")
    M = M / norms
    y_c = y_t - y_t.mean()
    return M, y_c, n


def granger_test(
    x: LabeledSeries | np.ndarray,
    y: LabeledSeries | np.ndarray,
    lag: int,
    _full: np.ndarray | None = None,
) -> tuple[float, float]:
    """(F, p) for 'lags of x improve the autoregression of y' at one lag."""
    xv = x.values if isinstance(x, LabeledSeries) else np.asarray(x, dtype=float)
    yv = y.values if isinstance(y, LabeledSeries) else np.asarray(y, dtype=float)
    if isinstance(x, LabeledSeries) and isinstance(y, LabeledSeries):
        if x.start != y.start or len(x.values) != len(y.values):
            raise ValueError("series are not aligned")
    if len(xv) != len(yv):
        raise ValueError("series lengths differ")
    if lag < 1:
        raise ValueError("lag must be >= 1")
    T = len(yv)
    n = T - lag
    df_denom = n - 2 * lag - 1
    if df_denom < 1 or n < 2 * lag + 2:
        raise InsufficientData(
            f"need len - lag >= 2*lag + 2; len={T}, lag={lag}"
        )
    M, y_c, n = _lag_design(xv, yv, lag, full=_full)
    # intercept is handled by centering; model sizes exclude it here
    ssr_r, ssr_u = nested_ssr(M, y_c, lag)
    if ssr_u <= 0.0:
        # unrestricted model fits exactly; x removes all residual variance
        return float("inf"), 0.0
    f_stat = ((ssr_r - ssr_u) / lag) / (ssr_u / df_denom)
    if f_stat < 0.0:
        f_stat = 0.0
    return f_stat, f_upper_tail(f_stat, lag, df_denom)


def granger_scan(
    x: LabeledSeries,
    y: LabeledSeries,
    max_lag: int = 90,
    alpha: float = 0.05,
) -> GrangerReport:
    """Per-lag tests for L = 1..max_lag; untestable lags are never significant."""
    if max_lag < 1:
        raise ValueError("max_lag must be >= 1")
    T = len(y.values)
    if T - max_lag < 2 * max_lag + 2:
        raise InsufficientData(
            f"series length {T} too short for max_lag {max_lag}"
        )
    report = GrangerReport(candidate=x.name, target=y.name, alpha=alpha, max_lag=max_lag)
    full = _full_lag_matrix(np.asarray(x.values, dtype=float), np.asarray(y.values, dtype=float), max_lag)
    for lag in range(1, max_lag + 1):
        try:
            f_stat, p = granger_test(x, y, lag, _full=full)
        except RankDeficient:
            report.rows.append(LagResult(lag, None, None, False, "untestable"))
            continue
        report.rows.append(LagResult(lag, f_stat, p, p < alpha, "ok"))
    return report


def compress_lags(lags: list[int]) -> str:
    """Run-length description: [1, 3, 4, 5, 9] -> '1, 3--5, 9'."""
    if not lags:
        return ""
    parts = []
    start = prev = lags[0]
    for lag in lags[1:]:
        if lag == prev + 1:
            prev = lag
            continue
        parts.append(f"{start}--{prev}" if prev > start else f"{start}")
        start = prev = lag
    parts.append(f"{start}--{prev}" if prev > start else f"{start}")
    return ", ".join(parts)


@dataclass
class SuiteRow:
    candidate: str
    topic_name: str
    significant_count: int
    significant_lags: str
    min_p: float | None
    argmin_lag: int | None


def run_suite(
    candidates: list[LabeledSeries],
    target: LabeledSeries,
    max_lag: int,
    alpha: float,
    extra_candidates: list[LabeledSeries] = (),
    topic_names: dict | None = None,
) -> tuple[list[SuiteRow], list[GrangerReport]]:
    """Scan every candidate (plus extras) against one target.

    Returns rows only for candidates with at least one significant lag,
    sorted by significant-lag count descending (name breaks ties), plus the
    full reports for all candidates.
    """
    reports = []
    for series in list(candidates) + list(extra_candidates):
        reports.append(granger_scan(series, target, max_lag=max_lag, alpha=alpha))
    rows = []
    for rep in reports:
        if rep.significant_count == 0:
            continue
        p, lag = rep.min_p()
        name = (topic_names or {}).get(rep.candidate, "-")
        rows.append(
            SuiteRow(
                candidate=rep.candidate,
                topic_name=name,
                significant_count=rep.significant_count,
                significant_lags=compress_lags(rep.significant_lags),
                min_p=p,
                argmin_lag=lag,
            )
        )
    rows.sort(key=lambda r: (-r.significant_count, r.candidate))
    return rows, reports
