"""Simple regression and rank-correlation machinery.

Everything here is in-sample: the model-fit tables report goodness of fit on
the same plots the model was fit to, matching the study protocol.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import (
    DegenerateX,
    InsufficientData,
    InvalidR2,
    LengthMismatch,
    NonFiniteValue,
    ZeroVariance,
)


@dataclass(frozen=True)
class RegressionFit:
    """One simple-regression fit with its in-sample statistics.

    ``r_squared`` is defined as 0 when the target has zero variance, so
    degenerate batches report "no variance explained" instead of erroring.
    ``p_value`` is the F-test p-value; it underflows to 0.0 for a perfect or
    overwhelmingly significant fit.
    """

    intercept: float
    slope: float
    r_squared: float
    mae: float
    mse: float
    p_value: float
    n: int


def _as_vector(values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1:
        raise LengthMismatch(f"{name} must be one-dimensional")
    if not np.all(np.isfinite(arr)):
        raise NonFiniteValue(f"{name} contains non-finite values")
    return arr


def ols_fit(xs, ys) -> RegressionFit:
    """Least-squares line of ys on xs with R2, MAE, MSE, and F-test p-value."""
    x = _as_vector(xs, "xs")
    y = _as_vector(ys, "ys")
    if x.size != y.size:
        raise LengthMismatch(f"xs has {x.size} values, ys has {y.size}")
    n = int(x.size)
    if n < 3:
        raise InsufficientData(f"need at least 3 observations, got {n}")
    x_bar = x.mean()
    y_bar = y.mean()
    sxx = float(np.sum((x - x_bar) ** 2))
    if sxx == 0.0:
        raise DegenerateX("xs has zero variance")
    slope = float(np.sum((x - x_bar) * (y - y_bar))) / sxx
    intercept = y_bar - slope * x_bar
    resid = y - (intercept + slope * x)
    sse = float(np.sum(resid**2))
    sst = float(np.sum((y - y_bar) ** 2))
    r_squared = 0.0 if sst == 0.0 else min(max(1.0 - sse / sst, 0.0), 1.0)
    if sse == 0.0 or r_squared >= 1.0:
        p_value = 0.0
    else:
        p_value = f_test_pvalue(r_squared, n)
    return RegressionFit(
        intercept=float(intercept),
        slope=slope,
        r_squared=r_squared,
        mae=float(np.mean(np.abs(resid))),
        mse=float(np.mean(resid**2)),
        p_value=p_value,
        n=n,
    )


def f_test_pvalue(r_squared: float, n: int) -> float:
    """Regression p-value for a simple linear model from R2 and n.

    F = (n-2) R2 / (1-R2) against F(1, n-2); the survival probability is the
    regularized incomplete beta I_x((n-2)/2, 1/2) at x = (n-2)/((n-2)+F).
    For simple regression this coincides with the slope t-test (t^2 = F).
    """
    if not 0.0 <= r_squared < 1.0:
        raise InvalidR2(f"r_squared must lie in [0, 1), got {r_squared!r}")
    if n < 3:
        raise InsufficientData(f"need n >= 3, got {n}")
    d2 = n - 2
    f_stat = d2 * r_squared / (1.0 - r_squared)
    return float(special.betainc(d2 / 2.0, 0.5, d2 / (d2 + f_stat)))


def _midranks(values: np.ndarray) -> np.ndarray:
    """Average ranks (1-based); tied values share the mean of their ranks."""
    order = np.argsort(values, kind="stable")
    ranks = np.empty(values.size, dtype=float)
    i = 0
    while i < values.size:
        j = i
        while j + 1 < values.size and values[order[j + 1]] == values[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def spearman_rho(a, b) -> float:
    """Spearman rank correlation with midrank tie handling."""
    va = _as_vector(a, "a")
    vb = _as_vector(b, "b")
    if va.size != vb.size:
        raise LengthMismatch(f"a has {va.size} values, b has {vb.size}")
    if va.size < 2:
        raise InsufficientData(f"need at least 2 values, got {va.size}")
    if np.all(va == va[0]):
        raise ZeroVariance("a is constant; rank correlation undefined")
    if np.all(vb == vb[0]):
        raise ZeroVariance("b is constant; rank correlation undefined")
    ra = _midranks(va)
    rb = _midranks(vb)
    da = ra - ra.mean()
    db = rb - rb.mean()
    rho = float(da @ db) / float(np.sqrt((da @ da) * (db @ db)))
    return min(max(rho, -1.0), 1.0)
