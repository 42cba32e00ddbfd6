"""Rating statistics: binarization, Fleiss kappa, Welch t, Mann-Whitney U.

The kappa and both tests are written out from their defining formulas so
results can be audited against a textbook.  The U test enumerates every
group labeling when the pooled sample is small (exact p) and falls back to
the tie-corrected normal approximation with continuity correction above
that.  p-values use scipy.special distribution functions; no statistics
package computes the statistics themselves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np
from scipy import special

from ..errors import (
    DegenerateSampleError,
    InsufficientDataError,
    OutOfRangeError,
    ValidationError,
)

REAL = "real"
SYNTHETIC = "synthetic"

# At or below this pooled size the U test enumerates all labelings.
EXACT_U_LIMIT = 20


def binarize(score: int) -> str:
    """Map a 1..10 rating to a class: 5 and below mean real."""
    s = int(score)
    if s != score or not 1 <= s <= 10:
        raise OutOfRangeError(f"score must be an integer in [1, 10], got {score!r}")
    return REAL if s <= 5 else SYNTHETIC


@dataclass(frozen=True)
class FleissKappaResult:
    kappa: float
    p_bar: float
    p_bar_e: float
    degenerate: bool  # every rating in one category; kappa pinned to 1


def fleiss_kappa(table) -> FleissKappaResult:
    """Chance-corrected agreement for a cases x categories count table.

    Every case must carry the same number of ratings (>= 2).  When all
    ratings fall in a single category the chance agreement is 1 and the
    ratio is undefined; that case reports kappa = 1 with the degenerate
    flag set, since observed agreement is also perfect.
    """
    t = np.asarray(table, dtype=np.float64)
    if t.ndim != 2 or t.shape[0] < 1 or t.shape[1] < 2:
        raise ValidationError("table must be cases x categories with >= 2 categories")
    if np.any(t < 0) or np.any(t != np.floor(t)):
        raise ValidationError("table entries must be non-negative integers")
    counts = t.sum(axis=1)
    n = float(counts[0])
    if n < 2:
        raise ValidationError("each case needs >= 2 ratings")
    if np.any(counts != n):
        raise ValidationError("every case must have the same number of ratings")
    n_cases = t.shape[0]
    p_j = t.sum(axis=0) / (n_cases * n)
    p_i = ((t * t).sum(axis=1) - n) / (n * (n - 1.0))
    p_bar = float(p_i.mean())
    p_bar_e = float((p_j * p_j).sum())
    if p_bar_e >= 1.0:
        return FleissKappaResult(1.0, p_bar, p_bar_e, degenerate=True)
    kappa = (p_bar - p_bar_e) / (1.0 - p_bar_e)
    return FleissKappaResult(float(kappa), p_bar, p_bar_e, degenerate=False)


@dataclass(frozen=True)
class TTestResult:
    t: float
    p: float
    df: float


def welch_t_test(a, b) -> TTestResult:
    """Two-sided Welch t-test with Satterthwaite degrees of freedom."""
    x = np.asarray(a, dtype=np.float64)
    y = np.asarray(b, dtype=np.float64)
    if x.size < 2 or y.size < 2:
        raise InsufficientDataError("each sample needs >= 2 observations")
    nx, ny = x.size, y.size
    vx = float(x.var(ddof=1))
    vy = float(y.var(ddof=1))
    if vx == 0.0 and vy == 0.0:
        raise DegenerateSampleError("both samples have zero variance")
    sx, sy = vx / nx, vy / ny
    t = (float(x.mean()) - float(y.mean())) / math.sqrt(sx + sy)
    df = (sx + sy) ** 2 / (sx**2 / (nx - 1) + sy**2 / (ny - 1))
    p = 2.0 * float(special.stdtr(df, -abs(t)))
    return TTestResult(t=t, p=p, df=df)


@dataclass(frozen=True)
class UTestResult:
    u: float  # U statistic of the first sample
    p: float
    method: str  # "exact" or "asymptotic"


def _midranks(pooled: np.ndarray) -> np.ndarray:
    """Average ranks (1-based) with ties sharing their midrank."""
    order = np.argsort(pooled, kind="stable")
    ranks = np.empty(pooled.size, dtype=np.float64)
    s = pooled[order]
    i = 0
    while i < s.size:
        j = i
        while j + 1 < s.size and s[j + 1] == s[i]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def mann_whitney_u(a, b) -> UTestResult:
    """Two-sided Mann-Whitney U; U is reported for the first sample.

    Exact branch (pooled size <= 20): enumerate all C(n+m, n) labelings of
    the pooled values and count how many produce |U' - nm/2| at least as
    large as observed.  Ranks are midranks, so ties are handled in both
    branches; the asymptotic branch applies the tie-corrected variance and
    a 0.5 continuity correction.
    """
    x = np.asarray(a, dtype=np.float64)
    y = np.asarray(b, dtype=np.float64)
    if x.size < 1 or y.size < 1:
        raise InsufficientDataError("each sample needs >= 1 observation")
    n, m = x.size, y.size
    pooled = np.concatenate([x, y])
    ranks = _midranks(pooled)
    u = float(ranks[:n].sum()) - n * (n + 1) / 2.0
    center = n * m / 2.0

    if n + m <= EXACT_U_LIMIT:
        observed = abs(u - center)
        hits = 0
        total = 0
        offset = n * (n + 1) / 2.0
        for idx in combinations(range(n + m), n):
            u_perm = float(ranks[list(idx)].sum()) - offset
            # tiny slack: midrank sums are dyadic rationals, exact in floats
            if abs(u_perm - center) >= observed - 1e-12:
                hits += 1
            total += 1
        return UTestResult(u=u, p=hits / total, method="exact")

    nn = n + m
    _, tie_counts = np.unique(pooled, return_counts=True)
    tie_term = float(((tie_counts**3 - tie_counts)).sum()) / (nn * (nn - 1.0))
    var = n * m / 12.0 * ((nn + 1.0) - tie_term)
    if var <= 0.0:
        raise DegenerateSampleError("all pooled values identical")
    z = (abs(u - center) - 0.5) / math.sqrt(var)
    z = max(z, 0.0)
    p = 2.0 * (1.0 - float(special.ndtr(z)))
    return UTestResult(u=u, p=min(1.0, p), method="asymptotic")
