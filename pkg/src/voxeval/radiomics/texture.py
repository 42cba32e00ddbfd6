"""Gray-level texture families: GLCM, GLRLM, GLDM, NGTDM.

All four families share the same discretization (fixed bin width, level =
floor((x - min_ROI) / width) + 1) and the same 26-connected neighborhood
geometry, reduced to 13 unique direction offsets at Chebyshev distance 1.
Matrices are indexed over the distinct levels present in the ROI; weighted
sums use the integer level values themselves, so sparse level sets keep
their spacing.  Entropies are log base 2 with the 0 * log 0 = 0 convention.

Degenerate-data policy (applies to every family): a single-level ROI yields
entropy-type features of exactly 0, correlation-type features of exactly 1
(GLCM IMC1 = 0 and IMC2 = 0), and an ROI with no co-occurring voxel pair in
any direction falls back to self-co-occurrence (each voxel pairs with
itself) rather than erroring.
"""

from __future__ import annotations

import numpy as np

from ..errors import EmptyLabelError, ValidationError

# The 13 offsets with a lexicographically-positive first nonzero component;
# together with their negations they tile the 26-neighborhood.
DIRECTIONS_13: tuple[tuple[int, int, int], ...] = (
    (1, 0, 0),
    (0, 1, 0),
    (0, 0, 1),
    (1, 1, 0),
    (1, -1, 0),
    (1, 0, 1),
    (1, 0, -1),
    (0, 1, 1),
    (0, 1, -1),
    (1, 1, 1),
    (1, 1, -1),
    (1, -1, 1),
    (1, -1, -1),
)

GLCM_FEATURES = (
    "autocorrelation",
    "joint_average",
    "cluster_prominence",
    "cluster_shade",
    "cluster_tendency",
    "contrast",
    "correlation",
    "difference_average",
    "difference_entropy",
    "difference_variance",
    "joint_energy",
    "joint_entropy",
    "imc1",
    "imc2",
    "idm",
    "idmn",
    "id",
    "idn",
    "inverse_variance",
    "maximum_probability",
    "sum_entropy",
    "sum_squares",
)

GLRLM_FEATURES = (
    "short_run_emphasis",
    "long_run_emphasis",
    "gray_level_nonuniformity",
    "gray_level_nonuniformity_normalized",
    "run_length_nonuniformity",
    "run_length_nonuniformity_normalized",
    "run_percentage",
    "gray_level_variance",
    "run_variance",
    "run_entropy",
    "low_gray_level_run_emphasis",
    "high_gray_level_run_emphasis",
    "short_run_low_gray_level_emphasis",
    "short_run_high_gray_level_emphasis",
    "long_run_low_gray_level_emphasis",
    "long_run_high_gray_level_emphasis",
)

GLDM_FEATURES = (
    "small_dependence_emphasis",
    "large_dependence_emphasis",
    "gray_level_nonuniformity",
    "dependence_nonuniformity",
    "dependence_nonuniformity_normalized",
    "gray_level_variance",
    "dependence_variance",
    "dependence_entropy",
    "low_gray_level_emphasis",
    "high_gray_level_emphasis",
    "small_dependence_low_gray_level_emphasis",
    "small_dependence_high_gray_level_emphasis",
    "large_dependence_low_gray_level_emphasis",
    "large_dependence_high_gray_level_emphasis",
)

NGTDM_FEATURES = ("coarseness", "contrast", "busyness", "complexity", "strength")

# Sentinel for NGTDM coarseness when the denominator vanishes (flat ROI).
COARSENESS_SENTINEL = 1e6


def discretize(roi: np.ndarray, bin_width: float) -> np.ndarray:
    """Integer levels floor((x - min) / bin_width) + 1 for a flat ROI sample."""
    roi = np.asarray(roi, dtype=np.float64)
    if roi.size == 0:
        raise EmptyLabelError("cannot discretize an empty ROI")
    if not bin_width > 0:
        raise ValidationError(f"bin_width must be > 0, got {bin_width}")
    return (np.floor((roi - roi.min()) / float(bin_width)) + 1).astype(np.int64)


def level_grid(values: np.ndarray, mask: np.ndarray, bin_width: float) -> np.ndarray:
    """Discretized grid with 0 outside the ROI and levels >= 1 inside."""
    mask = np.asarray(mask, dtype=bool)
    if not mask.any():
        raise EmptyLabelError("ROI mask selects no voxels")
    grid = np.zeros(mask.shape, dtype=np.int64)
    grid[mask] = discretize(np.asarray(values, dtype=np.float64)[mask], bin_width)
    return grid


def _pair_views(grid: np.ndarray, off: tuple[int, int, int]) -> tuple[np.ndarray, np.ndarray]:
    """Views (A, B) such that B is A translated by ``off`` inside the grid."""
    sl_a, sl_b = [], []
    for n, d in zip(grid.shape, off):
        sl_a.append(slice(max(0, -d), n - max(0, d)))
        sl_b.append(slice(max(0, d), n - max(0, -d)))
    return grid[tuple(sl_a)], grid[tuple(sl_b)]


def _entropy(p: np.ndarray) -> float:
    nz = p[p > 0]
    return float(-np.sum(nz * np.log2(nz)))


def _present_levels(grid: np.ndarray) -> np.ndarray:
    lv = np.unique(grid[grid > 0])
    if lv.size == 0:
        raise EmptyLabelError("level grid has no ROI voxels")
    return lv


# ---------------------------------------------------------------------------
# GLCM
# ---------------------------------------------------------------------------

def glcm_matrices(grid: np.ndarray, levels: np.ndarray | None = None) -> list[np.ndarray]:
    """Symmetric co-occurrence count matrices, one per direction.

    Matrices are (Ng, Ng) over the distinct ROI levels; directions with no
    valid pair yield an all-zero matrix.
    """
    lv = _present_levels(grid) if levels is None else np.asarray(levels)
    index = np.full(int(lv.max()) + 1, -1, dtype=np.int64)
    index[lv] = np.arange(lv.size)
    out = []
    g = lv.size
    for off in DIRECTIONS_13:
        a, b = _pair_views(grid, off)
        sel = (a > 0) & (b > 0)
        m = np.zeros((g, g), dtype=np.float64)
        if sel.any():
            ia = index[a[sel]]
            ib = index[b[sel]]
            np.add.at(m, (ia, ib), 1.0)
            m = m + m.T  # symmetric pairing
        out.append(m)
    return out


def _glcm_from_matrix(p: np.ndarray, lv: np.ndarray) -> dict[str, float]:
    lvf = lv.astype(np.float64)
    g = lv.size
    li = lvf[:, None]
    lj = lvf[None, :]
    px = p.sum(axis=1)
    ux = float(np.sum(lvf * px))
    sig2 = float(np.sum((lvf - ux) ** 2 * px))
    sig = np.sqrt(sig2)

    # distributions of i+j and |i-j| over integer level values
    isum = (lv[:, None] + lv[None, :]).ravel()
    idiff = np.abs(lv[:, None] - lv[None, :]).ravel()
    pflat = p.ravel()
    p_sum = np.bincount(isum, weights=pflat)
    p_diff = np.bincount(idiff, weights=pflat)
    k_sum = np.arange(p_sum.size, dtype=np.float64)
    k_diff = np.arange(p_diff.size, dtype=np.float64)

    py = p.sum(axis=0)
    hxy = _entropy(pflat)
    hx = _entropy(px)
    hy = _entropy(py)
    pxpy = px[:, None] * py[None, :]
    nz = pflat > 0
    hxy1 = float(-np.sum(pflat[nz] * np.log2(pxpy.ravel()[nz])))
    hxy2 = _entropy(pxpy.ravel())

    diff_avg = float(np.sum(k_diff * p_diff))
    dm = li - lj
    ng = float(g)
    off_diag = ~np.eye(g, dtype=bool)

    corr = 1.0
    if sig > 0:
        corr = (float(np.sum(li * lj * p)) - ux * ux) / (sig * sig)
    imc1 = 0.0
    if max(hx, hy) > 0:
        imc1 = (hxy - hxy1) / max(hx, hy)
    imc2 = float(np.sqrt(max(0.0, 1.0 - np.exp(-2.0 * (hxy2 - hxy)))))

    return {
        "autocorrelation": float(np.sum(li * lj * p)),
        "joint_average": ux,
        "cluster_prominence": float(np.sum((li + lj - 2 * ux) ** 4 * p)),
        "cluster_shade": float(np.sum((li + lj - 2 * ux) ** 3 * p)),
        "cluster_tendency": float(np.sum((li + lj - 2 * ux) ** 2 * p)),
        "contrast": float(np.sum(dm**2 * p)),
        "correlation": corr,
        "difference_average": diff_avg,
        "difference_entropy": _entropy(p_diff),
        "difference_variance": float(np.sum((k_diff - diff_avg) ** 2 * p_diff)),
        "joint_energy": float(np.sum(p**2)),
        "joint_entropy": hxy,
        "imc1": imc1,
        "imc2": imc2,
        "idm": float(np.sum(p / (1.0 + dm**2))),
        "idmn": float(np.sum(p / (1.0 + dm**2 / ng**2))),
        "id": float(np.sum(p / (1.0 + np.abs(dm)))),
        "idn": float(np.sum(p / (1.0 + np.abs(dm) / ng))),
        "inverse_variance": float(np.sum(p[off_diag] / dm[off_diag] ** 2))
        if g > 1
        else 0.0,
        "maximum_probability": float(p.max()),
        "sum_entropy": _entropy(p_sum),
        "sum_squares": float(np.sum((li - ux) ** 2 * p)),
    }


def glcm_features(grid: np.ndarray) -> dict[str, float]:
    """Direction-averaged GLCM features from a level grid.

    Directions without any co-occurring pair are excluded from the average;
    if no direction has a pair the self-co-occurrence fallback applies.
    """
    lv = _present_levels(grid)
    mats = glcm_matrices(grid, lv)
    per_dir = []
    for m in mats:
        tot = m.sum()
        if tot > 0:
            per_dir.append(_glcm_from_matrix(m / tot, lv))
    if not per_dir:
        counts = np.bincount(grid[grid > 0])[lv]
        m = np.diag(counts.astype(np.float64))
        per_dir.append(_glcm_from_matrix(m / m.sum(), lv))
    return {k: float(np.mean([d[k] for d in per_dir])) for k in GLCM_FEATURES}


# ---------------------------------------------------------------------------
# GLRLM
# ---------------------------------------------------------------------------

def glrlm_matrix(grid: np.ndarray, off: tuple[int, int, int], levels: np.ndarray | None = None) -> np.ndarray:
    """Run-length count matrix (Ng, max_run_length) for one direction.

    A run is a maximal chain of consecutive voxels along ``off`` sharing one
    level; voxels outside the ROI break runs.
    """
    lv = _present_levels(grid) if levels is None else np.asarray(levels)
    index = np.full(int(lv.max()) + 1, -1, dtype=np.int64)
    index[lv] = np.arange(lv.size)
    nx, ny, nz = grid.shape
    dx, dy, dz = off
    # A voxel starts a run when its predecessor along the direction is
    # outside the grid, outside the ROI, or a different level.
    pad = np.pad(grid, 1)
    pred = pad[1 - dx : 1 - dx + nx, 1 - dy : 1 - dy + ny, 1 - dz : 1 - dz + nz]
    starts = (grid > 0) & (pred != grid)
    xs, ys, zs = np.nonzero(starts)
    lvl = grid[xs, ys, zs]
    lengths = np.ones(xs.size, dtype=np.int64)
    idx = np.arange(xs.size)
    px, py, pz = xs.copy(), ys.copy(), zs.copy()
    while idx.size:
        px = px + dx
        py = py + dy
        pz = pz + dz
        ok = (
            (px >= 0) & (px < nx) & (py >= 0) & (py < ny) & (pz >= 0) & (pz < nz)
        )
        if ok.any():
            sub = np.zeros(idx.size, dtype=bool)
            sub[ok] = grid[px[ok], py[ok], pz[ok]] == lvl[ok]
            ok = sub
        lengths[idx[ok]] += 1
        idx, px, py, pz, lvl = idx[ok], px[ok], py[ok], pz[ok], lvl[ok]
    max_len = int(lengths.max()) if lengths.size else 1
    m = np.zeros((lv.size, max_len), dtype=np.float64)
    start_lv = grid[xs, ys, zs]
    np.add.at(m, (index[start_lv], lengths - 1), 1.0)
    return m


def _glrlm_from_matrix(m: np.ndarray, lv: np.ndarray, n_voxels: int) -> dict[str, float]:
    nr = m.sum()
    lvf = lv.astype(np.float64)[:, None]
    rl = np.arange(1, m.shape[1] + 1, dtype=np.float64)[None, :]
    p = m / nr
    mu_i = float(np.sum(lvf * p))
    mu_l = float(np.sum(rl * p))
    row = m.sum(axis=1)
    col = m.sum(axis=0)
    return {
        "short_run_emphasis": float(np.sum(m / rl**2) / nr),
        "long_run_emphasis": float(np.sum(m * rl**2) / nr),
        "gray_level_nonuniformity": float(np.sum(row**2) / nr),
        "gray_level_nonuniformity_normalized": float(np.sum(row**2) / nr**2),
        "run_length_nonuniformity": float(np.sum(col**2) / nr),
        "run_length_nonuniformity_normalized": float(np.sum(col**2) / nr**2),
        "run_percentage": float(nr / n_voxels),
        "gray_level_variance": float(np.sum((lvf - mu_i) ** 2 * p)),
        "run_variance": float(np.sum((rl - mu_l) ** 2 * p)),
        "run_entropy": _entropy(p.ravel()),
        "low_gray_level_run_emphasis": float(np.sum(m / lvf**2) / nr),
        "high_gray_level_run_emphasis": float(np.sum(m * lvf**2) / nr),
        "short_run_low_gray_level_emphasis": float(np.sum(m / (lvf**2 * rl**2)) / nr),
        "short_run_high_gray_level_emphasis": float(np.sum(m * lvf**2 / rl**2) / nr),
        "long_run_low_gray_level_emphasis": float(np.sum(m * rl**2 / lvf**2) / nr),
        "long_run_high_gray_level_emphasis": float(np.sum(m * lvf**2 * rl**2) / nr),
    }


def glrlm_features(grid: np.ndarray) -> dict[str, float]:
    """GLRLM features averaged over the 13 directions."""
    lv = _present_levels(grid)
    n_voxels = int(np.count_nonzero(grid))
    per_dir = [
        _glrlm_from_matrix(glrlm_matrix(grid, off, lv), lv, n_voxels)
        for off in DIRECTIONS_13
    ]
    return {k: float(np.mean([d[k] for d in per_dir])) for k in GLRLM_FEATURES}


# ---------------------------------------------------------------------------
# GLDM
# ---------------------------------------------------------------------------

def gldm_features(grid: np.ndarray, alpha: float = 0.0) -> dict[str, float]:
    """Dependence-matrix features over the 26-neighborhood.

    A neighbor is dependent when |level - center level| <= alpha (default 0,
    exact equality).  The dependence count includes the center voxel itself,
    so an isolated voxel has dependence 1.
    """
    lv = _present_levels(grid)
    index = np.full(int(lv.max()) + 1, -1, dtype=np.int64)
    index[lv] = np.arange(lv.size)
    dep = np.zeros(grid.shape, dtype=np.int64)
    for off in DIRECTIONS_13:
        a, b = _pair_views(grid, off)
        both = (a > 0) & (b > 0)
        close = both & (np.abs(a - b) <= alpha)
        sl_a, sl_b = [], []
        for n, d in zip(grid.shape, off):
            sl_a.append(slice(max(0, -d), n - max(0, d)))
            sl_b.append(slice(max(0, d), n - max(0, -d)))
        dep[tuple(sl_a)] += close
        dep[tuple(sl_b)] += close
    roi = grid > 0
    deps = dep[roi] + 1  # the center voxel always depends on itself
    lvls = grid[roi]
    nz = int(roi.sum())
    max_dep = int(deps.max())
    m = np.zeros((lv.size, max_dep), dtype=np.float64)
    np.add.at(m, (index[lvls], deps - 1), 1.0)

    lvf = lv.astype(np.float64)[:, None]
    dv = np.arange(1, max_dep + 1, dtype=np.float64)[None, :]
    p = m / nz
    mu_i = float(np.sum(lvf * p))
    mu_d = float(np.sum(dv * p))
    row = m.sum(axis=1)
    col = m.sum(axis=0)
    return {
        "small_dependence_emphasis": float(np.sum(m / dv**2) / nz),
        "large_dependence_emphasis": float(np.sum(m * dv**2) / nz),
        "gray_level_nonuniformity": float(np.sum(row**2) / nz),
        "dependence_nonuniformity": float(np.sum(col**2) / nz),
        "dependence_nonuniformity_normalized": float(np.sum(col**2) / nz**2),
        "gray_level_variance": float(np.sum((lvf - mu_i) ** 2 * p)),
        "dependence_variance": float(np.sum((dv - mu_d) ** 2 * p)),
        "dependence_entropy": _entropy(p.ravel()),
        "low_gray_level_emphasis": float(np.sum(m / lvf**2) / nz),
        "high_gray_level_emphasis": float(np.sum(m * lvf**2) / nz),
        "small_dependence_low_gray_level_emphasis": float(np.sum(m / (lvf**2 * dv**2)) / nz),
        "small_dependence_high_gray_level_emphasis": float(np.sum(m * lvf**2 / dv**2) / nz),
        "large_dependence_low_gray_level_emphasis": float(np.sum(m * dv**2 / lvf**2) / nz),
        "large_dependence_high_gray_level_emphasis": float(np.sum(m * lvf**2 * dv**2) / nz),
    }


# ---------------------------------------------------------------------------
# NGTDM
# ---------------------------------------------------------------------------

def ngtdm_features(grid: np.ndarray) -> dict[str, float]:
    """Neighborhood gray-tone difference features.

    Each ROI voxel contributes |level - mean level of its in-ROI 26
    neighbors|; a voxel with no in-ROI neighbor contributes 0.  Coarseness
    of a flat ROI returns the documented 1e6 sentinel.
    """
    lv = _present_levels(grid)
    index = np.full(int(lv.max()) + 1, -1, dtype=np.int64)
    index[lv] = np.arange(lv.size)
    nbr_sum = np.zeros(grid.shape, dtype=np.float64)
    nbr_cnt = np.zeros(grid.shape, dtype=np.int64)
    for off in DIRECTIONS_13:
        a, b = _pair_views(grid, off)
        both = (a > 0) & (b > 0)
        sl_a, sl_b = [], []
        for n, d in zip(grid.shape, off):
            sl_a.append(slice(max(0, -d), n - max(0, d)))
            sl_b.append(slice(max(0, d), n - max(0, -d)))
        sa, sb = tuple(sl_a), tuple(sl_b)
        nbr_sum[sa] += np.where(both, b, 0)
        nbr_sum[sb] += np.where(both, a, 0)
        nbr_cnt[sa] += both
        nbr_cnt[sb] += both
    roi = grid > 0
    lvls = grid[roi].astype(np.float64)
    cnt = nbr_cnt[roi]
    avg = np.where(cnt > 0, nbr_sum[roi] / np.maximum(cnt, 1), lvls)
    dev = np.abs(lvls - avg)
    nv = lvls.size
    s = np.zeros(lv.size, dtype=np.float64)
    np.add.at(s, index[grid[roi]], dev)
    n_i = np.bincount(index[grid[roi]], minlength=lv.size).astype(np.float64)
    p = n_i / nv
    lvf = lv.astype(np.float64)

    ngp = int(np.count_nonzero(p))
    ps = float(np.sum(p * s))
    sum_s = float(np.sum(s))

    coarseness = 1.0 / ps if ps > 0 else COARSENESS_SENTINEL
    if ngp > 1:
        pij = p[:, None] * p[None, :]
        dij2 = (lvf[:, None] - lvf[None, :]) ** 2
        contrast = float(np.sum(pij * dij2)) / (ngp * (ngp - 1)) * (sum_s / nv)
    else:
        contrast = 0.0
    nzsel = p > 0
    pi = p[nzsel]
    si = s[nzsel]
    li = lvf[nzsel]
    denom_busy = float(np.sum(np.abs(li[:, None] * pi[:, None] - li[None, :] * pi[None, :])))
    busyness = ps / denom_busy if denom_busy > 0 else 0.0
    complexity = float(
        np.sum(
            np.abs(li[:, None] - li[None, :])
            * (pi[:, None] * si[:, None] + pi[None, :] * si[None, :])
            / (pi[:, None] + pi[None, :])
        )
    ) / nv
    strength = (
        float(np.sum((pi[:, None] + pi[None, :]) * (li[:, None] - li[None, :]) ** 2)) / sum_s
        if sum_s > 0
        else 0.0
    )
    return {
        "coarseness": coarseness,
        "contrast": contrast,
        "busyness": busyness,
        "complexity": complexity,
        "strength": strength,
    }
