"""Overlap metrics, paired significance tests, and agreement summaries.

Masks are images whose values are exactly 0 or 1; every function here also
accepts a bare array where spacing does not matter. The statistics are
hand-checkable: the signed-rank p-value is an exact tail enumeration for
small samples and a tie-corrected normal approximation above that, and the
agreement table is plain per-pair means and differences.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import erfc
from scipy.stats import rankdata

from .tomography import Image2D

# Exact enumeration walks the 2^n sign assignments via a subset-sum table;
# beyond this n the normal approximation is already accurate to ~1e-3.
EXACT_LIMIT = 20


def _as_mask(arr) -> np.ndarray:
    values = arr.values if isinstance(arr, Image2D) else np.asarray(arr)
    values = np.asarray(values, dtype=np.float64)
    if not np.isin(values, (0.0, 1.0)).all():
        raise ValueError("masks must contain only 0 and 1")
    return values != 0.0


def dice(x, y) -> float:
    """Dice overlap 2|X & Y| / (|X| + |Y|); two empty masks count as 1.0."""
    mx = _as_mask(x)
    my = _as_mask(y)
    if mx.shape != my.shape:
        raise ValueError(f"mask shapes differ: {mx.shape} vs {my.shape}")
    total = int(mx.sum()) + int(my.sum())
    if total == 0:
        return 1.0
    return 2.0 * int((mx & my).sum()) / total


def lesion_volume(mask, spacing=None) -> float:
    """Positive-pixel count times pixel area (mm^2 for 2-D slices).

    ``spacing`` defaults to the mask's own when it is an image, else 1x1.
    """
    if spacing is None:
        spacing = mask.spacing if isinstance(mask, Image2D) else (1.0, 1.0)
    m = _as_mask(mask)
    return float(int(m.sum()) * float(spacing[0]) * float(spacing[1]))


def wilcoxon_greater(x, y) -> float:
    """One-sided Wilcoxon signed-rank p-value for 'x tends to exceed y'.

    Zero differences are dropped; ties get midranks. Up to EXACT_LIMIT
    nonzero pairs the p-value is the exact tail (count of sign assignments
    with W+ at least as observed, over 2^n); above that, the normal
    approximation with tie-corrected variance and a 0.5 continuity
    correction.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.ndim != 1 or y.ndim != 1 or x.shape != y.shape:
        raise ValueError("inputs must be 1-D vectors of equal length")
    if x.size < 5:
        raise ValueError("need at least 5 pairs")
    diff = x - y
    diff = diff[diff != 0.0]
    n = diff.size
    if n == 0:
        raise ValueError("all differences are zero; the test is undefined")
    ranks = rankdata(np.abs(diff))
    w_plus = float(ranks[diff > 0].sum())

    if n <= EXACT_LIMIT:
        # Work in doubled ranks: midranks are multiples of 1/2, so 2*rank
        # is an exact small integer and the subset-sum table stays integral.
        doubled = np.rint(2.0 * ranks).astype(np.int64)
        total = int(doubled.sum())
        poly = np.zeros(total + 1, dtype=np.float64)
        poly[0] = 1.0
        for r in doubled:
            shifted = np.zeros_like(poly)
            shifted[int(r):] = poly[: -int(r)]
            poly = poly + shifted
        target = int(np.rint(2.0 * w_plus))
        return float(poly[target:].sum() / 2.0**n)

    mean = n * (n + 1) / 4.0
    _, counts = np.unique(ranks, return_counts=True)
    var = n * (n + 1) * (2 * n + 1) / 24.0 - ((counts**3 - counts).sum()) / 48.0
    z = (w_plus - mean - 0.5) / np.sqrt(var)
    return float(0.5 * erfc(z / np.sqrt(2.0)))


def bonferroni(p_values, n_comparisons: int | None = None) -> np.ndarray:
    """Bonferroni correction: p * m clamped to 1. m defaults to len(p_values)."""
    p = np.asarray(p_values, dtype=np.float64)
    if p.ndim != 1 or p.size == 0:
        raise ValueError("p_values must be a non-empty 1-D vector")
    if ((p < 0) | (p > 1)).any():
        raise ValueError("p-values must lie in [0, 1]")
    m = p.size if n_comparisons is None else int(n_comparisons)
    if m < p.size:
        raise ValueError("n_comparisons must cover every p-value")
    return np.minimum(p * m, 1.0)


@dataclass(frozen=True)
class PairRecord:
    """Volumes and overlap for one soft/sharp reconstruction pair."""

    pair_id: str
    volume_soft: float
    volume_sharp: float
    dice: float

    def __post_init__(self):
        if not 0.0 <= self.dice <= 1.0:
            raise ValueError(f"dice out of [0, 1]: {self.dice}")


@dataclass(frozen=True)
class BlandAltman:
    """Agreement summary: per-pair points plus bias and 1.96-sigma limits."""

    points: tuple[tuple[float, float], ...]  # (mean, soft - sharp) per pair
    bias: float
    lower: float
    upper: float


def bland_altman_points(records) -> BlandAltman:
    """Per-pair (mean volume, soft - sharp) points with agreement limits.

    The difference is always soft minus sharp, never reordered, so the sign
    tells which kernel segments larger. Limits are bias +- 1.96 times the
    sample std (ddof=1) of the differences; a single pair gets zero-width
    limits.
    """
    records = list(records)
    if not records:
        raise ValueError("need at least one pair")
    points = tuple(
        ((r.volume_soft + r.volume_sharp) / 2.0, r.volume_soft - r.volume_sharp)
        for r in records
    )
    diffs = np.asarray([p[1] for p in points])
    bias = float(diffs.mean())
    spread = float(diffs.std(ddof=1)) if diffs.size > 1 else 0.0
    return BlandAltman(points, bias, bias - 1.96 * spread, bias + 1.96 * spread)


def write_pairs_csv(records, path) -> None:
    """CSV of pair records: pair_id, mean_volume, diff_volume, dice.

    Header row, comma separators, '.' decimals, LF endings; floats use the
    shortest roundtrip notation so identical inputs give identical bytes.
    """
    ba = bland_altman_points(records)
    lines = ["pair_id,mean_volume,diff_volume,dice"]
    for rec, (mean, diff) in zip(records, ba.points):
        lines.append(f"{rec.pair_id},{float(mean)!r},{float(diff)!r},{float(rec.dice)!r}")
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def threshold_segment(
    img: Image2D,
    low: float,
    high: float,
    min_component_px: int = 0,
) -> Image2D:
    """Mask of pixels with low <= value <= high, as a 0/1 image.

    4-connected components smaller than ``min_component_px`` are dropped,
    which is enough to suppress speckle in noisy reconstructions without
    pulling in a full morphology stack.
    """
    if not low <= high:
        raise ValueError("need low <= high")
    mask = (img.values >= low) & (img.values <= high)
    if min_component_px > 0 and mask.any():
        mask = _drop_small_components(mask, min_component_px)
    return Image2D(mask.astype(np.float64), img.spacing)


def _drop_small_components(mask: np.ndarray, min_component_px: int) -> np.ndarray:
    # Flood fill with an explicit stack; masks here are single slices, so
    # clarity beats asymptotics.
    labels = np.zeros(mask.shape, dtype=np.int64)
    current = 0
    h, w = mask.shape
    sizes = [0]
    for r0 in range(h):
        for c0 in range(w):
            if not mask[r0, c0] or labels[r0, c0]:
                continue
            current += 1
            size = 0
            stack = [(r0, c0)]
            labels[r0, c0] = current
            while stack:
                r, c = stack.pop()
                size += 1
                for rr, cc in ((r - 1, c), (r + 1, c), (r, c - 1), (r, c + 1)):
                    if 0 <= rr < h and 0 <= cc < w and mask[rr, cc] and not labels[rr, cc]:
                        labels[rr, cc] = current
                        stack.append((rr, cc))
            sizes.append(size)
    keep = np.asarray(sizes) >= min_component_px
    keep[0] = False
    return keep[labels]


@dataclass(frozen=True)
class ConsistencyReport:
    """Dice summary over a set of mask pairs."""

    dices: tuple[float, ...]
    mean: float
    std: float  # sample std (ddof=1); 0.0 for a single pair

    def summary_line(self) -> str:
        return f"{self.mean:.2f} ({self.std:.2f})"


def consistency_report(pairs) -> ConsistencyReport:
    """Dice per mask pair, plus mean and sample std for a "0.xx (0.xx)" line."""
    values = [dice(a, b) for a, b in pairs]
    if not values:
        raise ValueError("need at least one mask pair")
    arr = np.asarray(values, dtype=np.float64)
    mean = float(arr.mean())
    std = float(arr.std(ddof=1)) if arr.size > 1 else 0.0
    return ConsistencyReport(tuple(values), mean, std)
