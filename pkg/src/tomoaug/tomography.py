"""Parallel-beam Radon transform and back-projection.

Geometry conventions shared by every operation in the package:

* pixel (row, col) of a square grid sits at physical
  (x, y) = ((col - c) * s, (row - c) * s) with c = (side - 1) / 2 and
  s the pixel spacing in mm, so the grid center is the origin;
* the projection at angle theta integrates along rays
  x cos(theta) + y sin(theta) = t;
* angles are theta_i = i * pi / n for i = 0..n-1, covering [0, pi);
* the detector axis has one bin per pixel and is centered on t = 0,
  which requires (and this module enforces) an odd bin count.

The forward transform assumes the object sits inside the grid's inscribed
circle on an approximately zero background; `pad_for_radon` provides the
canvas for that, and callers shift any nonzero background (e.g. -1000 HU
air) to zero before projecting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, eq=False)
class Image2D:
    """Rectangular grid of attenuation values with physical pixel spacing.

    values : (height, width) float64 array, row-major
    spacing : (sy, sx) pixel size in mm
    """

    values: np.ndarray
    spacing: tuple[float, float] = (1.0, 1.0)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 2 or v.shape[0] < 1 or v.shape[1] < 1:
            raise ValueError("image values must form a 2-D grid")
        sy, sx = self.spacing
        if not (sy > 0 and sx > 0):
            raise ValueError("pixel spacing must be positive")
        if not np.all(np.isfinite(v)):
            raise ValueError("image values must be finite")
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "spacing", (float(sy), float(sx)))

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True, eq=False)
class Sinogram:
    """Stack of parallel-beam projections, one row per angle.

    Row i holds p_theta(t) sampled on the centered detector axis for
    theta_i = i * pi / n_angles.
    """

    values: np.ndarray
    det_spacing: float = 1.0

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 2 or v.shape[0] < 1 or v.shape[1] < 1:
            raise ValueError("sinogram values must form a 2-D grid")
        if v.shape[1] % 2 == 0:
            raise ValueError("detector count must be odd so t=0 is a bin center")
        if not self.det_spacing > 0:
            raise ValueError("detector spacing must be positive")
        if not np.all(np.isfinite(v)):
            raise ValueError("sinogram values must be finite")
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "det_spacing", float(self.det_spacing))

    @property
    def n_angles(self) -> int:
        return self.values.shape[0]

    @property
    def n_detectors(self) -> int:
        return self.values.shape[1]

    @property
    def angles(self) -> np.ndarray:
        """Projection angles in radians: i * pi / n, strictly increasing on [0, pi)."""
        n = self.n_angles
        return np.arange(n) * (np.pi / n)

    def detector_axis(self) -> np.ndarray:
        """Physical t coordinate (mm) of each detector bin, centered on 0."""
        n = self.n_detectors
        return (np.arange(n) - (n - 1) / 2.0) * self.det_spacing


@dataclass(frozen=True)
class PadRecord:
    """Bookkeeping to undo `pad_for_radon`."""

    original: tuple[int, int]
    offsets: tuple[int, int]
    fill_value: float


def pad_for_radon(img: Image2D, fill: float = 0.0) -> tuple[Image2D, PadRecord]:
    """Embed an image in the centered square canvas the Radon transform needs.

    The canvas side is ceil(sqrt(h^2 + w^2)) bumped to odd so the detector
    axis of a subsequent `radon` call has a center bin; the original content
    lands centered, the margin takes ``fill``.
    """
    h, w = img.height, img.width
    side = math.ceil(math.hypot(h, w))
    if side % 2 == 0:
        side += 1
    top = (side - h) // 2
    left = (side - w) // 2
    canvas = np.full((side, side), float(fill), dtype=np.float64)
    canvas[top:top + h, left:left + w] = img.values
    return Image2D(canvas, img.spacing), PadRecord((h, w), (top, left), float(fill))


def crop_after_radon(img: Image2D, rec: PadRecord) -> Image2D:
    """Recover the original-size window recorded by `pad_for_radon`."""
    h, w = rec.original
    top, left = rec.offsets
    if top < 0 or left < 0 or top + h > img.height or left + w > img.width:
        raise ValueError(
            f"pad record {rec.original}+{rec.offsets} does not fit image "
            f"{img.height}x{img.width}"
        )
    return Image2D(img.values[top:top + h, left:left + w].copy(), img.spacing)


def _sample_bilinear(values: np.ndarray, rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
    """Bilinear sample at fractional (row, col) positions; zero outside the grid."""
    h, w = values.shape
    r0 = np.floor(rows).astype(np.intp)
    c0 = np.floor(cols).astype(np.intp)
    fr = rows - r0
    fc = cols - c0
    out = np.zeros(rows.shape, dtype=np.float64)
    for dr in (0, 1):
        for dc in (0, 1):
            rr = r0 + dr
            cc = c0 + dc
            wgt = (fr if dr else 1.0 - fr) * (fc if dc else 1.0 - fc)
            inside = (rr >= 0) & (rr < h) & (cc >= 0) & (cc < w)
            vals = values[np.clip(rr, 0, h - 1), np.clip(cc, 0, w - 1)]
            out += np.where(inside, wgt * vals, 0.0)
    return out


def radon(img: Image2D, n_angles: int) -> Sinogram:
    """Discrete parallel-beam Radon transform of a square image.

    Equivalent to rotating the image by -theta with bilinear interpolation
    and summing columns, sampled directly along each ray so no intermediate
    rotated copy is materialized. Line integrals are scaled by the physical
    pixel size, so a ray crossing a disk of value v and chord length L mm
    integrates to approximately v * L.

    Parameters
    ----------
    img : Image2D
        Square image with isotropic spacing; content should sit inside the
        inscribed circle on a ~0 background (see `pad_for_radon`).
    n_angles : int
        Number of projection angles over [0, pi).

    Returns
    -------
    Sinogram
        (n_angles, n_detectors) with one detector bin per pixel (count made
        odd) and det_spacing equal to the pixel spacing.
    """
    if img.height != img.width:
        raise ValueError("radon requires a square image; use pad_for_radon first")
    if img.spacing[0] != img.spacing[1]:
        raise ValueError("radon requires isotropic pixel spacing; resample first")
    if n_angles < 1:
        raise ValueError("n_angles must be >= 1")

    side = img.height
    spacing = img.spacing[1]
    n_det = side if side % 2 == 1 else side + 1
    center = (side - 1) / 2.0

    # detector offset t and ray parameter u, both in pixel units
    t = (np.arange(n_det) - (n_det - 1) / 2.0)[None, :]
    u = (np.arange(side) - center)[:, None]

    sino = np.empty((n_angles, n_det), dtype=np.float64)
    thetas = np.arange(n_angles) * (np.pi / n_angles)
    for i, theta in enumerate(thetas):
        cos_t = np.cos(theta)
        sin_t = np.sin(theta)
        cols = t * cos_t - u * sin_t + center
        rows = t * sin_t + u * cos_t + center
        sino[i] = _sample_bilinear(img.values, rows, cols).sum(axis=0) * spacing
    return Sinogram(sino, det_spacing=spacing)


def backproject(sino: Sinogram) -> Image2D:
    """Discrete back-projection: (1/(2n)) * sum_i f_theta_i(x cos + y sin).

    Each output pixel accumulates, over all angles, the projection value at
    its ray coordinate t(x, y), linearly interpolated along the detector
    axis; coordinates outside the detector range contribute zero. The
    output is square with side n_detectors and the detector spacing as
    pixel spacing.
    """
    values = sino.values
    n, n_det = values.shape
    spacing = sino.det_spacing
    center = (n_det - 1) / 2.0

    # pixel ray coordinate in detector-bin units; x varies with column, y with row
    x = np.arange(n_det) - center
    y = np.arange(n_det) - center

    out = np.zeros((n_det, n_det), dtype=np.float64)
    for i, theta in enumerate(sino.angles):
        pos = x[None, :] * np.cos(theta) + y[:, None] * np.sin(theta) + center
        k0 = np.floor(pos).astype(np.intp)
        frac = pos - k0
        row = values[i]
        v0 = np.where((k0 >= 0) & (k0 < n_det), row[np.clip(k0, 0, n_det - 1)], 0.0)
        k1 = k0 + 1
        v1 = np.where((k1 >= 0) & (k1 < n_det), row[np.clip(k1, 0, n_det - 1)], 0.0)
        out += (1.0 - frac) * v0 + frac * v1
    out /= 2.0 * n
    return Image2D(out, (spacing, spacing))
