"""Synthetic test objects with known geometry and closed-form projections.

These stand in for clinical data in every test and demo: the disk has an
analytic sinogram (the primary oracle for the Radon transform), the ellipse
compositor builds the classic head phantom, and `add_noise` provides seeded
Gaussian perturbations for sharpness/noise trade-off experiments.

Ellipse coordinates are normalized to [-1, 1]^2 with x increasing along
columns and y increasing upward, so the same spec works at every grid size.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .rng import RngStream
from .tomography import Image2D, Sinogram

_SUPERSAMPLE = 4  # subsamples per axis for anti-aliased edges


@dataclass(frozen=True)
class EllipseSpec:
    """One additive ellipse: center/semi-axes in normalized units, value rho."""

    center: tuple[float, float]
    semi_axes: tuple[float, float]
    rotation: float = 0.0
    value: float = 0.0

    def __post_init__(self):
        if not (self.semi_axes[0] > 0 and self.semi_axes[1] > 0):
            raise ValueError("ellipse semi-axes must be positive")


# Classic Shepp-Logan head phantom: ten additive ellipses, outer skull at
# 2.0, brain tissue near 1.0, small features at +/-0.01..0.02 contrast.
# (x0, y0), (A, B), rotation in radians, additive value.
SHEPP_LOGAN_ELLIPSES = (
    EllipseSpec((0.0, 0.0), (0.69, 0.92), 0.0, 2.0),
    EllipseSpec((0.0, -0.0184), (0.6624, 0.874), 0.0, -0.98),
    EllipseSpec((0.22, 0.0), (0.11, 0.31), np.deg2rad(-18.0), -0.02),
    EllipseSpec((-0.22, 0.0), (0.16, 0.41), np.deg2rad(18.0), -0.02),
    EllipseSpec((0.0, 0.35), (0.21, 0.25), 0.0, 0.01),
    EllipseSpec((0.0, 0.1), (0.046, 0.046), 0.0, 0.01),
    EllipseSpec((0.0, -0.1), (0.046, 0.046), 0.0, 0.01),
    EllipseSpec((-0.08, -0.605), (0.046, 0.023), 0.0, 0.01),
    EllipseSpec((0.0, -0.606), (0.023, 0.023), 0.0, 0.01),
    EllipseSpec((0.06, -0.605), (0.023, 0.046), 0.0, 0.01),
)

PRESETS = {"shepp-logan": SHEPP_LOGAN_ELLIPSES}


def ellipses_phantom(size: int, ellipses, spacing: float = 1.0) -> Image2D:
    """Sum of ellipse indicator functions, anti-aliased by 4x supersampling.

    Each pixel's value is the mean over a 4x4 subgrid of the additive
    ellipse values, so boundary pixels carry their coverage fraction and a
    fully covered pixel carries the exact sum of values.
    """
    if size < 8:
        raise ValueError("phantom size must be >= 8")
    ss = _SUPERSAMPLE
    n = size * ss
    # subpixel centers in normalized [-1, 1] coordinates, y up
    coord = ((np.arange(n) + 0.5) / ss - 0.5 - (size - 1) / 2.0) / (size / 2.0)
    xs = coord[None, :]
    ys = -coord[:, None]
    acc = np.zeros((n, n), dtype=np.float64)
    for e in ellipses:
        dx = xs - e.center[0]
        dy = ys - e.center[1]
        cos_p = np.cos(e.rotation)
        sin_p = np.sin(e.rotation)
        major = (dx * cos_p + dy * sin_p) / e.semi_axes[0]
        minor = (-dx * sin_p + dy * cos_p) / e.semi_axes[1]
        acc += np.where(major**2 + minor**2 <= 1.0, e.value, 0.0)
    values = acc.reshape(size, ss, size, ss).mean(axis=(1, 3))
    return Image2D(values, (spacing, spacing))


def disk_phantom(size: int, radius_frac: float, value: float, spacing: float = 1.0) -> Image2D:
    """Centered disk of radius radius_frac * size/2 pixels, anti-aliased edge."""
    if not 0.0 < radius_frac < 1.0:
        raise ValueError("radius_frac must be in (0, 1)")
    disk = EllipseSpec((0.0, 0.0), (radius_frac, radius_frac), 0.0, value)
    return ellipses_phantom(size, [disk], spacing)


def shepp_logan(size: int, spacing: float = 1.0) -> Image2D:
    """The classic head phantom at the requested grid size."""
    return ellipses_phantom(size, SHEPP_LOGAN_ELLIPSES, spacing)


def analytic_disk_sinogram(
    radius: float,
    value: float,
    n_angles: int,
    n_detectors: int,
    det_spacing: float = 1.0,
) -> Sinogram:
    """Closed-form sinogram of a centered disk: p(t) = 2 v sqrt(R^2 - t^2).

    Identical for every angle; the oracle the discrete Radon transform is
    checked against. ``radius`` is in mm (pixels when det_spacing is 1).
    """
    t = (np.arange(n_detectors) - (n_detectors - 1) / 2.0) * det_spacing
    chord = 2.0 * value * np.sqrt(np.maximum(radius**2 - t**2, 0.0))
    return Sinogram(np.tile(chord, (n_angles, 1)), det_spacing=det_spacing)


def add_noise(img: Image2D, sigma: float, seed: int) -> Image2D:
    """Add zero-mean Gaussian noise of standard deviation sigma per pixel.

    Deterministic given the seed; sigma = 0 returns the values unchanged.
    """
    if sigma < 0:
        raise ValueError("sigma must be >= 0")
    if sigma == 0:
        return Image2D(img.values.copy(), img.spacing)
    noise = RngStream(seed, 0).normal(0.0, sigma, img.values.shape)
    return Image2D(img.values + noise, img.spacing)
