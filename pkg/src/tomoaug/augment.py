"""Sinogram-space kernel augmentation and the baseline intensity augmentations.

The kernel augmentation re-reconstructs an image through the full
project/filter/back-project chain with a member of the parametric filter
family, emulating what a different scanner reconstruction kernel would have
produced from the same raw data: positive ``a`` turns a smooth image sharp,
negative ``a`` turns a sharp image smooth.

All sampled parameters come from per-item `RngStream`s derived from
(master_seed, item_index), so an augmented batch is reproducible regardless
of worker count or completion order.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from .filtering import FilterSpec, fbp
from .rng import RngStream
from .tomography import (
    Image2D,
    _sample_bilinear,
    crop_after_radon,
    pad_for_radon,
    radon,
)

_RANGE_FIELDS = {
    "sharpen_a_range",
    "sharpen_b_range",
    "smooth_a_range",
    "smooth_b_range",
    "window_center_range",
    "window_width_range",
}


@dataclass(frozen=True)
class AugmentConfig:
    """Sampling ranges and probabilities for every augmentation family.

    Serialized as a flat ``key = value`` file (ranges as ``lo,hi`` pairs);
    every key below is also a CLI override. Default sampling scheme:
    sharpening a ~ U[10, 40] with b ~ U[1, 4], smoothing
    a ~ U[-1, 0] with b ~ U[0.1, 1], each firing a quarter of the time;
    log-gamma std 0.2; additive noise sigma 0.1 in min-max-normalized
    units; window center U[-700, -500] HU and width U[1300, 1700] HU;
    rotation+flip under a single 0.5 coin.
    """

    master_seed: int = 0
    p_sharpen: float = 0.25
    p_smooth: float = 0.25
    sharpen_a_range: tuple[float, float] = (10.0, 40.0)
    sharpen_b_range: tuple[float, float] = (1.0, 4.0)
    smooth_a_range: tuple[float, float] = (-1.0, 0.0)
    smooth_b_range: tuple[float, float] = (0.1, 1.0)
    p_gamma: float = 0.0
    gamma_log_std: float = 0.2
    p_noise: float = 0.0
    noise_sigma: float = 0.1
    p_window: float = 0.0
    window_center_range: tuple[float, float] = (-700.0, -500.0)
    window_width_range: tuple[float, float] = (1300.0, 1700.0)
    p_flip_rot: float = 0.5
    flip_rot_independent: bool = False
    n_angles: int = 0  # 0 = one projection per detector bin of the padded grid
    resample_mm: float = 0.0  # 0 = keep the native grid
    resample_first: bool = True

    def __post_init__(self):
        for name in ("p_sharpen", "p_smooth", "p_gamma", "p_noise", "p_window", "p_flip_rot"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must be a probability, got {p}")
        if self.p_sharpen + self.p_smooth > 1.0 + 1e-12:
            raise ValueError("p_sharpen + p_smooth must not exceed 1")
        for name in _RANGE_FIELDS:
            lo, hi = getattr(self, name)
            if not lo <= hi:
                raise ValueError(f"{name} is empty: ({lo}, {hi})")
        if self.smooth_a_range[0] < -1.0:
            raise ValueError("smoothing a range must stay >= -1")
        if not self.sharpen_b_range[0] > 0 or not self.smooth_b_range[0] > 0:
            raise ValueError("b ranges must stay > 0")
        if self.gamma_log_std < 0 or self.noise_sigma < 0:
            raise ValueError("spread parameters must be >= 0")
        if self.window_width_range[0] <= 0:
            raise ValueError("window widths must be positive")
        if self.n_angles < 0:
            raise ValueError("n_angles must be >= 0 (0 = auto)")
        if self.resample_mm < 0:
            raise ValueError("resample_mm must be >= 0 (0 = off)")

    def replace(self, **changes) -> "AugmentConfig":
        return dataclasses.replace(self, **changes)

    def to_file(self, path) -> None:
        lines = []
        for f in dataclasses.fields(self):
            v = getattr(self, f.name)
            if f.name in _RANGE_FIELDS:
                lines.append(f"{f.name} = {v[0]},{v[1]}")
            else:
                lines.append(f"{f.name} = {v}")
        with open(path, "w", encoding="ascii", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")

    @classmethod
    def from_file(cls, path) -> "AugmentConfig":
        fields = {f.name: f for f in dataclasses.fields(cls)}
        kwargs = {}
        with open(path, "r", encoding="ascii") as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ValueError(f"{path}:{lineno}: expected 'key = value'")
                key, value = (part.strip() for part in line.split("=", 1))
                if key not in fields:
                    raise ValueError(f"{path}:{lineno}: unknown config key {key!r}")
                kwargs[key] = _parse_config_value(key, value)
        return cls(**kwargs)


def _parse_config_value(key: str, value: str):
    if key in _RANGE_FIELDS:
        parts = value.split(",")
        if len(parts) != 2:
            raise ValueError(f"{key} expects 'lo,hi', got {value!r}")
        return (float(parts[0]), float(parts[1]))
    if key in ("master_seed", "n_angles"):
        return int(value)
    if key in ("flip_rot_independent", "resample_first"):
        lowered = value.lower()
        if lowered not in ("true", "false", "1", "0"):
            raise ValueError(f"{key} expects a boolean, got {value!r}")
        return lowered in ("true", "1")
    return float(value)


@dataclass(frozen=True)
class KernelDraw:
    """Outcome of one kernel-augmentation sampling step."""

    kind: str  # "sharpen" | "smooth" | "identity"
    a: float | None = None
    b: float | None = None


def sample_fbpaug(rng: RngStream, cfg: AugmentConfig) -> KernelDraw:
    """Draw a kernel move: sharpen / smooth / leave untouched.

    One uniform decides the branch; sharpening draws (a, b) from the sharp
    ranges, smoothing from the smooth ranges, identity consumes no further
    randomness.
    """
    u = rng.random()
    if u < cfg.p_sharpen:
        a = rng.uniform(*cfg.sharpen_a_range)
        b = rng.uniform(*cfg.sharpen_b_range)
        return KernelDraw("sharpen", a, b)
    if u < cfg.p_sharpen + cfg.p_smooth:
        a = rng.uniform(*cfg.smooth_a_range)
        b = rng.uniform(*cfg.smooth_b_range)
        return KernelDraw("smooth", a, b)
    return KernelDraw("identity")


def reconstruct_with_kernels(
    img: Image2D,
    specs,
    n_angles: int | None = None,
    background: float | None = None,
) -> list[Image2D]:
    """Project an image once, reconstruct it with each filter in ``specs``.

    The shared pipeline behind `fbpaug`, plain re-reconstruction and paired
    kernel emulation: shift the background to zero, pad to the projection
    canvas, Radon-transform, then filter/back-project/rescale per spec and
    undo the shift and crop. Outputs keep the input's shape and spacing.

    ``background`` defaults to the image minimum (air for CT slices);
    ``n_angles`` defaults to one projection per detector bin.
    """
    bg = float(img.values.min()) if background is None else float(background)
    shifted = Image2D(img.values - bg, img.spacing)
    padded, rec = pad_for_radon(shifted, fill=0.0)
    n = n_angles if n_angles else padded.width
    sino = radon(padded, n)
    outs = []
    for spec in specs:
        recon = fbp(sino, spec)
        restored = Image2D(recon.values + bg, recon.spacing)
        outs.append(crop_after_radon(restored, rec))
    return outs


def fbpaug(
    img: Image2D,
    a: float,
    b: float,
    n_angles: int | None = None,
    background: float | None = None,
) -> Image2D:
    """Emulate reconstruction with a different kernel: BP(F^-1(F(R(I)) * F(k_ab))).

    a = 0 reproduces the plain ramp re-reconstruction bit for bit; a > 0
    sharpens, a in [-1, 0) smooths.
    """
    return reconstruct_with_kernels(img, [FilterSpec.kab(a, b)], n_angles, background)[0]


def gamma_aug(img: Image2D, gamma: float) -> Image2D:
    """Gamma intensity transform anchored to the image range.

    ((I - m)/(M - m))**gamma * (M - m) + m with m/M the image min/max, so
    both endpoints stay fixed; constant images pass through unchanged.
    """
    if not gamma > 0:
        raise ValueError("gamma must be > 0")
    m = img.values.min()
    big = img.values.max()
    if big == m:
        return Image2D(img.values.copy(), img.spacing)
    span = big - m
    values = ((img.values - m) / span) ** gamma * span + m
    return Image2D(values, img.spacing)


def noise_aug(img: Image2D, rng: RngStream, sigma: float = 0.1) -> Image2D:
    """Additive Gaussian noise of std ``sigma`` in min-max-normalized units.

    Raw HU spans make a fixed sigma meaningless, so the noise is scaled by
    the image range: normalize to [0, 1], perturb, invert. Constant images
    (zero range) pass through unchanged.
    """
    m = img.values.min()
    big = img.values.max()
    if big == m:
        return Image2D(img.values.copy(), img.spacing)
    noise = rng.normal(0.0, sigma, img.values.shape)
    return Image2D(img.values + noise * (big - m), img.spacing)


def windowing_aug(img: Image2D, center: float, width: float) -> Image2D:
    """Clip values to the intensity window [center - width/2, center + width/2]."""
    if not width > 0:
        raise ValueError("window width must be > 0")
    lo = center - width / 2.0
    hi = center + width / 2.0
    return Image2D(np.clip(img.values, lo, hi), img.spacing)


def flip_rot_aug(
    img: Image2D,
    rng: RngStream,
    p: float = 0.5,
    independent: bool = False,
) -> Image2D:
    """Random quarter-turn rotation plus flip.

    Default ties both to a single coin of probability p: on success, rotate
    by k*90 degrees with k drawn from {1, 2, 3} and flip along one axis
    (horizontal or vertical, equiprobable). ``independent`` gives each move
    its own coin instead. Draw order: rotation coin, k, flip coin/axis.
    """
    values = img.values
    spacing = img.spacing
    if independent:
        if rng.random() < p:
            k = 1 + rng.randint(3)
            values = np.rot90(values, k)
            if k % 2 == 1:
                spacing = (spacing[1], spacing[0])
        if rng.random() < p:
            axis = 1 if rng.random() < 0.5 else 0
            values = np.flip(values, axis=axis)
    elif rng.random() < p:
        k = 1 + rng.randint(3)
        values = np.rot90(values, k)
        if k % 2 == 1:
            spacing = (spacing[1], spacing[0])
        axis = 1 if rng.random() < 0.5 else 0
        values = np.flip(values, axis=axis)
    return Image2D(np.ascontiguousarray(values), spacing)


def resample(img: Image2D, target_spacing) -> Image2D:
    """Bilinear resample onto a grid with the requested pixel size (mm).

    The new shape is round(extent / target_spacing) per axis; sample
    positions are pixel-center aligned and clamped at the borders, so a
    constant image stays constant and an identity target reproduces the
    input values.
    """
    if np.isscalar(target_spacing):
        target_spacing = (float(target_spacing), float(target_spacing))
    ty, tx = (float(t) for t in target_spacing)
    if not (ty > 0 and tx > 0):
        raise ValueError("target spacing must be positive")
    sy, sx = img.spacing
    new_h = max(1, round(img.height * sy / ty))
    new_w = max(1, round(img.width * sx / tx))
    rows = (np.arange(new_h) + 0.5) * (ty / sy) - 0.5
    cols = (np.arange(new_w) + 0.5) * (tx / sx) - 0.5
    rows = np.clip(rows, 0.0, img.height - 1.0)
    cols = np.clip(cols, 0.0, img.width - 1.0)
    grid_r = np.broadcast_to(rows[:, None], (new_h, new_w))
    grid_c = np.broadcast_to(cols[None, :], (new_h, new_w))
    values = _sample_bilinear(img.values, grid_r, grid_c)
    return Image2D(values, (ty, tx))


def transform(
    img: Image2D,
    cfg: AugmentConfig,
    item_index: int = 0,
    master_seed: int | None = None,
) -> Image2D:
    """Apply the full sampled augmentation pipeline to one batch item.

    Stream: `RngStream(master_seed, item_index)`. Fixed order -- resample,
    kernel draw, gamma, noise, windowing, flips -- with one branch decision
    drawn per family even when its probability is zero, so the draw layout
    does not depend on earlier outcomes. ``resample_first = False`` moves
    the resampling after the intensity families instead.
    """
    seed = cfg.master_seed if master_seed is None else master_seed
    rng = RngStream(seed, item_index)
    out = img
    if cfg.resample_mm > 0 and cfg.resample_first:
        out = resample(out, cfg.resample_mm)

    draw = sample_fbpaug(rng, cfg)
    if draw.kind != "identity":
        out = fbpaug(out, draw.a, draw.b, n_angles=cfg.n_angles or None)

    if rng.random() < cfg.p_gamma:
        out = gamma_aug(out, float(np.exp(rng.normal(0.0, cfg.gamma_log_std))))

    if rng.random() < cfg.p_noise:
        out = noise_aug(out, rng, cfg.noise_sigma)

    if rng.random() < cfg.p_window:
        center = rng.uniform(*cfg.window_center_range)
        width = rng.uniform(*cfg.window_width_range)
        out = windowing_aug(out, center, width)

    out = flip_rot_aug(out, rng, cfg.p_flip_rot, cfg.flip_rot_independent)

    if cfg.resample_mm > 0 and not cfg.resample_first:
        out = resample(out, cfg.resample_mm)
    return out
