"""Array-in/array-out bindings for the tomoaug toolkit.

`tomoaug` traffics in small frozen dataclasses (Image2D, AugmentConfig).
This package wraps its entry points so a training pipeline can feed plain
2-D numpy buffers and get plain buffers back, making kernel augmentation a
drop-in transform.

Marshalling rules, kept deliberately strict:

* inputs must be 2-D, C-contiguous (row-major) float32/float64 arrays;
  anything else is rejected rather than silently copied or reshaped;
* a float64 input crosses into the native code with zero copies, float32
  costs exactly the one cast copy; results come back as the native
  output's own float64 buffer, never a copy of it;
* there is no logic here beyond validation and wrapping, so the native
  test suite is authoritative for numerical behavior, and native errors
  propagate unchanged with their original messages.

All functions are stateless and callable from multiple threads; the heavy
numeric sections run inside numpy/scipy kernels, which drop the interpreter
lock on their own.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

import tomoaug as _native
from tomoaug import AugmentConfig, FilterSpec, Image2D, Sinogram

__version__ = _native.__version__

__all__ = [
    "ArrayView",
    "bound_fbpaug",
    "bound_transform",
    "dice",
    "fbp",
    "radon",
    "__version__",
]

# native dice already accepts bare 0/1 arrays; nothing to marshal
dice = _native.dice

_FLOAT_DTYPES = (np.dtype(np.float32), np.dtype(np.float64))


def _checked_buffer(array) -> np.ndarray:
    arr = np.asanyarray(array)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-D array, got {arr.ndim} dimension(s)")
    if arr.dtype not in _FLOAT_DTYPES:
        raise ValueError(f"expected a float32/float64 buffer, got dtype {arr.dtype}")
    if not arr.flags.c_contiguous:
        raise ValueError(
            "expected a C-contiguous row-major buffer; "
            "pass np.ascontiguousarray(array) if a copy is acceptable"
        )
    return arr


@dataclass(frozen=True)
class ArrayView:
    """A 2-D row-major float buffer plus its pixel spacing in mm.

    Wraps the caller's array without copying; use it instead of a bare
    array when the data is not on a 1 mm grid. Round trips with the
    native image type are lossless: `to_image` casts float32 up to
    float64 (exact) and hands float64 over as the same buffer.
    """

    data: np.ndarray
    spacing: tuple[float, float] = (1.0, 1.0)

    def __post_init__(self):
        object.__setattr__(self, "data", _checked_buffer(self.data))
        sy, sx = self.spacing
        object.__setattr__(self, "spacing", (float(sy), float(sx)))

    @classmethod
    def from_image(cls, img: Image2D) -> "ArrayView":
        return cls(img.values, img.spacing)

    def to_image(self) -> Image2D:
        data = self.data
        if data.dtype != np.float64:
            data = data.astype(np.float64)
        return Image2D(data, self.spacing)


def _as_image(array) -> Image2D:
    if isinstance(array, ArrayView):
        return array.to_image()
    if isinstance(array, Image2D):
        return array
    return ArrayView(array).to_image()


def _as_config(config) -> AugmentConfig:
    if config is None:
        return AugmentConfig()
    if isinstance(config, AugmentConfig):
        return config
    if isinstance(config, Mapping):
        return AugmentConfig().replace(**config)
    raise ValueError(f"config must be an AugmentConfig, a mapping or None, got {type(config)!r}")


def bound_fbpaug(array, a: float, b: float, n_angles: int | None = None) -> np.ndarray:
    """Reconstruction-kernel augmentation on a plain buffer.

    Same contract as the native call: a = 0 reproduces the plain
    re-reconstruction bit for bit, a > 0 sharpens, a in [-1, 0) smooths.
    `n_angles` of 0/None means one projection per detector bin.
    """
    out = _native.fbpaug(_as_image(array), a, b, n_angles=n_angles or None)
    return out.values


def bound_transform(array, config=None, seed: int = 0, index: int = 0) -> np.ndarray:
    """The full sampled augmentation pipeline on a plain buffer.

    `config` is an AugmentConfig, a mapping of its keys, or None for the
    defaults; `seed`/`index` key the item's random stream exactly like a
    CLI batch run, so (seed=7, index=3) here matches file 4 of a sorted
    ten-file `augment --seed 7` batch byte for byte.
    """
    cfg = _as_config(config)
    out = _native.transform(_as_image(array), cfg, item_index=index, master_seed=seed)
    return out.values


def radon(array, n_angles: int, spacing: float = 1.0) -> np.ndarray:
    """Forward-project a square buffer; rows of the result are angles."""
    if isinstance(array, ArrayView):
        img = array.to_image()
    else:
        img = Image2D(_checked_buffer(array).astype(np.float64, copy=False), (spacing, spacing))
    return _native.radon(img, n_angles).values


def fbp(array, a: float = 0.0, b: float = 1.0, det_spacing: float = 1.0) -> np.ndarray:
    """Filtered back-projection of a sinogram buffer (rows = angles).

    (a, b) select the reconstruction kernel; the default a = 0 is the
    plain ramp.
    """
    arr = _checked_buffer(array).astype(np.float64, copy=False)
    sino = Sinogram(arr, det_spacing=det_spacing)
    return _native.fbp(sino, FilterSpec.kab(a, b)).values
