"""Bit-exact file I/O: the RIMG raster container and 16-bit PGM export.

RIMG layout: 5-byte magic "RIMG\\n", a one-line ASCII JSON header, an LF,
then exactly height*width row-major little-endian float32 values. The
header keys are written in a fixed order with compact separators, so the
same object always serializes to the same bytes.

Header fields: kind ("image" | "sinogram" | "mask"), height, width,
spacing_mm [sy, sx], dtype "f32le"; sinograms add n_angles and
det_spacing_mm. Masks are images restricted to 0/1 values.
"""

from __future__ import annotations

import json

import numpy as np

from .tomography import Image2D, Sinogram

MAGIC = b"RIMG\n"
KINDS = ("image", "sinogram", "mask")
_MAX_HEADER = 4096  # sanity cap; real headers are well under 200 bytes


class RimgError(ValueError):
    """Base class for malformed RIMG files."""


class RimgMagicError(RimgError):
    """First five bytes are not the RIMG magic."""


class RimgHeaderError(RimgError):
    """Header line is not valid, complete, or of the expected kind."""


class RimgTruncatedError(RimgError):
    """Payload byte count does not match height*width."""


def _header_for(obj, kind: str | None) -> dict:
    if isinstance(obj, Sinogram):
        if kind not in (None, "sinogram"):
            raise ValueError(f"a sinogram cannot be written as kind {kind!r}")
        return {
            "kind": "sinogram",
            "height": obj.n_angles,
            "width": obj.n_detectors,
            "spacing_mm": [1.0, float(obj.det_spacing)],
            "dtype": "f32le",
            "n_angles": obj.n_angles,
            "det_spacing_mm": float(obj.det_spacing),
        }
    if isinstance(obj, Image2D):
        kind = "image" if kind is None else kind
        if kind not in ("image", "mask"):
            raise ValueError(f"an image cannot be written as kind {kind!r}")
        if kind == "mask" and not np.isin(obj.values, (0.0, 1.0)).all():
            raise ValueError("mask files may contain only 0 and 1")
        return {
            "kind": kind,
            "height": obj.height,
            "width": obj.width,
            "spacing_mm": [float(obj.spacing[0]), float(obj.spacing[1])],
            "dtype": "f32le",
        }
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def rimg_bytes(obj, kind: str | None = None) -> bytes:
    """Serialized RIMG content for an image, mask, or sinogram."""
    header = _header_for(obj, kind)
    head = json.dumps(header, separators=(",", ":")).encode("ascii")
    payload = np.ascontiguousarray(obj.values, dtype="<f4").tobytes()
    return MAGIC + head + b"\n" + payload


def write_rimg(obj, path, kind: str | None = None) -> None:
    """Write an image, mask, or sinogram; same object -> same bytes.

    ``kind`` overrides the default ("image" for images, "sinogram" for
    sinograms); pass "mask" to mark a 0/1 image as a mask.
    """
    with open(path, "wb") as fh:
        fh.write(rimg_bytes(obj, kind))


def read_rimg(path, expect_kind: str | None = None):
    """Parse an RIMG file into an `Image2D` (image/mask) or `Sinogram`.

    ``expect_kind`` turns a kind mismatch into an error, for callers that
    only accept, say, masks. Values come back float64; the payload bytes
    roundtrip exactly through float32.
    """
    with open(path, "rb") as fh:
        magic = fh.read(len(MAGIC))
        if magic != MAGIC:
            raise RimgMagicError(f"{path}: not an RIMG file (magic {magic!r})")
        line = fh.readline(_MAX_HEADER)
        if not line.endswith(b"\n"):
            raise RimgHeaderError(f"{path}: header line missing or unterminated")
        payload = fh.read()
    try:
        header = json.loads(line.decode("ascii"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise RimgHeaderError(f"{path}: header is not one-line ASCII JSON: {exc}") from exc
    return _decode(path, header, payload, expect_kind)


def _decode(path, header, payload: bytes, expect_kind: str | None):
    try:
        kind = header["kind"]
        height = int(header["height"])
        width = int(header["width"])
        spacing = tuple(float(s) for s in header["spacing_mm"])
        dtype = header["dtype"]
    except (KeyError, TypeError, ValueError) as exc:
        raise RimgHeaderError(f"{path}: bad header field: {exc}") from exc
    if kind not in KINDS:
        raise RimgHeaderError(f"{path}: unknown kind {kind!r}")
    if expect_kind is not None and kind != expect_kind:
        raise RimgHeaderError(f"{path}: expected kind {expect_kind!r}, found {kind!r}")
    if dtype != "f32le":
        raise RimgHeaderError(f"{path}: unsupported dtype {dtype!r}")
    if height < 1 or width < 1 or len(spacing) != 2:
        raise RimgHeaderError(f"{path}: bad dimensions in header")
    expected = 4 * height * width
    if len(payload) != expected:
        raise RimgTruncatedError(
            f"{path}: payload holds {len(payload)} bytes, header promises {expected}"
        )
    values = np.frombuffer(payload, dtype="<f4").reshape(height, width).astype(np.float64)
    if kind == "sinogram":
        try:
            n_angles = int(header["n_angles"])
            det_spacing = float(header["det_spacing_mm"])
        except (KeyError, TypeError, ValueError) as exc:
            raise RimgHeaderError(f"{path}: sinogram header incomplete: {exc}") from exc
        if n_angles != height:
            raise RimgHeaderError(f"{path}: n_angles {n_angles} != height {height}")
        return Sinogram(values, det_spacing)
    if kind == "mask" and not np.isin(values, (0.0, 1.0)).all():
        raise RimgHeaderError(f"{path}: mask payload contains values other than 0/1")
    return Image2D(values, spacing)


def export_pgm(img: Image2D, path, window_center: float, window_width: float) -> None:
    """16-bit binary PGM (P5, maxval 65535) of a windowed view.

    [center - width/2, center + width/2] maps linearly to [0, 65535] with
    clamping; graylevels round half-to-even (the window center lands on
    32768). Sample bytes are big-endian per the PGM convention.
    """
    if not window_width > 0:
        raise ValueError("window width must be > 0")
    lo = window_center - window_width / 2.0
    scaled = (img.values - lo) / window_width * 65535.0
    gray = np.rint(np.clip(scaled, 0.0, 65535.0)).astype(">u2")
    with open(path, "wb") as fh:
        fh.write(f"P5\n{img.width} {img.height}\n65535\n".encode("ascii"))
        fh.write(gray.tobytes())
