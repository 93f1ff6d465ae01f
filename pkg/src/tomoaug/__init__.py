"""Sinogram-space kernel augmentation for CT slices.

Re-reconstructing an image through projection, parametric filtering, and
back-projection emulates scanner kernels the training set never saw; the
rest of the package is the supporting cast: phantoms, metrics, seeded
sampling, file formats, and a CLI.
"""

from .augment import (
    AugmentConfig,
    KernelDraw,
    fbpaug,
    flip_rot_aug,
    gamma_aug,
    noise_aug,
    reconstruct_with_kernels,
    resample,
    sample_fbpaug,
    transform,
    windowing_aug,
)
from .filtering import (
    RECONSTRUCTION_GAIN,
    FilterSpec,
    FrequencyResponse,
    fbp,
    filter_response,
    filter_sinogram,
    kab_response,
    ramp_response,
)
from .metrics import (
    BlandAltman,
    ConsistencyReport,
    PairRecord,
    bland_altman_points,
    bonferroni,
    consistency_report,
    dice,
    lesion_volume,
    threshold_segment,
    wilcoxon_greater,
    write_pairs_csv,
)
from .phantoms import (
    SHEPP_LOGAN_ELLIPSES,
    EllipseSpec,
    add_noise,
    analytic_disk_sinogram,
    disk_phantom,
    ellipses_phantom,
    shepp_logan,
)
from .rimg import (
    RimgError,
    RimgHeaderError,
    RimgMagicError,
    RimgTruncatedError,
    export_pgm,
    read_rimg,
    write_rimg,
)
from .rng import RngStream
from .tomography import (
    Image2D,
    PadRecord,
    Sinogram,
    backproject,
    crop_after_radon,
    pad_for_radon,
    radon,
)

__version__ = "0.1.0"

__all__ = [
    "AugmentConfig",
    "BlandAltman",
    "ConsistencyReport",
    "EllipseSpec",
    "FilterSpec",
    "FrequencyResponse",
    "Image2D",
    "KernelDraw",
    "PadRecord",
    "PairRecord",
    "RECONSTRUCTION_GAIN",
    "RimgError",
    "RimgHeaderError",
    "RimgMagicError",
    "RimgTruncatedError",
    "RngStream",
    "SHEPP_LOGAN_ELLIPSES",
    "Sinogram",
    "add_noise",
    "analytic_disk_sinogram",
    "backproject",
    "bland_altman_points",
    "bonferroni",
    "consistency_report",
    "crop_after_radon",
    "dice",
    "disk_phantom",
    "ellipses_phantom",
    "export_pgm",
    "fbp",
    "fbpaug",
    "filter_response",
    "filter_sinogram",
    "flip_rot_aug",
    "gamma_aug",
    "kab_response",
    "lesion_volume",
    "noise_aug",
    "pad_for_radon",
    "radon",
    "ramp_response",
    "read_rimg",
    "reconstruct_with_kernels",
    "resample",
    "sample_fbpaug",
    "shepp_logan",
    "threshold_segment",
    "transform",
    "wilcoxon_greater",
    "windowing_aug",
    "write_pairs_csv",
    "write_rimg",
]
