"""Command-line front end: phantoms, projection, reconstruction, augmentation.

Every command is deterministic given its flags and --seed; running one twice
produces byte-identical output files. Batch commands key each item's RNG
stream by its position in the sorted input listing, so --jobs never changes
results. Errors print one line to stderr and exit with a class-specific
code:

    2  bad command line (argparse)
    3  missing or unreadable/unwritable file
    4  bad RIMG magic
    5  bad RIMG header
    6  truncated RIMG payload
    7  invalid values (parameters, config, masks)
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .augment import AugmentConfig, _parse_config_value, reconstruct_with_kernels, transform
from .filtering import FilterSpec, fbp
from .metrics import (
    PairRecord,
    consistency_report,
    dice,
    lesion_volume,
    threshold_segment,
    write_pairs_csv,
)
from .phantoms import add_noise, disk_phantom, shepp_logan
from .rimg import (
    RimgHeaderError,
    RimgMagicError,
    RimgTruncatedError,
    export_pgm,
    read_rimg,
    write_rimg,
)
from .tomography import Image2D, Sinogram, pad_for_radon, radon

EXIT_IO = 3
EXIT_MAGIC = 4
EXIT_HEADER = 5
EXIT_TRUNCATED = 6
EXIT_INVALID = 7

# Probability fields per augmentation family, for --mode restriction.
_FAMILY_PROBS = {
    "fbpaug": ("p_sharpen", "p_smooth"),
    "gamma": ("p_gamma",),
    "noise": ("p_noise",),
    "windowing": ("p_window",),
    "flips": ("p_flip_rot",),
}


def _flag_name(field: str) -> str:
    return "--" + field.replace("_", "-")


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    # Every AugmentConfig key is a flag; flags override --config values.
    # master_seed is spelled --seed on the command line.
    group = parser.add_argument_group("config overrides")
    for f in dataclasses.fields(AugmentConfig):
        if f.name == "master_seed":
            continue
        group.add_argument(
            _flag_name(f.name),
            dest=f.name,
            metavar="LO,HI" if "range" in f.name else f.name.upper(),
            help=f"override config key {f.name} (default {f.default})",
        )
    parser.add_argument("--seed", type=int, help="master seed (config key master_seed)")
    parser.add_argument("--config", metavar="FILE", help="flat key=value config file")


def _effective_config(args) -> AugmentConfig:
    cfg = AugmentConfig.from_file(args.config) if args.config else AugmentConfig()
    changes = {}
    for f in dataclasses.fields(AugmentConfig):
        if f.name == "master_seed":
            continue
        raw = getattr(args, f.name, None)
        if raw is not None:
            changes[f.name] = _parse_config_value(f.name, raw)
    if args.seed is not None:
        changes["master_seed"] = args.seed
    return cfg.replace(**changes) if changes else cfg


def _restrict_to_mode(cfg: AugmentConfig, mode: str) -> AugmentConfig:
    """Zero out every family but ``mode``; a switched-off chosen family fires always."""
    if mode == "full":
        return cfg
    keep = _FAMILY_PROBS[mode]
    changes = {
        name: 0.0
        for probs in _FAMILY_PROBS.values()
        for name in probs
        if name not in keep
    }
    if all(getattr(cfg, name) == 0.0 for name in keep):
        if mode == "fbpaug":
            changes.update(p_sharpen=0.5, p_smooth=0.5)
        else:
            changes[keep[0]] = 1.0
    return cfg.replace(**changes)


def _read_image(path) -> Image2D:
    obj = read_rimg(path)
    if not isinstance(obj, Image2D):
        raise ValueError(f"{path}: expected an image, found a sinogram")
    return obj


def _cmd_phantom(args) -> int:
    if args.preset == "shepp-logan":
        img = shepp_logan(args.size, spacing=args.spacing)
    else:
        img = disk_phantom(args.size, args.radius_frac, args.value, spacing=args.spacing)
    if args.noise_sigma > 0:
        img = add_noise(img, args.noise_sigma, args.seed)
    write_rimg(img, args.out)
    return 0


def _cmd_radon(args) -> int:
    img = _read_image(args.input)
    padded, _ = pad_for_radon(img)
    n = args.n_angles if args.n_angles else padded.width
    write_rimg(radon(padded, n), args.out)
    return 0


def _cmd_fbp(args) -> int:
    obj = read_rimg(args.input, expect_kind="sinogram")
    if args.filter == "ramp":
        spec = FilterSpec.ramp()
    else:
        if args.a is None or args.b is None:
            raise ValueError("--filter kab requires --a and --b")
        spec = FilterSpec.kab(args.a, args.b)
    write_rimg(fbp(obj, spec), args.out)
    return 0


def _augment_one(path: Path, out_path: Path, cfg: AugmentConfig, index: int) -> None:
    img = _read_image(path)
    write_rimg(transform(img, cfg, item_index=index), out_path)


def _cmd_augment(args) -> int:
    cfg = _restrict_to_mode(_effective_config(args), args.mode)
    src = Path(args.input)
    if src.is_dir():
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        files = sorted(p for p in src.iterdir() if p.suffix == ".rimg")
        if not files:
            raise FileNotFoundError(f"{src}: no .rimg files to augment")
        jobs = max(1, args.jobs)
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            futures = [
                pool.submit(_augment_one, p, out_dir / p.name, cfg, i)
                for i, p in enumerate(files)
            ]
            for fut in futures:
                fut.result()
    else:
        _augment_one(src, Path(args.out), cfg, args.index)
    return 0


def _cmd_pair(args) -> int:
    specs = [FilterSpec.kab(args.a1, args.b1), FilterSpec.kab(args.a2, args.b2)]
    obj = read_rimg(args.input)
    if isinstance(obj, Sinogram):
        first, second = (fbp(obj, spec) for spec in specs)
    else:
        first, second = reconstruct_with_kernels(obj, specs, args.n_angles or None)
    write_rimg(first, args.out1)
    write_rimg(second, args.out2)
    return 0


def _cmd_segment(args) -> int:
    img = _read_image(args.input)
    mask = threshold_segment(img, args.low, args.high, args.min_component_px)
    write_rimg(mask, args.out, kind="mask")
    return 0


def _mask_pairs(path_a: Path, path_b: Path) -> list[tuple[str, Path, Path]]:
    if path_a.is_dir() != path_b.is_dir():
        raise ValueError("eval inputs must be two files or two directories")
    if not path_a.is_dir():
        return [(path_a.stem, path_a, path_b)]
    names = sorted(p.name for p in path_a.iterdir() if p.suffix == ".rimg")
    if not names:
        raise FileNotFoundError(f"{path_a}: no .rimg masks")
    pairs = []
    for name in names:
        other = path_b / name
        if not other.exists():
            raise FileNotFoundError(f"{other}: missing partner mask")
        pairs.append((Path(name).stem, path_a / name, other))
    return pairs


def _cmd_eval(args) -> int:
    pairs = _mask_pairs(Path(args.soft), Path(args.sharp))
    records = []
    masks = []
    for pair_id, soft_path, sharp_path in pairs:
        soft = read_rimg(soft_path, expect_kind="mask")
        sharp = read_rimg(sharp_path, expect_kind="mask")
        records.append(
            PairRecord(pair_id, lesion_volume(soft), lesion_volume(sharp), dice(soft, sharp))
        )
        masks.append((soft, sharp))
    report = consistency_report(masks)
    if args.csv:
        write_pairs_csv(records, args.csv)
    print(report.summary_line())
    return 0


def _cmd_export_pgm(args) -> int:
    export_pgm(_read_image(args.input), args.out, args.center, args.width)
    return 0


def _cmd_config(args) -> int:
    _effective_config(args).to_file(args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tomoaug",
        description="Sinogram-space kernel augmentation toolkit for CT slices.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("phantom", help="generate a test image")
    p.add_argument("--preset", choices=("shepp-logan", "disk"), required=True)
    p.add_argument("--size", type=int, default=256, help="side length in pixels")
    p.add_argument("--spacing", type=float, default=1.0, help="pixel size in mm")
    p.add_argument("--value", type=float, default=1.0, help="disk attenuation value")
    p.add_argument("--radius-frac", type=float, default=0.4, help="disk radius / side")
    p.add_argument("--noise-sigma", type=float, default=0.0, help="additive noise std")
    p.add_argument("--seed", type=int, default=0, help="noise seed")
    p.add_argument("-o", "--out", required=True, help="output .rimg image")
    p.set_defaults(func=_cmd_phantom)

    p = sub.add_parser("radon", help="project an image to a sinogram")
    p.add_argument("input", help="input .rimg image")
    p.add_argument("--n-angles", type=int, default=0, help="0 = one per detector bin")
    p.add_argument("-o", "--out", required=True, help="output .rimg sinogram")
    p.set_defaults(func=_cmd_radon)

    p = sub.add_parser("fbp", help="reconstruct a sinogram")
    p.add_argument("input", help="input .rimg sinogram")
    p.add_argument("--filter", choices=("ramp", "kab"), default="ramp")
    p.add_argument("--a", type=float, help="kernel strength, >= -1")
    p.add_argument("--b", type=float, help="kernel exponent, > 0")
    p.add_argument("-o", "--out", required=True, help="output .rimg image")
    p.set_defaults(func=_cmd_fbp)

    p = sub.add_parser("augment", help="apply the sampled augmentation pipeline")
    p.add_argument("input", help="input .rimg image, or a directory for a batch")
    p.add_argument("-o", "--out", required=True, help="output file, or directory for a batch")
    p.add_argument(
        "--mode",
        choices=("full",) + tuple(_FAMILY_PROBS),
        default="full",
        help="restrict to one family; its probability is kept, or raised to 1 if off",
    )
    p.add_argument("--index", type=int, default=0, help="stream index for a single file")
    p.add_argument("--jobs", type=int, default=1, help="parallel workers for a batch")
    _add_config_flags(p)
    p.set_defaults(func=_cmd_augment)

    p = sub.add_parser("pair", help="reconstruct one input with two kernels")
    p.add_argument("input", help=".rimg sinogram (reconstructed twice) or image (reprojected once)")
    p.add_argument("--a1", type=float, required=True)
    p.add_argument("--b1", type=float, required=True)
    p.add_argument("--a2", type=float, required=True)
    p.add_argument("--b2", type=float, required=True)
    p.add_argument("--n-angles", type=int, default=0, help="0 = one per detector bin")
    p.add_argument("--out1", required=True, help="output image for kernel 1")
    p.add_argument("--out2", required=True, help="output image for kernel 2")
    p.set_defaults(func=_cmd_pair)

    p = sub.add_parser("segment", help="threshold an image into a 0/1 mask")
    p.add_argument("input", help="input .rimg image")
    p.add_argument("--low", type=float, required=True, help="lower intensity bound")
    p.add_argument("--high", type=float, required=True, help="upper intensity bound")
    p.add_argument("--min-component-px", type=int, default=0, help="drop smaller blobs")
    p.add_argument("-o", "--out", required=True, help="output .rimg mask")
    p.set_defaults(func=_cmd_segment)

    p = sub.add_parser("eval", help="mask-pair agreement: summary line + CSV")
    p.add_argument("soft", help="mask file or directory (soft arm)")
    p.add_argument("sharp", help="matching mask file or directory (sharp arm)")
    p.add_argument("--csv", help="write pair_id,mean_volume,diff_volume,dice rows here")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("export-pgm", help="windowed 16-bit PGM for visual checks")
    p.add_argument("input", help="input .rimg image")
    p.add_argument("--center", type=float, required=True, help="window center")
    p.add_argument("--width", type=float, required=True, help="window width")
    p.add_argument("-o", "--out", required=True, help="output .pgm file")
    p.set_defaults(func=_cmd_export_pgm)

    p = sub.add_parser("config", help="write the effective config as a key=value file")
    _add_config_flags(p)
    p.add_argument("-o", "--out", required=True, help="output config file")
    p.set_defaults(func=_cmd_config)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except RimgMagicError as exc:
        print(f"tomoaug: {exc}", file=sys.stderr)
        return EXIT_MAGIC
    except RimgTruncatedError as exc:
        print(f"tomoaug: {exc}", file=sys.stderr)
        return EXIT_TRUNCATED
    except RimgHeaderError as exc:
        print(f"tomoaug: {exc}", file=sys.stderr)
        return EXIT_HEADER
    except (FileNotFoundError, NotADirectoryError, PermissionError, IsADirectoryError) as exc:
        print(f"tomoaug: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, TypeError) as exc:
        print(f"tomoaug: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
