"""
Does the reconstruction kernel move a segmentation?
===================================================

Reconstructs each synthetic case with two smoothing kernels and with a
smoothing/sharpening mismatch, thresholds a lesion in both, and compares
the Dice agreement of the two pairings. Matched kernels should agree far
better, and the volume differences should show a systematic sign.
"""

import numpy as np

from tomoaug import (
    EllipseSpec,
    FilterSpec,
    PairRecord,
    RngStream,
    add_noise,
    bland_altman_points,
    bonferroni,
    consistency_report,
    dice,
    ellipses_phantom,
    lesion_volume,
    reconstruct_with_kernels,
    threshold_segment,
    wilcoxon_greater,
)

kernels = [FilterSpec.kab(-1.0, 0.7), FilterSpec.kab(-0.5, 0.85), FilterSpec.kab(30.0, 3.0)]

matched, mismatched, records = [], [], []
matched_dice, mismatched_dice = [], []
for i in range(6):
    rng = RngStream(2024, i)
    lesion = EllipseSpec(
        (rng.uniform(-0.25, 0.25), rng.uniform(-0.25, 0.25)),
        (rng.uniform(0.16, 0.26), rng.uniform(0.16, 0.26)),
        rng.uniform(0.0, 3.14),
        0.35,
    )
    body = EllipseSpec((0.0, 0.0), (0.78, 0.78), 0.0, 0.2)
    case = add_noise(ellipses_phantom(96, [body, lesion]), 0.04, 9000 + i)

    # one projection, three reconstructions
    smooth1, smooth2, sharp = reconstruct_with_kernels(case, kernels)
    masks = [threshold_segment(r, 0.42, 0.75, min_component_px=20)
             for r in (smooth1, smooth2, sharp)]
    matched_dice.append(dice(masks[0], masks[1]))
    mismatched_dice.append(dice(masks[0], masks[2]))
    records.append(PairRecord(
        f"case{i}", lesion_volume(masks[0]), lesion_volume(masks[2]),
        mismatched_dice[-1],
    ))
    matched.append((masks[0], masks[1]))
    mismatched.append((masks[0], masks[2]))

print("case   dice matched   dice mismatched")
for i, (m, x) in enumerate(zip(matched_dice, mismatched_dice)):
    print(f"{i:4d}   {m:12.3f}   {x:15.3f}")

print("matched kernels:   ", consistency_report(matched).summary_line())
print("mismatched kernels:", consistency_report(mismatched).summary_line())

# smoothing segments systematically larger than sharpening here
ba = bland_altman_points(records)
print(f"volume bias (smooth - sharp): {ba.bias:+.1f} mm^2, "
      f"limits [{ba.lower:+.1f}, {ba.upper:+.1f}]")

p = wilcoxon_greater(matched_dice, mismatched_dice)
print(f"one-sided p (matched agree better): {p:.4f}, "
      f"after correcting for 3 planned looks: {bonferroni([p], 3)[0]:.4f}")
