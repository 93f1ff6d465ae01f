"""
One slice, three kernels
========================

Reprojects a noisy disk once and reconstructs it with a smoothing, a
neutral and a sharpening kernel. The structures stay put; only texture and
edge crispness change, which is exactly what scanner kernel mismatch looks
like in real data.
"""

import pathlib

import numpy as np

from tomoaug import FilterSpec, add_noise, disk_phantom, export_pgm, reconstruct_with_kernels

out_dir = pathlib.Path("demo_out")
out_dir.mkdir(exist_ok=True)

slice_ = add_noise(disk_phantom(128, 0.8, 1.0), sigma=0.03, seed=11)

kernels = {
    "smooth": FilterSpec.kab(-1.0, 0.7),
    "plain": FilterSpec.ramp(),
    "sharp": FilterSpec.kab(30.0, 3.0),
}
# one shared projection, three reconstructions
results = reconstruct_with_kernels(slice_, list(kernels.values()))

c = (128 - 1) / 2
rr = np.hypot(*(np.mgrid[0:128, 0:128] - c))
flat = rr <= 28  # deep inside the disk, structure-free

print("kernel   flat-region std   edge 90-10% falloff")
for (name, _), recon in zip(kernels.items(), results):
    # azimuthal average kills the noise, leaving the pure edge profile
    bins = rr.round().astype(int)
    counts = np.bincount(bins.ravel())
    radial = np.bincount(bins.ravel(), recon.values.ravel()) / np.maximum(counts, 1)
    # walk outward from the plateau; the disk edge sits at radius 51
    outer = radial[30:70]
    r_hi = np.argmax(outer < 0.9)  # first radius below 90% of the disk value
    r_lo = np.argmax(outer < 0.1)
    print(f"{name:7s}  {recon.values[flat].std():15.4f}   {r_lo - r_hi:8d} px")
    export_pgm(recon, out_dir / f"03_{name}.pgm", window_center=0.5, window_width=1.5)

print(f"wrote three PGM renderings into {out_dir}/")
