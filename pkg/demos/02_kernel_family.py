"""
The two-parameter reconstruction kernel family
==============================================

The family multiplies the ramp filter by (1 + a * w**b), where w is the
frequency normalized so the Nyquist bin sits at 1. Positive a boosts high
frequencies (sharper, noisier images), a in [-1, 0) suppresses them, and
a = 0 leaves the ramp untouched. This prints the gain curves side by side.
"""

import numpy as np

from tomoaug import kab_response, ramp_response

n_detectors = 363
ramp = ramp_response(n_detectors)

settings = [
    ("a=-1.0 b=0.7", kab_response(n_detectors, -1.0, 0.7)),
    ("a=-0.5 b=1.0", kab_response(n_detectors, -0.5, 1.0)),
    ("a=0 (ramp)  ", kab_response(n_detectors, 0.0, 1.0)),
    ("a=10  b=3.0 ", kab_response(n_detectors, 10.0, 3.0)),
    ("a=30  b=3.0 ", kab_response(n_detectors, 30.0, 3.0)),
]

w = ramp.normalized_freq
picks = [np.argmin(np.abs(w - target)) for target in (0.1, 0.25, 0.5, 0.75, 1.0)]

header = "kernel         " + "".join(f"  w={w[i]:.2f}" for i in picks)
print(header)
print("-" * len(header))
for label, resp in settings:
    cols = "".join(f"  {resp.gains[i]:6.3f}" for i in picks)
    print(f"{label}{cols}")

# the boost at the Nyquist bin is exactly 1 + a
for label, resp in settings:
    ratio = resp.gains[-1] / ramp.gains[-1]
    print(f"{label} multiplies the Nyquist gain by {ratio:5.2f}")
