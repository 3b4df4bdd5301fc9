"""Measure the Mellin decay constants that weights.py freezes.

Run once; paste the printed constants into src/zetalab/weights.py. The grid
matches the decay acceptance check: sigma in {-1, 0, 1}, t in [0, 400].
"""

import numpy as np

from zetalab.weights import make_bump_weight

w = make_bump_weight()
ts = np.arange(0.0, 400.0 + 1e-9, 0.5)

worst_ratio = 0.0
for sigma in (-1.0, 0.0, 1.0):
    ss = sigma + 1j * ts
    vals, errs = w.mellin_W0_many(ss)
    assert errs.max() < 1e-12, errs.max()
    ratio = np.abs(vals) * 2.0 ** (-abs(sigma)) * np.exp(np.sqrt(ts / 2.0))
    i = int(np.argmax(ratio))
    print(f"sigma={sigma:+.0f}: max decay ratio {ratio[i]:.6f} at t={ts[i]}")
    worst_ratio = max(worst_ratio, float(ratio.max()))

print(f"\nK_CAL candidate (max ratio): {worst_ratio:.6f}")

for b in (1.25, 1.30, 1.32, 1.34):
    worst_a = 0.0
    for sigma in (-1.0, 0.0, 1.0):
        ss = sigma + 1j * ts
        vals, _ = w.mellin_W0_many(ss)
        a_req = np.abs(vals) * 2.0 ** (-abs(sigma)) * np.exp(b * np.sqrt(ts))
        worst_a = max(worst_a, float(a_req.max()))
    print(f"b={b}: required A = {worst_a:.6f}")
