# %% [markdown]
# # Phase shifts and Levinson's theorem
#
# The s-wave phase shift is computed from a first-order equation for the
# phase, so it comes out continuous in k without any unwrapping.

# %%
import math

import numpy as np

from ljspec import LJParams, levinson_defect, phase_shift, phase_shift_curve

for beta, n_bound in ((1.0, 0), (10.0, 1)):
    p = LJParams(1.0, beta)
    k_min = 0.01 * math.sqrt(beta**2 / 4)
    curve = phase_shift_curve(p, np.geomspace(k_min, 25.0, 120))
    print(f"beta={beta:4.1f}: delta(k_min)/pi = {curve.delta[0] / math.pi:.4f}, "
          f"N = {n_bound}, defect/pi = {levinson_defect(curve, n_bound) / math.pi:.4f}")

# %% [markdown]
# At low energy a purely repulsive core behaves like a hard sphere of
# radius a, so delta is close to -k a.

# %%
core = LJParams(1.0, 1e-12)
for k in (0.01, 0.02, 0.04):
    print(f"k={k}: -delta/k = {-phase_shift(core, k) / k:.6f}")

# %% [markdown]
# At high energy the core keeps pushing the phase down roughly like -k times
# the classical turning point. |S| stays at one throughout.

# %%
p = LJParams(1.0, 1.0)
curve = phase_shift_curve(p, [1.0, 5.0, 10.0, 20.0])
for s, delta in zip(curve.s_matrix(), curve.delta):
    print(f"k={s.k:5.1f}  delta={delta:+8.4f}  |S|-1={abs(s.s) - 1:+.1e}")
