# %% [markdown]
# # The potential and its landmarks
#
# V(x) = alpha/x^12 - beta/x^6 has a hard core near the origin and a single
# attractive well. Everything else in the package is built on a handful of
# closed-form numbers derived from it.

# %%
import numpy as np

from ljspec import (LJParams, absence_criterion, barrier_truncation_point, eval_potential, landmarks,
                    negative_part_moment)

p = LJParams(alpha=1.0, beta=10.0)
lm = landmarks(p)
print(f"zero crossing x0 = {lm.x0:.6f}")
print(f"minimum at x_min = {lm.x_min:.6f}, depth gamma = {lm.gamma:.3f}")

# %% [markdown]
# The minimum is the lower bound of the quadratic form, so no eigenvalue can
# sit below gamma. A quick sample of V near the well:

# %%
x = np.linspace(0.9 * lm.x0, 3.0, 8)
for xi, vi in zip(x, eval_potential(p, x)):
    print(f"  V({xi:.3f}) = {vi:+.4f}")

# %% [markdown]
# The integral of the negative part raised to the 1/2 power times x caps the
# number of bound states, and a simpler inequality between alpha and beta
# rules them out entirely.

# %%
for beta in (1.0, 3.0, 5.0, 10.0, 20.0):
    q = LJParams(1.0, beta)
    print(f"beta={beta:5.1f}  moment={negative_part_moment(q):8.4f}  no-bound-state criterion: {absence_criterion(q)}")

# %% [markdown]
# Numerically we never touch the origin. The grid starts where the
# zero-energy WKB amplitude under the core has dropped to e^-50.

# %%
print(f"truncation point eps = {barrier_truncation_point(p):.5f}")
