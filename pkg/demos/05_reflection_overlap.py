# %% [markdown]
# # Does the reflected packet look free?
#
# After the bounce, the interacting state should be close to some freely
# evolved packet. We compare with free evolution from the same start,
# allowing a time offset tau that accounts for the early bounce off the core.
# This one takes about ten seconds.

# %%
from ljspec import LJParams, PacketSpec, barrier_truncation_point, build_grid, completeness_probe

p = LJParams(1.0, 1.0)
grid = build_grid(barrier_truncation_point(p), 100.0, 10001)
rep = completeness_probe(p, PacketSpec(center=30.0, k0=3.0, width=2.0), [9.0, 10.0, 11.0], grid)
for T, m, tau in zip(rep.times, rep.overlaps, rep.tau_star):
    print(f"T={T:5.1f}  best overlap={m:.6f}  tau*={tau:.4f}")
