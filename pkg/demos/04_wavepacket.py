# %% [markdown]
# # A wavepacket bouncing off the core
#
# Crank-Nicolson is unitary, so the norm and the energy stay put up to
# rounding. We send a Gaussian towards the origin and watch the moments.

# %%
from ljspec import LJParams, assemble_hamiltonian, barrier_truncation_point, build_grid
from ljspec.dynamics import evolve, gaussian_packet, trajectory_summary

p = LJParams(1.0, 1.0)
grid = build_grid(barrier_truncation_point(p), 80.0, 8001)
op = assemble_hamiltonian(grid, p)
psi0 = gaussian_packet(grid, center=30.0, k0=-2.0, width=2.0)
traj = evolve(op, psi0, dt=1e-3, n_steps=8000, record_every=1000)

for t, x2, kin in zip(traj.times, traj.x_moment2, traj.kinetic):
    print(f"t={t:4.1f}  <x^2>^(1/2)={x2 ** 0.5:7.3f}  kinetic={kin:.6f}")

# %% [markdown]
# The packet reaches the core near t = 7 and turns around. The summary holds
# the drift numbers, the moment-growth slack and the affine certificate for
# the weighted norm.

# %%
for key, value in trajectory_summary(traj).items():
    print(f"{key}: {value}")
