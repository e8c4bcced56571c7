# %% [markdown]
# # Counting bound states
#
# The Hamiltonian is discretized on [eps, L] with Dirichlet ends. Sturm
# sequence counting gives the exact number of eigenvalues below any level,
# and bisection plus inverse iteration recovers the eigenpairs.

# %%
from ljspec import LJParams, count_negative, assemble_hamiltonian, barrier_truncation_point, build_grid, negative_eigenvalues
from ljspec.spectrum import boundary_behavior_check, check_convergence, shooting_count

p = LJParams(1.0, 10.0)
eps = barrier_truncation_point(p)
op = assemble_hamiltonian(build_grid(eps, 50.0, 20000), p)
report = negative_eigenvalues(op)
print(f"{report.count} bound state(s): {report.negative_eigenvalues}")
print(f"Bargmann-type cap: {report.bargmann_moment:.4f}")

# %% [markdown]
# The count is only trusted once it survives refinement (n -> 2n - 1) and
# extension (L -> 2L). A coarse grid is caught by the same protocol.

# %%
for n in (100, 20000):
    conv = check_convergence(p, eps, 50.0, n)
    print(f"n={n:6d}: count={conv.count} converged={conv.converged} {'; '.join(conv.reasons)}")

# %% [markdown]
# An independent check: integrate the ODE from eps at a trial energy and
# count the nodes of the solution.

# %%
for energy in (-10.0, -1.0):
    print(f"E={energy}: matrix {count_negative(op, energy)}, shooting {shooting_count(p, energy, eps, 50.0)}")

# %% [markdown]
# Near the core the eigenfunction dies off like exp(-sqrt(alpha)/(5 x^5)),
# which is much faster than linearly.

# %%
d = boundary_behavior_check(report)[0]
print(f"|psi|/x increasing: {d.ratio_increasing}, fitted slope ratio: {d.slope_ratio:.3f}")
