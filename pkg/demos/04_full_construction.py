#!/usr/bin/env python3
"""The staged construction, two stages at desk scale.

Each stage truncates the previous measure, appends a block, and adds a
calibrated atom; a trigonometric approximation of the previous checkpoint
integrand fixes the truncation degree so that all earlier checkpoint
entropies persist within 5 * eps'.
"""
import numpy as np

import opuc_entropy as oe

state = oe.run_construction([0.25, 0.25], [0.1, 0.05], eps_prime=0.01)

print("stage table")
print(" k   M'      M     deg f   kappa        atom term   atom/(L^4 sqrt M)")
for r in state.stages:
    print(f" {r.k}  {r.m_prime:6d} {r.m:6d} {r.f_degree:6d}   "
          f"{r.kappa:.3e}  {r.entropy_atom:.6f}    {r.atom_ratio:.4f}")

print("\ncheckpoint entropy matrix (rows: checkpoint, columns: stage)")
for j, row in enumerate(state.entropy_matrix, start=1):
    print(f"  M_{j} = {state.checkpoints[j-1]:5d}:",
          " ".join(f"{v:+.6f}" for v in row))
print("worst persistence margin over 5 eps':", state.persistence_slack())

print("\nparameter budget")
budget = 2 * (sum(r.scale**2 for r in state.stages) + sum(r.delta for r in state.stages))
print("  sum gamma^2 =", float(np.sum(state.schur**2)), " budget =", budget)
print("  log integral (closed form) =", state.log_szego_analytic)

print("\nmoment traces c_p by stage (p = 0..4)")
for k in range(state.stage_count + 1):
    print(f"  sigma^{k}:", " ".join(f"{v:+.3e}" for v in state.moment_history[k][:5]))

print("\nnote: from stage two on the quadrature misses the grid-invisible")
print("remnant of the previous atom (mass column below); the recorded")
print("checkpoint entropies are therefore conservative lower estimates.")
print("  a.c. mass deficits:", [f"{r.ac_mass_deficit:.2e}" for r in state.stages])

oe.save_state(state, "construction_state.txt")
print("\nstate written to construction_state.txt")
