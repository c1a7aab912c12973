#!/usr/bin/env python3
"""One transform step and where its entropy lives.

Truncate (here: the Lebesgue measure at degree 1), extend by a halved
reversed block profile, perturb by the calibrated atom.  The entropy
integral of the resulting degree-N polynomial concentrates in the atom
term, which scales like L^4 sqrt(N); the a.c. part stays O(1) small.
"""
import numpy as np

import opuc_entropy as oe

L = 0.25
tr = oe.transform_step(np.zeros(2), 1, L, delta=0.1)
print(f"accepted N = {tr.n} (subsequence member, growth factor {tr.c_used})")
print(f"kappa = {tr.kappa.value:.3e} < delta = 0.1")
print(f"block l2^2 = {tr.block_l2_sq:.6f}  (= L^2/4 times {tr.beta_square_sum:.4f})")

sigma = oe.sigma_measure(tr.carrier, tr.kappa.value)
params = oe.schur_of_perturbed(tr.carrier, tr.kappa.value, tr.n + 1)
rep = oe.entropy_integral(sigma, params, tr.n, monic=True, oversample=2)

print("\nentropy report at the checkpoint")
print("  total       :", rep.entropy)
print("  atom term   :", rep.atom_contribution)
print("  a.c. term   :", rep.ac_contribution)
print("  log+ / log- :", rep.entropy_plus, "/", rep.entropy_minus)
print("  quadrature  :", rep.quadrature_error)

ratio = rep.atom_contribution / (L**4 * np.sqrt(tr.n))
thresholds = oe.load_calibration()["thresholds"]
print(f"\natom term / (L^4 sqrt N) = {ratio:.4f}"
      f"  (calibrated floor {thresholds['entropy_atom']:.4f})")

bound = oe.entropy_upper_bound(params, tr.n)
print(f"ceiling sum|gamma| = {bound:.4f}; entropy stays below it: {rep.entropy < bound}")

# the same growth seen through a gauge: x log x doubles the monic entropy
gauge = oe.gauge_integral(sigma, params, tr.n, "x_log_x")
print("gauge x log x value     :", gauge.value, "(= 2 * entropy)")
