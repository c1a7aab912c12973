#!/usr/bin/env python3
"""Transfer to [-1, 1]: the value at the edge carries the growth.

For a symmetric circle measure, x = cos(theta) maps it to a measure on
[-1, 1] whose Jacobi coefficients come from a quadratic map of the Schur
parameters.  At even circle degree M, p_{M/2}(1) matches phi_M(1) up to a
bounded factor, so the atom's entropy contribution transfers verbatim in
the log domain.
"""
import numpy as np

import opuc_entropy as oe

# all-zero parameters: the arcsine measure and Chebyshev polynomials
cheb = oe.real_line_map(np.zeros(16), 16)
print("chebyshev fixture: p_8(1) =", np.exp(cheb.log_p_at_one),
      " phi_16(1) =", np.exp(cheb.log_phi_at_one))

# the Jacobi coefficients of the map, first few
a, b = oe.jacobi_from_schur(np.zeros(8), 4)
print("jacobi a:", a, " b:", b)

# a one-stage construction state at its (even) checkpoint
state = oe.run_construction([0.25], [0.1])
kappa = state.stages[0].kappa
logw = float(np.log(kappa) - np.log1p(kappa))
rep = oe.real_line_map(state.schur, state.checkpoints[0], atom_log_weight=logw)
print(f"\ncheckpoint M = {rep.m}")
print("  log p_(M/2)(1) :", rep.log_p_at_one)
print("  log phi_M(1)   :", rep.log_phi_at_one)
print("  log ratio      :", rep.log_ratio, " within [log 1/4, log 4]:", rep.ratio_ok)
print("  atom entropy term, circle vs line (logs):",
      rep.circle_atom_log, rep.line_atom_log)
