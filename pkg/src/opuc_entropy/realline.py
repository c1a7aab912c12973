"""Transfer of circle constructions to orthogonal polynomials on [-1, 1].

A symmetric measure on the circle (real Schur parameters) pushes forward
under x = cos(theta) to a measure on [-1, 1] whose Jacobi recurrence
coefficients come from the classical quadratic map

    a_{n+1}^2 = (1/4) (1 + g_{2n-1}) (1 - g_{2n}^2) (1 - g_{2n+1}),
    b_{n+1}   = (1/2) [ (1 - g_{2n-1}) g_{2n-2} - (1 + g_{2n-1}) g_{2n} ],

with the boundary convention g_{-1} = 1 (and the g_{-2} term vanishing).
All-zero parameters give the arcsine measure and the Chebyshev recurrence
a_1 = 1/sqrt(2), a_n = 1/2.

The orthonormal value p_{M/2}(1) tracks phi_M(1) up to a bounded factor,
so the entropy growth carried by the value at z = 1 transfers verbatim;
the report below measures both sides in the log domain.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError
from .opuc import as_schur, leading_coefficient_log

__all__ = ["RealLineReport", "jacobi_from_schur", "orthonormal_value_at_one", "real_line_map"]


def jacobi_from_schur(gammas, count: int):
    """Jacobi coefficients a_1..a_count, b_1..b_count of the cos-pushforward.

    Parameters beyond the given array are treated as zero.
    """
    g = as_schur(gammas)
    need = 2 * count + 2
    padded = np.zeros(need)
    padded[: min(g.size, need)] = g[:need]

    def at(i):
        if i == -1:
            return 1.0
        if i < -1:
            return 0.0
        return padded[i]

    a = np.empty(count)
    b = np.empty(count)
    for n in range(count):
        a2 = 0.25 * (1.0 + at(2 * n - 1)) * (1.0 - at(2 * n) ** 2) * (1.0 - at(2 * n + 1))
        if a2 <= 0:
            raise InvalidParameterError("degenerate Jacobi coefficient")
        a[n] = np.sqrt(a2)
        b[n] = 0.5 * ((1.0 - at(2 * n - 1)) * at(2 * n - 2) - (1.0 + at(2 * n - 1)) * at(2 * n))
    return a, b


def orthonormal_value_at_one(a, b, n: int):
    """(log |p_n(1)|, sign) by the three-term recurrence with rescaling.

    a_{n+1} p_{n+1}(x) = (x - b_{n+1}) p_n(x) - a_n p_{n-1}(x), p_0 = 1.
    Values can grow like exp(c sqrt(n)); the running pair is renormalized
    whenever it leaves [1e-150, 1e150] and the log scale accumulated.
    """
    if n < 0:
        raise InvalidParameterError("degree must be nonnegative")
    p_prev, p = 0.0, 1.0
    log_scale = 0.0
    for m in range(n):
        a_next = a[m]
        a_here = a[m - 1] if m >= 1 else 0.0
        p_prev, p = p, ((1.0 - b[m]) * p - a_here * p_prev) / a_next
        mag = max(abs(p), abs(p_prev))
        if mag > 1e150 or (0 < mag < 1e-150):
            p /= mag
            p_prev /= mag
            log_scale += np.log(mag)
    if p == 0.0:
        return float("-inf"), 1.0
    return float(np.log(abs(p)) + log_scale), float(np.sign(p))


@dataclass(frozen=True)
class RealLineReport:
    """Both sides of the circle-to-interval transfer at one even checkpoint."""

    m: int                    # even circle degree; the line degree is m // 2
    log_p_at_one: float       # log |p_{m/2}(1)| for the pushforward measure
    log_phi_at_one: float     # log |phi_m(1)| on the circle
    log_ratio: float
    ratio_ok: bool            # |log ratio| <= log 4
    circle_atom_log: float    # log of the circle-side atom entropy term (nan: no atom)
    line_atom_log: float      # same with p_{m/2}(1) in place of phi_m(1)


def real_line_map(schur, m: int, atom_log_weight: float | None = None) -> RealLineReport:
    """Compare p_{m/2}(1) with phi_m(1) and transfer the atom entropy term.

    ``schur`` holds the Schur parameters of the (symmetric) circle
    measure; ``atom_log_weight`` is log(w / normalization) of its atom at
    z = 1, if any.  The even-degree precondition is hard: the half-degree
    pairing only exists for even checkpoints.
    """
    if m % 2 != 0 or m <= 0:
        raise InvalidParameterError("checkpoint must be even and positive")
    g = as_schur(schur)
    if g.size < m:
        raise InvalidParameterError(f"need at least {m} parameters, got {g.size}")

    log_phi = leading_coefficient_log(g, m) + float(np.sum(np.log1p(g[:m])))
    a, b = jacobi_from_schur(g, m // 2)
    log_p, _ = orthonormal_value_at_one(a, b, m // 2)
    log_ratio = log_p - log_phi

    circle_atom = float("nan")
    line_atom = float("nan")
    if atom_log_weight is not None:
        # w |p(1)|^2 log|p(1)| in the log domain, both sides
        if log_phi > 0:
            circle_atom = atom_log_weight + 2.0 * log_phi + float(np.log(log_phi))
        if log_p > 0:
            line_atom = atom_log_weight + 2.0 * log_p + float(np.log(log_p))
    return RealLineReport(
        m=m,
        log_p_at_one=log_p,
        log_phi_at_one=log_phi,
        log_ratio=float(log_ratio),
        ratio_ok=bool(abs(log_ratio) <= np.log(4.0)),
        circle_atom_log=circle_atom,
        line_atom_log=line_atom,
    )
