"""Entropy and gauge integrals of circle polynomials against a measure.

The central quantity is the monic entropy

    int |Phi_n|^2 log |Phi_n| dsigma,

split into its log+ / log- parts and into a.c. versus atom contributions.
The orthonormal variant rescales by the leading coefficient.  Atom terms
are evaluated symbolically from the exact log channel at the atom: when the
construction drives |Phi_n(1)| past exp(350) the linear fields stop being
representable and the report says so, while the log-domain fields remain
valid and are what downstream comparisons use.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .errors import InvalidParameterError, OutOfRangeError
from .measures import MeasureSpec, density_on_grid
from .opuc import (
    CircleGrid,
    as_schur,
    grid_for_degree,
    leading_coefficient_log,
    normalized_sweep,
)

__all__ = [
    "BUILTIN_GAUGES",
    "EntropyReport",
    "Gauge",
    "GaugeReport",
    "entropy_from_logs",
    "entropy_integral",
    "entropy_upper_bound",
    "gauge_integral",
    "log_minus_check",
    "validate_gauge",
]

ENTROPY_CSV_HEADER = "n,monic,entropy,entropy_plus,entropy_minus,ac,atom,quad_err"

_FMT = "%.17g"


@dataclass(frozen=True)
class EntropyReport:
    """One entropy integral, fully itemized.

    ``entropy == entropy_plus - entropy_minus`` and
    ``entropy == ac_contribution + atom_contribution`` hold by
    construction.  ``log_value_at_one`` is log of the polynomial value at
    z=1 (orthonormal-shifted when monic=False); ``atom_term_log`` is the
    log of |atom contribution| (nan when there is no atom term), usable
    even when ``representable`` is False and the linear fields are inf.
    """

    n: int
    monic: bool
    entropy: float
    entropy_plus: float
    entropy_minus: float
    ac_contribution: float
    atom_contribution: float
    quadrature_error: float
    log_value_at_one: float
    atom_term_log: float
    representable: bool

    def csv_row(self) -> str:
        vals = [
            str(self.n),
            "1" if self.monic else "0",
            _FMT % self.entropy,
            _FMT % self.entropy_plus,
            _FMT % self.entropy_minus,
            _FMT % self.ac_contribution,
            _FMT % self.atom_contribution,
            _FMT % self.quadrature_error,
        ]
        return ",".join(vals)


def _atom_log_magnitudes(schur, n: int, measure: MeasureSpec, log_one: float):
    """log |Phi_n| at each atom of the measure.

    The z=1 atom reads the exact log channel; other angles run a scalar
    recurrence (supported, but the constructions only ever use theta=0).
    """
    out = []
    gammas = as_schur(schur)
    for theta, _ in measure.atoms:
        if theta == 0.0:
            out.append(log_one)
            continue
        z = complex(np.cos(theta), np.sin(theta))
        psi = 1.0 + 0.0j
        psi_star = 1.0 + 0.0j
        for k in range(n):
            g = gammas[k]
            zpsi = z * psi
            psi, psi_star = (zpsi + g * psi_star) / (1 + g), (psi_star + g * zpsi) / (1 + g)
        out.append(float(np.log(abs(psi))) + log_one)
    return out


def entropy_from_logs(
    n: int,
    monic: bool,
    logmag,
    log_density,
    log_value_at_one: float,
    atom_terms=(),
) -> EntropyReport:
    """Assemble an entropy report from log-magnitude grids.

    ``logmag`` holds log|P| on the grid, ``log_density`` the log of the
    a.c. density; ``atom_terms`` is an iterable of
    (log normalized weight, log|P| at the atom) pairs.  The a.c. part is
    the periodic trapezoid value of |P|^2 log|P| * density; the atom part
    is exact in the log domain.  The quadrature error estimate compares
    the grid with its half grid.
    """
    logmag = np.asarray(logmag)
    logw = 2.0 * logmag + np.asarray(log_density)
    with np.errstate(over="ignore", invalid="ignore"):
        weight = np.exp(logw)
        plus_vals = weight * np.maximum(logmag, 0.0)
        minus_vals = weight * np.maximum(-logmag, 0.0)
    plus_vals = np.where(np.isfinite(plus_vals), plus_vals, 0.0)
    minus_vals = np.where(np.isfinite(minus_vals), minus_vals, 0.0)

    ac_plus = float(np.mean(plus_vals))
    ac_minus = float(np.mean(minus_vals))
    ac_err = abs(
        (ac_plus - ac_minus) - (float(np.mean(plus_vals[::2])) - float(np.mean(minus_vals[::2])))
    )

    atom_plus = 0.0
    atom_minus = 0.0
    atom_term_log = float("nan")
    representable = True
    for log_w, alm in atom_terms:
        term_logw = float(log_w) + 2.0 * alm  # log of w |P|^2 / norm
        if alm != 0.0:
            term_log = term_logw + float(np.log(abs(alm)))
            atom_term_log = (
                term_log
                if np.isnan(atom_term_log)
                else float(np.logaddexp(atom_term_log, term_log))
            )
        if term_logw > 700.0:
            representable = False
            if alm >= 0.0:
                atom_plus = float("inf")
            else:
                atom_minus = float("inf")
            continue
        term = float(np.exp(term_logw)) * alm
        if term >= 0.0:
            atom_plus += term
        else:
            atom_minus += -term

    entropy_plus = ac_plus + atom_plus
    entropy_minus = ac_minus + atom_minus
    return EntropyReport(
        n=n,
        monic=monic,
        entropy=entropy_plus - entropy_minus,
        entropy_plus=entropy_plus,
        entropy_minus=entropy_minus,
        ac_contribution=ac_plus - ac_minus,
        atom_contribution=atom_plus - atom_minus,
        quadrature_error=ac_err,
        log_value_at_one=log_value_at_one,
        atom_term_log=atom_term_log,
        representable=representable,
    )


def entropy_integral(
    measure: MeasureSpec,
    schur,
    n: int,
    monic: bool = True,
    grid: CircleGrid | None = None,
    oversample: int = 1,
) -> EntropyReport:
    """Entropy integral of Phi_n (or phi_n) against the measure."""
    gammas = as_schur(schur)
    if n > gammas.size:
        raise OutOfRangeError(f"degree {n} exceeds sequence length {gammas.size}")
    if grid is None:
        grid = grid_for_degree(max(n, measure.degree), oversample)
    psi, _, log_one = normalized_sweep(gammas, n, grid)
    _, log_density = density_on_grid(measure, grid)

    shift = 0.0 if monic else leading_coefficient_log(gammas, n)
    with np.errstate(divide="ignore"):
        logmag = np.log(np.abs(psi)) + log_one + shift

    atom_logmags = _atom_log_magnitudes(gammas, n, measure, log_one + shift)
    atom_terms = [
        (float(np.log(w_norm)), alm)
        for w_norm, alm in zip(measure.atom_weights(), atom_logmags)
    ]
    return entropy_from_logs(
        n=n,
        monic=monic,
        logmag=logmag,
        log_density=log_density,
        log_value_at_one=log_one + shift,
        atom_terms=atom_terms,
    )


def entropy_upper_bound(schur, n: int) -> float:
    """sum_{k<n} |gamma_k|: log|Phi_n| <= sum log(1+|gamma|) <= this.

    By Cauchy-Schwarz it is at most sqrt(n) times the l2 norm, which is
    where the square-root ceiling on entropy growth comes from.
    """
    gammas = as_schur(schur)
    if n > gammas.size:
        raise OutOfRangeError(f"degree {n} exceeds sequence length {gammas.size}")
    return float(np.sum(np.abs(gammas[:n])))


def log_minus_check(measure: MeasureSpec, schur, n: int, grid: CircleGrid | None = None):
    """Orthonormal log- mass and the flag entropy_minus < 1.

    Pointwise t^2 log-(t) <= 1/(2e), so the check passes for every
    probability measure; it is a guard against implementation errors, not
    a sharp bound.
    """
    report = entropy_integral(measure, schur, n, monic=False, grid=grid)
    return report.entropy_minus < 1.0, report.entropy_minus


# ---------------------------------------------------------------------------
# Gauge integrals
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Gauge:
    """Increasing superlinear test function F with an optional log form.

    ``log_fn(t)`` must equal log F(exp(t)) for t >= 1; builtins all ship
    one, which is how atom terms stay computable when |Phi(1)|^2
    overflows.  Tabulated gauges (log_fn=None) lose that ability and
    integrals against them get flagged unrepresentable instead.
    """

    name: str
    fn: Callable
    log_fn: Callable | None = None


BUILTIN_GAUGES = {
    "linear": Gauge("linear", lambda x: x, lambda t: t),
    "x_log_x": Gauge(
        "x_log_x",
        lambda x: np.where(x > 0, x * np.log(np.maximum(x, 1e-300)), 0.0),
        lambda t: t + np.log(t),
    ),
    "x_log2_x": Gauge(
        "x_log2_x",
        lambda x: np.where(x > 0, x * np.log(np.maximum(x, 1e-300)) ** 2, 0.0),
        lambda t: t + 2.0 * np.log(t),
    ),
    "x_pow_1_1": Gauge("x_pow_1_1", lambda x: x**1.1, lambda t: 1.1 * t),
}


def validate_gauge(gauge: Gauge, x_max: float = 1e6) -> bool:
    """Monotone on [1, x_max] and superlinear witness F(x)/x growing.

    The linear map fails the witness: it is the excluded edge case.
    """
    xs = np.geomspace(1.0, x_max, 200)
    fx = np.asarray(gauge.fn(xs), dtype=float)
    if np.any(np.diff(fx) < -1e-12):
        return False
    ratio = fx / xs
    return bool(ratio[-1] > 2.0 * max(ratio[0], 1e-9))


class GaugeReport(NamedTuple):
    value: float
    ac_contribution: float
    atom_contribution: float
    representable: bool


def gauge_integral(
    measure: MeasureSpec,
    schur,
    n: int,
    gauge: Gauge,
    monic: bool = True,
    grid: CircleGrid | None = None,
) -> GaugeReport:
    """int F(|P_n|^2) dsigma for a gauge F.

    The a.c. part needs linear values of |P|^2; the atom part uses the
    gauge's log form when present.  Overflow anywhere turns into
    representable=False rather than silent infinities.
    """
    if isinstance(gauge, str):
        try:
            gauge = BUILTIN_GAUGES[gauge]
        except KeyError:
            raise InvalidParameterError(f"unknown gauge {gauge!r}") from None
    gammas = as_schur(schur)
    if n > gammas.size:
        raise OutOfRangeError(f"degree {n} exceeds sequence length {gammas.size}")
    if grid is None:
        grid = grid_for_degree(max(n, measure.degree))
    psi, _, log_one = normalized_sweep(gammas, n, grid)
    _, log_density = density_on_grid(measure, grid)
    shift = 0.0 if monic else leading_coefficient_log(gammas, n)
    with np.errstate(divide="ignore"):
        logmag = np.log(np.abs(psi)) + log_one + shift

    representable = True
    two_logmag = 2.0 * logmag
    if np.max(two_logmag) > 700.0:
        representable = False
        ac = float("inf")
    else:
        x = np.exp(two_logmag)
        vals = np.asarray(gauge.fn(x), dtype=float) * np.exp(log_density)
        ac = float(np.mean(vals))

    atom = 0.0
    atom_logmags = _atom_log_magnitudes(gammas, n, measure, log_one + shift)
    for w_norm, alm in zip(measure.atom_weights(), atom_logmags):
        t = 2.0 * alm
        if t > 700.0 or (t >= 1.0 and gauge.log_fn is not None):
            if gauge.log_fn is None:
                representable = False
                atom = float("inf")
                continue
            term_log = float(np.log(w_norm)) + float(gauge.log_fn(t))
            if term_log > 700.0:
                representable = False
                atom = float("inf")
            else:
                atom += float(np.exp(term_log))
        else:
            atom += w_norm * float(np.asarray(gauge.fn(np.exp(t)), dtype=float))
    return GaugeReport(ac + atom, ac, atom, representable)
