"""Measures on the circle: Bernstein-Szego densities plus point masses.

A ``MeasureSpec`` is dm / |phi_d|^2 (the Bernstein-Szego density defined by
a finite Schur prefix of length d) together with a list of atoms and a
global normalization: dsigma = (density dm + sum w_i delta_{theta_i}) /
normalization.  The Bernstein-Szego part alone has total mass exactly 1,
so a probability measure keeps (1 + sum w_i) / normalization == 1.

The point-mass perturbation at z = 1 is handled by the Geronimus formula

    Phi_N(sigma) = Phi_N(mu) - [kappa Phi_N(mu)(1) / (1 + kappa K_{N-1}(1,1))]
                   * K_{N-1}(mu)(z, 1)

implemented through a ratio-normalized kernel accumulation that never
overflows regardless of how large Phi(1) becomes.

Quadrature is the periodic trapezoid rule (equispaced nodes, weight 1/M),
spectrally accurate here because every integrand in play extends
analytically to an annulus around the circle (the polynomials have all
zeros strictly inside the disk).  Every integral reports an error estimate
from comparing the full grid with its half grid.  Atoms are never smeared
onto the grid: their contributions use exact values at the atom.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np

from .errors import (
    IntegrationError,
    InvalidParameterError,
    OutOfRangeError,
    ResolutionError,
)
from .opuc import (
    CircleGrid,
    GridPolynomialPair,
    LogScalar,
    as_schur,
    cd_kernel_at_one,
    grid_for_degree,
    log_values_at_one,
    normalized_sweep,
)

__all__ = [
    "MeasureSpec",
    "QuadratureResult",
    "SzegoIntegralResult",
    "add_atom",
    "bernstein_szego",
    "density_on_grid",
    "extend_schur",
    "geronimus_perturbed_phi",
    "integrate",
    "kappa_choice",
    "lebesgue",
    "load_measure",
    "moments_from_measure",
    "save_measure",
    "schur_of_perturbed",
    "szego_integral",
]

MASS_TOL = 1e-9


@dataclass(frozen=True)
class MeasureSpec:
    """Bernstein-Szego density + atoms + global normalization."""

    schur_prefix: np.ndarray
    atoms: tuple = ()
    normalization: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "schur_prefix", as_schur(self.schur_prefix))
        atoms = tuple((float(t), float(w)) for t, w in self.atoms)
        object.__setattr__(self, "atoms", atoms)
        if any(w <= 0 for _, w in atoms):
            raise InvalidParameterError("atom masses must be positive")
        angles = [t for t, _ in atoms]
        if len(set(angles)) != len(angles):
            raise InvalidParameterError("atom angles must be distinct")
        if self.normalization <= 0:
            raise InvalidParameterError("normalization must be positive")
        total = (1.0 + sum(w for _, w in atoms)) / self.normalization
        if abs(total - 1.0) > MASS_TOL:
            raise InvalidParameterError(f"total mass {total} != 1")

    @property
    def degree(self) -> int:
        """Degree of the polynomial defining the a.c. density."""
        return int(self.schur_prefix.size)

    def atom_weights(self) -> np.ndarray:
        """Normalized atom masses w_i / normalization."""
        return np.array([w for _, w in self.atoms]) / self.normalization


class QuadratureResult(NamedTuple):
    value: float
    error_estimate: float
    converged: bool


class SzegoIntegralResult(NamedTuple):
    quadrature: float
    analytic: float
    error_estimate: float


def lebesgue() -> MeasureSpec:
    return MeasureSpec(np.zeros(1))


def bernstein_szego(schur) -> MeasureSpec:
    """Probability measure dm / |phi_d|^2 with d = len(schur).

    Its Schur parameters are exactly the given prefix followed by zeros;
    an all-zero prefix is the Lebesgue measure.
    """
    gammas = as_schur(schur)
    if gammas.size == 0:
        raise InvalidParameterError("schur prefix must be nonempty")
    return MeasureSpec(gammas)


def extend_schur(prefix, block) -> np.ndarray:
    """Concatenate a construction block onto a prefix.

    Block entries must lie in [0, 1/2): the halved profiles produced by
    the block generator always do.
    """
    p = as_schur(prefix)
    b = as_schur(block)
    if b.size and (np.min(b) < 0.0 or np.max(b) >= 0.5):
        raise InvalidParameterError("block entries must lie in [0, 1/2)")
    return np.concatenate([p, b])


def add_atom(measure: MeasureSpec, kappa: float) -> MeasureSpec:
    """Attach mass kappa at z = 1 and renormalize by (1 + kappa)."""
    if not kappa > 0:
        raise InvalidParameterError("kappa must be positive")
    if any(t == 0.0 for t, _ in measure.atoms):
        raise InvalidParameterError("measure already has an atom at theta = 0")
    return replace(
        measure,
        atoms=measure.atoms + ((0.0, float(kappa)),),
        normalization=measure.normalization * (1.0 + kappa),
    )


def kappa_choice(schur_mu1, n: int) -> LogScalar:
    """Atom mass kappa = 1 / K_{n-1}(1,1) for the degree-n perturbation.

    Returned with its log; the log channel is authoritative when the
    kernel is astronomically large.
    """
    if n < 1:
        raise OutOfRangeError("kappa_choice needs degree >= 1")
    kernel = cd_kernel_at_one(schur_mu1, n - 1)
    log_kappa = -kernel.log
    value = float(np.exp(log_kappa)) if log_kappa > -745.0 else 0.0
    return LogScalar(value, log_kappa)


def density_on_grid(measure: MeasureSpec, grid: CircleGrid):
    """A.c. density of the measure on the grid: (values, log values)."""
    d = measure.degree
    grid.check_degree(d)
    psi, _, log_one = normalized_sweep(measure.schur_prefix, d, grid)
    log_kappa_d = float(
        -0.5 * np.sum(np.log1p(-measure.schur_prefix**2))
    )
    mag = np.abs(psi)
    with np.errstate(divide="ignore"):
        log_density = (
            -np.log(measure.normalization)
            - 2.0 * (log_kappa_d + log_one + np.log(mag))
        )
    return np.exp(log_density), log_density


def integrate(measure: MeasureSpec, grid: CircleGrid, values, atom_values=()) -> QuadratureResult:
    """Integrate grid values (plus exact atom values) against the measure.

    ``values`` are the integrand on the grid nodes; ``atom_values`` its
    exact values at the atoms, in the order listed by the measure.  The
    error estimate compares the full grid with its half grid.
    """
    vals = np.asarray(values)
    if vals.shape != (grid.size,):
        raise InvalidParameterError("integrand shape does not match grid")
    if not np.all(np.isfinite(vals)):
        raise IntegrationError("non-finite integrand on grid")
    atom_vals = np.asarray(atom_values, dtype=np.float64)
    if atom_vals.size != len(measure.atoms):
        raise InvalidParameterError("need one integrand value per atom")
    if atom_vals.size and not np.all(np.isfinite(atom_vals)):
        raise IntegrationError("non-finite integrand at an atom")

    density, _ = density_on_grid(measure, grid)
    weighted = vals * density
    full = float(np.mean(weighted).real)
    half = float(np.mean(weighted[::2]).real)
    atom_part = float(np.dot(measure.atom_weights(), atom_vals)) if atom_vals.size else 0.0
    value = full + atom_part
    err = abs(full - half)
    return QuadratureResult(value, err, err <= 1e-6 * max(1.0, abs(value)))


def moments_from_measure(measure: MeasureSpec, count: int, grid: CircleGrid | None = None):
    """Trigonometric moments c_0..c_count, c_m = int conj(z)^m dsigma.

    Quadrature for the a.c. part (one FFT), exact sums for the atoms.
    Real output for symmetric measures.
    """
    if grid is None:
        grid = grid_for_degree(max(measure.degree, count))
    if count >= grid.size // 2:
        raise ResolutionError(f"grid of size {grid.size} cannot resolve {count} moments")
    density, _ = density_on_grid(measure, grid)
    spectrum = np.fft.fft(density) / grid.size
    moments = spectrum[: count + 1].astype(np.complex128)
    for theta, w in measure.atoms:
        moments += (w / measure.normalization) * np.exp(
            -1j * theta * np.arange(count + 1)
        )
    if np.max(np.abs(moments.imag)) < 1e-12:
        return moments.real.copy()
    return moments


def szego_integral(measure: MeasureSpec, grid: CircleGrid | None = None) -> SzegoIntegralResult:
    """The integral of log sigma' dm, with its closed-form companion.

    The analytic side is sum_k log(1 - gamma_k^2) - log(normalization);
    quadrature evaluates the log density directly (log-domain, so near
    zeros of the density are harmless).
    """
    if grid is None:
        grid = grid_for_degree(measure.degree)
    _, log_density = density_on_grid(measure, grid)
    if not np.all(np.isfinite(log_density)):
        raise IntegrationError("log density non-finite on grid")
    quad = float(np.mean(log_density))
    half = float(np.mean(log_density[::2]))
    analytic = float(
        np.sum(np.log1p(-measure.schur_prefix**2)) - np.log(measure.normalization)
    )
    return SzegoIntegralResult(quad, analytic, abs(quad - half))


def geronimus_perturbed_phi(schur_mu1, n: int, kappa: float, grid: CircleGrid) -> GridPolynomialPair:
    """Monic Phi_n of the measure mu + atom (mass kappa at z=1, renormalized).

    The Christoffel-Darboux kernel is accumulated in ratio form
    R_l(z) = K_l(z,1) / K_l(1,1), which is bounded on the grid, so the
    computation stays finite for any growth of phi(1); the output pair
    carries the exact log channel at z = 1.
    """
    if not kappa > 0:
        raise InvalidParameterError("kappa must be positive")
    if n < 1:
        raise OutOfRangeError("perturbed polynomial needs degree >= 1")
    gammas = as_schur(schur_mu1)
    if n > gammas.size:
        raise OutOfRangeError(f"degree {n} exceeds sequence length {gammas.size}")
    grid.check_degree(n)

    log_phi1, log_kap = log_values_at_one(gammas, n)
    z = grid.z
    psi = np.ones(grid.size, dtype=np.complex128)
    psi_star = np.ones(grid.size, dtype=np.complex128)
    ratio_kernel = np.ones(grid.size, dtype=np.complex128)  # R_0 = phi_0(z)phi_0(1)/K_0
    log_k11 = 0.0  # log K_0(1,1)
    for l in range(1, n):
        g = gammas[l - 1]
        zpsi = z * psi
        scale = 1.0 + g
        psi, psi_star = (zpsi + g * psi_star) / scale, (psi_star + g * zpsi) / scale
        log_phi_sq = 2.0 * (log_kap[l] + log_phi1[l])
        new_log_k11 = np.logaddexp(log_k11, log_phi_sq)
        w_new = np.exp(log_phi_sq - new_log_k11)  # |phi_l(1)|^2 / K_l(1,1)
        ratio_kernel = (1.0 - w_new) * ratio_kernel + w_new * psi
        log_k11 = new_log_k11
    # advance psi to degree n (kernel stops at n-1)
    if n >= 1:
        g = gammas[n - 1]
        zpsi = z * psi
        psi = (zpsi + g * psi_star) / (1.0 + g)

    log_kappa_k11 = float(np.log(kappa) + log_k11)
    # t = kappa K / (1 + kappa K), kept in log form until the last moment
    t = float(np.exp(log_kappa_k11 - np.logaddexp(0.0, log_kappa_k11)))
    log_one = float(log_phi1[n] - np.logaddexp(0.0, log_kappa_k11))

    scale_mag = float(np.exp(log_phi1[n])) if log_phi1[n] < 700.0 else float("inf")
    if np.isinf(scale_mag):
        raise IntegrationError(
            "Phi(1) exceeds double range on the linear channel; "
            "use log-domain consumers at this degree"
        )
    phi_vals = scale_mag * (psi - t * ratio_kernel)
    phi_star_vals = z**n * np.conj(phi_vals)
    return GridPolynomialPair(
        degree=n,
        phi=phi_vals,
        phi_star=phi_star_vals,
        value_at_one=float(np.exp(log_one)),
        log_value_at_one=log_one,
        grid=grid,
    )


def schur_of_perturbed(schur_mu1, kappa: float, count: int) -> np.ndarray:
    """Schur parameters gamma_0..gamma_{count-1} of mu + atom at z = 1.

    Scalar trace of the Geronimus formula at z = 0 and z = 1:
    gamma_n(sigma) = gamma_n(mu) - C_{n+1} K_n(mu)(0,1) with
    C_{n+1} = kappa Phi_{n+1}(mu)(1) / (1 + kappa K_n(mu)(1,1)).
    O(count) arithmetic, entirely in shifted/log form.  Parameters past
    the carrier length are handled (the atom perturbs the whole tail).
    """
    if not kappa > 0:
        raise InvalidParameterError("kappa must be positive")
    carrier = as_schur(schur_mu1)
    g = np.zeros(count)
    g[: min(count, carrier.size)] = carrier[:count]
    padded = np.concatenate([g, [0.0]])  # gamma_0..gamma_count of mu

    log_phi1, log_kap = log_values_at_one(padded, count + 1)
    log_phi_sq = 2.0 * (log_kap + log_phi1)  # log |phi_l(1)|^2, l = 0..count+1

    # log K_n(1,1), n = 0..count
    log_k11 = np.logaddexp.accumulate(log_phi_sq)[: count + 1]

    # K_n(0,1) = 1 + sum_{l=1..n} kappa_l gamma_{l-1} phi_l(1), shifted by m
    idx = np.arange(1, count + 1)
    term_logs = 2.0 * log_kap[idx] + log_phi1[idx]
    m = float(max(0.0, term_logs.max())) if idx.size else 0.0
    signed = padded[idx - 1] * np.exp(term_logs - m)
    k01_shifted = np.concatenate([[np.exp(-m)], np.exp(-m) + np.cumsum(signed)])

    log_c = (
        np.log(kappa)
        + log_phi1[1 : count + 1]
        - np.logaddexp(0.0, np.log(kappa) + log_k11[:count])
    )
    corrections = np.exp(log_c + m) * k01_shifted[:count]
    return padded[:count] - corrections


# ---------------------------------------------------------------------------
# Plain-text serialization
# ---------------------------------------------------------------------------

_FMT = "%.17g"


def save_measure(measure: MeasureSpec, path_or_buf):
    """Write the text form: normalization, schur line, one line per atom."""
    buf = io.StringIO()
    buf.write("normalization " + _FMT % measure.normalization + "\n")
    buf.write("schur " + " ".join(_FMT % g for g in measure.schur_prefix) + "\n")
    for theta, w in measure.atoms:
        buf.write("atom " + _FMT % theta + " " + _FMT % w + "\n")
    text = buf.getvalue()
    if hasattr(path_or_buf, "write"):
        path_or_buf.write(text)
    else:
        with open(path_or_buf, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def load_measure(path_or_buf) -> MeasureSpec:
    if hasattr(path_or_buf, "read"):
        text = path_or_buf.read()
    else:
        with open(path_or_buf, "r", encoding="utf-8") as fh:
            text = fh.read()
    norm = None
    schur = None
    atoms = []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        tag, *rest = line.split()
        if tag == "normalization":
            norm = float(rest[0])
        elif tag == "schur":
            schur = np.array([float(v) for v in rest])
        elif tag == "atom":
            atoms.append((float(rest[0]), float(rest[1])))
        else:
            raise InvalidParameterError(f"unknown measure line: {line!r}")
    if norm is None or schur is None:
        raise InvalidParameterError("measure file missing normalization or schur line")
    return MeasureSpec(schur, tuple(atoms), norm)
