"""Core machinery for orthogonal polynomials on the unit circle.

Polynomials are driven entirely by their Schur (Verblunsky) parameters
``gamma_0, gamma_1, ...`` through the Szego recurrence

    Phi_{n+1}(z) = z Phi_n(z) + gamma_n Phi_n*(z),      Phi_0 = 1,
    Phi*_{n+1}(z) = Phi_n*(z) + gamma_n z Phi_n(z),     Phi*_0 = 1,

restricted to real parameters with |gamma| < 1.  On the unit circle
|Phi_n| = |Phi_n*|, and at z = 1 the recurrence telescopes to the exact
product Phi_n(1) = prod_{k<n} (1 + gamma_k), which every routine tracks in
the log domain alongside the grid values: the constructions this package
exists for push Phi_n(1) to exp(c sqrt(n)) and beyond.

Moment convention: c_m = integral of conj(z)^m dsigma, so the Gram matrix
of the monomials is Toeplitz with <z^j, z^k> = c_{k-j}.  For real Schur
parameters all moments are real and c_{-m} = c_m.

Polynomials are stored as values on an equispaced circle grid, never as
coefficient vectors; coefficients are recovered by inverse FFT only in
tests at small degree.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import NamedTuple

import numpy as np

from .errors import (
    DegenerateMeasureError,
    InvalidParameterError,
    OutOfRangeError,
)

__all__ = [
    "CircleGrid",
    "GridPolynomialPair",
    "LogScalar",
    "as_schur",
    "cd_kernel_at_one",
    "coefficients_from_grid",
    "evaluate",
    "exact_moments_from_schur",
    "grid_for_degree",
    "gram_schmidt_oracle",
    "initial_pair",
    "leading_coefficient_log",
    "log_values_at_one",
    "normalized_sweep",
    "schur_from_moments",
    "szego_step",
]

ORACLE_MAX_DEGREE = 15


class LogScalar(NamedTuple):
    """A positive scalar carried in both linear and log form.

    ``value`` is ``math.inf`` (or 0.0) when the linear form is not
    representable; ``log`` is always finite and authoritative.
    """

    value: float
    log: float


def as_schur(gammas) -> np.ndarray:
    """Validate and coerce a sequence of Schur parameters.

    Parameters must be real with every |gamma_k| < 1.  Complex input is
    rejected: the whole package works with symmetric measures, whose
    Schur parameters are real.
    """
    arr = np.asarray(gammas)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1:
        raise InvalidParameterError("schur sequence must be one-dimensional")
    if np.iscomplexobj(arr):
        raise InvalidParameterError("complex Schur parameters are not supported")
    arr = arr.astype(np.float64, copy=False)
    if arr.size and not np.all(np.isfinite(arr)):
        raise InvalidParameterError("schur parameters must be finite")
    if arr.size and np.max(np.abs(arr)) >= 1.0:
        bad = float(arr[np.argmax(np.abs(arr))])
        raise InvalidParameterError(f"|gamma| must be < 1, got {bad!r}")
    return arr


@dataclass(frozen=True)
class CircleGrid:
    """Equispaced grid theta_j = 2 pi j / size on the circle.

    Each node carries weight 1/size (normalized Lebesgue measure).  The
    size must be even so that the half grid (every other node) is again an
    equispaced grid, which is how nested quadrature error estimates are
    formed.
    """

    size: int

    def __post_init__(self):
        if self.size < 16 or self.size % 2 != 0:
            raise InvalidParameterError(f"grid size must be even and >= 16, got {self.size}")

    @cached_property
    def nodes(self) -> np.ndarray:
        return 2.0 * np.pi * np.arange(self.size) / self.size

    @cached_property
    def z(self) -> np.ndarray:
        return np.exp(1j * self.nodes)

    def check_degree(self, n: int):
        if self.size < 16 * n + 512:
            raise InvalidParameterError(
                f"grid of size {self.size} too coarse for degree {n} "
                f"(need >= {16 * n + 512})"
            )

    def half(self) -> "CircleGrid":
        if self.size % 4 != 0:
            raise InvalidParameterError("half grid requires size divisible by 4")
        return CircleGrid(self.size // 2)


def grid_for_degree(n: int, oversample: int = 1) -> CircleGrid:
    """Grid sized by the rule M = max(4096, 16 n + 512), times ``oversample``."""
    if n < 0:
        raise OutOfRangeError("degree must be nonnegative")
    if oversample < 1:
        raise InvalidParameterError("oversample must be >= 1")
    return CircleGrid(max(4096, 16 * n + 512) * oversample)


@dataclass(frozen=True)
class GridPolynomialPair:
    """Values of (Phi_n, Phi_n*) on a circle grid plus exact channels at z=1.

    ``value_at_one`` is the exact running product prod (1 + gamma_k);
    ``log_value_at_one`` is its log accumulated independently via log1p, so
    it stays finite when the product overflows.
    """

    degree: int
    phi: np.ndarray
    phi_star: np.ndarray
    value_at_one: float
    log_value_at_one: float
    grid: CircleGrid

    def modulus_gap(self) -> float:
        """Max relative gap between |Phi_n| and |Phi_n*| over the grid."""
        a = np.abs(self.phi)
        b = np.abs(self.phi_star)
        scale = np.maximum(a, 1e-300)
        return float(np.max(np.abs(a - b) / scale))


def initial_pair(grid: CircleGrid) -> GridPolynomialPair:
    ones = np.ones(grid.size, dtype=np.complex128)
    return GridPolynomialPair(0, ones, ones.copy(), 1.0, 0.0, grid)


def szego_step(pair: GridPolynomialPair, gamma: float) -> GridPolynomialPair:
    """One Szego recurrence step: degree n -> n + 1.

    The z=1 channel is updated by the exact factor (1 + gamma); the log
    channel by log1p(gamma).
    """
    g = float(gamma)
    if not np.isfinite(g) or abs(g) >= 1.0:
        raise InvalidParameterError(f"|gamma| must be < 1, got {gamma!r}")
    zphi = pair.grid.z * pair.phi
    phi_new = zphi + g * pair.phi_star
    star_new = pair.phi_star + g * zphi
    return GridPolynomialPair(
        degree=pair.degree + 1,
        phi=phi_new,
        phi_star=star_new,
        value_at_one=pair.value_at_one * (1.0 + g),
        log_value_at_one=pair.log_value_at_one + np.log1p(g),
        grid=pair.grid,
    )


def evaluate(schur, n: int, grid: CircleGrid) -> GridPolynomialPair:
    """Iterate the recurrence to degree n on the given grid.  Cost O(n M)."""
    gammas = as_schur(schur)
    if n > gammas.size:
        raise OutOfRangeError(f"degree {n} exceeds sequence length {gammas.size}")
    grid.check_degree(n)
    pair = initial_pair(grid)
    for k in range(n):
        pair = szego_step(pair, gammas[k])
    return pair


def normalized_sweep(schur, n: int, grid: CircleGrid):
    """Recurrence in the scale-free variables psi = Phi / Phi(1).

    Returns (psi_n, psi_star_n, log_value_at_one).  For nonnegative
    parameters |psi| <= 1 everywhere, so arbitrarily large degrees never
    overflow; the true polynomial is psi * exp(log_value_at_one).
    """
    gammas = as_schur(schur)
    if n > gammas.size:
        raise OutOfRangeError(f"degree {n} exceeds sequence length {gammas.size}")
    psi = np.ones(grid.size, dtype=np.complex128)
    psi_star = np.ones(grid.size, dtype=np.complex128)
    log_one = 0.0
    z = grid.z
    for k in range(n):
        g = gammas[k]
        scale = 1.0 + g
        zpsi = z * psi
        psi, psi_star = (zpsi + g * psi_star) / scale, (psi_star + g * zpsi) / scale
        log_one += np.log1p(g)
    return psi, psi_star, log_one


def leading_coefficient_log(schur, n: int) -> float:
    """log kappa_n = -(1/2) sum_{k<n} log(1 - gamma_k^2).

    kappa_n is the leading coefficient of the orthonormal polynomial
    phi_n = kappa_n Phi_n; it stays bounded exactly when the parameters
    are square summable.
    """
    gammas = as_schur(schur)
    if n > gammas.size:
        raise OutOfRangeError(f"degree {n} exceeds sequence length {gammas.size}")
    return float(-0.5 * np.sum(np.log1p(-gammas[:n] ** 2)))


def log_values_at_one(schur, n: int):
    """Per-degree logs at z = 1 for degrees 0..n.

    Returns (log_phi_monic, log_kappa): arrays of length n+1 with
    log Phi_l(1) = sum_{k<l} log(1+gamma_k) and log kappa_l.  Both are
    exact log-domain accumulations, the building blocks of every kernel
    and atom-weight computation.
    """
    gammas = as_schur(schur)
    if n > gammas.size:
        raise OutOfRangeError(f"degree {n} exceeds sequence length {gammas.size}")
    g = gammas[:n]
    log_phi = np.concatenate([[0.0], np.cumsum(np.log1p(g))])
    log_kappa = np.concatenate([[0.0], -0.5 * np.cumsum(np.log1p(-g * g))])
    return log_phi, log_kappa


def cd_kernel_at_one(schur, n: int) -> LogScalar:
    """Christoffel-Darboux kernel K_n(1,1) = sum_{k<=n} |phi_k(1)|^2.

    Accumulated log-sum-exp style so the log channel survives arbitrary
    growth; the linear value is inf past overflow.
    """
    if n < 0:
        raise OutOfRangeError("kernel degree must be nonnegative")
    log_phi, log_kappa = log_values_at_one(schur, n)
    terms = 2.0 * (log_phi + log_kappa)
    m = float(np.max(terms))
    log_k = m + float(np.log(np.sum(np.exp(terms - m))))
    value = float(np.exp(log_k)) if log_k < 700.0 else float("inf")
    return LogScalar(value, log_k)


def coefficients_from_grid(pair: GridPolynomialPair) -> np.ndarray:
    """Monomial coefficients a_0..a_n of Phi_n recovered by inverse FFT.

    Exact (to rounding) because Phi_n is a polynomial of degree
    n < grid.size / 2.  Test-scale helper: degrees <= 64.
    """
    n = pair.degree
    if n >= pair.grid.size // 2:
        raise OutOfRangeError("grid too small to resolve coefficients")
    coeffs = np.fft.fft(pair.phi) / pair.grid.size
    return coeffs[: n + 1]


# ---------------------------------------------------------------------------
# Independent oracles (exact rational arithmetic; test-scale only)
# ---------------------------------------------------------------------------


def _monic_update(coeffs, gamma):
    # coeffs of Phi_{n+1} = z Phi_n + gamma * Phi_n^*; exact Fractions,
    # real case: Phi_n^* has the reversed coefficients of Phi_n
    n = len(coeffs) - 1
    rev = coeffs[::-1]
    out = []
    for j in range(n + 2):
        val = coeffs[j - 1] if j >= 1 else Fraction(0)
        if j <= n:
            val += gamma * rev[j]
        out.append(val)
    return out


def exact_moments_from_schur(schur, count: int):
    """Moments c_0..c_count of the measure with the given real parameters.

    Forward Levinson recursion in exact Fraction arithmetic:
    orthogonality <Phi_{n+1}, 1> = 0 determines c_{n+1} from earlier
    moments.  Parameters beyond the given prefix are zero (the
    Bernstein-Szego convention).  Returns a list of Fractions, c_0 = 1.
    """
    gammas = as_schur(schur)
    if count > gammas.size:
        gammas = np.concatenate([gammas, np.zeros(count - gammas.size)])
    c = [Fraction(1)]
    coeffs = [Fraction(1)]  # Phi_0
    for n in range(count):
        g = Fraction(float(gammas[n]))
        coeffs = _monic_update(coeffs, g)
        # sum_j a_j c_j + c_{n+1} = 0 with a_{n+1} = 1
        c.append(-sum(a * cj for a, cj in zip(coeffs[:-1], c)))
    return c


def gram_schmidt_oracle(moments, n: int):
    """Monic coefficients of Phi_n by solving the Toeplitz moment system.

    Gram-Schmidt of 1, z, ..., z^n against the moment matrix, done in
    exact Fraction arithmetic so conditioning cannot contaminate the
    answer.  Intended as a test oracle only; degree capped at 15.

    Raises DegenerateMeasureError when the moment matrix is singular
    (measure supported on fewer than n+1 points).
    """
    if n > ORACLE_MAX_DEGREE:
        raise OutOfRangeError(f"oracle degree capped at {ORACLE_MAX_DEGREE}")
    moms = list(moments)
    if len(moms) < n + 1:
        raise OutOfRangeError("need moments c_0..c_n")
    c = []
    for m in moms:
        if isinstance(m, Fraction):
            c.append(m)
        else:
            m = complex(m)
            if m.imag != 0.0:
                raise InvalidParameterError("oracle supports real moments only")
            c.append(Fraction(m.real))
    if n == 0:
        return np.array([1.0])
    # rows k = 0..n-1: sum_{j<n} a_j c_{k-j} = -c_{k-n}, with c_{-m} = c_m
    A = [[c[abs(k - j)] for j in range(n)] for k in range(n)]
    b = [-c[n - k] for k in range(n)]
    x = _solve_exact(A, b)
    return np.array([float(v) for v in x] + [1.0])


def _solve_exact(A, b):
    """Gaussian elimination with partial pivoting over Fractions."""
    n = len(b)
    M = [row[:] + [b[i]] for i, row in enumerate(A)]
    for col in range(n):
        pivot = max(range(col, n), key=lambda r: abs(M[r][col]))
        if M[pivot][col] == 0:
            raise DegenerateMeasureError("singular moment matrix")
        M[col], M[pivot] = M[pivot], M[col]
        inv = Fraction(1) / M[col][col]
        for r in range(n):
            if r != col and M[r][col] != 0:
                f = M[r][col] * inv
                M[r] = [a - f * p for a, p in zip(M[r], M[col])]
    return [M[i][n] / M[i][i] for i in range(n)]


def schur_from_moments(moments, n: int) -> np.ndarray:
    """Recover gamma_0..gamma_{n-1} from real moments by the Levinson recursion.

    Each step determines gamma_n from the orthogonality of Phi_{n+1}:
    gamma_n = -<z Phi_n, 1> / <Phi_n*, 1>.  Float arithmetic; round-trip
    oracle for moderate degrees.
    """
    c = np.asarray(moments, dtype=np.float64)
    if c.size < n + 1:
        raise OutOfRangeError("need moments c_0..c_n")
    coeffs = np.array([1.0])
    gammas = np.empty(n)
    for m in range(n):
        num = float(np.dot(coeffs, c[1 : m + 2]))
        den = float(np.dot(coeffs[::-1], c[: m + 1]))
        if den == 0.0:
            raise DegenerateMeasureError("Levinson recursion broke down")
        g = -num / den
        gammas[m] = g
        coeffs = np.concatenate([[0.0], coeffs]) + g * np.concatenate([coeffs[::-1], [0.0]])
    return gammas
