"""Block-constant parameter profiles and their partial-sum functionals.

The generator produces breakpoints N_1 < N_2 < ... by the recursion

    N_{k+1} = N_k + floor( k^-2 * exp( L * sum_{j<=k} sqrt(N_j - N_{j-1}) / j^2 ) ),

seeded by N_1 = ceil(C / L^3), and the block-constant profile

    gh_t = L * beta_j / sqrt(N_j - N_{j-1})   for t in (N_{j-1}, N_j],

with beta_j = j^-2 except beta on the final block = 1.  The profile has
squared l2 norm exactly L^2 * sum beta_j^2 while its plain sum grows like
L sqrt(N_k); feeding the reversed profile into the ratio functionals below
yields values of order L^4 sqrt(N_k), which is the engine behind the
entropy growth construction.

Functionals, for a parameter tuple g_1..g_n with partial sums S_j:

    Gamma_n = S_n exp(S_n) / sum_j exp(S_j),        Psi_n = Gamma_n / S_n.

Both are computed in shifted form (every exponential is exp(S_j - S_n),
at most 1 for nonnegative tuples) and, independently, through the
reversed-index identity used in proofs; the two agree to rounding.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import ceil
from typing import NamedTuple

import numpy as np

from .errors import CTooSmallError, InvalidParameterError, KMaxTooLargeError

__all__ = [
    "BlockSpec",
    "GammaPsi",
    "SearchResult",
    "block_breakpoints",
    "block_gammas",
    "denominator_value",
    "extremal_search",
    "gamma_psi",
    "gamma_upper_bound",
    "profile_for_length",
]

DESK_CAP = 10**7


@dataclass(frozen=True)
class BlockSpec:
    """Breakpoints plus block weights for one profile."""

    scale: float          # the L parameter
    growth_factor: float  # the C parameter
    k_max: int
    breakpoints: tuple    # N_0 = 0, N_1, ..., N_{k_max}
    gap_ratios: tuple     # (N_{j+1} - N_j) / N_{j+1}, j = 1..k_max-1

    @property
    def betas(self) -> np.ndarray:
        b = np.array([1.0 / j**2 for j in range(1, self.k_max + 1)])
        b[-1] = 1.0
        return b

    @property
    def beta_square_sum(self) -> float:
        """sum beta_j^2: the recorded constant c2 in sum gh^2 = c2 L^2."""
        return float(np.sum(self.betas**2))


def block_breakpoints(
    scale: float,
    growth_factor: float = 10.0,
    k_max: int = 4,
    cap: int = DESK_CAP,
    min_gap_ratio: float | None = None,
    on_cap: str = "raise",
) -> BlockSpec:
    """Generate breakpoints for the given scale and growth factor.

    ``min_gap_ratio``, when set, enforces (N_{k+1}-N_k)/N_{k+1} >= ratio
    and raises CTooSmallError otherwise (the asymptotic regime needs the
    gaps to be a definite fraction of the breakpoints; small growth
    factors stall).  By default the ratios are recorded on the returned block spec
    but not enforced: the canonical desk-scale configuration C=10, L=1/4 has
    ratios below 1/2 and is still perfectly usable.

    ``on_cap`` is "raise" (KMaxTooLargeError naming the largest feasible
    k) or "truncate" (return the block spec for the largest feasible k).
    """
    if not 0.0 < scale <= 0.25:
        raise InvalidParameterError("scale must lie in (0, 1/4]")
    if growth_factor < 1.0:
        raise InvalidParameterError("growth factor must be >= 1")
    if k_max < 1:
        raise InvalidParameterError("k_max must be >= 1")
    if on_cap not in ("raise", "truncate"):
        raise InvalidParameterError("on_cap must be 'raise' or 'truncate'")

    L = np.longdouble(scale)
    n1 = ceil(growth_factor / scale**3)
    if n1 > cap:
        raise KMaxTooLargeError(
            f"N_1 = {n1} already exceeds cap {cap}", largest_feasible_k=0
        )
    points = [0, n1]
    exponent_sum = np.longdouble(0)
    for k in range(1, k_max):
        exponent_sum += np.sqrt(np.longdouble(points[k] - points[k - 1])) / np.longdouble(k * k)
        arg = L * exponent_sum
        if arg > 700:
            if on_cap == "truncate":
                break
            raise KMaxTooLargeError(
                f"exponent overflow at k={k + 1}; largest feasible k is {k}",
                largest_feasible_k=k,
            )
        inc = int(np.floor(np.exp(arg) / np.longdouble(k * k)))
        if inc < 1:
            raise CTooSmallError(
                f"breakpoint recursion stalled at k={k + 1}; increase the growth factor"
            )
        nxt = points[k] + inc
        if nxt > cap:
            if on_cap == "truncate":
                break
            raise KMaxTooLargeError(
                f"N_{k + 1} = {nxt} exceeds cap {cap}; largest feasible k is {k}",
                largest_feasible_k=k,
            )
        points.append(nxt)

    k_eff = len(points) - 1
    ratios = tuple(
        (points[j + 1] - points[j]) / points[j + 1] for j in range(1, k_eff)
    )
    if min_gap_ratio is not None and any(r < min_gap_ratio for r in ratios):
        worst = min(ratios)
        raise CTooSmallError(
            f"gap ratio {worst:.3f} below required {min_gap_ratio}; "
            "increase the growth factor"
        )
    return BlockSpec(scale, float(growth_factor), k_eff, tuple(points), ratios)


def block_gammas(spec: BlockSpec, k: int | None = None) -> np.ndarray:
    """The block-constant profile gh_1..gh_{N_k} over the first k blocks.

    The beta weights depend on which block is final (it gets weight 1),
    so the profile for k blocks is not a prefix of the one for k+1.
    """
    if k is None:
        k = spec.k_max
    if not 1 <= k <= spec.k_max:
        raise InvalidParameterError(f"k must be in 1..{spec.k_max}")
    pts = spec.breakpoints
    out = np.empty(pts[k])
    for j in range(1, k + 1):
        beta = 1.0 if j == k else 1.0 / j**2
        width = pts[j] - pts[j - 1]
        out[pts[j - 1] : pts[j]] = spec.scale * beta / np.sqrt(width)
    if np.max(out) >= 0.5:
        raise CTooSmallError(
            "profile value reached 1/2; increase the growth factor"
        )
    return out


class GammaPsi(NamedTuple):
    gamma: float
    psi: float
    gamma_reversed_form: float


def gamma_psi(gammas) -> GammaPsi:
    """Gamma and Psi of a nonnegative tuple, by two independent routes.

    The direct form shifts all exponentials by the total sum; the
    reversed form flips the tuple and expands the denominator as
    1 + sum exp(-partial sums).  They are algebraically identical and
    must agree to rounding; both are returned so callers can assert it.
    """
    g = np.asarray(gammas, dtype=np.float64)
    if g.ndim != 1 or g.size < 1:
        raise InvalidParameterError("need a nonempty one-dimensional tuple")
    if np.min(g) < 0:
        raise InvalidParameterError("functionals are defined for nonnegative tuples")
    s = np.cumsum(g)
    total = s[-1]
    direct_denom = float(np.sum(np.exp(s - total)))
    gamma_direct = total / direct_denom

    rev = g[::-1]
    s_rev = np.cumsum(rev)[:-1]
    rev_denom = 1.0 + float(np.sum(np.exp(-s_rev)))
    gamma_rev = total / rev_denom
    return GammaPsi(float(gamma_direct), float(1.0 / direct_denom), float(gamma_rev))


def gamma_upper_bound(gammas) -> float:
    """Cauchy-Schwarz ceiling: Gamma_n <= sqrt(n) * l2 norm."""
    g = np.asarray(gammas, dtype=np.float64)
    return float(np.sqrt(g.size) * np.linalg.norm(g))


def denominator_value(gammas_hat) -> float:
    """1 + sum_{m=1}^{n-1} exp(-sum_{t<=m} gh_t) for a profile in block order.

    Bounded by a constant multiple of L^-3 for healthy profiles; recorded
    as a diagnostic alongside the functionals.
    """
    gh = np.asarray(gammas_hat, dtype=np.float64)
    s = np.cumsum(gh)[:-1]
    return 1.0 + float(np.sum(np.exp(-s)))


def profile_for_length(n: int, scale: float, growth_factor: float = 10.0) -> np.ndarray:
    """A profile of exact length n with squared l2 norm exactly scale^2.

    Takes the largest spec fitting inside n, extends the final block to
    fill, and rescales onto the sphere.  Used as a strong deterministic
    start for the extremal search and as the comparison profile in tests.
    """
    if n < 1:
        raise InvalidParameterError("length must be >= 1")
    spec = None
    try:
        spec = block_breakpoints(scale, growth_factor, k_max=64, cap=n, on_cap="truncate")
    except KMaxTooLargeError:
        spec = None
    if spec is None or spec.breakpoints[1] > n:
        gh = np.full(n, scale / np.sqrt(n))
    else:
        gh = block_gammas(spec)
        if gh.size < n:
            gh = np.concatenate([gh, np.full(n - gh.size, gh[-1])])
    gh = gh * (scale / np.linalg.norm(gh))
    return gh


class SearchResult(NamedTuple):
    gammas: np.ndarray
    gamma_value: float
    iterations: int
    stagnated: bool


def _gamma_and_grad(g):
    s = np.cumsum(g)
    total = s[-1]
    u = np.exp(s - total)
    denom = float(np.sum(u))
    prefix = np.concatenate([[0.0], np.cumsum(u)[:-1]])
    grad = (denom + total * prefix) / denom**2
    return total / denom, grad


def _project(g, radius):
    clipped = np.maximum(g, 0.0)
    norm = np.linalg.norm(clipped)
    if norm == 0.0:
        clipped = np.full_like(g, 1.0)
        norm = np.linalg.norm(clipped)
    return clipped * (radius / norm)


def extremal_search(
    scale: float,
    n: int,
    iterations: int = 800,
    step_schedule=None,
    patience: int = 80,
) -> SearchResult:
    """Maximize Gamma_n over the sphere sum g^2 = scale^2, g >= 0.

    Projected gradient ascent with a halving step on non-improvement,
    started from both the uniform point and the reversed block profile
    (so the result can never fall below either).  Deterministic.
    Gradient is O(n) per step via prefix sums.
    """
    if n < 1 or n > 10**4:
        raise InvalidParameterError("search supports 1 <= n <= 10^4")
    if not 0.0 < scale < 1.0:
        raise InvalidParameterError("scale must lie in (0, 1)")
    if n == 1:
        return SearchResult(np.array([scale]), scale, 0, False)

    step0 = float(step_schedule[0]) if step_schedule else 0.5
    starts = [
        np.full(n, scale / np.sqrt(n)),
        _project(profile_for_length(n, scale)[::-1].copy(), scale),
    ]
    best = None
    total_iters = 0
    stagnated = False
    for g in starts:
        g = _project(g, scale)
        value, grad = _gamma_and_grad(g)
        step = step0
        flat = 0
        for _ in range(iterations):
            total_iters += 1
            direction = grad / max(np.linalg.norm(grad), 1e-300)
            cand = _project(g + step * scale * direction, scale)
            cand_value, cand_grad = _gamma_and_grad(cand)
            if cand_value > value:
                improvement = cand_value - value
                g, value, grad = cand, cand_value, cand_grad
                step = min(step * 1.2, 2.0)
                flat = flat + 1 if improvement < 1e-13 * max(1.0, value) else 0
            else:
                step *= 0.5
                flat += 1
                if step < 1e-14:
                    break
            if flat >= patience:
                stagnated = True
                break
        if best is None or value > best[1]:
            best = (g, value)
    return SearchResult(best[0], float(best[1]), total_iters, stagnated)
