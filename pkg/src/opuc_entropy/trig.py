"""Trigonometric polynomial approximation on the equispaced circle grid.

Targets here are smooth periodic functions (grid traces of
|Phi|^2 log|Phi|, which extend analytically to an annulus), so a plain
truncated Fourier series already converges geometrically; a raised-cosine
taper on the upper half of the retained band is applied when it beats
plain truncation.  The returned degree is the contract: evaluating the
polynomial on the originating grid stays within the requested sup error.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError, ResolutionError

__all__ = ["TrigPoly", "trig_approx"]


@dataclass(frozen=True)
class TrigPoly:
    """Fourier coefficients c_{-d}..c_d, conjugate-symmetric for real targets."""

    coeffs: np.ndarray  # length 2*degree + 1, index k -> c_{k-degree}
    degree: int

    def values_on_grid(self, size: int) -> np.ndarray:
        """Evaluate on the equispaced grid of the given size via FFT."""
        d = self.degree
        if size <= 2 * d:
            raise InvalidParameterError("grid too small for this degree")
        spectrum = np.zeros(size, dtype=np.complex128)
        spectrum[: d + 1] = self.coeffs[d:]
        if d:
            spectrum[-d:] = self.coeffs[:d]
        vals = np.fft.ifft(spectrum) * size
        return vals.real

    def sup_error(self, target: np.ndarray) -> float:
        return float(np.max(np.abs(self.values_on_grid(target.size) - target)))


def _band(spectrum, size, d, taper):
    keep = np.zeros(size, dtype=np.complex128)
    keep[: d + 1] = spectrum[: d + 1]
    if d:
        keep[-d:] = spectrum[-d:]
    if taper and d >= 2:
        k = np.arange(d + 1)
        ramp = np.ones(d + 1)
        lo = d // 2
        idx = k > lo
        ramp[idx] = 0.5 * (1.0 + np.cos(np.pi * (k[idx] - lo) / (d - lo)))
        keep[: d + 1] *= ramp
        keep[-d:] *= ramp[1:][::-1]
    return keep


def _coeffs_from_band(band, d):
    out = np.empty(2 * d + 1, dtype=np.complex128)
    out[d:] = band[: d + 1]
    if d:
        out[:d] = band[-d:]
    return out


def trig_approx(values, eps: float, max_degree: int | None = None) -> TrigPoly:
    """Smallest-degree trigonometric approximation within sup error eps.

    ``values`` is the target on an equispaced grid.  The search ramps the
    candidate degree geometrically, then bisects; at each degree both the
    plain truncation and the tapered one are tried and the better kept.
    Raises ResolutionError when even the full available band misses eps
    (callers refine the grid once and retry).
    """
    target = np.asarray(values, dtype=np.float64)
    if target.ndim != 1 or target.size < 4:
        raise InvalidParameterError("target must be a grid of at least 4 values")
    if not eps > 0:
        raise InvalidParameterError("eps must be positive")
    size = target.size
    if max_degree is None:
        max_degree = size // 2 - 1
    max_degree = min(max_degree, size // 2 - 1)
    spectrum = np.fft.fft(target) / size

    def error_at(d):
        best = None
        for taper in (False, True):
            band = _band(spectrum, size, d, taper)
            vals = (np.fft.ifft(band) * size).real
            err = float(np.max(np.abs(vals - target)))
            if best is None or err < best[0]:
                best = (err, taper)
        return best

    # geometric ramp to find a passing degree
    d = 0
    passing = None
    while d <= max_degree:
        err, taper = error_at(d)
        if err <= eps:
            passing = (d, taper)
            break
        d = 1 if d == 0 else min(2 * d, max_degree) if d != max_degree else max_degree + 1
    if passing is None:
        raise ResolutionError(
            f"no degree <= {max_degree} meets sup error {eps:g}; refine the grid"
        )

    lo, hi = (passing[0] // 2, passing[0]) if passing[0] else (0, 0)
    while lo < hi:
        mid = (lo + hi) // 2
        err, taper = error_at(mid)
        if err <= eps:
            hi = mid
            passing = (mid, taper)
        else:
            lo = mid + 1
    d, taper = passing
    band = _band(spectrum, size, d, taper)
    return TrigPoly(_coeffs_from_band(band, d), d)
