"""
Power sums ↔ spectrum via Newton-Girard identities.
Conserved trace powers s_k = Σ p_l^k (k = 1..n) fix the Schmidt spectrum.
"""

import logging
from typing import List, Optional

import numpy as np
from scipy.cluster.hierarchy import fcluster, linkage

from ifelab.core.errors import InconsistencyError, InvalidInputError

logger = logging.getLogger(__name__)

SPECTRUM_TOLERANCE = 1e-8
NORMALIZATION_TOLERANCE = 1e-9
# single-linkage distances tried when grouping the scattered roots of a repeated eigenvalue
CLUSTER_DISTANCES = np.logspace(-12, -1, 12)


def spectrum_to_power_sums(p, n: Optional[int] = None) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    n = p.shape[0] if n is None else n
    return np.array([np.sum(p ** k) for k in range(1, n + 1)])


def elementary_from_power_sums(s) -> np.ndarray:
    """e_0..e_n from k·e_k = Σ_{i=1..k} (-1)^{i-1} e_{k-i} s_i"""
    s = np.asarray(s, dtype=float)
    n = s.shape[0]
    e = np.zeros(n + 1)
    e[0] = 1.0
    for k in range(1, n + 1):
        signs = (-1.0) ** np.arange(k)
        e[k] = np.dot(signs * e[k - 1::-1][:k], s[:k]) / k
    return e


def merge_root_clusters(roots: np.ndarray, distance: float) -> np.ndarray:
    """Replace every single-linkage cluster (complex distance ≤ distance) by its mean, keeping multiplicity"""
    if roots.shape[0] < 2:
        return roots.astype(np.complex128)
    points = np.column_stack([roots.real, roots.imag])
    labels = fcluster(linkage(points, method="single"), t=distance, criterion="distance")
    merged = roots.astype(np.complex128)
    for label in np.unique(labels):
        members = labels == label
        merged[members] = roots[members].mean()
    return merged


def power_sums_to_spectrum(s, tolerance: float = SPECTRUM_TOLERANCE) -> List[float]:
    """
    Recover {p_l} (sorted descending) from s_1..s_n.

    Roots of x^n - e_1 x^{n-1} + e_2 x^{n-2} - ... come from np.roots. A
    root of multiplicity m scatters into a ring of radius ~ε^{1/m}, while the
    ring's mean stays accurate, so root clusters are merged at increasing
    distances until the result is real and reproduces the power sums.

    Raises:
        InconsistencyError: s is not the power-sum vector of a spectrum in [0, 1].
    """
    s = np.asarray(s, dtype=float)
    if s.ndim != 1 or s.shape[0] == 0:
        raise InvalidInputError("power sums must be a non-empty 1-D list")
    if abs(s[0] - 1.0) > NORMALIZATION_TOLERANCE:
        raise InconsistencyError(f"s_1 must equal 1 (normalization), got {s[0]!r}")
    e = elementary_from_power_sums(s)
    coefficients = e * (-1.0) ** np.arange(e.shape[0])
    roots = np.roots(coefficients)

    p = None
    for distance in CLUSTER_DISTANCES:
        merged = merge_root_clusters(roots, distance)
        if np.max(np.abs(merged.imag), initial=0.0) > tolerance:
            continue
        mismatch = np.max(np.abs(spectrum_to_power_sums(merged.real, s.shape[0]) - s))
        if mismatch <= 10 * tolerance:
            p = merged.real
            logger.debug(f"[NEWTON] merged roots at distance {distance:.0e}, power-sum mismatch {mismatch:.2e}")
            break
    if p is None:
        raise InconsistencyError(
            f"power sums give complex roots (max |Im| = {np.max(np.abs(roots.imag)):.3e})"
        )
    if np.any(p < -tolerance) or np.any(p > 1.0 + tolerance):
        raise InconsistencyError(f"recovered spectrum {np.sort(p)[::-1].tolist()} leaves [0, 1]")
    return sorted(p.tolist(), reverse=True)
