"""Exact discrete medians and local oscillations.

For a cube Q with m cells and sorted cell values v_1 <= ... <= v_m:

* maximal median at parameter t in (0,1):
      m_f(t,Q) = sup{ M : |{y in Q : f(y) < M}| <= t|Q| } = v_{floor(t*m)+1}.
  This is exact for piecewise-constant f, ties included, and is the single
  tie-breaking rule used everywhere in the package.

* local oscillation at parameter s in (0, 1/2]:
      osc(f,s,Q) = inf_c inf{ a >= 0 : |{y in Q : |f(y)-c| > a}| < s|Q| }.
  Discretely the strict "< s|Q|" lets us drop at most b values, with b the
  largest integer strictly below s*m; the answer is the smallest half-width
  of a window of w = m - b consecutive sorted values.

* sharp median: m#_f(1-s,Q) = inf_c m_{|f-c|}(1-s,Q), computed by the same
  window sweep with w' = floor((1-s)*m) + 1, validated against a brute-force
  inf over pair midpoints (v_i+v_j)/2.
"""

from __future__ import annotations

import math

import numpy as np

from .grid import DyadicCube, GridFunction, GridError, average, cube_values

__all__ = [
    "maximal_median",
    "median_of_values",
    "local_oscillation",
    "median_sharp",
    "median_sharp_bruteforce",
    "median_mean_gap",
    "parent_median_bound",
]

# Snap tolerance for t*m etc.: parameters are dyadic rationals in practice, so
# products are exact; the snap only guards against representation noise.
_SNAP = 1e-9


def _snapped(x: float) -> float:
    r = round(x)
    if abs(x - r) < _SNAP:
        return float(r)
    return x


def median_index(t: float, m: int) -> int:
    """0-based sorted index of the maximal median: floor(t*m)."""
    if not 0.0 < t < 1.0:
        raise ValueError(f"median parameter t must be in (0,1), got {t}")
    k = int(math.floor(_snapped(t * m)))
    return min(k, m - 1)


def median_of_values(vals: np.ndarray, t: float) -> float:
    vals = np.asarray(vals, dtype=float)
    k = median_index(t, vals.size)
    return float(np.partition(vals, k)[k])


def maximal_median(f: GridFunction, t: float, q) -> float:
    """m_f(t,Q): the largest M with |{f < M}| <= t|Q| on the cube."""
    return median_of_values(cube_values(f, q), t)


def strict_below(x: float) -> int:
    """Largest integer strictly below x (x > 0)."""
    x = _snapped(x)
    if x == int(x):
        return int(x) - 1
    return int(math.floor(x))


def min_window_halfwidth(sorted_vals: np.ndarray, w: int) -> float:
    """min_i (v[i+w-1] - v[i]) / 2 over a sorted array."""
    m = sorted_vals.size
    if w <= 1:
        return 0.0
    if w > m:
        raise ValueError(f"window {w} exceeds {m} values")
    return float(np.min(sorted_vals[w - 1:] - sorted_vals[:m - w + 1]) / 2.0)


def oscillation_window(s: float, m: int) -> int:
    """Number of values a band must retain for the local oscillation."""
    if not 0.0 < s <= 0.5:
        raise ValueError(f"oscillation parameter s must be in (0, 1/2], got {s}")
    b = max(strict_below(s * m), 0)
    return m - b


def local_oscillation(f: GridFunction, s: float, q) -> float:
    """Smallest half-width of a band catching all but an s-fraction of f on Q."""
    vals = np.sort(cube_values(f, q))
    w = oscillation_window(s, vals.size)
    return min_window_halfwidth(vals, w)


def sharp_window(s: float, m: int) -> int:
    """Window length for m#_f(1-s,Q): floor((1-s)*m) + 1."""
    if not 0.0 < s < 0.5:
        raise ValueError(f"sharp-median parameter s must be in (0, 1/2), got {s}")
    k = int(math.floor(_snapped((1.0 - s) * m)))
    return min(k, m - 1) + 1


def median_sharp(f: GridFunction, s: float, q) -> float:
    """m#_f(1-s,Q) = inf_c m_{|f-c|}(1-s,Q), by the sorted-window sweep."""
    vals = np.sort(cube_values(f, q))
    return min_window_halfwidth(vals, sharp_window(s, vals.size))


def median_sharp_bruteforce(f: GridFunction, s: float, q) -> float:
    """Oracle for median_sharp: inf over pair midpoints c = (v_i+v_j)/2."""
    vals = np.sort(cube_values(f, q))
    t = 1.0 - s
    best = math.inf
    for i in range(vals.size):
        for j in range(i, vals.size):
            c = (vals[i] + vals[j]) / 2.0
            best = min(best, median_of_values(np.abs(vals - c), t))
    return best


def median_mean_gap(f: GridFunction, t: float, q) -> tuple[float, float]:
    """(|m_f(t,Q) - f_Q|, mean of |f - f_Q| on Q): the two sides of the
    median-vs-mean comparison, for empirical constant estimation."""
    if not 0.5 <= t < 1.0:
        raise ValueError(f"t must be in [1/2, 1), got {t}")
    vals = cube_values(f, q)
    mean = float(np.mean(vals))
    med = median_of_values(vals, t)
    return abs(med - mean), float(np.mean(np.abs(vals - mean)))


def parent_median_bound(f: GridFunction, t: float, q: DyadicCube) -> tuple[float, float]:
    """(m_f(t,Q), m_f(1-(1-t)/2^n, parent Q)); the first never exceeds the second."""
    if not isinstance(q, DyadicCube):
        raise GridError("parent_median_bound expects a DyadicCube")
    if not 0.5 <= t < 1.0:
        raise ValueError(f"t must be in [1/2, 1), got {t}")
    parent = q.parent()  # raises on the root cube
    t_parent = 1.0 - (1.0 - t) / (2 ** f.dim)
    return maximal_median(f, t, q), maximal_median(f, t_parent, parent)


# Re-exported here because suites pair it with medians constantly.
cube_average = average
