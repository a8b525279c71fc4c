"""Weight-class estimators and weighted function-space norms.

Class membership on a finite grid is never certified absolutely: a weight
that fails A_p shows up as a constant that blows up under refinement, one
that satisfies it shows up as a stable constant.  All verdicts here are
therefore refinement trends over a sequence of levels (``classify_trend``),
with the raw sequence always reported.

The two-weight estimators (condition F, W_p) maximize their defining ratio
over enumerated cubes and candidate subsets E: greedy families (top-k cells
by w, top-k by w/(v+delta)), seeded random subsets, and exhaustive subsets
for cubes of at most 12 cells.  The returned value is a certified lower
bound on the true constant, with the achieving (Q, E) witness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import medians
from .grid import GridCube, GridFunction, cube_values, _as_grid_cube
from .maximal import resolve_cube_mode, _windows, _sides_for, _root_values
from .young import YoungFunction, conjugate, luxemburg_norm_values

__all__ = [
    "TrendVerdict",
    "classify_trend",
    "ap_constant",
    "FEstimate",
    "condition_f_estimate",
    "wp_estimate",
    "weak_ainf_estimate",
    "perez_bump_check",
    "a_phi_check",
    "morrey_norm",
    "campanato_norm",
    "power_phi",
]


# ---------------------------------------------------------------------------
# Refinement-trend classification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TrendVerdict:
    verdict: str                 # 'stable' | 'growing' | 'indeterminate'
    levels: tuple
    values: tuple
    growth_factors: tuple

    def __str__(self):
        seq = ", ".join(f"L{lv}: {v:.6g}" for lv, v in zip(self.levels, self.values))
        return f"{self.verdict} [{seq}]"


def classify_trend(levels, values, grow_factor: float = 2.0,
                   stable_factor: float = 1.05) -> TrendVerdict:
    """Growing iff every successive ratio >= grow_factor, stable iff every
    ratio <= stable_factor; anything mixed (or non-finite input) is
    indeterminate unless a blow-up to infinity is explicit."""
    levels, values = tuple(levels), tuple(float(v) for v in values)
    if len(values) < 2:
        return TrendVerdict("indeterminate", levels, values, ())
    if any(math.isinf(v) for v in values):
        return TrendVerdict("growing", levels, values, (math.inf,))
    if any(v <= 0 or math.isnan(v) for v in values):
        return TrendVerdict("indeterminate", levels, values, ())
    gf = tuple(values[i + 1] / values[i] for i in range(len(values) - 1))
    if all(g >= grow_factor for g in gf):
        return TrendVerdict("growing", levels, values, gf)
    if all(g <= stable_factor for g in gf):
        return TrendVerdict("stable", levels, values, gf)
    return TrendVerdict("indeterminate", levels, values, gf)


# ---------------------------------------------------------------------------
# A_p constant
# ---------------------------------------------------------------------------


def ap_constant(w: GridFunction, p: float, root=None, cube_mode: str = "auto") -> float:
    """sup over cubes of (avg_Q w) * (avg_Q w^(1-p'))^(p-1); +inf when a cube
    mixes zero and positive cells (all-zero cubes contribute 0)."""
    if p <= 1:
        raise ValueError(f"A_p requires p > 1, got {p}")
    root = w.full_cube() if root is None else _as_grid_cube(root, w)
    pp = p / (p - 1.0)
    mode = resolve_cube_mode(w.dim, root.side, cube_mode)
    vals_w = _root_values(w, root).astype(float)
    with np.errstate(divide="ignore"):
        vals_s = vals_w ** (1.0 - pp)

    def combine(aw, asig):
        with np.errstate(invalid="ignore"):
            out = aw * asig ** (p - 1.0)
        return np.nan_to_num(out, nan=0.0, posinf=np.inf)  # 0 * inf: all-zero cube

    best = 0.0
    if w.dim == 1 and mode == "grid-aligned":
        # prefix sums: O(N) per side instead of O(N * side).  With inf
        # entries (zero cells) the inf - inf = nan differences drop to 0,
        # which is safe: some interval with a finite left prefix still
        # reports inf, so the sup verdict is unaffected.
        cw = np.concatenate([[0.0], np.cumsum(vals_w)])
        cs = np.concatenate([[0.0], np.cumsum(vals_s)])
        with np.errstate(invalid="ignore"):
            for s in range(1, root.side + 1):
                aw = (cw[s:] - cw[:-s]) / s
                asig = (cs[s:] - cs[:-s]) / s
                best = max(best, float(np.max(combine(aw, asig))))
        return best
    for s in _sides_for(mode, root.side):
        ww = _windows(vals_w, s, w.dim, mode)
        ws = _windows(vals_s, s, w.dim, mode)
        m = combine(ww.mean(axis=-1), ws.mean(axis=-1))
        if m.size:
            best = max(best, float(np.max(m)))
    return best


# ---------------------------------------------------------------------------
# Condition F / W_p estimators
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FEstimate:
    constant: float              # certified lower bound (inf = condition fails)
    witness_cube: GridCube | None
    witness_cells: tuple         # cell coordinates of the achieving E
    families: tuple = ()         # which candidate family achieved it


def _power_psi(beta: float):
    def psi(x):
        return x ** beta
    return psi


def _ratio_fail_aware(num: float, psi_val: float, den: float) -> float:
    if num <= 0.0:
        return 0.0
    if den <= 0.0 or psi_val <= 0.0:
        return math.inf
    return num / (psi_val * den)


def condition_f_estimate(w: GridFunction, v: GridFunction, beta: float,
                         alpha_max: float = 0.5, root=None,
                         cube_mode: str = "auto", psi=None,
                         random_trials: int = 16, random_cubes: int = 64,
                         seed: int = 0) -> FEstimate:
    """Lower-bound the best constant c1 in
    int_E w <= c1 psi(|E|/|Q|) int_{Q\\E} v  over cubes Q and E with
    |E| <= alpha_max |Q|.  psi defaults to x^beta."""
    if beta <= 0:
        raise ValueError(f"beta must be positive, got {beta}")
    if not 0 < alpha_max < 1:
        raise ValueError(f"alpha_max must be in (0,1), got {alpha_max}")
    psi = psi if psi is not None else _power_psi(beta)
    root = w.full_cube() if root is None else _as_grid_cube(root, w)
    mode = resolve_cube_mode(w.dim, root.side, cube_mode)
    wv = _root_values(w, root).astype(float)
    vv = _root_values(v, root).astype(float)

    best = 0.0
    best_cube = None
    best_cells: tuple = ()
    best_family = ""

    def consider(side, pos, k_cells_idx, num, den, family):
        nonlocal best, best_cube, best_cells, best_family
        m = side ** w.dim
        r = _ratio_fail_aware(num, psi(len(k_cells_idx) / m), den)
        if r > best:
            best = r
            best_cube = _cube_at(root, side, pos, w.dim, mode)
            best_cells = tuple(k_cells_idx)
            best_family = family

    # greedy families, vectorized per side
    delta = 1e-12
    for side in _sides_for(mode, root.side):
        m = side ** w.dim
        kmax = int(math.floor(alpha_max * m + 1e-9))
        if kmax < 1:
            continue
        win_w = _windows(wv, side, w.dim, mode).reshape(-1, m)
        win_v = _windows(vv, side, w.dim, mode).reshape(-1, m)
        tot_v = win_v.sum(axis=1)
        for family, key in (("top-w", win_w), ("top-w/v", win_w / (win_v + delta))):
            order = np.argsort(-key, axis=1)
            w_sorted = np.take_along_axis(win_w, order, axis=1)
            v_sorted = np.take_along_axis(win_v, order, axis=1)
            cw = np.cumsum(w_sorted[:, :kmax], axis=1)
            cv = np.cumsum(v_sorted[:, :kmax], axis=1)
            ks = np.arange(1, kmax + 1)
            psis = np.array([psi(k / m) for k in ks])
            den = tot_v[:, None] - cv
            with np.errstate(divide="ignore", invalid="ignore"):
                ratios = np.where(cw > 0,
                                  cw / (psis[None, :] * np.where(den > 0, den, np.nan)),
                                  0.0)
                ratios = np.where((cw > 0) & (den <= 0), np.inf, ratios)
            ratios = np.nan_to_num(ratios, nan=0.0, posinf=np.inf)
            flat = int(np.argmax(ratios))
            pos, kk = divmod(flat, kmax)
            val = float(ratios.reshape(-1)[flat])
            if val > best:
                chosen = order[pos, :kk + 1]
                consider(side, pos, chosen,
                         float(cw[pos, kk]), float(den[pos, kk]), family)

    # exhaustive subsets for small cubes
    for side in _sides_for(mode, root.side):
        m = side ** w.dim
        if m > 12:
            continue
        kmax = int(math.floor(alpha_max * m + 1e-9))
        if kmax < 1:
            continue
        win_w = _windows(wv, side, w.dim, mode).reshape(-1, m)
        win_v = _windows(vv, side, w.dim, mode).reshape(-1, m)
        masks, sizes = _subset_masks(m, kmax)
        num = win_w @ masks.T                     # (pos, subsets)
        den = win_v @ (1.0 - masks).T
        psis = np.array([psi(sz / m) for sz in sizes])
        with np.errstate(divide="ignore", invalid="ignore"):
            ratios = np.where(num > 0,
                              num / (psis[None, :] * np.where(den > 0, den, np.nan)),
                              0.0)
            ratios = np.where((num > 0) & (den <= 0), np.inf, ratios)
        ratios = np.nan_to_num(ratios, nan=0.0, posinf=np.inf)
        flat = int(np.argmax(ratios))
        pos, si = divmod(flat, masks.shape[0])
        val = float(ratios.reshape(-1)[flat])
        if val > best:
            chosen = np.flatnonzero(masks[si])
            consider(side, pos, chosen, float(num[pos, si]), float(den[pos, si]),
                     "exhaustive")

    # seeded random subsets on a deterministic cube sample
    for side, pos, win_w, win_v in _sampled_cubes(wv, vv, root, mode, w.dim,
                                                  random_cubes, seed):
        m = win_w.size
        kmax = int(math.floor(alpha_max * m + 1e-9))
        if kmax < 1 or m <= 12:
            continue
        for trial in range(random_trials):
            rng = np.random.default_rng([seed, side, pos, trial])
            k = int(rng.integers(1, kmax + 1))
            chosen = rng.choice(m, size=k, replace=False)
            num = float(win_w[chosen].sum())
            den = float(win_v.sum() - win_v[chosen].sum())
            r = _ratio_fail_aware(num, psi(k / m), den)
            if r > best:
                consider(side, pos, chosen, num, den, "random")

    return FEstimate(best, best_cube, best_cells, (best_family,))


def _subset_masks(m: int, kmax: int):
    all_masks = []
    sizes = []
    for bits in range(1, 2 ** m):
        sz = bin(bits).count("1")
        if sz <= kmax:
            all_masks.append([(bits >> i) & 1 for i in range(m)])
            sizes.append(sz)
    return np.asarray(all_masks, dtype=float), np.asarray(sizes)


def _cube_at(root: GridCube, side: int, flat_pos: int, dim: int, mode: str) -> GridCube:
    step = side if mode == "dyadic" else 1
    if dim == 1:
        npos = (root.side - side) // step + 1 if mode != "dyadic" else root.side // side
        return GridCube((root.offset[0] + flat_pos * step,), side)
    npos1 = (root.side - side + 1) if mode != "dyadic" else root.side // side
    i0, i1 = divmod(flat_pos, npos1)
    return GridCube((root.offset[0] + i0 * step, root.offset[1] + i1 * step), side)


def _sampled_cubes(wv, vv, root, mode, dim, max_cubes, seed):
    sides = _sides_for(mode, root.side)
    rng = np.random.default_rng([seed, 777])
    out = []
    for side in sides:
        win_w = _windows(wv, side, dim, mode).reshape(-1, side ** dim)
        win_v = _windows(vv, side, dim, mode).reshape(-1, side ** dim)
        for pos in range(win_w.shape[0]):
            out.append((side, pos, win_w[pos], win_v[pos]))
    if len(out) > max_cubes:
        idx = rng.choice(len(out), size=max_cubes, replace=False)
        out = [out[i] for i in sorted(idx)]
    return out


def wp_estimate(w: GridFunction, v: GridFunction, p: float, beta: float,
                alpha: float = 0.5, c_factor: float = 3.0, root=None,
                cube_mode: str = "auto", random_trials: int = 8,
                seed: int = 0) -> FEstimate:
    """Lower-bound the constant c0 of the two-weight testing condition
    int_E w * ((1/|Q|) int_{cQ} v^{1-p'})^p <= c0 (|E|/|Q|)^beta int_{E'} v^{1-p'}
    over (Q, E, E') with E, E' disjoint subsets of Q and |E'| >= alpha |Q|."""
    if p <= 1:
        raise ValueError(f"W_p requires p > 1, got {p}")
    if c_factor <= 1:
        raise ValueError(f"the enlargement factor must exceed 1, got {c_factor}")
    root = w.full_cube() if root is None else _as_grid_cube(root, w)
    mode = resolve_cube_mode(w.dim, root.side, cube_mode)
    pp = p / (p - 1.0)
    with np.errstate(divide="ignore"):
        sig = np.asarray(v.values, dtype=float) ** (1.0 - pp)
    sig = np.nan_to_num(sig, posinf=np.inf)
    sig_f = v.with_values(np.minimum(sig, 1e300))
    cv = w.cell_volume

    best = 0.0
    best_cube = None
    best_cells: tuple = ()

    for side in _sides_for(mode, root.side):
        m = side ** w.dim
        need = int(math.ceil(alpha * m - 1e-9))
        kmax = m - need
        if kmax < 1:
            continue
        win_w = _windows(_root_values(w, root), side, w.dim, mode).reshape(-1, m)
        win_s = _windows(_root_values(sig_f, root), side, w.dim, mode).reshape(-1, m)
        n_pos = win_w.shape[0]
        for pos in range(n_pos):
            cube = _cube_at(root, side, pos, w.dim, mode)
            enlarged = _enlarge_clip(cube, c_factor, w.n)
            mean_sig_big = float(np.mean(cube_values(sig_f, enlarged)))
            row_w, row_s = win_w[pos], win_s[pos]
            order_w = np.argsort(-row_w)
            order_s = np.argsort(row_s)

            def try_e(e_idx):
                nonlocal best, best_cube, best_cells
                e_set = set(int(i) for i in e_idx)
                rest = [i for i in range(m) if i not in e_set]
                if len(rest) < need:
                    return
                # E': complement, and the smallest-sigma cells of the complement
                for e_prime in (rest, sorted(rest, key=lambda i: row_s[i])[:need]):
                    num = float(row_w[list(e_set)].sum()) * cv * mean_sig_big ** p
                    den = float(row_s[list(e_prime)].sum()) * cv
                    r = _ratio_fail_aware(num, (len(e_set) / m) ** beta, den)
                    if r > best:
                        best = r
                        best_cube = cube
                        best_cells = tuple(sorted(e_set))

            for k in range(1, kmax + 1):
                try_e(order_w[:k])
            if m <= 12:
                masks, _ = _subset_masks(m, kmax)
                for mask in masks:
                    try_e(np.flatnonzero(mask))
            else:
                for trial in range(random_trials):
                    rng = np.random.default_rng([seed, side, pos, trial])
                    k = int(rng.integers(1, kmax + 1))
                    try_e(rng.choice(m, size=k, replace=False))
            # also greedy by small sigma left out
            for k in range(1, kmax + 1):
                try_e(order_s[-k:])

    return FEstimate(best, best_cube, best_cells)


def _enlarge_clip(cube: GridCube, factor: float, n: int) -> GridCube:
    grow = int(round(cube.side * (factor - 1.0) / 2.0))
    side = min(cube.side + 2 * grow, n)
    off = []
    for a in range(cube.dim):
        o = cube.offset[a] - grow
        o = max(0, min(o, n - side))
        off.append(o)
    return GridCube(tuple(off), side)


def _topk_ratio_scan(w: GridFunction, beta: float, alpha_max: float,
                     root, cube_mode: str, denominator_of) -> FEstimate:
    """Shared skeleton for the one-weight smallness classes: maximize
    w(E) / (psi(|E|/|Q|) * D(Q)) over cubes and top-k cell sets E."""
    root = w.full_cube() if root is None else _as_grid_cube(root, w)
    mode = resolve_cube_mode(w.dim, root.side, cube_mode)
    wv = _root_values(w, root).astype(float)
    best, best_cube, best_cells = 0.0, None, ()
    for side in _sides_for(mode, root.side):
        m = side ** w.dim
        kmax = int(math.floor(alpha_max * m + 1e-9))
        if kmax < 1:
            continue
        win_w = _windows(wv, side, w.dim, mode).reshape(-1, m)
        for pos in range(win_w.shape[0]):
            cube = _cube_at(root, side, pos, w.dim, mode)
            den = denominator_of(cube)
            row = np.sort(win_w[pos])[::-1]
            csum = np.cumsum(row[:kmax])
            for k in range(1, kmax + 1):
                r = _ratio_fail_aware(float(csum[k - 1]), (k / m) ** beta, den)
                if r > best:
                    best, best_cube = r, cube
                    best_cells = tuple(int(i) for i in np.argsort(-win_w[pos])[:k])
    return FEstimate(best, best_cube, best_cells)


def weak_ainf_estimate(w: GridFunction, beta: float, alpha_max: float = 0.5,
                       root=None, cube_mode: str = "auto", seed: int = 0) -> FEstimate:
    """Definition-level weak-A_inf checker: w(E) <= c (|E|/|Q|)^beta w(2Q),
    the estimator skeleton with the doubled (clipped) cube on the right."""

    def denominator(cube):
        doubled = _enlarge_clip(cube, 2.0, w.n)
        return float(np.sum(cube_values(w, doubled)))

    return _topk_ratio_scan(w, beta, alpha_max, root, cube_mode, denominator)


def cp_estimate(w: GridFunction, p: float, beta: float, alpha_max: float = 0.5,
                root=None, cube_mode: str = "auto") -> FEstimate:
    """Definition-level Muckenhoupt C_p checker:
    w(E) <= c (|E|/|Q|)^beta int M(chi_Q)^p w over the whole domain.

    M(chi_Q) is evaluated in closed form: 1 on Q and |Q|/(|Q| + dist(x,Q))
    outside (the best interval stretches from x to the far end of Q), so the
    right-hand side sees the weight's global tail, which is what lets C_p
    hold for weights outside A_inf.
    """
    if p <= 1:
        raise ValueError(f"C_p requires p > 1, got {p}")
    if w.dim != 1:
        raise ValueError("the C_p checker is 1D")
    x_all = np.arange(w.n, dtype=float)
    cv = w.cell_volume

    def denominator(cube):
        lo, hi = cube.offset[0], cube.offset[0] + cube.side - 1
        dist = np.maximum(np.maximum(lo - x_all, x_all - hi), 0.0)
        mchi = cube.side / (cube.side + dist)
        return float(np.sum(mchi ** p * w.values)) * cv

    est = _topk_ratio_scan(w, beta, alpha_max, root, cube_mode, denominator)
    # the scan's numerator is a cell count; restore its measure factor
    return FEstimate(est.constant * cv if math.isfinite(est.constant) else est.constant,
                     est.witness_cube, est.witness_cells, est.families)


# ---------------------------------------------------------------------------
# Orlicz bump conditions
# ---------------------------------------------------------------------------


def perez_bump_check(w: GridFunction, v: GridFunction, p: float, q: float,
                     B: YoungFunction, root=None, cube_mode: str = "auto",
                     check_bp: bool = True) -> tuple[float, GridCube | None]:
    """sup over cubes of |Q|^(1/q-1/p) ||w^(1/q)||_{L^q(Q)} ||v^(-1/p)||_{L^B(Q)}
    (norms normalized by |Q|).  Gate: the conjugate of B lies in B_p."""
    if not 1 < p <= q:
        raise ValueError(f"need 1 < p <= q, got p={p}, q={q}")
    if check_bp:
        from .young import bp_diagnostics

        verdict = bp_diagnostics(conjugate(B), p)
        if verdict.in_class is False:
            raise ValueError("bump function rejected: conjugate(B) is not in B_p")
    root = w.full_cube() if root is None else _as_grid_cube(root, w)
    mode = resolve_cube_mode(w.dim, root.side, cube_mode)
    cvol = w.cell_volume
    wv = _root_values(w, root).astype(float)
    vv = _root_values(v, root).astype(float)
    best, best_cube = 0.0, None
    for side in _sides_for(mode, root.side):
        m = side ** w.dim
        meas = m * cvol
        win_w = _windows(wv, side, w.dim, mode).reshape(-1, m)
        win_v = _windows(vv, side, w.dim, mode).reshape(-1, m)
        for pos in range(win_w.shape[0]):
            norm_w = float(np.mean(win_w[pos])) ** (1.0 / q)
            with np.errstate(divide="ignore"):
                inv = win_v[pos] ** (-1.0 / p)
            if np.any(np.isinf(inv)):
                return math.inf, _cube_at(root, side, pos, w.dim, mode)
            norm_v = luxemburg_norm_values(inv, B)
            val = meas ** (1.0 / q - 1.0 / p) * norm_w * norm_v
            if val > best:
                best, best_cube = val, _cube_at(root, side, pos, w.dim, mode)
    return best, best_cube


def two_weight_bump_check(w: GridFunction, v: GridFunction, p: float, q: float,
                          r: float, A: YoungFunction, B: YoungFunction,
                          root=None, cube_mode: str = "auto",
                          w_exponent: str = "r/q") -> tuple[float, GridCube | None]:
    """The two-weight Orlicz bump product over cubes:
    |Q|^(r/q - r/p) ||w^e||_{L^A(Q)} ||v^(-r/p)||_{L^B(Q)}, where the printed
    exponent e = r/p conflicts with the proof's r/q; configurable, default r/q."""
    if w_exponent not in ("r/q", "r/p"):
        raise ValueError("w_exponent must be 'r/q' or 'r/p'")
    e = r / q if w_exponent == "r/q" else r / p
    root = w.full_cube() if root is None else _as_grid_cube(root, w)
    mode = resolve_cube_mode(w.dim, root.side, cube_mode)
    cvol = w.cell_volume
    wv = _root_values(w, root).astype(float)
    vv = _root_values(v, root).astype(float)
    best, best_cube = 0.0, None
    for side in _sides_for(mode, root.side):
        m = side ** w.dim
        meas = m * cvol
        win_w = _windows(wv, side, w.dim, mode).reshape(-1, m)
        win_v = _windows(vv, side, w.dim, mode).reshape(-1, m)
        for pos in range(win_w.shape[0]):
            with np.errstate(divide="ignore"):
                inv = win_v[pos] ** (-r / p)
            if np.any(np.isinf(inv)):
                return math.inf, _cube_at(root, side, pos, w.dim, mode)
            val = (meas ** (r / q - r / p)
                   * luxemburg_norm_values(win_w[pos] ** e, A)
                   * luxemburg_norm_values(inv, B))
            if val > best:
                best, best_cube = val, _cube_at(root, side, pos, w.dim, mode)
    return best, best_cube


# ---------------------------------------------------------------------------
# A_Phi condition (7.3)
# ---------------------------------------------------------------------------


def a_phi_check(w: GridFunction, Phi: YoungFunction, root=None,
                cube_mode: str = "auto") -> float:
    """sup over cubes of (1/|Q| int eps*w) a(1/|Q| int a^{-1}(1/(eps w))) with
    the proof's choice eps = ||1/w||_{L^conj(Phi)_w(Q)} per cube."""
    if Phi.family not in ("power", "powerlog"):
        raise ValueError("a_phi_check needs a differentiable family (power, powerlog)")
    root = w.full_cube() if root is None else _as_grid_cube(root, w)
    mode = resolve_cube_mode(w.dim, root.side, cube_mode)
    conj = conjugate(Phi)
    wv = _root_values(w, root).astype(float)
    if np.any(wv <= 0):
        return math.inf
    best = 0.0
    for side in _sides_for(mode, root.side):
        m = side ** w.dim
        win_w = _windows(wv, side, w.dim, mode).reshape(-1, m)
        for pos in range(win_w.shape[0]):
            row = win_w[pos]
            eps = luxemburg_norm_values(1.0 / row, conj, weights=row)
            if eps <= 0:
                continue
            first = eps * float(np.mean(row))
            inner = float(np.mean([Phi.derivative_inverse(1.0 / (eps * x)) for x in row]))
            best = max(best, first * Phi.derivative(inner))
    return best


# ---------------------------------------------------------------------------
# Orlicz-Morrey / Campanato norms
# ---------------------------------------------------------------------------


def power_phi(gamma: float):
    """phi(x, l) = l^gamma, the standard Morrey scaling."""
    if gamma <= 0:
        raise ValueError(f"gamma must be positive, got {gamma}")

    def phi(center, l):
        return l ** gamma

    return phi


def _weighted_lux(vals, Phi, wvals):
    if wvals is None:
        return luxemburg_norm_values(vals, Phi)
    return luxemburg_norm_values(vals, Phi, weights=wvals)


def morrey_norm(f: GridFunction, Phi: YoungFunction, phi, w: GridFunction | None = None,
                root=None, cube_mode: str = "auto") -> float:
    """sup over cubes of phi(center, sidelength) * ||f||_{L^Phi_w(Q)}."""
    return _morrey_like(f, Phi, phi, w, root, cube_mode, subtract_median_t=None)


def campanato_norm(f: GridFunction, Phi: YoungFunction, phi, w: GridFunction | None = None,
                   t: float = 0.5, root=None, cube_mode: str = "auto") -> float:
    """Like morrey_norm but each cube first subtracts the median m_f(t,Q)."""
    return _morrey_like(f, Phi, phi, w, root, cube_mode, subtract_median_t=t)


def _morrey_like(f, Phi, phi, w, root, cube_mode, subtract_median_t):
    root = f.full_cube() if root is None else _as_grid_cube(root, f)
    mode = resolve_cube_mode(f.dim, root.side, cube_mode)
    fv = _root_values(f, root).astype(float)
    wv = _root_values(w, root).astype(float) if w is not None else None
    h = f.cell_width
    best = 0.0
    for side in _sides_for(mode, root.side):
        m = side ** f.dim
        win_f = _windows(fv, side, f.dim, mode).reshape(-1, m)
        win_w = (_windows(wv, side, f.dim, mode).reshape(-1, m)
                 if wv is not None else None)
        for pos in range(win_f.shape[0]):
            cube = _cube_at(root, side, pos, f.dim, mode)
            vals = win_f[pos]
            if subtract_median_t is not None:
                vals = np.abs(vals - medians.median_of_values(vals, subtract_median_t))
            norm = _weighted_lux(vals, Phi, win_w[pos] if win_w is not None else None)
            val = phi(cube.center(f), cube.sidelength(f)) * norm
            if val > best:
                best = val
    return best
