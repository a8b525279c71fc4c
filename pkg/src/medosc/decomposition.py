"""Local median decompositions on the dyadic tree of a root cube.

The iteration, common to all three variants: on an active cube P, localize
f_P = (f - m_f(t,P)) chi_P, compute a stopping threshold tau(P), and

* if |f_P| <= tau(P) everywhere (empty exceedance set), P stops;
* otherwise select the maximal dyadic subcubes Q of P with
  |m_{f_P}(t,Q)| > tau(P) and |m_{f_P}(t, parent Q)| <= tau(P) (strict ">" on
  the selection side, ties are not selected), record the coefficient
  a = m_{f_P}(t,Q), and recurse into each selected cube.

Thresholds:

* base and annular variants: tau(P) = 2 * min over cells y of P of
  M#_{0,s,P} f(y)  (the annular variant differs only in which coefficient
  bound is verified afterwards);
* refined variant: tau(P) = m_{|f - m_f(t,P)|}(t, P).

Because single cells are dyadic cubes, the discrete decomposition satisfies
the pointwise majorization exactly: at every cell either some stopped cube or
the "outside the next generation" case bounds |f_P| by tau(P), which never
exceeds 2 M#_{0,s,Q0} f (base) or 4 M#_{0,s,Q0} f (refined).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import medians
from .grid import DyadicCube, GridCube, GridError, GridFunction, cube_values
from .maximal import osc_table, resolve_cube_mode, build_table

__all__ = [
    "SelectedCube",
    "DecompositionResult",
    "decompose",
    "verify_pointwise_bound",
    "measure_decay",
    "reconstruct",
    "result_to_dict",
    "result_from_dict",
    "write_result",
    "read_result",
]

VARIANTS = ("base", "annular", "refined")


@dataclass(frozen=True)
class SelectedCube:
    """One stopping-time cube with its coefficient and selection diagnostics."""

    cube: DyadicCube
    a: float
    continued: bool
    threshold: float = math.nan        # tau of the active cube that selected it
    parent_abs_median: float = math.nan  # |m_{f_P}(t, parent)| at selection time


@dataclass(frozen=True)
class DecompositionResult:
    variant: str
    t: float
    s: float
    cube_mode: str
    root: DyadicCube
    root_median: float
    generations: tuple          # tuple over v of tuples of SelectedCube
    halt_reason: str            # emptyE1 | exhausted | maxDepth
    level: int                  # grid level of the source function
    dim: int

    def omega_masks(self, f: GridFunction) -> list[np.ndarray]:
        """Boolean cell masks of the Omega^v = union of generation-v cubes."""
        masks = []
        for gen in self.generations:
            m = np.zeros((f.n,) * f.dim, dtype=bool)
            for sc in gen:
                _mask_fill(m, sc.cube.to_grid_cube(f.level))
            masks.append(m)
        return masks

    def all_cubes(self):
        for v, gen in enumerate(self.generations, start=1):
            for sc in gen:
                yield v, sc


def _mask_fill(mask: np.ndarray, g: GridCube) -> None:
    if mask.ndim == 1:
        mask[g.offset[0]:g.offset[0] + g.side] = True
    else:
        mask[g.offset[0]:g.offset[0] + g.side,
             g.offset[1]:g.offset[1] + g.side] = True


def _check_params(t: float, s: float, variant: str, dim: int) -> None:
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}, expected one of {VARIANTS}")
    if not 0.0 < s < 0.5:
        raise ValueError(f"s must be in (0, 1/2), got {s}")
    if not 0.5 <= t < 1.0 - s:
        raise ValueError(f"t must satisfy 1/2 <= t < 1 - s, got t={t}, s={s}")
    if variant == "refined":
        if not s < 1.0 / 2 ** (dim + 1):
            raise ValueError(f"refined variant needs s < 1/2^(n+1), got s={s}, n={dim}")
        if not t <= 1.0 - (2 ** dim) * s:
            raise ValueError(f"refined variant needs t <= 1 - 2^n s, got t={t}, s={s}")


def _threshold(f: GridFunction, P: DyadicCube, t: float, s: float, variant: str,
               cube_mode: str) -> float:
    g = P.to_grid_cube(f.level)
    if variant == "refined":
        med = medians.maximal_median(f, t, g)
        dev = np.abs(cube_values(f, g) - med)
        return medians.median_of_values(dev, t)
    table = osc_table(f, g, s, cube_mode)
    return 2.0 * float(np.min(table.field()))


def decompose(f: GridFunction, q0: DyadicCube | None = None, t: float = 0.5,
              s: float = 0.125, variant: str = "base", cube_mode: str = "auto",
              max_generations: int | None = None) -> DecompositionResult:
    """Run the stopping-time iteration; deterministic, cubes in (level, index) order."""
    _check_params(t, s, variant, f.dim)
    root = q0 if q0 is not None else DyadicCube(0, (0,) * f.dim)
    root_grid = root.to_grid_cube(f.level)
    cube_mode = resolve_cube_mode(f.dim, root_grid.side, cube_mode)
    cap = max_generations if max_generations is not None else f.level + 1

    root_median = medians.maximal_median(f, t, root_grid)

    def survey(P: DyadicCube):
        """tau(P) and the exceedance test for the localized function on P."""
        g = P.to_grid_cube(f.level)
        med = medians.maximal_median(f, t, g)
        tau = _threshold(f, P, t, s, variant, cube_mode)
        exceed = bool(np.any(np.abs(cube_values(f, g) - med) > tau))
        return med, tau, exceed

    def select(P: DyadicCube, med_P: float, tau: float) -> list[SelectedCube]:
        """Maximal dyadic subcubes of P whose localized median escapes tau."""
        chosen = []

        def walk(Q: DyadicCube):
            for child in Q.children():
                m_child = medians.maximal_median(f, t, child.to_grid_cube(f.level))
                a = m_child - med_P
                if abs(a) > tau:
                    parent_med = medians.maximal_median(f, t, Q.to_grid_cube(f.level))
                    chosen.append(SelectedCube(
                        cube=child, a=a, continued=False, threshold=tau,
                        parent_abs_median=abs(parent_med - med_P)))
                elif child.lvl < f.level:
                    walk(child)

        walk(P)
        return chosen

    generations: list[tuple] = []
    med0, tau0, exceed0 = survey(root)
    if not exceed0:
        return DecompositionResult(variant, t, s, cube_mode, root, root_median,
                                   tuple(), "emptyE1", f.level, f.dim)

    halt = "exhausted"
    active = [(root, med0, tau0)]
    while active:
        if len(generations) >= cap:
            halt = "maxDepth"
            break
        gen: list[SelectedCube] = []
        next_active = []
        for P, med_P, tau in active:
            gen.extend(select(P, med_P, tau))
        gen.sort(key=lambda sc: (sc.cube.lvl, sc.cube.index))
        refreshed = []
        for sc in gen:
            med_c, tau_c, exceed_c = survey(sc.cube)
            refreshed.append(SelectedCube(sc.cube, sc.a, exceed_c,
                                          sc.threshold, sc.parent_abs_median))
            if exceed_c:
                next_active.append((sc.cube, med_c, tau_c))
        if not refreshed:
            break
        generations.append(tuple(refreshed))
        active = next_active

    return DecompositionResult(variant, t, s, cube_mode, root, root_median,
                               tuple(generations), halt, f.level, f.dim)


# ---------------------------------------------------------------------------
# Verifiers
# ---------------------------------------------------------------------------


DEFAULT_C1 = {"base": 4.0, "annular": 4.0, "refined": 8.0}
COEFF_FACTOR = lambda dim: 10 * dim + 2  # noqa: E731


@dataclass(frozen=True)
class PointwiseReport:
    c1: float
    slack: float
    pointwise_violations: tuple   # cells where |f - m| > majorant
    worst_pointwise_ratio: float
    coeff_ratios: tuple           # (cube, |a| / bound) per selected cube
    coeff_violations: tuple       # cubes with |a| > slack * factor * bound-part
    worst_coeff_ratio: float
    # |a| against the two-term form tau(P) + 2 min_Q M#_{0,s,parent}: exact
    # for s <= (1-t)/2^n, so the worst ratio here should never exceed 1.
    worst_exact_form_ratio: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.pointwise_violations and not self.coeff_violations


def _ratio(num: float, den: float) -> float:
    if num == 0.0:
        return 0.0
    if den == 0.0:
        return math.inf
    return num / den


def _coeff_bound(f: GridFunction, result: DecompositionResult,
                 sc: SelectedCube) -> float:
    """The variant's coefficient majorant (without the (10n+2)/slack factors)."""
    variant = result.variant
    parent = sc.cube.parent()
    parent_grid = parent.to_grid_cube(f.level)
    if variant == "refined":
        t_up = 1.0 - (1.0 - result.t) / (2 ** f.dim)
        med = medians.maximal_median(f, result.t, parent_grid)
        dev = np.abs(cube_values(f, parent_grid) - med)
        return medians.median_of_values(dev, t_up)
    if variant == "annular":
        root_grid = result.root.to_grid_cube(f.level)
        table = build_table(
            f, root_grid, result.cube_mode,
            lambda win, side: _sharp_median_stat(win, result.s),
            needs_sorted=True)
        return _max_over_containing(table, sc.cube.to_grid_cube(f.level))
    # base: inf over the cube of the local sharp maximal rooted at the parent
    table = osc_table(f, parent_grid, result.s, result.cube_mode)
    fld = table.field()
    g = sc.cube.to_grid_cube(f.level)
    rel = tuple(o - po for o, po in zip(g.offset, parent_grid.offset))
    if f.dim == 1:
        return float(np.min(fld[rel[0]:rel[0] + g.side]))
    return float(np.min(fld[rel[0]:rel[0] + g.side, rel[1]:rel[1] + g.side]))


def _sharp_median_stat(win: np.ndarray, s: float) -> np.ndarray:
    m = win.shape[-1]
    w = medians.sharp_window(s, m)
    if w <= 1:
        return np.zeros(win.shape[:-1])
    return (win[..., w - 1:] - win[..., :m - w + 1]).min(axis=-1) / 2.0


def _max_over_containing(table, g: GridCube) -> float:
    """max of a CubeTable over family cubes containing the given cube."""
    best = -math.inf
    step_of = (lambda s: s) if table.mode == "dyadic" else (lambda s: 1)
    for s in table.sides():
        if s < g.side:
            continue
        arr = table.per_side[s]
        step = step_of(s)
        sl = []
        ok = True
        for a in range(table.dim):
            lo = max(g.offset[a] + g.side - s, table.root.offset[a])
            hi = min(g.offset[a], table.root.offset[a] + table.root.side - s)
            lo_rel, hi_rel = lo - table.root.offset[a], hi - table.root.offset[a]
            if step > 1:
                lo_rel = (lo_rel + step - 1) // step
                hi_rel = hi_rel // step
            if lo_rel > hi_rel:
                ok = False
                break
            sl.append(slice(lo_rel, hi_rel + 1))
        if not ok:
            continue
        chunk = arr[tuple(sl)] if table.dim == 2 else arr[sl[0]]
        if chunk.size:
            best = max(best, float(np.max(chunk)))
    return best


def verify_pointwise_bound(f: GridFunction, result: DecompositionResult,
                           c1: float | None = None, slack: float = 2.0,
                           tol: float = 1e-9) -> PointwiseReport:
    """Check |f - m_f(t,Q0)| <= c1 M#_{0,s,Q0}f + sum |a| chi, and the
    variant's coefficient bound with the given slack.  Violations are report
    content, never exceptions."""
    c1 = DEFAULT_C1[result.variant] if c1 is None else c1
    root_grid = result.root.to_grid_cube(f.level)
    msharp = osc_table(f, root_grid, result.s, result.cube_mode).field()
    majorant = c1 * msharp + _coefficient_field(f, result, root_grid)
    lhs = np.abs(_restrict(f, root_grid) - result.root_median)

    viol = np.argwhere(lhs > majorant + tol)
    ratios = np.where(lhs == 0, 0.0,
                      np.where(majorant == 0, np.inf, lhs / np.maximum(majorant, 1e-300)))
    worst_pw = float(np.max(ratios)) if ratios.size else 0.0

    factor = COEFF_FACTOR(f.dim)
    coeff_ratios = []
    coeff_viol = []
    worst = 0.0
    for v, sc in result.all_cubes():
        bound = _coeff_bound(f, result, sc)
        if result.variant == "refined":
            # The parent-median majorant alone under-counts by the selection
            # threshold (the localized parent median can sit anywhere below
            # tau); bound + tau is exact by the median-difference argument.
            full = bound + sc.threshold
        else:
            full = factor * bound
        r = _ratio(abs(sc.a), full)
        coeff_ratios.append((sc.cube, r))
        worst = max(worst, r)
        if abs(sc.a) > slack * full + tol:
            coeff_viol.append((sc.cube, abs(sc.a), full))
    return PointwiseReport(
        c1=c1, slack=slack,
        pointwise_violations=tuple(map(tuple, viol.tolist())),
        worst_pointwise_ratio=worst_pw,
        coeff_ratios=tuple(coeff_ratios),
        coeff_violations=tuple(coeff_viol),
        worst_coeff_ratio=worst,
    )


def _restrict(f: GridFunction, g: GridCube) -> np.ndarray:
    if f.dim == 1:
        return f.values[g.offset[0]:g.offset[0] + g.side]
    return f.grid()[g.offset[0]:g.offset[0] + g.side,
                    g.offset[1]:g.offset[1] + g.side]


def _coefficient_field(f: GridFunction, result: DecompositionResult,
                       root_grid: GridCube) -> np.ndarray:
    out = np.zeros((root_grid.side,) * f.dim)
    for _, sc in result.all_cubes():
        g = sc.cube.to_grid_cube(f.level)
        rel = tuple(o - po for o, po in zip(g.offset, root_grid.offset))
        if f.dim == 1:
            out[rel[0]:rel[0] + g.side] += abs(sc.a)
        else:
            out[rel[0]:rel[0] + g.side, rel[1]:rel[1] + g.side] += abs(sc.a)
    return out


@dataclass(frozen=True)
class DecayRecord:
    v: int
    cube: DyadicCube
    ratio: float      # |Omega^{v+1} cap Q^v_j| / |Q^v_j|


@dataclass(frozen=True)
class DecayReport:
    records: tuple
    omega_fractions: tuple      # |Omega^k| / |Q0| per k
    max_ratio: float
    max_generalized_ratio: float  # (2.14) normalized: ratio / (s/(1-t))^(k-v)
    bound: float                # s/(1-t)


def measure_decay(result: DecompositionResult, f: GridFunction) -> DecayReport:
    """Per-cube next-generation measure ratios plus the geometric Omega decay."""
    masks = result.omega_masks(f)
    bound = result.s / (1.0 - result.t)
    root_cells = result.root.to_grid_cube(f.level).cell_count
    records = []
    gen_max = 0.0
    worst_gen = 0.0
    for v, gen in enumerate(result.generations, start=1):
        for sc in gen:
            g = sc.cube.to_grid_cube(f.level)
            if v < len(masks):
                inter = int(np.count_nonzero(_restrict_mask(masks[v], g)))
            else:
                inter = 0
            ratio = inter / g.cell_count
            records.append(DecayRecord(v, sc.cube, ratio))
            gen_max = max(gen_max, ratio)
            # generalized (2.14): |Omega^k cap Q^v_j| <= bound^(k-v) |Q^v_j|
            for k in range(v + 1, len(masks) + 1):
                inter_k = int(np.count_nonzero(_restrict_mask(masks[k - 1], g)))
                denom = bound ** (k - v) * g.cell_count
                worst_gen = max(worst_gen, inter_k / denom if denom else math.inf)
    fractions = tuple(int(np.count_nonzero(m)) / root_cells for m in masks)
    return DecayReport(tuple(records), fractions, gen_max, worst_gen, bound)


def _restrict_mask(mask: np.ndarray, g: GridCube) -> np.ndarray:
    if mask.ndim == 1:
        return mask[g.offset[0]:g.offset[0] + g.side]
    return mask[g.offset[0]:g.offset[0] + g.side, g.offset[1]:g.offset[1] + g.side]


def reconstruct(f: GridFunction, result: DecompositionResult,
                c1: float | None = None) -> tuple[GridFunction, GridFunction]:
    """(majorant, residual): residual = |f - m_f(t,Q0)| - majorant <= 0."""
    c1 = DEFAULT_C1[result.variant] if c1 is None else c1
    root_grid = result.root.to_grid_cube(f.level)
    if root_grid.cell_count != f.values.size:
        raise GridError("reconstruct expects the decomposition root to be the full domain")
    msharp = osc_table(f, root_grid, result.s, result.cube_mode).field()
    majorant = c1 * msharp + _coefficient_field(f, result, root_grid)
    residual = np.abs(_restrict(f, root_grid) - result.root_median) - majorant
    return f.with_values(majorant.reshape(-1)), f.with_values(residual.reshape(-1))


# ---------------------------------------------------------------------------
# Serialization (External Interfaces)
# ---------------------------------------------------------------------------


def result_to_dict(result: DecompositionResult) -> dict:
    return {
        "variant": result.variant,
        "t": result.t,
        "s": result.s,
        "rootMedian": result.root_median,
        "generations": [
            [
                {"level": sc.cube.lvl, "index": list(sc.cube.index),
                 "a": sc.a, "continued": sc.continued}
                for sc in gen
            ]
            for gen in result.generations
        ],
        "haltReason": result.halt_reason,
        "cubeMode": result.cube_mode,
        "gridLevel": result.level,
        "dim": result.dim,
        "root": {"level": result.root.lvl, "index": list(result.root.index)},
    }


def result_from_dict(doc: dict) -> DecompositionResult:
    gens = tuple(
        tuple(SelectedCube(DyadicCube(c["level"], tuple(c["index"])),
                           float(c["a"]), bool(c["continued"]))
              for c in gen)
        for gen in doc["generations"]
    )
    root = DyadicCube(doc["root"]["level"], tuple(doc["root"]["index"]))
    return DecompositionResult(
        doc["variant"], float(doc["t"]), float(doc["s"]), doc["cubeMode"],
        root, float(doc["rootMedian"]), gens, doc["haltReason"],
        int(doc["gridLevel"]), int(doc["dim"]))


def write_result(result: DecompositionResult, path) -> None:
    with open(path, "w", newline="\n") as fh:
        json.dump(result_to_dict(result), fh, indent=2)
        fh.write("\n")


def read_result(path) -> DecompositionResult:
    with open(path) as fh:
        return result_from_dict(json.load(fh))
