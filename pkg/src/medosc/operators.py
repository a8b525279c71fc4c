"""Discrete singular and positive integral operators.

Quadrature is the midpoint rule over cells.  For antisymmetric kernels the
principal value is realized by omitting the diagonal cell: on a uniform grid
this is exact for odd kernels by symmetry, with no epsilon-limit machinery.
Positive homogeneous kernels skip exact singular alignments x = a_i y; when a
rational coefficient a_i makes whole diagonals align, those evaluation points
are shifted by half a cell.

Kernel kinds:

* ``hilbert``          k(x,y) = 1/(x-y), modulus omega(t) = t
* ``dini(eta)``        the same quadrature kernel with declared modulus
                       omega(t) = t^eta (a Lipschitz kernel satisfies every
                       eta-Dini condition, so the analytic lambda sequence
                       omega(c_n 2^-m) is an honest upper sequence)
* ``hormander(A)``     kernel with an L^A smoothness budget measured
                       numerically on annuli
* ``homogeneous``      Tf(x) = int prod_i |x - a_i y|^(-alpha_i) f(y) dy with
                       distinct nonzero scalars a_i and sum alpha_i = dim

Operators needing exterior data (the annuli 2^m Q of the lambda sequences,
or arguments y/a_i outside the root cube) are evaluated on a zero-extended
virtual padding of the domain; nothing is stored for the padding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid import GridCube, GridFunction, GridError, _as_grid_cube
from .maximal import (
    hl_maximal_field,
    local_sharp_field,
    orlicz_maximal_field,
    resolve_cube_mode,
    sup_inf_field,
)

__all__ = [
    "KernelOperator",
    "LambdaSequence",
    "apply_operator",
    "lambda_sequence",
    "pointwise_domination",
    "sublinear_envelope",
    "operator_from_config",
    "padded_maximal_field",
]

KINDS = ("hilbert", "dini", "hormander", "homogeneous")


@dataclass(frozen=True)
class KernelOperator:
    kind: str
    dim: int = 1
    eta: float = 1.0                    # Dini modulus exponent
    young: object = None                # Hörmander smoothness budget A
    a: tuple = ()                       # homogeneous coefficients
    alpha: tuple = ()                   # homogeneous exponents
    padding_levels: int = 6             # annuli up to 2^M Q available

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown operator kind {self.kind!r}")
        if self.dim != 1:
            raise GridError("kernel operators are implemented for dim=1")
        if self.kind == "dini" and not 0 < self.eta <= 1:
            raise ValueError(f"Dini exponent must be in (0,1], got {self.eta}")
        if self.kind == "homogeneous":
            if not self.a or len(self.a) != len(self.alpha):
                raise ValueError("homogeneous kernel needs matching a and alpha lists")
            if any(x == 0 for x in self.a):
                raise ValueError("homogeneous coefficients must be nonzero")
            if len(set(self.a)) != len(self.a):
                raise ValueError("homogeneous coefficients must be pairwise distinct")
            if any(al <= 0 for al in self.alpha):
                raise ValueError("homogeneous exponents must be positive")
            if not math.isclose(sum(self.alpha), self.dim, rel_tol=1e-12):
                raise ValueError("homogeneous exponents must sum to the dimension")

    @property
    def antisymmetric(self) -> bool:
        return self.kind in ("hilbert", "dini", "hormander")

    @property
    def c_n(self) -> float:
        """The annular geometry constant |x-x'|/|x-y| <= c_n 2^-m."""
        return 2.0 * math.sqrt(self.dim)

    def omega(self, t: float) -> float:
        """Declared modulus of continuity."""
        if self.kind == "hilbert" or self.kind == "hormander":
            return t
        if self.kind == "dini":
            return t ** self.eta
        raise ValueError("homogeneous kernels carry no modulus")

    def kernel(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        if self.antisymmetric:
            with np.errstate(divide="ignore"):
                return 1.0 / (x - y)
        out = np.ones(np.broadcast_shapes(np.shape(x), np.shape(y)))
        with np.errstate(divide="ignore"):
            for ai, al in zip(self.a, self.alpha):
                out = out * np.abs(x - ai * y) ** (-al)
        return out


def apply_operator(T: KernelOperator, f: GridFunction) -> GridFunction:
    """Midpoint-rule Tf on the cells of f's domain."""
    if f.dim != T.dim:
        raise GridError("operator and function dimensions differ")
    x = f.cell_centers()
    y = x
    h = f.cell_width
    if T.antisymmetric:
        K = T.kernel(x[:, None], y[None, :])
        np.fill_diagonal(K, 0.0)  # the principal value on a symmetric grid
        return f.with_values(K @ f.values * h)
    # homogeneous: detect exact singular alignments x_i = a_k y_j and move
    # those evaluation points by half a cell
    X, Y = x[:, None], y[None, :]
    out = np.ones((x.size, y.size))
    for ai, al in zip(T.a, T.alpha):
        diff = np.abs(X - ai * Y)
        aligned = diff < 1e-12 * h
        if np.any(aligned):
            shifted = np.abs((X + 0.5 * h) - ai * Y)
            diff = np.where(aligned, shifted, diff)
        out *= diff ** (-al)
    return f.with_values(out @ f.values * h)


# ---------------------------------------------------------------------------
# Lambda sequences (annular kernel-smoothness budgets)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LambdaSequence:
    values: tuple
    provenance: str          # 'analytic' | 'numeric'
    tail_bound: float        # geometric estimate of the mass beyond the cutoff

    def weighted_sum(self, exponent_base: float = 1.0) -> float:
        """sum lambda_m * base^m, plus the reported tail."""
        return float(sum(lam * exponent_base ** (m + 1)
                         for m, lam in enumerate(self.values))) + self.tail_bound


def lambda_sequence(T: KernelOperator, Q: GridCube, f: GridFunction, r: float = 1.0,
                    M: int | None = None, samples: int = 4) -> LambdaSequence:
    """lambda_m for m = 1..M: analytic omega(c_n/2^m) for Dini-type kernels,
    numeric annular L^{r'} differences for Hörmander kernels."""
    M = T.padding_levels if M is None else M
    if M > T.padding_levels:
        raise GridError(f"requested {M} annuli but the padding allows {T.padding_levels}")
    if T.kind in ("hilbert", "dini"):
        vals = tuple(T.omega(T.c_n / 2.0 ** m) for m in range(1, M + 1))
        ratio = vals[-1] / vals[-2] if len(vals) > 1 and vals[-2] > 0 else 0.5
        tail = vals[-1] * ratio / (1 - ratio) if ratio < 1 else math.inf
        return LambdaSequence(vals, "analytic", tail)
    if T.kind != "hormander":
        raise ValueError("lambda sequences are defined for singular integral kernels")
    rp = r / (r - 1.0) if r > 1 else math.inf
    Q = _as_grid_cube(Q, f)
    h = f.cell_width
    lo = f.domain.origin[0] + Q.offset[0] * h
    side = Q.side * h
    center = lo + side / 2.0
    us = np.linspace(lo + h / 2, lo + side - h / 2, samples)
    vals = []
    for m in range(1, M + 1):
        big = side * 2.0 ** (m + 1)
        inner = side * 2.0 ** m
        n_cells = max(int(round(big / h)), 2)
        y = center - big / 2.0 + (np.arange(n_cells) + 0.5) * h
        annulus = np.abs(y - center) >= inner / 2.0
        best = 0.0
        for i in range(len(us)):
            for j in range(i + 1, len(us)):
                with np.errstate(invalid="ignore"):
                    diff = np.abs(T.kernel(us[i], y) - T.kernel(us[j], y)) * annulus
                diff = np.nan_to_num(diff, nan=0.0)
                if math.isinf(rp):
                    norm = float(np.max(diff))
                else:
                    norm = float(np.mean(diff ** rp) ** (1.0 / rp))
                best = max(best, big * norm)
        vals.append(best)
    ratio = vals[-1] / vals[-2] if len(vals) > 1 and vals[-2] > 0 else 0.5
    tail = vals[-1] * ratio / (1 - ratio) if ratio < 1 else math.inf
    return LambdaSequence(tuple(vals), "numeric", tail)


# ---------------------------------------------------------------------------
# Padded maximal field for arguments a_i^{-1} y outside the root cube
# ---------------------------------------------------------------------------


def padded_maximal_field(f: GridFunction, pad_factor: int = 2,
                         mode: str = "auto") -> tuple[np.ndarray, "np.ndarray"]:
    """(Mf on the zero-extended padded grid, padded cell centers)."""
    n = f.n
    total = (2 * pad_factor - 1) * n
    vals = np.zeros(total)
    start = (pad_factor - 1) * n
    vals[start:start + n] = f.values
    # work directly on the padded cell array: the maximal field only needs
    # the values and a uniform cell width, not a power-of-two length
    mode = "grid-aligned" if mode == "auto" else mode
    centers = (f.domain.origin[0] - (pad_factor - 1) * f.domain.side
               + (np.arange(total) + 0.5) * f.cell_width)
    field = _hl_field_raw(np.abs(vals), mode)
    return field, centers


def _hl_field_raw(vals: np.ndarray, mode: str) -> np.ndarray:
    from .maximal import _causal_max

    n = vals.size
    c = np.concatenate([[0.0], np.cumsum(vals)])
    out = np.zeros(n)
    for s in range(1, n + 1):
        avg = (c[s:] - c[:-s]) / s
        ext = np.concatenate([avg, np.full(s - 1, -np.inf)])
        out = np.maximum(out, _causal_max(ext, s))
    return out


# ---------------------------------------------------------------------------
# Pointwise domination ratio fields
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RatioField:
    lhs: np.ndarray
    rhs: np.ndarray
    ratio: np.ndarray
    sup_ratio: float
    arg_sup: tuple


def _ratio_field(lhs: np.ndarray, rhs: np.ndarray) -> RatioField:
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(lhs == 0.0, 0.0, lhs / rhs)
    ratio = np.nan_to_num(ratio, nan=0.0, posinf=np.inf)
    flat = int(np.argmax(ratio))
    arg = np.unravel_index(flat, ratio.shape)
    return RatioField(lhs, rhs, ratio, float(ratio.reshape(-1)[flat]),
                      tuple(int(i) for i in arg))


def pointwise_domination(T: KernelOperator, f: GridFunction, q0=None,
                         s: float = 0.125, variant: str = "thm41", r: float = 2.0,
                         cube_mode: str = "auto", rhs_kind: str = "m_r",
                         A=None) -> RatioField:
    """LHS = M#_{0,s,q0}(Tf); RHS per variant:

    * thm41: sup-inf of M_r f (``rhs_kind='m_sharp_r'`` switches to the
      zero-mean-kernel variant with M#_r, reported separately),
    * thm43: sup-inf of the Orlicz maximal M_{conj A} f,
    * thm44: sum_i M f(a_i^{-1} x) on a padded grid.
    """
    q0 = f.full_cube() if q0 is None else _as_grid_cube(q0, f)
    mode = resolve_cube_mode(f.dim, q0.side, cube_mode)
    Tf = apply_operator(T, f)
    lhs = local_sharp_field(Tf, q0, s, mode)
    if variant == "thm41":
        if rhs_kind == "m_r":
            inner = hl_maximal_field(f, q0, r, mode)
        elif rhs_kind == "m_sharp_r":
            from .maximal import sharp_maximal_field

            inner = sharp_maximal_field(f, q0, p=r, mode=mode)
        else:
            raise ValueError(f"unknown rhs_kind {rhs_kind!r}")
        rhs = sup_inf_field(inner, q0, f.dim, mode)
    elif variant == "thm43":
        from .young import conjugate

        if A is None:
            A = T.young
        if A is None:
            raise ValueError("thm43 needs the Hörmander Young function")
        inner = orlicz_maximal_field(f, q0, conjugate(A), 0.0, mode)
        rhs = sup_inf_field(inner, q0, f.dim, mode)
    elif variant == "thm44":
        if T.kind != "homogeneous":
            raise ValueError("thm44 applies to homogeneous kernels")
        pad = max(2, int(math.ceil(max(1.0 / abs(ai) for ai in T.a))) + 1)
        field, centers = padded_maximal_field(f, pad_factor=pad, mode=mode)
        x = f.cell_centers()
        rhs = np.zeros(f.n)
        for ai in T.a:
            pts = x / ai
            idx = np.clip(np.searchsorted(centers, pts), 0, centers.size - 1)
            rhs += field[idx]
    else:
        raise ValueError(f"unknown variant {variant!r}")
    return _ratio_field(lhs, rhs)


# ---------------------------------------------------------------------------
# Sublinear envelope certification (the Morrey-space operator class)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EnvelopeReport:
    factors: np.ndarray      # |Sf(x)| / envelope(x) per cell of q
    max_factor: float
    holds: bool              # max_factor <= 1


def sublinear_envelope(S: str | KernelOperator, f: GridFunction, q) -> EnvelopeReport:
    """Certify |Sf(x)| <= int |f(y)| / |x-y|^n dy for x in q, f supported
    away from the doubled cube 2q."""
    q = _as_grid_cube(q, f)
    n = f.n
    grow = q.side // 2 + (q.side % 2)
    lo = q.offset[0] - grow
    hi = q.offset[0] + q.side + grow
    support = np.flatnonzero(f.values != 0.0)
    inside = support[(support >= lo) & (support < hi)]
    if inside.size:
        raise GridError(
            f"support of f meets the doubled cube (cells {inside[:4].tolist()}...); "
            "the envelope bound needs supp(f) outside 2q")
    x = f.cell_centers()
    h = f.cell_width
    if isinstance(S, KernelOperator):
        Sf = apply_operator(S, f).values
    elif S == "maximal":
        Sf = hl_maximal_field(f, r=1.0)
    else:
        raise ValueError(f"unknown sublinear operator tag {S!r}")
    cells_q = np.arange(q.offset[0], q.offset[0] + q.side)
    factors = np.zeros(q.side)
    for i, cx in enumerate(cells_q):
        envelope = float(np.sum(np.abs(f.values[support]) * h
                                / np.abs(x[cx] - x[support]) ** f.dim))
        got = abs(float(Sf[cx]))
        factors[i] = 0.0 if got == 0 else (math.inf if envelope == 0 else got / envelope)
    mx = float(np.max(factors)) if factors.size else 0.0
    return EnvelopeReport(factors, mx, mx <= 1.0 + 1e-9)


# ---------------------------------------------------------------------------
# config (External Interfaces)
# ---------------------------------------------------------------------------


def operator_from_config(doc: dict) -> KernelOperator:
    """{"kind": ..., "eta": float, "a": [...], "alpha": [...], "padding": int}"""
    kind = doc.get("kind")
    kwargs = {"kind": kind}
    if "eta" in doc:
        kwargs["eta"] = float(doc["eta"])
    if "a" in doc:
        kwargs["a"] = tuple(float(x) for x in doc["a"])
    if "alpha" in doc:
        kwargs["alpha"] = tuple(float(x) for x in doc["alpha"])
    if "padding" in doc:
        kwargs["padding_levels"] = int(doc["padding"])
    if "young" in doc:
        from .young import young_from_config

        kwargs["young"] = young_from_config(doc["young"])
    return KernelOperator(**kwargs)
