"""Config-driven inequality suites.

Every suite computes an LHS and an RHS functional per corpus case at each
requested refinement level, aggregates the per-level sup of LHS/RHS, and
classifies the level-to-level growth.  PASS means: every sup ratio is finite
and each growth factor stays below the configured threshold (default 1.25).
Suites for exact combinatorial statements (thm2.1) count violations instead.
Negative controls are expected to FAIL in the growing direction; the verdict
is reported, the caller decides what FAIL means.

The 0/0 convention is global: a case with LHS = RHS = 0 contributes ratio 0
and is counted separately in the report.

Hypothesis gates run before any computation: a config violating its
theorem's parameter requirements raises ConfigError rather than producing a
report.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import corpus as corpus_mod
from . import medians
from .decomposition import decompose, measure_decay, verify_pointwise_bound
from .grid import Domain, GridCube, GridFunction, Weight
from .maximal import (
    build_table,
    hl_maximal_field,
    iterated_maximal_field,
    local_sharp_field,
    orlicz_maximal_field,
    resolve_cube_mode,
    sharp_maximal_field,
)
from .operators import KernelOperator, apply_operator, pointwise_domination
from .weights import (
    condition_f_estimate,
    morrey_norm,
    campanato_norm,
    power_phi,
    two_weight_bump_check,
    wp_estimate,
)
from .young import YoungFunction, bp_diagnostics, conjugate, young_from_config

__all__ = [
    "ConfigError",
    "SuiteConfig",
    "VerificationReport",
    "run_suite",
    "estimate_constant",
    "SUITE_IDS",
    "GENERATOR_TAGS",
]


class ConfigError(ValueError):
    """A suite config that violates its theorem's hypotheses."""


# ---------------------------------------------------------------------------
# Config and report containers
# ---------------------------------------------------------------------------


@dataclass
class SuiteConfig:
    suite: str
    levels: tuple = ()
    corpus: tuple = ()              # corpus spec entries (dicts)
    seed: int = 0
    t: float = 0.5
    s: float = 0.125
    p: float | None = None
    q: float | None = None
    r: float | None = None
    beta: float = 0.75
    slack: float = 2.0
    growth_threshold: float = 1.25
    cube_mode: str = "auto"
    weight: dict = field(default_factory=dict)
    phi: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)

    def echo(self) -> dict:
        doc = {
            "suite": self.suite, "levels": list(self.levels),
            "corpus": list(self.corpus), "seed": self.seed,
            "t": self.t, "s": self.s, "p": self.p, "q": self.q, "r": self.r,
            "beta": self.beta, "slack": self.slack,
            "growth_threshold": self.growth_threshold,
            "cube_mode": self.cube_mode, "weight": self.weight,
            "phi": self.phi, "params": self.params,
        }
        return doc


@dataclass(frozen=True)
class CaseRecord:
    level: int
    case_id: str
    generator: str
    input_hash: str
    lhs: float
    rhs: float
    ratio: float


@dataclass
class VerificationReport:
    suite: str
    config: dict
    records: list
    sup_ratios: dict              # level -> sup ratio
    growth_factors: list
    verdict: str                  # PASS | FAIL
    violations: list
    zero_zero: int
    notes: list

    def to_csv(self) -> str:
        lines = ["suite,level,case_id,generator,lhs,rhs,ratio"]
        for rec in self.records:
            lines.append(
                f"{self.suite},{rec.level},{rec.case_id},{rec.generator},"
                f"{rec.lhs!r},{rec.rhs!r},{rec.ratio!r}")
        return "\n".join(lines) + "\n"

    def summary_dict(self) -> dict:
        return {
            "suite": self.suite,
            "config": self.config,
            "supRatio": {str(k): v for k, v in sorted(self.sup_ratios.items())},
            "growthFactors": self.growth_factors,
            "verdict": self.verdict,
            "violations": self.violations,
            "zeroZeroCases": self.zero_zero,
            "notes": self.notes,
            "records": [
                {"level": r.level, "case_id": r.case_id, "generator": r.generator,
                 "input_hash": r.input_hash, "lhs": r.lhs, "rhs": r.rhs,
                 "ratio": r.ratio}
                for r in self.records
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.summary_dict(), indent=2, sort_keys=True) + "\n"


def csv_from_summary(doc: dict) -> str:
    lines = ["suite,level,case_id,generator,lhs,rhs,ratio"]
    for rec in doc["records"]:
        lines.append(
            f"{doc['suite']},{rec['level']},{rec['case_id']},{rec['generator']},"
            f"{rec['lhs']!r},{rec['rhs']!r},{rec['ratio']!r}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Shared machinery
# ---------------------------------------------------------------------------


def _p(cfg, default=2.0):
    return float(cfg.p) if cfg.p is not None else float(default)


def _q(cfg, default=None):
    if cfg.q is not None:
        return float(cfg.q)
    return None if default is None else float(default)


def _r(cfg, default=2.0):
    return float(cfg.r) if cfg.r is not None else float(default)


def _hash_values(f: GridFunction) -> str:
    return hashlib.sha1(f.values.tobytes()).hexdigest()[:12]


def _ratio(lhs: float, rhs: float) -> float:
    if lhs == 0.0:
        return 0.0
    if rhs == 0.0:
        return math.inf
    return lhs / rhs


def weighted_integral(vals: np.ndarray, w_vals: np.ndarray, cell_volume: float) -> float:
    return float(np.sum(vals * w_vals)) * cell_volume


def estimate_constant(lhs_fn, rhs_fn, cases) -> tuple[float, str, list]:
    """Generic sup-ratio engine: returns (constant, witness case id, ratios).
    RHS = 0 with LHS > 0 yields an infinite constant with the witness."""
    best, witness = 0.0, ""
    ratios = []
    for case in cases:
        lhs, rhs = float(lhs_fn(case)), float(rhs_fn(case))
        r = _ratio(lhs, rhs)
        ratios.append(r)
        if r > best:
            best, witness = r, case.case_id
    return best, witness, ratios


def _finish(cfg: SuiteConfig, records, violations, notes, exact: bool = False) -> VerificationReport:
    sup_ratios = {}
    zero_zero = 0
    for rec in records:
        if rec.lhs == 0.0 and rec.rhs == 0.0:
            zero_zero += 1
        sup_ratios[rec.level] = max(sup_ratios.get(rec.level, 0.0), rec.ratio)
    levels = sorted(sup_ratios)
    growth = []
    for a, b in zip(levels, levels[1:]):
        lo, hi = sup_ratios[a], sup_ratios[b]
        growth.append(math.inf if lo == 0 and hi > 0 else (hi / lo if lo else 0.0))
    if exact:
        verdict = "PASS" if not violations else "FAIL"
    else:
        finite = all(math.isfinite(v) for v in sup_ratios.values())
        trending = all(g < cfg.growth_threshold for g in growth)
        verdict = "PASS" if finite and trending and not violations else "FAIL"
    return VerificationReport(cfg.suite, cfg.echo(), list(records), sup_ratios,
                              growth, verdict, list(violations), zero_zero,
                              list(notes))


def _corpus(cfg: SuiteConfig, level: int, default: list, domain: dict | None = None):
    spec = list(cfg.corpus) if cfg.corpus else list(default)
    if domain is not None:
        spec = [dict(e, domain=e.get("domain", domain)) for e in spec]
    return corpus_mod.generate_corpus(spec, level, cfg.seed)


DEFAULT_MIX = (
    {"generator": "random-uniform", "count": 6},
    {"generator": "step", "count": 5},
    {"generator": "spike", "count": 3, "noise": 0.05},
    {"generator": "trig", "count": 2},
)


def _weight_for(cfg: SuiteConfig, level: int):
    """Weight (or pair) from the config's weight spec."""
    spec = cfg.weight or {"kind": "power", "a": 0.5}
    kind = spec.get("kind")
    if kind == "const":
        n = 2 ** level
        return Weight(1, level, np.full(n, float(spec.get("value", 1.0))))
    if kind == "power":
        dom = None
        if "domain" in spec:
            dom = Domain(tuple(spec["domain"]["origin"]), float(spec["domain"]["side"]))
        return corpus_mod.power_weight(float(spec["a"]), level, dom, spec.get("center"))
    if kind == "geometric":
        n = 2 ** level
        return Weight(1, level, 2.0 ** -np.arange(n, dtype=float))
    if kind == "fujii":
        return corpus_mod.fujii_pair(level)
    raise ConfigError(f"unknown weight spec {spec!r}")


def _phi_for(cfg: SuiteConfig, default: dict):
    doc = cfg.phi or default
    if doc.get("family") == "concave-sqrt":
        # sqrt(t(1+t)): concave, vanishing at 0, asymptotically linear
        def phi(x):
            x = np.asarray(x, dtype=float)
            return np.sqrt(x * (1.0 + x))
        phi.doubling = 2.0
        phi.concave = True
        return phi
    if doc.get("family") == "identity":
        def phi(x):
            return np.asarray(x, dtype=float)
        phi.doubling = 2.0
        phi.concave = True
        return phi
    A = young_from_config(doc)
    def phi(x):  # noqa: E306
        return A(np.asarray(x, dtype=float))
    phi.doubling = A.doubling_constant()
    phi.concave = False
    phi.young = A
    return phi


def _operator_for(cfg: SuiteConfig) -> KernelOperator:
    doc = cfg.params.get("operator")
    if doc:
        from .operators import operator_from_config

        return operator_from_config(doc)
    return KernelOperator("hilbert")


def _median_centered(Tf: GridFunction, t: float) -> np.ndarray:
    med = medians.maximal_median(Tf, t, Tf.full_cube())
    return np.abs(Tf.values - med)


# ---------------------------------------------------------------------------
# Suite runners
# ---------------------------------------------------------------------------


def _suite_thm21(cfg: SuiteConfig) -> VerificationReport:
    """Exact decomposition properties (ii)-(iv) plus the pointwise bound (i)."""
    variant = cfg.params.get("variant", "base")
    records, violations, notes = [], [], []
    notes.append(f"variant={variant}, c1={4 if variant != 'refined' else 8}, "
                 f"slack={cfg.slack}")
    for level in cfg.levels:
        default = [{"generator": "binary-exhaustive"}] if level <= 3 else list(DEFAULT_MIX)
        for case in _corpus(cfg, level, default):
            f = case.f
            res = decompose(f, t=cfg.t, s=cfg.s, variant=variant,
                            cube_mode=cfg.cube_mode)
            decay = measure_decay(res, f)
            bound = cfg.s / (1.0 - cfg.t)
            if variant in ("base", "annular"):
                if decay.max_ratio > bound + 1e-12:
                    violations.append(f"{case.case_id}@L{level}: (iv) ratio "
                                      f"{decay.max_ratio} > {bound}")
                if decay.max_generalized_ratio > 1 + 1e-12:
                    violations.append(f"{case.case_id}@L{level}: (2.14) violated")
            rep = verify_pointwise_bound(f, res, slack=cfg.slack)
            if rep.pointwise_violations:
                violations.append(f"{case.case_id}@L{level}: pointwise (i) violated "
                                  f"at {rep.pointwise_violations[:3]}")
            if rep.coeff_violations:
                violations.append(f"{case.case_id}@L{level}: coefficient bound "
                                  f"violated at {rep.coeff_violations[:3]}")
            masks = res.omega_masks(f)
            for v in range(1, len(masks)):
                if np.any(masks[v] & ~masks[v - 1]):
                    violations.append(f"{case.case_id}@L{level}: (iii) violated")
            records.append(CaseRecord(level, case.case_id, case.generator,
                                      _hash_values(f), rep.worst_pointwise_ratio, 1.0,
                                      rep.worst_pointwise_ratio))
    return _finish(cfg, records, violations, notes, exact=True)


def _weighted_phi_suite(cfg, lhs_of, rhs_of, corpus_domain=None,
                        default_corpus=DEFAULT_MIX, gate=None):
    """Shared engine: per level, build context, evaluate the two functionals."""
    records, violations, notes = [], [], []
    for level in cfg.levels:
        ctx = {"level": level}
        if gate is not None:
            gate(cfg, level, ctx, notes)
        for case in _corpus(cfg, level, list(default_corpus), corpus_domain):
            lhs = float(lhs_of(cfg, case, ctx))
            rhs = float(rhs_of(cfg, case, ctx))
            records.append(CaseRecord(level, case.case_id, case.generator,
                                      _hash_values(case.f), lhs, rhs, _ratio(lhs, rhs)))
    return _finish(cfg, records, violations, notes)


def _suite_thm31(cfg: SuiteConfig) -> VerificationReport:
    pair = _weight_for(cfg if cfg.weight else
                       SuiteConfig(cfg.suite, weight={"kind": "fujii"}), cfg.levels[0])
    if not isinstance(pair, tuple):
        raise ConfigError("thm3.1 needs a weight pair (w, v); use the fujii pair "
                          "or pass weight={'kind': 'fujii'}")
    phi = _phi_for(cfg, {"family": "power", "p": 1.0})
    c0 = phi.doubling
    admissibility = c0 * (cfg.s / (1.0 - cfg.t)) ** cfg.beta
    if not admissibility < 1.0:
        raise ConfigError(
            f"(3.2) fails: c0 (s/(1-t))^beta = {admissibility:.4g} >= 1; "
            "raise beta or shrink s")
    domain = {"origin": [-2.0], "side": 4.0}

    def gate(cfg, level, ctx, notes):
        w, v = corpus_mod.fujii_pair(level)
        ctx["w"], ctx["v"] = w, v
        est = condition_f_estimate(w, v, beta=cfg.beta, seed=cfg.seed)
        notes.append(f"L{level}: condition-F c1_hat = {est.constant:.6g} "
                     f"(beta={cfg.beta}), admissibility {admissibility:.4g} < 1")

    def lhs_of(cfg, case, ctx):
        f = case.f
        w = ctx["w"]
        centered = _median_centered(f, cfg.t)
        return weighted_integral(phi(centered), w.values, f.cell_volume)

    def rhs_of(cfg, case, ctx):
        f = case.f
        v = ctx["v"]
        msharp = local_sharp_field(f, f.full_cube(), cfg.s, cfg.cube_mode)
        return weighted_integral(phi(msharp), v.values, f.cell_volume)

    return _weighted_phi_suite(cfg, lhs_of, rhs_of, corpus_domain=domain, gate=gate)


def _suite_thm32(cfg: SuiteConfig) -> VerificationReport:
    phi = _phi_for(cfg, {"family": "concave-sqrt"})
    if not getattr(phi, "concave", False):
        raise ConfigError("thm3.2 requires a concave Phi "
                          "(phi family 'concave-sqrt' or 'identity')")

    def gate(cfg, level, ctx, notes):
        w = _weight_for(cfg if cfg.weight else
                        SuiteConfig(cfg.suite, weight={"kind": "geometric"}), level)
        ctx["w"] = w
        ctx["Mw"] = hl_maximal_field(w, r=1.0, mode=cfg.cube_mode)
        notes.append(f"L{level}: arbitrary weight, v = Mw")

    def lhs_of(cfg, case, ctx):
        return weighted_integral(phi(_median_centered(case.f, cfg.t)),
                                 ctx["w"].values, case.f.cell_volume)

    def rhs_of(cfg, case, ctx):
        msharp = local_sharp_field(case.f, case.f.full_cube(), cfg.s, cfg.cube_mode)
        return weighted_integral(phi(msharp), ctx["Mw"], case.f.cell_volume)

    return _weighted_phi_suite(cfg, lhs_of, rhs_of, gate=gate)


def _domination_suite(cfg: SuiteConfig, variant: str, T=None) -> VerificationReport:
    T = T or _operator_for(cfg)
    rhs_kind = cfg.params.get("rhs_kind", "m_r")
    records, violations, notes = [], [], []
    r = _r(cfg, 2.0)
    notes.append(f"operator={T.kind}, variant={variant}, rhs_kind={rhs_kind}, "
                 f"r={r}, s={cfg.s}")
    for level in cfg.levels:
        notes.append(f"L{level}: cube mode "
                     f"{resolve_cube_mode(1, 2 ** level, cfg.cube_mode)}")
    for level in cfg.levels:
        for case in _corpus(cfg, level, list(DEFAULT_MIX)):
            out = pointwise_domination(T, case.f, s=cfg.s, variant=variant,
                                       r=r, cube_mode=cfg.cube_mode,
                                       rhs_kind=rhs_kind)
            lhs = float(np.max(out.lhs))
            rhs_at = float(out.rhs.reshape(-1)[int(np.argmax(out.ratio))])
            records.append(CaseRecord(level, case.case_id, case.generator,
                                      _hash_values(case.f), lhs, rhs_at,
                                      out.sup_ratio))
    return _finish(cfg, records, violations, notes)


def _suite_thm41(cfg):
    return _domination_suite(cfg, "thm41")


def _suite_thm43(cfg):
    r = _r(cfg, 2.0)
    rp = r / (r - 1.0)
    T = KernelOperator("hormander", young=YoungFunction.power(rp))
    return _domination_suite(cfg, "thm43", T)


def _suite_thm44(cfg):
    T = KernelOperator("homogeneous", a=(1.0, -1.0), alpha=(0.5, 0.5))
    cfg.params.setdefault("operator_note", "a=(1,-1), alpha=(1/2,1/2)")
    return _domination_suite(cfg, "thm44", T)


def _suite_thm51(cfg: SuiteConfig) -> VerificationReport:
    phi = _phi_for(cfg, {"family": "power", "p": 2.0})
    T = _operator_for(cfg)

    def gate(cfg, level, ctx, notes):
        w = _weight_for(cfg, level)
        if isinstance(w, tuple):
            ctx["w"], ctx["v"] = w
        else:
            ctx["w"] = ctx["v"] = w   # A_infinity weight: v = w
        notes.append(f"L{level}: M_T = M_{_r(cfg, 2.0)}")

    def lhs_of(cfg, case, ctx):
        Tf = apply_operator(T, case.f)
        return weighted_integral(phi(_median_centered(Tf, cfg.t)),
                                 ctx["w"].values, case.f.cell_volume)

    def rhs_of(cfg, case, ctx):
        mrf = hl_maximal_field(case.f, r=_r(cfg, 2.0), mode=cfg.cube_mode)
        return weighted_integral(phi(mrf), ctx["v"].values, case.f.cell_volume)

    dom = cfg.weight.get("domain") if cfg.weight else None
    return _weighted_phi_suite(cfg, lhs_of, rhs_of, corpus_domain=dom, gate=gate)


def _suite_thm52(cfg: SuiteConfig) -> VerificationReport:
    """(5.1) M#_p(Tf) <= c M_r f for p < r and (5.2) M#_r(Tf) <= c M_{L^r logL} f."""
    T = _operator_for(cfg)
    r = _r(cfg, 2.0)
    p_small = cfg.params.get("p_small", 1.0)
    if not p_small < r:
        raise ConfigError(f"(5.1) needs p < r, got p={p_small}, r={r}")
    records, violations, notes = [], [], []
    # M_{L^r log L} = M_C with C(t) = t^r log(1+t^r), via the power transform
    notes.append(f"p={p_small} < r={r}; M_(L^r logL) via C(t)=A1(t^r)")
    A1 = YoungFunction.powerlog(1.0, 1.0)
    for level in cfg.levels:
        for case in _corpus(cfg, level, list(DEFAULT_MIX)):
            f = case.f
            Tf = apply_operator(T, f)
            mrf = hl_maximal_field(f, r=r, mode=cfg.cube_mode)
            sharp_p = sharp_maximal_field(Tf, p=p_small, mode=cfg.cube_mode)
            sup1 = float(np.max(np.where(sharp_p == 0, 0.0,
                                         sharp_p / np.maximum(mrf, 1e-300))))
            records.append(CaseRecord(level, case.case_id + "/5.1", case.generator,
                                      _hash_values(f), float(np.max(sharp_p)),
                                      float(np.max(mrf)), sup1))
            sharp_r = sharp_maximal_field(Tf, p=r, mode=cfg.cube_mode)
            mllog_r = orlicz_maximal_field(
                f.with_values(np.abs(f.values) ** r), A=A1,
                mode=cfg.cube_mode) ** (1.0 / r)
            sup2 = float(np.max(np.where(sharp_r == 0, 0.0,
                                         sharp_r / np.maximum(mllog_r, 1e-300))))
            records.append(CaseRecord(level, case.case_id + "/5.2", case.generator,
                                      _hash_values(f), float(np.max(sharp_r)),
                                      float(np.max(mllog_r)), sup2))
    return _finish(cfg, records, violations, notes)


def _suite_thm53(cfg: SuiteConfig) -> VerificationReport:
    """(5.3): int Phi(Mf) w <= c int Phi(|f|) w iff w in A_p, p = 1/u_Phi."""
    phi = _phi_for(cfg, {"family": "power", "p": _p(cfg, 2.0)})

    def gate(cfg, level, ctx, notes):
        ctx["w"] = _weight_for(cfg, level)
        notes.append(f"L{level}: weight {cfg.weight or {'kind': 'power', 'a': 0.5}}")

    def lhs_of(cfg, case, ctx):
        mf = hl_maximal_field(case.f, r=1.0, mode=cfg.cube_mode)
        return weighted_integral(phi(mf), ctx["w"].values, case.f.cell_volume)

    def rhs_of(cfg, case, ctx):
        return weighted_integral(phi(np.abs(case.f.values)), ctx["w"].values,
                                 case.f.cell_volume)

    records, violations, notes = [], [], []
    for level in cfg.levels:
        ctx = {"level": level}
        gate(cfg, level, ctx, notes)
        n = 2 ** level
        spec = list(cfg.corpus) if cfg.corpus else (
            list(DEFAULT_MIX)
            + [{"generator": "spike", "cell": n // 2, "height": 10.0},
               {"generator": "spike", "cell": n // 2 - 1, "height": 10.0},
               {"generator": "spike", "cell": n // 4, "height": 10.0}])
        for case in corpus_mod.generate_corpus(spec, level, cfg.seed):
            lhs = float(lhs_of(cfg, case, ctx))
            rhs = float(rhs_of(cfg, case, ctx))
            records.append(CaseRecord(level, case.case_id, case.generator,
                                      _hash_values(case.f), lhs, rhs, _ratio(lhs, rhs)))
    return _finish(cfg, records, violations, notes)


def _suite_thm54(cfg: SuiteConfig) -> VerificationReport:
    """(5.4): int Phi(|Tf - m|) w <= c int Psi(|f|) Mv for condition-F (w,v)."""
    p = _p(cfg, 2.0)
    phi = _phi_for(cfg, {"family": "power", "p": p})
    if p <= 1:
        raise ConfigError("(5.4) power form needs p > 1 so that "
                          "int_0^t Phi(s)/s^2 ds <= c Psi(t)/t holds")
    T = _operator_for(cfg)
    domain = {"origin": [-2.0], "side": 4.0}

    def gate(cfg, level, ctx, notes):
        w, v = corpus_mod.fujii_pair(level)
        ctx["w"] = w
        ctx["Mv"] = hl_maximal_field(v, r=1.0, mode=cfg.cube_mode)
        notes.append(f"L{level}: Phi = Psi = t^{p}, (w,v) = Fujii pair")

    def lhs_of(cfg, case, ctx):
        Tf = apply_operator(T, case.f)
        return weighted_integral(phi(_median_centered(Tf, cfg.t)),
                                 ctx["w"].values, case.f.cell_volume)

    def rhs_of(cfg, case, ctx):
        return weighted_integral(phi(np.abs(case.f.values)), ctx["Mv"],
                                 case.f.cell_volume)

    return _weighted_phi_suite(cfg, lhs_of, rhs_of, corpus_domain=domain, gate=gate)


def _suite_thm55(cfg: SuiteConfig) -> VerificationReport:
    """Phi with u_Phi = 1/p, Psi(t) = Phi(t^(1/r)) convex, w in A_(p/r).

    Defaults keep the Phi power low (t^2, r = 3/2): the singular integral of
    a step function carries log peaks whose Phi-mass converges slowly under
    refinement when Phi grows fast, which only obscures the trend.
    """
    p_phi = cfg.params.get("phi_power", 2.0)
    r = cfg.params.get("r_inner", 1.5)
    if p_phi / r < 1.0:
        raise ConfigError("Psi(t) = Phi(t^(1/r)) must stay convex: need phi_power >= r")
    if not r < p_phi:
        raise ConfigError("the hypotheses need r < p = 1/u_Phi")
    phi = _phi_for(cfg, {"family": "power", "p": p_phi})
    T = _operator_for(cfg)

    def gate(cfg, level, ctx, notes):
        ctx["w"] = _weight_for(
            cfg if cfg.weight else SuiteConfig(cfg.suite, weight={"kind": "power", "a": 0.1}),
            level)
        notes.append(f"L{level}: Phi=t^{p_phi}, r={r}, w in A_(p/r)")

    def lhs_of(cfg, case, ctx):
        Tf = apply_operator(T, case.f)
        return weighted_integral(phi(_median_centered(Tf, cfg.t)),
                                 ctx["w"].values, case.f.cell_volume)

    def rhs_of(cfg, case, ctx):
        return weighted_integral(phi(np.abs(case.f.values)), ctx["w"].values,
                                 case.f.cell_volume)

    return _weighted_phi_suite(cfg, lhs_of, rhs_of, gate=gate)


def _suite_thm56(cfg: SuiteConfig) -> VerificationReport:
    """Bump form: A in B_p gate, LHS with condition-F (w,v), RHS with Mv."""
    A = young_from_config(cfg.params.get("A", {"family": "power", "p": 1.5}))
    p = _p(cfg, 2.0)
    verdict = bp_diagnostics(A, p)
    if verdict.in_class is False:
        raise ConfigError(f"A is not in B_{p} (tail exponent "
                          f"{verdict.tail_exponent:.3g})")
    phi = _phi_for(cfg, {"family": "power", "p": 2.5})
    T = _operator_for(cfg)
    domain = {"origin": [-2.0], "side": 4.0}

    def gate(cfg, level, ctx, notes):
        w, v = corpus_mod.fujii_pair(level)
        ctx["w"] = w
        ctx["Mv"] = hl_maximal_field(v, r=1.0, mode=cfg.cube_mode)
        notes.append(f"L{level}: A in B_{p} verified "
                     f"(tail exponent {verdict.tail_exponent:.3g})")

    def lhs_of(cfg, case, ctx):
        Tf = apply_operator(T, case.f)
        return weighted_integral(phi(_median_centered(Tf, cfg.t)),
                                 ctx["w"].values, case.f.cell_volume)

    def rhs_of(cfg, case, ctx):
        return weighted_integral(phi(np.abs(case.f.values)), ctx["Mv"],
                                 case.f.cell_volume)

    return _weighted_phi_suite(cfg, lhs_of, rhs_of, corpus_domain=domain, gate=gate)


def _suite_thm57(cfg: SuiteConfig) -> VerificationReport:
    """Homogeneous kernel, w(A_i x) <= c w(x): here symmetric w and a=(1,-1)."""
    T = KernelOperator("homogeneous", a=(1.0, -1.0), alpha=(0.5, 0.5))
    phi = _phi_for(cfg, {"family": "power", "p": 2.0})
    domain = {"origin": [-2.0], "side": 4.0}

    def gate(cfg, level, ctx, notes):
        dom = Domain((-2.0,), 4.0)
        ctx["w"] = corpus_mod.power_weight(0.5, level, dom, center=0.0)
        notes.append(f"L{level}: w = |x|^0.5 on [-2,2), symmetric so w(-x) = w(x)")

    def lhs_of(cfg, case, ctx):
        Tf = apply_operator(T, case.f)
        return weighted_integral(phi(_median_centered(Tf, cfg.t)),
                                 ctx["w"].values, case.f.cell_volume)

    def rhs_of(cfg, case, ctx):
        f = case.f
        total = 0.0
        for ai in T.a:
            # f(x / a_i) on the same grid: for a = +-1 this is f or its mirror
            vals = f.values if ai > 0 else f.values[::-1]
            total += weighted_integral(phi(np.abs(vals)), ctx["w"].values,
                                       f.cell_volume)
        return total

    return _weighted_phi_suite(cfg, lhs_of, rhs_of, corpus_domain=domain, gate=gate)


def _suite_thm62(cfg: SuiteConfig) -> VerificationReport:
    """(6.2): two-weight L^p bound for W_p weights (w = v power weight)."""
    T = _operator_for(cfg)

    def gate(cfg, level, ctx, notes):
        w = _weight_for(cfg, level)
        ctx["w"] = ctx["v"] = w
        if level == min(cfg.levels):
            est = wp_estimate(w, w, p=_p(cfg, 2.0), beta=cfg.beta, seed=cfg.seed)
            notes.append(f"W_p estimate at L{level}: {est.constant:.6g}")

    def lhs_of(cfg, case, ctx):
        Tf = apply_operator(T, case.f)
        return weighted_integral(_median_centered(Tf, cfg.t) ** _p(cfg, 2.0),
                                 ctx["w"].values, case.f.cell_volume)

    def rhs_of(cfg, case, ctx):
        return weighted_integral(np.abs(case.f.values) ** _p(cfg, 2.0),
                                 ctx["v"].values, case.f.cell_volume)

    return _weighted_phi_suite(cfg, lhs_of, rhs_of, gate=gate)


def _suite_thm64(cfg: SuiteConfig) -> VerificationReport:
    """(6.1): sup of m#_{Tf}(1-s, Q) over sandwiched cubes vs sup of avg |f|."""
    from .decomposition import _max_over_containing, _sharp_median_stat

    T = _operator_for(cfg)
    records, violations, notes = [], [], []
    notes.append("sandwich: Q0 contains Q contains Qc (Qc = middle quarter cube)")
    for level in cfg.levels:
        for case in _corpus(cfg, level, list(DEFAULT_MIX)):
            f = case.f
            Tf = apply_operator(T, f)
            n = f.n
            qc = GridCube((3 * n // 8,), max(n // 4, 1))
            mode = resolve_cube_mode(f.dim, n, cfg.cube_mode)
            sharp_table = build_table(Tf, f.full_cube(), mode,
                                      lambda win, side: _sharp_median_stat(win, cfg.s),
                                      needs_sorted=True)
            avg_table = build_table(f, f.full_cube(), mode,
                                    lambda win, side: np.abs(win).mean(axis=-1))
            lhs = _max_over_containing(sharp_table, qc)
            rhs = _max_over_containing(avg_table, qc)
            records.append(CaseRecord(level, case.case_id, case.generator,
                                      _hash_values(f), lhs, rhs, _ratio(lhs, rhs)))
    return _finish(cfg, records, violations, notes)


def _suite_thm66(cfg: SuiteConfig) -> VerificationReport:
    """(6.17): L^p_v -> L^q_w with the Orlicz bump condition (6.16)."""
    p = _p(cfg, 2.0)
    q = _q(cfg, p)
    r = _r(cfg, 1.0)
    if not (r < p <= q):
        raise ConfigError(f"needs r < p <= q, got r={r}, p={p}, q={q}")
    A = young_from_config(cfg.params.get("A", {"family": "power", "p": 2.2}))
    B = young_from_config(cfg.params.get("B", {"family": "power", "p": 2.2}))
    qr_conj = (q / r) / (q / r - 1.0)
    gate_a = bp_diagnostics(conjugate(A), qr_conj)
    if gate_a.in_class is False:
        raise ConfigError("conjugate(A) fails the B_{(q/r)'} gate")
    gate_b = bp_diagnostics(conjugate(B), p / r)
    if gate_b.in_class is False:
        raise ConfigError("conjugate(B) fails the B_{p/r} gate")
    T = _operator_for(cfg)

    def gate(cfg, level, ctx, notes):
        w = _weight_for(cfg, level)
        ctx["w"] = ctx["v"] = w
        if level == min(cfg.levels):
            sup, cube = two_weight_bump_check(
                w, w, p=p, q=q, r=r, A=A, B=B,
                w_exponent=cfg.params.get("w_exponent", "r/q"))
            notes.append(f"bump (6.16) sup at L{level}: {sup:.6g} "
                         f"(w exponent {cfg.params.get('w_exponent', 'r/q')})")
            lam_note = ("lambda_m = c_n 2^-m analytic; sum lambda_m 2^(m/q) "
                        f"finite for q={q} > 1")
            notes.append(lam_note)

    def lhs_of(cfg, case, ctx):
        Tf = apply_operator(T, case.f)
        val = weighted_integral(_median_centered(Tf, cfg.t) ** q,
                                ctx["w"].values, case.f.cell_volume)
        return val ** (1.0 / q)

    def rhs_of(cfg, case, ctx):
        val = weighted_integral(np.abs(case.f.values) ** p,
                                ctx["v"].values, case.f.cell_volume)
        return val ** (1.0 / p)

    return _weighted_phi_suite(cfg, lhs_of, rhs_of, gate=gate)


def _suite_thm71(cfg: SuiteConfig) -> VerificationReport:
    """Morrey-to-Morrey bound for the sublinear operators of Section 7 shape."""
    gamma = cfg.params.get("gamma", 0.5)
    Phi = young_from_config(cfg.phi or {"family": "power", "p": 2.0})
    phi_small = power_phi(gamma)

    def psi(center, l):
        return gamma * l ** gamma   # coupling (7.7) holds with constant 1

    op_tag = cfg.params.get("operator_tag", "maximal")
    T = KernelOperator("hilbert") if op_tag == "hilbert" else None

    def gate(cfg, level, ctx, notes):
        ctx["w"] = _weight_for(cfg, level)
        notes.append(f"L{level}: S = {op_tag}, phi = l^{gamma}, psi = {gamma} l^{gamma}; "
                     "coupling (7.7) = 1")

    def lhs_of(cfg, case, ctx):
        f = case.f
        if T is not None:
            Sf = apply_operator(T, f)
        else:
            Sf = f.with_values(hl_maximal_field(f, r=1.0, mode=cfg.cube_mode).reshape(-1))
        return morrey_norm(Sf, Phi, psi, ctx["w"], cube_mode=cfg.cube_mode)

    def rhs_of(cfg, case, ctx):
        return morrey_norm(case.f, Phi, phi_small, ctx["w"], cube_mode=cfg.cube_mode)

    return _weighted_phi_suite(cfg, lhs_of, rhs_of, gate=gate)


# ---------------------------------------------------------------------------
# The (1.x) family
# ---------------------------------------------------------------------------


def _integral_pair_suite(cfg, lhs_of, rhs_of, gate=None, note=None):
    records, violations, notes = [], [], []
    if note:
        notes.append(note)
    for level in cfg.levels:
        ctx = {"level": level}
        if gate is not None:
            gate(cfg, level, ctx, notes)
        for case in _corpus(cfg, level, list(DEFAULT_MIX)):
            lhs = float(lhs_of(cfg, case, ctx))
            rhs = float(rhs_of(cfg, case, ctx))
            records.append(CaseRecord(level, case.case_id, case.generator,
                                      _hash_values(case.f), lhs, rhs, _ratio(lhs, rhs)))
    return _finish(cfg, records, violations, notes)


def _hilbert_phi_weight_suite(cfg, rhs_field_of, note, phi_default=None):
    phi = _phi_for(cfg, phi_default or {"family": "power", "p": _p(cfg, 2.0)})
    T = KernelOperator("hilbert")

    def gate(cfg, level, ctx, notes):
        ctx["w"] = _weight_for(cfg, level)
        ctx.update(rhs_field_of(cfg, ctx["w"]))

    def lhs_of(cfg, case, ctx):
        Tf = apply_operator(T, case.f)
        return weighted_integral(phi(_median_centered(Tf, cfg.t)),
                                 ctx["w"].values, case.f.cell_volume)

    def rhs_of(cfg, case, ctx):
        return weighted_integral(phi(np.abs(case.f.values)), ctx["rhs_w"],
                                 case.f.cell_volume)

    return _integral_pair_suite(cfg, lhs_of, rhs_of, gate=gate, note=note)


def _suite_ineq_1_1(cfg):
    phi = _phi_for(cfg, {"family": "power", "p": 2.0})
    T = KernelOperator("hilbert")

    def gate(cfg, level, ctx, notes):
        ctx["w"] = _weight_for(cfg, level)

    def lhs_of(cfg, case, ctx):
        Tf = apply_operator(T, case.f)
        return weighted_integral(phi(_median_centered(Tf, cfg.t)),
                                 ctx["w"].values, case.f.cell_volume)

    def rhs_of(cfg, case, ctx):
        mf = hl_maximal_field(case.f, r=1.0, mode=cfg.cube_mode)
        return weighted_integral(phi(mf), ctx["w"].values, case.f.cell_volume)

    return _integral_pair_suite(cfg, lhs_of, rhs_of, gate=gate,
                                note="(1.1): A_inf weight, Phi condition C")


def _suite_ineq_1_2(cfg):
    return _hilbert_phi_weight_suite(
        cfg, lambda cfg, w: {"rhs_w": w.values},
        note=f"(1.2): w in A_{_p(cfg, 2.0)}")


def _suite_ineq_1_3(cfg):
    r = _r(cfg, 1.5)

    def fields(cfg, w):
        mr = iterated_maximal_field(
            w.with_values(np.abs(w.values) ** r), k=1, mode=cfg.cube_mode
        ) ** (1.0 / r)
        return {"rhs_w": mr}

    return _hilbert_phi_weight_suite(
        cfg, fields, note=f"(1.3): arbitrary weight, M_{r} w on the right")


def _pointwise_pair_suite(cfg, lhs_field, rhs_field, note):
    records, violations, notes = [], [], [note]
    T = KernelOperator("hilbert")
    for level in cfg.levels:
        for case in _corpus(cfg, level, list(DEFAULT_MIX)):
            f = case.f
            Tf = apply_operator(T, f)
            lhs = lhs_field(cfg, f, Tf)
            rhs = rhs_field(cfg, f, Tf)
            sup = float(np.max(np.where(lhs == 0, 0.0, lhs / np.maximum(rhs, 1e-300))))
            records.append(CaseRecord(level, case.case_id, case.generator,
                                      _hash_values(f), float(np.max(lhs)),
                                      float(np.max(rhs)), sup))
    return _finish(cfg, records, violations, notes)


def _suite_ineq_1_4(cfg):
    return _pointwise_pair_suite(
        cfg,
        lambda cfg, f, Tf: sharp_maximal_field(Tf, p=1.0, mode=cfg.cube_mode),
        lambda cfg, f, Tf: hl_maximal_field(f, r=_r(cfg, 2.0), mode=cfg.cube_mode),
        note=f"(1.4): M#(Tf) <= c M_{_r(cfg, 2.0)} f, fails at r = 1")


def _suite_ineq_1_5(cfg):
    return _pointwise_pair_suite(
        cfg,
        lambda cfg, f, Tf: local_sharp_field(Tf, Tf.full_cube(), cfg.s, cfg.cube_mode),
        lambda cfg, f, Tf: hl_maximal_field(f, r=1.0, mode=cfg.cube_mode),
        note="(1.5): M#_{0,s}(Tf) <= c Mf, the weak-type-preserving form")


def _suite_ineq_1_6(cfg):
    r = _r(cfg, 1.5)

    def fields(cfg, w):
        mr = iterated_maximal_field(
            w.with_values(np.abs(w.values) ** r), k=1, mode=cfg.cube_mode
        ) ** (1.0 / r)
        return {"rhs_w": mr}

    phi = _phi_for(cfg, {"family": "power", "p": 2.0})
    T = KernelOperator("hilbert")

    def gate(cfg, level, ctx, notes):
        ctx["w"] = _weight_for(cfg if cfg.weight else
                               SuiteConfig(cfg.suite, weight={"kind": "geometric"}),
                               level)
        ctx.update(fields(cfg, ctx["w"]))

    def lhs_of(cfg, case, ctx):
        Tf = apply_operator(T, case.f)
        return weighted_integral(phi(_median_centered(Tf, cfg.t)),
                                 ctx["w"].values, case.f.cell_volume)

    def rhs_of(cfg, case, ctx):
        mf = hl_maximal_field(case.f, r=1.0, mode=cfg.cube_mode)
        return weighted_integral(phi(mf), ctx["rhs_w"], case.f.cell_volume)

    return _integral_pair_suite(
        cfg, lhs_of, rhs_of, gate=gate,
        note="(1.6)/(1.7): (w, M_r w) satisfy condition F; the limit form is "
             "verified locally with the median-centered left side")


_suite_ineq_1_7 = _suite_ineq_1_6


def _suite_ineq_1_8(cfg):
    def fields(cfg, w):
        return {"rhs_w": hl_maximal_field(w, r=1.0, mode=cfg.cube_mode)}

    return _hilbert_phi_weight_suite(
        cfg, fields,
        note="(1.8): Psi = Phi = t^p, int_0^t Phi/s^2 <= c Phi(t)/t for p > 1")


def _suite_ineq_1_9(cfg):
    A1 = YoungFunction.powerlog(1.0, 1.0)
    return _pointwise_pair_suite(
        cfg,
        lambda cfg, f, Tf: sharp_maximal_field(Tf, p=1.0, mode=cfg.cube_mode),
        lambda cfg, f, Tf: orlicz_maximal_field(f, A=A1, mode=cfg.cube_mode),
        note="(1.9): M#(Tf) <= c M_{L logL} f")


def _suite_ineq_1_10(cfg):
    phi = _phi_for(cfg, {"family": "power", "p": 1.5})
    T = KernelOperator("hilbert")

    def gate(cfg, level, ctx, notes):
        ctx["w"] = _weight_for(cfg if cfg.weight else
                               SuiteConfig(cfg.suite, weight={"kind": "geometric"}),
                               level)
        ctx["Mw"] = hl_maximal_field(ctx["w"], r=1.0, mode=cfg.cube_mode)

    def lhs_of(cfg, case, ctx):
        Tf = apply_operator(T, case.f)
        sharp = sharp_maximal_field(Tf, p=1.0, mode=cfg.cube_mode)
        return weighted_integral(phi(sharp), ctx["w"].values, case.f.cell_volume)

    def rhs_of(cfg, case, ctx):
        return weighted_integral(phi(np.abs(case.f.values)), ctx["Mw"],
                                 case.f.cell_volume)

    return _integral_pair_suite(cfg, lhs_of, rhs_of, gate=gate,
                                note="(1.10): arbitrary weight, M#(Tf) on the left")


def _suite_ineq_1_11(cfg, iterations_short: bool = False) -> VerificationReport:
    """(1.11): |Tf|^p w against |f|^p M^([p]+1) w, with the adversarial
    point-mass weight and the dual-extremal f; the one-iteration-short
    variant is the sharpness negative control."""
    p = _p(cfg, 2.5)
    k_full = int(math.floor(p)) + 1
    k = k_full - 1 if iterations_short else k_full
    pp = p / (p - 1.0)
    T = KernelOperator("hilbert")
    # pin the cube family so the levels stay comparable across the sweep
    mode = cfg.cube_mode if cfg.cube_mode != "auto" else "grid-aligned"
    records, violations, notes = [], [], []
    notes.append(f"(1.11): p={p}, M^{k} w on the right "
                 f"({'one iteration short' if iterations_short else 'full'}), "
                 f"cube mode {mode}")
    for level in cfg.levels:
        n = 2 ** level
        w_vals = np.zeros(n)
        w_vals[0] = n            # unit mass at the leftmost cell
        w = GridFunction(1, level, w_vals)
        rho = iterated_maximal_field(w, k=k, mode=mode)
        # dual-extremal profile for the functional f -> Hf(x_0) against rho
        x = w.cell_centers()
        kernel = np.zeros(n)
        kernel[1:] = 1.0 / np.abs(x[0] - x[1:])
        f_vals = np.zeros(n)
        f_vals[1:] = (kernel[1:] / rho[1:]) ** (pp - 1.0)
        f = GridFunction(1, level, f_vals)
        Tf = apply_operator(T, f)
        lhs = weighted_integral(_median_centered(Tf, cfg.t) ** p, w.values,
                                f.cell_volume)
        rhs = weighted_integral(np.abs(f.values) ** p, rho, f.cell_volume)
        records.append(CaseRecord(level, "dual-extremal-0", "adversarial",
                                  _hash_values(f), lhs, rhs, _ratio(lhs, rhs)))
    report = _finish(cfg, records, violations, notes)
    if iterations_short:
        # The one-iteration-short divergence is a slow log power; the growth
        # threshold would miss it, so the sharpness control fails on any
        # strictly monotone increase across the level sweep.
        if report.growth_factors and all(g > 1.0 for g in report.growth_factors):
            report.verdict = "FAIL"
            report.notes.append("monotone ratio growth across all levels: the "
                                f"M^{k} majorant is too small (expected)")
    return report


def _suite_ineq_1_11_sharp(cfg):
    return _suite_ineq_1_11(cfg, iterations_short=True)


def _suite_ineq_1_12(cfg):
    Phi = young_from_config(cfg.phi or {"family": "power", "p": 2.0})
    gamma = cfg.params.get("gamma", 0.5)
    ph = power_phi(gamma)
    T = KernelOperator("hilbert")

    def gate(cfg, level, ctx, notes):
        ctx["w"] = _weight_for(cfg, level)

    def lhs_of(cfg, case, ctx):
        Tf = apply_operator(T, case.f)
        return campanato_norm(Tf, Phi, ph, ctx["w"], t=cfg.t, cube_mode=cfg.cube_mode)

    def rhs_of(cfg, case, ctx):
        f = case.f
        Mf = f.with_values(hl_maximal_field(f, r=1.0, mode=cfg.cube_mode).reshape(-1))
        return morrey_norm(Mf, Phi, ph, ctx["w"], cube_mode=cfg.cube_mode)

    return _integral_pair_suite(cfg, lhs_of, rhs_of, gate=gate,
                                note="(1.12): Campanato norm of Tf vs Morrey norm of Mf")


# ---------------------------------------------------------------------------
# Registry
# ---------------------------------------------------------------------------


_RUNNERS = {
    "thm2.1": _suite_thm21,
    "thm3.1": _suite_thm31,
    "thm3.2": _suite_thm32,
    "thm4.1": _suite_thm41,
    "thm4.3": _suite_thm43,
    "thm4.4": _suite_thm44,
    "thm5.1": _suite_thm51,
    "thm5.2": _suite_thm52,
    "thm5.3": _suite_thm53,
    "thm5.4": _suite_thm54,
    "thm5.5": _suite_thm55,
    "thm5.6": _suite_thm56,
    "thm5.7": _suite_thm57,
    "thm6.2": _suite_thm62,
    "thm6.4": _suite_thm64,
    "thm6.6": _suite_thm66,
    "thm7.1": _suite_thm71,
    "ineq1.1": _suite_ineq_1_1,
    "ineq1.2": _suite_ineq_1_2,
    "ineq1.3": _suite_ineq_1_3,
    "ineq1.4": _suite_ineq_1_4,
    "ineq1.5": _suite_ineq_1_5,
    "ineq1.6": _suite_ineq_1_6,
    "ineq1.7": _suite_ineq_1_7,
    "ineq1.8": _suite_ineq_1_8,
    "ineq1.9": _suite_ineq_1_9,
    "ineq1.10": _suite_ineq_1_10,
    "ineq1.11": _suite_ineq_1_11,
    "ineq1.11sharp": _suite_ineq_1_11_sharp,
    "ineq1.12": _suite_ineq_1_12,
}

SUITE_IDS = tuple(sorted(_RUNNERS))
GENERATOR_TAGS = tuple(sorted(corpus_mod.GENERATORS)
                       + ["binary-exhaustive", "fujii-pair", "power-weight"])

_DEFAULT_LEVELS = {
    "thm2.1": (3,),
    "thm3.1": (6, 7, 8),
    "thm4.1": (7, 8, 9),
    "thm5.7": (6, 7, 8),   # log-peak mass of the homogeneous kernel converges slowly
    "thm6.4": (6, 7, 8),
    "thm6.6": (5, 6),
    "thm7.1": (4, 5),
    "ineq1.11": (6, 7, 8, 9, 10),
    "ineq1.11sharp": (6, 7, 8, 9, 10),
    "ineq1.12": (4, 5),
}


def run_suite(config: SuiteConfig) -> VerificationReport:
    """Dispatch a suite id to its runner; unknown ids raise ConfigError."""
    if config.suite not in _RUNNERS:
        raise ConfigError(
            f"unknown suite {config.suite!r}; valid ids: {', '.join(SUITE_IDS)}")
    if not config.levels:
        config.levels = _DEFAULT_LEVELS.get(config.suite, (5, 6))
    return _RUNNERS[config.suite](config)
