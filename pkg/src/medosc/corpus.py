"""Deterministic corpus generation for the verification suites.

A corpus spec is a list of generator entries, each a dict with a ``generator``
tag and parameters.  Generation is deterministic given (seed, entry order):
the RNG for case i of an entry is seeded by (seed, entry index, i), so cases
can be produced independently and in any order.

Generators:

* ``random-uniform``  i.i.d. cell values on [low, high]
* ``trig``            random trigonometric polynomial sampled at cell centers
* ``step``            random piecewise-constant function with a few jumps
* ``spike``           one tall cell on a small background (fixed or random
                      position/height)
* ``binary-exhaustive``  all 2^(2^L) 0/1 functions (1D, L <= 3)
* ``power-weight``    |x - center|^a
* ``geometric-decay`` w_i = 2^-i
* ``fujii-pair``      the two-weight example pair on [-2, 2):
                      w = 0 on (0,1) else 1, v = 0 on (1/3, 2/3) else 1
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import Domain, GridFunction, Weight, unit_domain

__all__ = ["Case", "generate_corpus", "fujii_pair", "power_weight", "GENERATORS"]


@dataclass(frozen=True)
class Case:
    generator: str
    index: int
    f: GridFunction
    aux: GridFunction | None = None   # second member for pair generators

    @property
    def case_id(self) -> str:
        return f"{self.generator}-{self.index}"


def _domain_of(entry: dict, dim: int) -> Domain:
    dom = entry.get("domain")
    if dom is None:
        return unit_domain(dim)
    return Domain(tuple(float(x) for x in dom["origin"]), float(dom["side"]))


def _centers(level: int, domain: Domain) -> np.ndarray:
    n = 2 ** level
    return domain.origin[0] + (np.arange(n) + 0.5) * domain.side / n


def power_weight(a: float, level: int, domain: Domain | None = None,
                 center: float | None = None) -> Weight:
    domain = domain or unit_domain(1)
    if center is None:
        center = domain.origin[0] + domain.side / 2.0
    x = _centers(level, domain)
    return Weight(1, level, np.abs(x - center) ** a, domain)


def fujii_pair(level: int) -> tuple[Weight, Weight]:
    """w = 0 exactly on the cells inside (0,1), v = 0 on those inside (1/3, 2/3)."""
    dom = Domain((-2.0,), 4.0)
    n = 2 ** level
    h = 4.0 / n
    lo = -2.0 + h * np.arange(n)
    hi = lo + h
    w = np.where((lo >= 0.0) & (hi <= 1.0), 0.0, 1.0)
    v = np.where((lo >= 1.0 / 3.0) & (hi <= 2.0 / 3.0), 0.0, 1.0)
    return Weight(1, level, w, dom), Weight(1, level, v, dom)


def _gen_random_uniform(rng, level, dim, entry, domain):
    n_vals = (2 ** level) ** dim
    lo, hi = entry.get("low", -1.0), entry.get("high", 1.0)
    return GridFunction(dim, level, rng.uniform(lo, hi, n_vals), domain)


def _gen_trig(rng, level, dim, entry, domain):
    if dim != 1:
        raise ValueError("trig generator is 1D")
    x = (_centers(level, domain) - domain.origin[0]) / domain.side
    kmax = entry.get("kmax", 5)
    v = np.zeros(x.size)
    for k in range(1, kmax + 1):
        v += rng.normal() / k * np.cos(2 * np.pi * k * x)
        v += rng.normal() / k * np.sin(2 * np.pi * k * x)
    return GridFunction(dim, level, v, domain)


def _gen_step(rng, level, dim, entry, domain):
    # breakpoints are drawn as continuum positions so that the same case is
    # the same function across refinement levels
    if dim != 1:
        raise ValueError("step generator is 1D")
    n = 2 ** level
    k = int(rng.integers(2, entry.get("max_jumps", 8)))
    pos = np.sort(rng.uniform(0.0, 1.0, k))
    bp = np.unique(np.clip((pos * n).astype(int), 1, n - 1))
    levels = rng.normal(0.0, 1.0, k + 1) * rng.uniform(0.5, 5.0)
    v = np.zeros(n)
    prev = 0
    for b, lev in zip(list(bp) + [n], levels):
        v[prev:b] = lev
        prev = b
    return GridFunction(dim, level, v, domain)


def _gen_spike(rng, level, dim, entry, domain):
    if dim != 1:
        raise ValueError("spike generator is 1D")
    n = 2 ** level
    cell = entry.get("cell")
    height = entry.get("height")
    noise = entry.get("noise", 0.0)
    u = rng.uniform(0.0, 1.0)                  # continuum spike position
    hgt = float(rng.uniform(2.0, 20.0) * rng.choice([-1.0, 1.0])) if height is None \
        else float(height)
    v = rng.normal(0.0, noise, n) if noise else np.zeros(n)
    c = min(int(u * n), n - 1) if cell is None else int(cell)
    v[c] += hgt
    return GridFunction(dim, level, v, domain)


def _gen_geometric(rng, level, dim, entry, domain):
    n = (2 ** level) ** dim
    return GridFunction(dim, level, 2.0 ** -np.arange(n, dtype=float), domain)


GENERATORS = {
    "random-uniform": _gen_random_uniform,
    "trig": _gen_trig,
    "step": _gen_step,
    "spike": _gen_spike,
    "geometric-decay": _gen_geometric,
}


def generate_corpus(spec: list, level: int, seed: int, dim: int = 1) -> list[Case]:
    """Instantiate every entry of the corpus spec at the given level."""
    cases: list[Case] = []
    for e_idx, entry in enumerate(spec):
        tag = entry.get("generator")
        domain = _domain_of(entry, dim)
        if tag == "binary-exhaustive":
            if dim != 1 or level > 3:
                raise ValueError("binary-exhaustive supports dim=1, L <= 3")
            n = 2 ** level
            for bits in range(2 ** n):
                vals = [(bits >> i) & 1 for i in range(n)]
                cases.append(Case(tag, bits, GridFunction(1, level, vals, domain)))
        elif tag == "fujii-pair":
            w, v = fujii_pair(level)
            cases.append(Case(tag, 0, w, aux=v))
        elif tag == "power-weight":
            a = float(entry["a"])
            cases.append(Case(f"{tag}:{a}", 0,
                              power_weight(a, level, domain, entry.get("center"))))
        elif tag in GENERATORS:
            count = int(entry.get("count", 1))
            for i in range(count):
                rng = np.random.default_rng([seed, e_idx, i])
                cases.append(Case(tag, i, GENERATORS[tag](rng, level, dim, entry, domain)))
        else:
            raise ValueError(
                f"unknown generator {tag!r}; known: "
                f"{sorted(GENERATORS) + ['binary-exhaustive', 'fujii-pair', 'power-weight']}")
    return cases
