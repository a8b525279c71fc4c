import numpy as np
import pytest

from medosc.corpus import generate_corpus, fujii_pair, power_weight
from medosc.grid import Domain


def test_binary_exhaustive_count():
    cases = generate_corpus([{"generator": "binary-exhaustive"}], level=3, seed=0)
    assert len(cases) == 256
    assert all(set(np.unique(c.f.values)) <= {0.0, 1.0} for c in cases)


def test_fujii_pair_zero_sets():
    w, v = fujii_pair(6)
    x = w.cell_centers()
    inside_w = (x > 0.0) & (x < 1.0)
    assert np.all(w.values[inside_w] == 0.0)
    assert np.all(w.values[~inside_w] == 1.0)
    inside_v = (x > 1 / 3) & (x < 2 / 3)
    # cells straddling the irrational-looking endpoints keep v = 1
    strictly_inside = (x - v.cell_width / 2 >= 1 / 3) & (x + v.cell_width / 2 <= 2 / 3)
    assert np.all(v.values[strictly_inside] == 0.0)
    assert np.all(v.values[~inside_v] == 1.0)
    assert w.domain == Domain((-2.0,), 4.0)


def test_spike_fixture():
    cases = generate_corpus(
        [{"generator": "spike", "height": 10.0, "cell": 0}], level=4, seed=0)
    f = cases[0].f
    assert f.values[0] == 10.0
    assert np.all(f.values[1:] == 0.0)


def test_determinism_and_level_consistency():
    spec = [{"generator": "spike", "count": 3, "noise": 0.05},
            {"generator": "step", "count": 2}]
    a = generate_corpus(spec, level=5, seed=7)
    b = generate_corpus(spec, level=5, seed=7)
    for ca, cb in zip(a, b):
        assert np.array_equal(ca.f.values, cb.f.values)
    # spike positions scale consistently between levels
    lo = generate_corpus(spec, level=5, seed=7)
    hi = generate_corpus(spec, level=7, seed=7)
    for ca, cb in zip(lo[:3], hi[:3]):
        pa = np.argmax(np.abs(ca.f.values)) / ca.f.n
        pb = np.argmax(np.abs(cb.f.values)) / cb.f.n
        assert abs(pa - pb) < 2 / ca.f.n


def test_unknown_generator_rejected():
    with pytest.raises(ValueError, match="unknown generator"):
        generate_corpus([{"generator": "mystery"}], level=3, seed=0)


def test_power_weight_no_singular_cell():
    w = power_weight(-1.5, 6)
    assert np.all(np.isfinite(w.values))


def test_geometric_decay():
    cases = generate_corpus([{"generator": "geometric-decay"}], level=3, seed=0)
    assert np.allclose(cases[0].f.values, 2.0 ** -np.arange(8))
