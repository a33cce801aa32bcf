import numpy as np
import pytest

import pbftest


def test_hand_value():
    g = np.array([[1.0, 0.5], [0.5, 1.0 / 3.0]])
    zeta, scaled = pbftest.pbf_statistic(g, [0, 1], "l2")
    assert zeta == pytest.approx(1.0 / 3.0, abs=1e-12)
    assert scaled == pytest.approx(1.0 / 6.0, abs=1e-12)


def test_fast_matches_oracle():
    rng = np.random.default_rng(3)
    for _ in range(20):
        rows = rng.normal(size=(9, 4))
        labels = list(rng.permutation([0] * 4 + [1] * 5))
        g = pbftest.gram(rows, repr="coeff")
        for phi in ("l2", "exp", "log"):
            fast, _ = pbftest.pbf_statistic(g, labels, phi)
            slow = pbftest.pbf_statistic_oracle(g, labels, phi)
            assert fast == pytest.approx(slow, rel=1e-10)


def test_gram_on_grid():
    t = np.linspace(0.0, 1.0, 2001)
    g = pbftest.gram(np.vstack([np.ones_like(t), t]), grid=list(t))
    assert g[0, 1] == pytest.approx(0.5, abs=1e-12)
    assert g[1, 1] == pytest.approx(1.0 / 3.0, abs=1e-6)


def test_two_sample_test_is_deterministic():
    rng = np.random.default_rng(0)
    x = rng.normal(size=(15, 30))
    y = rng.normal(size=(15, 30)) + 1.0
    a = pbftest.two_sample_test(x, y, phi="exp", B=199, seed=4)
    b = pbftest.two_sample_test(x, y, phi="exp", B=199, seed=4)
    assert a == b
    assert a["p_value"] == pytest.approx(1.0 / 200.0)
    same = pbftest.two_sample_test(x, x, B=49, seed=1)
    assert same["p_value"] == 1.0


def test_spectrum_and_limit_law():
    rows, labels, repr_, grid = pbftest.draw_scenario({"scenario": "ex1", "n": 20, "m": 20}, 0)
    assert repr_ == "grid"
    assert rows.shape == (40, len(grid))
    g = pbftest.gram(rows, grid=grid)
    eig = pbftest.spectrum_estimate(g, "l2")
    assert all(a >= b for a, b in zip(eig, eig[1:]))
    draws = pbftest.sample_limit_law(eig, 5000, seed=2)
    assert len(draws) == 5000
    assert np.mean(draws) == pytest.approx(sum(eig), rel=0.1)


def test_run_power_small():
    out = pbftest.run_power({"scenario": "ex4", "n": 15, "m": 15, "B": 49, "reps": 10,
                             "r": 3, "phi": ["l2", "exp"], "seed": 2})
    assert set(out) == {"l2", "exp"}
    assert out["l2"]["rate"] > 0.5


def test_errors():
    with pytest.raises(ValueError):
        pbftest.pbf_statistic(np.eye(2), [0, 0], "l2")
    with pytest.raises(ValueError):
        pbftest.pbf_statistic(np.eye(2), [0, 1], "cosine")
    with pytest.raises(ValueError):
        pbftest.run_power({"scenario": "ex42"})
