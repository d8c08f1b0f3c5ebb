import numpy as np
import pytest
from scipy.integrate import quad
from scipy.optimize import linear_sum_assignment
from scipy.stats import norm

from rdslab.measures import (
    EmpiricalMeasure,
    kantorovich_circle,
    kantorovich_gaussian,
    kantorovich_interval,
)
from rdslab.spaces import Circle, Interval

SP = Interval(0.0, 2.0)
CIRC = Circle()


def assignment_oracle_interval(xs, ys):
    """Optimal-matching cost for equal-weight atom sets (exact W1 oracle)."""
    cost = np.abs(np.subtract.outer(xs, ys))
    r, c = linear_sum_assignment(cost)
    return cost[r, c].sum() / len(xs)


def assignment_oracle_circle(xs, ys):
    d = np.abs(np.subtract.outer(xs, ys)) % 1.0
    cost = np.minimum(d, 1.0 - d)
    r, c = linear_sum_assignment(cost)
    return cost[r, c].sum() / len(xs)


class TestEmpiricalMeasure:
    def test_weight_validation(self):
        with pytest.raises(ValueError):
            EmpiricalMeasure(SP, [0.0, 1.0], [0.5, 0.6])
        with pytest.raises(ValueError):
            EmpiricalMeasure(SP, [0.0], [-1.0])

    def test_from_samples_equal_weights(self):
        mu = EmpiricalMeasure.from_samples(SP, [0.1, 0.2, 0.3])
        np.testing.assert_allclose(mu.weights, 1.0 / 3.0)

    def test_serialization_roundtrip(self):
        mu = EmpiricalMeasure(SP, [0.1, 1.7], [0.25, 0.75])
        back = EmpiricalMeasure.from_text(mu.to_text(), SP)
        np.testing.assert_array_equal(back.positions, mu.positions)
        np.testing.assert_array_equal(back.weights, mu.weights)


class TestKantorovichInterval:
    def test_diracs(self):
        d = kantorovich_interval(
            EmpiricalMeasure(SP, [0.3], [1.0]), EmpiricalMeasure(SP, [1.1], [1.0])
        )
        assert d == pytest.approx(0.8)

    def test_two_atom_checkpoint(self):
        m1 = EmpiricalMeasure.from_samples(SP, [0.0, 1.0])
        m2 = EmpiricalMeasure.from_samples(SP, [0.5, 1.5])
        assert kantorovich_interval(m1, m2) == pytest.approx(0.5)

    def test_identical_zero(self):
        m = EmpiricalMeasure.from_samples(SP, [0.2, 0.9, 1.4])
        assert kantorovich_interval(m, m) == pytest.approx(0.0, abs=1e-15)

    def test_space_mismatch(self):
        with pytest.raises(ValueError):
            kantorovich_interval(
                EmpiricalMeasure(SP, [0.0], [1.0]),
                EmpiricalMeasure(Interval(0.0, 1.0), [0.0], [1.0]),
            )

    def test_against_assignment_oracle(self):
        rng = np.random.default_rng(0)
        for _ in range(100):
            k = int(rng.integers(1, 21))
            xs = rng.uniform(0.0, 2.0, k)
            ys = rng.uniform(0.0, 2.0, k)
            got = kantorovich_interval(
                EmpiricalMeasure.from_samples(SP, xs), EmpiricalMeasure.from_samples(SP, ys)
            )
            assert got == pytest.approx(assignment_oracle_interval(xs, ys), abs=1e-9)

    def test_unequal_weights(self):
        m1 = EmpiricalMeasure(SP, [0.0], [1.0])
        m2 = EmpiricalMeasure(SP, [0.0, 1.0], [0.5, 0.5])
        assert kantorovich_interval(m1, m2) == pytest.approx(0.5)


class TestKantorovichCircle:
    def test_short_arc(self):
        d = kantorovich_circle(
            EmpiricalMeasure(CIRC, [0.0], [1.0]), EmpiricalMeasure(CIRC, [0.9], [1.0])
        )
        assert d == pytest.approx(0.1)

    def test_antipodal_pairs_checkpoint(self):
        m1 = EmpiricalMeasure.from_samples(CIRC, [0.0, 0.5])
        m2 = EmpiricalMeasure.from_samples(CIRC, [0.25, 0.75])
        assert kantorovich_circle(m1, m2) == pytest.approx(0.25)

    def test_rotation_invariance(self):
        rng = np.random.default_rng(1)
        xs = rng.uniform(0, 1, 7)
        ys = rng.uniform(0, 1, 7)
        base = kantorovich_circle(
            EmpiricalMeasure.from_samples(CIRC, xs), EmpiricalMeasure.from_samples(CIRC, ys)
        )
        for r in (0.1, 0.37, 0.9):
            shifted = kantorovich_circle(
                EmpiricalMeasure.from_samples(CIRC, (xs + r) % 1.0),
                EmpiricalMeasure.from_samples(CIRC, (ys + r) % 1.0),
            )
            assert shifted == pytest.approx(base, abs=1e-12)

    def test_against_assignment_oracle(self):
        rng = np.random.default_rng(2)
        for _ in range(60):
            k = int(rng.integers(1, 16))
            xs = rng.uniform(0, 1, k)
            ys = rng.uniform(0, 1, k)
            got = kantorovich_circle(
                EmpiricalMeasure.from_samples(CIRC, xs), EmpiricalMeasure.from_samples(CIRC, ys)
            )
            assert got == pytest.approx(assignment_oracle_circle(xs, ys), abs=1e-9)


class TestKantorovichGaussian:
    def test_dirac_zero_sigma_zero(self):
        mu = EmpiricalMeasure(None, [0.0], [1.0])
        assert kantorovich_gaussian(mu, 0.0) == 0.0

    def test_dirac_zero_sigma_one(self):
        # distance of delta_0 to N(0,1) is E|Z| = sqrt(2/pi)
        mu = EmpiricalMeasure(None, [0.0], [1.0])
        assert kantorovich_gaussian(mu, 1.0) == pytest.approx(np.sqrt(2 / np.pi), abs=1e-12)

    def test_large_gaussian_sample_small_distance(self):
        rng = np.random.default_rng(3)
        mu = EmpiricalMeasure.from_samples(None, rng.standard_normal(100_000))
        assert kantorovich_gaussian(mu, 1.0) <= 0.02

    def test_against_quadrature(self):
        rng = np.random.default_rng(4)
        for _ in range(5):
            pts = rng.uniform(-2, 2, 6)
            w = rng.dirichlet(np.ones(6))
            mu = EmpiricalMeasure(None, pts, w)
            sigma = float(rng.uniform(0.3, 2.0))

            def integrand(t):
                H = float(np.sum(w * (pts <= t)))
                return abs(H - norm.cdf(t, scale=sigma))

            lo = min(pts.min(), -8 * sigma)
            hi = max(pts.max(), 8 * sigma)
            ref, _ = quad(integrand, lo, hi, limit=400,
                          points=sorted(np.clip(pts, lo, hi)))
            assert kantorovich_gaussian(mu, sigma) == pytest.approx(ref, abs=1e-6)

    def test_sigma_zero_is_mean_abs(self):
        mu = EmpiricalMeasure(None, [-1.0, 2.0], [0.5, 0.5])
        assert kantorovich_gaussian(mu, 0.0) == pytest.approx(1.5)
