import numpy as np
import pytest

from l0recover.analysis import bruteforce_decode, exact_sparse_instance
from l0recover.recovery import SparsityBudget, compress, iht
from l0recover.sparsity import head, tail
from l0recover.transforms import dct2, dft, dst, forward, hadamard, inverse


def test_budget_validation():
    with pytest.raises(ValueError):
        SparsityBudget(k=0)
    with pytest.raises(ValueError):
        SparsityBudget(k=1, t=-1)
    with pytest.raises(ValueError):
        SparsityBudget(k=1, T=0)


def test_noiseless_exact_after_one_step():
    kind = dct2(8)
    spec = np.zeros(8)
    spec[0] = 3.0
    y = inverse(spec, kind)
    report = iht(y, kind, SparsityBudget(k=1, t=0))
    np.testing.assert_allclose(report.spectrum_estimate.values, spec, atol=1e-9)
    assert report.iterations_run <= 2  # first pass is already the fixed point
    np.testing.assert_allclose(report.recovered_signal, y, atol=1e-9)


def test_one_spike_recovery_matches_oracle():
    kind = dct2(8)
    spec = np.zeros(8)
    spec[0] = 3.0
    e = np.zeros(8)
    e[3] = 5.0
    y = inverse(spec, kind) + e
    report = iht(y, kind, SparsityBudget(k=1, t=1, T=30))
    np.testing.assert_allclose(report.spectrum_estimate.values, spec, atol=1e-6)
    np.testing.assert_allclose(report.noise_estimate, e, atol=1e-6)
    ref_spec, ref_noise = bruteforce_decode(y, kind, 1, 1)
    np.testing.assert_allclose(ref_spec.values, spec, atol=1e-9)
    np.testing.assert_allclose(ref_noise, e, atol=1e-9)


@pytest.mark.parametrize("mode", ["jacobi", "sequential"])
@pytest.mark.parametrize("kind", [dct2(16), dst(16), hadamard(16), dft(16)])
def test_modes_agree_on_easy_instances(kind, mode):
    y, truth, noise = exact_sparse_instance(kind, 2, 1, seed=5)
    report = iht(y, kind, SparsityBudget(k=2, t=1, T=100), mode=mode)
    np.testing.assert_allclose(report.spectrum_estimate.values, truth.values, atol=1e-6)
    np.testing.assert_allclose(report.noise_estimate, noise, atol=1e-6)


def test_output_sparsity_invariant(rng):
    kind = dct2(64)
    y = rng.standard_normal(64)
    report = iht(y, kind, SparsityBudget(k=5, t=3, T=20))
    assert np.count_nonzero(report.spectrum_estimate.values) <= 5
    assert np.count_nonzero(report.noise_estimate) <= 3
    assert len(report.residual_trace) == report.iterations_run


def test_magnitude_independence():
    kind = dct2(32)
    y1, truth, e = exact_sparse_instance(kind, 3, 2, seed=11, noise_scale=1.0)
    x = y1 - e
    y2 = x + e * 1e6
    budget = SparsityBudget(k=3, t=2, T=80)
    r1 = iht(y1, kind, budget)
    r2 = iht(y2, kind, budget)
    scale = np.linalg.norm(r1.spectrum_estimate.values)
    diff = np.linalg.norm(r1.spectrum_estimate.values - r2.spectrum_estimate.values)
    assert diff <= 1e-6 * scale


def test_init_independence():
    kind = dct2(32)
    y, truth, _ = exact_sparse_instance(kind, 3, 2, seed=21)
    budget = SparsityBudget(k=3, t=2, T=120)
    r_zero = iht(y, kind, budget, init="zeros")
    r_rand = iht(y, kind, budget, init="random", seed=99)
    diff = np.abs(r_zero.spectrum_estimate.values - r_rand.spectrum_estimate.values).max()
    assert diff <= 1e-6


def test_degenerate_budget_rejected():
    kind = dct2(8)
    with pytest.raises(ValueError):
        iht(np.zeros(8), kind, SparsityBudget(k=4, t=4))
    with pytest.raises(ValueError):
        iht(np.zeros(8), kind, SparsityBudget(k=9, t=0))


def test_out_of_regime_budget_warns():
    kind = dct2(16)
    with pytest.warns(RuntimeWarning, match="n/\\(4k\\)"):
        iht(np.ones(16), kind, SparsityBudget(k=2, t=3, T=5))


def test_tail_energy_recorded():
    kind = dct2(16)
    y, truth, _ = exact_sparse_instance(kind, 2, 0, seed=2)
    report = iht(y, kind, SparsityBudget(k=1, t=0), truth_spectrum=truth)
    assert report.tail_energy == pytest.approx(
        np.linalg.norm(tail(truth.values, 1)), abs=1e-12
    )


def test_keep_iterates_starts_at_init():
    kind = dct2(16)
    y, _, _ = exact_sparse_instance(kind, 2, 1, seed=3)
    report = iht(y, kind, SparsityBudget(k=2, t=1, T=10, stop_tol=0.0), keep_iterates=True)
    assert len(report.iterates) == report.iterations_run + 1
    assert not report.iterates[0][0].any() and not report.iterates[0][1].any()


class TestCompress:
    def test_fixed_point_on_sparse_input(self):
        kind = dct2(16)
        y, truth, _ = exact_sparse_instance(kind, 3, 0, seed=7)
        np.testing.assert_allclose(compress(y, kind, 3), y, atol=1e-10)

    def test_full_budget_is_identity(self, rng):
        kind = dst(16)
        x = rng.standard_normal(16)
        np.testing.assert_allclose(compress(x, kind, 16), x, atol=1e-10)

    def test_idempotent(self, rng):
        kind = dct2(32)
        x = rng.standard_normal(32)
        once = compress(x, kind, 5)
        np.testing.assert_allclose(compress(once, kind, 5), once, atol=1e-10)

    def test_error_equals_dropped_tail(self, rng):
        kind = dct2(32)
        x = rng.standard_normal(32)
        out = compress(x, kind, 6)
        assert np.linalg.norm(x - out) == pytest.approx(
            np.linalg.norm(tail(forward(x, kind), 6)), abs=1e-9
        )

    def test_mnist_sized_image(self, smooth_image):
        kind = dct2(28, 28)
        img = smooth_image(28, seed=0).ravel()
        out = compress(img, kind, 40)
        spec = forward(out, kind)
        assert np.count_nonzero(np.abs(spec) > 1e-9 * np.abs(spec).max()) <= 40
        assert np.linalg.norm(img - out) == pytest.approx(
            np.linalg.norm(tail(forward(img, kind), 40)), abs=1e-9
        )

    def test_dft_output_stays_real(self, rng):
        kind = dft(16)
        x = rng.standard_normal(16)
        out = compress(x, kind, 3)  # pair coupling keeps the inverse real
        assert out.dtype == np.float64
        np.testing.assert_allclose(compress(out, kind, 3), out, atol=1e-10)
