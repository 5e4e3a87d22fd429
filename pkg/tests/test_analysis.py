import math
from itertools import combinations

import numpy as np
import pytest

from l0recover.analysis import (
    approx_sparse_instance,
    bruteforce_decode,
    error_metrics,
    exact_sparse_instance,
    iterate_error_trace,
    model_rip_constant,
    recovery_bound_check,
    uncertainty_check,
)
from l0recover.recovery import SparsityBudget, iht
from l0recover.transforms import (
    coherence,
    dct2,
    dft,
    forward,
    hadamard,
    inverse,
    materialize,
)


class TestUncertainty:
    def test_impulse_attains_equality(self):
        # a single impulse spreads flat: |Fx|_inf == alpha * |x|
        for kind in (dft(16), hadamard(16)):
            x = np.zeros(16)
            x[0] = 1.0
            ratio = np.abs(forward(x, kind)).max() / (coherence(kind) * 1.0)
            assert ratio == pytest.approx(1.0, abs=1e-12)

    def test_random_sparse_never_exceeds_one(self):
        assert uncertainty_check(dct2(64), 3, trials=1000, seed=0) <= 1.0 + 1e-12

    def test_aligned_signs_attain_equality(self):
        # all-ones input under Hadamard: every sign lines up on the first row
        kind = hadamard(16)
        x = np.ones(16)
        bound = coherence(kind) * math.sqrt(16) * np.linalg.norm(x)
        assert np.abs(forward(x, kind)).max() == pytest.approx(bound, rel=1e-12)

    @pytest.mark.parametrize("kind", [dct2(32), dft(32), hadamard(32)])
    def test_families(self, kind):
        assert uncertainty_check(kind, 4, trials=300, seed=1) <= 1.0 + 1e-12

    def test_k_out_of_range(self):
        with pytest.raises(ValueError):
            uncertainty_check(dct2(8), 9, trials=10)


class TestModelRip:
    def test_noise_free_submatrices_are_isometries(self):
        report = model_rip_constant(dct2(12), 3, 0)
        assert report.exhaustive
        assert report.delta <= 1e-12

    def test_exhaustive_deterministic_and_bounded(self):
        a = model_rip_constant(dft(8), 2, 2)
        b = model_rip_constant(dft(8), 2, 2)
        assert a.delta == b.delta
        assert a.worst_support == b.worst_support
        assert 0.0 <= a.delta < 1.0
        assert a.supports_checked == math.comb(8, 2) ** 2

    def test_reverse_enumeration_same_delta(self):
        a = model_rip_constant(dft(8), 2, 2)
        b = model_rip_constant(dft(8), 2, 2, reverse=True)
        assert a.delta == pytest.approx(b.delta, abs=1e-12)

    def test_monotone_in_t(self):
        deltas = [model_rip_constant(dct2(16), 3, t).delta for t in (0, 1, 2, 3)]
        assert all(a <= b + 1e-12 for a, b in zip(deltas, deltas[1:]))

    def test_matches_naive_per_pair_svd(self):
        kind = dct2(6)
        finv = materialize(kind).conj().T
        eye = np.eye(6)
        worst = 0.0
        for S in combinations(range(6), 1):
            for Q in combinations(range(6), 1):
                cols = np.concatenate([finv[:, list(S)], eye[:, list(Q)]], axis=1)
                sv = np.linalg.svd(cols, compute_uv=False)
                worst = max(worst, max(sv[0] - 1.0, 1.0 - sv[-1]))
        report = model_rip_constant(kind, 1, 1)
        assert report.delta == pytest.approx(worst, abs=1e-12)

    def test_sampled_mode(self):
        report = model_rip_constant(dct2(32), 2, 2, exhaustive_limit=10, samples=50, seed=4)
        assert not report.exhaustive
        assert report.supports_checked == 50
        assert 0.0 <= report.delta < 1.0

    def test_small_delta_implies_recovery(self):
        # whenever the measured constant is within the contraction regime,
        # every exactly sparse instance must decode exactly
        kind = dct2(16)
        for t in (0, 1, 2):
            report = model_rip_constant(kind, 3, 3 * t)
            if report.delta > 0.1:
                continue
            for s in range(10):
                y, truth, noise = exact_sparse_instance(kind, 1, t, seed=s)
                rep = iht(y, kind, SparsityBudget(k=1, t=t, T=100))
                assert np.abs(rep.spectrum_estimate.values - truth.values).max() < 1e-6


class TestBruteforce:
    def test_exact_decomposition_unique(self):
        kind = dct2(8)
        spec = np.zeros(8)
        spec[0] = 3.0
        e = np.zeros(8)
        e[3] = 5.0
        y = inverse(spec, kind) + e
        got_spec, got_noise = bruteforce_decode(y, kind, 1, 1)
        np.testing.assert_allclose(got_spec.values, spec, atol=1e-9)
        np.testing.assert_allclose(got_noise, e, atol=1e-9)
        # enumerate all pairs: only the true one fits exactly
        finv = materialize(kind).conj().T
        eye = np.eye(8)
        exact = 0
        for S in combinations(range(8), 1):
            for Q in combinations(range(8), 1):
                cols = np.concatenate([finv[:, list(S)], eye[:, list(Q)]], axis=1)
                c, *_ = np.linalg.lstsq(cols, y, rcond=None)
                exact += np.linalg.norm(y - cols @ c) <= 1e-9
        assert exact == 1

    def test_zero_signal(self):
        got_spec, got_noise = bruteforce_decode(np.zeros(8), dct2(8), 1, 1)
        assert np.abs(got_spec.values).max() <= 1e-12
        assert np.abs(got_noise).max() <= 1e-12

    @pytest.mark.parametrize("kind", [dct2(12), dft(12)])
    def test_agrees_with_iht(self, kind):
        budget = SparsityBudget(k=2, t=1, T=200)
        for s in range(50):
            y, truth, noise = exact_sparse_instance(kind, 2, 1, seed=s)
            ref_spec, ref_noise = bruteforce_decode(y, kind, 2, 1)
            rep = iht(y, kind, budget)
            assert np.abs(rep.spectrum_estimate.values - ref_spec.values).max() <= 1e-6
            assert np.abs(rep.noise_estimate - ref_noise).max() <= 1e-6

    def test_iht_residual_lower_bounded_by_oracle(self):
        kind = dct2(10)
        rng = np.random.default_rng(0)
        y = rng.standard_normal(10)  # generic dense signal, no exact fit
        ref_spec, ref_noise = bruteforce_decode(y, kind, 2, 1)
        brute_res = np.linalg.norm(y - inverse(ref_spec, kind) - ref_noise)
        rep = iht(y, kind, SparsityBudget(k=2, t=1, T=100))
        assert rep.residual_trace[-1] >= brute_res - 1e-9

    def test_enumeration_guard(self):
        with pytest.raises(ValueError):
            bruteforce_decode(np.zeros(64), dct2(64), 5, 5)


class TestErrorMetrics:
    def test_identical_gives_infinite_psnr(self):
        m = error_metrics(np.ones(4), np.ones(4))
        assert m.linf == 0.0 and m.l2 == 0.0 and m.psnr_db == math.inf

    def test_reference_values(self):
        m = error_metrics(np.array([-3.0, 2.0, 1.0]), np.zeros(3))
        assert m.linf == 3.0
        assert m.l2 == pytest.approx(math.sqrt(14))

    def test_psnr_forty_db(self):
        est = np.zeros(100)
        ref = np.full(100, 0.01)  # MSE 1e-4
        assert error_metrics(est, ref).psnr_db == pytest.approx(40.0)

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            error_metrics(np.zeros(3), np.zeros(4))


class TestBoundCheck:
    def test_exact_recovery_zero_constant(self):
        kind = dct2(16)
        y, truth, _ = exact_sparse_instance(kind, 2, 1, seed=8)
        rep = iht(y, kind, SparsityBudget(k=2, t=1, T=150))
        check = recovery_bound_check(rep, truth, 2, 1, 16)
        assert check.bound_value == 0.0
        assert check.constant == 0.0

    def test_noise_free_measured_is_negligible(self):
        kind = dct2(16)
        y, truth, _ = exact_sparse_instance(kind, 2, 0, seed=9)
        rep = iht(y, kind, SparsityBudget(k=2, t=0, T=50))
        check = recovery_bound_check(rep, truth, 2, 0, 16)
        assert check.measured_linf <= 1e-9

    def test_calibration_instance(self):
        kind = dct2(256)
        y, truth, _ = approx_sparse_instance(kind, 5, 4, eps=0.05, seed=0)
        rep = iht(y, kind, SparsityBudget(k=5, t=4, T=50))
        check = recovery_bound_check(rep, truth, 5, 4, 256)
        assert check.constant <= 10.0
        assert check.constant == pytest.approx(check.measured_linf / check.bound_value)


def test_iterate_error_trace_contracts():
    kind = dct2(128)
    y, truth, noise = exact_sparse_instance(kind, 4, 4, seed=5)
    errs = iterate_error_trace(y, kind, SparsityBudget(k=4, t=4, T=60, stop_tol=0.0), truth, noise)
    floor = 1e-12 * errs[0]
    ratios = [b / a for a, b in zip(errs, errs[1:]) if a > floor and b > floor]
    assert ratios and max(ratios) <= 0.6


def test_instance_generators_are_seeded():
    kind = dct2(32)
    a = exact_sparse_instance(kind, 3, 2, seed=7)
    b = exact_sparse_instance(kind, 3, 2, seed=7)
    np.testing.assert_array_equal(a[0], b[0])
    y, truth, noise = a
    assert np.count_nonzero(truth.values) <= 3
    assert np.count_nonzero(noise) == 2
    np.testing.assert_allclose(y, inverse(truth, kind) + noise, atol=1e-12)


def test_approx_instance_tail_fraction():
    kind = dct2(256)
    _, truth, _ = approx_sparse_instance(kind, 5, 0, eps=0.05, seed=1)
    from l0recover.sparsity import tail_ratio

    assert tail_ratio(truth.values, 5) == pytest.approx(0.05, rel=1e-9)
