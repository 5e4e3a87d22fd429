"""Verification oracles and error metrics.

Independent machinery for checking the recovery pipeline: an entrywise
uncertainty-principle bound for sparse inputs, the restricted-isometry
constant of the stacked decoding matrix [F^{-1} I], an exhaustive
least-squares decoder usable as ground truth at small sizes, and seeded
generators for exactly- and approximately-sparse test instances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .recovery import SparsityBudget, iht
from .sparsity import SupportSet, head, tail
from .transforms import (
    Family,
    Spectrum,
    TransformKind,
    apply_values,
    coherence,
    materialize,
)


@dataclass(frozen=True)
class RipReport:
    """Measured restricted-isometry constant over a family of support pairs."""

    delta: float
    worst_support: tuple[SupportSet, SupportSet]
    supports_checked: int
    exhaustive: bool


@dataclass(frozen=True)
class BoundCheck:
    """Measured max-norm recovery error against sqrt(t/n) * tail-energy."""

    measured_linf: float
    bound_value: float
    constant: float


@dataclass(frozen=True)
class ErrorMetrics:
    linf: float
    l2: float
    psnr_db: float


def uncertainty_check(kind: TransformKind, k: int, trials: int, seed: int = 0) -> float:
    """Worst observed ratio |F x|_inf / (alpha * sqrt(k) * |x|) over random k-sparse x.

    alpha is the coherence of the transform; the ratio never exceeds 1 up to
    roundoff for any k-sparse input.
    """
    n = kind.n
    if k < 1 or k > n:
        raise ValueError(f"k={k} out of range for n={n}")
    alpha = coherence(kind)
    rng = np.random.default_rng(seed)
    batch = np.zeros((trials, n))
    supports = np.argsort(rng.random((trials, n)), axis=1)[:, :k]
    values = rng.standard_normal((trials, k))
    batch[np.arange(trials)[:, None], supports] = values
    spectra = apply_values(batch, kind)
    ratios = np.abs(spectra).max(axis=1) / (
        alpha * math.sqrt(k) * np.linalg.norm(batch, axis=1)
    )
    return float(ratios.max())


def _stacked_submatrices(finv_cols, eye_n, S, Q_array, dtype):
    """(nQ, n, k+t) stack of [F^{-1}[:, S] | I[:, Q]] for every Q in Q_array."""
    nQ, t = Q_array.shape if Q_array.size else (Q_array.shape[0], 0)
    n = eye_n
    k = len(S)
    stack = np.zeros((nQ, n, k + t), dtype=dtype)
    stack[:, :, :k] = finv_cols[:, S]
    if t:
        stack[np.arange(nQ)[:, None], Q_array, k + np.arange(t)[None, :]] = 1.0
    return stack


def model_rip_constant(
    kind: TransformKind,
    k: int,
    t: int,
    exhaustive_limit: int = 1_000_000,
    *,
    samples: int = 2000,
    seed: int = 0,
    reverse: bool = False,
) -> RipReport:
    """Isometry defect of [F^{-1} I] over (k-sparse spectrum, t-sparse noise) supports.

    For each support pair (S, Q) the extremal singular values of the picked
    column submatrix give max(sigma_max - 1, 1 - sigma_min); the report holds
    the maximum over pairs and the first pair attaining it. All pairs are
    enumerated when C(n,k)*C(n,t) fits in ``exhaustive_limit``, otherwise
    ``samples`` seeded random pairs are drawn. ``reverse`` enumerates in
    reversed order (the maximum must not depend on order).
    """
    n = kind.n
    if k < 0 or k > n or t < 0 or t > n:
        raise ValueError(f"(k={k}, t={t}) out of range for n={n}")
    total = math.comb(n, k) * math.comb(n, t)
    exhaustive = total <= exhaustive_limit
    finv = materialize(kind).conj().T
    dtype = np.complex128 if kind.is_complex else np.float64

    if exhaustive:
        S_list = list(combinations(range(n), k))
        Q_list = list(combinations(range(n), t))
        if reverse:
            S_list = S_list[::-1]
            Q_list = Q_list[::-1]
    else:
        rng = np.random.default_rng(seed)
        S_list = [tuple(np.sort(rng.choice(n, k, replace=False))) for _ in range(samples)]
        Q_list = None

    best_delta = -np.inf
    worst = (tuple(range(k)), tuple(range(t)))
    checked = 0
    if exhaustive:
        Q_array = np.asarray(Q_list, dtype=np.intp).reshape(len(Q_list), t)
        for S in S_list:
            stack = _stacked_submatrices(finv, n, list(S), Q_array, dtype)
            sv = np.linalg.svd(stack, compute_uv=False)
            deltas = np.maximum(sv[:, 0] - 1.0, 1.0 - sv[:, -1])
            j = int(np.argmax(deltas))
            if deltas[j] > best_delta:
                best_delta = float(deltas[j])
                worst = (S, Q_list[j])
            checked += len(Q_list)
    else:
        for S in S_list:
            Q = tuple(np.sort(rng.choice(n, t, replace=False)))
            Q_array = np.asarray([Q], dtype=np.intp).reshape(1, t)
            stack = _stacked_submatrices(finv, n, list(S), Q_array, dtype)
            sv = np.linalg.svd(stack, compute_uv=False)
            delta = float(max(sv[0, 0] - 1.0, 1.0 - sv[0, -1]))
            if delta > best_delta:
                best_delta = delta
                worst = (S, Q)
            checked += 1

    return RipReport(
        delta=max(best_delta, 0.0),
        worst_support=(SupportSet(worst[0]), SupportSet(worst[1])),
        supports_checked=checked,
        exhaustive=exhaustive,
    )


def bruteforce_decode(y, kind: TransformKind, k: int, t: int, *, limit: int = 1_000_000):
    """Exact decoder by exhaustive support enumeration. Test oracle only.

    Fits y ~ F^{-1} xh_S + e_Q by least squares on every support pair and
    returns (Spectrum, noise) for the global minimizer; ties go to the
    earliest pair in lexicographic enumeration order.
    """
    n = kind.n
    y = np.asarray(y, dtype=np.float64)
    if y.shape != (n,):
        raise ValueError(f"signal shape {y.shape} does not match {kind}")
    total = math.comb(n, k) * math.comb(n, t)
    if total > limit:
        raise ValueError(f"{total} support pairs exceed enumeration limit {limit}")
    finv = materialize(kind).conj().T
    dtype = np.complex128 if kind.is_complex else np.float64
    y_c = y.astype(dtype)
    y_norm2 = float(np.linalg.norm(y) ** 2)
    Q_list = list(combinations(range(n), t))
    Q_array = np.asarray(Q_list, dtype=np.intp).reshape(len(Q_list), t)

    best = (np.inf, None, None)
    for S in combinations(range(n), k):
        stack = _stacked_submatrices(finv, n, list(S), Q_array, dtype)
        q_basis, _ = np.linalg.qr(stack)
        proj = np.einsum("qnm,n->qm", q_basis.conj(), y_c)
        resid2 = np.maximum(y_norm2 - np.sum(np.abs(proj) ** 2, axis=1), 0.0)
        j = int(np.argmin(resid2))
        if resid2[j] < best[0]:
            best = (float(resid2[j]), S, Q_list[j])

    S, Q = best[1], best[2]
    winner_q = np.asarray([Q], dtype=np.intp).reshape(1, t)
    cols = _stacked_submatrices(finv, n, list(S), winner_q, dtype)[0]
    coef, *_ = np.linalg.lstsq(cols, y_c, rcond=None)
    xh = np.zeros(n, dtype=dtype)
    xh[list(S)] = coef[:k]
    noise = np.zeros(n, dtype=dtype)
    noise[list(Q)] = coef[k:]
    if kind.is_complex:
        noise = noise.real
    return Spectrum(xh, kind), noise


def error_metrics(estimate, reference) -> ErrorMetrics:
    """Max-norm and Euclidean error, plus PSNR against peak value 1."""
    est = np.atleast_1d(np.asarray(estimate, dtype=np.float64))
    ref = np.atleast_1d(np.asarray(reference, dtype=np.float64))
    if est.shape != ref.shape:
        raise ValueError(f"shape mismatch: {est.shape} vs {ref.shape}")
    diff = est - ref
    linf = float(np.abs(diff).max(initial=0.0))
    l2 = float(np.linalg.norm(diff))
    mse = float(np.mean(diff**2))
    psnr = math.inf if mse == 0.0 else -10.0 * math.log10(mse)
    return ErrorMetrics(linf=linf, l2=l2, psnr_db=psnr)


def recovery_bound_check(estimate, truth_spectrum, k: int, t: int, n: int) -> BoundCheck:
    """Compare the max-norm estimation error to sqrt(t/n) * |tail(truth, k)|.

    ``constant`` is their ratio, the empirical factor hidden in the error
    bound. A zero bound with an error above 1e-9 reports an infinite
    constant; a zero bound with a negligible error reports 0.
    """
    if hasattr(estimate, "spectrum_estimate"):
        estimate = estimate.spectrum_estimate
    values = estimate.values if isinstance(estimate, Spectrum) else np.asarray(estimate)
    truth = truth_spectrum.values if isinstance(truth_spectrum, Spectrum) else np.asarray(truth_spectrum)
    measured = float(np.abs(values - head(truth, k)).max(initial=0.0))
    bound = math.sqrt(t / n) * float(np.linalg.norm(tail(truth, k)))
    if bound > 0.0:
        constant = measured / bound
    else:
        constant = 0.0 if measured <= 1e-9 else math.inf
    return BoundCheck(measured_linf=measured, bound_value=bound, constant=constant)


def iterate_error_trace(y, kind, budget, truth_spectrum, truth_noise, mode="jacobi"):
    """Per-iteration stacked error |[xh; e] - [truth_xh; truth_e]|, index 0 = init."""
    truth_xh = truth_spectrum.values if isinstance(truth_spectrum, Spectrum) else np.asarray(truth_spectrum)
    truth_e = np.asarray(truth_noise)
    report = iht(y, kind, budget, mode=mode, keep_iterates=True)
    errs = [
        math.hypot(
            float(np.linalg.norm(xh_i - truth_xh)), float(np.linalg.norm(e_i - truth_e))
        )
        for xh_i, e_i in report.iterates
    ]
    return np.asarray(errs)


# ---------------------------------------------------------------------------
# seeded instance generators used by the verification suites


def _dft_symmetric_sparse(n: int, k: int, rng) -> np.ndarray:
    """k-sparse coefficients closed under the f <-> n-f mirror, so the signal is real."""
    xh = np.zeros(n, dtype=np.complex128)
    singles = [0] + ([n // 2] if n % 2 == 0 else [])
    rng.shuffle(singles)
    pairs = [(f, n - f) for f in range(1, (n + 1) // 2)]
    rng.shuffle(pairs)
    budget = k
    while budget > 0:
        if budget >= 2 and pairs:
            f, g = pairs.pop()
            c = rng.uniform(0.5, 1.5) * np.exp(2j * np.pi * rng.uniform())
            xh[f] = c
            xh[g] = np.conj(c)
            budget -= 2
        elif singles:
            s = singles.pop()
            xh[s] = rng.uniform(0.5, 1.5) * rng.choice([-1.0, 1.0])
            budget -= 1
        else:
            break  # no symmetric support of exactly this size; stay <= k sparse
    return xh


def exact_sparse_instance(kind: TransformKind, k: int, t: int, seed: int, noise_scale: float = 10.0):
    """Seeded exactly-sparse test case: returns (y, truth_spectrum, truth_noise).

    The spectrum support is drawn uniformly (kept conjugate-closed for DFT so
    the signal is real), values are signed uniform in [0.5, 1.5]; the noise
    gets t such values scaled by ``noise_scale`` on a uniform support.
    """
    n = kind.n
    rng = np.random.default_rng(seed)
    if kind.is_complex:
        xh = _dft_symmetric_sparse(n, k, rng)
    else:
        support = rng.choice(n, k, replace=False)
        xh = np.zeros(n)
        xh[support] = rng.uniform(0.5, 1.5, k) * rng.choice([-1.0, 1.0], k)
    x = apply_values(xh, kind, inverse=True)
    if np.iscomplexobj(x):
        x = x.real
    e = np.zeros(n)
    if t > 0:
        q = rng.choice(n, t, replace=False)
        e[q] = rng.uniform(0.5, 1.5, t) * rng.choice([-1.0, 1.0], t) * noise_scale
    return x + e, Spectrum(xh, kind), e


def approx_sparse_instance(
    kind: TransformKind, k: int, t: int, eps: float, seed: int, noise_scale: float = 1e6
):
    """Seeded (k, eps)-sparse test case: returns (y, truth_spectrum, truth_noise).

    The head holds k well-separated values (magnitudes in [0.3, 1]); the rest
    of the spectrum carries a dense tail scaled so |tail| = eps * |spectrum|.
    Noise spikes are placed on the samples most correlated with the head
    atoms, at ``noise_scale`` times the clean signal peak. Real-coefficient
    families only.
    """
    if kind.is_complex:
        raise ValueError("approximately sparse instances are generated for real-coefficient kinds")
    n = kind.n
    if not 0.0 <= eps < 1.0:
        raise ValueError("eps must be in [0, 1)")
    rng = np.random.default_rng(seed)
    support = rng.choice(n, k, replace=False)
    head_part = np.zeros(n)
    head_part[support] = rng.uniform(0.3, 1.0, k) * rng.choice([-1.0, 1.0], k)
    xh = head_part
    if eps > 0.0:
        direction = rng.standard_normal(n)
        direction[support] = 0.0
        direction /= np.linalg.norm(direction)
        # |tail| = eps * |head + tail| solved for the tail length
        xh = head_part + direction * (
            eps / math.sqrt(1.0 - eps**2) * np.linalg.norm(head_part)
        )
    x = apply_values(xh, kind, inverse=True)
    e = np.zeros(n)
    if t > 0:
        atoms = np.zeros(n)
        for f in support:
            impulse = np.zeros(n)
            impulse[f] = 1.0
            atoms += np.abs(apply_values(impulse, kind, inverse=True))
        spikes = np.argsort(-atoms, kind="stable")[:t]
        e[spikes] = noise_scale * np.abs(x).max() * rng.choice([-1.0, 1.0], t)
    return x + e, Spectrum(xh, kind), e
