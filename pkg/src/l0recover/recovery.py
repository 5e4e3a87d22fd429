"""Alternating hard-thresholding recovery of a sparse spectrum plus sparse noise.

Given samples y = x + e where x has a (nearly) k-sparse coefficient vector
under an orthonormal transform F and e is t-sparse in the sample domain,
:func:`iht` alternates two projections,

    xh <- keep k largest of F(y - e)
    e  <- keep t largest of y - F^{-1}(xh)

and returns the final estimates. Two update schedules are provided: the
"jacobi" schedule feeds the e-update the spectrum estimate from the previous
iteration, the "sequential" schedule feeds it the one just computed.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .sparsity import head, head_paired, tail
from .transforms import Family, Spectrum, TransformKind, apply_values, forward

MODES = ("jacobi", "sequential")
INITS = ("zeros", "random")


@dataclass(frozen=True)
class SparsityBudget:
    """Run parameters: spectrum sparsity k, noise sparsity t, iteration cap T."""

    k: int
    t: int = 0
    T: int = 50
    stop_tol: float = 1e-9

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be positive")
        if self.t < 0:
            raise ValueError("t must be nonnegative")
        if self.T < 1:
            raise ValueError("iteration cap T must be positive")
        if self.stop_tol < 0:
            raise ValueError("stop_tol must be nonnegative")


@dataclass(eq=False)
class RecoveryReport:
    """Everything a recovery run produced.

    ``residual_trace[i]`` is |y - F^{-1}(xh) - e| after iteration i+1.
    ``tail_energy`` is |tail(truth, k)| when a ground-truth spectrum was
    supplied, else None. ``iterates`` holds per-iteration (spectrum, noise)
    pairs when requested, starting with the initial pair.
    """

    spectrum_estimate: Spectrum
    noise_estimate: np.ndarray
    recovered_signal: np.ndarray
    iterations_run: int
    residual_trace: np.ndarray
    tail_energy: float | None = None
    iterates: list[tuple[np.ndarray, np.ndarray]] | None = field(default=None, repr=False)


def _rel_changed(new, old, tol):
    return float(np.linalg.norm(new - old)) > tol * max(
        float(np.linalg.norm(new)), float(np.linalg.norm(old))
    )


def iht(
    y,
    kind: TransformKind,
    budget: SparsityBudget,
    init: str = "zeros",
    seed: int = 0,
    mode: str = "jacobi",
    truth_spectrum=None,
    keep_iterates: bool = False,
) -> RecoveryReport:
    """Recover a k-sparse spectrum and t-sparse sample noise from y.

    Parameters
    ----------
    y : array of n real samples matching ``kind``.
    kind : transform under which the clean signal is sparse.
    budget : sparsity levels and iteration settings.
    init : "zeros" starts both estimates at zero; "random" draws both i.i.d.
        uniform in [-1, 1] (seeded) and rescales them to |y|.
    mode : "jacobi" updates the noise estimate from the previous spectrum
        estimate; "sequential" uses the fresh one and typically converges in
        fewer iterations.
    truth_spectrum : optional ground-truth coefficients; only used to record
        the tail energy |tail(truth, k)| in the report.
    keep_iterates : store every (spectrum, noise) iterate pair for
        convergence diagnostics.

    The loop stops after ``budget.T`` iterations or as soon as the relative
    change of both iterates drops below ``budget.stop_tol``.
    """
    y = np.asarray(y, dtype=np.float64)
    n = kind.n
    if y.shape != (n,):
        raise ValueError(f"signal shape {y.shape} does not match {kind}")
    k, t = budget.k, budget.t
    if k > n or t > n:
        raise ValueError(f"budget (k={k}, t={t}) exceeds signal length {n}")
    if k + t >= n:
        raise ValueError(
            f"k + t = {k + t} >= n = {n}: the decomposition is not identifiable"
        )
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    if init not in INITS:
        raise ValueError(f"init must be one of {INITS}")
    if t > 0 and 4 * k * t > n:
        warnings.warn(
            f"t={t} exceeds n/(4k)={n / (4 * k):.2f}; recovery is outside the "
            "regime where convergence is assured",
            RuntimeWarning,
            stacklevel=2,
        )

    dtype = np.complex128 if kind.is_complex else np.float64
    y_work = y.astype(dtype)
    xh = np.zeros(n, dtype=dtype)
    e = np.zeros(n, dtype=dtype)
    if init == "random":
        rng = np.random.default_rng(seed)
        ynorm = float(np.linalg.norm(y))
        xh = rng.uniform(-1.0, 1.0, n).astype(dtype)
        xh *= ynorm / max(float(np.linalg.norm(xh)), np.finfo(float).tiny)
        if t > 0:
            e = rng.uniform(-1.0, 1.0, n).astype(dtype)
            e *= ynorm / max(float(np.linalg.norm(e)), np.finfo(float).tiny)
    finv_xh = apply_values(xh, kind, inverse=True)

    residuals = []
    iterates = [(xh.copy(), e.copy())] if keep_iterates else None
    e_reported = e
    iterations = 0
    for _ in range(budget.T):
        xh_in, e_in = xh, e
        xh = head(apply_values(y_work - e_in, kind), k)
        if t > 0:
            if mode == "jacobi":
                e = head(y_work - finv_xh, t)
                finv_xh = apply_values(xh, kind, inverse=True)
            else:
                finv_xh = apply_values(xh, kind, inverse=True)
                e = head(y_work - finv_xh, t)
        else:
            finv_xh = apply_values(xh, kind, inverse=True)
        residuals.append(float(np.linalg.norm(y_work - finv_xh - e)))
        iterations += 1
        # jacobi pairs the final spectrum with the noise iterate it was built from
        e_reported = e_in if mode == "jacobi" else e
        if keep_iterates:
            iterates.append((xh.copy(), e.copy()))
        if not _rel_changed(xh, xh_in, budget.stop_tol) and not _rel_changed(
            e, e_in, budget.stop_tol
        ):
            break

    recovered = apply_values(xh, kind, inverse=True)
    if kind.is_complex:
        recovered = recovered.real
        e_reported = e_reported.real
    tail_energy = None
    if truth_spectrum is not None:
        truth = truth_spectrum.values if isinstance(truth_spectrum, Spectrum) else truth_spectrum
        tail_energy = float(np.linalg.norm(tail(np.asarray(truth), k)))
    return RecoveryReport(
        spectrum_estimate=Spectrum(xh, kind),
        noise_estimate=e_reported,
        recovered_signal=recovered,
        iterations_run=iterations,
        residual_trace=np.asarray(residuals),
        tail_energy=tail_energy,
        iterates=iterates,
    )


def compress(x, kind: TransformKind, k: int, pair_coupled: bool | None = None) -> np.ndarray:
    """Project x onto its k largest transform coefficients.

    Computes F^{-1}(head(F x, k)). Idempotent, and the approximation error
    equals the norm of the dropped coefficient tail. For DFT kinds the
    selection keeps conjugate-mirror pairs together by default so the output
    stays real; pass ``pair_coupled=False`` to force plain top-k.
    """
    spectrum = forward(x, kind)
    if pair_coupled is None:
        pair_coupled = kind.family is Family.DFT
    kept = head_paired(spectrum, k) if pair_coupled else head(spectrum, k)
    out = apply_values(kept, kind, inverse=True)
    return out.real if np.iscomplexobj(out) else out
