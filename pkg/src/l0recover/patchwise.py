"""Locate one contiguous corrupted block by sweeping candidate patches.

Each candidate block p gets its own restricted recovery: the noise estimate
is confined to p (a plain projection, no top-t selection), the spectrum
estimate is the usual top-k projection. The winning candidate is the one
whose final spectrum estimate has the smallest norm, i.e. the block whose
removal leaves the image closest to spectrally sparse.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .sparsity import SupportSet, head, restrict
from .transforms import TransformKind, apply_values

SELECTORS = ("spectrum_norm", "residual")


@dataclass(frozen=True)
class PatchGrid:
    """Candidate layout: patch side, stride, and the image they live in.

    Default stride is half the patch side, so overlapping candidates cover
    every possible block position to within a quarter of its area. Anchors
    are clamped so the final candidate in each axis touches the image edge.
    """

    image_shape: tuple[int, int]
    patch_side: int
    stride: int | None = None

    def __post_init__(self):
        shape = tuple(int(s) for s in self.image_shape)
        object.__setattr__(self, "image_shape", shape)
        if len(shape) != 2 or min(shape) < 1:
            raise ValueError(f"image_shape must be 2D positive, got {shape}")
        if self.patch_side < 1 or self.patch_side > min(shape):
            raise ValueError(
                f"patch side {self.patch_side} does not fit image {shape}"
            )
        stride = self.stride
        if stride is None:
            stride = max(1, self.patch_side // 2)
        if stride < 1:
            raise ValueError("stride must be positive")
        object.__setattr__(self, "stride", int(stride))


@dataclass(eq=False)
class PatchReport:
    best_patch: SupportSet
    best_anchor: tuple[int, int]
    recovered_signal: np.ndarray
    best_norm: float
    per_candidate_norms: list[tuple[tuple[int, int], float]] = field(repr=False)


def _axis_anchors(length: int, side: int, stride: int) -> list[int]:
    last = length - side
    anchors = list(range(0, last + 1, stride))
    if anchors[-1] != last:
        anchors.append(last)
    return anchors


def candidate_anchors(grid: PatchGrid) -> list[tuple[int, int]]:
    """Row-major (row, col) anchors of every candidate block."""
    rows, cols = grid.image_shape
    r_anchors = _axis_anchors(rows, grid.patch_side, grid.stride)
    c_anchors = _axis_anchors(cols, grid.patch_side, grid.stride)
    return [(r, c) for r in r_anchors for c in c_anchors]


def block_support(image_shape: tuple[int, int], anchor: tuple[int, int], side: int) -> SupportSet:
    """Flat row-major pixel indices of the side x side block at anchor."""
    rows, cols = image_shape
    r0, c0 = anchor
    if r0 < 0 or c0 < 0 or r0 + side > rows or c0 + side > cols:
        raise ValueError(f"block at {anchor} does not fit image {image_shape}")
    rr = np.arange(r0, r0 + side)
    cc = np.arange(c0, c0 + side)
    flat = (rr[:, None] * cols + cc[None, :]).ravel()
    return SupportSet(tuple(int(i) for i in flat))


def patch_candidates(grid: PatchGrid) -> list[SupportSet]:
    """All candidate blocks, in deterministic row-major anchor order."""
    return [
        block_support(grid.image_shape, a, grid.patch_side)
        for a in candidate_anchors(grid)
    ]


def _run_candidate(y, kind, k, T, support_idx, t, selector):
    dtype = np.complex128 if kind.is_complex else np.float64
    y = y.astype(dtype)
    xh = np.zeros(kind.n, dtype=dtype)
    e = np.zeros(kind.n, dtype=dtype)
    finv_xh = np.zeros(kind.n, dtype=dtype)
    for _ in range(T):
        xh_new = head(apply_values(y - e, kind), k)
        if t is None:
            e = restrict(y - finv_xh, support_idx)
        else:
            e = head(restrict(y - finv_xh, support_idx), t)
        xh = xh_new
        finv_xh = apply_values(xh, kind, inverse=True)
    if selector == "spectrum_norm":
        score = float(np.linalg.norm(xh))
    else:
        score = float(np.linalg.norm(y - finv_xh - e))
    return score, xh


def patchwise_iht(
    y,
    kind: TransformKind,
    k: int,
    T: int,
    grid: PatchGrid,
    *,
    t: int | None = None,
    selector: str = "spectrum_norm",
    workers: int = 1,
) -> PatchReport:
    """Sweep candidate blocks and return the one yielding the sparsest image.

    Parameters
    ----------
    y : corrupted image, flat row-major vector matching ``kind``.
    kind : a 2D transform whose shape equals ``grid.image_shape``.
    k : spectrum sparsity used inside every candidate run.
    T : fixed iteration count per candidate.
    t : None confines the noise estimate to the candidate block with no
        further thresholding; an integer additionally keeps only the t
        largest entries inside the block.
    selector : "spectrum_norm" picks the candidate with the smallest final
        coefficient norm; "residual" picks the smallest data misfit instead.
    workers : candidates evaluate independently; more than one thread may be
        used, the result is identical either way (ties break by scan order).
    """
    if not kind.is_2d:
        raise ValueError("patch sweep needs a 2D transform kind")
    if kind.shape != grid.image_shape:
        raise ValueError(f"grid {grid.image_shape} does not match {kind}")
    y = np.asarray(y, dtype=np.float64)
    if y.shape != (kind.n,):
        raise ValueError(f"signal shape {y.shape} does not match {kind}")
    if selector not in SELECTORS:
        raise ValueError(f"selector must be one of {SELECTORS}")
    anchors = candidate_anchors(grid)
    supports = [block_support(grid.image_shape, a, grid.patch_side) for a in anchors]
    idx_arrays = [s.as_array() for s in supports]

    def job(i):
        return _run_candidate(y, kind, k, T, idx_arrays[i], t, selector)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(job, range(len(anchors))))
    else:
        results = [job(i) for i in range(len(anchors))]

    norms = [(anchors[i], results[i][0]) for i in range(len(anchors))]
    best_i = 0
    for i in range(1, len(results)):
        if results[i][0] < results[best_i][0]:
            best_i = i
    best_xh = results[best_i][1]
    recovered = apply_values(best_xh, kind, inverse=True)
    if np.iscomplexobj(recovered):
        recovered = recovered.real
    return PatchReport(
        best_patch=supports[best_i],
        best_anchor=anchors[best_i],
        recovered_signal=recovered,
        best_norm=results[best_i][0],
        per_candidate_norms=norms,
    )
