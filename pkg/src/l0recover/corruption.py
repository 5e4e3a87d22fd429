"""Seeded generators of bounded-count (L0) corruptions.

Three support strategies: uniformly random, the t brightest pixels, or a
contiguous square block. Magnitudes are Gaussian, constant, or "extreme"
(a multiple of the clean signal's peak). Every generator is a pure function
of (input, spec): identical seeds give identical output.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .sparsity import SupportSet

MODES = ("random_support", "largest_pixels", "contiguous_patch")
MAGNITUDES = ("gaussian", "constant", "extreme")


@dataclass(frozen=True)
class CorruptionSpec:
    """What to corrupt and how.

    ``t`` is the exact nonzero count for the sparse modes. For
    ``contiguous_patch`` the geometry is ``patch_side`` (+ optional fixed
    ``anchor``; None draws one from the seed) and ``circular`` carves the
    inscribed disk out of the square. ``scale`` is the Gaussian sigma, the
    constant value, or the extreme-mode multiple of max|signal|.
    """

    mode: str = "random_support"
    t: int = 0
    patch_side: int = 0
    anchor: tuple[int, int] | None = None
    circular: bool = False
    magnitude: str = "extreme"
    scale: float = 1e6
    seed: int = 0

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.magnitude not in MAGNITUDES:
            raise ValueError(f"magnitude must be one of {MAGNITUDES}")
        if self.t < 0:
            raise ValueError("t must be nonnegative")
        if self.magnitude == "constant" and self.scale == 0.0:
            raise ValueError("constant magnitude must be nonzero")
        if self.anchor is not None:
            object.__setattr__(self, "anchor", (int(self.anchor[0]), int(self.anchor[1])))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["anchor"] = list(self.anchor) if self.anchor is not None else None
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "CorruptionSpec":
        d = dict(d)
        if d.get("anchor") is not None:
            d["anchor"] = tuple(d["anchor"])
        return cls(**d)


def _magnitudes(x, count, spec, rng):
    if spec.magnitude == "gaussian":
        vals = rng.standard_normal(count) * spec.scale
        vals[vals == 0.0] = spec.scale  # keep the nonzero count exact
        return vals
    if spec.magnitude == "constant":
        return np.full(count, spec.scale)
    peak = float(np.abs(x).max(initial=0.0))
    amp = spec.scale * (peak if peak > 0.0 else 1.0)
    return amp * rng.choice([-1.0, 1.0], count)


def random_l0(x, spec: CorruptionSpec):
    """Additive noise with exactly t nonzeros: returns (y, e) with y = x + e.

    ``random_support`` draws the support without replacement from the seed;
    ``largest_pixels`` targets the t largest-magnitude samples instead.
    """
    x = np.asarray(x, dtype=np.float64).ravel()
    n = x.size
    t = spec.t
    if t > n:
        raise ValueError(f"t={t} exceeds signal length {n}")
    rng = np.random.default_rng(spec.seed)
    e = np.zeros(n)
    if t > 0:
        if spec.mode == "largest_pixels":
            support = np.argsort(-np.abs(x), kind="stable")[:t]
        elif spec.mode == "random_support":
            support = rng.choice(n, t, replace=False)
        else:
            raise ValueError("contiguous_patch corruption goes through overlay_patch")
        e[support] = _magnitudes(x, t, spec, rng)
    return x + e, e


def worst_support_l0(x, kind, k: int, t: int, seed: int = 0, multiplier: float = 1e6):
    """Greedy stress generator: spikes where the dominant atoms concentrate.

    Places t extreme-magnitude spikes on the samples with the largest summed
    correlation against the inverse-transform atoms of x's top-k
    coefficients. A heuristic only; it has no optimality claim, but it
    reliably produces harder cases than uniform supports.
    """
    from .transforms import apply_values, forward  # local import to avoid cycle

    x = np.asarray(x, dtype=np.float64).ravel()
    n = x.size
    if t > n:
        raise ValueError(f"t={t} exceeds signal length {n}")
    spectrum = forward(x, kind)
    top = np.argsort(-np.abs(spectrum), kind="stable")[:k]
    scores = np.zeros(n)
    for f in top:
        impulse = np.zeros(n, dtype=spectrum.dtype)
        impulse[f] = 1.0
        scores += np.abs(apply_values(impulse, kind, inverse=True))
    spikes = np.argsort(-scores, kind="stable")[:t]
    rng = np.random.default_rng(seed)
    peak = float(np.abs(x).max(initial=0.0))
    amp = multiplier * (peak if peak > 0.0 else 1.0)
    e = np.zeros(n)
    if t > 0:
        e[spikes] = amp * rng.choice([-1.0, 1.0], t)
    return x + e, e


def overlay_patch(image, patch_pixels, anchor, mask=None):
    """Replace a block of pixels, as a physical sticker would.

    ``patch_pixels`` values must lie in [0, 1]. ``mask`` (same shape, bool)
    limits the replacement, e.g. to an inscribed disk. Returns
    (y, e, support) where e = y - x and support is the set of replaced
    pixels (flat row-major indices).
    """
    x = np.asarray(image, dtype=np.float64)
    if x.ndim != 2:
        raise ValueError("overlay_patch expects a 2D image")
    patch = np.asarray(patch_pixels, dtype=np.float64)
    if patch.ndim != 2:
        raise ValueError("patch must be 2D")
    if patch.min(initial=0.0) < 0.0 or patch.max(initial=0.0) > 1.0:
        raise ValueError("patch values must lie in [0, 1]")
    r0, c0 = int(anchor[0]), int(anchor[1])
    pr, pc = patch.shape
    rows, cols = x.shape
    if r0 < 0 or c0 < 0 or r0 + pr > rows or c0 + pc > cols:
        raise ValueError(f"patch {patch.shape} at {anchor} exceeds image {x.shape}")
    if mask is None:
        mask = np.ones(patch.shape, dtype=bool)
    else:
        mask = np.asarray(mask, dtype=bool)
        if mask.shape != patch.shape:
            raise ValueError("mask shape must match patch shape")
    y = x.copy()
    region = y[r0 : r0 + pr, c0 : c0 + pc]
    region[mask] = patch[mask]
    rr, cc = np.nonzero(mask)
    flat = (rr + r0) * cols + (cc + c0)
    support = SupportSet.from_iterable(flat)
    return y, y - x, support


def circular_mask(side: int) -> np.ndarray:
    """Boolean inscribed disk for a side x side patch."""
    c = (side - 1) / 2.0
    rr, cc = np.mgrid[0:side, 0:side]
    return (rr - c) ** 2 + (cc - c) ** 2 <= (side / 2.0) ** 2


def apply_corruption(x, spec: CorruptionSpec, image_shape=None):
    """Dispatch a CorruptionSpec against a signal or image.

    Returns (y, e, support). Sparse modes work on the flat signal; the patch
    mode needs 2D data (or ``image_shape``) and replaces pixel values, with
    the replacement value derived from the magnitude setting but clamped to
    the valid pixel range.
    """
    x = np.asarray(x, dtype=np.float64)
    if spec.mode in ("random_support", "largest_pixels"):
        flat = x.ravel()
        y, e = random_l0(flat, spec)
        support = SupportSet.from_iterable(np.nonzero(e)[0])
        return y.reshape(x.shape), e.reshape(x.shape), support
    if x.ndim != 2:
        if image_shape is None:
            raise ValueError("contiguous_patch needs a 2D image or image_shape")
        x = x.reshape(image_shape)
    side = spec.patch_side
    if side < 1:
        raise ValueError("contiguous_patch needs patch_side >= 1")
    rng = np.random.default_rng(spec.seed)
    if spec.magnitude == "gaussian":
        patch = np.clip(0.5 + spec.scale * rng.standard_normal((side, side)), 0.0, 1.0)
    elif spec.magnitude == "constant":
        patch = np.clip(np.full((side, side), spec.scale), 0.0, 1.0)
    else:
        patch = np.ones((side, side))
    anchor = spec.anchor
    if anchor is None:
        rows, cols = x.shape
        anchor = (
            int(rng.integers(0, rows - side + 1)),
            int(rng.integers(0, cols - side + 1)),
        )
    mask = circular_mask(side) if spec.circular else None
    return overlay_patch(x, patch, anchor, mask=mask)
