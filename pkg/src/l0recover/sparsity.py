"""Hard-thresholding projections and support restrictions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class SupportSet:
    """Sorted distinct coordinate indices."""

    indices: tuple[int, ...]

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        object.__setattr__(self, "indices", idx)
        if any(i < 0 for i in idx):
            raise ValueError("support indices must be nonnegative")
        if any(a >= b for a, b in zip(idx, idx[1:])):
            raise ValueError("support indices must be strictly increasing")

    @classmethod
    def from_iterable(cls, indices) -> "SupportSet":
        return cls(tuple(sorted({int(i) for i in indices})))

    def as_array(self) -> np.ndarray:
        return np.asarray(self.indices, dtype=np.intp)

    def __len__(self):
        return len(self.indices)

    def __contains__(self, i):
        return int(i) in set(self.indices)


def _check_k(v: np.ndarray, k: int) -> int:
    k = int(k)
    if k < 0 or k > v.size:
        raise ValueError(f"k={k} out of range for length {v.size}")
    return k


def head(v, k: int) -> np.ndarray:
    """Keep the k entries of largest magnitude, zero the rest.

    Magnitude ties are broken toward the lower index. Complex entries are
    compared by modulus.
    """
    v = np.atleast_1d(np.asarray(v))
    k = _check_k(v, k)
    if k == 0:
        return np.zeros_like(v)
    if k >= v.size:
        return v.copy()
    order = np.argsort(-np.abs(v), kind="stable")
    out = np.zeros_like(v)
    keep = order[:k]
    out[keep] = v[keep]
    return out


def tail(v, k: int) -> np.ndarray:
    """Complement of head: v - head(v, k). head + tail reassemble v exactly."""
    v = np.atleast_1d(np.asarray(v))
    return v - head(v, k)


def head_support(v, k: int) -> SupportSet:
    """Indices that head(v, k) keeps (excluding entries that are exactly zero)."""
    kept = head(v, k)
    return SupportSet.from_iterable(np.nonzero(kept)[0])


def head_paired(v, k: int) -> np.ndarray:
    """Top-k selection that keeps conjugate-mirror pairs together.

    For a full-spectrum layout where index f mirrors index n-f, groups are
    the self-paired bins ({0}, and {n/2} for even n) and the pairs {f, n-f}.
    Groups are taken in decreasing energy order while they fit in the
    remaining budget; a selected pair consumes two of the k slots. Applied to
    a conjugate-symmetric vector the result stays conjugate-symmetric, so its
    inverse DFT stays real.
    """
    v = np.atleast_1d(np.asarray(v))
    k = _check_k(v, k)
    n = v.size
    groups = [(0,)]
    if n % 2 == 0 and n > 1:
        groups.append((n // 2,))
    groups += [(f, n - f) for f in range(1, (n + 1) // 2)]
    energy = np.array([np.sum(np.abs(v[list(g)]) ** 2) for g in groups])
    order = np.argsort(-energy, kind="stable")
    out = np.zeros_like(v)
    budget = k
    for gi in order:
        g = groups[gi]
        if len(g) <= budget:
            out[list(g)] = v[list(g)]
            budget -= len(g)
        if budget == 0:
            break
    return out


def restrict(v, support) -> np.ndarray:
    """Zero v outside the given support. Idempotent."""
    v = np.atleast_1d(np.asarray(v))
    if isinstance(support, SupportSet):
        idx = support.as_array()
    else:
        idx = np.atleast_1d(np.asarray(support, dtype=np.intp))
    if idx.size and (idx.min() < 0 or idx.max() >= v.size):
        raise ValueError(f"support index out of range for length {v.size}")
    out = np.zeros_like(v)
    out[idx] = v[idx]
    return out


def tail_ratio(v, k: int) -> float:
    """|tail(v, k)| / |v|; zero vectors count as perfectly sparse."""
    v = np.atleast_1d(np.asarray(v))
    total = float(np.linalg.norm(v))
    if total == 0.0:
        return 0.0
    return float(np.linalg.norm(tail(v, k))) / total
