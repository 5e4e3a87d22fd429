"""Orthonormal transforms: DFT, DCT-II, DST-II and Walsh-Hadamard, in 1D and 2D.

Every family is unitary, i.e. the matrix G applied by :func:`forward`
satisfies G @ G.conj().T == I, the inverse is the conjugate transpose, and
norms are preserved. The fixed conventions are

    DFT        G[j, k] = exp(-2j*pi*j*k/n) / sqrt(n)
    DCT-II     G[k, j] = c_k * cos(pi*k*(2j+1)/(2n)),   c_0 = sqrt(1/n), else sqrt(2/n)
    DST-II     G[k, j] = s_k * sin(pi*(k+1)*(2j+1)/(2n)), s_{n-1} = sqrt(1/n), else sqrt(2/n)
    Hadamard   G = H_n / sqrt(n) in Sylvester ordering, n a power of two

2D kinds act on row-major flattened grids: the 1D transform is applied to
every row, then to every column. The flat matrix is then the Kronecker
product of the two axis matrices.

Fast paths (scipy.fft / numpy.fft / a vectorized Walsh-Hadamard butterfly)
are used for application; :func:`materialize` builds the dense matrix so the
two routes can be checked against each other.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
import scipy.fft
import scipy.linalg

MATERIALIZE_LIMIT = 4096


class Family(str, enum.Enum):
    DFT = "dft"
    DCT2 = "dct2"
    DST = "dst"
    HADAMARD = "hadamard"


@dataclass(frozen=True)
class TransformKind:
    """A transform family together with the grid it acts on.

    ``shape`` is ``(n,)`` for 1D signals or ``(rows, cols)`` for images that
    are handled as row-major flattened vectors of length rows*cols.
    """

    family: Family
    shape: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        shape = tuple(int(s) for s in np.atleast_1d(self.shape))
        object.__setattr__(self, "shape", shape)
        if len(shape) not in (1, 2):
            raise ValueError(f"shape must have 1 or 2 axes, got {shape}")
        if any(s < 1 for s in shape):
            raise ValueError(f"axis lengths must be positive, got {shape}")
        if self.family is Family.HADAMARD:
            for s in shape:
                if s & (s - 1):
                    raise ValueError(
                        f"Hadamard axis lengths must be powers of two, got {shape}"
                    )

    @property
    def n(self) -> int:
        return math.prod(self.shape)

    @property
    def is_2d(self) -> bool:
        return len(self.shape) == 2

    @property
    def is_complex(self) -> bool:
        return self.family is Family.DFT

    def __str__(self):
        dims = "x".join(str(s) for s in self.shape)
        return f"{self.family.value}[{dims}]"


def dft(*shape) -> TransformKind:
    return TransformKind(Family.DFT, shape)


def dct2(*shape) -> TransformKind:
    return TransformKind(Family.DCT2, shape)


def dst(*shape) -> TransformKind:
    return TransformKind(Family.DST, shape)


def hadamard(*shape) -> TransformKind:
    return TransformKind(Family.HADAMARD, shape)


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Coefficient vector in the transform domain, tagged with its kind."""

    values: np.ndarray
    kind: TransformKind

    def __post_init__(self):
        values = np.atleast_1d(np.asarray(self.values))
        object.__setattr__(self, "values", values)
        if values.ndim != 1 or values.size != self.kind.n:
            raise ValueError(
                f"spectrum length {values.shape} does not match {self.kind}"
            )

    def __len__(self):
        return self.values.size


def _fwht(a: np.ndarray) -> np.ndarray:
    """Unnormalized Walsh-Hadamard butterfly along the last axis."""
    n = a.shape[-1]
    lead = a.shape[:-1]
    out = a.reshape(-1, n).copy()
    h = 1
    while h < n:
        out = out.reshape(-1, n // (2 * h), 2, h)
        top = out[:, :, 0, :] + out[:, :, 1, :]
        bot = out[:, :, 0, :] - out[:, :, 1, :]
        out = np.stack([top, bot], axis=2).reshape(-1, n)
        h *= 2
    return out.reshape(*lead, n)


def _apply_1d(values, family, inverse):
    n = values.shape[-1]
    if family is Family.DFT:
        if inverse:
            return np.fft.ifft(values, axis=-1) * math.sqrt(n)
        return np.fft.fft(values, axis=-1) / math.sqrt(n)
    if family is Family.DCT2:
        fn = scipy.fft.idct if inverse else scipy.fft.dct
    elif family is Family.DST:
        fn = scipy.fft.idst if inverse else scipy.fft.dst
    else:  # Hadamard is its own inverse once normalized
        return _fwht(values) / math.sqrt(n)
    if np.iscomplexobj(values):
        return fn(values.real, type=2, norm="ortho", axis=-1) + 1j * fn(
            values.imag, type=2, norm="ortho", axis=-1
        )
    return fn(values, type=2, norm="ortho", axis=-1)


def apply_values(values: np.ndarray, kind: TransformKind, inverse: bool = False) -> np.ndarray:
    """Apply the transform along the last axis of a (batched) value array.

    Accepts shape (..., n); 2D kinds reshape the last axis to the grid and
    run the 1D pass over rows then columns.
    """
    values = np.asarray(values)
    if values.shape[-1] != kind.n:
        raise ValueError(f"length {values.shape[-1]} does not match {kind}")
    if not kind.is_2d:
        return _apply_1d(values, kind.family, inverse)
    rows, cols = kind.shape
    grid = values.reshape(*values.shape[:-1], rows, cols)
    grid = _apply_1d(grid, kind.family, inverse)  # each row
    grid = np.swapaxes(grid, -1, -2)
    grid = _apply_1d(grid, kind.family, inverse)  # each column
    grid = np.swapaxes(grid, -1, -2)
    return grid.reshape(*values.shape[:-1], kind.n)


def forward(signal, kind: TransformKind) -> np.ndarray:
    """Transform a real sample-domain signal into its coefficient vector."""
    x = np.asarray(signal, dtype=np.float64)
    if x.shape != (kind.n,):
        raise ValueError(f"signal shape {x.shape} does not match {kind}")
    return apply_values(x, kind)


def inverse(spectrum, kind: TransformKind | None = None, *, allow_complex: bool = False):
    """Map a coefficient vector back to the sample domain.

    Accepts a :class:`Spectrum` or a plain array (then ``kind`` is required).
    DFT coefficient vectors must be conjugate-symmetric to represent a real
    signal; anything else raises unless ``allow_complex`` is set, in which
    case the complex samples are returned as-is.
    """
    if isinstance(spectrum, Spectrum):
        if kind is not None and kind != spectrum.kind:
            raise ValueError(f"kind mismatch: {kind} vs {spectrum.kind}")
        kind = spectrum.kind
        spectrum = spectrum.values
    if kind is None:
        raise ValueError("kind is required when passing raw values")
    values = np.atleast_1d(np.asarray(spectrum))
    if values.shape != (kind.n,):
        raise ValueError(f"spectrum shape {values.shape} does not match {kind}")
    out = apply_values(values, kind, inverse=True)
    if not np.iscomplexobj(out):
        return out
    if allow_complex:
        return out
    scale = max(1.0, float(np.abs(out.real).max(initial=0.0)))
    if float(np.abs(out.imag).max(initial=0.0)) > 1e-9 * scale:
        raise ValueError(
            "coefficients are not conjugate-symmetric; no real signal exists "
            "(pass allow_complex=True for the complex samples)"
        )
    return out.real


def _axis_matrix(family: Family, n: int) -> np.ndarray:
    if n > MATERIALIZE_LIMIT:
        raise ValueError(f"axis length {n} exceeds materialize limit {MATERIALIZE_LIMIT}")
    j = np.arange(n)
    if family is Family.DFT:
        return np.exp(-2j * np.pi * np.outer(j, j) / n) / math.sqrt(n)
    if family is Family.DCT2:
        mat = np.sqrt(2.0 / n) * np.cos(np.pi * np.outer(j, 2 * j + 1) / (2 * n))
        mat[0, :] /= math.sqrt(2)
        return mat
    if family is Family.DST:
        mat = np.sqrt(2.0 / n) * np.sin(np.pi * np.outer(j + 1, 2 * j + 1) / (2 * n))
        mat[-1, :] /= math.sqrt(2)
        return mat
    return scipy.linalg.hadamard(n).astype(np.float64) / math.sqrt(n)


def materialize(kind: TransformKind) -> np.ndarray:
    """Dense matrix G with forward(x) == G @ x. Guarded against huge n."""
    if kind.n > MATERIALIZE_LIMIT:
        raise ValueError(f"n={kind.n} exceeds materialize limit {MATERIALIZE_LIMIT}")
    if not kind.is_2d:
        return _axis_matrix(kind.family, kind.shape[0])
    rows_mat = _axis_matrix(kind.family, kind.shape[0])
    cols_mat = _axis_matrix(kind.family, kind.shape[1])
    # row-major flattening: vec(A X B^T) = kron(A, B) vec(X)
    return np.kron(rows_mat, cols_mat)


def coherence(kind: TransformKind) -> float:
    """Largest entry modulus of the transform matrix.

    Always O(1/sqrt(n)) for the supported families; for DFT and Hadamard it
    is exactly 1/sqrt(n). Computed per axis, so 2D kinds are not subject to
    the materialize limit on the full n.
    """
    if kind.family in (Family.DFT, Family.HADAMARD):
        return 1.0 / math.sqrt(kind.n)
    per_axis = [float(np.abs(_axis_matrix(kind.family, s)).max()) for s in kind.shape]
    return math.prod(per_axis)
