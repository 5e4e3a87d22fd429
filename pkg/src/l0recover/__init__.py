"""Sparse spectral recovery under bounded-count (L0) corruptions.

Recovers the dominant transform-domain coefficients of a signal whose
samples were corrupted in an unknown, bounded number of positions with
arbitrary magnitudes, by alternating hard-thresholding projections. Includes
a candidate-sweep variant that localizes one contiguous corrupted block,
verification oracles for the underlying isometry and uncertainty bounds, and
a CLI driving the image pipeline end to end.
"""

from .analysis import (
    BoundCheck,
    ErrorMetrics,
    RipReport,
    approx_sparse_instance,
    bruteforce_decode,
    error_metrics,
    exact_sparse_instance,
    iterate_error_trace,
    model_rip_constant,
    recovery_bound_check,
    uncertainty_check,
)
from .corruption import (
    CorruptionSpec,
    apply_corruption,
    circular_mask,
    overlay_patch,
    random_l0,
    worst_support_l0,
)
from .imageio import (
    ImageBuffer,
    blockwise_compress,
    blockwise_recover,
    load_image,
    save_image,
)
from .patchwise import (
    PatchGrid,
    PatchReport,
    block_support,
    candidate_anchors,
    patch_candidates,
    patchwise_iht,
)
from .recovery import RecoveryReport, SparsityBudget, compress, iht
from .sparsity import (
    SupportSet,
    head,
    head_paired,
    head_support,
    restrict,
    tail,
    tail_ratio,
)
from .transforms import (
    Family,
    Spectrum,
    TransformKind,
    coherence,
    dct2,
    dft,
    dst,
    forward,
    hadamard,
    inverse,
    materialize,
)

__version__ = "0.1.0"
