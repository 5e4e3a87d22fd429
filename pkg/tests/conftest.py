import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "ci",
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("ci")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def make_smooth_image(side: int, seed: int) -> np.ndarray:
    """Low-frequency synthetic test image with values filling [0, 1]."""
    import scipy.fft

    rng = np.random.default_rng(seed)
    coeffs = np.zeros((side, side))
    low = max(2, side // 5)
    coeffs[:low, :low] = rng.standard_normal((low, low)) * 2.0
    coeffs[0, 0] = 10.0 + 4.0 * rng.uniform()
    img = scipy.fft.idct(
        scipy.fft.idct(coeffs, type=2, norm="ortho", axis=0), type=2, norm="ortho", axis=1
    )
    img = img - img.min()
    return img / img.max()


@pytest.fixture
def smooth_image():
    return make_smooth_image
