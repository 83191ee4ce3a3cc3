import numpy as np
import pytest

from etstable import _kernels_py
from etstable.measures import SpectralMeasure

try:
    from etstable import _kernels as _kernels_cy
except ImportError:
    _kernels_cy = None

KERNEL_MODULES = [pytest.param(_kernels_py, id="python")]
if _kernels_cy is not None:
    KERNEL_MODULES.append(pytest.param(_kernels_cy, id="cython"))


@pytest.fixture(params=KERNEL_MODULES)
def kernel_module(request):
    return request.param


def random_measure(rng: np.random.Generator, k: int = 4, dim: int = 2) -> SpectralMeasure:
    """Random atoms with norms in [0.3, 2]."""
    locs = rng.normal(size=(k, dim))
    locs *= (rng.uniform(0.3, 2.0, size=k) / np.linalg.norm(locs, axis=1))[:, None]
    weights = rng.uniform(0.2, 1.0, size=k)
    return SpectralMeasure(locs, weights)


def random_probes(rng: np.random.Generator, count: int, dim: int = 2, radius: float = 6.0) -> np.ndarray:
    """Probes uniform in a ball of the given radius."""
    u = rng.normal(size=(count, dim))
    r = radius * rng.uniform(size=count) ** (1.0 / dim)
    return u * (r / np.linalg.norm(u, axis=1))[:, None]


def mc_bound(count: int) -> float:
    """Monte Carlo tolerance 4 / sqrt(count) for empirical CF checks."""
    return 4.0 / np.sqrt(count)
