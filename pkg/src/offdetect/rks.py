"""Random kitchen sink feature map approximating the Gaussian kernel.

Frequencies Omega_1..Omega_k are drawn i.i.d. from N(0, sigma^-2 I), the
Fourier transform of exp(-||x - y||^2 / (2 sigma^2)).  The explicit map

    Z(x) = sqrt(1/k) [cos(x^T Omega_1) ... cos(x^T Omega_k),
                      sin(x^T Omega_1) ... sin(x^T Omega_k)]

satisfies <Z(x), Z(y)> ~= K(x, y), so a linear model on Z-space stands in
for a kernel machine.  The output dimension D = 2k must be even.

Sampling uses numpy's seeded PCG64 generator; the same (d_in, D, sigma,
seed) always reproduces the same frequency matrix bit-for-bit, which is what
makes persisted models portable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import pdist

__all__ = [
    "PRNG_ID",
    "RksMap",
    "sample_map",
    "transform",
    "approx_kernel",
    "median_heuristic_sigma",
]

PRNG_ID = "numpy-pcg64"


@dataclass
class RksMap:
    """Sampled frequency matrix (d_in x k) plus the recipe that produced it."""

    omega: np.ndarray
    sigma: float
    seed: int

    @property
    def d_in(self) -> int:
        return self.omega.shape[0]

    @property
    def k(self) -> int:
        return self.omega.shape[1]

    @property
    def dim_out(self) -> int:
        return 2 * self.omega.shape[1]


def sample_map(d_in: int, dim_out: int, sigma: float, seed: int) -> RksMap:
    """Draw k = dim_out/2 Gaussian frequency columns with std 1/sigma."""
    if dim_out < 2 or dim_out % 2 != 0:
        raise ValueError(f"output dimension must be even (cos/sin pairs), got {dim_out}")
    if sigma <= 0:
        raise ValueError(f"bandwidth sigma must be positive, got {sigma}")
    if d_in < 1:
        raise ValueError(f"input dimension must be >= 1, got {d_in}")
    rng = np.random.default_rng(seed)
    omega = rng.standard_normal((d_in, dim_out // 2)) / sigma
    return RksMap(omega=omega, sigma=float(sigma), seed=int(seed))


def transform(rks: RksMap, x: np.ndarray) -> np.ndarray:
    """Map one vector (d_in,) or a batch (n, d_in) into Z-space (.., 2k).

    Layout is the cos block followed by the sin block; every output row has
    unit Euclidean norm by the Pythagorean identity.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != rks.d_in:
        raise ValueError(f"expected input dim {rks.d_in}, got {x.shape[-1]}")
    proj = x @ rks.omega
    z = np.concatenate([np.cos(proj), np.sin(proj)], axis=-1)
    return z * np.sqrt(1.0 / rks.k)


def approx_kernel(rks: RksMap, x: np.ndarray, y: np.ndarray) -> float:
    """Kernel estimate <Z(x), Z(y)>."""
    return float(np.dot(transform(rks, x), transform(rks, y)))


def median_heuristic_sigma(sample: np.ndarray, max_points: int = 1000, seed: int = 0) -> float:
    """Bandwidth = median pairwise distance over (a subsample of) the rows.

    At most ``max_points`` rows enter the O(n^2) distance computation,
    chosen by a seeded draw so the result is reproducible.  Falls back to
    1.0 when the median distance is zero (all points identical).
    """
    sample = np.asarray(sample, dtype=np.float64)
    if sample.ndim != 2 or sample.shape[0] < 2:
        raise ValueError("median heuristic needs at least 2 vectors")
    if sample.shape[0] > max_points:
        rng = np.random.default_rng(seed)
        idx = rng.choice(sample.shape[0], size=max_points, replace=False)
        sample = sample[np.sort(idx)]
    median = float(np.median(pdist(sample)))
    return median if median > 0.0 else 1.0
