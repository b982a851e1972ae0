"""Symmetric degree-two kernels with closed-form population targets.

Four kernels are shipped, each estimating a classical functional
theta = E h(X1, X2):

* ``variance``        h(x,y) = (x-y)^2 / 2          (scalar inputs)
* ``gmd``             h(x,y) = |x-y|                 (scalar inputs)
* ``spatial-kendall`` h(x,y) = (x1-y1)(x2-y2)/|x-y|^2 * 1{x != y}   (2-vectors)
* ``mmd-gauss``       paired two-sample MMD^2 kernel with Gaussian base
                       k(u,w) = exp(-|u-w|^2/2)      (pairs (x, y))

All evaluation functions are pure and literally symmetric in their two
arguments: swapping them produces bit-identical results.  Where the target
theta (and the first-projection variance sigma^2) admit closed forms under
the shipped sampling distributions, ``true_theta`` / ``true_sigma2`` return
them; otherwise they return None.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "DistParams",
    "Kernel",
    "KERNEL_IDS",
    "get_kernel",
    "eval_kernel",
    "true_theta",
    "true_sigma2",
]


@dataclass(frozen=True)
class DistParams:
    """Sampling distribution for simulations and closed-form lookups.

    family: "gaussian" (mean/variance), "t10", "laplace" (unit variance,
    density exp(-sqrt(2)|x|)/sqrt(2)), or "elliptical" (bivariate, shape
    correlation rho, tail mixer one of "gaussian"/"t10"/"laplace").
    ``shift`` is the two-sample mean shift used only by the MMD kernel.
    """

    family: str = "gaussian"
    mean: float = 0.0
    variance: float = 1.0
    rho: float = 0.6
    mixer: str = "gaussian"
    shift: float = 0.0

    def __post_init__(self) -> None:
        if self.family not in ("gaussian", "t10", "laplace", "elliptical"):
            raise ValueError(f"unknown family {self.family!r}")
        if self.variance <= 0.0:
            raise ValueError("variance must be > 0")
        if not -1.0 <= self.rho <= 1.0:
            raise ValueError("rho must be in [-1,1]")
        if self.mixer not in ("gaussian", "t10", "laplace"):
            raise ValueError(f"unknown mixer {self.mixer!r}")


def _as_points(pts, dim: int) -> np.ndarray:
    a = np.asarray(pts, dtype=float)
    if dim == 1:
        if a.ndim != 1:
            raise ValueError(f"expected scalar points, got shape {a.shape}")
    else:
        if a.ndim != 2 or a.shape[1] != 2:
            raise ValueError(f"expected 2-column points, got shape {a.shape}")
    return a


def _as_point(x, dim: int):
    if dim == 1:
        if np.ndim(x) != 0:
            raise ValueError(f"expected a scalar point, got {x!r}")
        return float(x)
    a = np.asarray(x, dtype=float)
    if a.shape != (2,):
        raise ValueError(f"expected a 2-vector point, got shape {a.shape}")
    return a


class Kernel:
    """A symmetric degree-two kernel plus its vectorized evaluators.

    ``point_dim`` is 1 for scalar observations, 2 for 2-vectors (spatial
    Kendall) and pairs (x, y) of a two-sample stream (MMD).
    """

    def __init__(self, kernel_id: str, point_dim: int):
        self.id = kernel_id
        self.point_dim = point_dim

    # subclasses implement the three evaluation surfaces
    def pair(self, a, b) -> float:
        raise NotImplementedError

    def cross(self, pts: np.ndarray, x) -> np.ndarray:
        """h(x, X_j) for every row X_j of pts; the O(n) inner loop of a push."""
        raise NotImplementedError

    def pairwise(self, pts) -> np.ndarray:
        """Full n x n matrix h(X_i, X_j), diagonal included."""
        raise NotImplementedError

    def diag_value(self, x) -> float:
        return self.pair(x, x)


class _VarianceKernel(Kernel):
    def __init__(self):
        super().__init__("variance", 1)

    def pair(self, a, b) -> float:
        d = _as_point(a, 1) - _as_point(b, 1)
        return 0.5 * d * d

    def cross(self, pts, x):
        d = pts - x
        return 0.5 * d * d

    def pairwise(self, pts):
        pts = _as_points(pts, 1)
        d = pts[:, None] - pts[None, :]
        return 0.5 * d * d


class _GmdKernel(Kernel):
    def __init__(self):
        super().__init__("gmd", 1)

    def pair(self, a, b) -> float:
        return abs(_as_point(a, 1) - _as_point(b, 1))

    def cross(self, pts, x):
        return np.abs(pts - x)

    def pairwise(self, pts):
        pts = _as_points(pts, 1)
        return np.abs(pts[:, None] - pts[None, :])


class _SpatialKendallKernel(Kernel):
    # indicator uses exact float equality: ties are measure-zero under
    # continuous laws and only duplicated inputs hit the guard
    def __init__(self):
        super().__init__("spatial-kendall", 2)

    def pair(self, a, b) -> float:
        a = _as_point(a, 2)
        b = _as_point(b, 2)
        d0 = a[0] - b[0]
        d1 = a[1] - b[1]
        den = d0 * d0 + d1 * d1
        if den == 0.0:
            return 0.0
        return (d0 * d1) / den

    def cross(self, pts, x):
        d = pts - np.asarray(x, dtype=float)
        num = d[:, 0] * d[:, 1]
        den = d[:, 0] * d[:, 0] + d[:, 1] * d[:, 1]
        out = np.zeros(len(pts))
        np.divide(num, den, out=out, where=den > 0.0)
        return out

    def pairwise(self, pts):
        pts = _as_points(pts, 2)
        d0 = pts[:, None, 0] - pts[None, :, 0]
        d1 = pts[:, None, 1] - pts[None, :, 1]
        num = d0 * d1
        den = d0 * d0 + d1 * d1
        out = np.zeros_like(num)
        np.divide(num, den, out=out, where=den > 0.0)
        return out


class _MmdGaussKernel(Kernel):
    # base kernel bandwidth fixed at 1; grouping (kxx+kyy)-(kxy+kyx) keeps
    # the float result bit-identical under argument swap
    def __init__(self):
        super().__init__("mmd-gauss", 2)

    @staticmethod
    def _k(u, w):
        d = u - w
        return np.exp(-0.5 * d * d)

    def pair(self, a, b) -> float:
        a = _as_point(a, 2)
        b = _as_point(b, 2)
        kxx = self._k(a[0], b[0])
        kyy = self._k(a[1], b[1])
        kxy = self._k(a[0], b[1])
        kyx = self._k(a[1], b[0])
        return float((kxx + kyy) - (kxy + kyx))

    def cross(self, pts, x):
        z = np.asarray(x, dtype=float)
        kxx = self._k(pts[:, 0], z[0])
        kyy = self._k(pts[:, 1], z[1])
        kxy = self._k(pts[:, 0], z[1])
        kyx = self._k(pts[:, 1], z[0])
        return (kxx + kyy) - (kxy + kyx)

    def pairwise(self, pts):
        pts = _as_points(pts, 2)
        x = pts[:, 0]
        y = pts[:, 1]
        kxx = self._k(x[:, None], x[None, :])
        kyy = self._k(y[:, None], y[None, :])
        kxy = self._k(x[:, None], y[None, :])
        return (kxx + kyy) - (kxy + kxy.T)


_KERNELS: dict[str, Kernel] = {
    "variance": _VarianceKernel(),
    "gmd": _GmdKernel(),
    "spatial-kendall": _SpatialKendallKernel(),
    "mmd-gauss": _MmdGaussKernel(),
}

KERNEL_IDS = tuple(_KERNELS)


def get_kernel(kernel_id: str) -> Kernel:
    """Look up a kernel by its id string."""
    try:
        return _KERNELS[kernel_id]
    except KeyError:
        raise KeyError(
            f"unknown kernel {kernel_id!r}; available: {list(_KERNELS)}"
        ) from None


def eval_kernel(kernel_id: str, a, b) -> float:
    """Evaluate h(a, b) for the named kernel; symmetric in (a, b)."""
    return get_kernel(kernel_id).pair(a, b)


def true_theta(kernel_id: str, d: DistParams) -> float | None:
    """Closed-form theta = E h(X1, X2) where available, else None.

    Variance: the distribution's variance.  GMD: 2*sqrt(v/pi) for Gaussian,
    3/(2 sqrt 2) for the unit-variance Laplace.  Spatial Kendall under an
    elliptical law: (1 - sqrt(1-rho^2))/(2 rho), extended to 0 at rho=0 by
    continuity.  MMD: 0 whenever shift=0 (P=Q); for Gaussian data the
    shifted form (2/sqrt(1+2v)) (1 - exp(-shift^2/(2(1+2v)))).
    """
    get_kernel(kernel_id)
    if kernel_id == "variance":
        if d.family == "gaussian":
            return d.variance
        if d.family == "t10":
            return 10.0 / 8.0
        if d.family == "laplace":
            return 1.0
        return None
    if kernel_id == "gmd":
        if d.family == "gaussian":
            return 2.0 * math.sqrt(d.variance / math.pi)
        if d.family == "laplace":
            return 3.0 / (2.0 * math.sqrt(2.0))
        return None
    if kernel_id == "spatial-kendall":
        if d.family != "elliptical":
            return None
        if d.rho == 0.0:
            return 0.0
        return (1.0 - math.sqrt(1.0 - d.rho * d.rho)) / (2.0 * d.rho)
    # mmd-gauss
    if d.shift == 0.0:
        return 0.0
    if d.family == "gaussian":
        w = 1.0 + 2.0 * d.variance
        return (2.0 / math.sqrt(w)) * (1.0 - math.exp(-d.shift * d.shift / (2.0 * w)))
    return None


def true_sigma2(kernel_id: str, d: DistParams) -> float | None:
    """Closed-form first-projection variance sigma^2 where available, else None."""
    get_kernel(kernel_id)
    if kernel_id == "variance" and d.family == "gaussian":
        return d.variance * d.variance / 2.0
    if kernel_id == "gmd" and d.family == "gaussian":
        return d.variance * (1.0 / 3.0 + (2.0 * math.sqrt(3.0) - 4.0) / math.pi)
    if kernel_id == "mmd-gauss" and d.shift == 0.0:
        return 0.0
    return None
