"""Pairwise kernel-matrix assembly with an optional compiled core.

Assembling ``K[i, j] = k(|P_i - Q_j|)`` over tube point clouds is the
dominant cost of the variational pipeline (it scales as the square of
the cloud size), so the two primitives here dispatch to a Cython
extension when it was built and to a numpy implementation otherwise.
Both paths are exercised by the test suite and compared by
``benchmarks/bench_kernels.py``.
"""

from __future__ import annotations

import numpy as np

from .errors import PreconditionError

try:
    from . import _fastkernels as _ext
except ImportError:  # pragma: no cover - depends on the build environment
    _ext = None

HAVE_EXTENSION = _ext is not None


def _as_cloud(p) -> np.ndarray:
    arr = np.ascontiguousarray(p, dtype=np.float64)
    if arr.ndim != 2:
        raise PreconditionError("point cloud must be a 2-D array of shape (count, dim)")
    return arr


def squared_distances(p, q, use_extension: bool | None = None) -> np.ndarray:
    """Matrix of pairwise squared Euclidean distances.

    Parameters
    ----------
    p, q : array_like, shape (N, dim) and (N', dim)
        Point clouds with a common coordinate dimension.
    use_extension : bool, optional
        Force the compiled path (True) or the numpy path (False).
        Default picks the extension when available.

    Returns
    -------
    ndarray, shape (N, N')
    """
    p = _as_cloud(p)
    q = _as_cloud(q)
    if p.shape[1] != q.shape[1]:
        raise PreconditionError("point clouds differ in coordinate dimension")
    if use_extension is None:
        use_extension = HAVE_EXTENSION
    if use_extension:
        if _ext is None:
            raise PreconditionError("compiled extension requested but not available")
        return _ext.squared_distances(p, q)
    # |p|^2 + |q|^2 - 2 p.q; the cross term is a GEMM. Cancellation can
    # leave tiny negatives for near-coincident points, so clip at zero.
    pp = np.einsum("ij,ij->i", p, p)
    qq = np.einsum("ij,ij->i", q, q)
    out = pp[:, None] + qq[None, :] - 2.0 * (p @ q.T)
    np.maximum(out, 0.0, out=out)
    return out


def gaussian_mix(p, q, amplitudes, rates, use_extension: bool | None = None) -> np.ndarray:
    """Matrix ``sum_m amplitudes[m] * exp(-rates[m] * |P_i - Q_j|^2)``.

    Covers every Gaussian-type radial kernel in the toolkit (single well
    and well/dimple mixtures) in one fused pass.
    """
    p = _as_cloud(p)
    q = _as_cloud(q)
    if p.shape[1] != q.shape[1]:
        raise PreconditionError("point clouds differ in coordinate dimension")
    amplitudes = np.ascontiguousarray(amplitudes, dtype=np.float64)
    rates = np.ascontiguousarray(rates, dtype=np.float64)
    if amplitudes.shape != rates.shape or amplitudes.ndim != 1:
        raise PreconditionError("amplitudes and rates must be 1-D arrays of equal length")
    if use_extension is None:
        use_extension = HAVE_EXTENSION
    if use_extension:
        if _ext is None:
            raise PreconditionError("compiled extension requested but not available")
        return _ext.gaussian_mix(p, q, amplitudes, rates)
    d2 = squared_distances(p, q, use_extension=False)
    out = np.zeros_like(d2)
    for amp, rate in zip(amplitudes, rates):
        out += amp * np.exp(-rate * d2)
    return out
