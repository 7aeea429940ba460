"""Discretized shell convolution operator and its spectrum.

The continuum object is the integral operator on L^2(S, omega) with
kernel ``vhat(s - s')``. On a quadrature mesh it is represented by the
weight-symmetrized Hermitian matrix

    A_ij = sqrt(w_i) * vhat(s_i - s_j) * sqrt(w_j),

whose eigenvalues approximate the operator's and whose eigenvectors,
divided by sqrt(w), sample its eigenfunctions. Negative eigenvalues of
this operator are what the variational pipeline converts into certified
bound states of the full Hamiltonian.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConsistencyError, PreconditionError
from .potentials import Potential, require_band
from .surface import SurfaceMesh

__all__ = [
    "SurfaceOperatorMatrix",
    "assemble",
    "circulant_oracle",
    "count_negative",
    "point_matrix_test",
]


@dataclass(frozen=True)
class SurfaceOperatorMatrix:
    """Spectral data of an assembled shell operator.

    Attributes
    ----------
    mesh : SurfaceMesh
    matrix : ndarray, shape (M, M)
        The weight-symmetrized Hermitian matrix A.
    eigenvalues : ndarray, shape (M,)
        Ascending.
    eigenvectors : ndarray, shape (M, M)
        Orthonormal columns, aligned with ``eigenvalues``.
    eigenfunctions : ndarray, shape (M, M)
        Columns ``Psi_j(s_i) = eigenvectors[i, j] / sqrt(w_i)``, the
        quadrature samples of the operator's eigenfunctions.
    """

    mesh: SurfaceMesh
    matrix: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    eigenfunctions: np.ndarray

    @property
    def norm(self) -> float:
        """Spectral norm of A."""
        return float(np.max(np.abs(self.eigenvalues))) if self.eigenvalues.size else 0.0


def _hermitize(a: np.ndarray, what: str) -> np.ndarray:
    deviation = np.abs(a - a.conj().T).max() if a.size else 0.0
    scale = max(1.0, np.abs(a).max()) if a.size else 1.0
    if deviation > 1e-12 * scale:
        raise ConsistencyError(
            f"{what} deviates from Hermitian by {deviation:.3e}; "
            "the transform convention upstream is broken"
        )
    return 0.5 * (a + a.conj().T)


def assemble(mesh: SurfaceMesh, potential: Potential) -> SurfaceOperatorMatrix:
    """Assemble and fully diagonalize the shell operator matrix.

    Raises
    ------
    PreconditionError
        If mesh and potential dimensions differ.
    ConsistencyError
        If the assembled matrix is not Hermitian within 1e-12 relative
        tolerance.
    """
    if mesh.dimension != potential.dimension:
        raise PreconditionError("mesh and potential dimensions differ")
    require_band(potential, 2.0 * mesh.radius)
    kernel = potential.kernel_matrix(mesh.nodes)
    sqrt_w = np.sqrt(mesh.weights)
    a = _hermitize(sqrt_w[:, None] * kernel * sqrt_w[None, :], "assembled operator matrix")
    eigenvalues, eigenvectors = np.linalg.eigh(a)
    return SurfaceOperatorMatrix(
        mesh=mesh,
        matrix=a,
        eigenvalues=eigenvalues,
        eigenvectors=eigenvectors,
        eigenfunctions=eigenvectors / sqrt_w[:, None],
    )


def circulant_oracle(mesh: SurfaceMesh, potential: Potential) -> np.ndarray:
    """Independent spectrum via the discrete Fourier transform.

    For a radial potential on a uniform circle mesh the kernel depends
    only on the angle difference, so the assembled matrix is circulant
    and its eigenvalues are the weight times the DFT of the first kernel
    row. Returned sorted ascending; they approximate the continuum
    angular eigenvalues ``E_m = R * integral k(theta) exp(-i m theta)``.
    """
    if mesh.dimension != 2 or not mesh.uniform:
        raise PreconditionError("circulant route needs a uniform circle mesh")
    if not potential.is_radial:
        raise PreconditionError("circulant route needs a radial potential")
    row = np.asarray(potential.kernel_matrix(mesh.nodes[:1], mesh.nodes))[0]
    weight = float(mesh.weights[0])
    spectrum = weight * np.fft.fft(row)
    # symmetric real row: the transform is real up to roundoff
    return np.sort(spectrum.real)


def count_negative(op: SurfaceOperatorMatrix, threshold: float | None = None) -> int:
    """Number of eigenvalues below ``-threshold``.

    The default threshold ``1e-8 * max(1, ||A||)`` scales with the
    operator because the continuum spectrum accumulates at zero: a fixed
    absolute cutoff would make the count mesh-dependent in an
    uncontrolled way.
    """
    if threshold is None:
        threshold = 1e-8 * max(1.0, op.norm)
    threshold = float(threshold)
    if threshold <= 0.0:
        raise PreconditionError("threshold must be positive")
    return int(np.count_nonzero(op.eigenvalues < -threshold))


def point_matrix_test(potential: Potential, points, tolerance: float = 1e-12):
    """Negative-definiteness test of the kernel matrix on arbitrary shell points.

    Builds the Hermitian matrix ``B_jk = vhat(s_j - s_k)`` and reports
    whether its largest eigenvalue is below ``-tolerance``. For any
    nonpositive V that is not identically zero this matrix is negative
    definite for every choice of pairwise distinct points (the positive
    definiteness of transforms of nonnegative finite measures applied to
    -V), which makes the test a sharp smoke detector for convention
    errors.

    Returns
    -------
    (matrix, is_negative_definite) : (ndarray, bool)
    """
    points = np.atleast_2d(np.asarray(points, dtype=np.float64))
    if points.shape[0] >= 2:
        diffs = points[:, None, :] - points[None, :, :]
        dist2 = np.sum(diffs * diffs, axis=-1)
        off = dist2[~np.eye(points.shape[0], dtype=bool)]
        if off.min() == 0.0:
            raise PreconditionError("points must be pairwise distinct")
    matrix = _hermitize(np.asarray(potential.kernel_matrix(points)), "point kernel matrix")
    largest = float(np.linalg.eigvalsh(matrix)[-1])
    return matrix, bool(largest < -float(tolerance))
