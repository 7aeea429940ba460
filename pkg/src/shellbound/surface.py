"""Quadrature meshes on extremum shells and tubular coordinates around them.

Only origin-centered circles (n=2) and spheres (n=3) are supported; the
normal field is then ``n(s) = s/|s|`` and the tubular volume Jacobian
``rho(s, t) = ((R + t)/R)^(n-1)`` is independent of the surface point.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError

__all__ = ["SurfaceMesh", "TubularChart", "build_mesh", "tubular_chart"]


@dataclass(frozen=True)
class SurfaceMesh:
    """Quadrature nodes and weights on the shell |s| = R.

    Attributes
    ----------
    dimension : int
        Ambient dimension (2 for a circle, 3 for a sphere).
    radius : float
        Shell radius R.
    nodes : ndarray, shape (M, dimension)
        Points on the shell.
    weights : ndarray, shape (M,)
        Positive quadrature weights; they sum to the surface measure
        (2 pi R or 4 pi R^2).
    uniform : bool
        True for the equal-weight uniform circle mesh; enables the
        circulant fast path.
    """

    dimension: int
    radius: float
    nodes: np.ndarray
    weights: np.ndarray
    uniform: bool

    @property
    def size(self) -> int:
        return self.nodes.shape[0]

    def normals(self) -> np.ndarray:
        """Outward unit normals n(s) = s/|s| at the nodes."""
        return self.nodes / np.linalg.norm(self.nodes, axis=1, keepdims=True)

    def integrate(self, values) -> complex:
        """Quadrature sum of node samples against the surface measure."""
        return np.asarray(values) @ self.weights


def build_mesh(surface_radius, dimension: int, resolution: int) -> SurfaceMesh:
    """Build a quadrature mesh on the shell of the given radius.

    Parameters
    ----------
    surface_radius : float
        Shell radius R > 0.
    dimension : int
        2 builds ``resolution`` equally spaced angles with equal weights
        (spectrally accurate for smooth integrands); 3 builds a product
        rule with ``resolution`` Gauss-Legendre polar nodes and
        ``2 * resolution`` uniform azimuth nodes.
    resolution : int
        Must be at least 4.
    """
    radius = float(surface_radius)
    if not np.isfinite(radius) or radius <= 0.0:
        raise ConfigurationError("surface_radius must be positive")
    resolution = int(resolution)
    if resolution < 4:
        raise ConfigurationError("resolution must be at least 4")
    if dimension == 2:
        angles = 2.0 * np.pi * np.arange(resolution) / resolution
        nodes = radius * np.stack([np.cos(angles), np.sin(angles)], axis=1)
        weights = np.full(resolution, 2.0 * np.pi * radius / resolution)
        return SurfaceMesh(2, radius, nodes, weights, uniform=True)
    if dimension == 3:
        # int_S f domega = R^2 int_{-1}^{1} dc int_0^{2pi} dphi f(theta(c), phi)
        cos_nodes, cos_weights = np.polynomial.legendre.leggauss(resolution)
        n_phi = 2 * resolution
        phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
        sin_theta = np.sqrt(1.0 - cos_nodes**2)
        x = np.outer(sin_theta, np.cos(phi)).ravel()
        y = np.outer(sin_theta, np.sin(phi)).ravel()
        z = np.repeat(cos_nodes, n_phi)
        nodes = radius * np.stack([x, y, z], axis=1)
        weights = radius**2 * (2.0 * np.pi / n_phi) * np.repeat(cos_weights, n_phi)
        return SurfaceMesh(3, radius, nodes, weights, uniform=False)
    raise ConfigurationError("dimension must be 2 or 3")


@dataclass(frozen=True)
class TubularChart:
    """Tubular coordinates L(s, t) = s + t n(s) on S x (-r, r).

    The half-width r stays strictly inside the shell radius so the map
    remains a diffeomorphism onto its image.
    """

    mesh: SurfaceMesh
    half_width: float

    def map(self, nodes, t):
        """Offset surface points along their normals.

        Parameters
        ----------
        nodes : ndarray, shape (..., dimension)
            Points on the shell.
        t : float or broadcastable array
            Signed normal offsets, |t| < half_width.
        """
        nodes = np.asarray(nodes, dtype=np.float64)
        normals = nodes / np.linalg.norm(nodes, axis=-1, keepdims=True)
        return nodes + np.asarray(t)[..., None] * normals

    def jacobian(self, t):
        """Volume Jacobian rho(t) = ((R + t)/R)^(n-1); rho(0) = 1.

        Independent of the surface point for origin-centered shells.
        """
        ratio = (self.mesh.radius + np.asarray(t, dtype=np.float64)) / self.mesh.radius
        return ratio ** (self.mesh.dimension - 1)


def tubular_chart(mesh: SurfaceMesh, half_width_fraction: float = 0.25) -> TubularChart:
    """Chart of half-width ``half_width_fraction * R`` around the mesh shell.

    Fractions above 0.5 are rejected to keep a safety margin inside the
    diffeomorphism region.
    """
    fraction = float(half_width_fraction)
    if not 0.0 < fraction <= 0.5:
        raise ConfigurationError("half_width_fraction must lie in (0, 0.5]")
    return TubularChart(mesh=mesh, half_width=fraction * mesh.radius)
