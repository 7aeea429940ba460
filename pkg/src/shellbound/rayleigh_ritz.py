"""Variational certificates from shell-concentrated trial functions.

The trial functions are products of a transverse bump squeezed into an
epsilon-tube around the shell with surface eigenfunctions of the shell
operator. The quadratic form of H - m on the span of N such functions
is an N x N Hermitian matrix h(eps); if it is negative definite for some
eps, H has at least N eigenvalues below m. As eps -> 0,

    h(eps) -> diag(E_1, ..., E_N)

with the shell-operator eigenvalues E_j, at a linear-in-eps rate: the
kinetic term is O(eps) and the kernel smearing is O(eps) as well, so the
convergence table reported by :func:`certify` should contract by about
one half per halving of eps.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConsistencyError, PreconditionError
from .potentials import Potential, require_band
from .surface import SurfaceMesh, TubularChart, tubular_chart
from .surface_operator import assemble, count_negative
from .symbols import DispersionSymbol

__all__ = [
    "TransverseProfile",
    "Certificate",
    "kinetic_form",
    "potential_form",
    "certify",
]

DEFAULT_SCHEDULE = (0.2, 0.1, 0.05, 0.025)


@dataclass(frozen=True)
class TransverseProfile:
    """Smooth compactly supported bump on (-1, 1) with unit integral.

    The normalization is defined through the stored Gauss-Legendre rule,
    so integrating the profile with its own quadrature gives exactly 1
    and the certificate's small-eps limit is free of quadrature bias.

    Attributes
    ----------
    order : int
        Number of Gauss-Legendre nodes.
    nodes, weights : ndarray, shape (order,)
        The quadrature rule on (-1, 1).
    values : ndarray, shape (order,)
        Normalized bump values at the nodes.
    """

    order: int
    nodes: np.ndarray
    weights: np.ndarray
    values: np.ndarray
    normalizer: float

    @classmethod
    def build(cls, order: int = 12) -> "TransverseProfile":
        if order < 4:
            raise PreconditionError("transverse quadrature order must be at least 4")
        nodes, weights = np.polynomial.legendre.leggauss(int(order))
        raw = np.exp(-1.0 / (1.0 - nodes**2))
        normalizer = 1.0 / float(weights @ raw)
        return cls(
            order=int(order),
            nodes=nodes,
            weights=weights,
            values=normalizer * raw,
            normalizer=normalizer,
        )

    def bump(self, t):
        """Normalized bump at arbitrary points; zero outside (-1, 1)."""
        t = np.asarray(t, dtype=np.float64)
        out = np.zeros_like(t)
        inside = np.abs(t) < 1.0
        out[inside] = self.normalizer * np.exp(-1.0 / (1.0 - t[inside] ** 2))
        return out


@dataclass(frozen=True)
class Certificate:
    """Outcome of a negative-definiteness search along an eps schedule.

    ``certified_count`` equals the requested state count when some
    scheduled eps makes h(eps) negative definite, and 0 otherwise; a
    failed search is a reported result, not an exception.
    """

    requested: int
    eps_schedule: tuple
    matrices: tuple
    limit_values: np.ndarray
    max_errors: tuple
    certified_eps: float | None
    certified_count: int

    @property
    def certified(self) -> bool:
        return self.certified_count == self.requested


def _tube(chart: TubularChart, profile: TransverseProfile, eps: float):
    eps = float(eps)
    if not 0.0 < eps <= 1.0:
        raise PreconditionError("eps must be a fraction of the chart half-width in (0, 1]")
    eps_abs = eps * chart.half_width
    mesh = chart.mesh
    offsets = eps_abs * profile.nodes
    cloud = mesh.nodes[:, None, :] + offsets[None, :, None] * mesh.normals()[:, None, :]
    rho = chart.jacobian(offsets)
    return eps_abs, cloud, rho


def _kinetic(energy_fn, minimum, chart, psi_j, psi_k, profile, eps):
    eps_abs, cloud, rho = _tube(chart, profile, eps)
    shifted = energy_fn(cloud) - minimum
    transverse = profile.weights * profile.values**2 * rho
    node_factor = shifted @ transverse
    weights = chart.mesh.weights
    return (np.conj(psi_j) * psi_k * weights) @ node_factor / eps_abs


def _cloud_weights(mesh: SurfaceMesh, profile: TransverseProfile, rho):
    return (mesh.weights[:, None] * (profile.weights * profile.values * rho)[None, :]).ravel()


def _potential(kernel_fn, chart, psi, profile, eps):
    """h_pot for all column pairs of ``psi`` at once; one kernel matrix per eps."""
    eps_abs, cloud, rho = _tube(chart, profile, eps)
    mesh = chart.mesh
    count = cloud.shape[0] * cloud.shape[1]
    flat = cloud.reshape(count, mesh.dimension)
    g = _cloud_weights(mesh, profile, rho)
    kernel = np.asarray(kernel_fn(flat))
    columns = g[:, None] * np.repeat(psi, profile.order, axis=0)
    return columns.conj().T @ kernel @ columns


def kinetic_form(symbol: DispersionSymbol, chart: TubularChart, psi_j, psi_k,
                 profile: TransverseProfile, eps: float) -> complex:
    """Quadratic form of the shifted free symbol on one trial-function pair.

    Computes ``(1/eps_abs) * sum_i sum_a w_i v_a (H0(L(s_i, t_a)) - m)
    phi(tau_a)^2 conj(Psi_j) Psi_k rho`` with ``t_a = eps_abs tau_a``,
    which is O(eps) by the quadratic transverse growth of the symbol.
    """
    minimum, _ = symbol.find_minimum()
    psi_j = np.asarray(psi_j)
    psi_k = np.asarray(psi_k)
    return complex(_kinetic(symbol.evaluate, minimum, chart, psi_j, psi_k, profile, eps))


def potential_form(potential: Potential, chart: TubularChart, psi_j, psi_k,
                   profile: TransverseProfile, eps: float) -> complex:
    """Smeared kernel form I(eps) for one trial-function pair.

    The four-fold quadrature (mesh^2 x transverse nodes^2) of
    ``vhat(L(s, eps t) - L(s', eps t')) phi(t) phi(t') conj(Psi_j) Psi_k
    rho rho'``; as eps -> 0 it converges to the shell-operator matrix
    element, exactly reproducing the discrete eigenvalues when the Psi
    are discrete eigenfunctions.
    """
    require_band(potential, 2.0 * (chart.mesh.radius + chart.half_width))
    psi = np.stack([np.asarray(psi_j), np.asarray(psi_k)], axis=1)
    block = _potential(lambda pts: potential.kernel_matrix(pts), chart, psi, profile, eps)
    return complex(block[0, 1])


def certify(symbol: DispersionSymbol, potential: Potential, mesh: SurfaceMesh,
            n_states: int, eps_schedule=DEFAULT_SCHEDULE, *,
            half_width_fraction: float = 0.25, transverse_order: int = 12,
            states=None, energy_fn=None, minimum=None, kernel_fn=None) -> Certificate:
    """Search the eps schedule for a negative-definite trial form.

    Parameters
    ----------
    symbol, potential, mesh
        Problem data; the shell operator is assembled on ``mesh`` unless
        ``states`` is supplied.
    n_states : int
        Number of eigenvalues of H below m to certify. Must not exceed
        the count of negative shell-operator eigenvalues (checked unless
        ``states`` overrides them).
    eps_schedule : iterable of float
        Fractions of the chart half-width, default (0.2, 0.1, 0.05, 0.025).
    states : (values, vectors), optional
        Caller-supplied surface spectrum and eigenfunction samples.
        Skips the count precondition; this is also the hook the
        spin-orbit certifier uses.
    energy_fn, minimum, kernel_fn : optional
        Overrides for the band energy, its minimum, and the kernel
        matrix builder (used for matrix-symbol Hamiltonians).

    Returns
    -------
    Certificate
        With the h(eps) sequence, the limit diagonal, the max-norm
        convergence table, and the certification outcome. A schedule
        with no negative-definite member yields ``certified_count = 0``
        rather than an exception.
    """
    n_states = int(n_states)
    if n_states < 0:
        raise PreconditionError("n_states must be nonnegative")
    schedule = tuple(float(e) for e in eps_schedule)
    if not schedule:
        raise PreconditionError("eps schedule must not be empty")
    chart = tubular_chart(mesh, half_width_fraction)
    profile = TransverseProfile.build(transverse_order)

    if states is None:
        operator = assemble(mesh, potential)
        available = count_negative(operator)
        if n_states > available:
            raise PreconditionError(
                f"requested {n_states} states but the shell operator has only "
                f"{available} negative eigenvalues at this resolution"
            )
        limit_values = operator.eigenvalues[:n_states].copy()
        psi = operator.eigenfunctions[:, :n_states]
    else:
        values, vectors = states
        values = np.asarray(values)
        vectors = np.asarray(vectors)
        if vectors.ndim != 2 or vectors.shape[0] != mesh.size:
            raise PreconditionError("state vectors must be columns sampled on the mesh")
        if n_states > values.size or n_states > vectors.shape[1]:
            raise PreconditionError("fewer supplied states than n_states")
        limit_values = values[:n_states].copy()
        psi = vectors[:, :n_states]

    if energy_fn is None:
        energy_fn = symbol.evaluate
    if minimum is None:
        minimum = symbol.find_minimum()[0]
    if kernel_fn is None:
        require_band(potential, 2.0 * (mesh.radius + chart.half_width))
        kernel_fn = lambda pts: potential.kernel_matrix(pts)  # noqa: E731

    weights = mesh.weights
    matrices = []
    max_errors = []
    certified_eps = None
    for eps in schedule:
        eps_abs, cloud, rho = _tube(chart, profile, eps)
        shifted = energy_fn(cloud) - minimum
        node_factor = (shifted @ (profile.weights * profile.values**2 * rho)) * weights / eps_abs
        h_kin = (psi.conj().T * node_factor) @ psi
        h_pot = _potential(kernel_fn, chart, psi, profile, eps)
        h = h_kin + h_pot
        deviation = np.abs(h - h.conj().T).max() if h.size else 0.0
        if h.size and deviation > 1e-10 * max(1.0, np.abs(h).max()):
            raise ConsistencyError(f"trial form deviates from Hermitian by {deviation:.3e}")
        h = 0.5 * (h + h.conj().T)
        matrices.append(h)
        max_errors.append(
            float(np.abs(h - np.diag(limit_values)).max()) if h.size else 0.0
        )
        negative_definite = h.size == 0 or float(np.linalg.eigvalsh(h)[-1]) < 0.0
        if negative_definite and (certified_eps is None or eps > certified_eps):
            certified_eps = eps

    return Certificate(
        requested=n_states,
        eps_schedule=schedule,
        matrices=tuple(matrices),
        limit_values=limit_values,
        max_errors=tuple(max_errors),
        certified_eps=certified_eps,
        certified_count=n_states if certified_eps is not None else 0,
    )
