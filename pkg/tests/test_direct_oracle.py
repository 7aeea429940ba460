"""Grid-oracle tests: tables, FFT application, eigensolves, counting."""

import warnings

import numpy as np
import pytest

from shellbound import direct_oracle as do
from shellbound import potentials, rayleigh_ritz, surface, surface_operator, symbols
from shellbound.errors import ConfigurationError, ConvergenceError, PreconditionError

SYMBOL = symbols.mexican_hat(dimension=2, p0=1.0)


def quiet_build(*args, **kwargs):
    # small test boxes sit in the coarse-dual-lattice warning band on purpose
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return do.build_hamiltonian(*args, **kwargs)


@pytest.fixture(scope="module")
def dimple_ham():
    pot = potentials.gaussian_dimple_mix(1.0, 1.0, 2.0, 0.5, dimension=2)
    return quiet_build(SYMBOL, pot, 15.0, 48)


def test_tables_shapes_and_values():
    pot = potentials.gaussian_well(1.0, 1.0, dimension=2)
    with warnings.catch_warnings():
        warnings.simplefilter("error")  # spacing 0.1227 < R/8, must build silently
        ham = do.build_hamiltonian(SYMBOL, pot, 51.2, 96)
    assert ham.symbol_table.shape == (96, 96)
    assert ham.symbol_table[0, 0] == 1.0  # (|0| - 1)^2
    assert ham.minimum == 0.0
    assert ham.surface_radius == 1.0
    assert ham.size == 96 * 96
    assert not ham.is_free
    # position grid is centered on index G // 2
    assert ham.potential_table[48, 48] == -1.0
    assert abs(ham.potential_table[0, 0]) < 1e-100
    lowest = np.sort(ham.symbol_table.ravel())[:33]
    assert ham.delta == 3.0 * (lowest[32] - lowest[0]) / 32.0
    assert ham.spectral_scale == np.abs(ham.symbol_table).max() + 1.0


def test_free_flag():
    assert quiet_build(SYMBOL, None, 20.0, 64).is_free
    # an identically zero table is dropped at build time
    ham = quiet_build(SYMBOL, potentials.zero(2), 20.0, 64)
    assert ham.potential_table is None and ham.is_free


def test_build_validation():
    pot = potentials.gaussian_well(1.0, 1.0, dimension=2)
    with pytest.raises(ConfigurationError):
        do.build_hamiltonian(SYMBOL, pot, 0.0, 64)
    with pytest.raises(ConfigurationError):
        do.build_hamiltonian(SYMBOL, pot, 20.0, 12)
    with pytest.raises(ConfigurationError, match="resolve"):
        do.build_hamiltonian(SYMBOL, pot, 10.0, 64)  # spacing 0.63 > R/2
    with pytest.raises(ConfigurationError, match="cutoff"):
        do.build_hamiltonian(SYMBOL, pot, 51.2, 64)  # cutoff 3.93 < 4R
    with pytest.raises(ConfigurationError, match="96"):
        do.build_hamiltonian(symbols.mexican_hat(dimension=3, p0=1.0), None, 52.0, 112)
    with pytest.raises(ConfigurationError, match="delta_levels"):
        quiet_build(SYMBOL, pot, 20.0, 64, delta_levels=0.0)
    with pytest.raises(PreconditionError, match="dimensions"):
        do.build_hamiltonian(SYMBOL, potentials.gaussian_well(1.0, 1.0, dimension=3), 51.2, 96)


def test_coarse_lattice_warns():
    with pytest.warns(UserWarning, match="coarse"):
        do.build_hamiltonian(SYMBOL, None, 30.0, 128)


def test_free_spectrum_is_exact():
    ham = do.build_hamiltonian(SYMBOL, None, 51.2, 96)
    values = do.lowest_eigenvalues(ham, 16)
    # free path must return the sorted symbol table bitwise, no iteration
    assert np.array_equal(values, np.sort(ham.symbol_table.ravel())[:16])
    # cross-check the fftfreq layout against a hand-built dual lattice
    idx = np.arange(96)
    idx = np.where(idx < 48, idx, idx - 96)
    k_axis = 2.0 * np.pi * idx / 51.2
    kx, ky = np.meshgrid(k_axis, k_axis, indexing="ij")
    by_hand = np.sort(((np.hypot(kx, ky) - 1.0) ** 2).ravel())[:16]
    np.testing.assert_allclose(values, by_hand, rtol=1e-12, atol=1e-12)


def test_free_count():
    ham = do.build_hamiltonian(SYMBOL, None, 51.2, 96)
    res = do.count_below(ham)  # m - delta < 0 <= every table entry
    assert res.count == 0
    assert not res.is_lower_bound
    assert np.all(res.residuals == 0.0)
    assert np.array_equal(res.eigenvalues, np.sort(ham.symbol_table.ravel())[:16])
    # without a well there is nothing to count above the spectral floor
    with pytest.raises(PreconditionError, match="counting energy"):
        do.count_below(ham, energy=0.02)


def test_free_plane_wave_is_eigenvector():
    ham = quiet_build(SYMBOL, None, 20.0, 64)
    h = 20.0 / 64
    x = np.arange(64) * h
    kx = 2.0 * np.pi * 3 / 20.0
    ky = 2.0 * np.pi * 5 / 20.0
    psi = np.exp(1j * (kx * x[:, None] + ky * x[None, :]))
    out = do.apply(ham, psi)
    np.testing.assert_allclose(out, ham.symbol_table[3, 5] * psi, rtol=1e-12, atol=1e-12)


def test_apply_shapes_and_linearity(dimple_ham):
    ham = dimple_ham
    rng = np.random.default_rng(3)
    x = rng.standard_normal(ham.size)
    y = rng.standard_normal(ham.size)
    hx = do.apply(ham, x)
    assert hx.shape == (ham.size,)
    grid_out = do.apply(ham, x.reshape(48, 48))
    assert np.array_equal(grid_out, hx.reshape(48, 48))
    batch = do.apply(ham, np.stack([x, y], axis=1))
    assert np.array_equal(batch[:, 0], hx)
    assert np.array_equal(batch[:, 1], do.apply(ham, y))
    combo = do.apply(ham, 2.3 * x - 1.1 * y)
    np.testing.assert_allclose(combo, 2.3 * hx - 1.1 * do.apply(ham, y),
                               atol=1e-12 * ham.spectral_scale)
    # symmetry of the form
    assert np.vdot(x, do.apply(ham, y)) == pytest.approx(np.vdot(hx, y), rel=1e-12)
    # complex path agrees with the real one
    np.testing.assert_allclose(do.apply(ham, x.astype(np.complex128)), hx,
                               atol=1e-12 * ham.spectral_scale)
    with pytest.raises(PreconditionError, match="shape"):
        do.apply(ham, np.zeros(ham.size + 1))


def test_matches_dense_diagonalization(dimple_ham):
    ham = dimple_ham
    dense = do.apply(ham, np.eye(ham.size))
    assert np.abs(dense - dense.T).max() < 1e-12 * ham.spectral_scale
    reference = np.linalg.eigvalsh(0.5 * (dense + dense.T))
    values = do.lowest_eigenvalues(ham, 6, maxiter=900)
    np.testing.assert_allclose(values, reference[:6], rtol=0.0, atol=5e-12)
    assert abs(reference[0] - -0.1071999) < 1e-6
    res = do.count_below(ham, k_max=6, maxiter=900)
    assert res.count == int(np.count_nonzero(reference < res.energy))
    assert res.count == 3
    assert not res.is_lower_bound
    assert int(res) == 3 and res.__index__() == 3


def test_count_monotone_in_coupling():
    counts = []
    spectra = []
    for c in (1.0, 2.0):
        pot = potentials.gaussian_well(c, 1.0, dimension=2)
        ham = quiet_build(SYMBOL, pot, 20.0, 128)
        res = do.count_below(ham, k_max=8, maxiter=900)
        assert not res.is_lower_bound
        counts.append(res.count)
        spectra.append(res.eigenvalues)
    assert counts[1] >= counts[0]
    # doubling the well depth pushes every sorted level down
    assert np.all(spectra[1] <= spectra[0] + 1e-8)


def test_box_size_stability_at_fixed_energy():
    pot = potentials.gaussian_dimple_mix(1.0, 1.0, 2.0, 0.5, dimension=2)
    coarse = quiet_build(SYMBOL, pot, 15.0, 48)
    fine = quiet_build(SYMBOL, pot, 22.5, 72)
    # the default buffer shrinks with the box, so compare at one energy
    energy = coarse.minimum - coarse.delta
    n_coarse = do.count_below(coarse, energy=energy, k_max=8, maxiter=900)
    n_fine = do.count_below(fine, energy=energy, k_max=8, maxiter=900)
    assert n_coarse.count == n_fine.count == 3
    assert not n_coarse.is_lower_bound and not n_fine.is_lower_bound


def _grid_quotient(ham, chart, profile, eps):
    """Rayleigh quotient of the bump-on-shell trial injected onto the grid."""
    grid, edge = ham.grid, ham.box_edge
    h = edge / grid
    k_axis = 2.0 * np.pi * np.fft.fftfreq(grid, d=h)
    kx, ky = np.meshgrid(k_axis, k_axis, indexing="ij")
    eps_abs = eps * chart.half_width
    f = profile.bump((np.hypot(kx, ky) - chart.mesh.radius) / eps_abs) / eps_abs
    f = f / np.sqrt(2.0 * np.pi * chart.mesh.radius)
    # phases reference x_j = j h while the potential table is centered,
    # so shift the position-space state onto the well
    f = f * np.exp(1j * (kx + ky) * (grid // 2) * h)
    psi = np.fft.ifftn(f)
    num = np.vdot(psi, do.apply(ham, psi)).real
    return num / np.vdot(psi, psi).real - ham.minimum


@pytest.mark.parametrize("coupling,eps", [(1.0, 1.0), (1.0, 0.5), (1e-3, 0.5)])
def test_injected_trial_matches_form_sign(coupling, eps):
    # the certified form and the grid quotient use different trial
    # normalizations, so only the sign is comparable; a strong well is
    # negative at these eps, the weak one is kinetic-dominated
    pot = potentials.gaussian_well(coupling, 1.0, dimension=2)
    mesh = surface.build_mesh(1.0, 2, 64)
    chart = surface.tubular_chart(mesh, half_width_fraction=0.5)
    profile = rayleigh_ritz.TransverseProfile.build(order=12)
    psi0 = surface_operator.assemble(mesh, pot).eigenfunctions[:, 0]
    h00 = (rayleigh_ritz.kinetic_form(SYMBOL, chart, psi0, psi0, profile, eps)
           + rayleigh_ritz.potential_form(pot, chart, psi0, psi0, profile, eps)).real
    ham = quiet_build(SYMBOL, pot, 30.0, 192)
    quotient = _grid_quotient(ham, chart, profile, eps)
    assert h00 * quotient > 0.0
    if coupling == 1.0:
        assert h00 < 0.0 and quotient < 0.0
    else:
        assert h00 > 0.0 and quotient > 0.0


def test_solver_validation(dimple_ham):
    with pytest.raises(PreconditionError):
        do.lowest_eigenvalues(dimple_ham, 0)
    with pytest.raises(PreconditionError):
        do.lowest_eigenvalues(dimple_ham, 65)
    with pytest.raises(PreconditionError):
        do.count_below(dimple_ham, k_max=0)
    with pytest.raises(PreconditionError, match="counting energy"):
        do.count_below(dimple_ham, energy=2.0)


def test_convergence_error_carries_diagnostics(dimple_ham):
    with pytest.raises(ConvergenceError, match="residual tolerance") as info:
        do.lowest_eigenvalues(dimple_ham, 4, maxiter=2)
    assert info.value.eigenvalues.shape == (4,)
    assert info.value.residuals.shape == (4,)


def test_eigensolve_is_deterministic(dimple_ham):
    first = do.lowest_eigenvalues(dimple_ham, 4, seed=11, maxiter=900)
    second = do.lowest_eigenvalues(dimple_ham, 4, seed=11, maxiter=900)
    assert np.array_equal(first, second)
