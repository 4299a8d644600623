import numpy as np
import pytest

from phaselab import (Distribution, MoyalConfig, PhysicalParams, Potential,
                      ValidationError, Wavefunction, gaussian_wavepacket,
                      init_gaussian, l2_distance, liouville_step, make_grid,
                      moyal_step, norm, purity, schrodinger_step,
                      wigner_transform)

PARAMS = PhysicalParams(1.0, 1.0)
HARMONIC = Potential((0.0, 0.0, 0.5))
QUARTIC = Potential((0.0, 0.0, 0.0, 0.0, 0.25))
EXACT_CFG = MoyalConfig()


def matched_grid(x_half, n, hbar=1.0):
    """Grid whose momentum window equals the Wigner-natural pi*hbar/dx."""
    dx = 2.0 * x_half / n
    p_half = np.pi * hbar / (2.0 * dx)
    return make_grid(-x_half, x_half, n, -p_half, p_half, n)


# ------------------------------------------------------------ schrodinger

def test_coherent_state_period():
    g = make_grid(-8, 8, 256, -8, 8, 64)
    psi0 = gaussian_wavepacket(g, PARAMS, 1.0, 0.0, np.sqrt(0.5))
    psi = psi0
    n = 6283
    dt = 2 * np.pi / n
    for _ in range(n):
        psi = schrodinger_step(psi, HARMONIC, PARAMS, dt)
    overlap = abs(np.sum(np.conj(psi0.values) * psi.values) * g.dx) ** 2
    assert overlap >= 1 - 1e-8
    assert abs(psi.norm() - 1.0) <= 1e-12


def test_grid_eigenstate_stationary():
    # eigenvector of the grid-discretized Hamiltonian: |psi|^2 is frozen
    g = make_grid(-8, 8, 128, -8, 8, 64)
    n = g.n_x
    F = np.fft.fft(np.eye(n), axis=0)
    kin = (F.conj().T @ (0.5 * g.k_x[:, None] ** 2 * F)) / n
    H = kin + np.diag(0.5 * g.x ** 2)
    H = 0.5 * (H + H.conj().T)
    _, vecs = np.linalg.eigh(H)
    psi = Wavefunction(g, vecs[:, 2] / np.sqrt(g.dx))
    dens0 = np.abs(psi.values) ** 2
    for _ in range(4000):
        psi = schrodinger_step(psi, HARMONIC, PARAMS, 2.5e-4)
    assert np.max(np.abs(np.abs(psi.values) ** 2 - dens0)) <= 1e-8


def test_free_packet_spreading_law():
    g = make_grid(-16, 16, 512, -8, 8, 64)
    psi = gaussian_wavepacket(g, PARAMS, 0.0, 0.0, 1.0)
    free = Potential((0.0,))
    for _ in range(2000):
        psi = schrodinger_step(psi, free, PARAMS, 1e-3)
    rho = np.abs(psi.values) ** 2
    rho /= rho.sum()
    mean = (rho * g.x).sum()
    var = (rho * (g.x - mean) ** 2).sum()
    t = psi.time
    assert var == pytest.approx(1.0 + (t / 2.0) ** 2, abs=1e-6)


# ------------------------------------------------------- wigner transform

def test_ground_state_wigner_value():
    g = matched_grid(8, 256)
    psi = gaussian_wavepacket(g, PARAMS, 0.0, 0.0, np.sqrt(0.5))
    W = wigner_transform(psi, g, PARAMS)
    i0 = np.argmin(np.abs(g.x))
    j0 = np.argmin(np.abs(g.p))
    assert W.values[i0, j0] == pytest.approx(1 / np.pi, abs=1e-4)
    assert norm(W) == pytest.approx(1.0, abs=1e-8)
    assert purity(W, PARAMS) == pytest.approx(1.0, abs=1e-6)


def test_first_excited_wigner_value():
    g = matched_grid(8, 256)
    raw = np.sqrt(2.0) * g.x * np.exp(-g.x ** 2 / 2) / np.pi ** 0.25
    raw /= np.sqrt(np.sum(np.abs(raw) ** 2) * g.dx)
    psi = Wavefunction(g, raw)
    W = wigner_transform(psi, g, PARAMS)
    i0 = np.argmin(np.abs(g.x))
    j0 = np.argmin(np.abs(g.p))
    assert W.values[i0, j0] == pytest.approx(-1 / np.pi, abs=1e-4)


def test_wigner_p_marginal_is_position_density():
    g = matched_grid(8, 256)
    psi = gaussian_wavepacket(g, PARAMS, 0.75, -0.5, 0.8)
    W = wigner_transform(psi, g, PARAMS)
    marg = W.values.sum(axis=1) * g.dp
    assert np.max(np.abs(marg - np.abs(psi.values) ** 2)) <= 1e-8


def test_wigner_marginals_nonnegative():
    g = matched_grid(8, 256)
    raw = np.sqrt(2.0) * g.x * np.exp(-g.x ** 2 / 2) / np.pi ** 0.25
    raw /= np.sqrt(np.sum(np.abs(raw) ** 2) * g.dx)
    W = wigner_transform(Wavefunction(g, raw), g, PARAMS)
    assert W.values.min() < 0  # the state itself is nonclassical
    assert (W.values.sum(axis=1) * g.dp).min() >= -1e-10
    assert (W.values.sum(axis=0) * g.dx).min() >= -1e-10


def test_wigner_grid_mismatch():
    g = matched_grid(8, 256)
    other = make_grid(-4, 4, 256, g.p_min, g.p_max, 256)
    psi = gaussian_wavepacket(g, PARAMS, 0.0, 0.0, 0.7)
    from phaselab import GridMismatchError
    with pytest.raises(GridMismatchError):
        wigner_transform(psi, other, PARAMS)


# ------------------------------------------------------------- moyal step

def test_quadratic_equivalence_per_step():
    g = make_grid(-8, 8, 128, -8, 8, 128)
    d = init_gaussian(g, 1.0, 0.5, 0.7, 0.7)
    for hbar in (0.25, 1.0, 4.0):
        params = PhysicalParams(hbar, 1.0)
        a = moyal_step(d, HARMONIC, params, EXACT_CFG, 1e-3)
        b = liouville_step(d, HARMONIC, params, 1e-3)
        assert np.max(np.abs(a.values - b.values)) <= 1e-12


def test_quartic_truncation_terminates():
    g = make_grid(-5, 5, 128, -8, 8, 128)
    d = init_gaussian(g, 1.0, 0.0, 0.6, 0.6)
    a = moyal_step(d, QUARTIC, PARAMS, MoyalConfig(truncation_order=1), 2e-4)
    b = moyal_step(d, QUARTIC, PARAMS, MoyalConfig(truncation_order="exact"), 2e-4)
    c = moyal_step(d, QUARTIC, PARAMS, MoyalConfig(truncation_order=5), 2e-4)
    assert np.array_equal(a.values, b.values)
    assert np.array_equal(a.values, c.values)


def test_moyal_resolvability_precondition():
    g = make_grid(-5, 5, 128, -8, 8, 128)
    d = init_gaussian(g, 0.0, 0.0, 0.6, 0.6)
    with pytest.raises(ValidationError):
        moyal_step(d, QUARTIC, PhysicalParams(hbar=1e-4), EXACT_CFG, 1e-4)


def test_moyal_conserves_norm_and_l2_per_step():
    g = make_grid(-5, 5, 128, -8, 8, 128)
    d = init_gaussian(g, 1.0, 0.0, 0.5, 0.7)
    n0, q0 = norm(d), np.sum(d.values ** 2) * g.cell_area
    d = moyal_step(d, QUARTIC, PARAMS, EXACT_CFG, 2e-4)
    assert abs(norm(d) - n0) <= 1e-12
    assert abs(np.sum(d.values ** 2) * g.cell_area - q0) <= 1e-8


def test_moyal_matches_schrodinger_wigner_oracle():
    # independent-oracle equivalence at reduced size; the 512^2 version is
    # exercised by the acceptance suite
    g = matched_grid(5, 256)
    sx = np.sqrt(0.5)
    d = init_gaussian(g, 1.0, 0.0, sx, 0.5 / sx)
    psi = gaussian_wavepacket(g, PARAMS, 1.0, 0.0, sx)
    t_final, dt, dts = 0.5, 2.5e-4, 1.25e-4
    for _ in range(int(round(t_final / dt))):
        d = moyal_step(d, QUARTIC, PARAMS, EXACT_CFG, dt)
    for _ in range(int(round(t_final / dts))):
        psi = schrodinger_step(psi, QUARTIC, PARAMS, dts)
    W = wigner_transform(psi, g, PARAMS)
    assert l2_distance(d, W) <= 1e-3


def test_hbar_to_zero_convergence():
    # fixed smooth initial data: the quantum-classical gap at fixed short
    # time shrinks monotonically with hbar
    g = make_grid(-5, 5, 128, -6, 6, 128)
    d0 = init_gaussian(g, 1.0, 0.0, 0.6, 0.6)
    t_final, dt = 0.4, 2.5e-4
    n = int(round(t_final / dt))
    dc = d0
    for _ in range(n):
        dc = liouville_step(dc, QUARTIC, PARAMS, dt)
    gaps = []
    for hbar in (1.0, 0.5, 0.25, 0.125):
        params = PhysicalParams(hbar, 1.0)
        dq = d0
        for _ in range(n):
            dq = moyal_step(dq, QUARTIC, params, EXACT_CFG, dt)
        gaps.append(l2_distance(dq, dc))
    assert all(a > b for a, b in zip(gaps, gaps[1:]))
