import numpy as np
import pytest

from phaselab import (DecoherenceConfig, Distribution, Kick, MeasurementSpec,
                      MoyalConfig, PhysicalParams, Potential, ValidationError,
                      compose_step, derivative_norm, diffusion_step,
                      init_gaussian, l2_distance, make_grid,
                      measurement_event, moyal_step, negativity_volume, norm,
                      purity)

PARAMS = PhysicalParams(1.0, 1.0)
CFG = MoyalConfig()
G = make_grid(-8, 8, 128, -8, 8, 128)


def _p_variance(dist):
    w = dist.values / dist.values.sum()
    marg = w.sum(axis=0)
    mean = (marg * dist.grid.p).sum()
    return ((marg * (dist.grid.p - mean) ** 2).sum())


def _excited_wigner(grid):
    X, P = np.meshgrid(grid.x, grid.p, indexing="ij")
    r2 = X ** 2 + P ** 2
    return Distribution(grid, (1 / np.pi) * (2 * r2 - 1) * np.exp(-r2))


# -------------------------------------------------------------- diffusion

def test_heat_kernel_variance_growth():
    d = init_gaussian(G, 0.0, 0.0, 1.0, 1.0)
    out = diffusion_step(d, D=0.5, dt=1.0)
    assert _p_variance(out) == pytest.approx(2.0, abs=1e-6)
    assert abs(norm(out) - 1.0) <= 1e-12


def test_zero_diffusion_is_identity():
    d = init_gaussian(G, 0.5, -0.5, 0.8, 0.8)
    out = diffusion_step(d, D=0.0, dt=1.0)
    assert np.array_equal(out.values, d.values)
    assert out.values is not d.values


def test_negative_coefficient_rejected():
    d = init_gaussian(G, 0.0, 0.0, 1.0, 1.0)
    with pytest.raises(ValidationError):
        diffusion_step(d, D=-0.1, dt=1.0)


def test_diffusion_semigroup():
    d = init_gaussian(G, 0.3, 0.4, 0.9, 0.7)
    a = d
    for _ in range(5):
        a = diffusion_step(a, D=0.2, dt=0.1)
    b = diffusion_step(d, D=0.2, dt=0.5)
    assert l2_distance(a, b) <= 1e-10


def test_negativity_decay_matches_quadrature_oracle():
    # Frozen from the closed-form smoothed field (variance s = 2*D*dt)
    #   R(x,p) = (1/pi) e^{-x^2} I0(p) [(2x^2-1) + 2s/(1+2s) + 2p^2/(1+2s)^2]
    #   I0(p)  = (1+2s)^{-1/2} exp(-p^2/(1+2s))
    # integrated as sum(|R| - R) h^2 on a 4096^2 lattice over [-10, 10)^2.
    oracle = 0.2630212
    g = make_grid(-8, 8, 256, -8, 8, 256)
    d = _excited_wigner(g)
    before = negativity_volume(d)
    out = diffusion_step(d, D=0.1, dt=1.0)
    after = negativity_volume(out)
    assert after < before
    assert after == pytest.approx(oracle, abs=1e-3)


def test_diffusion_contracts_fine_structure_monotones():
    d = _excited_wigner(G)
    out = diffusion_step(d, D=0.05, dt=1.0)
    assert purity(out, PARAMS) <= purity(d, PARAMS) + 1e-10
    assert negativity_volume(out) <= negativity_volume(d) + 1e-10
    for order in (1, 2, 3):
        assert (derivative_norm(out, order, "p")
                <= derivative_norm(d, order, "p") + 1e-10)


def test_x_axis_channel():
    d = init_gaussian(G, 0.0, 0.0, 1.0, 1.0)
    out = diffusion_step(d, D=0.5, dt=1.0, axis="x")
    w = out.values / out.values.sum()
    marg = w.sum(axis=1)
    var = (marg * (out.grid.x - (marg * out.grid.x).sum()) ** 2).sum()
    assert var == pytest.approx(2.0, abs=1e-6)


# ------------------------------------------------------------ measurement

def test_measurement_width_floor():
    d = init_gaussian(G, 0.0, 0.0, 1.0, 1.0)
    cfg = DecoherenceConfig(measurement=MeasurementSpec(period=1.0, sigma_p=G.dp / 2))
    with pytest.raises(ValidationError):
        measurement_event(d, cfg)
    # exactly the grid spacing is legal and contracts sum(rho^2)
    cfg = DecoherenceConfig(measurement=MeasurementSpec(period=1.0, sigma_p=G.dp))
    out = measurement_event(d, cfg)
    assert np.sum(out.values ** 2) < np.sum(d.values ** 2)
    assert abs(norm(out) - 1.0) <= 1e-12


def test_measurement_gaussian_width_addition():
    d = init_gaussian(G, 0.0, 0.0, 1.0, 1.0)
    cfg = DecoherenceConfig(measurement=MeasurementSpec(period=1.0, sigma_p=1.0))
    out = measurement_event(d, cfg)
    assert np.sqrt(_p_variance(out)) == pytest.approx(np.sqrt(2.0), abs=1e-6)


def test_measurement_semigroup():
    d = init_gaussian(G, 0.2, -0.3, 0.9, 0.8)
    w = 0.4
    cfg_w = DecoherenceConfig(measurement=MeasurementSpec(period=1.0, sigma_p=w))
    cfg_w2 = DecoherenceConfig(
        measurement=MeasurementSpec(period=1.0, sigma_p=w * np.sqrt(2.0)))
    twice = measurement_event(measurement_event(d, cfg_w), cfg_w)
    once = measurement_event(d, cfg_w2)
    assert l2_distance(twice, once) <= 1e-10


def test_measurement_needs_a_width():
    with pytest.raises(ValidationError):
        MeasurementSpec(period=1.0)


# ----------------------------------------------------------- composition

def test_compose_neutral_element():
    pot = Potential((0.0, 0.0, 0.5))
    d = init_gaussian(G, 1.0, 0.0, 0.7, 0.7)
    a = compose_step(d, pot, PARAMS, CFG, DecoherenceConfig(), 1e-3)
    b = moyal_step(d, pot, PARAMS, CFG, 1e-3)
    assert l2_distance(a, b) <= 1e-14


def test_free_diffusion_linear_variance_growth():
    free = Potential((0.0,))
    d = init_gaussian(G, 0.0, 0.0, 1.0, 1.0)
    D, dt, n = 0.05, 5e-3, 200
    v0 = _p_variance(d)
    for _ in range(n):
        d = compose_step(d, free, PARAMS, CFG, DecoherenceConfig(diffusion_D=D), dt)
    assert _p_variance(d) - v0 == pytest.approx(2 * D * n * dt, abs=1e-6)


def test_measurement_fires_on_period_crossing():
    free = Potential((0.0,))
    dcfg = DecoherenceConfig(
        measurement=MeasurementSpec(period=0.05, sigma_p=1.0))
    d = init_gaussian(G, 0.0, 0.0, 1.0, 1.0)
    for _ in range(4):  # t = 0.04 < period: no event yet
        d = compose_step(d, free, PARAMS, CFG, dcfg, 0.01)
    assert _p_variance(d) == pytest.approx(1.0, abs=1e-9)
    d = compose_step(d, free, PARAMS, CFG, dcfg, 0.01)  # crosses t = 0.05
    assert _p_variance(d) == pytest.approx(2.0, abs=1e-6)


def test_fine_structure_plateau_under_diffusion():
    # chaotic kicked double well: with D = 0 the order-3 momentum derivative
    # norm keeps growing; a diffusion channel caps it
    pot = Potential((0.0, 0.0, -0.5, 0.0, 0.25), kick=Kick(2.0, 1.0, "cos"))
    g = make_grid(-4, 4, 128, -10, 10, 128)
    dt, T = 2.5e-3, 8.0
    n = int(round(T / dt))
    half = n // 2
    series = {}
    for D in (0.0, 1e-2):
        d = init_gaussian(g, 0.6, 0.0, 0.35, 0.35)
        dcfg = DecoherenceConfig(diffusion_D=D)
        vals = []
        for i in range(n):
            d = compose_step(d, pot, PARAMS, CFG, dcfg, dt)
            if (i + 1) % half == 0:
                vals.append(derivative_norm(d, 3, "p"))
        series[D] = vals
    mid0, end0 = series[0.0]
    midD, endD = series[1e-2]
    assert end0 > 10 * derivative_norm(init_gaussian(g, 0.6, 0.0, 0.35, 0.35), 3, "p")
    assert endD < 2 * midD
