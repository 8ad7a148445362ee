import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from subexp_bump.construct import (Domain, GridConfig, Parity, SampledFunction, ScaledTransform,
                                   SpectralTable, auto_kmax, big_F_hat, capital_I, f_hat,
                                   psi_hat, run_pipeline)
from subexp_bump.errors import DomainError, TailNotNegligible
from subexp_bump.fourier import transform_many
from subexp_bump.params import DecaySpec, resolve_params


@pytest.fixture(scope="module")
def phi_at(default_spec):
    return ScaledTransform(resolve_params(default_spec))


def test_scaled_transform_halves(phi_at):
    v, _, _ = transform_many(phi_at.params, [1.5])
    assert phi_at(3.0) == pytest.approx(0.5 * v[0], rel=1e-15)


def test_psi_hat_basics(phi_at):
    assert psi_hat(phi_at, 0.0) == 0.0
    k = np.linspace(0.0, 30.0, 301)
    psi = psi_hat(phi_at, k)
    assert np.all(psi <= 0.0)
    np.testing.assert_array_equal(psi_hat(phi_at, -k), -psi)


def test_capital_I_positive_and_tail_doubling(phi_at):
    I1 = capital_I(phi_at, 150.0)
    I2 = capital_I(phi_at, 300.0)
    assert I1 > 0
    assert I1 == pytest.approx(I2, rel=1e-12)


def test_capital_I_tail_check(phi_at):
    with pytest.raises(TailNotNegligible):
        capital_I(phi_at, 20.0)


def test_f_hat_direct_monotone(phi_at):
    vals = [f_hat(phi_at, k, 400.0) for k in (0.0, 0.5, 1.0, 2.0, 5.0, 10.0)]
    assert vals[0] == pytest.approx(capital_I(phi_at, 400.0), rel=1e-14)
    assert all(b <= a for a, b in zip(vals, vals[1:]))


def test_f_hat_domain(phi_at):
    with pytest.raises(DomainError):
        f_hat(phi_at, 500.0, 400.0)


def test_table_matches_direct_quadrature(artifacts, phi_at):
    for k in (0.0, 0.7, 3.0, 12.5, 40.0):
        ref = f_hat(phi_at, k, 600.0)
        assert artifacts.table.f_hat(k) == pytest.approx(ref, rel=1e-12)
    k = np.array([0.3, 2.2, 9.9, 77.7, 1234.5])
    np.testing.assert_allclose(artifacts.table.phi_hat(k), phi_at(k), rtol=1e-10)


def test_artifact_invariants(artifacts):
    a = artifacts
    assert a.capitalI > 0
    assert a.capitalI == pytest.approx(a.fHat.values[0], rel=1e-14)
    np.testing.assert_array_equal(a.bigFSpace.values, a.fSpace.values**2)
    assert np.all(a.bigFSpace.values >= 0)
    assert a.fSpace.nodes[0] == -1.5 and a.fSpace.nodes[-1] == 1.5 and len(a.fSpace) == 3001
    assert a.fSpace.domain is Domain.SPACE and a.psiHat.parity is Parity.ODD
    assert len(a.bigFHat) == len(a.grid)
    assert np.all(a.psiHat.values <= 0)
    assert np.all(np.diff(a.fHat.values) <= 0)


def test_grid_reaches_floor(artifacts, default_spec):
    kmax = artifacts.grid.nodes[-1]
    assert kmax == pytest.approx(auto_kmax(default_spec), rel=1e-12)
    assert math.exp(-2 * default_spec.bigC * kmax**default_spec.delta) <= 1.0001e-260


def test_F_hat_zero_is_L2_norm(artifacts):
    # F_hat(0) = int F dx = int f**2 dx, computed from the space samples
    x = artifacts.fSpace.nodes
    assert artifacts.bigFHat.values[0] == pytest.approx(np.trapezoid(artifacts.bigFSpace.values, x),
                                                         rel=1e-9)


def test_f_at_zero_is_integral_of_f_hat(artifacts):
    mid = len(artifacts.fSpace) // 2
    t = artifacts.table
    k = np.linspace(0.0, 60.0, 600_001)
    ref = 2 * np.trapezoid(t.f_hat(k), k)
    assert artifacts.fSpace.values[mid] == pytest.approx(ref, rel=1e-9)


def test_F_hat_bounds_and_evenness(artifacts):
    F = artifacts.bigFHat.values
    assert F[0] > 0 and np.all(F <= F[0])
    k = np.array([0.5, 3.0, 11.0])
    np.testing.assert_array_equal(big_F_hat(artifacts.table, k), big_F_hat(artifacts.table, -k))


def test_F_hat_with_sampled_input(artifacts):
    # the convolution accepts a sampled f_hat as well as the table
    t = artifacts.table
    k = np.arange(0.0, 80.0, 0.01)
    sf = SampledFunction(k, t.f_hat(k), envelope=t.envelope)
    for kk in (0.0, 2.0, 10.0):
        assert big_F_hat(sf, kk) == pytest.approx(big_F_hat(t, kk), rel=1e-7)


def test_f_hat_upper_envelope(artifacts, default_spec):
    C, d, eps = default_spec.bigC, default_spec.delta, default_spec.epsilon
    k = artifacts.fHat.nodes
    v = artifacts.fHat.values
    keep = (k >= 20) & (v > 1e-250)
    comp = np.log(v[keep]) + (1 - eps) * C * k[keep] ** d
    # compensated values stay bounded by a constant (they eventually decrease)
    half = len(comp) // 2
    assert comp[half:].max() <= comp[:half].max()


def test_tail_not_negligible_cap(default_spec):
    with pytest.raises(TailNotNegligible):
        run_pipeline(default_spec, GridConfig(kmax_cap=1000.0))


def test_grid_config_validation():
    with pytest.raises(DomainError):
        GridConfig(geo_ratio=1.0)
    with pytest.raises(DomainError):
        GridConfig(space_cutoff_rel=2.0)


def test_sampled_function_validation():
    with pytest.raises(ValueError):
        SampledFunction([0.0, 1.0, 1.0], [1.0, 2.0, 3.0])
    with pytest.raises(ValueError):
        SampledFunction([0.0, 1.0], [1.0, np.inf])
    x = np.linspace(-1, 1, 5)
    with pytest.raises(ValueError):
        SampledFunction(x, x + 1.0, parity=Parity.EVEN)
    SampledFunction(x, x**3, parity=Parity.ODD)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.0, 19.0))
def test_sampled_interpolation_even(k):
    nodes = np.linspace(0.0, 20.0, 401)
    sf = SampledFunction(nodes, np.cos(nodes) * np.exp(-0.1 * nodes))
    assert sf(k) == pytest.approx(math.cos(k) * math.exp(-0.1 * k), abs=1e-6)
    assert sf(-k) == sf(k)


def test_other_spec_pipeline_runs():
    spec = DecaySpec(2.0 / 3.0, 6.0)
    a = run_pipeline(spec)
    assert np.all(np.diff(a.bigFHat.values) <= 1e-14 * a.bigFHat.values[0])
    assert a.params.A == pytest.approx(2.0)
