"""Zoom maps on the torus: mode remapping and the norm transformation laws."""

import numpy as np
import pytest

from nsnorm import (
    ConfigurationError,
    RescaleOverflowError,
    SpectralField,
    ZeroFieldError,
    random_solenoidal,
    single_mode,
    verify_chain_invariance,
    verify_h_half,
    verify_lp_ladder,
    verify_ns_covariance,
    verify_pressure_scaling,
)
from nsnorm.scaling import rescale, scaling_report

SINGLE_MODE_INHOM_RATIO = np.sqrt(10.0) / 4.0


def test_rescale_moves_modes_and_rescales_amplitude(grid32):
    sm = single_mode(grid32)
    out = rescale(sm, 2)
    assert out.coeffs[1, 2, 0, 0] == 1.0
    assert out.coeffs[1, -2, 0, 0] == 1.0
    assert np.count_nonzero(out.coeffs) == 2


def test_rescale_identity_and_time_contraction(grid32):
    f = SpectralField(grid32, single_mode(grid32).coeffs, time=0.16)
    assert np.array_equal(rescale(f, 1).coeffs, f.coeffs)
    assert rescale(f, 1).time == 0.16
    assert rescale(f, 4).time == pytest.approx(0.01)


def test_rescale_composes(narrow_corpus):
    f = narrow_corpus[1]
    twice = rescale(rescale(f, 2), 2)
    once = rescale(f, 4)
    assert np.array_equal(twice.coeffs, once.coeffs)


def test_rescale_validates_the_zoom_factor(grid32):
    sm = single_mode(grid32)
    with pytest.raises(ConfigurationError):
        rescale(sm, 0)
    with pytest.raises(ConfigurationError):
        rescale(sm, -2)


def test_rescale_overflow_names_the_offending_mode(grid32):
    f = random_solenoidal(grid32, k_max=9.0, seed=70)
    with pytest.raises(RescaleOverflowError) as exc:
        rescale(f, 2)
    err = exc.value
    assert err.lam == 2
    assert err.limit == 15
    assert max(abs(c) for c in err.mode) * 2 > 15
    assert "cannot be remapped" in str(err)
    # the named mode really carries energy
    assert np.abs(f.coeffs[(slice(None), *err.mode)]).max() > 0.0


def test_rescale_ignores_numerical_dust(grid32):
    c = np.array(single_mode(grid32).coeffs)
    c[1, 9, 0, 0] = 1e-16
    c[1, -9, 0, 0] = 1e-16
    f = SpectralField(grid32, c)
    out = rescale(f, 2)  # the 1e-16 modes would overflow, but count as dust
    assert np.count_nonzero(out.coeffs) == 2


def test_power_ratios_follow_the_zoom_exponent(narrow_corpus):
    for f in narrow_corpus[:3]:
        for lam in (2, 3):
            for row in verify_lp_ladder(f, lam):
                assert row.predicted == lam ** (row.p - 3)
                assert row.measured / row.predicted == pytest.approx(1.0, abs=1e-12)


def test_cubic_power_is_zoom_invariant(narrow_corpus):
    for f in narrow_corpus[:3]:
        (row,) = verify_lp_ladder(f, 4, p_list=(3.0,))
        assert row.measured == pytest.approx(1.0, abs=1e-10)


def test_half_derivative_ratios_on_a_unit_mode(grid32):
    sm = single_mode(grid32)
    hom, inhom = verify_h_half(sm, 2)
    assert hom == pytest.approx(1.0, abs=1e-14)
    assert inhom == pytest.approx(SINGLE_MODE_INHOM_RATIO, rel=1e-12)
    assert abs(inhom - 1.0) > 0.01


def test_homogeneous_half_norm_is_invariant_on_generic_fields(narrow_corpus):
    for f in narrow_corpus[:3]:
        hom, _ = verify_h_half(f, 3)
        assert hom == pytest.approx(1.0, abs=1e-12)


def test_half_derivative_ratio_rejects_the_zero_field(grid32):
    zero = SpectralField(grid32, np.zeros((3, 32, 32, 32), dtype=complex))
    with pytest.raises(ZeroFieldError):
        verify_h_half(zero, 2)


def test_momentum_residual_transforms_covariantly(narrow_corpus):
    f = narrow_corpus[2]
    assert verify_ns_covariance(f, 2, nu=0.7) <= 1e-12
    assert verify_ns_covariance(f, 3, nu=0.01) <= 1e-12


def test_pressure_picks_up_two_powers_of_the_zoom(narrow_corpus):
    f = narrow_corpus[3]
    assert verify_pressure_scaling(f, 2, rho0=1.3) <= 1e-12


def test_per_cell_chain_ratio_is_zoom_invariant(narrow_corpus):
    f = narrow_corpus[4]
    base, cell = verify_chain_invariance(f, 2)
    assert cell == pytest.approx(base, rel=1e-12)


def test_scaling_report_collects_every_law(narrow_corpus):
    rep = scaling_report(narrow_corpus[5], 2, p_list=(2.0, 3.0), nu=0.4, rho0=2.0)
    assert rep.lam == 2
    assert [row.p for row in rep.ladder] == [2.0, 3.0]
    assert rep.h_half_hom_ratio == pytest.approx(1.0, abs=1e-12)
    assert rep.ns_residual_covariance <= 1e-12
    assert rep.pressure_mismatch <= 1e-12
    assert rep.chain_ratio_cell == pytest.approx(rep.chain_ratio_base, rel=1e-12)
