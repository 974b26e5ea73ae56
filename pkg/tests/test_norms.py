"""Norm evaluation: quadrature, mode sums, and embedding ratios."""

import numpy as np
import pytest

from nsnorm import (
    SpectralField,
    ZeroFieldError,
    embedding_ratio,
    make_grid,
    random_solenoidal,
    single_mode,
    taylor_green,
)
from nsnorm.fields import gradient, scaled
from nsnorm.norms import (
    grad_l2_norm_sq,
    h_half_norm_sq,
    l2_norm_sq,
    lap_l2_norm_sq,
    lp_norm,
    norm_report,
    tensor_lp_norm,
)

PI3 = np.pi**3
VOL = (2 * np.pi) ** 3


def constant_speed_field(grid):
    """v = (0, cos x, sin x): unit speed everywhere, divergence-free."""
    c = np.zeros((3, grid.n, grid.n, grid.n), dtype=complex)
    c[1, 1, 0, 0] = 0.5
    c[1, -1, 0, 0] = 0.5
    c[2, 1, 0, 0] = -0.5j
    c[2, -1, 0, 0] = 0.5j
    return SpectralField(grid, c)


def test_quadrature_l2_matches_parseval_sum(grid32):
    for seed in range(3):
        f = random_solenoidal(grid32, seed=seed)
        assert lp_norm(f, 2) == pytest.approx(l2_norm_sq(f) ** 0.5, rel=1e-12)


def test_lp_norms_are_absolutely_homogeneous(grid32):
    f = random_solenoidal(grid32, seed=30)
    for alpha in (-2.0, 0.5, 3.0):
        g = scaled(f, alpha)
        for p in (2.0, 3.0, 4.0):
            assert lp_norm(g, p) == pytest.approx(abs(alpha) * lp_norm(f, p), rel=1e-12)
        assert grad_l2_norm_sq(g) == pytest.approx(alpha**2 * grad_l2_norm_sq(f), rel=1e-13)


def test_lp_rejects_out_of_range_arguments(grid32):
    f = single_mode(grid32)
    with pytest.raises(ValueError):
        lp_norm(f, 0.5)
    with pytest.raises(ValueError):
        lp_norm(f, 9.0)
    with pytest.raises(ValueError):
        lp_norm(f, 3, oversample=3)


def test_cubic_quadrature_is_converged_at_default_oversampling(narrow_corpus):
    # doubling the quadrature grid must not move the L3 norm
    for f in narrow_corpus:
        coarse = lp_norm(f, 3, oversample=2)
        fine = lp_norm(f, 3, oversample=4)
        assert abs(fine - coarse) <= 1e-8 * fine


def test_lp_ordering_on_the_unit_volume_torus(grid32):
    # probability-normalized torus: higher p gives larger norms per unit mass
    f = taylor_green(grid32)
    n2, n3, n4 = (lp_norm(f, p) / VOL ** (1 / p) for p in (2.0, 3.0, 4.0))
    assert n2 < n3 < n4


def test_embedding_ratio_saturates_on_constant_speed_fields(grid32):
    f = constant_speed_field(grid32)
    for p, q in ((2.0, 3.0), (3.0, 4.0), (2.0, 6.0)):
        bound = VOL ** (1 / p - 1 / q)
        assert embedding_ratio(f, p, q) == pytest.approx(bound, rel=1e-12)


def test_embedding_ratio_obeys_the_volume_bound(narrow_corpus):
    for f in narrow_corpus:
        for p, q in ((2.0, 3.0), (2.0, 4.0), (3.0, 4.0)):
            assert embedding_ratio(f, p, q) <= VOL ** (1 / p - 1 / q) * (1 + 1e-12)


def test_embedding_ratio_endpoints_and_errors(grid32):
    f = taylor_green(grid32)
    assert embedding_ratio(f, 3, 3) == 1.0
    assert embedding_ratio(f, 2, 3) < np.sqrt(2 * np.pi)
    with pytest.raises(ValueError):
        embedding_ratio(f, 4, 2)
    zero = SpectralField(grid32, np.zeros((3, 32, 32, 32), dtype=complex))
    with pytest.raises(ZeroFieldError):
        embedding_ratio(zero, 2, 3)


def test_half_derivative_norm_on_a_unit_mode(grid32):
    sm = single_mode(grid32)
    assert h_half_norm_sq(sm, homogeneous=True) == pytest.approx(4 * PI3, rel=1e-14)
    assert h_half_norm_sq(sm) == pytest.approx(np.sqrt(2) * 4 * PI3, rel=1e-14)


def test_homogeneous_half_norm_never_exceeds_inhomogeneous(narrow_corpus):
    for f in narrow_corpus:
        assert h_half_norm_sq(f, homogeneous=True) < h_half_norm_sq(f)


def test_gradient_l6_norm_of_a_unit_mode(grid32):
    sm = single_mode(grid32)
    assert tensor_lp_norm(gradient(sm), 6) ** 6 == pytest.approx(VOL * 5 / 16, rel=1e-13)


def test_norm_report_agrees_with_individual_evaluations(grid32):
    f = random_solenoidal(grid32, seed=31)
    rep = norm_report(f)
    assert rep.l2 == pytest.approx(l2_norm_sq(f) ** 0.5, rel=1e-13)
    assert rep.l3 == pytest.approx(lp_norm(f, 3), rel=1e-13)
    assert rep.l4 == pytest.approx(lp_norm(f, 4), rel=1e-13)
    assert rep.grad_l2_sq == grad_l2_norm_sq(f)
    assert rep.lap_l2_sq == lap_l2_norm_sq(f)
    assert rep.h_half_sq == h_half_norm_sq(f)
    assert rep.h_half_hom_sq == h_half_norm_sq(f, homogeneous=True)


def test_norms_scale_with_domain_volume():
    # same single-mode shape on a torus of twice the side length
    small = single_mode(make_grid(16))
    big = single_mode(make_grid(16, length=4 * np.pi))
    assert l2_norm_sq(big) == pytest.approx(8 * l2_norm_sq(small), rel=1e-13)
