"""Norms of spectral velocity fields.

Quantities with a Parseval expression (L2, gradient L2, Laplacian L2, the
half-derivative Sobolev norms) are exact mode sums.  General L^p norms use
physical-space quadrature of the pointwise speed on an oversampled grid,
because |v|^p of a band-limited field is not band-limited for p != 2; the
default oversample of 2 makes the quadrature exact for even p on dealiased
fields and certifiably converged otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ZeroFieldError
from .fields import Grid, SpectralField, TensorField, _irfft_real

ALLOWED_OVERSAMPLE = (1, 2, 4)


def _quadrature_grid(p: float, oversample: int, n: int) -> int:
    if not 1.0 <= p <= 8.0:
        raise ValueError(f"p must lie in [1, 8], got {p!r}")
    if oversample not in ALLOWED_OVERSAMPLE:
        raise ValueError(f"oversample must be one of {ALLOWED_OVERSAMPLE}, got {oversample!r}")
    return oversample * n


def _speed_sq(coeffs: np.ndarray, m: int) -> np.ndarray:
    """Pointwise squared magnitude summed over leading components, m^3 samples."""
    u = _irfft_real(coeffs.reshape(-1, *coeffs.shape[-3:]), m)
    return (u * u).sum(axis=0)


def lp_integral(coeffs: np.ndarray, grid: Grid, p: float, m: int) -> float:
    """integral over the torus of |v|^p, quadrature on an m^3 uniform grid."""
    s = _speed_sq(coeffs, m)
    return float(np.mean(s ** (0.5 * p)) * grid.volume)


def lp_norm(f: SpectralField, p: float, oversample: int = 2) -> float:
    """[integral of ||v(x)||^p dV]^(1/p) over the torus."""
    m = _quadrature_grid(p, oversample, f.grid.n)
    return lp_integral(f.coeffs, f.grid, p, m) ** (1.0 / p)


def tensor_lp_norm(tf: TensorField, p: float, oversample: int = 2) -> float:
    """L^p norm of a rank-2 field under the pointwise Frobenius magnitude."""
    m = _quadrature_grid(p, oversample, tf.grid.n)
    return lp_integral(tf.coeffs, tf.grid, p, m) ** (1.0 / p)


def l2_norm_sq(f: SpectralField) -> float:
    """Squared L2 norm by Parseval: volume times the mode sum of |c|^2."""
    c = f.coeffs
    return float(f.grid.volume * (c.real**2 + c.imag**2).sum())


def grad_l2_norm_sq(f: SpectralField) -> float:
    """Squared L2 norm of the velocity gradient, volume * sum |k|^2 |c|^2."""
    c = f.coeffs
    return float(f.grid.volume * (f.grid.k_sq * (c.real**2 + c.imag**2).sum(axis=0)).sum())


def lap_l2_norm_sq(f: SpectralField) -> float:
    """Squared L2 norm of the vector Laplacian, volume * sum |k|^4 |c|^2."""
    c = f.coeffs
    return float(f.grid.volume * (f.grid.k_sq**2 * (c.real**2 + c.imag**2).sum(axis=0)).sum())


def h_half_norm_sq(f: SpectralField, homogeneous: bool = False) -> float:
    """Squared half-derivative Sobolev norm.

    Inhomogeneous weight (1 + |k|^2)^(1/2) per mode; the homogeneous variant
    uses |k| and is the one that is exactly invariant under the velocity
    rescaling (see the scaling module).
    """
    c = f.coeffs
    mag_sq = (c.real**2 + c.imag**2).sum(axis=0)
    ksq = f.grid.k_sq
    weight = np.sqrt(ksq) if homogeneous else np.sqrt(1.0 + ksq)
    return float(f.grid.volume * (weight * mag_sq).sum())


def embedding_ratio(f: SpectralField, p: float, q: float, oversample: int = 2) -> float:
    """||v||_Lp / ||v||_Lq for p <= q.

    On the finite-measure torus the ratio is bounded by volume^(1/p - 1/q)
    (attained exactly by constant-speed fields); the bound depends on the
    domain volume, there is no domain-free constant.
    """
    if q < p:
        raise ValueError(f"need p <= q, got p={p!r}, q={q!r}")
    lq = lp_norm(f, q, oversample)
    if lq == 0.0:
        raise ZeroFieldError("embedding ratio is undefined for the zero field")
    if p == q:
        return 1.0
    return lp_norm(f, p, oversample) / lq


@dataclass(frozen=True)
class NormReport:
    """All tracked norms of one field.

    l2/l3/l4 are norms; grad_l2_sq, lap_l2_sq and both h_half entries are
    squared quantities, matching the diagnostics CSV columns.
    """

    l2: float
    l3: float
    l4: float
    grad_l2_sq: float
    lap_l2_sq: float
    h_half_sq: float
    h_half_hom_sq: float


def norm_report(f: SpectralField, oversample: int = 2) -> NormReport:
    """Evaluate every tracked norm; L3 and L4 share one quadrature pass.

    The L2 entry comes from the Parseval mode sum, which the quadrature
    route reproduces to roundoff for band-limited fields.
    """
    m = _quadrature_grid(3, oversample, f.grid.n)
    s = _speed_sq(f.coeffs, m)
    vol = f.grid.volume
    l3 = float(np.mean(s**1.5) * vol) ** (1.0 / 3.0)
    l4 = float(np.mean(s * s) * vol) ** 0.25

    c = f.coeffs
    mag_sq = (c.real**2 + c.imag**2).sum(axis=0)
    ksq = f.grid.k_sq
    return NormReport(
        l2=float(vol * mag_sq.sum()) ** 0.5,
        l3=l3,
        l4=l4,
        grad_l2_sq=float(vol * (ksq * mag_sq).sum()),
        lap_l2_sq=float(vol * (ksq**2 * mag_sq).sum()),
        h_half_sq=float(vol * (np.sqrt(1.0 + ksq) * mag_sq).sum()),
        h_half_hom_sq=float(vol * (np.sqrt(ksq) * mag_sq).sum()),
    )
