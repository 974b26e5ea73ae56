"""Energy and enstrophy budget auditing.

Along an exact trajectory of the dealiased spectral system the budgets

    d/dt (1/2 ||v||_L2^2)      = -nu ||grad v||_L2^2
    d/dt (1/2 ||grad v||_L2^2) = -nu ||lap v||_L2^2 - S(v)

hold identically, where S is the cubic gradient contraction computed by
`vortex_stretching`.  The residual functions difference recorded samples in
time and normalize by the dissipation term, so a small residual certifies
both budgets up to time-discretization error.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .errors import InsufficientDataError, ZeroFieldError
from .fields import SpectralField, _irfft_real, gradient
from .norms import (
    NormReport,
    _quadrature_grid,
    lap_l2_norm_sq,
    lp_norm,
    tensor_lp_norm,
)


@dataclass(frozen=True)
class DiagnosticsRecord:
    """One time sample of the tracked norms and budget terms."""

    t: float
    energy: float
    norms: NormReport
    stretching: float
    energy_residual: float | None = None
    enstrophy_residual: float | None = None


def _gradient_samples(f: SpectralField, m: int) -> np.ndarray:
    """Physical samples of every d_i v_j on an m^3 grid, shape (3, 3, m, m, m)."""
    n = f.grid.n
    gc = (1j * f.grid.k[:, None] * f.coeffs[None, :]).reshape(9, n, n, n)
    return _irfft_real(gc, m).reshape(3, 3, m, m, m)


def populated_band(f: SpectralField) -> int:
    """Largest |k_axis| carrying a nonzero coefficient, over all axes."""
    nz = ((f.coeffs.real != 0.0) | (f.coeffs.imag != 0.0)).any(axis=0)
    w = np.abs(f.grid.wavenumbers)
    band = 0
    for keep in (nz.any(axis=(1, 2)), nz.any(axis=(0, 2)), nz.any(axis=(0, 1))):
        if keep.any():
            band = max(band, int(w[keep].max()))
    return band


def _cubic_grid(f: SpectralField, oversample: int) -> int:
    # a cubic product of band-B factors has per-axis modes up to 3B, so the
    # base grid already integrates it exactly whenever 3B < n
    m = _quadrature_grid(3, oversample, f.grid.n)
    if 3 * populated_band(f) < f.grid.n:
        return f.grid.n
    return m


def vortex_stretching(f: SpectralField, oversample: int = 2) -> float:
    """S(v) = integral of d_i v_j  d_i v_k  d_k v_j, summed over i, j, k.

    Oversampled quadrature of the gradient contraction; the quadrature runs
    on the base grid instead whenever the populated band makes that already
    exact (always true for dealiased fields), so the value is exact up to
    roundoff either way.
    """
    m = _cubic_grid(f, oversample)
    g = _gradient_samples(f, m)
    acc = np.zeros((m, m, m))
    for i in range(3):
        for j in range(3):
            for k in range(3):
                acc += g[i, j] * g[i, k] * g[k, j]
    return float(acc.mean() * f.grid.volume)


def vortex_stretching_ibp(f: SpectralField, oversample: int = 2) -> float:
    """Integration-by-parts partner of `vortex_stretching`.

    Computes  -integral of v_j (d_i v_k)(d_i d_k v_j) dV,  which equals S(v)
    for periodic divergence-free fields: moving d_i off the first gradient
    factor splits the integral into this term and
    integral of v_j (lap v_k)(d_k v_j) dV = integral of lap(v) . grad(|v|^2/2),
    and the latter vanishes identically because lap(v) is divergence-free.
    """
    grid = f.grid
    m = _cubic_grid(f, oversample)
    k = grid.k

    v = _irfft_real(f.coeffs, m)
    g = _gradient_samples(f, m)

    acc = np.zeros((m, m, m))
    for i in range(3):
        for kk in range(i, 3):
            hess_phys = _irfft_real(-k[i] * k[kk] * f.coeffs, m)
            inner = (v * hess_phys).sum(axis=0)
            if kk == i:
                acc += g[i, i] * inner
            else:
                acc += (g[i, kk] + g[kk, i]) * inner
    return float(-acc.mean() * grid.volume)


@dataclass(frozen=True)
class ChainReport:
    """Empirical pieces of the bound |S| <= C ||v||_L3 ||lap v||_L2^2.

    holder_bound = ||v||_L3 * ||grad v||_L6 * ||lap v||_L2 dominates |S| with
    no constant; sobolev_ratio = ||grad v||_L6 / ||lap v||_L2 is the factor a
    Sobolev constant must cover; chain_ratio = |S| / (||v||_L3 ||lap v||_L2^2)
    is the empirical candidate for C on this field.
    """

    stretching_abs: float
    holder_bound: float
    sobolev_ratio: float
    chain_ratio: float


def chain_report(f: SpectralField, oversample: int = 2) -> ChainReport:
    l3 = lp_norm(f, 3, oversample)
    lap = lap_l2_norm_sq(f) ** 0.5
    if l3 == 0.0 or lap == 0.0:
        raise ZeroFieldError("chain ratios are undefined for the zero field")
    grad6 = tensor_lp_norm(gradient(f), 6, oversample)
    s_abs = abs(vortex_stretching(f, oversample))
    return ChainReport(
        stretching_abs=s_abs,
        holder_bound=l3 * grad6 * lap,
        sobolev_ratio=grad6 / lap,
        chain_ratio=s_abs / (l3 * lap * lap),
    )


def _interior_derivative(t: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Derivative of y at t[1:-1] from the parabola through each sample triple.

    Handles a non-uniform final spacing (the last sample may fall off the
    output cadence).
    """
    t0, t1, t2 = t[:-2], t[1:-1], t[2:]
    y0, y1, y2 = y[:-2], y[1:-1], y[2:]
    return (
        y0 * (t1 - t2) / ((t0 - t1) * (t0 - t2))
        + y1 * (2.0 * t1 - t0 - t2) / ((t1 - t0) * (t1 - t2))
        + y2 * (t1 - t0) / ((t2 - t0) * (t2 - t1))
    )


def _require_enough(records: Sequence[DiagnosticsRecord]) -> None:
    if len(records) < 3:
        raise InsufficientDataError(
            f"residuals need at least 3 samples, got {len(records)}"
        )


def _ratio(num: np.ndarray, den: np.ndarray) -> np.ndarray:
    # 0/0 -> 0: an identically zero denominator only occurs on zero fields
    out = np.zeros_like(num)
    np.divide(num, den, out=out, where=den != 0.0)
    return out


def energy_residual(records: Sequence[DiagnosticsRecord], nu: float) -> np.ndarray:
    """(dE/dt + nu*||grad v||^2) / (nu*||grad v||^2) at each interior sample."""
    _require_enough(records)
    t = np.array([r.t for r in records])
    energy = np.array([r.energy for r in records])
    grad2 = np.array([r.norms.grad_l2_sq for r in records])
    den = nu * grad2[1:-1]
    return _ratio(_interior_derivative(t, energy) + den, den)


def enstrophy_residual(records: Sequence[DiagnosticsRecord], nu: float) -> np.ndarray:
    """(d/dt(||grad v||^2/2) + nu*||lap v||^2 + S) / (nu*||lap v||^2), interior."""
    _require_enough(records)
    t = np.array([r.t for r in records])
    half_grad2 = 0.5 * np.array([r.norms.grad_l2_sq for r in records])
    lap2 = np.array([r.norms.lap_l2_sq for r in records])
    s = np.array([r.stretching for r in records])
    den = nu * lap2[1:-1]
    return _ratio(_interior_derivative(t, half_grad2) + den + s[1:-1], den)


def attach_residuals(
    records: Sequence[DiagnosticsRecord], nu: float
) -> list[DiagnosticsRecord]:
    """Copy of the records with residual fields filled at interior samples."""
    e_res = energy_residual(records, nu)
    z_res = enstrophy_residual(records, nu)
    out = [records[0]]
    for i in range(1, len(records) - 1):
        out.append(
            replace(
                records[i],
                energy_residual=float(e_res[i - 1]),
                enstrophy_residual=float(z_res[i - 1]),
            )
        )
    out.append(records[-1])
    return out


@dataclass(frozen=True)
class ConstantsEstimate:
    """Corpus maxima of the chain and Sobolev ratios.

    A corpus maximum is a lower bound on the true best constant, never a
    certificate for the supremum over all fields.
    """

    c_emp: float
    c_emp_label: str
    c_sob: float
    c_sob_label: str
    count: int


def estimate_constants(
    fields: Sequence[SpectralField],
    labels: Sequence[str] | None = None,
    oversample: int = 2,
) -> ConstantsEstimate:
    """Maximize chain_ratio and sobolev_ratio over a corpus, tracking argmaxes."""
    if len(fields) == 0:
        raise InsufficientDataError("constant estimation needs a nonempty corpus")
    if labels is None:
        labels = [str(i) for i in range(len(fields))]
    if len(labels) != len(fields):
        raise ValueError("labels and fields must have equal length")

    c_emp = -1.0
    c_sob = -1.0
    emp_label = sob_label = ""
    for field, label in zip(fields, labels):
        report = chain_report(field, oversample)
        if report.chain_ratio > c_emp:
            c_emp, emp_label = report.chain_ratio, label
        if report.sobolev_ratio > c_sob:
            c_sob, sob_label = report.sobolev_ratio, label
    return ConstantsEstimate(
        c_emp=c_emp, c_emp_label=emp_label, c_sob=c_sob, c_sob_label=sob_label,
        count=len(fields),
    )
