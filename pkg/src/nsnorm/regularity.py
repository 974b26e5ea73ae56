"""Smallness criterion and decay audit along trajectories.

The argument being checked: the cubic stretching term obeys
|S| <= C ||v||_L3 ||lap v||_L2^2 with an empirical constant C, so once
||v||_L3 < nu / C the enstrophy production loses to dissipation, and with
the spectral-gap inequality ||lap v||^2 >= K ||grad v||^2 (valid for
zero-mean fields on the torus, K = (2*pi/length)^2) the gradient norm must
decay monotonically.  The audit evaluates both discrete inequalities on
recorded samples and reports the observed decay behavior.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .balance import DiagnosticsRecord, _interior_derivative, _ratio, _require_enough
from .errors import ConfigurationError, ZeroFieldError
from .fields import Grid, SpectralField
from .norms import grad_l2_norm_sq, h_half_norm_sq, lap_l2_norm_sq, lp_norm

# Regression constants pinned from the reference corpus of 100 random
# solenoidal fields (seeds 0..99, n=32, k_max=8, energy slope -1).  Corpus
# maxima are lower bounds on the true best constants; they are pinned for
# reproducibility, not claimed sharp.
PINNED_C_EMP = 0.00013925153556996128  # argmax seed 97
PINNED_C_SOB = 0.029381620236108835  # argmax seed 26


def poincare_constant(grid: Grid) -> float:
    """Spectral-gap constant for zero-mean fields: (2*pi/length)^2."""
    return (2.0 * np.pi / grid.length) ** 2


def poincare_ratio(f: SpectralField) -> float:
    """||lap v||^2 / ||grad v||^2; at least poincare_constant(grid), with
    equality exactly on |k|=1 single-shell fields."""
    grad2 = grad_l2_norm_sq(f)
    if grad2 == 0.0:
        raise ZeroFieldError("the spectral-gap ratio is undefined for the zero field")
    return lap_l2_norm_sq(f) / grad2


@dataclass(frozen=True)
class CriterionVerdict:
    """Smallness check at t=0 plus, when a trajectory is audited, its decay record.

    l3_at_t0 is checked unsquared against nu/C; l3_sq_at_t0 is surfaced so
    the squared reading of the criterion can be formed by the caller.
    h_half_at_t0 is reported with no threshold attached.  chain_* fields
    audit d/dt(||grad v||^2/2) + nu*||lap v||^2 <= C*||v||_L3*||lap v||^2;
    gronwall_* fields audit the same inequality after the spectral-gap step,
    d/dt ||grad v||^2 <= -K(2nu - 2C||v||_L3)||grad v||^2, which is only
    expected to hold while the smallness condition does.
    """

    l3_at_t0: float
    l3_sq_at_t0: float
    threshold: float
    satisfied: bool
    h_half_at_t0: float
    poincare_k: float
    decay_monotone: bool | None = None
    max_enstrophy_over_initial: float | None = None
    chain_residual_max: float | None = None
    chain_ok: bool | None = None
    gronwall_residual_max: float | None = None
    gronwall_ok: bool | None = None


def _check_constants(nu: float, c_const: float) -> None:
    if not nu > 0.0:
        raise ConfigurationError(f"viscosity must be positive, got {nu!r}")
    if not c_const > 0.0:
        raise ConfigurationError(f"the chain constant must be positive, got {c_const!r}")


def smallness_check(
    f: SpectralField, nu: float, c_const: float, oversample: int = 2
) -> CriterionVerdict:
    """Evaluate ||v||_L3 <= nu/C on one field (no trajectory data attached)."""
    _check_constants(nu, c_const)
    l3 = lp_norm(f, 3, oversample)
    return CriterionVerdict(
        l3_at_t0=l3,
        l3_sq_at_t0=l3 * l3,
        threshold=nu / c_const,
        satisfied=l3 <= nu / c_const,
        h_half_at_t0=h_half_norm_sq(f) ** 0.5,
        poincare_k=poincare_constant(f.grid),
    )


def gronwall_audit(
    records: Sequence[DiagnosticsRecord],
    nu: float,
    c_const: float,
    k_const: float = 1.0,
    residual_tol: float = 1e-3,
    rise_tol: float = 1e-9,
) -> CriterionVerdict:
    """Audit the decay inequalities along a recorded trajectory.

    Residuals are one-sided (positive means violation) and normalized by the
    dissipation term; 0/0 intervals count as zero.  decay_monotone tolerates
    a relative rise of rise_tol between consecutive samples to absorb
    roundoff on flat stretches.
    """
    _check_constants(nu, c_const)
    if not k_const > 0.0:
        raise ConfigurationError(f"the spectral-gap constant must be positive, got {k_const!r}")
    _require_enough(records)

    t = np.array([r.t for r in records])
    grad2 = np.array([r.norms.grad_l2_sq for r in records])
    lap2 = np.array([r.norms.lap_l2_sq for r in records])
    l3 = np.array([r.norms.l3 for r in records])
    h_half_sq0 = records[0].norms.h_half_sq

    mid = slice(1, -1)
    d_half_grad2 = _interior_derivative(t, 0.5 * grad2)
    chain_res = _ratio(
        d_half_grad2 + nu * lap2[mid] - c_const * l3[mid] * lap2[mid],
        nu * lap2[mid],
    )
    d_grad2 = _interior_derivative(t, grad2)
    gron_res = _ratio(
        d_grad2 + k_const * (2.0 * nu - 2.0 * c_const * l3[mid]) * grad2[mid],
        2.0 * nu * k_const * grad2[mid],
    )

    rises = grad2[1:] - grad2[:-1] * (1.0 + rise_tol)
    if grad2[0] > 0.0:
        growth = float(grad2.max() / grad2[0])
    else:
        growth = 1.0 if grad2.max() == 0.0 else float("inf")

    l3_0 = float(l3[0])
    return CriterionVerdict(
        l3_at_t0=l3_0,
        l3_sq_at_t0=l3_0 * l3_0,
        threshold=nu / c_const,
        satisfied=l3_0 <= nu / c_const,
        h_half_at_t0=h_half_sq0**0.5,
        poincare_k=k_const,
        decay_monotone=bool((rises <= 0.0).all()),
        max_enstrophy_over_initial=growth,
        chain_residual_max=float(chain_res.max()),
        chain_ok=bool(chain_res.max() <= residual_tol),
        gronwall_residual_max=float(gron_res.max()),
        gronwall_ok=bool(gron_res.max() <= residual_tol),
    )
