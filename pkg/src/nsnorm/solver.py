"""Time integration of the incompressible flow on the torus.

Pseudo-spectral method: the advective product is formed in physical space
on the dealiased band, projected back onto divergence-free fields, and the
viscous term is handled by an exact integrating factor inside a classical
fourth-order Runge-Kutta scheme.  With the nonlinear term switched off the
stepper reduces to exact per-mode exponential decay.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field as dataclass_field
from typing import Iterator, Mapping

import numpy as np

from .balance import DiagnosticsRecord, vortex_stretching
from .errors import BlowUpError, ConfigurationError
from .fields import (
    Grid,
    ScalarField,
    SpectralField,
    _irfft_real,
    _rfft_full,
    project_coeffs,
    truncate_spectrum,
)
from .fixtures import (
    abc_flow,
    random_solenoidal,
    random_stream_2d,
    single_mode,
    taylor_green,
)
from .norms import l2_norm_sq, norm_report

logger = logging.getLogger(__name__)

RECIPES = ("taylor_green", "abc", "single_mode", "random", "random_2d")


@dataclass(frozen=True)
class SimulationConfig:
    grid: Grid
    nu: float
    dt: float
    t_end: float
    initial_condition: str = "taylor_green"
    ic_params: Mapping[str, float] = dataclass_field(default_factory=dict)
    output_every: int = 1
    seed: int = 0
    rho0: float = 1.0

    def __post_init__(self):
        for name in ("nu", "dt", "t_end", "rho0"):
            value = getattr(self, name)
            if not np.isfinite(value) or value <= 0.0:
                raise ConfigurationError(f"{name} must be finite and positive, got {value!r}")
        if self.initial_condition not in RECIPES:
            raise ConfigurationError(
                f"unknown initial condition {self.initial_condition!r}; "
                f"known recipes: {', '.join(RECIPES)}"
            )
        if not isinstance(self.output_every, int) or self.output_every < 1:
            raise ConfigurationError(
                f"output_every must be a positive integer, got {self.output_every!r}"
            )

    @property
    def n_steps(self) -> int:
        steps = round(self.t_end / self.dt)
        if steps < 1 or abs(steps * self.dt - self.t_end) > 1e-9 * max(self.dt, self.t_end):
            raise ConfigurationError(
                f"t_end={self.t_end!r} is not an integer multiple of dt={self.dt!r}"
            )
        return steps


@dataclass(frozen=True)
class TrajectoryState:
    field: SpectralField
    step_index: int = 0


def initial_field(cfg: SimulationConfig) -> SpectralField:
    """Build, dealias, and project the configured initial condition."""
    params = dict(cfg.ic_params)
    amplitude = params.pop("amplitude", 1.0) if cfg.initial_condition in ("random", "random_2d") else None
    if cfg.initial_condition == "taylor_green":
        f = taylor_green(cfg.grid, **params)
    elif cfg.initial_condition == "abc":
        f = abc_flow(cfg.grid, **params)
    elif cfg.initial_condition == "single_mode":
        f = single_mode(cfg.grid, **params)
    elif cfg.initial_condition == "random":
        f = random_solenoidal(cfg.grid, seed=cfg.seed, **params)
    else:
        f = random_stream_2d(cfg.grid, seed=cfg.seed, **params)
    coeffs = f.coeffs * cfg.grid.dealias_mask
    if amplitude is not None:
        coeffs = coeffs * float(amplitude)
    return SpectralField(cfg.grid, project_coeffs(coeffs, cfg.grid), time=0.0)


def _advection(coeffs: np.ndarray, grid: Grid) -> tuple[np.ndarray, float]:
    """Dealiased, projected -(v.grad)v plus the max speed seen on the grid.

    Velocity and all nine gradient components go through one batched
    transform; with both factors masked to the 2/3 band the quadratic
    product is alias-free on the base grid.
    """
    n = grid.n
    mask = grid.dealias_mask
    buf = np.empty((12, n, n, n), dtype=complex)
    np.multiply(coeffs, mask, out=buf[:3])
    np.multiply(grid.ik[:, None], buf[None, :3], out=buf[3:].reshape(3, 3, n, n, n))
    phys = _irfft_real(buf)
    v = phys[:3]
    grad = phys[3:].reshape(3, 3, n, n, n)
    adv = np.empty_like(v)
    for j in range(3):
        adv[j] = (v * grad[:, j]).sum(axis=0)
    out = _rfft_full(adv)
    out *= mask
    vmax = float(np.sqrt((v * v).sum(axis=0).max()))
    return -project_coeffs(out, grid), vmax


def nonlinear_term(f: SpectralField) -> SpectralField:
    """-P[(v.grad)v]: the projected advective forcing of the spectral system."""
    out, _ = _advection(f.coeffs, f.grid)
    return SpectralField(f.grid, out, f.time)


class _StepOp:
    """Per-(grid, nu, dt) integrating factors, precomputed once per run."""

    def __init__(self, grid: Grid, nu: float, dt: float):
        self.grid = grid
        self.nu = nu
        self.dt = dt
        self.e_half = np.exp(-nu * grid.k_sq * (0.5 * dt))
        self.e_full = np.exp(-nu * grid.k_sq * dt)

    def advance(self, coeffs: np.ndarray, *, nonlinear: bool) -> tuple[np.ndarray, float]:
        h = self.dt
        u0 = coeffs
        if not nonlinear:
            return self.e_full * u0, 0.0
        grid = self.grid
        k1, vmax = _advection(u0, grid)
        k2, _ = _advection(self.e_half * (u0 + 0.5 * h * k1), grid)
        k3, _ = _advection(self.e_half * u0 + 0.5 * h * k2, grid)
        k4, _ = _advection(self.e_full * u0 + h * self.e_half * k3, grid)
        new = self.e_full * u0 + (h / 6.0) * (
            self.e_full * k1 + 2.0 * self.e_half * (k2 + k3) + k4
        )
        return project_coeffs(new, grid), vmax


def step(
    state: TrajectoryState,
    cfg: SimulationConfig,
    *,
    nonlinear: bool = True,
    op: _StepOp | None = None,
) -> TrajectoryState:
    """One Runge-Kutta step of length cfg.dt on the integrating-factor form."""
    if op is None:
        op = _StepOp(cfg.grid, cfg.nu, cfg.dt)
    with np.errstate(over="ignore", invalid="ignore"):
        new, _ = op.advance(state.field.coeffs, nonlinear=nonlinear)
    t_new = state.field.time + cfg.dt
    if not np.isfinite(new).all():
        raise BlowUpError(state.step_index + 1, t_new)
    return TrajectoryState(
        field=SpectralField(cfg.grid, new, time=t_new),
        step_index=state.step_index + 1,
    )


def diagnose(f: SpectralField, oversample: int = 2) -> DiagnosticsRecord:
    """Norms, energy, and the stretching integral of one snapshot."""
    norms = norm_report(f, oversample)
    return DiagnosticsRecord(
        t=f.time,
        energy=0.5 * norms.l2**2,
        norms=norms,
        stretching=vortex_stretching(f, oversample),
    )


def simulate(
    cfg: SimulationConfig, *, nonlinear: bool = True
) -> Iterator[tuple[SpectralField, DiagnosticsRecord]]:
    """Run the configured trajectory, yielding (snapshot, record) pairs.

    Emits the initial state, every output_every-th step, and the final step.
    Deterministic for a fixed config and seed.  A non-finite state raises a
    blow-up error carrying the step index.
    """
    n_steps = cfg.n_steps
    op = _StepOp(cfg.grid, cfg.nu, cfg.dt)
    state = TrajectoryState(field=initial_field(cfg))
    yield state.field, diagnose(state.field)

    cfl_warned = False
    for i in range(1, n_steps + 1):
        with np.errstate(over="ignore", invalid="ignore"):
            new, vmax = op.advance(state.field.coeffs, nonlinear=nonlinear)
        t_new = state.field.time + cfg.dt
        if not np.isfinite(new).all():
            raise BlowUpError(i, t_new)
        state = TrajectoryState(
            field=SpectralField(cfg.grid, new, time=t_new), step_index=i
        )
        if vmax > 0.0 and cfg.dt > 0.5 * cfg.grid.spacing / vmax and not cfl_warned:
            logger.warning(
                "dt=%g exceeds the advisory stability bound %.3g at step %d",
                cfg.dt, 0.5 * cfg.grid.spacing / vmax, i,
            )
            cfl_warned = True
        if i % cfg.output_every == 0 or i == n_steps:
            yield state.field, diagnose(state.field)


@dataclass(frozen=True)
class SimulationResult:
    records: list[DiagnosticsRecord]
    snapshots: list[SpectralField]
    final_field: SpectralField


def run_simulation(
    cfg: SimulationConfig, *, nonlinear: bool = True, keep_fields: bool = False
) -> SimulationResult:
    """Collect a full trajectory; on blow-up re-raise with the records so far."""
    records: list[DiagnosticsRecord] = []
    snapshots: list[SpectralField] = []
    last = None
    try:
        for snapshot, record in simulate(cfg, nonlinear=nonlinear):
            records.append(record)
            last = snapshot
            if keep_fields:
                snapshots.append(snapshot)
    except BlowUpError as err:
        raise BlowUpError(err.step_index, err.time, records) from None
    assert last is not None
    return SimulationResult(records=records, snapshots=snapshots, final_field=last)


def _padded_products(f: SpectralField) -> tuple[np.ndarray, int]:
    """Physical samples of v on the double grid, where quadratic products are exact."""
    m = 2 * f.grid.n
    return _irfft_real(f.coeffs, m), m


def advection_exact(f: SpectralField) -> np.ndarray:
    """(v.grad)v without dealias mask or projection, exact via double-grid products."""
    grid = f.grid
    n = grid.n
    v, m = _padded_products(f)
    grad = _irfft_real(
        (grid.ik[:, None] * f.coeffs[None, :]).reshape(9, n, n, n), m
    ).reshape(3, 3, m, m, m)
    adv = np.empty_like(v)
    for j in range(3):
        adv[j] = (v * grad[:, j]).sum(axis=0)
    return truncate_spectrum(_rfft_full(adv), n)


def recover_pressure(f: SpectralField, rho0: float = 1.0) -> ScalarField:
    """Zero-mean pressure from the velocity, via the spectral Poisson solve.

    Momentum products v_i v_j are formed on the double grid so their spectra
    are exact; the divergence of the recovered pressure gradient then cancels
    the divergence of the advective flux to roundoff.
    """
    grid = f.grid
    n = grid.n
    v, m = _padded_products(f)
    pairs = ((0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2))
    prods = np.empty((len(pairs), m, m, m))
    for idx, (i, j) in enumerate(pairs):
        prods[idx] = v[i] * v[j]
    spectra = truncate_spectrum(_rfft_full(prods), n)
    k = grid.k
    num = np.zeros((n, n, n), dtype=complex)
    for idx, (i, j) in enumerate(pairs):
        weight = 1.0 if i == j else 2.0
        num += weight * k[i] * k[j] * spectra[idx]
    p_hat = -rho0 * num / grid.k_sq_safe
    p_hat[0, 0, 0] = 0.0
    return ScalarField(grid, p_hat, f.time)
