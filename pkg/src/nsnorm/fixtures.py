"""Initial conditions built directly in coefficient space.

Trig fixtures place their handful of modes exactly (no transform round-trip),
so they are solenoidal and Hermitian to the last bit.  Random fixtures draw
from a seeded generator in a fixed order and are therefore reproducible
across runs on the same platform.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigurationError
from .fields import Grid, SpectralField, leray_project, project_coeffs


def _empty(grid: Grid) -> np.ndarray:
    n = grid.n
    return np.zeros((3, n, n, n), dtype=complex)


def taylor_green(grid: Grid, amplitude: float = 1.0) -> SpectralField:
    """Classic vortex: v = A (sin x cos y cos z, -cos x sin y cos z, 0).

    Expands into the eight (+-1, +-1, +-1) modes; component 0 carries
    -i A sx / 8 and component 1 carries +i A sy / 8 at mode (sx, sy, sz),
    which is exactly divergence-free.
    """
    c = _empty(grid)
    n = grid.n
    a = amplitude / 8.0
    for sx in (1, -1):
        for sy in (1, -1):
            for sz in (1, -1):
                ix, iy, iz = sx % n, sy % n, sz % n
                c[0, ix, iy, iz] = -1j * a * sx
                c[1, ix, iy, iz] = +1j * a * sy
    return SpectralField(grid, c)


def abc_flow(grid: Grid, a: float = 1.0, b: float = 1.0, c: float = 1.0) -> SpectralField:
    """Beltrami flow v = (A sin z + C cos y, B sin x + A cos z, C sin y + B cos x).

    Eigenfield of the curl with eigenvalue one, so the advective term is a
    pure gradient and the projected nonlinearity vanishes identically.
    """
    ch = _empty(grid)
    n = grid.n
    for s in (1, -1):
        i = s % n
        # sin t -> -(i s / 2) e^{i s t}, cos t -> (1/2) e^{i s t}
        ch[0, 0, 0, i] += -0.5j * a * s
        ch[0, 0, i, 0] += 0.5 * c
        ch[1, i, 0, 0] += -0.5j * b * s
        ch[1, 0, 0, i] += 0.5 * a
        ch[2, 0, i, 0] += -0.5j * c * s
        ch[2, i, 0, 0] += 0.5 * b
    return SpectralField(grid, ch)


def single_mode(grid: Grid, component: int = 1, axis: int = 0, amplitude: float = 1.0) -> SpectralField:
    """One cosine along one axis, e.g. v = (0, A cos x, 0) for the defaults.

    The varying axis must differ from the component so the field stays
    divergence-free.
    """
    if component == axis:
        raise ConfigurationError("single_mode needs component != axis to stay solenoidal")
    c = _empty(grid)
    n = grid.n
    for s in (1, -1):
        pos = [0, 0, 0]
        pos[axis] = s % n
        c[(component, *pos)] += 0.5 * amplitude
    return SpectralField(grid, c)


def random_solenoidal(
    grid: Grid,
    energy_slope: float = -1.0,
    k_max: float = 8.0,
    seed: int = 0,
) -> SpectralField:
    """Seeded random field with per-mode amplitude |k|^slope, band-limited to k_max.

    Draws real and imaginary parts in a fixed order, symmetrizes, removes the
    mean, and projects, so the result is real-valued and divergence-free.
    """
    if k_max < 1.0:
        raise ConfigurationError(f"k_max must be at least 1, got {k_max!r}")
    n = grid.n
    rng = np.random.default_rng(seed)
    raw = rng.standard_normal((3, n, n, n)) + 1j * rng.standard_normal((3, n, n, n))

    mode_sq = grid.mode_sq.astype(float)
    amp = np.zeros_like(mode_sq)
    band = (mode_sq > 0.0) & (mode_sq <= k_max * k_max)
    amp[band] = np.sqrt(mode_sq[band]) ** energy_slope

    f = SpectralField(grid, raw * amp)
    rev = np.roll(f.coeffs[..., ::-1, ::-1, ::-1], 1, axis=(-3, -2, -1))
    sym = 0.5 * (f.coeffs + rev.conj())
    sym[:, 0, 0, 0] = 0.0
    return leray_project(SpectralField(grid, sym))


def random_stream_2d(
    grid: Grid,
    k_max: float = 8.0,
    energy_slope: float = -1.0,
    seed: int = 0,
) -> SpectralField:
    """Planar field from a random stream function: v = (d_y psi, -d_x psi, 0).

    All coefficients live on the k_z = 0 plane and the third component is
    zero, so the field is z-independent.
    """
    if k_max < 1.0:
        raise ConfigurationError(f"k_max must be at least 1, got {k_max!r}")
    n = grid.n
    rng = np.random.default_rng(seed)
    raw = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))

    w = grid.wavenumbers
    kx = w[:, None].astype(float)
    ky = w[None, :].astype(float)
    mode_sq = kx * kx + ky * ky
    amp = np.zeros_like(mode_sq)
    band = (mode_sq > 0.0) & (mode_sq <= k_max * k_max)
    amp[band] = np.sqrt(mode_sq[band]) ** energy_slope
    psi = raw * amp

    rev = np.roll(psi[::-1, ::-1], 1, axis=(0, 1))
    psi = 0.5 * (psi + rev.conj())
    psi[0, 0] = 0.0

    scale = 2.0 * np.pi / grid.length
    c = _empty(grid)
    c[0, :, :, 0] = 1j * ky * scale * psi
    c[1, :, :, 0] = -1j * kx * scale * psi
    return SpectralField(grid, project_coeffs(c, grid))
