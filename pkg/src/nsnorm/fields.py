"""Spectral representation of periodic vector fields on the 3-torus.

Fields live on a uniform n^3 grid over [0, length)^3 and are stored as full
complex Fourier coefficient arrays c[comp, kx, ky, kz] under the convention

    v(x) = sum_k c(k) exp(i k . x),

so Parseval reads  integral |v|^2 dV = volume * sum_k |c(k)|^2.  Wavenumbers
are integer multiples of 2*pi/length and axis tables follow FFT ordering
(the Nyquist mode sits at index n/2).  Velocity fields are kept zero-mean
and divergence-free: `from_physical` enforces Hermitian symmetry exactly and
discards the spatial average, and `leray_project` removes the compressible
part mode by mode.
"""

from __future__ import annotations

import functools
import os
from dataclasses import dataclass, replace

import numpy as np
import scipy.fft as _sfft

from .errors import ConfigurationError

TWO_PI = 2.0 * np.pi


def fft_workers() -> int:
    """Worker count for FFT calls, capped by the NSNORM_THREADS env var.

    Worker count only affects scheduling; transform results are bitwise
    independent of it.
    """
    try:
        return max(1, int(os.environ.get("NSNORM_THREADS", "1")))
    except ValueError:
        return 1


def _ifft(c: np.ndarray) -> np.ndarray:
    # inverse of the coefficient convention: v(x) = sum_k c(k) e^{ikx}
    return _sfft.ifftn(c, axes=(-3, -2, -1), norm="forward", workers=fft_workers())


def _fft(u: np.ndarray) -> np.ndarray:
    return _sfft.fftn(u, axes=(-3, -2, -1), norm="forward", workers=fft_workers())


def _irfft_real(c: np.ndarray, m: int | None = None) -> np.ndarray:
    """Real samples from Hermitian full spectra, via the stored half spectrum.

    Matches `_ifft(c).real` for Hermitian coefficients at roughly half the
    transform cost; the package maintains Hermitian symmetry everywhere, so
    hot paths use this.  Optional m zero-pads to an m^3 grid first.
    """
    if m is not None and m != c.shape[-1]:
        c = pad_spectrum(c, m)
    n = c.shape[-1]
    return _sfft.irfftn(
        c[..., : n // 2 + 1], s=(n, n, n), axes=(-3, -2, -1),
        norm="forward", workers=fft_workers(),
    )


def _rfft_full(u: np.ndarray) -> np.ndarray:
    """Full Hermitian spectrum of real samples (half transform plus mirroring)."""
    n = u.shape[-1]
    h = n // 2
    ah = _sfft.rfftn(u, axes=(-3, -2, -1), norm="forward", workers=fft_workers())
    out = np.empty((*u.shape[:-3], n, n, n), dtype=complex)
    out[..., : h + 1] = ah
    t = ah[..., 1:h][..., ::-1]
    out[..., h + 1 :] = np.roll(t[..., ::-1, ::-1, :], 1, axis=(-3, -2)).conj()
    return out


@dataclass(frozen=True)
class Grid:
    """Uniform cubic grid descriptor; `n` must be a power of two in [8, 512]."""

    n: int
    length: float = TWO_PI
    dealias_fraction: float = 2.0 / 3.0

    def __post_init__(self):
        n = self.n
        if not isinstance(n, (int, np.integer)) or n < 8 or n > 512 or n & (n - 1):
            raise ConfigurationError(
                f"grid size must be a power of two in [8, 512], got {n!r}"
            )
        if not self.length > 0.0:
            raise ConfigurationError(f"domain length must be positive, got {self.length!r}")
        if not 0.0 < self.dealias_fraction <= 1.0:
            raise ConfigurationError(
                f"dealias fraction must lie in (0, 1], got {self.dealias_fraction!r}"
            )

    @property
    def volume(self) -> float:
        return self.length**3

    @property
    def spacing(self) -> float:
        return self.length / self.n

    @functools.cached_property
    def wavenumbers(self) -> np.ndarray:
        """Integer mode indices along one axis, FFT order, shape (n,)."""
        return np.fft.fftfreq(self.n, 1.0 / self.n).astype(np.int64)

    @functools.cached_property
    def k(self) -> np.ndarray:
        """Physical wavenumber vectors, shape (3, n, n, n)."""
        w = self.wavenumbers * (TWO_PI / self.length)
        kx, ky, kz = np.meshgrid(w, w, w, indexing="ij")
        return np.stack([kx, ky, kz])

    @functools.cached_property
    def k_sq(self) -> np.ndarray:
        return (self.k**2).sum(axis=0)

    @functools.cached_property
    def ik(self) -> np.ndarray:
        """Spectral derivative factors i*k, cached for the stepping hot path."""
        return 1j * self.k

    @functools.cached_property
    def k_sq_safe(self) -> np.ndarray:
        """k_sq with the mean slot set to 1, for mode-wise divisions."""
        out = self.k_sq.copy()
        out[0, 0, 0] = 1.0
        return out

    @functools.cached_property
    def mode_sq(self) -> np.ndarray:
        """Integer squared mode magnitude |k|^2 in mode units, shape (n, n, n)."""
        w = self.wavenumbers
        kx, ky, kz = np.meshgrid(w, w, w, indexing="ij")
        return kx * kx + ky * ky + kz * kz

    @functools.cached_property
    def dealias_mask(self) -> np.ndarray:
        """Boolean cube mask keeping |k_axis| <= dealias_fraction * n/2."""
        cut = self.dealias_fraction * self.n / 2.0
        ax = np.abs(self.wavenumbers) <= cut
        return ax[:, None, None] & ax[None, :, None] & ax[None, None, :]


def make_grid(n: int, length: float = TWO_PI, dealias_fraction: float = 2.0 / 3.0) -> Grid:
    """Build a grid descriptor, validating its parameters."""
    return Grid(n=n, length=length, dealias_fraction=dealias_fraction)


@dataclass(frozen=True)
class SpectralField:
    """Velocity field as Fourier coefficients, shape (3, n, n, n), treated immutable."""

    grid: Grid
    coeffs: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        n = self.grid.n
        if self.coeffs.shape != (3, n, n, n):
            raise ConfigurationError(
                f"coefficient array has shape {self.coeffs.shape}, expected {(3, n, n, n)}"
            )


@dataclass(frozen=True)
class TensorField:
    """Rank-2 field, entry [i, j] holding coefficients of d_i v_j."""

    grid: Grid
    coeffs: np.ndarray


@dataclass(frozen=True)
class ScalarField:
    """Scalar field (pressure and friends) as Fourier coefficients (n, n, n)."""

    grid: Grid
    coeffs: np.ndarray
    time: float = 0.0


def _hermitian_part(c: np.ndarray) -> np.ndarray:
    # average with the conjugate reflection k -> -k; exact projection onto
    # coefficients of real fields, and the Nyquist planes come out real
    rev = np.roll(c[..., ::-1, ::-1, ::-1], 1, axis=(-3, -2, -1))
    return 0.5 * (c + rev.conj())


def to_physical_grid(f: SpectralField) -> np.ndarray:
    """Real samples on the grid, shape (3, n, n, n), axes ordered (x, y, z)."""
    return np.ascontiguousarray(_ifft(f.coeffs).real)


def to_physical(f: SpectralField) -> np.ndarray:
    """Real samples flattened to (3, n^3) with the x index varying fastest."""
    u = _ifft(f.coeffs).real
    return np.ascontiguousarray(u.transpose(0, 3, 2, 1).reshape(3, -1))


def from_physical_grid(u: np.ndarray, grid: Grid, time: float = 0.0) -> SpectralField:
    """Forward transform of (3, n, n, n) samples; symmetrized, mean discarded."""
    n = grid.n
    if u.shape != (3, n, n, n):
        raise ConfigurationError(f"sample array has shape {u.shape}, expected {(3, n, n, n)}")
    c = _hermitian_part(_fft(np.asarray(u, dtype=float)))
    c[:, 0, 0, 0] = 0.0
    return SpectralField(grid, c, time)


def from_physical(samples: np.ndarray, grid: Grid, time: float = 0.0) -> SpectralField:
    """Inverse of `to_physical`: accepts (3, n^3) samples, x index fastest."""
    n = grid.n
    samples = np.asarray(samples, dtype=float)
    if samples.shape != (3, n**3):
        raise ConfigurationError(
            f"sample array has shape {samples.shape}, expected {(3, n**3)}"
        )
    u = samples.reshape(3, n, n, n).transpose(0, 3, 2, 1)
    return from_physical_grid(u, grid, time)


def project_coeffs(c: np.ndarray, grid: Grid) -> np.ndarray:
    """Leray projection applied to a raw coefficient array (mean mode untouched)."""
    k = grid.k
    return c - k * ((k * c).sum(axis=0) / grid.k_sq_safe)


def leray_project(f: SpectralField) -> SpectralField:
    """Remove the compressible part: c <- c - k (k.c)/|k|^2 for every k != 0."""
    return replace(f, coeffs=project_coeffs(f.coeffs, f.grid))


def gradient(f: SpectralField) -> TensorField:
    """Spectral gradient tensor, entry [i, j] = coefficients of d_i v_j."""
    return TensorField(f.grid, 1j * f.grid.k[:, None] * f.coeffs[None, :])


def divergence(f: SpectralField) -> ScalarField:
    return ScalarField(f.grid, (1j * f.grid.k * f.coeffs).sum(axis=0), f.time)


def laplacian(f: SpectralField) -> SpectralField:
    return replace(f, coeffs=-f.grid.k_sq * f.coeffs)


def curl(f: SpectralField) -> SpectralField:
    """Spectral curl, (curl v)^ = i k x c."""
    k = f.grid.k
    c = f.coeffs
    out = np.stack(
        [
            1j * (k[1] * c[2] - k[2] * c[1]),
            1j * (k[2] * c[0] - k[0] * c[2]),
            1j * (k[0] * c[1] - k[1] * c[0]),
        ]
    )
    return replace(f, coeffs=out)


def scaled(f: SpectralField, alpha: float) -> SpectralField:
    return replace(f, coeffs=alpha * f.coeffs)


def scalar_to_physical(sf: ScalarField, m: int | None = None) -> np.ndarray:
    """Real samples of a scalar field, optionally on an m^3 refinement."""
    c = sf.coeffs if m is None or m == sf.grid.n else pad_spectrum(sf.coeffs, m)
    return np.ascontiguousarray(_ifft(c).real)


def _pad_axis(c: np.ndarray, axis: int, m: int) -> np.ndarray:
    n = c.shape[axis]
    if m == n:
        return c
    if m < n:
        raise ValueError(f"pad target {m} smaller than source {n}")
    half = n // 2
    shape = list(c.shape)
    shape[axis] = m
    out = np.zeros(shape, dtype=c.dtype)
    idx = [slice(None)] * c.ndim

    def put(dst, src):
        idx[axis] = dst
        d = tuple(idx)
        idx[axis] = src
        s = tuple(idx)
        return d, s

    d, s = put(slice(0, half), slice(0, half))
    out[d] = c[s]
    d, s = put(slice(m - half + 1, m), slice(half + 1, n))
    out[d] = c[s]
    # split the Nyquist coefficient evenly between +n/2 and -n/2 so real
    # fields stay real and the trig interpolant is preserved
    d, s = put(slice(half, half + 1), slice(half, half + 1))
    out[d] += 0.5 * c[s]
    d, s = put(slice(m - half, m - half + 1), slice(half, half + 1))
    out[d] += 0.5 * c[s]
    return out


def _truncate_axis(c: np.ndarray, axis: int, m: int) -> np.ndarray:
    n = c.shape[axis]
    if m == n:
        return c
    if m > n:
        raise ValueError(f"truncate target {m} larger than source {n}")
    half = m // 2
    shape = list(c.shape)
    shape[axis] = m
    out = np.zeros(shape, dtype=c.dtype)
    idx = [slice(None)] * c.ndim

    def put(dst, src):
        idx[axis] = dst
        d = tuple(idx)
        idx[axis] = src
        s = tuple(idx)
        return d, s

    d, s = put(slice(0, half), slice(0, half))
    out[d] = c[s]
    d, s = put(slice(half + 1, m), slice(n - half + 1, n))
    out[d] = c[s]
    # fold +-m/2 onto the single target Nyquist slot
    d, s = put(slice(half, half + 1), slice(half, half + 1))
    out[d] = c[s]
    d, s = put(slice(half, half + 1), slice(n - half, n - half + 1))
    out[d] += c[s]
    return out


def pad_spectrum(c: np.ndarray, m: int) -> np.ndarray:
    """Zero-pad full-spectrum coefficients to an m^3 grid (exact interpolation)."""
    for axis in (-3, -2, -1):
        c = _pad_axis(c, axis, m)
    return c


def truncate_spectrum(c: np.ndarray, m: int) -> np.ndarray:
    """Drop modes outside the m-grid band (Nyquist pairs fold onto one slot)."""
    for axis in (-3, -2, -1):
        c = _truncate_axis(c, axis, m)
    return c


def max_solenoidal_defect(f: SpectralField) -> float:
    """Largest |k . c(k)| / |c(k)| over populated modes (0 for exact fields)."""
    dot = np.abs((f.grid.k * f.coeffs).sum(axis=0))
    mag = np.sqrt((f.coeffs.real**2 + f.coeffs.imag**2).sum(axis=0))
    populated = mag > 0.0
    if not populated.any():
        return 0.0
    return float((dot[populated] / mag[populated]).max())


def hermitian_defect(f: SpectralField) -> float:
    """Largest deviation from conjugate symmetry, relative to the peak mode."""
    defect = np.abs(f.coeffs - _hermitian_part(f.coeffs))
    peak = np.abs(f.coeffs).max()
    if peak == 0.0:
        return 0.0
    return float(defect.max() / peak)
