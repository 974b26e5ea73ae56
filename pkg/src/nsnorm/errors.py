"""Exception types shared across the package."""

from __future__ import annotations


class ConfigurationError(ValueError):
    """Invalid grid, run configuration, or input document."""


class SnapshotFormatError(ValueError):
    """Snapshot file is truncated, has a bad magic, or an unsupported version."""


class ZeroFieldError(ValueError):
    """Operation undefined on an identically zero field."""


class InsufficientDataError(ValueError):
    """Too few samples or corpus entries for the requested reduction."""


class RescaleOverflowError(ValueError):
    """A populated mode would leave the representable band under rescaling."""

    def __init__(self, mode: tuple[int, int, int], lam: int, limit: int):
        self.mode = tuple(int(m) for m in mode)
        self.lam = int(lam)
        self.limit = int(limit)
        super().__init__(
            f"mode k={self.mode} cannot be remapped by lambda={self.lam}: "
            f"|lambda*k| exceeds the per-axis limit {self.limit}"
        )


class BlowUpError(RuntimeError):
    """Time stepping produced non-finite coefficients."""

    def __init__(self, step_index: int, time: float, records=None):
        self.step_index = int(step_index)
        self.time = float(time)
        self.records = list(records) if records is not None else []
        super().__init__(
            f"non-finite state at step {self.step_index} (t={self.time:.6g})"
        )
