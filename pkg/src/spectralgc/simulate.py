"""Panel simulation from a VARMA model, plus panel file I/O.

Panels are stored channels-by-samples (shape ``(N, n_samples)``).  The
CSV layout is one row per sample with columns ``t, x1, .., xN`` and a
JSON sidecar (same stem, ``.json`` suffix) recording how the panel was
generated.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError, UnstableModelError
from .models import VarmaModel, ar_root_report

__all__ = ["TimeSeriesPanel", "simulate", "sample_covariance", "save_panel_csv", "load_panel_csv"]

DEFAULT_BURN_IN = 1000


@dataclass
class TimeSeriesPanel:
    """Multichannel sample panel with optional provenance metadata."""

    data: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=float)
        if self.data.ndim != 2:
            raise ConfigError(f"panel data must be 2-d (channels x samples), got {self.data.ndim}-d")

    @property
    def n_channels(self) -> int:
        return self.data.shape[0]

    @property
    def n_samples(self) -> int:
        return self.data.shape[1]


def simulate(model: VarmaModel, n_samples: int, seed: int, burn_in: int = DEFAULT_BURN_IN) -> TimeSeriesPanel:
    """Draw one realization of the model.

    Gaussian innovations are generated with ``default_rng(seed)`` and
    colored by the lower Cholesky factor of the innovation covariance.
    The recursion starts from zeros and the first ``burn_in`` samples are
    discarded so the retained block is effectively stationary.

    Raises
    ------
    UnstableModelError
        If the AR part of ``model`` is not stable.
    """
    if n_samples < 1:
        raise ConfigError(f"n_samples must be positive, got {n_samples}")
    report = ar_root_report(model)
    if report.classification != "stable":
        worst = report.magnitudes.max()
        raise UnstableModelError(
            f"cannot simulate: AR root magnitude {worst:.6f} not inside the unit circle"
        )

    n = model.n_channels
    p, q = model.ar_order, model.ma_order
    total = burn_in + n_samples
    rng = np.random.default_rng(seed)
    chol = np.linalg.cholesky(model.innovations_cov)
    w = rng.standard_normal((total + q, n)) @ chol.T  # w[k] is innovation at time k - q

    # MA part first (vectorized over time), then the AR recursion.
    x = np.zeros((total, n))
    for s, B_s in enumerate(model.ma_blocks):
        x += w[q - s : q - s + total] @ B_s.T
    if p > 0:
        A = model.ar_blocks
        for t in range(total):
            acc = x[t]
            for r in range(1, min(p, t) + 1):
                acc = acc + A[r - 1] @ x[t - r]
            x[t] = acc

    meta = {"seed": int(seed), "burn_in": int(burn_in), "model_hash": model.content_hash()}
    return TimeSeriesPanel(x[burn_in:].T.copy(), meta)


def sample_covariance(panel: TimeSeriesPanel) -> np.ndarray:
    """Covariance of the panel about its sample mean (divisor ``n_samples``)."""
    centered = panel.data - panel.data.mean(axis=1, keepdims=True)
    return (centered @ centered.T) / panel.n_samples


def save_panel_csv(panel: TimeSeriesPanel, path) -> None:
    """Write ``t, x1, .., xN`` rows plus the JSON metadata sidecar."""
    path = Path(path)
    header = "t," + ",".join(f"x{i + 1}" for i in range(panel.n_channels))
    table = np.column_stack([np.arange(panel.n_samples), panel.data.T])
    fmt = ["%d"] + ["%.17g"] * panel.n_channels
    np.savetxt(path, table, delimiter=",", header=header, comments="", fmt=fmt)
    with open(path.with_suffix(".json"), "w") as fh:
        json.dump(panel.meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_panel_csv(path) -> TimeSeriesPanel:
    """Read a panel CSV written by :func:`save_panel_csv` (sidecar optional)."""
    path = Path(path)
    try:
        with open(path) as fh:
            header = fh.readline().strip().split(",")
            if header[:1] != ["t"] or any(not c.startswith("x") for c in header[1:]):
                raise ConfigError(f"{path}: expected header 't,x1,..,xN', got {header!r}")
            rows = np.loadtxt(fh, delimiter=",", ndmin=2)
    except OSError as exc:
        raise ConfigError(f"cannot read panel file {path}: {exc}") from exc
    except ValueError as exc:
        raise ConfigError(f"{path}: malformed panel CSV: {exc}") from exc
    if rows.shape[1] != len(header):
        raise ConfigError(f"{path}: row width {rows.shape[1]} does not match header")
    meta = {}
    sidecar = path.with_suffix(".json")
    if sidecar.exists():
        with open(sidecar) as fh:
            meta = json.load(fh)
    return TimeSeriesPanel(rows[:, 1:].T.copy(), meta)
