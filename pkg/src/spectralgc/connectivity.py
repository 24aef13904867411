"""Frequency-domain connectivity measures built on a spectral factor.

Everything here consumes a ``SpectralFactor`` (H, sigma) — it does not
matter whether that factor came from a fitted VAR/VMA/VARMA model or
from Wilson factorization of a Welch estimate.  With ``G = H^{-1}``,
``S = H sigma H^H``, ``D = diag(sigma)`` and ``Dt = diag(sigma^{-1})``:

* coherency           ``C = diag(S)^{-1/2} S diag(S)^{-1/2}``
* gamma factor        ``Gamma = diag(S)^{-1/2} H D^{1/2}``      (Gamma R Gamma^H = C)
* total DTF           ``(Gamma R) .* conj(Gamma)``              (rows sum to 1)
* pi factor           ``Pi = Dt^{1/2} G diag(S)^{1/2}``         (Pi^H Rt Pi = C^{-1})
* total PDC           ``conj(G_ij) (sigma^{-1} G)_ij / (S^{-1})_jj``  (columns sum to 1)
* gPDC                ``Dt_ii |G_ij|^2 / sum_k Dt_kk |G_kj|^2``

Total PDC is the partial-correlation-weighted form evaluated on the
column-normalized pi factor, so its columns sum to exactly one and it
collapses to gPDC whenever sigma is diagonal (no instantaneous
correlation between innovations); total DTF likewise collapses to the
squared directed coherence.  Off-diagonal innovation correlation makes
both measures complex valued.

Measures are reported on the closed one-sided band ``0 <= nu <= 1/2``;
MSE scoring excludes the Nyquist endpoint so averages run over the open
band ``[0, 1/2)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError, NumericalError, SingularFrequencyError
from .models import COND_LIMIT, FrequencyGrid, SpectralFactor, SpectralMatrix

__all__ = [
    "InnovationStructure",
    "ConnectivityField",
    "innovation_structure",
    "coherency",
    "partial_coherence",
    "gamma_factor",
    "total_dtf",
    "directed_coherence",
    "pi_factor",
    "total_pdc",
    "gpdc",
    "mse_vs_reference",
    "save_field_csv",
    "load_field_csv",
]

FIELD_KINDS = ("tPDC", "tDTF", "coherency", "partial-coherence", "gPDC", "DC")


@dataclass
class InnovationStructure:
    """Correlation decompositions of an innovation covariance.

    ``R`` is the correlation matrix of sigma, ``Rt`` the partial
    correlation matrix built the same way from ``sigma^{-1}``; ``rho``
    and ``rhot`` are their hollow (zero-diagonal) parts.
    """

    D: np.ndarray
    R: np.ndarray
    Dt: np.ndarray
    Rt: np.ndarray
    rho: np.ndarray
    rhot: np.ndarray


@dataclass
class ConnectivityField:
    """A connectivity measure sampled on the one-sided band.

    ``values`` has shape ``(grid.one_sided_count, N, N)``; entry
    ``(i, j)`` quantifies the influence of channel ``j`` on channel
    ``i`` at each frequency.
    """

    grid: FrequencyGrid
    values: np.ndarray
    kind: str
    method_tag: str = ""

    def __post_init__(self):
        self.values = np.asarray(self.values)
        if self.kind not in FIELD_KINDS:
            raise ConfigError(f"unknown field kind {self.kind!r}; expected one of {FIELD_KINDS}")
        F, n1, n2 = self.values.shape
        if F != self.grid.one_sided_count or n1 != n2:
            raise ConfigError(
                f"field shape {self.values.shape} does not match one-sided grid "
                f"of {self.grid.one_sided_count} points"
            )
        if not np.all(np.isfinite(self.values)):
            raise NumericalError(f"{self.kind} field contains non-finite values")

    @property
    def n_channels(self) -> int:
        return self.values.shape[1]

    @property
    def frequencies(self) -> np.ndarray:
        return self.grid.one_sided_values


def innovation_structure(sigma: np.ndarray) -> InnovationStructure:
    """Split sigma into correlation and partial-correlation structure."""
    sigma = np.asarray(sigma, dtype=float)
    if np.linalg.cond(sigma) > COND_LIMIT:
        raise NumericalError("innovation covariance is singular or nearly so")
    D = np.diag(np.diag(sigma))
    d_isqrt = 1.0 / np.sqrt(np.diag(sigma))
    R = sigma * np.outer(d_isqrt, d_isqrt)
    sigma_inv = np.linalg.inv(sigma)
    sigma_inv = 0.5 * (sigma_inv + sigma_inv.T)
    Dt = np.diag(np.diag(sigma_inv))
    dt_isqrt = 1.0 / np.sqrt(np.diag(sigma_inv))
    Rt = sigma_inv * np.outer(dt_isqrt, dt_isqrt)
    eye = np.eye(sigma.shape[0])
    return InnovationStructure(D, R, Dt, Rt, R - eye, Rt - eye)


def _one_sided_spectrum(factor: SpectralFactor) -> np.ndarray:
    H = factor.values[: factor.grid.one_sided_count]
    return H @ factor.sigma @ H.conj().transpose(0, 2, 1)


def _check_positive_diag(S: np.ndarray, grid: FrequencyGrid, context: str) -> np.ndarray:
    diag = np.real(np.einsum("fii->fi", S))
    if np.any(diag <= 0.0):
        f, i = np.argwhere(diag <= 0.0)[0]
        raise NumericalError(
            f"{context}: non-positive power in channel x{i + 1} at nu={grid.values[f]:.6f}"
        )
    return diag


def coherency(spectrum: SpectralMatrix, method_tag: str = "") -> ConnectivityField:
    """Complex coherency ``C_ij = S_ij / sqrt(S_ii S_jj)`` (unit diagonal)."""
    S = spectrum.values[: spectrum.grid.one_sided_count]
    diag = _check_positive_diag(S, spectrum.grid, "coherency")
    scale = 1.0 / np.sqrt(diag)
    C = S * scale[:, :, None] * scale[:, None, :]
    return ConnectivityField(spectrum.grid, C, "coherency", method_tag)


def partial_coherence(spectrum: SpectralMatrix, method_tag: str = "") -> ConnectivityField:
    """Partial coherence matrix ``K = C^{-1}``, the inverse of coherency.

    Carries the correlation structure between channel pairs after
    removing the linear influence of all other channels.
    """
    K = np.linalg.inv(coherency(spectrum).values)
    return ConnectivityField(spectrum.grid, K, "partial-coherence", method_tag)


def gamma_factor(factor: SpectralFactor) -> np.ndarray:
    """Gamma field ``diag(S)^{-1/2} H D^{1/2}`` on the one-sided band.

    Satisfies ``Gamma R Gamma^H = coherency`` with ``R`` the innovation
    correlation matrix.  Returned as a plain ``(F, N, N)`` array aligned
    with ``factor.grid.one_sided_values``.
    """
    S = _one_sided_spectrum(factor)
    diag = _check_positive_diag(S, factor.grid, "gamma_factor")
    H = factor.values[: factor.grid.one_sided_count]
    d_sqrt = np.sqrt(np.diag(factor.sigma))
    return H * d_sqrt[None, None, :] / np.sqrt(diag)[:, :, None]


def total_dtf(factor: SpectralFactor, method_tag: str = "") -> ConnectivityField:
    """Total DTF: entrywise ``Gamma .* conj(Gamma) + (Gamma rho) .* conj(Gamma)``.

    Rows sum to one at every frequency.  For diagonal innovation
    covariance this is the squared magnitude of the directed coherence
    (real); off-diagonal innovation correlation contributes the complex
    instantaneous part.
    """
    gamma = gamma_factor(factor)
    structure = innovation_structure(factor.sigma)
    values = (gamma @ structure.R) * np.conj(gamma)
    return ConnectivityField(factor.grid, values, "tDTF", method_tag)


def directed_coherence(factor: SpectralFactor, method_tag: str = "") -> ConnectivityField:
    """Squared directed coherence ``|Gamma_ij|^2`` (real field).

    Classical normalization: rows sum to one when the innovation
    covariance is diagonal, in which case it coincides with total DTF.
    """
    gamma = gamma_factor(factor)
    return ConnectivityField(factor.grid, np.abs(gamma) ** 2, "DC", method_tag)


def _inverse_transfer(factor: SpectralFactor) -> np.ndarray:
    """Invert the one-sided transfer function, tolerating boundary zeros.

    A moving-average root on the unit circle makes ``H`` singular at one
    grid frequency; the inverse blows up there but the *normalized*
    measures built from it (total PDC, gPDC) have finite removable
    limits, because they are scale invariant in the diverging rank-one
    direction of ``H^{-1}``.  Plain inversion therefore recovers those
    limits to near machine precision, so only an exactly-singular matrix
    is treated as an error.
    """
    H = factor.values[: factor.grid.one_sided_count]
    try:
        return np.linalg.inv(H)
    except np.linalg.LinAlgError as exc:
        dets = np.abs(np.linalg.det(H))
        k = int(np.argmin(dets))
        raise SingularFrequencyError(
            f"transfer function exactly singular at nu={factor.grid.values[k]:.6f}"
        ) from exc


def pi_factor(factor: SpectralFactor) -> np.ndarray:
    """Pi field ``Dt^{1/2} H^{-1} diag(S)^{1/2}`` on the one-sided band.

    The scaling is fixed by the inverse-coherency identity
    ``Pi^H Rt Pi = C^{-1}`` with ``Rt`` the innovation partial
    correlation matrix — the mirror image of the Gamma/coherency
    identity.
    """
    S = _one_sided_spectrum(factor)
    diag = _check_positive_diag(S, factor.grid, "pi_factor")
    G = _inverse_transfer(factor)
    dt_sqrt = np.sqrt(np.diag(innovation_structure(factor.sigma).Dt))
    return dt_sqrt[None, :, None] * G * np.sqrt(diag)[:, None, :]


def total_pdc(factor: SpectralFactor, method_tag: str = "") -> ConnectivityField:
    """Total PDC: partial-correlation-weighted PDC, columns summing to one.

    Entry ``(i, j)`` is ``conj(G_ij) (sigma^{-1} G)_ij / (S^{-1})_jj``,
    i.e. the ``Pi^* .* (Rt Pi)`` combination evaluated on the
    column-normalized pi factor.  Reduces exactly to gPDC when sigma is
    diagonal and is complex valued otherwise.
    """
    G = _inverse_transfer(factor)
    sigma_inv = np.linalg.inv(factor.sigma)
    sigma_inv = 0.5 * (sigma_inv + sigma_inv.T)
    weighted = sigma_inv @ G
    # (S^{-1})_jj = (G^H sigma^{-1} G)_jj, the column normalizer
    den = np.real(np.einsum("fij,fij->fj", np.conj(G), weighted))
    values = np.conj(G) * weighted / den[:, None, :]
    return ConnectivityField(factor.grid, values, "tPDC", method_tag)


def gpdc(factor: SpectralFactor, method_tag: str = "") -> ConnectivityField:
    """Generalized PDC ``Dt_ii |G_ij|^2 / sum_k Dt_kk |G_kj|^2`` (real field)."""
    G = _inverse_transfer(factor)
    dt = np.diag(innovation_structure(factor.sigma).Dt)
    num = dt[None, :, None] * np.abs(G) ** 2
    values = num / num.sum(axis=1)[:, None, :]
    return ConnectivityField(factor.grid, values, "gPDC", method_tag)


def mse_vs_reference(estimate: ConnectivityField, reference: ConnectivityField) -> float:
    """Mean squared complex deviation over the open band and all pairs.

    Averages ``|est - ref|^2`` over every channel pair and every grid
    frequency in ``[0, 1/2)`` (the shared Nyquist endpoint is excluded).
    """
    if estimate.kind != reference.kind:
        raise ConfigError(f"kind mismatch: {estimate.kind} vs {reference.kind}")
    if estimate.values.shape != reference.values.shape:
        raise ConfigError(
            f"shape mismatch: {estimate.values.shape} vs {reference.values.shape}"
        )
    if estimate.grid.n_points != reference.grid.n_points:
        raise ConfigError("frequency grids differ")
    diff = estimate.values[:-1] - reference.values[:-1]
    return float(np.mean(np.abs(diff) ** 2))


def save_field_csv(fields, path) -> None:
    """Write one or more fields as ``nu,i,j,re,im,kind,method`` rows.

    Channel indices are 1-based.  Multiple fields concatenate; the kind
    and method columns keep the rows self-describing.
    """
    if isinstance(fields, ConnectivityField):
        fields = [fields]
    path = Path(path)
    with open(path, "w") as fh:
        fh.write("nu,i,j,re,im,kind,method\n")
        for f in fields:
            n = f.n_channels
            for k, nu in enumerate(f.frequencies):
                for i in range(n):
                    for j in range(n):
                        v = complex(f.values[k, i, j])
                        fh.write(
                            f"{nu:.17g},{i + 1},{j + 1},{v.real:.17g},{v.imag:.17g},"
                            f"{f.kind},{f.method_tag}\n"
                        )


def load_field_csv(path) -> list:
    """Inverse of :func:`save_field_csv`; returns a list of fields."""
    try:
        raw = np.genfromtxt(
            path, delimiter=",", skip_header=1, dtype=None, encoding="utf-8",
            names=["nu", "i", "j", "re", "im", "kind", "method"],
        )
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot read field file {path}: {exc}") from exc
    raw = np.atleast_1d(raw)
    fields = []
    keys = {(str(k), str(m)) for k, m in zip(raw["kind"], raw["method"])}
    for kind, method in sorted(keys):
        mask = (raw["kind"] == kind) & (raw["method"] == method)
        rows = raw[mask]
        n = int(rows["i"].max())
        F = rows.shape[0] // (n * n)
        values = (rows["re"] + 1j * rows["im"]).reshape(F, n, n)
        grid = FrequencyGrid(2 * (F - 1))
        fields.append(ConnectivityField(grid, values, kind, method))
    return fields
