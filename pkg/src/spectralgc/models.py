"""VARMA model core: containers, polynomial evaluation, roots, spectra.

A model is

    x(n) = sum_r A_r x(n - r) + sum_s B_s w(n - s),    cov w = sigma

with ``r = 1..p`` and ``s = 0..q``.  The matrix polynomials evaluated on
the unit circle are ``A(nu) = I - sum_r A_r exp(-i 2 pi nu r)`` and
``B(nu) = sum_s B_s exp(-i 2 pi nu s)``, giving the transfer function
``H = A^{-1} B`` and spectral matrix ``S = H sigma H^H``.
"""

from __future__ import annotations

import hashlib
import itertools
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, SingularFrequencyError

__all__ = [
    "FrequencyGrid",
    "SpectralMatrix",
    "SpectralFactor",
    "VarmaModel",
    "RootReport",
    "eval_ar_polynomial",
    "eval_ma_polynomial",
    "transfer_function",
    "theoretical_spectrum",
    "ar_root_report",
    "ma_root_report",
    "innovation_form",
]

#: condition-number threshold above which per-frequency solves are refused
COND_LIMIT = 1e12


@dataclass(frozen=True)
class FrequencyGrid:
    """Uniform two-sided frequency grid ``nu_k = k / n_points``.

    ``n_points`` must be even so the one-sided part ends exactly at the
    Nyquist frequency ``nu = 1/2`` (index ``n_points // 2``).
    """

    n_points: int

    def __post_init__(self):
        if self.n_points < 2 or self.n_points % 2 != 0:
            raise ConfigError(
                f"frequency grid needs an even number of points >= 2, got {self.n_points}"
            )

    @property
    def values(self) -> np.ndarray:
        """All grid frequencies in [0, 1)."""
        return np.arange(self.n_points) / self.n_points

    @property
    def one_sided_count(self) -> int:
        """Number of points in the closed one-sided band [0, 1/2]."""
        return self.n_points // 2 + 1

    @property
    def one_sided_values(self) -> np.ndarray:
        return self.values[: self.one_sided_count]


@dataclass
class SpectralMatrix:
    """Spectral density matrix sampled on a two-sided grid.

    ``values`` has shape ``(grid.n_points, N, N)`` and is Hermitian at
    every frequency.
    """

    grid: FrequencyGrid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        F, n1, n2 = self.values.shape
        if F != self.grid.n_points or n1 != n2:
            raise ConfigError(
                f"spectral matrix shape {self.values.shape} does not match "
                f"grid of {self.grid.n_points} points"
            )

    @property
    def n_channels(self) -> int:
        return self.values.shape[1]


@dataclass
class SpectralFactor:
    """Left spectral factor ``H`` with innovation covariance ``sigma``.

    Reconstructs the spectrum as ``S(nu) = H(nu) sigma H(nu)^H``.  Factors
    produced by the factorization routine and by :func:`innovation_form`
    carry the zero-lag identity normalization (the lag-0 coefficient of
    ``H`` is the identity); :func:`transfer_function` returns whatever
    normalization the model's MA part implies.
    """

    grid: FrequencyGrid
    values: np.ndarray
    sigma: np.ndarray
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        self.sigma = np.asarray(self.sigma, dtype=float)
        F, n1, n2 = self.values.shape
        if F != self.grid.n_points or n1 != n2 or self.sigma.shape != (n1, n1):
            raise ConfigError("spectral factor shapes are inconsistent")

    @property
    def n_channels(self) -> int:
        return self.values.shape[1]

    def spectrum(self) -> SpectralMatrix:
        """Reassemble ``S = H sigma H^H`` on the factor's grid."""
        S = self.values @ self.sigma @ self.values.conj().transpose(0, 2, 1)
        return SpectralMatrix(self.grid, S)


def _as_blocks(blocks, n_channels: int, what: str) -> np.ndarray:
    arr = np.asarray(blocks, dtype=float)
    if arr.size == 0:
        return arr.reshape(0, n_channels, n_channels)
    if arr.ndim != 3 or arr.shape[1:] != (n_channels, n_channels):
        raise ConfigError(
            f"{what} blocks must have shape (k, {n_channels}, {n_channels}), got {arr.shape}"
        )
    return arr


@dataclass
class VarmaModel:
    """VARMA(p, q) parameter container.

    Parameters
    ----------
    ar_blocks : array_like, shape (p, N, N)
        Coefficients ``A_1 .. A_p``.  Empty for a pure MA model.
    ma_blocks : array_like, shape (q + 1, N, N)
        Coefficients ``B_0 .. B_q``; ``B_0`` must be invertible.  A pure
        AR model uses the single block ``B_0 = I``.
    innovations_cov : array_like, shape (N, N)
        Symmetric positive definite covariance of the driving noise.
    """

    ar_blocks: np.ndarray
    ma_blocks: np.ndarray
    innovations_cov: np.ndarray

    def __post_init__(self):
        sigma = np.asarray(self.innovations_cov, dtype=float)
        if sigma.ndim != 2 or sigma.shape[0] != sigma.shape[1]:
            raise ConfigError(f"innovations_cov must be square, got shape {sigma.shape}")
        n = sigma.shape[0]
        if np.max(np.abs(sigma - sigma.T)) > 1e-12 * max(1.0, np.max(np.abs(sigma))):
            raise ConfigError("innovations_cov must be symmetric")
        if np.min(np.linalg.eigvalsh(sigma)) <= 0:
            raise ConfigError("innovations_cov must be positive definite")
        self.innovations_cov = 0.5 * (sigma + sigma.T)
        self.ar_blocks = _as_blocks(self.ar_blocks, n, "AR")
        self.ma_blocks = _as_blocks(self.ma_blocks, n, "MA")
        if self.ma_blocks.shape[0] == 0:
            self.ma_blocks = np.eye(n)[None]
        if abs(np.linalg.det(self.ma_blocks[0])) < 1e-12:
            raise ConfigError("leading MA block B_0 must be invertible")

    @property
    def n_channels(self) -> int:
        return self.innovations_cov.shape[0]

    @property
    def ar_order(self) -> int:
        return self.ar_blocks.shape[0]

    @property
    def ma_order(self) -> int:
        return self.ma_blocks.shape[0] - 1

    def to_dict(self) -> dict:
        d = {"n_channels": self.n_channels}
        if self.ar_order > 0:
            d["ar"] = self.ar_blocks.tolist()
        if self.ma_order > 0 or not np.allclose(self.ma_blocks[0], np.eye(self.n_channels)):
            d["ma"] = self.ma_blocks.tolist()
        d["sigma"] = self.innovations_cov.tolist()
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "VarmaModel":
        try:
            n = int(d["n_channels"])
            sigma = np.asarray(d["sigma"], dtype=float)
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"model description missing/invalid field: {exc}") from exc
        ar = np.asarray(d.get("ar", []), dtype=float).reshape(-1, n, n)
        ma = d.get("ma")
        ma = np.eye(n)[None] if ma is None else np.asarray(ma, dtype=float).reshape(-1, n, n)
        return cls(ar, ma, sigma)

    def save_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load_json(cls, path) -> "VarmaModel":
        try:
            with open(path) as fh:
                d = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read model file {path}: {exc}") from exc
        return cls.from_dict(d)

    def content_hash(self) -> str:
        """SHA-256 over the canonical JSON form (for output metadata)."""
        payload = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(payload.encode()).hexdigest()


def eval_ar_polynomial(model: VarmaModel, nu) -> np.ndarray:
    """Evaluate ``A(nu) = I - sum_r A_r exp(-i 2 pi nu r)``.

    ``nu`` may be a scalar or 1-d array; returns ``(N, N)`` or ``(F, N, N)``.
    """
    nu_arr = np.atleast_1d(np.asarray(nu, dtype=float))
    n = model.n_channels
    out = np.broadcast_to(np.eye(n), (nu_arr.size, n, n)).astype(complex).copy()
    for r, A_r in enumerate(model.ar_blocks, start=1):
        out -= np.exp(-2j * np.pi * nu_arr * r)[:, None, None] * A_r
    return out[0] if np.isscalar(nu) or np.ndim(nu) == 0 else out


def eval_ma_polynomial(model: VarmaModel, nu) -> np.ndarray:
    """Evaluate ``B(nu) = sum_s B_s exp(-i 2 pi nu s)`` (same shapes as above)."""
    nu_arr = np.atleast_1d(np.asarray(nu, dtype=float))
    n = model.n_channels
    out = np.zeros((nu_arr.size, n, n), dtype=complex)
    for s, B_s in enumerate(model.ma_blocks):
        out += np.exp(-2j * np.pi * nu_arr * s)[:, None, None] * B_s
    return out[0] if np.isscalar(nu) or np.ndim(nu) == 0 else out


def transfer_function(model: VarmaModel, grid: FrequencyGrid) -> SpectralFactor:
    """Transfer function ``H(nu_k) = A(nu_k)^{-1} B(nu_k)`` on a grid.

    Raises
    ------
    SingularFrequencyError
        If ``A(nu_k)`` is ill conditioned at some grid point.
    """
    A = eval_ar_polynomial(model, grid.values)
    B = eval_ma_polynomial(model, grid.values)
    if model.ar_order == 0:
        H = B
    else:
        conds = np.linalg.cond(A)
        if np.any(conds > COND_LIMIT):
            k = int(np.argmax(conds))
            raise SingularFrequencyError(
                f"AR polynomial nearly singular at nu={grid.values[k]:.6f} "
                f"(cond={conds[k]:.2e})"
            )
        H = np.linalg.solve(A, B)
    return SpectralFactor(grid, H, model.innovations_cov)


def theoretical_spectrum(model: VarmaModel, grid: FrequencyGrid) -> SpectralMatrix:
    """Model-implied spectral matrix ``S = H sigma H^H`` on a grid."""
    return transfer_function(model, grid).spectrum()


@dataclass(frozen=True)
class RootReport:
    """Roots of ``det A(z)`` or ``det B(z)`` with their magnitudes.

    ``roots`` are in the z-plane (delay operator ``z^{-1}``), sorted by
    decreasing magnitude.  The stability/phase conventions:

    * AR part is *stable* when every root satisfies ``|z| < 1 - 1e-9``;
    * MA part is *minimum-phase* when every root satisfies ``|z| <= 1 + 1e-9``.
    """

    roots: np.ndarray
    magnitudes: np.ndarray
    classification: str


def _det_polynomial(entry_coeffs: np.ndarray) -> np.ndarray:
    """Determinant of a matrix polynomial via the Leibniz expansion.

    ``entry_coeffs[k, i, j]`` is the coefficient of ``w^k`` in entry
    ``(i, j)`` where ``w = exp(-i 2 pi nu)`` is the delay variable.
    Factorial cost in N, which is fine for the small systems handled here.
    """
    n = entry_coeffs.shape[1]
    det = np.zeros((entry_coeffs.shape[0] - 1) * n + 1)
    for perm in itertools.permutations(range(n)):
        inversions = sum(
            1 for a in range(n) for b in range(a + 1, n) if perm[a] > perm[b]
        )
        term = np.array([1.0])
        for i in range(n):
            term = np.convolve(term, entry_coeffs[:, i, perm[i]])
        det[: term.size] += (-1.0) ** inversions * term
    return det


def _roots_in_z(det_w: np.ndarray) -> np.ndarray:
    """Roots in z of a determinant polynomial given in the w = 1/z variable."""
    coeffs = np.trim_zeros(det_w[::-1], "f")  # highest power of w first
    if coeffs.size <= 1:
        return np.array([], dtype=complex)
    w_roots = np.roots(coeffs)
    w_roots = w_roots[np.abs(w_roots) > 1e-300]
    z_roots = 1.0 / w_roots
    order = np.lexsort((np.angle(z_roots), -np.abs(z_roots)))
    return z_roots[order]


def ar_root_report(model: VarmaModel) -> RootReport:
    """Roots of ``det A(z)`` with a stable/unstable classification."""
    n = model.n_channels
    coeffs = np.concatenate([np.eye(n)[None], -model.ar_blocks], axis=0)
    roots = _roots_in_z(_det_polynomial(coeffs))
    mags = np.abs(roots)
    stable = roots.size == 0 or np.all(mags < 1.0 - 1e-9)
    return RootReport(roots, mags, "stable" if stable else "unstable")


def ma_root_report(model: VarmaModel) -> RootReport:
    """Roots of ``det B(z)`` with a minimum-phase classification."""
    roots = _roots_in_z(_det_polynomial(model.ma_blocks))
    mags = np.abs(roots)
    minphase = roots.size == 0 or np.all(mags <= 1.0 + 1e-9)
    return RootReport(roots, mags, "minimum-phase" if minphase else "nonminimum-phase")


def innovation_form(model: VarmaModel) -> VarmaModel:
    """Equivalent model with ``B_0 = I`` (innovation normalization).

    Replaces ``B_s -> B_s B_0^{-1}`` and ``sigma -> B_0 sigma B_0^T``,
    which leaves the spectrum unchanged.  Connectivity references should
    always be computed from this form so that parametric and
    factorization-based estimates share one normalization.
    """
    B0 = model.ma_blocks[0]
    if np.allclose(B0, np.eye(model.n_channels)):
        return model
    B0_inv = np.linalg.inv(B0)
    ma = model.ma_blocks @ B0_inv
    sigma = B0 @ model.innovations_cov @ B0.T
    return VarmaModel(model.ar_blocks, ma, 0.5 * (sigma + sigma.T))
