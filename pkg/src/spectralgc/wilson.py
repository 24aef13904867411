"""Wilson's spectral matrix factorization.

Given a spectral density matrix sampled on the full two-sided frequency
grid, the fixed-point iteration

    psi <- psi [ psi^{-1} S psi^{-H} + I ]_+

converges to a causal factor with ``psi psi^H = S``.  ``[.]_+`` keeps the
causal part of a lag expansion: half of lag 0, lags ``1 .. n_f/2 - 1`` in
full, everything else zeroed.  The returned factor is normalized to a
zero-lag identity coefficient, ``H = psi psi_0^{-1}`` with innovation
covariance ``sigma = psi_0 psi_0^H``, which is the unique minimum-phase
factorization of the input.

Spectra whose factor has roots *on* the unit circle converge slowly; for
those, relaxing ``tol`` to around 1e-5 keeps the iteration count sane at
a small accuracy cost.
"""

from __future__ import annotations

import numpy as np

from .errors import NonConvergenceError, NonPositiveSpectrumError
from .models import SpectralFactor, SpectralMatrix

__all__ = ["wilson_factorize"]


def _causal_part(g: np.ndarray) -> np.ndarray:
    """Apply [.]_+ along the frequency axis of a (F, N, N) array."""
    F = g.shape[0]
    lags = np.fft.ifft(g, axis=0)
    lags[0] *= 0.5
    lags[F // 2 :] = 0.0
    return np.fft.fft(lags, axis=0)


def _check_psd(S: np.ndarray) -> None:
    hermitian = 0.5 * (S + S.conj().transpose(0, 2, 1))
    min_eig = np.min(np.linalg.eigvalsh(hermitian))
    scale = np.max(np.abs(S))
    if min_eig < -1e-6 * scale:
        raise NonPositiveSpectrumError(
            f"input spectrum has eigenvalue {min_eig:.3e} below -1e-6 * scale ({scale:.3e})"
        )


def wilson_factorize(spectrum: SpectralMatrix, tol: float = 1e-6, max_iter: int = 500) -> SpectralFactor:
    """Factor ``S = H sigma H^H`` with ``H`` minimum-phase, ``H`` lag-0 = I.

    Parameters
    ----------
    spectrum : SpectralMatrix
        Hermitian PSD matrices on the full two-sided grid.
    tol : float
        Stop when the maximum entrywise change of psi between iterations,
        relative to the largest entry of psi, drops below this.
    max_iter : int
        Iteration budget; exceeding it raises ``NonConvergenceError``.

    Returns
    -------
    SpectralFactor
        With ``diagnostics = {"iterations": .., "final_delta": ..,
        "residual": ..}`` where ``residual`` is the max-entry
        reconstruction error relative to the largest entry of ``S``.
    """
    S = spectrum.values
    _check_psd(S)
    F, n = S.shape[0], S.shape[1]

    # Constant-in-frequency start: lower Cholesky of the grid-mean spectrum.
    S_mean = 0.5 * (S.mean(axis=0) + S.mean(axis=0).conj().T)
    eye = np.eye(n)
    psi = np.broadcast_to(np.linalg.cholesky(S_mean.real + 1e-14 * eye), (F, n, n)).astype(complex).copy()

    delta = np.inf
    for iteration in range(1, max_iter + 1):
        psi_inv = np.linalg.inv(psi)
        g = psi_inv @ S @ psi_inv.conj().transpose(0, 2, 1) + eye[None]
        psi_new = psi @ _causal_part(g)
        delta = np.max(np.abs(psi_new - psi)) / np.max(np.abs(psi))
        psi = psi_new
        if delta < tol:
            break
    else:
        raise NonConvergenceError(
            f"factorization did not converge in {max_iter} iterations (last relative change {delta:.3e})"
        )

    psi0 = psi.mean(axis=0).real  # zero-lag coefficient of the psi expansion
    H = psi @ np.linalg.inv(psi0)[None]
    sigma = psi0 @ psi0.T

    recon = H @ sigma @ H.conj().transpose(0, 2, 1)
    residual = float(np.max(np.abs(recon - S)) / np.max(np.abs(S)))
    diagnostics = {"iterations": iteration, "final_delta": float(delta), "residual": residual}
    return SpectralFactor(spectrum.grid, H, sigma, diagnostics)
