"""Parametric model fitting: VAR, VMA, and VARMA estimators.

* VAR: Nuttall-Strand recursion (multivariate Burg variant minimizing
  forward and backward prediction errors simultaneously, stable by
  construction) with Hannan-Quinn order selection.
* VMA / VARMA: two-step least squares.  A long VAR prewhitening fit
  provides innovation estimates ``eps(n)``; the MA (and AR) blocks are
  then regressed with the zero-lag MA block pinned to the identity.

Fitted MA parts are forced minimum-phase: if the two-step regression
lands outside the invertibility region (which happens when the generator
itself is nonminimum-phase), the MA polynomial is replaced by its
spectrum-equivalent minimum-phase counterpart, which is what any
second-order method can identify anyway.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_sylvester

from .errors import ConfigError, DegeneratePanelError, NumericalError
from .models import (
    FrequencyGrid,
    SpectralMatrix,
    VarmaModel,
    eval_ma_polynomial,
    ar_root_report,
    ma_root_report,
)
from .simulate import TimeSeriesPanel

__all__ = ["FitReport", "fit_var", "fit_vma", "fit_varma", "hannan_quinn", "sweep_orders", "save_fit_report"]

DEFAULT_LONG_AR_ORDER = 50


@dataclass
class FitReport:
    """Result of a parametric fit.

    ``criterion_values`` holds ``(order, HQ value)`` pairs when an order
    search was performed (empty for fixed-order fits) and
    ``selected_order`` is the ``(p, q)`` pair of the returned model.
    """

    model: VarmaModel
    selected_order: tuple
    criterion_values: list
    residual_cov: np.ndarray


def _check_panel(panel: TimeSeriesPanel) -> np.ndarray:
    x = panel.data
    if np.any(np.var(x, axis=1) == 0.0):
        ch = int(np.argmin(np.var(x, axis=1))) + 1
        raise DegeneratePanelError(f"channel x{ch} has zero variance; nothing to fit")
    return x


def _nuttall_strand(x: np.ndarray, p_max: int) -> list:
    """Stagewise recursion; returns ``[(ar_blocks, residual_cov)]`` for p=0..p_max.

    Each stage solves the Sylvester equation expressing the harmonic-mean
    (Nuttall-Strand) compromise between the forward and backward partial
    correlation normal equations, then updates both prediction-error
    filters Levinson-style.
    """
    n, n_samp = x.shape
    ef = x.copy()
    eb = x.copy()
    pf = x @ x.T / n_samp
    pb = pf.copy()
    fwd: list = []  # forward coefficient blocks of the current order
    bwd: list = []
    out = [([], pf.copy())]
    for m in range(1, p_max + 1):
        f = ef[:, m:]
        b = eb[:, m - 1 : n_samp - 1]
        pfh = f @ f.T
        pbh = b @ b.T
        pfbh = f @ b.T
        try:
            rho = solve_sylvester(pfh @ np.linalg.inv(pf), np.linalg.inv(pb) @ pbh, 2.0 * pfbh)
        except np.linalg.LinAlgError as exc:
            raise NumericalError(f"Nuttall-Strand stage {m} failed: {exc}") from exc
        a_m = rho @ np.linalg.inv(pb)
        b_m = rho.conj().T @ np.linalg.inv(pf)
        fwd, bwd = (
            [fwd[r] - a_m @ bwd[m - 2 - r] for r in range(m - 1)] + [a_m],
            [bwd[r] - b_m @ fwd[m - 2 - r] for r in range(m - 1)] + [b_m],
        )
        pf = (np.eye(n) - a_m @ b_m) @ pf
        pb = (np.eye(n) - b_m @ a_m) @ pb
        pf = 0.5 * (pf + pf.T)
        pb = 0.5 * (pb + pb.T)
        ef_new = ef[:, m:] - a_m @ eb[:, m - 1 : n_samp - 1]
        eb_new = eb[:, m - 1 : n_samp - 1] - b_m @ ef[:, m:]
        ef = np.concatenate([np.zeros((n, m)), ef_new], axis=1)
        eb = np.concatenate([np.zeros((n, m)), eb_new], axis=1)
        out.append(([a.copy() for a in fwd], pf.copy()))
    return out


def hannan_quinn(residual_covs, n_samples: int, n_channels: int) -> int:
    """Hannan-Quinn order selection.

    Parameters
    ----------
    residual_covs : sequence of (order, cov) pairs
        Residual covariance for each candidate order.
    n_samples, n_channels : int
        Used in the penalty ``2 p N^2 ln(ln n_s) / n_s``.

    Returns
    -------
    int
        The order minimizing ``ln det cov + penalty``; ties go to the
        smaller order.
    """
    if len(residual_covs) == 0:
        raise ConfigError("hannan_quinn needs at least one candidate order")
    penalty_unit = 2.0 * n_channels**2 * np.log(np.log(n_samples)) / n_samples
    best_order, best_val = None, np.inf
    for order, cov in sorted(residual_covs, key=lambda oc: oc[0]):
        sign, logdet = np.linalg.slogdet(cov)
        if sign <= 0:
            continue
        val = logdet + order * penalty_unit
        if val < best_val:
            best_order, best_val = order, val
    if best_order is None:
        raise NumericalError("all candidate residual covariances were singular")
    return best_order


def _hq_values(residual_covs, n_samples: int, n_channels: int) -> list:
    penalty_unit = 2.0 * n_channels**2 * np.log(np.log(n_samples)) / n_samples
    vals = []
    for order, cov in residual_covs:
        sign, logdet = np.linalg.slogdet(cov)
        vals.append((order, (logdet + order * penalty_unit) if sign > 0 else np.inf))
    return vals


def fit_var(panel: TimeSeriesPanel, p_max: int = 30) -> FitReport:
    """Nuttall-Strand VAR fit with Hannan-Quinn selection over p = 1..p_max."""
    x = _check_panel(panel)
    n = panel.n_channels
    if panel.n_samples <= n * p_max + 1:
        raise ConfigError(
            f"need more than {n * p_max + 1} samples to sweep VAR orders up to {p_max}"
        )
    stages = _nuttall_strand(x, p_max)
    candidates = [(p, stages[p][1]) for p in range(1, p_max + 1)]
    p_hat = hannan_quinn(candidates, panel.n_samples, n)
    ar, sigma = stages[p_hat]
    model = VarmaModel(np.array(ar), np.eye(n)[None], sigma)
    return FitReport(model, (p_hat, 0), _hq_values(candidates, panel.n_samples, n), sigma)


def _long_var_residuals(x: np.ndarray, long_ar_order: int):
    """Prewhitening residuals eps(n) for n >= long_ar_order (plus the offset)."""
    stages = _nuttall_strand(x, long_ar_order)
    ar, _ = stages[long_ar_order]
    n_samp = x.shape[1]
    eps = x[:, long_ar_order:].copy()
    for r in range(1, long_ar_order + 1):
        eps -= ar[r - 1] @ x[:, long_ar_order - r : n_samp - r]
    return eps, long_ar_order


def _solve_block_regression(Y: np.ndarray, Z: np.ndarray) -> np.ndarray:
    ZZt = Z @ Z.T
    if np.linalg.cond(ZZt) > 1e12:
        raise NumericalError("regressor matrix is numerically rank deficient")
    return np.linalg.solve(ZZt, Z @ Y.T).T


def _ensure_minimum_phase(ma_blocks: np.ndarray, sigma: np.ndarray):
    """Swap an MA polynomial for its minimum-phase spectral equivalent.

    Leaves minimum-phase inputs untouched.  Otherwise the MA-part
    spectrum ``B sigma B^H`` is refactorized on a fine grid and the lag
    coefficients of the minimum-phase factor (exactly q of them, up to
    grid truncation) are read back out.
    """
    q = ma_blocks.shape[0] - 1
    probe = VarmaModel(np.zeros((0,) + sigma.shape), ma_blocks, sigma)
    report = ma_root_report(probe)
    if report.roots.size == 0 or np.max(report.magnitudes) <= 1.0 + 1e-6:
        return ma_blocks, sigma

    from .wilson import wilson_factorize  # deferred: avoids import cycle at module load

    grid = FrequencyGrid(max(1024, 8 * (q + 1)))
    B = eval_ma_polynomial(probe, grid.values)
    spec = SpectralMatrix(grid, B @ sigma @ B.conj().transpose(0, 2, 1))
    # Roots near the unit circle make the fixed point contract slowly,
    # hence the generous iteration budget.
    factor = wilson_factorize(spec, tol=1e-8, max_iter=5000)
    lags = np.fft.ifft(factor.values, axis=0).real[: q + 1]
    lag0_inv = np.linalg.inv(lags[0])
    new_ma = lags @ lag0_inv
    new_sigma = lags[0] @ factor.sigma @ lags[0].T
    return new_ma, 0.5 * (new_sigma + new_sigma.T)


def fit_vma(panel: TimeSeriesPanel, q: int, long_ar_order: int = DEFAULT_LONG_AR_ORDER) -> FitReport:
    """Two-step VMA(q) fit.

    Long-VAR residuals stand in for the unobserved innovations; the MA
    blocks solve the least-squares problem ``x(n) - eps(n) ~ sum_s B_s
    eps(n - s)`` over the sample range where every lag exists.  The
    innovation covariance is the sample covariance of the residuals.
    """
    if q < 1:
        raise ConfigError(f"q must be a positive integer, got {q}")
    x = _check_panel(panel)
    n, n_samp = x.shape
    if n_samp < 4 * (long_ar_order + q):
        raise ConfigError(
            f"panel too short for long_ar_order={long_ar_order} and q={q}"
        )
    eps, off = _long_var_residuals(x, long_ar_order)
    t0 = off + q
    Y = x[:, t0:] - eps[:, t0 - off :]
    Z = np.concatenate([eps[:, t0 - off - s : n_samp - off - s] for s in range(1, q + 1)], axis=0)
    C = _solve_block_regression(Y, Z)
    ma = np.concatenate(
        [np.eye(n)[None], C.reshape(n, q, n).transpose(1, 0, 2)], axis=0
    )
    sigma = eps @ eps.T / eps.shape[1]
    ma, sigma = _ensure_minimum_phase(ma, 0.5 * (sigma + sigma.T))
    model = VarmaModel(np.zeros((0, n, n)), ma, sigma)
    return FitReport(model, (0, q), [], model.innovations_cov)


def fit_varma(
    panel: TimeSeriesPanel, p: int, q: int, long_ar_order: int = DEFAULT_LONG_AR_ORDER
) -> FitReport:
    """Two-step VARMA(p, q) fit (same scheme as :func:`fit_vma` plus AR lags).

    ``q = 0`` degenerates to an ordinary least-squares VAR(p) fit.
    """
    if p < 1 or q < 0:
        raise ConfigError(f"orders must satisfy p >= 1 and q >= 0, got ({p}, {q})")
    x = _check_panel(panel)
    n, n_samp = x.shape
    if n_samp < 4 * (long_ar_order + max(p, q)):
        raise ConfigError(
            f"panel too short for long_ar_order={long_ar_order} and orders ({p}, {q})"
        )
    eps, off = _long_var_residuals(x, long_ar_order)
    t0 = off + max(p, q)
    Y = x[:, t0:] - eps[:, t0 - off :]
    blocks = [x[:, t0 - r : n_samp - r] for r in range(1, p + 1)]
    blocks += [eps[:, t0 - off - s : n_samp - off - s] for s in range(1, q + 1)]
    Z = np.concatenate(blocks, axis=0)
    C = _solve_block_regression(Y, Z)
    ar = C[:, : p * n].reshape(n, p, n).transpose(1, 0, 2).copy()
    ma = np.concatenate(
        [np.eye(n)[None], C[:, p * n :].reshape(n, q, n).transpose(1, 0, 2)], axis=0
    )
    sigma = eps @ eps.T / eps.shape[1]
    ma, sigma = _ensure_minimum_phase(ma, 0.5 * (sigma + sigma.T))
    model = VarmaModel(ar, ma, sigma)
    if ar_root_report(model).classification != "stable":
        warnings.warn("fitted VARMA autoregressive part is not stable", stacklevel=2)
    return FitReport(model, (p, q), [], model.innovations_cov)


def sweep_orders(
    panel: TimeSeriesPanel,
    p_values,
    q_values,
    long_ar_order: int = DEFAULT_LONG_AR_ORDER,
):
    """Exhaustive (p, q) sweep scored by Hannan-Quinn on regression residuals.

    Provided for exploratory use; experiment drivers default to the
    generating model's orders instead.

    Returns
    -------
    (tuple, list)
        The winning ``(p, q)`` and all ``((p, q), criterion)`` pairs.
    """
    x = _check_panel(panel)
    n, n_samp = x.shape
    eps, off = _long_var_residuals(x, long_ar_order)
    scored = []
    for p in p_values:
        for q in q_values:
            if p < 0 or q < 0 or p + q == 0:
                continue
            t0 = off + max(p, q)
            Y = x[:, t0:] - eps[:, t0 - off :]
            blocks = [x[:, t0 - r : n_samp - r] for r in range(1, p + 1)]
            blocks += [eps[:, t0 - off - s : n_samp - off - s] for s in range(1, q + 1)]
            Z = np.concatenate(blocks, axis=0)
            try:
                C = _solve_block_regression(Y, Z)
            except NumericalError:
                continue
            resid = Y - C @ Z
            cov = resid @ resid.T / resid.shape[1]
            penalty = 2.0 * (p + q) * n**2 * np.log(np.log(n_samp)) / n_samp
            sign, logdet = np.linalg.slogdet(cov)
            if sign <= 0:
                continue
            scored.append(((p, q), logdet + penalty))
    if not scored:
        raise NumericalError("no (p, q) candidate produced a usable regression")
    best = min(scored, key=lambda t: (t[1], t[0]))
    return best[0], scored


def save_fit_report(report: FitReport, path) -> None:
    """JSON export: model in the model-file schema plus the criterion table."""
    payload = {
        "model": report.model.to_dict(),
        "selected_order": list(report.selected_order),
        "criterion_values": [[int(o), float(v)] for o, v in report.criterion_values],
        "residual_cov": np.asarray(report.residual_cov).tolist(),
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
