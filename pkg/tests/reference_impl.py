"""Independent reference implementation for cross-checking the package.

Everything in this module is deliberately written with explicit
per-frequency loops and scalar sums, sharing no intermediate routines
with the package under test: transfer functions are assembled entry by
entry, the spectrum is inverted directly (instead of using
G^H sigma^{-1} G), and the measures follow their entrywise definitions.
Agreement between this code and the package is therefore a meaningful
check rather than a tautology.
"""

import numpy as np


def ar_matrix(ar_blocks, nu):
    """A(nu) = I - sum_r A_r exp(-i 2 pi nu r), one frequency at a time."""
    n = ar_blocks[0].shape[0] if len(ar_blocks) else None
    out = np.eye(n, dtype=complex)
    for r in range(1, len(ar_blocks) + 1):
        phase = np.exp(-2j * np.pi * nu * r)
        for i in range(n):
            for j in range(n):
                out[i, j] -= ar_blocks[r - 1][i][j] * phase
    return out


def ma_matrix(ma_blocks, nu):
    """B(nu) = sum_s B_s exp(-i 2 pi nu s)."""
    n = len(ma_blocks[0])
    out = np.zeros((n, n), dtype=complex)
    for s in range(len(ma_blocks)):
        phase = np.exp(-2j * np.pi * nu * s)
        for i in range(n):
            for j in range(n):
                out[i, j] += ma_blocks[s][i][j] * phase
    return out


def transfer_at(ar_blocks, ma_blocks, sigma, nu):
    """H(nu) = A^{-1} B for the innovation-normalized (B_0 = I) system."""
    ar, ma, sigma = canonical_parameters(ar_blocks, ma_blocks, sigma)
    n = sigma.shape[0]
    B = ma_matrix(ma, nu) if len(ma) else np.eye(n, dtype=complex)
    if len(ar):
        H = np.linalg.inv(ar_matrix(ar, nu)) @ B
    else:
        H = B
    return H, sigma


def canonical_parameters(ar_blocks, ma_blocks, sigma):
    """Innovation form: divide the MA polynomial by B_0, fold B_0 into sigma."""
    ar = np.asarray(ar_blocks, dtype=float)
    ma = np.asarray(ma_blocks, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    if len(ma) == 0:
        return ar, ma, sigma
    B0 = ma[0]
    B0_inv = np.linalg.inv(B0)
    ma_new = np.array([Bs @ B0_inv for Bs in ma])
    return ar, ma_new, B0 @ sigma @ B0.T


def spectral_matrix_at(ar_blocks, ma_blocks, sigma, nu):
    """S(nu) = H sigma H^H by explicit double sum."""
    H, sig = transfer_at(ar_blocks, ma_blocks, sigma, nu)
    n = sig.shape[0]
    S = np.zeros((n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            acc = 0.0 + 0.0j
            for k in range(n):
                for l in range(n):
                    acc += H[i, k] * sig[k, l] * np.conj(H[j, l])
            S[i, j] = acc
    return S


def coherency_at(ar_blocks, ma_blocks, sigma, nu):
    S = spectral_matrix_at(ar_blocks, ma_blocks, sigma, nu)
    n = S.shape[0]
    C = np.zeros_like(S)
    for i in range(n):
        for j in range(n):
            C[i, j] = S[i, j] / np.sqrt(S[i, i].real * S[j, j].real)
    return C


def gamma_at(ar_blocks, ma_blocks, sigma, nu):
    """Gamma_ij = H_ij sqrt(sigma_jj) / sqrt(S_ii)."""
    H, sig = transfer_at(ar_blocks, ma_blocks, sigma, nu)
    S = spectral_matrix_at(ar_blocks, ma_blocks, sigma, nu)
    n = sig.shape[0]
    G = np.zeros_like(H)
    for i in range(n):
        for j in range(n):
            G[i, j] = H[i, j] * np.sqrt(sig[j, j]) / np.sqrt(S[i, i].real)
    return G


def tdtf_at(ar_blocks, ma_blocks, sigma, nu):
    """Entrywise Gamma .* conj(Gamma) + (Gamma rho) .* conj(Gamma)."""
    G = gamma_at(ar_blocks, ma_blocks, sigma, nu)
    _, sig = transfer_at(ar_blocks, ma_blocks, sigma, nu)
    n = sig.shape[0]
    rho = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            if i != j:
                rho[i, j] = sig[i, j] / np.sqrt(sig[i, i] * sig[j, j])
    out = np.zeros_like(G)
    for i in range(n):
        for j in range(n):
            grho = 0.0 + 0.0j
            for k in range(n):
                grho += G[i, k] * rho[k, j]
            out[i, j] = G[i, j] * np.conj(G[i, j]) + grho * np.conj(G[i, j])
    return out


def dc_at(ar_blocks, ma_blocks, sigma, nu):
    """Squared directed coherence |Gamma_ij|^2."""
    G = gamma_at(ar_blocks, ma_blocks, sigma, nu)
    return (G * np.conj(G)).real


def pi_at(ar_blocks, ma_blocks, sigma, nu):
    """Pi_ij = sqrt((sigma^{-1})_ii) G_ij sqrt(S_jj), G = H^{-1}."""
    H, sig = transfer_at(ar_blocks, ma_blocks, sigma, nu)
    S = spectral_matrix_at(ar_blocks, ma_blocks, sigma, nu)
    G = np.linalg.inv(H)
    sig_inv = np.linalg.inv(sig)
    n = sig.shape[0]
    out = np.zeros_like(G)
    for i in range(n):
        for j in range(n):
            out[i, j] = np.sqrt(sig_inv[i, i]) * G[i, j] * np.sqrt(S[j, j].real)
    return out


def tpdc_at(ar_blocks, ma_blocks, sigma, nu):
    """Entrywise Pi~ .* conj(Pi~) + (Rt Pi~ - Pi~) .* conj(Pi~).

    Pi~ is the column-normalized pi factor, with the normalizer taken
    from the directly inverted spectrum: Pi~_ij = sqrt((sigma^{-1})_ii)
    G_ij / sqrt((S^{-1})_jj).  This is an independent route to the same
    quantity the package computes from G^H sigma^{-1} G.
    """
    H, sig = transfer_at(ar_blocks, ma_blocks, sigma, nu)
    S = spectral_matrix_at(ar_blocks, ma_blocks, sigma, nu)
    G = np.linalg.inv(H)
    sig_inv = np.linalg.inv(sig)
    S_inv = np.linalg.inv(S)
    n = sig.shape[0]
    rt = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            rt[i, j] = sig_inv[i, j] / np.sqrt(sig_inv[i, i] * sig_inv[j, j])
    pit = np.zeros_like(G)
    for i in range(n):
        for j in range(n):
            pit[i, j] = np.sqrt(sig_inv[i, i]) * G[i, j] / np.sqrt(S_inv[j, j].real)
    out = np.zeros_like(G)
    for i in range(n):
        for j in range(n):
            acc = 0.0 + 0.0j
            for k in range(n):
                acc += rt[i, k] * pit[k, j]
            out[i, j] = np.conj(pit[i, j]) * acc
    return out


def gpdc_at(ar_blocks, ma_blocks, sigma, nu):
    """(sigma^{-1})_ii |G_ij|^2 / sum_k (sigma^{-1})_kk |G_kj|^2."""
    H, sig = transfer_at(ar_blocks, ma_blocks, sigma, nu)
    G = np.linalg.inv(H)
    sig_inv = np.linalg.inv(sig)
    n = sig.shape[0]
    out = np.zeros((n, n))
    for j in range(n):
        den = 0.0
        for k in range(n):
            den += sig_inv[k, k] * abs(G[k, j]) ** 2
        for i in range(n):
            out[i, j] = sig_inv[i, i] * abs(G[i, j]) ** 2 / den
    return out


# Benchmark system parameters, restated here independently of the package.

def example1_parameters():
    ar = np.zeros((0, 2, 2))
    ma = np.array([[[1.0, 0.0], [0.0, 1.0]], [[0.0, 1.0], [0.0, 1.0]]])
    sigma = np.array([[1.0, 1.0], [1.0, 5.0]])
    return ar, ma, sigma


def example2_parameters():
    r, theta = 0.95, np.pi / 3.0
    ar = np.array(
        [
            [[2 * r * np.cos(theta), 0.0, 0.0], [0.5, -0.5, 0.0], [0.0, 0.0, 0.7]],
            [[-(r**2), 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]],
        ]
    )
    ma = np.array(
        [
            [[1.0, 0.0, 1.0], [0.0, 1.0, 0.0], [0.0, 1.0, 1.0]],
            [[0.0, 0.0, 1.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]],
            [[0.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 1.0, 0.0]],
        ]
    )
    return ar, ma, np.eye(3)


def example4_parameters():
    ar = np.zeros((0, 2, 2))
    ma = np.array(
        [[[1.0, 0.0], [0.0, 1.0]], [[2.0, 1.0], [0.0, 0.0]], [[4.0, 2.0], [0.0, 2.0]]]
    )
    sigma = np.array([[1.0, 1.0], [1.0, 5.0]])
    return ar, ma, sigma


ALL_EXAMPLE_PARAMETERS = {
    1: example1_parameters,
    2: example2_parameters,
    4: example4_parameters,
}
