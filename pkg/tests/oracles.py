"""Independent dense-matrix and brute-force references used by the tests.

Nothing here calls the Kraus machinery of the package: losses are modelled
as an explicit beam splitter coupling the mode to an environment mode,
followed by a partial trace.
"""

import math

import numpy as np
from scipy.linalg import expm


def annihilation(dim):
    return np.diag(np.sqrt(np.arange(1, dim)), 1).astype(complex)


def squeeze_oracle(r, dim, cutoff=64):
    """``exp(r/2 (a^2 - a^dag^2)) |0>`` at a large cutoff, first ``dim`` amplitudes."""
    a = annihilation(cutoff)
    s = expm(0.5 * r * (a @ a - a.conj().T @ a.conj().T))
    return s[:dim, 0]


class BeamSplitter:
    """Mode (x) environment, coupled by ``theta (a^dag b - a b^dag)``.

    The generator conserves total photon number, so blocks with fewer than
    ``dim`` photons are represented exactly at per-mode cutoff ``dim``.
    One Hermitian eigensolve serves every mixing angle.
    """

    def __init__(self, dim):
        self.dim = dim
        a = annihilation(dim)
        eye = np.eye(dim)
        A, B = np.kron(a, eye), np.kron(eye, a)
        gen = A.conj().T @ B - A @ B.conj().T
        self.lam, self.vec = np.linalg.eigh(1j * gen)

    def unitary_on(self, psi, eta):
        theta = math.acos(math.sqrt(eta))
        # exp(theta gen) = exp(-i theta (i gen))
        return self.vec @ (np.exp(-1j * theta * self.lam) * (self.vec.conj().T @ psi))

    def lossy_pure(self, psi, eta):
        """Reduced state of the mode after loss, for a pure input ket."""
        env0 = np.zeros(self.dim)
        env0[0] = 1.0
        out = self.unitary_on(np.kron(psi, env0), eta).reshape(self.dim, self.dim)
        return out @ out.conj().T

    def lossy(self, rho, eta):
        """Reduced state after loss for a mixed input (spectral decomposition)."""
        w, v = np.linalg.eigh(rho)
        out = np.zeros_like(rho, dtype=complex)
        for p, psi in zip(w, v.T):
            if p > 1e-15:
                out += p * self.lossy_pure(psi, eta)
        return out


def ideal_cycle_fidelity(psi, eta, bs=None):
    """Fidelity of a pure input after capture phase, loss ``eta`` and conjugate release phase."""
    dim = psi.size
    bs = bs or BeamSplitter(dim)
    n = np.arange(dim)
    captured = (-1j) ** n * psi
    rho = bs.lossy_pure(captured, eta)
    back = (1j) ** n
    rho = back[:, None] * rho * back.conj()[None, :]
    return float(np.real(psi.conj() @ rho @ psi))


def two_mode_damping(psi_ab, eta_a, eta_b, dim):
    """Four-mode beam-splitter model of independent loss on both factors of ``psi_ab``.

    Ordering of the input ket is ``n*dim + m``; returns the reduced
    ``dim^2 x dim^2`` two-mode density matrix.
    """
    a = annihilation(dim)
    eye = np.eye(dim)

    def embed(op, slot):
        mats = [eye] * 4
        mats[slot] = op
        out = mats[0]
        for m in mats[1:]:
            out = np.kron(out, m)
        return out

    # mode order: a, env_a, b, env_b
    A, Ea, B, Eb = (embed(a, k) for k in range(4))
    ta, tb = math.acos(math.sqrt(eta_a)), math.acos(math.sqrt(eta_b))
    gen = ta * (A.conj().T @ Ea - A @ Ea.conj().T) + tb * (B.conj().T @ Eb - B @ Eb.conj().T)
    u = expm(gen)
    vac = np.zeros(dim)
    vac[0] = 1.0
    psi = np.einsum("nm,i,j->nimj", psi_ab.reshape(dim, dim), vac, vac).reshape(-1)
    out = (u @ psi).reshape(dim, dim, dim, dim)
    rho = np.einsum("aibj,cidj->abcd", out, out.conj())
    return rho.reshape(dim * dim, dim * dim)


def pt_negativity(rho, dim):
    """Negativity from an explicit element-by-element partial transpose."""
    pt = np.empty_like(rho)
    for n in range(dim):
        for m in range(dim):
            for k in range(dim):
                for l in range(dim):
                    pt[n * dim + l, k * dim + m] = rho[n * dim + m, k * dim + l]
    lam = np.linalg.eigvalsh(pt)
    return float(-lam[lam < 0].sum())


def dark_amplitude_double_quadrature(t, c, h, gamma=1.0):
    """O(n^2) evaluation of the dark amplitude integral with the inner integral redone per row."""
    dt = t[1] - t[0]
    c2 = c * c
    d = np.zeros(t.size, dtype=complex)
    for i in range(1, t.size):
        seg = c2[: i + 1]
        # int_{t_j}^{t_i} c^2 by trapezoid, for all j <= i
        tail = np.concatenate([np.cumsum(0.5 * dt * (seg[1:] + seg[:-1])[::-1])[::-1], [0.0]])
        integrand = math.sqrt(gamma) * c[: i + 1] * h[: i + 1] * np.exp(-0.5 * gamma * tail)
        d[i] = dt * (integrand.sum() - 0.5 * (integrand[0] + integrand[-1]))
    return d


def gaussian_sum(t, centers, widths, weights, phases):
    """Unnormalized sum of Gaussian amplitude profiles with complex weights."""
    h = np.zeros(t.size, dtype=complex)
    for c, w, a, p in zip(centers, widths, weights, phases):
        h += a * np.exp(1j * p) * np.exp(-((t - c) ** 2) / (4 * w * w))
    return h
