"""Independent reference computations used to freeze expected values.

Nothing here imports the package: every oracle is built from raw numpy
products so it cannot share a bug with the code under test.
"""
import math

import numpy as np

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
SM = np.array([[0, 1], [0, 0]], dtype=complex)  # |0><1|, |0> ground
SP = SM.T.copy()
I2 = np.eye(2, dtype=complex)
HAD = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)


def collision_h(alpha, kappa):
    return alpha * np.kron(SX, I2) + kappa * (np.kron(SP, SM) + np.kron(SM, SP))


def taylor_expm_minus_i(h, terms=20):
    """exp(-i h) by scaling and squaring a truncated Taylor series."""
    norm = np.abs(h).sum(axis=1).max()
    s = max(0, int(math.ceil(math.log2(norm / 0.5))) if norm > 0.5 else 0)
    a = -1j * h / 2**s
    out = np.eye(h.shape[0], dtype=complex)
    term = np.eye(h.shape[0], dtype=complex)
    for k in range(1, terms):
        term = term @ a / k
        out = out + term
    for _ in range(s):
        out = out @ out
    return out


def charpoly_roots(a):
    """Eigenvalues from the Faddeev-LeVerrier characteristic polynomial."""
    n = a.shape[0]
    coeffs = [1.0 + 0j]
    m = np.zeros_like(a)
    for k in range(1, n + 1):
        m = a @ m + coeffs[-1] * np.eye(n)
        coeffs.append(-np.trace(a @ m) / k)
    return np.sort(np.roots(coeffs).real)


def ptrace_env(r):
    out = np.zeros((2, 2), dtype=complex)
    for b in range(2):
        for bp in range(2):
            out[b, bp] = r[2 * b, 2 * bp] + r[2 * b + 1, 2 * bp + 1]
    return out


def qubit_ergotropy(rho, omega0=1.0):
    """E(rho) - lambda_min * omega0 for a qubit with levels (0, omega0)."""
    lam = np.linalg.eigvalsh(rho)
    return omega0 * rho[1, 1].real - omega0 * lam[0]


def noisy_step_joint(rho_b, alpha, kappa, p_ad=0.0, p_d=0.0):
    """Straight-line 4x4 computation of one noisy collision, ancilla kept."""
    v = taylor_expm_minus_i(collision_h(alpha, kappa))
    joint = v @ np.kron(rho_b, np.diag([1, 0]).astype(complex)) @ v.conj().T
    n0 = np.kron(math.sqrt(1 - p_d) * I2, I2)
    n1 = np.kron(math.sqrt(p_d) * SZ, I2)
    joint = n0 @ joint @ n0.conj().T + n1 @ joint @ n1.conj().T
    k0 = np.kron(np.array([[1, 0], [0, math.sqrt(1 - p_ad)]]), I2)
    k1 = np.kron(np.array([[0, math.sqrt(p_ad)], [0, 0]]), I2)
    return k0 @ joint @ k0.conj().T + k1 @ joint @ k1.conj().T


def povm_effects(basis, p01=0.0, p10=0.0):
    pi0 = np.diag([1 - p10, p01]).astype(complex)
    pi1 = np.diag([p10, 1 - p01]).astype(complex)
    if basis == "x":
        return [HAD @ pi0 @ HAD, HAD @ pi1 @ HAD]
    return [pi0, pi1]


def brute_force_trajectories(alpha, kappa, n, basis="x", p_ad=0.0, p_d=0.0, p01=0.0, p10=0.0):
    """Recursive enumeration: dict outcome-string -> (prob, conditional state)."""
    effects = povm_effects(basis, p01, p10)
    out = {"": (1.0, np.diag([1, 0]).astype(complex))}
    for _ in range(n):
        nxt = {}
        for bits, (p, rho) in out.items():
            joint = noisy_step_joint(rho, alpha, kappa, p_ad, p_d)
            for a, eff in enumerate(effects):
                unnorm = ptrace_env(joint @ np.kron(I2, eff))
                q = unnorm.trace().real
                nxt[bits + str(a)] = (p * q, unnorm / q if q > 1e-300 else rho)
        out = nxt
    return out
