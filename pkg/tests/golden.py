"""Explicit two-photon, two-mode matrices transcribed from the reference derivation.

Basis order is (|2,0>, |1,1>, |0,2>).
"""

import numpy as np

r2, r3, r6 = np.sqrt(2), np.sqrt(3), np.sqrt(6)

TANGENT_22 = [
    np.eye(3) / r3,
    np.diag([1 / r2, 0, -1 / r2]),
    np.array([[0, 0.5, 0], [0.5, 0, 0.5], [0, 0.5, 0]]),
    np.array([[0, -0.5j, 0], [0.5j, 0, -0.5j], [0, 0.5j, 0]]),
]

PERPENDICULAR_22 = [
    np.diag([1 / r6, -np.sqrt(2 / 3), 1 / r6]),
    np.array([[0, 0.5, 0], [0.5, 0, -0.5], [0, -0.5, 0]]),
    np.array([[0, -0.5j, 0], [0.5j, 0, 0.5j], [0, -0.5j, 0]]),
    np.array([[0, 0, -1j / r2], [0, 0, 0], [1j / r2, 0, 0]]),
    np.array([[0, 0, 1 / r2], [0, 0, 0], [1 / r2, 0, 0]]),
]

GGM_2 = [
    np.array([[0, 1], [1, 0]]) / r2,
    np.array([[0, -1j], [1j, 0]]) / r2,
    np.array([[1, 0], [0, -1]]) / r2,
]


def _e(j, k, val, m=3):
    A = np.zeros((m, m), dtype=complex)
    A[j, k] = val
    return A


GGM_3 = [
    (_e(0, 1, 1) + _e(1, 0, 1)) / r2,
    (_e(0, 1, -1j) + _e(1, 0, 1j)) / r2,
    np.diag([1, -1, 0]) / r2,
    (_e(0, 2, 1) + _e(2, 0, 1)) / r2,
    (_e(0, 2, -1j) + _e(2, 0, 1j)) / r2,
    (_e(1, 2, 1) + _e(2, 1, 1)) / r2,
    (_e(1, 2, -1j) + _e(2, 1, 1j)) / r2,
    np.diag([1, 1, -2]) / r6,
]


def scattering_abg(a, b, g):
    c, s, e = np.cos(b / 2), np.sin(b / 2), np.exp
    return np.array([
        [e(0.5j * (a + g)) * c, e(0.5j * (a - g)) * s],
        [-e(-0.5j * (a - g)) * s, e(-0.5j * (a + g)) * c],
    ])


def lifted_abg_printed(a, b, g):
    """The printed lifted unitary, transcribed verbatim (middle row included)."""
    c, s, e = np.cos(b / 2), np.sin(b / 2), np.exp
    return np.array([
        [e(1j * (a + g)) * c * c, r2 * e(1j * a) * s * c, e(1j * (a - g)) * s * s],
        [-r2 * e(1j * (g - a)) * s * c, c * c - s * s, r2 * e(-1j * (a - g)) * s * c],
        [e(-1j * (a - g)) * s * s, -r2 * e(-1j * a) * s * c, e(-1j * (a + g)) * c * c],
    ])


def lifted_abg_corrected(a, b, g):
    """Printed matrix with the middle-row phases taken from the permanent formula.

    The printed middle row gives both off-diagonal entries the phase
    ``exp(i(gamma - alpha))``; the permanent formula gives ``exp(+i gamma)``
    and ``exp(-i gamma)``. The two agree only when ``alpha = gamma = 0``.
    """
    V = lifted_abg_printed(a, b, g)
    c, s = np.cos(b / 2), np.sin(b / 2)
    V[1, 0] = -r2 * np.exp(1j * g) * s * c
    V[1, 2] = r2 * np.exp(-1j * g) * s * c
    return V


def rs_abg(a, b, g):
    C, S = np.cos, np.sin
    return np.array([
        [1, 0, 0, 0],
        [0, C(b), S(b) * C(g), S(b) * S(g)],
        [0, -C(a) * S(b), C(a) * C(b) * C(g) - S(a) * S(g), C(a) * C(b) * S(g) + S(a) * C(g)],
        [0, S(a) * S(b), -S(a) * C(b) * C(g) - C(a) * S(g), C(a) * C(g) - S(a) * C(b) * S(g)],
    ])


def span_projector(mats) -> np.ndarray:
    A = np.array([np.asarray(m, dtype=complex).reshape(-1) for m in mats])
    return A.T @ A.conj()
