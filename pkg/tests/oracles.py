"""Independent reference implementations used only by the tests."""

from __future__ import annotations

import itertools
from collections import defaultdict
from math import factorial, sqrt

import numpy as np


def naive_permanent(A) -> complex:
    """Permutation sum, O(k! k)."""
    A = np.asarray(A, dtype=complex)
    k = A.shape[0]
    total = 0j
    for perm in itertools.permutations(range(k)):
        total += np.prod(A[np.arange(k), perm])
    return total if k else 1.0 + 0j


def polynomial_lift(S, states) -> np.ndarray:
    """``phi(S)`` by expanding ``prod_i (sum_j S_ji a_j^dag)^{a_i} |0>`` as a polynomial.

    ``states`` is the list of occupation tuples defining the basis order.
    """
    S = np.asarray(S, dtype=complex)
    m = S.shape[0]
    index = {tuple(s): i for i, s in enumerate(states)}
    V = np.zeros((len(states), len(states)), dtype=complex)
    for col, occ in enumerate(states):
        poly = {(0,) * m: 1.0 + 0j}
        for mode, count in enumerate(occ):
            for _ in range(count):
                nxt = defaultdict(complex)
                for mono, coef in poly.items():
                    for j in range(m):
                        bumped = list(mono)
                        bumped[j] += 1
                        nxt[tuple(bumped)] += coef * S[j, mode]
                poly = nxt
        norm_in = sqrt(np.prod([factorial(a) for a in occ]))
        for mono, coef in poly.items():
            # a^dag monomial acting on vacuum gives sqrt(prod b!) |b>
            V[index[mono], col] += coef * sqrt(np.prod([factorial(b) for b in mono])) / norm_in
    return V


def ladder_js(h, states) -> np.ndarray:
    """``sum_kl h_kl a_k^dag a_l`` by explicit matrix elements of ladder operators."""
    h = np.asarray(h, dtype=complex)
    m = h.shape[0]
    index = {tuple(s): i for i, s in enumerate(states)}
    O = np.zeros((len(states), len(states)), dtype=complex)
    for col, occ in enumerate(states):
        for k in range(m):
            for l in range(m):
                if occ[l] == 0 or h[k, l] == 0:
                    continue
                out = list(occ)
                amp = sqrt(out[l])
                out[l] -= 1
                amp *= sqrt(out[k] + 1)
                out[k] += 1
                O[index[tuple(out)], col] += h[k, l] * amp
    return O


def haar_unitary(m: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_density(dim: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    rank = rank or dim
    G = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    rho = G @ G.conj().T
    return rho / np.trace(rho).real


def global_phase_distance(A, B) -> float:
    A = np.asarray(A, dtype=complex)
    B = np.asarray(B, dtype=complex)
    ov = np.vdot(A, B)
    ph = ov / abs(ov) if abs(ov) > 0 else 1.0
    return float(np.abs(ph * A - B).max())
