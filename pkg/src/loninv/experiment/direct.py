"""Direct estimate of the traceless tangent invariant from photon counting.

Diagonal observables are read off per-mode photon numbers. Each off-diagonal
pair observable on modes ``(j, k)`` is mapped onto ``(n_j - n_k)/sqrt2`` by a
two-mode interfering unitary placed on those modes before counting:
a half-wave plate at 22.5 deg for the symmetric element and a quarter-wave
plate at 0 deg followed by that half-wave plate for the antisymmetric one.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from ..fock import FockBasis, enumerate_fock_basis, photonic_homomorphism
from ..operators import ggm_basis
from ..optics import half_wave, quarter_wave
from ..transfer import validate_density_matrix

MIN_SHOTS_PER_SETTING = 3

SYMMETRIC_ROTATION = half_wave(np.pi / 8)
ANTISYMMETRIC_ROTATION = half_wave(np.pi / 8) @ quarter_wave(0.0)


@dataclass(frozen=True)
class DirectMeasurement:
    value: float
    stderr: float
    expectations: np.ndarray  # <O_i> for i = 1 .. m^2-1 in frame order
    settings: int


def _embed(U2: np.ndarray, j: int, k: int, m: int) -> np.ndarray:
    U = np.eye(m, dtype=complex)
    U[np.ix_([j, k], [j, k])] = U2
    return U


def _diag_weights(m: int) -> np.ndarray:
    # rows: diagonal mode-basis elements l = 1..m-1 as weights on n_1..n_m
    h = ggm_basis(m).elements[1:m]
    return np.real(np.diagonal(h, axis1=1, axis2=2))


def measurement_plan(m: int) -> list[tuple[str, np.ndarray, np.ndarray]]:
    """Settings as ``(label, mode unitary, count weights)``.

    Counting after the unitary and averaging ``weights . n`` gives one
    tangent observable (or all diagonal ones for the first setting).
    """
    plan = [("diag", np.eye(m, dtype=complex), _diag_weights(m))]
    for j in range(m):
        for k in range(j + 1, m):
            w = np.zeros((1, m))
            w[0, j], w[0, k] = 1 / np.sqrt(2), -1 / np.sqrt(2)
            plan.append((f"sym{j + 1}{k + 1}", _embed(SYMMETRIC_ROTATION, j, k, m), w))
            plan.append((f"anti{j + 1}{k + 1}", _embed(ANTISYMMETRIC_ROTATION, j, k, m), w))
    return plan


def direct_measure_itprime(rho, n: int, m: int, shots: int | None = None,
                           rng: np.random.Generator | None = None,
                           basis: FockBasis | None = None) -> DirectMeasurement:
    """Estimate ``I_t' = sum_i <O_i>^2 / C(m+n, m+1)`` over the ``m^2-1`` tangent observables.

    ``shots`` is the number of detection events per setting; ``None`` gives
    the exact expectation values. The standard error is propagated with the
    delta method, including correlations between observables measured in the
    same setting.
    """
    rho = validate_density_matrix(rho)
    basis = basis or enumerate_fock_basis(n, m)
    if rho.shape != (basis.dim, basis.dim):
        raise ValueError("density matrix does not match the (n, m) Fock space")
    if shots is not None:
        if shots < MIN_SHOTS_PER_SETTING:
            raise ValueError(f"need at least {MIN_SHOTS_PER_SETTING} shots per setting")
        if rng is None:
            raise ValueError("a seeded random generator is required for finite shots")
    norm = comb(m + n, m + 1)
    occ = basis.occupation_array().astype(float)

    means, blocks = [], []
    for _, U, weights in measurement_plan(m):
        V = photonic_homomorphism(U, n, basis=basis).matrix
        probs = np.clip(np.real(np.diagonal(V @ rho @ V.conj().T)), 0.0, None)
        probs /= probs.sum()
        values = occ @ weights.T  # (M, observables in this setting)
        if shots is None:
            means.append(probs @ values)
            continue
        outcomes = rng.multinomial(shots, probs)
        samples = np.repeat(values, outcomes, axis=0)
        mu = samples.mean(axis=0)
        means.append(mu)
        blocks.append(np.atleast_2d(np.cov(samples, rowvar=False, ddof=1)) / shots)

    expectations = np.concatenate(means)
    value = float(np.sum(expectations ** 2) / norm)
    if shots is None:
        return DirectMeasurement(value, 0.0, expectations, len(means))
    var, start = 0.0, 0
    for cov in blocks:
        grad = 2 * expectations[start:start + len(cov)] / norm
        var += float(grad @ cov @ grad)
        start += len(cov)
    return DirectMeasurement(value, float(np.sqrt(max(var, 0.0))), expectations, len(means))
