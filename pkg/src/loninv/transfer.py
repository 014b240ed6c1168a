"""Density vectors, Hermitian transfer matrices and the purity-like invariants."""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from .errors import DimensionMismatchError, NonPhysicalStateError
from .fock import MultiPhotonUnitary, ScatteringUnitary, check_unitary
from .operators import HermitianFrame, ModeHermitianBasis, ggm_basis, js_map

HERMITIAN_ATOL = 1e-10
TRACE_ATOL = 1e-10
EIG_ATOL = 1e-9
DENSE_BLOCK_CHECK_LIMIT = 4096
SAMPLED_BLOCK_CHECKS = 1000


def validate_density_matrix(rho, lenient: bool = False) -> np.ndarray:
    """Check Hermiticity, unit trace and positivity.

    In lenient mode small violations are repaired instead: the matrix is
    symmetrized, negative eigenvalues are clipped to zero and the result is
    renormalized to unit trace.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise DimensionMismatchError(f"density matrix must be square, got {rho.shape}")
    if lenient:
        rho = (rho + rho.conj().T) / 2
        w, v = np.linalg.eigh(rho)
        w = np.clip(w, 0.0, None)
        if w.sum() <= 0:
            raise NonPhysicalStateError("no positive weight left after clipping")
        return (v * (w / w.sum())) @ v.conj().T

    herm_err = np.abs(rho - rho.conj().T).max()
    if herm_err > HERMITIAN_ATOL:
        raise NonPhysicalStateError(f"density matrix not Hermitian ({herm_err:.2e})")
    tr = np.trace(rho)
    if abs(tr - 1) > TRACE_ATOL:
        raise NonPhysicalStateError(f"density matrix trace is {tr.real:.12g}, expected 1")
    wmin = np.linalg.eigvalsh((rho + rho.conj().T) / 2).min()
    if wmin < -EIG_ATOL:
        raise NonPhysicalStateError(f"density matrix has negative eigenvalue {wmin:.2e}")
    return rho


def pure_density(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    psi = psi / np.linalg.norm(psi)
    return np.outer(psi, psi.conj())


@dataclass(frozen=True)
class DensityState:
    """A density matrix together with its real coordinates in a frame."""

    rho: np.ndarray
    frame: HermitianFrame
    coeffs: np.ndarray

    @property
    def tangent_coords(self) -> np.ndarray:
        """Coordinates on the traceless tangent elements ``H_1 ... H_{m^2-1}``."""
        return self.coeffs[self.frame.traceless_tangent]

    @property
    def perpendicular_coords(self) -> np.ndarray:
        return self.coeffs[self.frame.perpendicular]

    def evolve(self, V) -> "DensityState":
        V = V.matrix if isinstance(V, MultiPhotonUnitary) else np.asarray(V)
        return density_vector(V @ self.rho @ V.conj().T, self.frame)


def density_vector(rho, frame: HermitianFrame, lenient: bool = False) -> DensityState:
    """Expand ``rho`` in ``frame``: ``coeffs[i] = tr(H_i rho)``."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (frame.dim, frame.dim):
        raise DimensionMismatchError(
            f"density matrix shape {rho.shape} does not match frame dimension {frame.dim}")
    rho = validate_density_matrix(rho, lenient=lenient)
    coeffs = frame.coefficients(rho)
    coeffs.setflags(write=False)
    return DensityState(rho=rho, frame=frame, coeffs=coeffs)


@dataclass(frozen=True)
class TransferMatrix:
    """Real ``M^2 x M^2`` matrix ``R_ij = tr(H_i V H_j V^dag)``."""

    R: np.ndarray
    frame: HermitianFrame

    @property
    def scalar_block(self) -> float:
        return float(self.R[0, 0])

    @property
    def tangent_block(self) -> np.ndarray:
        t = self.frame.tangent
        return self.R[t, t]

    @property
    def traceless_tangent_block(self) -> np.ndarray:
        t = self.frame.traceless_tangent
        return self.R[t, t]

    @property
    def perpendicular_block(self) -> np.ndarray:
        p = self.frame.perpendicular
        return self.R[p, p]

    def orthogonality_error(self) -> float:
        return float(np.abs(self.R.T @ self.R - np.eye(len(self.R))).max())

    def cross_block_max(self, rng: np.random.Generator | None = None) -> float:
        """Largest ``|R_ij|`` with ``i`` and ``j`` in different partition classes.

        Above ``4096`` frame elements only ``1000`` random cross-block pairs
        are inspected.
        """
        labels = self.frame.class_labels()
        size = len(labels)
        if size <= DENSE_BLOCK_CHECK_LIMIT:
            mask = labels[:, None] != labels[None, :]
            return float(np.abs(self.R[mask]).max()) if mask.any() else 0.0
        rng = rng or np.random.default_rng(0)
        found = []
        while len(found) < SAMPLED_BLOCK_CHECKS:
            i, j = rng.integers(0, size, 2)
            if labels[i] != labels[j]:
                found.append(abs(self.R[i, j]))
        return float(max(found))

    def check(self, orth_tol: float = 1e-9, block_tol: float = 1e-10) -> None:
        """Validate orthogonality, block-diagonality and ``R[0,0] = 1``."""
        err = self.orthogonality_error()
        if err >= orth_tol:
            raise AssertionError(f"HTM not orthogonal: {err:.2e}")
        cross = self.cross_block_max()
        if cross >= block_tol:
            raise AssertionError(f"HTM cross-block entry {cross:.2e}")
        if abs(self.R[0, 0] - 1) >= block_tol:
            raise AssertionError(f"HTM R[0,0] = {self.R[0, 0]!r}")


def htm(V, frame: HermitianFrame, lon: bool = False) -> TransferMatrix:
    """Hermitian transfer matrix of an ``M x M`` unitary in ``frame``.

    With ``lon=True`` (V is a lifted scattering unitary) the block structure
    is validated before returning.
    """
    if isinstance(V, MultiPhotonUnitary):
        V = V.matrix
    V = np.asarray(V, dtype=complex)
    if V.shape != (frame.dim, frame.dim):
        raise DimensionMismatchError(f"unitary shape {V.shape} does not match frame dimension {frame.dim}")
    H = frame.elements
    K = V @ H @ V.conj().T  # broadcast over frame elements
    size = frame.size
    R = np.real(H.reshape(size, -1).conj() @ K.reshape(size, -1).T)
    tm = TransferMatrix(R=R, frame=frame)
    if lon:
        tm.check()
    return tm


def htm_scattering(S, mode_basis: ModeHermitianBasis | None = None) -> np.ndarray:
    """``(R_S)_ij = tr(h_i S h_j S^dag)`` in the mode Hermitian basis."""
    S = S.matrix if isinstance(S, ScatteringUnitary) else np.asarray(S, dtype=complex)
    check_unitary(S)
    if mode_basis is None:
        mode_basis = ggm_basis(S.shape[0])
    if mode_basis.m != S.shape[0]:
        raise DimensionMismatchError("mode basis size does not match S")
    h = mode_basis.elements
    K = S @ h @ S.conj().T
    size = len(h)
    return np.real(h.reshape(size, -1).conj() @ K.reshape(size, -1).T)


@dataclass(frozen=True)
class InvariantSet:
    i_n: float
    i_t_prime: float
    i_t: float
    i_p: float
    i_o: float
    purity: float

    def as_dict(self) -> dict[str, float]:
        return {
            "I_n": self.i_n,
            "I_t_prime": self.i_t_prime,
            "I_t": self.i_t,
            "I_p": self.i_p,
            "I_o": self.i_o,
            "purity": self.purity,
        }


def observable_invariant_operators(n: int, m: int, basis=None) -> list[np.ndarray]:
    """The ``m^2`` observables ``n_j``, ``(a_j^dag a_k + h.c.)/sqrt2``, ``i(a_j^dag a_k - h.c.)/sqrt2``."""
    ops = []
    for j in range(m):
        e = np.zeros((m, m), dtype=complex)
        e[j, j] = 1
        ops.append(js_map(e, n=n, basis=basis))
    for j in range(m):
        for k in range(j + 1, m):
            sym = np.zeros((m, m), dtype=complex)
            sym[j, k] = sym[k, j] = 1 / np.sqrt(2)
            anti = np.zeros((m, m), dtype=complex)
            anti[j, k] = 1j / np.sqrt(2)
            anti[k, j] = -1j / np.sqrt(2)
            ops += [js_map(sym, n=n, basis=basis), js_map(anti, n=n, basis=basis)]
    return ops


def observable_invariant(rho, n: int, m: int, basis=None) -> float:
    """``I_o = sum_i tr(rho O'_i)^2`` evaluated directly."""
    rho = np.asarray(rho, dtype=complex)
    return float(sum(np.real(np.trace(rho @ O)) ** 2 for O in observable_invariant_operators(n, m, basis)))


def io_from_itprime(i_t_prime: float, n: int, m: int) -> float:
    return comb(m + n, m + 1) * i_t_prime + n * n / m


def itprime_from_io(i_o: float, n: int, m: int) -> float:
    return (i_o - n * n / m) / comb(m + n, m + 1)


def it_from_io(i_o: float, n: int, m: int) -> float:
    return i_o / comb(m + n, m + 1) - (n - 1) / comb(m + n, m)


def invariants(state: DensityState, io_atol: float = 1e-10) -> InvariantSet:
    """All invariants of a state.

    ``I_o`` is computed both directly from the observables and from ``I_t'``;
    the two must agree within ``io_atol``.
    """
    frame = state.frame
    c = state.coeffs
    i_n = float(c[0] ** 2)
    i_tp = float(np.sum(c[frame.traceless_tangent] ** 2))
    i_p = float(np.sum(c[frame.perpendicular] ** 2))
    i_o_direct = observable_invariant(state.rho, frame.n, frame.m, frame.basis)
    i_o_rel = io_from_itprime(i_tp, frame.n, frame.m)
    if abs(i_o_direct - i_o_rel) > io_atol * max(1.0, abs(i_o_direct)):
        raise AssertionError(f"observable invariant mismatch: direct {i_o_direct!r} vs relation {i_o_rel!r}")
    purity = float(np.real(np.trace(state.rho @ state.rho)))
    return InvariantSet(i_n=i_n, i_t_prime=i_tp, i_t=i_n + i_tp, i_p=i_p, i_o=i_o_direct, purity=purity)


def itprime_max(n: int) -> float:
    return 3 * n / ((n + 1) * (n + 2))


def itprime_range(n: int) -> tuple[float, float]:
    """Two-mode range ``[0, 3n/((n+1)(n+2))]`` of the traceless tangent invariant."""
    if n < 1:
        raise ValueError("photon number must be at least 1")
    return 0.0, itprime_max(n)


def sphere_radius(n: int) -> float:
    """Radius of the two-mode traceless-tangent sphere."""
    return float(np.sqrt(itprime_range(n)[1]))


def min_tomography_settings(n: int, m: int) -> int:
    """Lower bound ``C(n+m, n) - C(n+m-2, m)`` on LON settings for state tomography."""
    if n < 1 or m < 1:
        raise ValueError("need n >= 1 and m >= 1")
    return comb(n + m, n) - comb(n + m - 2, m)
