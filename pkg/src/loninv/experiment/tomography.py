"""Least-squares state reconstruction and Uhlmann fidelity."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import least_squares

from ..errors import NonPhysicalStateError, ReconstructionError
from ..operators import build_frame, ggm_basis
from ..transfer import DensityState, density_vector
from .detection import CountRecord, estimated_probabilities, povm_matrix

PSD_ATOL = 1e-9
RANK_RTOL = 1e-13


@dataclass(frozen=True)
class TomographyResult:
    rho_hat: DensityState
    residual: float
    fidelity_vs: float | None = None
    method: str = "linear"

    def to_dict(self) -> dict:
        from ..serialization import complex_matrix_to_json

        return {"kind": "tomography-result", "method": self.method, "residual": self.residual,
                "fidelity_vs": self.fidelity_vs, "rho_hat": complex_matrix_to_json(self.rho_hat.rho)}


def _objective(rho: np.ndarray, A: np.ndarray, p: np.ndarray) -> float:
    pred = np.real(A @ rho.T.reshape(-1))
    return float(np.sum((pred - p) ** 2))


def _project_to_density(rho: np.ndarray) -> np.ndarray:
    rho = (rho + rho.conj().T) / 2
    w, v = np.linalg.eigh(rho)
    w = np.clip(w, 0.0, None)
    return (v * (w / w.sum())) @ v.conj().T


def _cholesky_refine(rho0: np.ndarray, A: np.ndarray, p: np.ndarray) -> np.ndarray:
    dim = rho0.shape[0]
    il = np.tril_indices(dim)
    off = il[0] != il[1]
    w, v = np.linalg.eigh(rho0)
    L0 = np.linalg.cholesky((v * np.clip(w, 1e-6, None)) @ v.conj().T)

    def unpack(x):
        T = np.zeros((dim, dim), dtype=complex)
        k = len(il[0])
        T[il] = x[:k]
        T[il[0][off], il[1][off]] += 1j * x[k:]
        rho = T @ T.conj().T
        return rho / np.trace(rho).real

    def resid(x):
        return np.real(A @ unpack(x).T.reshape(-1)) - p

    x0 = np.concatenate([L0[il].real, L0[il[0][off], il[1][off]].imag])
    sol = least_squares(resid, x0, xtol=1e-14, ftol=1e-14, gtol=1e-14)
    return unpack(sol.x)


def reconstruct_ls(data, settings, method: str = "linear", reference=None) -> TomographyResult:
    """Reconstruct a two-photon state from per-setting class probabilities.

    Args:
        data: a :class:`CountRecord` or an array ``(settings, 3)`` of probabilities.
        settings: the measurement settings that produced ``data``.
        method: ``"linear"`` (unit-trace linear least squares, then eigenvalue
            clipping and renormalization) or ``"cholesky"`` (positive
            parameterization refined from the linear estimate).
        reference: optional true density matrix for the fidelity field.

    Raises:
        ReconstructionError: if the POVM stack does not span the full
            operator space.
    """
    p = estimated_probabilities(data) if isinstance(data, CountRecord) else np.asarray(data, dtype=float)
    p = p.reshape(-1)
    A = povm_matrix(settings)  # rows: flattened E_i, so tr(rho E_i) = A_i . vec(rho^T)
    if len(p) != len(A):
        raise ValueError(f"{len(p)} probabilities for {len(A)} POVM elements")
    dim = int(round(np.sqrt(A.shape[1])))
    if dim != 3:
        raise ValueError("reconstruction is implemented for two photons in two modes")
    if np.linalg.matrix_rank(A, tol=1e-8) < dim * dim:
        raise ReconstructionError(
            f"POVM design has rank {np.linalg.matrix_rank(A, tol=1e-8)} < {dim * dim}; state not identifiable")

    # rho = I/dim + sum_k x_k G_k over traceless generalized Gell-Mann matrices
    G = ggm_basis(dim).elements[1:]
    design = np.real(np.einsum("rij,kji->rk", A.reshape(-1, dim, dim), G))
    offset = np.real(np.trace(A.reshape(-1, dim, dim), axis1=1, axis2=2)) / dim
    x, *_ = np.linalg.lstsq(design, p - offset, rcond=None)
    rho_lin = np.eye(dim) / dim + np.tensordot(x, G, axes=1)
    rho = _project_to_density(rho_lin)
    if method == "cholesky":
        rho = _cholesky_refine(rho, A, p)
    elif method != "linear":
        raise ValueError(f"unknown reconstruction method {method!r}")

    state = density_vector(rho, build_frame(2, 2), lenient=True)
    fid = fidelity(reference, state.rho) if reference is not None else None
    return TomographyResult(rho_hat=state, residual=_objective(state.rho, A, p), fidelity_vs=fid, method=method)


def _psd_factor(rho: np.ndarray) -> np.ndarray:
    """``B`` with ``rho = B B^dag``, dropping numerically null directions."""
    w, v = np.linalg.eigh(rho)
    if w.min() < -PSD_ATOL:
        raise NonPhysicalStateError(f"matrix has negative eigenvalue {w.min():.2e}")
    keep = w > RANK_RTOL * max(w.max(), 0.0)
    return v[:, keep] * np.sqrt(w[keep])


def fidelity(rho, sigma) -> float:
    """Uhlmann fidelity ``(tr sqrt(sqrt(rho) sigma sqrt(rho)))^2``.

    Evaluated as the squared trace norm of ``B_rho^dag B_sigma`` on the
    supports of the two states, so rank-deficient (pure) inputs do not pick
    up square roots of round-off eigenvalues.
    """
    rho = np.asarray(getattr(rho, "rho", rho), dtype=complex)
    sigma = np.asarray(getattr(sigma, "rho", sigma), dtype=complex)
    rho = (rho + rho.conj().T) / 2
    sigma = (sigma + sigma.conj().T) / 2
    overlap = _psd_factor(rho).conj().T @ _psd_factor(sigma)
    f = float(np.sum(np.linalg.svd(overlap, compute_uv=False)) ** 2)
    return min(max(f, 0.0), 1.0)
