"""Jones calculus for wave plates and Haar-random two-mode unitaries.

Wave-plate convention: a plate with fast axis at angle ``theta`` is
``R(theta) D R(-theta)`` with ``R`` the real rotation matrix and
``D = diag(1, -i)`` for a quarter-wave plate, ``diag(1, -1)`` for a half-wave
plate. This retardance sign is the one under which
``Q(45) H(beta) Q(45) = diag(e^{2i beta}, -e^{-2i beta})`` holds up to a
global phase.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy.optimize import least_squares, minimize_scalar

from .errors import ConvergenceError
from .fock import check_unitary

QUARTER_RETARDANCE = -1j  # pinned global convention, see module docstring


@dataclass(frozen=True)
class WavePlate:
    kind: Literal["quarter", "half"]
    angle: float  # radians

    def __post_init__(self):
        if self.kind not in ("quarter", "half"):
            raise ValueError(f"unknown wave plate kind {self.kind!r}")


def rotation(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]], dtype=complex)


def jones(plate: WavePlate) -> np.ndarray:
    """Jones matrix of a wave plate."""
    d = np.diag([1.0, QUARTER_RETARDANCE if plate.kind == "quarter" else -1.0])
    return rotation(plate.angle) @ d @ rotation(-plate.angle)


def quarter_wave(theta: float) -> np.ndarray:
    return jones(WavePlate("quarter", theta))


def half_wave(theta: float) -> np.ndarray:
    return jones(WavePlate("half", theta))


def qhq_unitary(theta1: float, theta2: float, theta3: float) -> np.ndarray:
    """``Q(theta3) H(theta2) Q(theta1)``; light meets ``Q(theta1)`` first."""
    return quarter_wave(theta3) @ half_wave(theta2) @ quarter_wave(theta1)


def qh_unitary(qwp: float, hwp: float) -> np.ndarray:
    """Measurement-stage ``H(hwp) Q(qwp)``."""
    return half_wave(hwp) @ quarter_wave(qwp)


def _aligned_phase(A: np.ndarray, B: np.ndarray) -> float:
    overlap = np.vdot(A, B)
    return float(np.angle(overlap)) if abs(overlap) > 0 else 0.0


def phase_distance(A, B) -> float:
    """``min_phi max_ij |e^{i phi} A_ij - B_ij|``.

    Zero exactly when the two matrices differ by a global phase.
    """
    A = np.asarray(A, dtype=complex)
    B = np.asarray(B, dtype=complex)

    def cost(phi):
        return np.abs(np.exp(1j * phi) * A - B).max()

    grid = np.linspace(0, 2 * np.pi, 73)[:-1]
    candidates = list(grid) + [_aligned_phase(A, B)]
    best = min(candidates, key=cost)
    step = grid[1] - grid[0]
    res = minimize_scalar(cost, bounds=(best - step, best + step), method="bounded",
                          options={"xatol": 1e-14})
    return float(min(cost(best), res.fun))


@dataclass(frozen=True)
class HaarU2Params:
    psi: float
    chi: float
    xi: float
    alpha: float = 0.0

    @property
    def phi(self) -> float:
        return float(np.arcsin(np.sqrt(self.xi)))


def haar_u2_matrix(params: HaarU2Params, include_global_phase: bool = True) -> np.ndarray:
    """``e^{i alpha} [[e^{i psi} cos phi, e^{i chi} sin phi], [-e^{-i chi} sin phi, e^{-i psi} cos phi]]``."""
    c, s = np.cos(params.phi), np.sin(params.phi)
    U = np.array([
        [np.exp(1j * params.psi) * c, np.exp(1j * params.chi) * s],
        [-np.exp(-1j * params.chi) * s, np.exp(-1j * params.psi) * c],
    ])
    if include_global_phase:
        U = np.exp(1j * params.alpha) * U
    return U


def sample_haar_u2(rng: np.random.Generator) -> tuple[HaarU2Params, np.ndarray]:
    """Draw a Haar-uniform U(2) element with ``psi, chi, alpha ~ U[0, 2pi]``, ``xi ~ U[0, 1]``."""
    psi, chi, alpha = rng.uniform(0, 2 * np.pi, 3)
    xi = rng.uniform(0, 1)
    params = HaarU2Params(psi=float(psi), chi=float(chi), xi=float(xi), alpha=float(alpha))
    return params, haar_u2_matrix(params)


def _qhq_batch(t1, t2, t3) -> np.ndarray:
    # vectorized qhq_unitary over broadcast angle arrays -> (..., 2, 2)
    def plate(theta, ret):
        c, s = np.cos(theta), np.sin(theta)
        out = np.empty(np.shape(theta) + (2, 2), dtype=complex)
        out[..., 0, 0] = c * c + ret * s * s
        out[..., 0, 1] = c * s * (1 - ret)
        out[..., 1, 0] = c * s * (1 - ret)
        out[..., 1, 1] = s * s + ret * c * c
        return out

    return plate(t3, QUARTER_RETARDANCE) @ plate(t2, -1.0) @ plate(t1, QUARTER_RETARDANCE)


def qhq_decompose(U, tol: float = 1e-6) -> tuple[float, float, float]:
    """Wave-plate angles ``(theta1, theta2, theta3)`` realizing ``U`` up to global phase.

    A 5-degree grid seeds a phase-aligned least-squares refinement. The
    decomposition is not unique; only the round trip is guaranteed.

    Raises:
        ConvergenceError: if the residual exceeds ``tol`` after refinement.
    """
    U = np.asarray(U, dtype=complex)
    check_unitary(U)
    # remove the determinant phase so the target lies in SU(2), like QHQ
    U_su = U / np.sqrt(np.linalg.det(U))

    grid = np.deg2rad(np.arange(0, 180, 5.0))
    g1, g2, g3 = np.meshgrid(grid, grid, grid, indexing="ij")
    mats = _qhq_batch(g1, g2, g3).reshape(-1, 4)
    overlap = np.abs(mats.conj() @ U_su.reshape(4))
    order = np.argsort(-overlap)[:8]
    seeds = np.stack([g1.ravel()[order], g2.ravel()[order], g3.ravel()[order]], axis=1)

    def residual(x):
        A = qhq_unitary(*x)
        phase = np.exp(1j * _aligned_phase(A, U))
        diff = (phase * A - U).ravel()
        return np.concatenate([diff.real, diff.imag])

    best_x, best_err = None, np.inf
    for x0 in seeds:
        sol = least_squares(residual, x0, xtol=1e-15, ftol=1e-15, gtol=1e-15)
        err = phase_distance(qhq_unitary(*sol.x), U)
        if err < best_err:
            best_x, best_err = sol.x, err
        if best_err < 1e-12:
            break
    if best_err > tol:
        raise ConvergenceError("QHQ decomposition did not converge", best_err)
    return tuple(float(np.mod(t, np.pi)) for t in best_x)


@dataclass(frozen=True)
class NamedUnitary:
    name: str
    params: HaarU2Params
    angles_deg: tuple[float, float, float] | None
    matrix: np.ndarray

    @property
    def angles(self) -> tuple[float, float, float] | None:
        if self.angles_deg is None:
            return None
        return tuple(float(a) for a in np.deg2rad(self.angles_deg))


# (psi, chi, xi, theta1, theta2, theta3 in degrees); global phase ignored.
_EXPERIMENT_TABLE = [
    ("U1", 0.5, 0.5, 1 / 3, (24.1, 17.6, 101.2)),
    ("U2", 0.5, 0.5, 2 / 3, (149.5, 27.4, 175.2)),
    ("U3", 0.5, 1.5, 1 / 3, (78.8, 162.4, 155.9)),
    ("U4", 0.5, 1.5, 2 / 3, (4.8, 152.6, 30.5)),
    ("U5", 1.5, 0.5, 1 / 3, (27.4, 72.4, 27.4)),
    ("U6", 1.5, 0.5, 2 / 3, (81.9, 62.6, 133.3)),
    ("U7", 1.5, 1.5, 1 / 3, (152.6, 107.6, 152.6)),
    ("U8", 1.5, 1.5, 2 / 3, (98.1, 117.4, 46.7)),
]


def experiment_unitaries() -> list[NamedUnitary]:
    """The eight evolution unitaries with their printed wave-plate angles (psi, chi in units of pi)."""
    out = []
    for name, psi, chi, xi, angles in _EXPERIMENT_TABLE:
        params = HaarU2Params(psi=psi * np.pi, chi=chi * np.pi, xi=xi)
        out.append(NamedUnitary(name, params, angles, haar_u2_matrix(params, include_global_phase=False)))
    return out


def haar_unitaries(count: int, seed: int) -> list[NamedUnitary]:
    """Fresh Haar samples with decomposed QHQ angles, reproducible from ``seed``."""
    rng = np.random.default_rng(seed)
    out = []
    for k in range(count):
        params, U = sample_haar_u2(rng)
        angles = tuple(float(np.rad2deg(a)) for a in qhq_decompose(U))
        out.append(NamedUnitary(f"haar{k + 1}", params, angles, U))
    return out
