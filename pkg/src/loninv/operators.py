"""Orthonormal Hermitian frames for the n-photon m-mode Fock space.

The frame ``H_0 ... H_{M^2-1}`` splits into the photon-number element
``H_0 = I/sqrt(M)``, the traceless tangent part (Jordan-Schwinger images of
the mode Gell-Mann matrices) and a Gram-Schmidt completion spanning the
perpendicular complement.

Ordering of the mode basis ``h_0 ... h_{m^2-1}`` is ``I/sqrt(m)``, then the
diagonal family ``l = 1 ... m-1``, then for each pair ``j < k`` (lexicographic)
the symmetric element followed by the antisymmetric one. With this order the
two-mode tangent elements come out as ``(I, Z, X, Y)``-type operators.
"""

from __future__ import annotations

import functools
import hashlib
import json
import os
from dataclasses import dataclass
from math import comb
from pathlib import Path

import numpy as np

from .errors import DimensionMismatchError, FrameConstructionError, NotHermitianError, ResourceLimitError
from .fock import FockBasis, enumerate_fock_basis

ORDERING_VERSION = 1
DEFAULT_FRAME_MAX_DIM = 64
GS_DISCARD_TOL = 1e-8
FRAME_CACHE_ENV = "LONINV_FRAME_CACHE"


@dataclass(frozen=True)
class ModeHermitianBasis:
    """``m^2`` orthonormal Hermitian ``m x m`` matrices with labels."""

    m: int
    elements: np.ndarray  # (m^2, m, m)
    labels: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.elements)

    def __getitem__(self, i):
        return self.elements[i]

    def __iter__(self):
        return iter(self.elements)


def _diag_element(l: int, m: int) -> np.ndarray:
    d = np.zeros(m)
    d[:l] = 1.0
    d[l] = -l
    return np.diag(d / np.sqrt(l * (l + 1))).astype(complex)


def _pair_elements(j: int, k: int, m: int) -> tuple[np.ndarray, np.ndarray]:
    sym = np.zeros((m, m), dtype=complex)
    sym[j, k] = sym[k, j] = 1 / np.sqrt(2)
    anti = np.zeros((m, m), dtype=complex)
    anti[j, k] = -1j / np.sqrt(2)
    anti[k, j] = 1j / np.sqrt(2)
    return sym, anti


@functools.lru_cache(maxsize=None)
def _ggm_cached(m: int) -> ModeHermitianBasis:
    elements = [np.eye(m, dtype=complex) / np.sqrt(m)]
    labels = ["id"]
    for l in range(1, m):
        elements.append(_diag_element(l, m))
        labels.append(f"diag{l}")
    for j in range(m):
        for k in range(j + 1, m):
            sym, anti = _pair_elements(j, k, m)
            elements += [sym, anti]
            labels += [f"sym{j + 1}{k + 1}", f"anti{j + 1}{k + 1}"]
    arr = np.array(elements)
    arr.setflags(write=False)
    return ModeHermitianBasis(m=m, elements=arr, labels=tuple(labels))


def ggm_basis(m: int) -> ModeHermitianBasis:
    """Normalized identity plus generalized Gell-Mann matrices, ``tr(h_i h_j) = delta_ij``."""
    if m < 1:
        raise ValueError("mode count must be at least 1")
    return _ggm_cached(int(m))


def _check_hermitian(h: np.ndarray, atol: float = 1e-10) -> None:
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise NotHermitianError(f"expected a square matrix, got shape {h.shape}")
    err = np.abs(h - h.conj().T).max() if h.size else 0.0
    if err > atol:
        raise NotHermitianError(f"matrix is not Hermitian: max|h - h^dag| = {err:.2e}")


def js_map(h, n: int | None = None, basis: FockBasis | None = None) -> np.ndarray:
    """Matrix of ``sum_{k,l} h_kl a_k^dag a_l`` in the ``n``-photon Fock basis.

    Entries are computed from the ladder rule
    ``a_k^dag a_l |..n_l..n_k..> = sqrt(n_l) sqrt(n_k + 1 - delta_kl) |..n_l-1..n_k+1..>``.
    """
    h = np.asarray(h, dtype=complex)
    _check_hermitian(h)
    m = h.shape[0]
    if basis is None:
        if n is None:
            raise ValueError("need either n or a Fock basis")
        basis = enumerate_fock_basis(n, m)
    if basis.m != m:
        raise DimensionMismatchError(f"h is {m}x{m} but basis has {basis.m} modes")

    dim = basis.dim
    O = np.zeros((dim, dim), dtype=complex)
    for col, state in enumerate(basis.states):
        occ = list(state.occupations)
        for l in range(m):
            if occ[l] == 0:
                continue
            amp_l = np.sqrt(occ[l])
            occ[l] -= 1
            for k in range(m):
                if h[k, l] == 0:
                    continue
                amp = amp_l * np.sqrt(occ[k] + 1)
                occ[k] += 1
                O[basis.index(occ), col] += h[k, l] * amp
                occ[k] -= 1
            occ[l] += 1
    return O


def tangent_normalizations(n: int, m: int) -> tuple[float, float]:
    """``(tr(O_0^2), tr(O_i^2))`` for the Jordan-Schwinger images of the mode basis."""
    M = comb(m + n - 1, n)
    return n * n * M / m, float(comb(m + n, m + 1))


def tangent_observables(n: int, m: int, basis: FockBasis | None = None) -> np.ndarray:
    """Unnormalized JS images ``O_0 ... O_{m^2-1}`` of :func:`ggm_basis`, stacked."""
    if basis is None:
        basis = enumerate_fock_basis(n, m)
    return np.array([js_map(h, basis=basis) for h in ggm_basis(m)])


def tangent_basis(n: int, m: int, basis: FockBasis | None = None) -> list[np.ndarray]:
    """Normalized tangent elements ``H_0 ... H_{m^2-1}``."""
    if n < 1:
        raise ValueError("tangent frame needs at least one photon")
    obs = tangent_observables(n, m, basis)
    norm0, norm = tangent_normalizations(n, m)
    return [obs[0] / np.sqrt(norm0)] + [o / np.sqrt(norm) for o in obs[1:]]


# Real isometric coordinates of Hermitian matrices: diagonal entries, then
# sqrt(2) Re and sqrt(2) Im of the strict upper triangle. Frobenius inner
# products of Hermitian matrices become Euclidean dot products.

def hermitian_to_real(X: np.ndarray) -> np.ndarray:
    X = np.asarray(X)
    dim = X.shape[-1]
    iu = np.triu_indices(dim, 1)
    diag = np.real(np.diagonal(X, axis1=-2, axis2=-1))
    upper = X[..., iu[0], iu[1]]
    return np.concatenate([diag, np.sqrt(2) * upper.real, np.sqrt(2) * upper.imag], axis=-1)


def real_to_hermitian(v: np.ndarray, dim: int) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    iu = np.triu_indices(dim, 1)
    npair = len(iu[0])
    out = np.zeros(v.shape[:-1] + (dim, dim), dtype=complex)
    out[..., np.arange(dim), np.arange(dim)] = v[..., :dim]
    upper = (v[..., dim:dim + npair] + 1j * v[..., dim + npair:]) / np.sqrt(2)
    out[..., iu[0], iu[1]] = upper
    out[..., iu[1], iu[0]] = upper.conj()
    return out


def perpendicular_basis(n: int, m: int, tangent) -> list[np.ndarray]:
    """Gram-Schmidt completion of ``tangent`` to an orthonormal frame of H(M).

    Candidates are the ``M^2`` elements of the generalized Gell-Mann basis of
    H(M) in canonical order; each is orthogonalized (twice, for stability)
    against the tangent set and the accepted vectors, and kept only if the
    residual norm exceeds ``1e-8``.
    """
    tangent = np.asarray(tangent)
    dim = tangent.shape[-1]
    if dim != comb(m + n - 1, n):
        raise DimensionMismatchError("tangent elements do not match the (n, m) Fock dimension")
    T = hermitian_to_real(tangent)
    gram = T @ T.T
    if np.abs(gram - np.eye(len(T))).max() > 1e-9:
        raise FrameConstructionError("tangent set is not orthonormal")

    expected = dim * dim - m * m
    candidates = hermitian_to_real(ggm_basis(dim).elements)
    accepted = np.zeros((dim * dim, dim * dim))
    accepted[: len(T)] = T
    count = len(T)
    for v in candidates:
        if count == dim * dim:
            break
        w = v.copy()
        for _ in range(2):
            w -= accepted[:count].T @ (accepted[:count] @ w)
        norm = np.linalg.norm(w)
        if norm > GS_DISCARD_TOL:
            accepted[count] = w / norm
            count += 1
    perp = accepted[len(T):count]
    if len(perp) != expected:
        raise FrameConstructionError(
            f"perpendicular completion has rank {len(perp)}, expected {expected}")
    return list(real_to_hermitian(perp, dim))


@dataclass(frozen=True)
class HermitianFrame:
    """Complete orthonormal Hermitian frame of the ``n``-photon ``m``-mode space.

    Attributes:
        elements: ``(M^2, M, M)`` array ``H_0 ... H_{M^2-1}``.
        raw_observables: ``(m^2, M, M)`` unnormalized JS images ``O_i``.
    """

    n: int
    m: int
    basis: FockBasis
    elements: np.ndarray
    raw_observables: np.ndarray

    @property
    def dim(self) -> int:
        return self.basis.dim

    @property
    def size(self) -> int:
        return len(self.elements)

    @property
    def photon_number_index(self) -> slice:
        return slice(0, 1)

    @property
    def traceless_tangent(self) -> slice:
        return slice(1, self.m * self.m)

    @property
    def tangent(self) -> slice:
        return slice(0, self.m * self.m)

    @property
    def perpendicular(self) -> slice:
        return slice(self.m * self.m, self.size)

    @property
    def partition(self) -> tuple[int, int, int]:
        """Sizes of (photon-number, traceless tangent, perpendicular) blocks."""
        mm = self.m * self.m
        return 1, mm - 1, self.size - mm

    def class_labels(self) -> np.ndarray:
        """0 / 1 / 2 per element for photon-number / traceless tangent / perpendicular."""
        labels = np.full(self.size, 2, dtype=int)
        labels[0] = 0
        labels[self.traceless_tangent] = 1
        return labels

    def coefficients(self, X) -> np.ndarray:
        """Real coefficients ``tr(H_i X)`` of a Hermitian matrix."""
        X = np.asarray(X, dtype=complex)
        return np.real(self.elements.reshape(self.size, -1).conj() @ X.reshape(-1))

    def reconstruct(self, coeffs) -> np.ndarray:
        return np.tensordot(np.asarray(coeffs, dtype=float), self.elements, axes=1)

    def validate(self, atol: float = 1e-10) -> None:
        R = hermitian_to_real(self.elements)
        herm_err = np.abs(self.elements - np.conj(np.swapaxes(self.elements, -1, -2))).max()
        if herm_err > atol:
            raise FrameConstructionError(f"frame element not Hermitian ({herm_err:.2e})")
        gram_err = np.abs(R @ R.T - np.eye(self.size)).max()
        if gram_err > atol:
            raise FrameConstructionError(f"frame not orthonormal ({gram_err:.2e})")
        traces = np.abs(np.trace(self.elements[1:], axis1=1, axis2=2)) if self.size > 1 else np.zeros(0)
        if traces.size and traces.max() > atol:
            raise FrameConstructionError(f"non-identity element has trace {traces.max():.2e}")
        norm0, norm = tangent_normalizations(self.n, self.m)
        obs = self.raw_observables
        if abs(np.trace(obs[0] @ obs[0]).real - norm0) > 1e-8 * norm0:
            raise FrameConstructionError("tr(O_0^2) violates the photon-number normalization")
        if len(obs) > 1:
            flat = hermitian_to_real(obs[1:])
            if np.abs(flat @ flat.T - norm * np.eye(len(flat))).max() > 1e-8 * norm:
                raise FrameConstructionError("tr(O_i O_j) violates the tangent normalization")


def frame_key(n: int, m: int) -> str:
    """Content hash naming the cached frame for ``(n, m)``."""
    payload = json.dumps({"n": n, "m": m, "ordering_version": ORDERING_VERSION}, sort_keys=True)
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


def _construct_frame(n: int, m: int, max_dim: int) -> HermitianFrame:
    if n < 1:
        raise ValueError("frame needs at least one photon")
    fock = enumerate_fock_basis(n, m)
    if fock.dim > max_dim:
        raise ResourceLimitError(f"frame for M={fock.dim} exceeds cap {max_dim} (memory grows as M^4)")
    obs = tangent_observables(n, m, fock)
    norm0, norm = tangent_normalizations(n, m)
    tangent = [obs[0] / np.sqrt(norm0)] + [o / np.sqrt(norm) for o in obs[1:]]
    perp = perpendicular_basis(n, m, tangent)
    elements = np.array(tangent + perp)
    elements.setflags(write=False)
    obs.setflags(write=False)
    frame = HermitianFrame(n=n, m=m, basis=fock, elements=elements, raw_observables=obs)
    frame.validate()
    return frame


@functools.lru_cache(maxsize=32)
def _build_frame_memo(n: int, m: int, max_dim: int) -> HermitianFrame:
    return _construct_frame(n, m, max_dim)


def build_frame(n: int, m: int, max_dim: int = DEFAULT_FRAME_MAX_DIM,
                cache_dir: str | os.PathLike | None = None) -> HermitianFrame:
    """Build (or load) the validated frame for ``(n, m)``.

    With ``cache_dir`` (or the ``LONINV_FRAME_CACHE`` environment variable)
    set, frames are read from and written to ``frame-<hash>.json`` there.
    """
    cache_dir = cache_dir or os.environ.get(FRAME_CACHE_ENV)
    if cache_dir:
        path = Path(cache_dir) / f"frame-{frame_key(n, m)}.json"
        if path.exists():
            frame = load_frame(path)
            frame.validate()
            return frame
        frame = _build_frame_memo(n, m, max_dim)
        path.parent.mkdir(parents=True, exist_ok=True)
        save_frame(frame, path)
        return frame
    return _build_frame_memo(n, m, max_dim)


def frame_to_dict(frame: HermitianFrame) -> dict:
    from .serialization import complex_matrix_to_json

    return {
        "kind": "hermitian-frame",
        "n": frame.n,
        "m": frame.m,
        "ordering_version": ORDERING_VERSION,
        "key": frame_key(frame.n, frame.m),
        "partition": {
            "photon_number": [0, 1],
            "traceless_tangent": [1, frame.m ** 2],
            "perpendicular": [frame.m ** 2, frame.size],
        },
        "elements": [complex_matrix_to_json(H) for H in frame.elements],
        "raw_observables": [complex_matrix_to_json(O) for O in frame.raw_observables],
    }


def frame_from_dict(data: dict) -> HermitianFrame:
    from .serialization import complex_matrix_from_json

    if data.get("kind") != "hermitian-frame":
        raise ValueError("not a serialized Hermitian frame")
    if data.get("ordering_version") != ORDERING_VERSION:
        raise ValueError(f"frame ordering version {data.get('ordering_version')} is not supported")
    n, m = int(data["n"]), int(data["m"])
    fock = enumerate_fock_basis(n, m)
    elements = np.array([complex_matrix_from_json(e) for e in data["elements"]])
    obs = np.array([complex_matrix_from_json(e) for e in data["raw_observables"]])
    if elements.shape != (fock.dim ** 2, fock.dim, fock.dim):
        raise DimensionMismatchError("serialized frame has the wrong shape")
    elements.setflags(write=False)
    obs.setflags(write=False)
    return HermitianFrame(n=n, m=m, basis=fock, elements=elements, raw_observables=obs)


def save_frame(frame: HermitianFrame, path) -> None:
    Path(path).write_text(json.dumps(frame_to_dict(frame)))


def load_frame(path) -> HermitianFrame:
    return frame_from_dict(json.loads(Path(path).read_text()))
