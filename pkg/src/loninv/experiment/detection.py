"""Measurement settings, POVMs and simulated coincidence counts.

Each setting is a QWP-HWP pair in front of a polarizing beam displacer and
two pseudo photon-number-resolving detectors (a fiber splitter feeding two
APDs each). APDs 1, 2 watch the H output and 3, 4 the V output, so a
coincidence ``{1,2}`` heralds ``|2_H,0_V>``, ``{3,4}`` heralds ``|0_H,2_V>`` and
the four mixed pairs herald ``|1_H,1_V>``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..fock import enumerate_fock_basis, photonic_homomorphism
from ..optics import qh_unitary

DETECTOR_MODELS = ("ideal", "splitting")
APD_PAIRS = ((1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4))
CLASS_LABELS = ("2H0V", "1H1V", "0H2V")
PAIR_CLASS = (0, 1, 1, 1, 1, 2)

# (QWP, HWP) angles in degrees.
TOMOGRAPHY_ANGLES_DEG = ((0.0, 0.0), (0.0, 11.25), (0.0, 22.5), (22.5, 0.0), (22.5, 22.5), (45.0, 22.5))


@dataclass(frozen=True)
class MeasurementSetting:
    qwp_angle: float
    hwp_angle: float
    unitary: np.ndarray  # two-photon V_QH
    povm: np.ndarray  # (3, 3, 3): E_1, E_2, E_3

    def probabilities(self, rho) -> np.ndarray:
        return np.real(np.einsum("kij,ji->k", self.povm, np.asarray(rho)))


def measurement_setting(qwp_angle: float, hwp_angle: float) -> MeasurementSetting:
    """POVM ``E_i = V^dag P_i V`` for the Fock projectors behind a QH stage (angles in radians)."""
    basis = enumerate_fock_basis(2, 2)
    V = photonic_homomorphism(qh_unitary(qwp_angle, hwp_angle), 2, basis=basis).matrix
    povm = np.array([np.outer(V[i].conj(), V[i]) for i in range(basis.dim)])
    povm.setflags(write=False)
    return MeasurementSetting(qwp_angle, hwp_angle, V, povm)


def tomography_settings() -> list[MeasurementSetting]:
    return [measurement_setting(np.deg2rad(q), np.deg2rad(h)) for q, h in TOMOGRAPHY_ANGLES_DEG]


def povm_matrix(settings) -> np.ndarray:
    """Rows are the flattened POVM elements of all settings."""
    return np.concatenate([s.povm.reshape(len(s.povm), -1) for s in settings])


def povm_rank(settings, tol: float = 1e-8) -> int:
    return int(np.linalg.matrix_rank(povm_matrix(settings), tol=tol))


@dataclass
class CountRecord:
    """Per-setting outcome statistics.

    ``counts`` holds coincidence-class counts ``(settings, 3)``;
    ``pair_counts`` the raw APD-pair coincidences ``(settings, 6)`` in the
    order of ``APD_PAIRS``. In exact mode ``shots`` is ``None`` and
    ``probabilities`` carries the exact class probabilities instead.
    """

    model: str
    shots: int | None
    counts: np.ndarray | None = None
    pair_counts: np.ndarray | None = None
    probabilities: np.ndarray | None = None
    settings_deg: list = field(default_factory=lambda: [list(a) for a in TOMOGRAPHY_ANGLES_DEG])

    @property
    def exact(self) -> bool:
        return self.shots is None

    def to_dict(self) -> dict:
        out = {"kind": "count-record", "model": self.model, "shots": self.shots,
               "settings_deg": [[float(a) for a in s] for s in self.settings_deg],
               "apd_pairs": [list(p) for p in APD_PAIRS], "classes": list(CLASS_LABELS)}
        if self.counts is not None:
            out["counts"] = self.counts.astype(int).tolist()
        if self.pair_counts is not None:
            out["pair_counts"] = self.pair_counts.astype(int).tolist()
        if self.probabilities is not None:
            out["probabilities"] = [[float(p) for p in row] for row in self.probabilities]
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "CountRecord":
        if data.get("kind") != "count-record":
            raise ValueError("not a serialized count record")
        if data["model"] not in DETECTOR_MODELS:
            raise ValueError(f"unknown detector model {data['model']!r}")

        def arr(key, dtype):
            return np.asarray(data[key], dtype=dtype) if key in data else None

        return cls(model=data["model"], shots=data["shots"], counts=arr("counts", np.int64),
                   pair_counts=arr("pair_counts", np.int64), probabilities=arr("probabilities", float),
                   settings_deg=data.get("settings_deg", [list(a) for a in TOMOGRAPHY_ANGLES_DEG]))


def exact_probabilities(rho, settings) -> np.ndarray:
    return np.array([s.probabilities(rho) for s in settings])


def _pair_probabilities(class_probs: np.ndarray) -> np.ndarray:
    # Two photons in one detector reach different APDs with probability 1/2;
    # one photon per detector gives each mixed pair probability 1/4.
    p20, p11, p02 = class_probs
    return np.array([p20 / 2, p11 / 4, p11 / 4, p11 / 4, p11 / 4, p02 / 2])


def simulate_counts(rho, settings, shots: int | None, rng: np.random.Generator | None = None,
                    model: str = "ideal") -> CountRecord:
    """Draw coincidence counts for every setting.

    ``shots=None`` returns exact probabilities. In the ``splitting`` model a
    doubly occupied detector registers a coincidence only half the time and
    the remaining shots are lost.
    """
    if model not in DETECTOR_MODELS:
        raise ValueError(f"unknown detector model {model!r}; choose from {DETECTOR_MODELS}")
    probs = exact_probabilities(rho, settings)
    probs = np.clip(probs, 0.0, None)
    probs = probs / probs.sum(axis=1, keepdims=True)
    settings_deg = [[float(np.rad2deg(s.qwp_angle)), float(np.rad2deg(s.hwp_angle))] for s in settings]
    if shots is None:
        return CountRecord(model=model, shots=None, probabilities=probs, settings_deg=settings_deg)
    if shots < 1:
        raise ValueError("shots must be at least 1")
    if rng is None:
        raise ValueError("a seeded random generator is required for finite shots")

    counts = np.zeros((len(settings), 3), dtype=np.int64)
    pairs = np.zeros((len(settings), len(APD_PAIRS)), dtype=np.int64)
    for k, p in enumerate(probs):
        if model == "ideal":
            counts[k] = rng.multinomial(shots, p)
            continue
        pp = _pair_probabilities(p)
        draw = rng.multinomial(shots, np.append(pp, max(0.0, 1.0 - pp.sum())))
        pairs[k] = draw[:-1]
        for j, cls in enumerate(PAIR_CLASS):
            counts[k, cls] += pairs[k, j]
    return CountRecord(model=model, shots=int(shots), counts=counts,
                       pair_counts=pairs if model == "splitting" else None, settings_deg=settings_deg)


def estimated_probabilities(record: CountRecord) -> np.ndarray:
    """Class probabilities per setting, with the factor-2 correction for the splitting model."""
    if record.exact:
        return np.asarray(record.probabilities, dtype=float)
    counts = np.asarray(record.counts, dtype=float)
    if record.model == "splitting":
        counts = counts * np.array([2.0, 1.0, 2.0])
    totals = counts.sum(axis=1, keepdims=True)
    if np.any(totals == 0):
        raise ValueError("a setting recorded no coincidences")
    return counts / totals
