"""Phenomenological HOM dip: a Gaussian envelope times a sinc.

    p_coin(x) = a - b exp(-sigma^2 (x - x0)^2 / 2) sinc(k (x - x0))

with the unnormalized ``sinc(u) = sin(u)/u``. Visibility is ``b / a``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import curve_fit

from ..errors import ConvergenceError

MIN_SAMPLES = 6


@dataclass(frozen=True)
class DipModel:
    a: float
    b: float
    sigma: float
    x0: float
    k: float
    residual: float = 0.0

    @property
    def visibility(self) -> float:
        return self.b / self.a

    def as_dict(self) -> dict:
        return {"a": self.a, "b": self.b, "sigma": self.sigma, "x0": self.x0, "k": self.k,
                "visibility": self.visibility, "residual": self.residual}


def _model(x, a, b, sigma, x0, k):
    u = np.asarray(x, dtype=float) - x0
    return a - b * np.exp(-(sigma * u) ** 2 / 2) * np.sinc(k * u / np.pi)


def hom_dip(x, params: DipModel):
    """Coincidence probability at delay ``x``."""
    return _model(x, params.a, params.b, params.sigma, params.x0, params.k)


def fit_hom_dip(x, y, max_residual: float | None = None) -> DipModel:
    """Nonlinear least-squares fit seeded from the sample extremes.

    Raises:
        ValueError: fewer than six samples.
        ConvergenceError: the optimizer fails or the RMS residual exceeds
            ``max_residual``.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(x) < MIN_SAMPLES or len(x) != len(y):
        raise ValueError(f"need at least {MIN_SAMPLES} paired samples")

    order = np.argsort(x)
    x, y = x[order], y[order]
    a0 = float(np.median(np.concatenate([y[:max(1, len(y) // 10)], y[-max(1, len(y) // 10):]])))
    i_min = int(np.argmin(y))
    b0 = max(a0 - float(y[i_min]), 1e-6)
    x00 = float(x[i_min])
    below = x[y < a0 - b0 / 2]
    fwhm = float(below.max() - below.min()) if len(below) > 1 else float(np.ptp(x)) / 10
    fwhm = max(fwhm, float(np.min(np.diff(x))) if len(x) > 1 else 1.0)
    sigma0 = 2 * np.sqrt(2 * np.log(2)) / fwhm

    best = None
    for k_scale in (0.5, 1.0, 0.1, 2.0):
        p0 = [a0, b0, sigma0, x00, k_scale * sigma0]
        try:
            popt, _ = curve_fit(_model, x, y, p0=p0, maxfev=20000)
        except RuntimeError:
            continue
        rms = float(np.sqrt(np.mean((_model(x, *popt) - y) ** 2)))
        if best is None or rms < best[1]:
            best = (popt, rms)
    if best is None:
        raise ConvergenceError("HOM dip fit did not converge", float("inf"))
    popt, rms = best
    if max_residual is not None and rms > max_residual:
        raise ConvergenceError("HOM dip fit residual too large", rms)
    a, b, sigma, x0, k = (float(v) for v in popt)
    return DipModel(a=a, b=b, sigma=abs(sigma), x0=x0, k=abs(k), residual=rms)
