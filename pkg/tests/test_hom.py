import numpy as np
import pytest

from loninv.errors import ConvergenceError
from loninv.experiment.hom import DipModel, fit_hom_dip, hom_dip


def test_model_values():
    p = DipModel(a=1.0, b=0.9, sigma=0.5, x0=2.0, k=1.3)
    assert hom_dip(2.0, p) == pytest.approx(0.1)
    assert p.visibility == pytest.approx(0.9)
    x = 2.0 + 0.7
    expected = 1.0 - 0.9 * np.exp(-(0.5 * 0.7) ** 2 / 2) * np.sin(1.3 * 0.7) / (1.3 * 0.7)
    assert hom_dip(x, p) == pytest.approx(expected)
    # far wings return to the baseline
    assert hom_dip(200.0, p) == pytest.approx(1.0, abs=1e-6)


@pytest.mark.parametrize("truth", [
    DipModel(a=1000.0, b=900.0, sigma=0.08, x0=-3.0, k=0.05),
    DipModel(a=1.0, b=0.5, sigma=1.2, x0=0.4, k=0.8),
])
def test_fit_recovers_noiseless_parameters(truth):
    x = np.linspace(truth.x0 - 6 / truth.sigma, truth.x0 + 6 / truth.sigma, 121)
    fit = fit_hom_dip(x, hom_dip(x, truth))
    assert fit.visibility == pytest.approx(truth.visibility, rel=1e-6)
    assert fit.x0 == pytest.approx(truth.x0, abs=1e-6 / truth.sigma)
    assert fit.residual < 1e-8 * truth.a


def test_fit_with_poisson_noise():
    truth = DipModel(a=2000.0, b=1800.0, sigma=0.1, x0=1.5, k=0.02)
    rng = np.random.default_rng(0)
    x = np.linspace(-40, 40, 161)
    y = rng.poisson(hom_dip(x, truth)).astype(float)
    fit = fit_hom_dip(x, y)
    assert fit.visibility == pytest.approx(0.9, abs=0.02)
    assert fit.x0 == pytest.approx(1.5, abs=0.5)


def test_fit_needs_enough_samples():
    with pytest.raises(ValueError):
        fit_hom_dip([0, 1, 2], [1, 0.5, 1])


def test_fit_residual_guard():
    rng = np.random.default_rng(1)
    x = np.linspace(-5, 5, 41)
    y = 1 - 0.8 * np.exp(-x ** 2) + rng.normal(0, 0.05, x.size)
    with pytest.raises(ConvergenceError):
        fit_hom_dip(x, y, max_residual=1e-6)
