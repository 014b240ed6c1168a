import numpy as np
import pytest

from loninv.experiment.detection import simulate_counts, tomography_settings
from loninv.experiment.direct import direct_measure_itprime, measurement_plan
from loninv.experiment.preparation import prepare_state_hom
from loninv.experiment.tomography import reconstruct_ls
from loninv.fock import photonic_homomorphism
from loninv.operators import build_frame, tangent_observables
from loninv.transfer import density_vector, invariants

from oracles import haar_unitary, random_density


@pytest.mark.parametrize("n,m", [(1, 2), (2, 2), (2, 3), (3, 2), (3, 3)])
def test_exact_direct_equals_frame_value(n, m):
    rng = np.random.default_rng(n * 7 + m)
    frame = build_frame(n, m)
    rho = random_density(frame.dim, rng)
    d = direct_measure_itprime(rho, n, m)
    assert d.value == pytest.approx(invariants(density_vector(rho, frame)).i_t_prime, abs=1e-12)
    assert d.stderr == 0.0
    assert d.settings == 1 + m * (m - 1)


@pytest.mark.parametrize("m", [2, 3])
def test_settings_map_observables_to_number_difference(m):
    n = 2
    frame = build_frame(n, m)
    obs = tangent_observables(n, m, frame.basis)
    rng = np.random.default_rng(m)
    rho = random_density(frame.dim, rng)
    expected = np.real(np.einsum("kij,ji->k", obs[1:], rho))
    np.testing.assert_allclose(direct_measure_itprime(rho, n, m).expectations, expected, atol=1e-12)
    assert len(measurement_plan(m)) == 1 + m * (m - 1)


def test_psi_35_value():
    prep = prepare_state_hom(np.pi / 8)
    d = direct_measure_itprime(prep.state.rho, 2, 2)
    assert d.value == pytest.approx(4 / 9, abs=1e-14)


def test_finite_shots_error_bar_is_calibrated():
    rho = prepare_state_hom(np.deg2rad(15.0)).state.rho
    exact = direct_measure_itprime(rho, 2, 2).value
    z = []
    for k in range(60):
        d = direct_measure_itprime(rho, 2, 2, shots=20_000, rng=np.random.default_rng([1, k]))
        z.append((d.value - exact) / d.stderr)
    z = np.array(z)
    assert abs(z.mean()) < 0.5
    assert 0.7 < z.std() < 1.3


def test_direct_agrees_with_tomography():
    rho = prepare_state_hom(np.deg2rad(30.0)).state.rho
    settings = tomography_settings()
    shots = 100_000
    d = direct_measure_itprime(rho, 2, 2, shots=shots, rng=np.random.default_rng(11))
    tomo = [invariants(reconstruct_ls(simulate_counts(rho, settings, shots, np.random.default_rng([12, k])),
                                      settings).rho_hat).i_t_prime for k in range(30)]
    combined = np.hypot(d.stderr, np.std(tomo))
    assert abs(d.value - np.mean(tomo)) < 3 * combined


def test_direct_rejects_bad_inputs():
    rho = np.eye(3) / 3
    with pytest.raises(ValueError):
        direct_measure_itprime(rho, 2, 2, shots=2, rng=np.random.default_rng(0))
    with pytest.raises(ValueError):
        direct_measure_itprime(rho, 2, 2, shots=100)
    with pytest.raises(ValueError):
        direct_measure_itprime(np.eye(4) / 4, 2, 2)


def test_direct_invariant_under_lon():
    rng = np.random.default_rng(3)
    rho = random_density(3, rng)
    V = photonic_homomorphism(haar_unitary(2, rng), 2).matrix
    a = direct_measure_itprime(rho, 2, 2).value
    b = direct_measure_itprime(V @ rho @ V.conj().T, 2, 2).value
    assert a == pytest.approx(b, abs=1e-12)


def test_pipeline_spread_shrinks_as_inverse_sqrt_shots():
    from loninv.cli import conservation_suite
    from loninv.optics import experiment_unitaries

    unitaries = [(u.name, u.matrix) for u in experiment_unitaries()]
    levels = [1_000, 10_000, 100_000]
    result = conservation_suite([7.5, 15.0, 22.5, 30.0, 37.5], unitaries, levels, seed=123)
    spread = {(s["method"], s["shots"]): s["spread_I_t_prime"] for s in result["summary"]}
    for method in ("tomography", "direct"):
        s = [spread[(method, n)] for n in levels]
        ratios = np.array(s[:-1]) / np.array(s[1:])
        # each tenfold increase in shots narrows the spread by about sqrt(10)
        assert np.all((ratios > np.sqrt(10) / 1.6) & (ratios < np.sqrt(10) * 1.6)), (method, ratios)
    exact = next(s for s in result["summary"] if s["method"] == "tomography" and s["shots"] is None)
    assert exact["max_deviation"] < 1e-5
