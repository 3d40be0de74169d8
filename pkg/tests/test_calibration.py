import numpy as np
import pytest

from matterwave.config import parse_config
from matterwave.errors import DomainError, InvalidParameterError
from matterwave.physics.calibration import ExperimentalSeries, FitSpec, fit, residual_ss
from matterwave.physics.core import derive_kinematics
from matterwave.physics.intensity import DecoherenceSpec, Pattern, SuperpositionSpec, intensity_double_decoherent

TRUE_A = 1e20
TRUE_C1 = 0.6
TRUE_LAMBDA = 0.5

CONFIG = """
[run]
mode = double-decoherent

[physics]
amplitude = 1e20

[geometry]
gap = 1e-06

[screen]
s_min = -4e-06
s_max = 4e-06
n_points = 401

[superposition]
c1 = 0.6

[decoherence]
lambda_t = 0.5

[numerics]
max_refinements = 0
"""


@pytest.fixture(scope="module")
def config():
    return parse_config(CONFIG)


@pytest.fixture(scope="module")
def truth(config):
    return intensity_double_decoherent(
        config.screen.geometry(),
        SuperpositionSpec.from_c1(TRUE_C1),
        DecoherenceSpec.from_lambda(TRUE_LAMBDA),
        config.kernel,
        config.truncation,
        derive_kinematics(config.physics),
        config.geometry,
        TRUE_A,
    )


def _series(pattern, noise=0.0, seed=0):
    positions = pattern.positions[::4]
    counts = pattern.intensities[::4]
    if noise:
        rng = np.random.default_rng(seed)
        counts = counts * (1.0 + noise * rng.standard_normal(counts.size))
    return ExperimentalSeries(positions, counts, "synthetic")


def test_residual_examples():
    model = Pattern([0.0, 1.0], [0.0, 2.0])
    assert residual_ss(model, ExperimentalSeries([0.5], [1.0])) == 0.0
    assert residual_ss(model, ExperimentalSeries([0.0, 1.0], [0.0, 2.0])) == 0.0
    assert residual_ss(model, ExperimentalSeries([0.0, 1.0], [0.0, 2.5])) == pytest.approx(0.25)


def test_residual_outside_model_range():
    model = Pattern([0.0, 1.0], [0.0, 2.0])
    with pytest.raises(DomainError):
        residual_ss(model, ExperimentalSeries([0.5, 1.5], [1.0, 1.0]))


def test_series_validation():
    with pytest.raises(InvalidParameterError):
        ExperimentalSeries([0.0, 1.0], [1.0, -1.0])
    with pytest.raises(InvalidParameterError):
        ExperimentalSeries([1.0, 0.0], [1.0, 1.0])


@pytest.mark.parametrize(
    "kwargs",
    [
        {"free_params": ("B",)},
        {"free_params": ("A", "A")},
        {"bounds": {"c1": (0.8, 0.2)}},
        {"bounds": {"lambda_t": (0.0, 1.5)}},
        {"bounds": {"A": (-1.0, 1.0)}},
        {"max_evaluations": 0},
        {"tolerance": 0.0},
    ],
)
def test_fit_spec_validation(kwargs):
    with pytest.raises(InvalidParameterError):
        FitSpec(**kwargs)


def test_amplitude_only_fit_is_exact(config, truth):
    data = _series(truth)
    result = fit(config, data, FitSpec(free_params=("A",), initial={"A": 3e19}))
    assert result.values["A"] == pytest.approx(TRUE_A, rel=1e-6)
    assert result.converged
    assert result.objective <= result.initial_objective


def test_amplitude_matches_closed_form(config, truth):
    data = _series(truth, noise=0.01)
    result = fit(config, data, FitSpec(free_params=("A",)))
    shape = np.interp(data.positions, truth.positions, truth.intensities) / TRUE_A ** 2
    best = np.sqrt(np.dot(data.counts, shape) / np.dot(shape, shape))
    assert result.values["A"] == pytest.approx(best, rel=1e-4)


def test_amplitude_and_c1(config, truth):
    data = _series(truth, noise=0.01)
    spec = FitSpec(free_params=("A", "c1"), bounds={"c1": (0.0, 0.7071)}, initial={"c1": 0.3, "A": 5e19})
    result = fit(config, data, spec)
    assert result.values["A"] == pytest.approx(TRUE_A, rel=0.03)
    assert result.values["c1"] == pytest.approx(TRUE_C1, abs=0.02)
    assert result.values["c2"] == pytest.approx(np.sqrt(1 - result.values["c1"] ** 2))
    assert result.converged
    assert result.objective <= result.initial_objective


def test_amplitude_and_coherence(config, truth):
    data = _series(truth, noise=0.01, seed=1)
    spec = FitSpec(free_params=("A", "lambda_t"), initial={"lambda_t": 0.9})
    result = fit(config, data, spec)
    assert result.values["lambda_t"] == pytest.approx(TRUE_LAMBDA, abs=0.05)
    assert result.values["A"] == pytest.approx(TRUE_A, rel=0.03)
    assert result.values["alpha_t"] == pytest.approx(
        DecoherenceSpec.from_lambda(result.values["lambda_t"]).alpha_t
    )


def test_all_parameters_pin_the_identifiable_combinations(config, truth, caplog):
    data = _series(truth, noise=0.01, seed=2)
    spec = FitSpec(
        free_params=("A", "c1", "lambda_t"),
        bounds={"c1": (0.0, 0.7071)},
        initial={"A": 0.5 * TRUE_A, "c1": 0.3, "lambda_t": 0.9},
    )
    with caplog.at_level("WARNING"):
        result = fit(config, data, spec)
    assert "identifiable" in caplog.text
    assert result.objective < result.initial_objective
    true_alpha = DecoherenceSpec.from_lambda(TRUE_LAMBDA).alpha_t
    assert result.contrast == pytest.approx(2 * TRUE_C1 * 0.8 * TRUE_LAMBDA, abs=0.02)
    assert result.scale == pytest.approx(TRUE_A ** 2 * (1 + true_alpha ** 2), rel=0.03)
    assert 0.0 <= result.values["c1"] <= 0.7071
    assert 0.0 <= result.values["lambda_t"] <= 1.0


def test_empty_fit_reports_initial_objective(config, truth):
    data = _series(truth, noise=0.01)
    result = fit(config, data, FitSpec())
    assert result.converged
    assert result.evaluations == 1
    assert result.objective == result.initial_objective
    assert result.values["A"] == TRUE_A


def test_refit_is_a_fixed_point(config, truth):
    data = _series(truth, noise=0.01, seed=3)
    spec = FitSpec(free_params=("A", "lambda_t"))
    first = fit(config, data, spec)
    again = fit(config, data, FitSpec(free_params=("A", "lambda_t"), initial={
        "A": first.values["A"], "lambda_t": first.values["lambda_t"],
    }))
    assert again.objective == pytest.approx(first.objective, rel=1e-6)


def test_fit_is_deterministic(config, truth):
    data = _series(truth, noise=0.01, seed=4)
    spec = FitSpec(free_params=("A", "c1"), bounds={"c1": (0.0, 0.7071)})
    assert fit(config, data, spec).values == fit(config, data, spec).values


def test_budget_exhaustion_is_not_an_error(config, truth):
    data = _series(truth, noise=0.01)
    result = fit(config, data, FitSpec(free_params=("A", "c1"), max_evaluations=5))
    assert result.converged is False


def test_fit_needs_five_points(config, truth):
    data = ExperimentalSeries(truth.positions[:4], truth.intensities[:4])
    with pytest.raises(InvalidParameterError):
        fit(config, data, FitSpec(free_params=("A",)))


def test_coherence_cannot_be_fitted_in_coherent_mode(truth):
    coherent = parse_config(CONFIG.replace("double-decoherent", "double-coherent"))
    with pytest.raises(InvalidParameterError):
        fit(coherent, _series(truth), FitSpec(free_params=("lambda_t",)))


def test_data_outside_the_scan(config):
    data = ExperimentalSeries(np.linspace(-1e-5, 1e-5, 6), np.ones(6))
    with pytest.raises(DomainError):
        fit(config, data, FitSpec(free_params=("A",)))
