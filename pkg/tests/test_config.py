import math

import pytest

from matterwave.config import Mode, Settings, load_config, parse_config, write_config
from matterwave.errors import ConfigError, MissingKeyError, ValidationError
from matterwave.physics.propagation import KernelChoice


def test_single_preset_fills_every_key():
    config = parse_config("[run]\nmode = single\n")
    assert config.mode is Mode.SINGLE
    assert config.geometry.width == 1e-5
    assert config.screen.distance == 2.29
    assert config.physics.amplitude == 2.87e14
    assert config.kernel is KernelChoice.FRESNEL
    assert config.decoherence is None
    assert config.fit is None


def test_user_values_override_the_preset():
    config = parse_config("[run]\nmode = double-coherent\nkernel = rayleigh\n[screen]\nn_points = 11\n")
    assert config.kernel is KernelChoice.RAYLEIGH
    assert config.screen.n_points == 11
    assert config.screen.distance == 1.25


def test_decoherent_preset_derives_c2():
    config = parse_config("[run]\nmode = double-decoherent\n")
    assert config.decoherence.lambda_t == pytest.approx(0.5)
    assert config.superposition.c1 == 0.565
    assert config.superposition.c2 == pytest.approx(math.sqrt(1 - 0.565 ** 2))


def test_coherent_preset_keeps_published_pair():
    config = parse_config("[run]\nmode = double-coherent\n")
    assert (config.superposition.c1, config.superposition.c2) == (0.566, 0.824)


def test_single_coefficient_derives_the_other():
    config = parse_config("[run]\nmode = double-coherent\n[superposition]\nc2 = 0.6\n")
    assert config.superposition.c1 == pytest.approx(0.8)


def test_unnormalized_coefficients():
    with pytest.raises(ValidationError) as info:
        parse_config("[run]\nmode = double-coherent\n[superposition]\nc1 = 0.9\nc2 = 0.9\n")
    assert info.value.key_path == "superposition.c1"


def test_missing_mode():
    with pytest.raises(MissingKeyError) as info:
        parse_config("")
    assert info.value.key == "run.mode"


@pytest.mark.parametrize(
    "text, key_path",
    [
        ("[run]\nmode = triple\n", "run.mode"),
        ("[run]\nmode = single\nkernel = huygens\n", "run.kernel"),
        ("[run]\nmode = single\n[physics]\nmass = heavy\n", "physics.mass"),
        ("[run]\nmode = single\n[physics]\ncolour = red\n", "physics.colour"),
        ("[run]\nmode = single\n[extras]\nx = 1\n", "extras"),
        ("[run]\nmode = single\n[screen]\ns_min = 1.0\ns_max = -1.0\n", "screen"),
        ("[run]\nmode = single\n[physics]\nvelocity = -3\n", "physics"),
    ],
)
def test_invalid_values(text, key_path):
    with pytest.raises(ValidationError) as info:
        parse_config(text)
    assert info.value.key_path == key_path


def test_inconsistent_environment_overlap():
    text = "[run]\nmode = double-decoherent\n[decoherence]\nalpha_t = 0.5\nlambda_t = 0.5\n"
    with pytest.raises(ValidationError) as info:
        parse_config(text)
    assert info.value.key_path == "decoherence.lambda_t"


def test_overlap_and_coherence_agree():
    text = "[run]\nmode = double-decoherent\n[decoherence]\nalpha_t = 0.5\nlambda_t = 0.8\n"
    assert parse_config(text).decoherence.lambda_t == pytest.approx(0.8)


def test_malformed_file():
    with pytest.raises(ConfigError):
        parse_config("mode = single\n")


def test_fit_section():
    text = "[run]\nmode = double-decoherent\n[fit]\nfree = A, lambda_t\nlambda_t_max = 0.9\nc1_initial = 0.4\n"
    spec = parse_config(text).fit
    assert spec.free_params == ("A", "lambda_t")
    assert spec.bounds["lambda_t"] == (0.0, 0.9)
    assert spec.bounds["c1"] == (0.0, 1.0)
    assert spec.initial == {"c1": 0.4}


def test_bad_fit_parameter():
    with pytest.raises(ValidationError) as info:
        parse_config("[run]\nmode = single\n[fit]\nfree = B\n")
    assert info.value.key_path == "fit"


def test_write_and_load_round_trip(tmp_path):
    text = "[run]\nmode = double-decoherent\n[decoherence]\nlambda_t = 0.3\n[fit]\nfree = A, c1\nc1_max = 0.7\n"
    config = parse_config(text)
    path = tmp_path / "run.cfg"
    write_config(config, path)
    assert load_config(path) == config


def test_missing_file(tmp_path):
    with pytest.raises(OSError):
        load_config(tmp_path / "absent.cfg")


def test_settings_from_environment(monkeypatch, tmp_path):
    monkeypatch.chdir(tmp_path)
    monkeypatch.setenv("MATTERWAVE_LOG_LEVEL", "DEBUG")
    monkeypatch.delenv("MATTERWAVE_LOG_FILE", raising=False)
    settings = Settings.load()
    assert settings.log_level == "DEBUG"
    assert settings.log_file == ""
