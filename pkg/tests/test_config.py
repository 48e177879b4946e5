from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

from aecomm.config import (
    ExperimentConfig,
    load_config,
    loads_config,
    save_config,
    serialize_config,
)
from aecomm.errors import ConfigFileError, ConfigurationError

REFERENCE = Path(__file__).resolve().parent.parent / "configs" / "reference.cfg"


class TestDefaults:
    def test_empty_text_gives_defaults(self):
        assert loads_config("") == ExperimentConfig()

    def test_comment_only_text_gives_defaults(self):
        assert loads_config("# nothing\n\n# here\n") == ExperimentConfig()

    def test_reference_file_equals_defaults(self):
        assert load_config(REFERENCE) == ExperimentConfig()

    def test_defaults_are_valid(self):
        ExperimentConfig().validate()

    def test_default_grid_has_25_points(self):
        grid = ExperimentConfig().test_grid()
        assert len(grid) == 25
        assert grid[0] == -4.0
        assert grid[-1] == 8.0
        assert np.allclose(np.diff(grid), 0.5)


class TestRoundTrip:
    def test_reference_round_trips(self):
        config = load_config(REFERENCE)
        assert loads_config(serialize_config(config)) == config

    def test_modified_config_round_trips(self):
        config = ExperimentConfig(
            channel_kind="correlated_awgn",
            rho=0.65,
            rate=Fraction(1, 2),
            steps=321,
            train_ebn0_db=(-2.0, 3.5),
            seeds=(9,),
            test_ebn0_step=0.25,
        )
        assert loads_config(serialize_config(config)) == config

    def test_save_and_load(self, tmp_path):
        config = ExperimentConfig(steps=77)
        path = tmp_path / "exp.cfg"
        save_config(config, path)
        assert load_config(path) == config


class TestParseErrors:
    def test_unknown_section_with_line(self):
        with pytest.raises(ConfigFileError, match=r"line 2.*mystery"):
            loads_config("# ok\n[mystery]\n")

    def test_unknown_key_with_line(self):
        with pytest.raises(ConfigFileError, match=r"line 2.*momentum"):
            loads_config("[training]\nmomentum = 0.9\n")

    def test_duplicate_key(self):
        text = "[training]\nsteps = 5\nsteps = 6\n"
        with pytest.raises(ConfigFileError, match=r"line 3.*duplicate"):
            loads_config(text)

    def test_bad_value_names_key_and_line(self):
        with pytest.raises(ConfigFileError, match=r"line 2.*steps"):
            loads_config("[training]\nsteps = soon\n")

    def test_key_outside_section(self):
        with pytest.raises(ConfigFileError, match=r"line 1"):
            loads_config("steps = 5\n")

    def test_missing_equals(self):
        with pytest.raises(ConfigFileError, match=r"line 2"):
            loads_config("[training]\nsteps 5\n")

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigFileError, match="cannot read"):
            load_config(tmp_path / "absent.cfg")

    def test_nan_rejected(self):
        with pytest.raises(ConfigFileError, match="rho"):
            loads_config("[channel]\nrho = nan\n")


class TestValidation:
    def test_rate_zero_names_rate(self):
        with pytest.raises(ConfigurationError, match="rate"):
            loads_config("[channel]\nrate = 0\n")

    def test_rate_above_one_rejected(self):
        with pytest.raises(ConfigurationError, match="rate"):
            ExperimentConfig(rate=Fraction(8, 7)).validate()

    def test_bad_kind(self):
        with pytest.raises(ConfigurationError, match="kind"):
            ExperimentConfig(channel_kind="fso").validate()

    def test_empty_train_grid(self):
        with pytest.raises(ConfigurationError, match="train_ebn0_db"):
            ExperimentConfig(train_ebn0_db=()).validate()

    def test_negative_step(self):
        with pytest.raises(ConfigurationError, match="test_ebn0_step"):
            ExperimentConfig(test_ebn0_step=-0.5).validate()

    def test_start_after_stop(self):
        with pytest.raises(ConfigurationError, match="test_ebn0_start"):
            ExperimentConfig(test_ebn0_start=9.0, test_ebn0_stop=8.0).validate()

    def test_empty_seeds(self):
        with pytest.raises(ConfigurationError, match="seeds"):
            ExperimentConfig(seeds=()).validate()

    def test_zero_target_errors(self):
        with pytest.raises(ConfigurationError, match="target_block_errors"):
            ExperimentConfig(target_block_errors=0).validate()


class TestParsing:
    def test_inline_comments_stripped(self):
        config = loads_config("[training]\nsteps = 42  # short run\n")
        assert config.steps == 42

    def test_rate_fraction_form(self):
        config = loads_config("[channel]\nrate = 1/2\n")
        assert config.rate == Fraction(1, 2)
        assert config.block_bits == 1
        assert config.channel_uses == 2

    def test_float_lists(self):
        config = loads_config("[sweep]\ntrain_ebn0_db = -4, 0.0, 8\n")
        assert config.train_ebn0_db == (-4.0, 0.0, 8.0)

    def test_seed_list(self):
        config = loads_config("[seeds]\nseeds = 5, 6\n")
        assert config.seeds == (5, 6)


class TestDerived:
    def test_message_count(self):
        assert ExperimentConfig().message_count == 16
        assert ExperimentConfig(rate=Fraction(1, 2)).message_count == 2

    def test_grid_never_overshoots_stop(self):
        config = ExperimentConfig(test_ebn0_step=0.7)
        grid = config.test_grid()
        assert grid[-1] <= config.test_ebn0_stop + 1e-12
        config = ExperimentConfig(test_ebn0_step=6.5)
        assert config.test_grid()[-1] <= 8.0

    def test_single_point_grid(self):
        config = ExperimentConfig(test_ebn0_start=3.0, test_ebn0_stop=3.0)
        assert np.array_equal(config.test_grid(), [3.0])

    def test_channel_spec_carries_settings(self):
        config = ExperimentConfig(channel_kind="correlated_awgn", rho=0.5)
        spec = config.channel_spec(2.5)
        assert spec.kind == "correlated_awgn"
        assert spec.rho == 0.5
        assert spec.ebn0_db == 2.5
        assert spec.rate == pytest.approx(4 / 7)

    def test_with_seed(self):
        assert ExperimentConfig().with_seed(7).seeds == (7,)
