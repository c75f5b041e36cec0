import pytest

from dcs.config import SEED_ENV_VAR, ExperimentConfig, parse_config_text


MINIMAL = "seeds = 1,2\nout = results.csv\n"


class TestParsing:
    def test_minimal_config_uses_defaults(self):
        cfg = parse_config_text(MINIMAL)
        assert cfg.seeds == (1, 2)
        assert cfg.out == "results.csv"
        assert cfg.n_train == 2000
        assert cfg.sigmas == (0.01, 0.1, 0.3, 0.5, 0.7)
        assert cfg.rho == 0.10
        assert cfg.patch_radius == 1
        assert cfg.epochs == 100
        assert cfg.batch_size == 64

    def test_typed_values(self):
        cfg = parse_config_text(
            MINIMAL + "sigmas = 0.5,0.7\nepochs = 3\nlosses = dcs,cs\nrho = 0.2\n"
        )
        assert cfg.sigmas == (0.5, 0.7)
        assert cfg.epochs == 3
        assert cfg.losses == ("dcs", "cs")
        assert cfg.rho == 0.2

    def test_comments_and_blank_lines(self):
        cfg = parse_config_text("# a comment\n\n" + MINIMAL)
        assert cfg.seeds == (1, 2)

    def test_unknown_key_rejected(self):
        with pytest.raises(ValueError, match="unknown config key"):
            parse_config_text(MINIMAL + "learning_rte = 0.1\n")

    def test_duplicate_key_rejected(self):
        with pytest.raises(ValueError, match="duplicate"):
            parse_config_text(MINIMAL + "epochs = 1\nepochs = 2\n")

    def test_bad_value_reports_key(self):
        with pytest.raises(ValueError, match="epochs"):
            parse_config_text(MINIMAL + "epochs = soon\n")

    def test_seed_env_fallback(self, monkeypatch):
        monkeypatch.setenv(SEED_ENV_VAR, "99")
        cfg = parse_config_text("out = r.csv\n")
        assert cfg.seeds == (99,)

    def test_missing_seeds_detected_at_validation(self, monkeypatch):
        monkeypatch.delenv(SEED_ENV_VAR, raising=False)
        cfg = parse_config_text("out = r.csv\n")
        with pytest.raises(ValueError, match="seeds"):
            cfg.validate()

    def test_missing_out_detected_at_validation(self):
        cfg = parse_config_text("seeds = 1\n")
        with pytest.raises(ValueError, match="out"):
            cfg.validate()


class TestRoundTrip:
    def test_text_round_trips_losslessly(self):
        cfg = parse_config_text(
            MINIMAL + "sigmas = 0.1,0.30000000000000004\nlearning_rate = 0.0012\n"
        )
        again = parse_config_text(cfg.to_text())
        assert again == cfg
        assert again.to_text() == cfg.to_text()

    def test_defaults_round_trip(self):
        cfg = ExperimentConfig(seeds=(0,), out="x.csv")
        assert parse_config_text(cfg.to_text()) == cfg

    def test_hash_changes_with_content(self):
        a = parse_config_text(MINIMAL)
        b = parse_config_text(MINIMAL + "epochs = 7\n")
        assert a.config_hash() != b.config_hash()
        assert len(a.config_hash()) == 16


class TestOverrides:
    def test_with_overrides_parses_like_file(self):
        cfg = parse_config_text(MINIMAL).with_overrides(
            {"epochs": "5", "sigmas": "0.5", "out": "other.csv"}
        )
        assert cfg.epochs == 5
        assert cfg.sigmas == (0.5,)
        assert cfg.out == "other.csv"

    def test_unknown_override_rejected(self):
        with pytest.raises(ValueError, match="unknown config key"):
            parse_config_text(MINIMAL).with_overrides({"bogus": "1"})

    def test_validation_catches_bad_loss(self):
        cfg = parse_config_text(MINIMAL + "losses = dcs,huber\n")
        with pytest.raises(ValueError, match="huber"):
            cfg.validate()
