import pytest

from splitmps.config import SimConfig, load_config, write_config_template
from splitmps.errors import ParameterError


class TestLoadConfig:
    def test_defaults_pass_validation(self):
        cfg = load_config()
        assert cfg.d_b == 100 and cfg.chi == 5 and cfg.tn_variant == "paper"

    def test_file_then_overrides(self, tmp_path):
        path = tmp_path / "run.ini"
        path.write_text("[bath]\nalpha = 0.1, 0.2\n[tdvp]\ndt = 0.05\n")
        cfg = load_config(path, {"dt": "0.2", "chi": "7"})
        assert cfg.alpha == [0.1, 0.2]
        assert cfg.dt == 0.2 and cfg.chi == 7

    def test_template_roundtrip(self, tmp_path):
        path = tmp_path / "template.ini"
        write_config_template(path)
        cfg = load_config(path)
        assert cfg == SimConfig()

    def test_unknown_key_rejected(self, tmp_path):
        path = tmp_path / "bad.ini"
        path.write_text("[bath]\nbogus = 1\n")
        with pytest.raises(ParameterError):
            load_config(path)
        with pytest.raises(ParameterError):
            load_config(None, {"bogus": "1"})

    def test_missing_file_rejected(self, tmp_path):
        with pytest.raises(ParameterError):
            load_config(tmp_path / "nope.ini")

    def test_bad_values_rejected(self):
        for key, value in [
            ("dt", "-0.1"), ("alpha", "-0.5"), ("scheme", "weird"),
            ("d_b", "1"), ("length", "0"), ("tn_variant", "folklore"),
            ("dt", "abc"),
        ]:
            with pytest.raises(ParameterError):
                load_config(None, {key: value})

    def test_bool_and_list_parsing(self):
        cfg = load_config(None, {"split_enabled": "false", "bench_d_b": "4,9,16"})
        assert cfg.split_enabled is False
        assert cfg.bench_d_b == [4, 9, 16]


class TestResolvedDb:
    def test_square_unchanged(self):
        assert load_config(None, {"d_b": "100"}).resolved_d_b() == 100

    def test_rounded_up_with_warning(self, caplog):
        cfg = load_config(None, {"d_b": "50"})
        import logging

        with caplog.at_level(logging.WARNING):
            assert cfg.resolved_d_b() == 64
        assert "padding" in caplog.text

    def test_original_basis_keeps_d_b(self):
        cfg = load_config(None, {"d_b": "50", "split_enabled": "false"})
        assert cfg.resolved_d_b() == 50


def test_metadata_covers_every_field():
    meta = SimConfig().to_metadata()
    from dataclasses import fields

    assert set(meta) == {f.name for f in fields(SimConfig)}
    assert meta["alpha"] == "1.0"
    assert meta["split_enabled"] == "True"
