import pytest

from vemmhd.errors import ConfigError
from vemmhd.presets import PresetRegistry, discover_presets
from vemmhd.presets.schema import ExpectedRates


def test_builtin_presets():
    reg = PresetRegistry()
    assert {"ha1", "ha5", "example1_k1", "example1_k2"} <= set(reg.list())
    ha1 = reg.load("ha1")
    assert (ha1.params.r_nu, ha1.params.r_m, ha1.params.s_c) == (1.0, 0.1, 10.0)
    ha5 = reg.load("ha5")
    assert (ha5.params.r_nu, ha5.params.r_m, ha5.params.s_c) == (5.0, 1.0, 5.0)
    assert ha5.params.hartmann == pytest.approx(5.0)
    assert reg.load("example1_k2").levels == [4, 8, 16]


def test_missing_preset():
    with pytest.raises(ConfigError, match="not found"):
        PresetRegistry().load("nope")


def test_invalid_pack_is_skipped_by_discovery(tmp_path):
    (tmp_path / "good.yaml").write_text("name: good\ndescription: d\nkind: hartmann\n", encoding="utf-8")
    (tmp_path / "bad.yaml").write_text("name: bad\ndescription: d\nkind: hartmann\nk: 0\n", encoding="utf-8")
    found = discover_presets(tmp_path)
    assert [p["name"] for p in found] == ["good"]
    with pytest.raises(ConfigError, match="invalid"):
        PresetRegistry(tmp_path).load("bad")


def test_expected_rate_violations():
    exp = ExpectedRates(e_u0=[1.8, 2.2], e_p0_min=0.85)
    assert exp.violations({"rate_u0": 2.0, "rate_p0": 1.0}) == []
    problems = exp.violations({"rate_u0": 1.5, "rate_p0": None})
    assert len(problems) == 2
    assert problems[0].startswith("e_u0")
