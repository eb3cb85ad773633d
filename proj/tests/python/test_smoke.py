import os
import pathlib

import pytest

import attrq

MODELS = pathlib.Path(os.environ.get("ATTRQ_MODELS_DIR", pathlib.Path(__file__).resolve().parents[2] / "models"))


def test_exact_toggle():
    report = attrq.analyze(str(MODELS / "toggle.av"), "exact")
    assert [a["probability"] for a in report["attractors"]] == [0.5, 0.5]
    assert {a["kind"] for a in report["attractors"]} == {"point"}


def test_methods_agree_on_toggle():
    model = attrq.load_model(str(MODELS / "toggle.av"))
    ff = attrq.analyze(model, "firefront", alpha=1e-5, beta=1e-3)
    av = attrq.analyze(model, "avatar", runs=4000, seed=1)
    assert ff["residual_probability"] == 0.0
    for a in av["attractors"]:
        assert abs(a["probability"] - 0.5) < 0.03


def test_avatar_is_seeded():
    model = attrq.load_model(str(MODELS / "repressilator.av"))
    a = attrq.analyze(model, "avatar", runs=300, seed=5)
    b = attrq.analyze(model, "avatar", runs=300, seed=5, threads=2)
    a.pop("wall_time_s")
    b.pop("wall_time_s")
    assert a == b
    assert a["attractors"][0]["kind"] == "complex"
    assert a["attractors"][0]["size"] == 6


def test_parse_errors_raise():
    with pytest.raises(attrq.ModelError, match="line 2"):
        attrq.parse_model("NODE a 1\nTARGET a 4 : a=0\n")


def test_capacity_error():
    text = "".join(f"NODE x{i} 1\n" for i in range(30)) + "INIT * SAMPLE\n"
    with pytest.raises(attrq.CapacityError):
        attrq.analyze(attrq.parse_model(text), "exact", state_cap=1000)


def test_generated_models_round_trip():
    model = attrq.generate_model(8, 2, seed=3)
    assert model.components == [f"x{i}" for i in range(8)]
    assert model.state_count == 256
    assert attrq.parse_model(model.text()) == model
    assert attrq.generate_model(8, 2, seed=3).text() == model.text()
