import math
import os

import numpy as np
import pytest

import srgc

SCENES = os.environ.get("SRGC_SCENES", os.path.join(os.path.dirname(__file__), "..", "..", "scenes"))


def four_patch():
    with open(os.path.join(SCENES, "four_patches.txt")) as f:
        return srgc.synthesize(f.read())


def test_numpy_roundtrip():
    arr = np.random.default_rng(0).integers(0, 1024, size=(2, 3, 1, 5, 7), dtype=np.uint16)
    lf = srgc.LightField.from_numpy(arr, bit_depth=10)
    assert (lf.rows, lf.cols, lf.width, lf.height) == (2, 3, 7, 5)
    assert np.array_equal(lf.to_numpy(), arr)


def test_encode_decode_grouping():
    lf, disp = four_patch()
    cfg = srgc.CodecConfig()
    cfg.q_gft = 16
    cfg.slic_k = 16
    data, report = srgc.encode(lf, disp, cfg)
    rec, dreport = srgc.decode(data)
    assert report["groups"] >= 1
    assert report["grouped"] >= 4
    assert dreport["eig_dec"] == dreport["ungrouped"] + dreport["groups"]
    assert dreport["eig_dec"] < report["eig_enc"]
    assert srgc.psnr(lf, rec) > 30
    assert srgc.bpp(len(data), lf) == pytest.approx(8 * len(data) / lf.to_numpy().size)


def test_constant_exact():
    arr = np.full((3, 3, 1, 16, 16), 99, dtype=np.uint16)
    lf = srgc.LightField.from_numpy(arr)
    disp = srgc.DisparityMap.from_numpy(np.zeros((16, 16), dtype=np.float32))
    cfg = srgc.CodecConfig()
    cfg.set("q_gft", "32")
    cfg.set("slic_k", "4")
    data, _ = srgc.encode(lf, disp, cfg)
    rec, _ = srgc.decode(data)
    assert rec == lf
    assert math.isinf(srgc.psnr(lf, rec))


def test_entropy_and_grouping_helpers():
    symbols = list(range(-300, 300))
    assert srgc.entropy_decode(srgc.entropy_encode(symbols, 5), 5) == symbols
    assert srgc.pair_count(1252) == 783126
    coarsened, overall = srgc.grouping_ratios(1026, 1252, 4390)
    assert round(coarsened, 2) == 0.82 and round(overall, 2) == 0.23
    out = srgc.run_grouping([[1.0, 2.0]] * 4 + [[90.0, 80.0]], [[1.0, 2.0]] * 4 + [[90.0, 80.0]], 5.0)
    assert [g["members"] for g in out["groups"]] == [[0, 1, 2, 3]]
    assert out["ungrouped"] == [4]


def test_spectral_helpers():
    lap = np.array([[1.0, -1.0], [-1.0, 1.0]])
    vals, vecs = srgc.eigendecompose(lap)
    assert vals == pytest.approx([0.0, 2.0], abs=1e-12)
    assert vecs[:, 1] == pytest.approx([1 / math.sqrt(2), -1 / math.sqrt(2)])
    assert srgc.dct1d([1.0, 1.0, 1.0, 1.0]) == pytest.approx([2.0, 0.0, 0.0, 0.0], abs=1e-12)


def test_errors_are_value_errors():
    with pytest.raises(ValueError, match="unsupported stream"):
        srgc.decode(b"XXXXXXXXXXXXXXXXXXXXXXXX")
    with pytest.raises(ValueError):
        srgc.CodecConfig().set("nope", "1")
