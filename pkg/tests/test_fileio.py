import json

import numpy as np
import pytest

from pose6d import (CameraIntrinsics, ClassDistribution, DepthMap, ImageSize,
                    Patch, Pose, PredictionTuple, RunConfig, SceneConfig,
                    generate_scene)
from pose6d.errors import ConfigError, DanglingReference, ParseError
from pose6d.fileio import (dump_report, file_digest, load_depth,
                           load_intrinsics, load_predictions, load_scene,
                           save_depth, save_intrinsics, save_predictions,
                           save_scene)


# --- intrinsics --------------------------------------------------------


def test_intrinsics_roundtrip(tmp_path):
    k = CameraIntrinsics(500.25, 499.75, 320.5, 240.125)
    path = tmp_path / "intrinsics.json"
    save_intrinsics(k, path)
    assert load_intrinsics(path) == k


def test_intrinsics_rejects_garbage(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("not json")
    with pytest.raises(ParseError):
        load_intrinsics(path)


# --- depth -------------------------------------------------------------


def _depth_map(rng, w=40, h=30):
    depths = rng.uniform(1.5, 3.0, (h, w))
    valid = rng.uniform(size=(h, w)) > 0.3
    depths[~valid] = 0.0
    return DepthMap(ImageSize(w, h), depths, valid)


def test_depth_roundtrip_within_quantization(rng):
    dm = _depth_map(rng)
    import os
    path = os.path.join(os.environ.get("TMPDIR", "/tmp"), "roundtrip.bin")
    save_depth(dm, path)
    back = load_depth(path)
    np.testing.assert_array_equal(back.valid, dm.valid)
    # stored as millimeters, so the error per pixel is at most half a unit
    assert np.max(np.abs(back.depths[dm.valid] - dm.depths[dm.valid])) <= 5e-4


def test_depth_save_is_deterministic(tmp_path, rng):
    dm = _depth_map(rng)
    save_depth(dm, tmp_path / "a.bin")
    save_depth(dm, tmp_path / "b.bin")
    assert (tmp_path / "a.bin").read_bytes() == (tmp_path / "b.bin").read_bytes()


def test_depth_rejects_corrupted_payload(tmp_path, rng):
    dm = _depth_map(rng)
    path = tmp_path / "depth.bin"
    save_depth(dm, path)
    blob = bytearray(path.read_bytes())
    blob[-3] ^= 0xFF
    path.write_bytes(bytes(blob))
    with pytest.raises(ParseError):
        load_depth(path)


def test_depth_rejects_wrong_magic(tmp_path):
    path = tmp_path / "depth.bin"
    path.write_bytes(b"XXXX 1 2 2 1000.0 0 0 0\n" + b"\x00" * 8)
    with pytest.raises(ParseError):
        load_depth(path)


def test_depth_rejects_truncation(tmp_path, rng):
    dm = _depth_map(rng)
    path = tmp_path / "depth.bin"
    save_depth(dm, path)
    path.write_bytes(path.read_bytes()[:-10])
    with pytest.raises(ParseError):
        load_depth(path)


# --- predictions -------------------------------------------------------


def _some_predictions():
    return [
        PredictionTuple(ClassDistribution((0.25, 0.5, 0.25)),
                        Patch(1.5, 2.25, 3.0, 4.5),
                        Pose((0, 0, 0, 1), (0.1, -0.2, 2.0))),
        PredictionTuple(ClassDistribution.one_hot(2, 2),
                        Patch(10, 20, 5, 5), Pose.identity()),
    ]


def test_predictions_roundtrip_bit_exact(tmp_path):
    preds = _some_predictions()
    path = tmp_path / "preds.jsonl"
    save_predictions(preds, path)
    assert load_predictions(path) == preds


def test_predictions_parse_error_carries_line_number(tmp_path):
    path = tmp_path / "preds.jsonl"
    save_predictions(_some_predictions(), path)
    lines = path.read_text().splitlines()
    lines[2] = lines[2][:-5]
    path.write_text("\n".join(lines) + "\n")
    with pytest.raises(ParseError, match="line 3"):
        load_predictions(path)


def test_predictions_header_count_enforced(tmp_path):
    path = tmp_path / "preds.jsonl"
    save_predictions(_some_predictions(), path)
    lines = path.read_text().splitlines()
    path.write_text("\n".join(lines[:-1]) + "\n")
    with pytest.raises(ParseError):
        load_predictions(path)


# --- scene -------------------------------------------------------------


def _saved_scene(tmp_path, seed=21):
    scene = generate_scene(SceneConfig(num_objects=2, seed=seed))
    save_intrinsics(scene.intrinsics, tmp_path / "intrinsics.json")
    save_depth(scene.depth, tmp_path / "depth.bin")
    save_scene(scene, tmp_path / "scene.jsonl")
    return scene


def test_scene_roundtrip(tmp_path):
    scene = _saved_scene(tmp_path)
    back = load_scene(tmp_path / "scene.jsonl")
    assert back.objects == scene.objects
    assert back.intrinsics == scene.intrinsics
    assert back.num_classes == scene.num_classes
    assert back.symmetric_class_ids == scene.symmetric_class_ids
    assert set(back.point_sets) == set(scene.point_sets)
    for name in scene.point_sets:
        assert back.point_sets[name] == scene.point_sets[name]
    np.testing.assert_array_equal(back.depth.valid, scene.depth.valid)


def test_scene_missing_depth_reference(tmp_path):
    _saved_scene(tmp_path)
    (tmp_path / "depth.bin").unlink()
    with pytest.raises(DanglingReference):
        load_scene(tmp_path / "scene.jsonl")


def test_scene_unknown_pointset_reference(tmp_path):
    _saved_scene(tmp_path)
    text = (tmp_path / "scene.jsonl").read_text()
    (tmp_path / "scene.jsonl").write_text(
        text.replace('"model_points_ref":"class_0"',
                     '"model_points_ref":"class_9"'))
    with pytest.raises((DanglingReference, ParseError)):
        load_scene(tmp_path / "scene.jsonl")


# --- reports and digests -----------------------------------------------


def test_dump_report_is_canonical():
    a = dump_report({"b": 1, "a": [1.5, 2.25]})
    b = dump_report({"a": [1.5, 2.25], "b": 1})
    assert a == b
    assert a.endswith("\n")
    assert json.loads(a) == {"a": [1.5, 2.25], "b": 1}


def test_file_digest_is_sha256(tmp_path):
    path = tmp_path / "blob"
    path.write_bytes(b"abc")
    assert file_digest(path) == (
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad")


# --- configuration -----------------------------------------------------


def test_golden_defaults():
    cfg = RunConfig()
    assert cfg.sigma1 == 2.0
    assert cfg.sigma2 == 5.0
    assert cfg.lambda_pose == 0.05
    assert cfg.n_c == 21
    assert cfg.image_width == 640 and cfg.image_height == 480


def test_config_file_roundtrip(tmp_path):
    cfg = RunConfig().replace(seed=7, noise_translation_sigma=0.05)
    path = tmp_path / "config.json"
    path.write_text(json.dumps(cfg.to_dict()))
    assert RunConfig.from_file(path) == cfg


def test_config_rejects_unknown_keys():
    with pytest.raises(ConfigError):
        RunConfig.from_dict({"sigma_one": 2.0})


def test_config_rejects_invalid_values():
    with pytest.raises(ConfigError):
        RunConfig.from_dict({"n_c": 0})
    with pytest.raises(ConfigError):
        RunConfig.from_dict({"w1": 0.7, "w2": 0.7})


def test_config_digest_tracks_content():
    assert RunConfig().digest() == RunConfig().digest()
    assert RunConfig().digest() != RunConfig().replace(seed=1).digest()
