"""Checkpoint container round-trip tests."""

import numpy as np
import pytest

from ecgcrnn.nn import ArchitectureConfig, build_model, save_checkpoint, load_checkpoint
from ecgcrnn.nn.checkpoint import CheckpointError


def test_bit_exact_round_trip(tmp_path):
    cfg = ArchitectureConfig(512, 7, 4)
    params = build_model(cfg, seed=42)
    p = tmp_path / "model.bin"
    save_checkpoint(p, cfg, params)
    cfg2, params2 = load_checkpoint(p)
    assert cfg2.window_size == 512 and cfg2.conv_layers == 7
    assert cfg2.num_classes == 4 and cfg2.head == "softmax"
    assert list(params2) == list(params)
    for k in params:
        assert params2[k].dtype == np.float64
        np.testing.assert_array_equal(params2[k], params[k])


def test_save_load_save_is_byte_identical(tmp_path):
    cfg = ArchitectureConfig(64, 3, 2, lstm_units=8, strict=False)
    params = build_model(cfg, seed=0)
    a, b = tmp_path / "a.bin", tmp_path / "b.bin"
    save_checkpoint(a, cfg, params)
    cfg2, params2 = load_checkpoint(a)
    save_checkpoint(b, cfg2, params2)
    assert a.read_bytes() == b.read_bytes()


def test_loaded_params_are_writable(tmp_path):
    cfg = ArchitectureConfig(64, 3, 2, lstm_units=8, strict=False)
    p = tmp_path / "m.bin"
    save_checkpoint(p, cfg, build_model(cfg, 0))
    _, params = load_checkpoint(p)
    params["head/b"][0] = 12.0  # must not raise


def test_rejects_foreign_file(tmp_path):
    p = tmp_path / "junk.bin"
    p.write_bytes(b"definitely not a checkpoint\n\nmore")
    with pytest.raises(CheckpointError):
        load_checkpoint(p)


def test_rejects_truncation(tmp_path):
    cfg = ArchitectureConfig(64, 3, 2, lstm_units=8, strict=False)
    p = tmp_path / "m.bin"
    save_checkpoint(p, cfg, build_model(cfg, 0))
    p.write_bytes(p.read_bytes() + b"x")
    with pytest.raises(CheckpointError):
        load_checkpoint(p)
