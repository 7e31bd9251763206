import struct

import numpy as np
import pytest

from kikuchi import io
from kikuchi.errors import ParameterError
from kikuchi.odd_certifier import random_sign_tensor
from kikuchi.tensor_model import SpikePrior, generate
from kikuchi.xor_refute import random_formula


def test_instance_round_trip(tmp_path):
    inst = generate(9, 3, 1.25, prior=SpikePrior.sphere(), seed=42)
    path = tmp_path / "i.bin"
    io.write_instance(inst, path)
    back = io.read_instance(path)
    assert np.array_equal(back.tensor.entries, inst.tensor.entries)
    assert np.array_equal(back.spike, inst.spike)
    assert (back.n, back.p, back.lam, back.seed, back.prior.kind) == (9, 3, 1.25, 42, "sphere")
    assert io.has_spike(back)


def test_instance_layout(tmp_path):
    inst = generate(6, 4, 0.5, seed=1)
    path = tmp_path / "i.bin"
    io.write_instance(inst, path, include_spike=False)
    data = path.read_bytes()
    magic, version, n, p, lam, seed, tag, flags = struct.unpack_from("<4sIIIdQBB", data)
    assert (magic, version, n, p, lam, seed, tag, flags) == (b"KIKT", 1, 6, 4, 0.5, 1, 0, 0)
    assert len(data) == struct.calcsize("<4sIIIdQBB") + 8 * 15
    assert np.array_equal(np.frombuffer(data[-120:], "<f8"), inst.tensor.entries)
    assert not io.has_spike(io.read_instance(path))


def test_instance_rejects_corruption(tmp_path):
    path = tmp_path / "bad.bin"
    path.write_bytes(b"XXXX" + bytes(40))
    with pytest.raises(ParameterError):
        io.read_instance(path)
    inst = generate(6, 4, 0.5, seed=1)
    io.write_instance(inst, path)
    path.write_bytes(path.read_bytes()[:-8])
    with pytest.raises(ParameterError):
        io.read_instance(path)


def test_dense_round_trip(tmp_path):
    y = random_sign_tensor(5, 3, seed=2)
    path = tmp_path / "d.bin"
    io.write_dense(y, path)
    assert np.array_equal(io.read_dense(path), y)
    raw = path.read_bytes()
    assert raw[:4] == b"KIKD"
    assert np.array_equal(np.frombuffer(raw[16:], "<f8"), y.ravel())


def test_formula_round_trip(tmp_path):
    f = random_formula(10, 4, 25, seed=3)
    path = tmp_path / "f.txt"
    io.write_formula(f, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "p kxor 10 25 4"
    assert lines[1].split()[-1] in ("+1", "-1")
    back = io.read_formula(path)
    assert np.array_equal(back.subsets, f.subsets) and np.array_equal(back.signs, f.signs)


def test_formula_parse_errors(tmp_path):
    path = tmp_path / "f.txt"
    path.write_text("p kxor 4 1 2\n1 2 3 +1\n")
    with pytest.raises(ParameterError):
        io.read_formula(path)
    path.write_text("p kxor 4 2 2\n1 2 +1\n")
    with pytest.raises(ParameterError):
        io.read_formula(path)
    path.write_text("c comment\np kxor 4 1 2\n1 5 +1\n")
    with pytest.raises(ParameterError):
        io.read_formula(path)
