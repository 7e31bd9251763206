"""Binary instance files, dense tensor files and the k-XOR formula text format.

Instance file (little-endian): ``"KIKT"``, version u32, n u32, p u32, lam f64,
seed u64, prior tag u8, flags u8 (bit 0: spike appended), then ``C(n, p)``
f64 entries in colex order, then n f64 spike coordinates if flagged.

Dense tensor file: ``"KIKD"``, version u32, n u32, p u32, then ``n^p`` f64
values in row-major order.

Formula file: a header line ``p kxor n m k``, then one clause per line with k
1-based variable indices followed by ``+1`` or ``-1``. Lines starting with
``c`` are comments.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .combinat import binom
from .errors import ParameterError
from .tensor_model import Instance, SpikePrior, SubsetTensor
from .xor_refute import XorFormula

VERSION = 1
_INSTANCE_HEADER = struct.Struct("<4sIIIdQBB")
_DENSE_HEADER = struct.Struct("<4sIII")
FLAG_SPIKE = 1


def write_instance(instance: Instance, path, include_spike: bool = True) -> None:
    prior_tag = instance.prior.tag if instance.prior is not None else 255
    flags = FLAG_SPIKE if include_spike else 0
    header = _INSTANCE_HEADER.pack(b"KIKT", VERSION, instance.n, instance.p, float(instance.lam),
                                   int(instance.seed), prior_tag, flags)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(instance.tensor.entries.astype("<f8").tobytes())
        if include_spike:
            fh.write(np.asarray(instance.spike, dtype="<f8").tobytes())


def read_instance(path) -> Instance:
    """Read an instance file. The spike is all-NaN when absent; an ``iid`` prior
    comes back as ``None`` since its support is not stored."""
    data = Path(path).read_bytes()
    if len(data) < _INSTANCE_HEADER.size:
        raise ParameterError(f"{path}: truncated header")
    magic, version, n, p, lam, seed, tag, flags = _INSTANCE_HEADER.unpack_from(data)
    if magic != b"KIKT":
        raise ParameterError(f"{path}: not an instance file")
    if version != VERSION:
        raise ParameterError(f"{path}: unsupported version {version}")
    count = binom(n, p)
    spike_len = n if flags & FLAG_SPIKE else 0
    expected = _INSTANCE_HEADER.size + 8 * (count + spike_len)
    if len(data) != expected:
        raise ParameterError(f"{path}: expected {expected} bytes, found {len(data)}")
    off = _INSTANCE_HEADER.size
    entries = np.frombuffer(data, dtype="<f8", count=count, offset=off).astype(float)
    if spike_len:
        spike = np.frombuffer(data, dtype="<f8", count=n, offset=off + 8 * count).astype(float)
    else:
        spike = np.full(n, np.nan)
    prior = SpikePrior(SpikePrior.KINDS[tag]) if tag in (0, 1) else None
    return Instance(spike, SubsetTensor(n, p, entries), lam, seed, prior)


def has_spike(instance: Instance) -> bool:
    return not np.any(np.isnan(instance.spike))


def write_dense(values: np.ndarray, path) -> None:
    values = np.asarray(values, dtype=float)
    n, p = values.shape[0], values.ndim
    if values.shape != (n,) * p:
        raise ParameterError(f"expected an n x ... x n array, got shape {values.shape}")
    with open(path, "wb") as fh:
        fh.write(_DENSE_HEADER.pack(b"KIKD", VERSION, n, p))
        fh.write(values.astype("<f8").tobytes(order="C"))


def read_dense(path) -> np.ndarray:
    data = Path(path).read_bytes()
    if len(data) < _DENSE_HEADER.size:
        raise ParameterError(f"{path}: truncated header")
    magic, version, n, p = _DENSE_HEADER.unpack_from(data)
    if magic != b"KIKD":
        raise ParameterError(f"{path}: not a dense tensor file")
    if version != VERSION:
        raise ParameterError(f"{path}: unsupported version {version}")
    expected = _DENSE_HEADER.size + 8 * n**p
    if len(data) != expected:
        raise ParameterError(f"{path}: expected {expected} bytes, found {len(data)}")
    flat = np.frombuffer(data, dtype="<f8", offset=_DENSE_HEADER.size).astype(float)
    return flat.reshape((n,) * p)


def write_formula(formula: XorFormula, path) -> None:
    with open(path, "w") as fh:
        fh.write(f"p kxor {formula.n} {formula.m} {formula.k}\n")
        for subset, sign in zip(formula.subsets, formula.signs):
            idx = " ".join(str(int(i) + 1) for i in subset)
            fh.write(f"{idx} {'+1' if sign > 0 else '-1'}\n")


def read_formula(path) -> XorFormula:
    header = None
    subsets, signs = [], []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            parts = line.split()
            if not parts or parts[0] == "c":
                continue
            if header is None:
                if len(parts) != 5 or parts[:2] != ["p", "kxor"]:
                    raise ParameterError(f"{path}:{lineno}: expected 'p kxor n m k'")
                header = tuple(int(v) for v in parts[2:])
                continue
            n, _, k = header
            if len(parts) != k + 1 or parts[-1] not in ("+1", "-1", "1"):
                raise ParameterError(f"{path}:{lineno}: expected {k} indices and a sign")
            idx = [int(v) - 1 for v in parts[:-1]]
            subsets.append(idx)
            signs.append(int(parts[-1]))
    if header is None:
        raise ParameterError(f"{path}: missing header")
    n, m, k = header
    if len(subsets) != m:
        raise ParameterError(f"{path}: header says {m} clauses, found {len(subsets)}")
    return XorFormula(n, k, np.asarray(subsets, dtype=np.int64).reshape(m, k), np.asarray(signs))
