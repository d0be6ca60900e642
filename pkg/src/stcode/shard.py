"""On-disk shard format and file-level encode / decode / repair.

A shard is a fixed header followed by the node's symbols for every stripe::

    magic "STRS" | version u8 | w u8 | n u8 | k u8 | alpha u8 | mode u8
    | seed u64 | node u8 | payload_length u64 | stripe_size u32

All integers are big-endian; so are 16-bit symbols.  A stripe carries
k*alpha data cells of ``stripe_size`` symbols each, laid out row-major over
(row, data column); the node payload for a stripe is its alpha cells.
"""

from __future__ import annotations

import os
import struct
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .analysis import theorem1_lower_bound, theorem2_field_bound
from .repair import execute_repair, plan_repair
from .st_code import MODES, CodeParams, build_code, st_decode, st_encode

MAGIC = b"STRS"
VERSION = 1
HEADER = struct.Struct(">4sBBBBBBQBQI")
HEADER_SIZE = HEADER.size
SUFFIX = ".strs"


class ShardError(ValueError):
    pass


@dataclass(frozen=True)
class ShardHeader:
    w: int
    n: int
    k: int
    alpha: int
    mode: str
    seed: int
    node: int
    payload_length: int
    stripe_size: int = 1

    def pack(self) -> bytes:
        return HEADER.pack(MAGIC, VERSION, self.w, self.n, self.k, self.alpha, MODES.index(self.mode),
                           self.seed, self.node, self.payload_length, self.stripe_size)

    @classmethod
    def unpack(cls, raw: bytes) -> "ShardHeader":
        if len(raw) < HEADER_SIZE:
            raise ShardError("truncated shard header")
        magic, version, w, n, k, alpha, mode, seed, node, length, stripe = HEADER.unpack(raw[:HEADER_SIZE])
        if magic != MAGIC or version != VERSION:
            raise ShardError(f"not a version {VERSION} shard (magic={magic!r}, version={version})")
        if mode >= len(MODES):
            raise ShardError(f"unknown partition mode {mode}")
        if stripe < 1:
            raise ShardError("stripe_size must be positive")
        hdr = cls(w, n, k, alpha, MODES[mode], seed, node, length, stripe)
        hdr.params  # validates the code parameters
        if node >= n:
            raise ShardError(f"node index {node} outside n={n}")
        return hdr

    @property
    def params(self) -> CodeParams:
        return CodeParams(self.n, self.k, self.alpha, self.w, self.mode, self.seed)

    def same_code(self, other) -> bool:
        return (self.params, self.payload_length, self.stripe_size) == (
            other.params, other.payload_length, other.stripe_size)

    @property
    def symbol_bytes(self):
        return self.w // 8

    @property
    def dtype(self):
        return np.dtype(">u2") if self.w == 16 else np.dtype("u1")

    @property
    def stripes(self):
        per_stripe = self.k * self.alpha * self.stripe_size * self.symbol_bytes
        return -(-self.payload_length // per_stripe)


def pick_width(n, k, alpha) -> int:
    """Smallest supported field whose order exceeds the MDS field-size bound."""
    return 8 if theorem2_field_bound(n, k, alpha) < 256 and n <= 256 else 16


def shard_name(node: int) -> str:
    return f"node_{node:03d}{SUFFIX}"


def _umask():
    mask = os.umask(0)
    os.umask(mask)
    return mask


def _atomic_write(path: Path, chunks):
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            for chunk in chunks:
                fh.write(chunk)
        os.chmod(tmp, 0o666 & ~_umask())
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def encode_bytes(data: bytes, params: CodeParams, stripe_size: int = 1, desc=None):
    """Return (header, payload bytes) for every node."""
    desc = desc or build_code(params)
    hdr0 = ShardHeader(params.w, params.n, params.k, params.alpha, params.mode, params.seed, 0,
                       len(data), stripe_size)
    ka, L = params.k * params.alpha, stripe_size
    stripes = hdr0.stripes
    padded = data + bytes(stripes * ka * L * hdr0.symbol_bytes - len(data))
    symbols = np.frombuffer(padded, dtype=hdr0.dtype).astype(np.int64)
    cells = symbols.reshape(stripes, ka, L).transpose(1, 0, 2)
    stored = st_encode(desc, cells)  # (alpha, n, stripes, L)
    out = []
    for j in range(params.n):
        payload = stored[:, j].transpose(1, 0, 2).astype(hdr0.dtype).tobytes()
        out.append((ShardHeader(**{**hdr0.__dict__, "node": j}), payload))
    return out


def write_shards(shards, out_dir) -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for hdr, payload in shards:
        path = out_dir / shard_name(hdr.node)
        _atomic_write(path, [hdr.pack(), payload])
        paths.append(path)
    return paths


def read_header(path) -> ShardHeader:
    with open(path, "rb") as fh:
        return ShardHeader.unpack(fh.read(HEADER_SIZE))


def scan(shard_dir):
    """Headers of all shards in a directory keyed by node; checks they agree."""
    found = {}
    for path in sorted(Path(shard_dir).glob(f"*{SUFFIX}")):
        hdr = read_header(path)
        if hdr.node in found:
            raise ShardError(f"duplicate shard for node {hdr.node}: {path}")
        found[hdr.node] = (hdr, path)
    if not found:
        raise ShardError(f"no shards in {shard_dir}")
    first = next(iter(found.values()))[0]
    for hdr, path in found.values():
        if not hdr.same_code(first):
            raise ShardError(f"header mismatch in {path}")
    return found


def _payload(hdr, path):
    """Memory-mapped node payload shaped (stripes, alpha, stripe_size)."""
    shape = (hdr.stripes, hdr.alpha, hdr.stripe_size)
    if hdr.stripes == 0:
        return np.zeros(shape, dtype=hdr.dtype)
    expected = HEADER_SIZE + int(np.prod(shape)) * hdr.symbol_bytes
    if os.path.getsize(path) != expected:
        raise ShardError(f"{path} has the wrong size for its header")
    return np.memmap(path, dtype=hdr.dtype, mode="r", offset=HEADER_SIZE, shape=shape)


class TrackedColumn:
    """Node column whose row reads are counted (symbols across all stripes)."""

    def __init__(self, payload, reads, node):
        self._payload = payload
        self._reads = reads
        self._node = node

    def __getitem__(self, row):
        if not 0 <= row < self._payload.shape[1]:
            raise IndexError(row)
        self._reads.append((row, self._node))
        return np.asarray(self._payload[:, row, :], dtype=np.int64)


def decode_dir(shard_dir) -> bytes:
    found = scan(shard_dir)
    hdr = next(iter(found.values()))[0]
    if len(found) < hdr.k:
        raise ShardError(f"need {hdr.k} shards to decode, found {len(found)}")
    desc = build_code(hdr.params)
    nodes = sorted(found)[: hdr.k]
    columns = {j: np.asarray(_payload(*found[j]), dtype=np.int64).transpose(1, 0, 2) for j in nodes}
    cells = st_decode(desc, columns)  # (k*alpha, stripes, L)
    raw = cells.transpose(1, 0, 2).astype(hdr.dtype).tobytes()
    return raw[: hdr.payload_length]


@dataclass(frozen=True)
class RepairReport:
    node: int
    symbols_per_stripe: int
    s1: int
    s2: int
    s3: int
    stripes: int
    stripe_size: int
    symbols_read: int
    ratio: float
    theorem1_bound: int

    def as_dict(self):
        return dict(self.__dict__)


def repair_dir(shard_dir, node: int, out_path=None) -> RepairReport:
    """Regenerate shard ``node`` from the others, reading only planned symbols."""
    found = scan(shard_dir)
    found.pop(node, None)
    hdr = next(iter(found.values()))[0]
    if not 0 <= node < hdr.n:
        raise ShardError(f"node {node} outside n={hdr.n}")
    desc = build_code(hdr.params)
    plan = plan_repair(desc, node)
    missing = sorted({j for _, j in plan.downloads} - set(found))
    if missing:
        raise ShardError(f"insufficient shards: repair of node {node} needs nodes {missing}")
    reads = []
    columns = {j: TrackedColumn(_payload(*found[j]), reads, j) for j in found}
    rebuilt = execute_repair(desc, plan, columns)  # (alpha, stripes, L)
    payload = rebuilt.transpose(1, 0, 2).astype(hdr.dtype).tobytes()
    new_hdr = ShardHeader(**{**hdr.__dict__, "node": node})
    out_path = Path(out_path) if out_path else Path(shard_dir) / shard_name(node)
    _atomic_write(out_path, [new_hdr.pack(), payload])
    ka = hdr.k * hdr.alpha
    return RepairReport(
        node, plan.total_downloads, len(plan.s1), len(plan.s2), len(plan.s3),
        hdr.stripes, hdr.stripe_size, len(reads) * hdr.stripes * hdr.stripe_size,
        plan.total_downloads / ka, theorem1_lower_bound(hdr.n, hdr.k, hdr.alpha),
    )
