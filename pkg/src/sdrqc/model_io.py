"""Model file persistence.

Layout (version 1, magic "SDRQC1\\n"):

    SDRQC1\\n
    q k n_in n_out tau_min tau_max seed\\n
    <f block> <h block> <d block>

Each block is an unsigned 64-bit little-endian byte length followed by the
matrix's bits, row-major, run-length encoded: a sequence of unsigned 32-bit
little-endian run lengths, alternating bit value and starting with a zero
run (a leading one-run is expressed by a zero-length zero run). Runs longer
than 2**32-1 are split with zero-length runs of the opposite value.

Saving the same state twice yields byte-identical files; loading rejects
unknown magic, malformed headers, short or oversized payloads, and trailing
bytes. Writes go to a temp file in the target directory and are renamed into
place so a failed save never leaves a partial model.
"""

from __future__ import annotations

import os
import struct
import tempfile
from pathlib import Path

import numpy as np

from .codes import FieldGeometry
from .errors import ModelFormatError
from .memory import ModelParams, SdrMemory

MODEL_MAGIC = b"SDRQC1\n"

_U32_MAX = 0xFFFFFFFF


def rle_encode(flat: np.ndarray) -> bytes:
    """Encode a flat 0/1 array as alternating u32 run lengths (zeros first)."""
    flat = np.asarray(flat, dtype=np.uint8).ravel()
    if flat.size == 0:
        return b""
    change = np.flatnonzero(np.diff(flat)) + 1
    bounds = np.concatenate(([0], change, [flat.size]))
    lengths = np.diff(bounds)
    runs: list[int] = [] if flat[0] == 0 else [0]
    for length in lengths:
        remaining = int(length)
        while remaining > _U32_MAX:
            runs.extend((_U32_MAX, 0))
            remaining -= _U32_MAX
        runs.append(remaining)
    return np.asarray(runs, dtype="<u4").tobytes()


def rle_decode(data: bytes, nbits: int) -> np.ndarray:
    """Inverse of rle_encode; validates the run total against nbits."""
    if len(data) % 4 != 0:
        raise ModelFormatError(f"run-length payload of {len(data)} bytes is not u32 aligned")
    runs = np.frombuffer(data, dtype="<u4").astype(np.int64)
    total = int(runs.sum())
    if total != nbits:
        raise ModelFormatError(f"run lengths cover {total} bits, expected {nbits}")
    values = np.zeros(runs.size, dtype=np.uint8)
    values[1::2] = 1
    return np.repeat(values, runs)


def save_model(memory: SdrMemory, path: str | Path) -> None:
    """Serialize `memory` to `path` atomically (temp file + rename)."""
    params = memory.params
    geom = params.geometry
    header = (
        f"{geom.q} {geom.k} {geom.n_in} {geom.n_out} "
        f"{float(params.tau_min)!r} {float(params.tau_max)!r} {params.seed}\n"
    )
    chunks = [MODEL_MAGIC, header.encode("ascii")]
    for matrix in (memory.f, memory.h, memory.d):
        payload = rle_encode(matrix)
        chunks.append(struct.pack("<Q", len(payload)))
        chunks.append(payload)
    _write_atomic(Path(path), b"".join(chunks))


def load_model(path: str | Path) -> SdrMemory:
    """Deserialize a model file; raises ModelFormatError on any damage."""
    data = Path(path).read_bytes()
    if not data.startswith(MODEL_MAGIC):
        raise ModelFormatError("unknown magic or version")
    try:
        header_end = data.index(b"\n", len(MODEL_MAGIC))
    except ValueError:
        raise ModelFormatError("missing header line") from None
    header = data[len(MODEL_MAGIC) : header_end].decode("ascii", errors="replace")
    fields = header.split()
    if len(fields) != 7:
        raise ModelFormatError(f"header has {len(fields)} fields, expected 7")
    try:
        q, k, n_in, n_out = (int(x) for x in fields[:4])
        tau_min, tau_max = float(fields[4]), float(fields[5])
        seed = int(fields[6])
        params = ModelParams(
            geometry=FieldGeometry(q=q, k=k, n_in=n_in, n_out=n_out),
            tau_min=tau_min,
            tau_max=tau_max,
            seed=seed,
        )
    except (ValueError, TypeError) as exc:
        raise ModelFormatError(f"bad header: {exc}") from exc

    geom = params.geometry
    pos = header_end + 1
    matrices = []
    for name, shape in (
        ("f", (geom.n_in, geom.units)),
        ("h", (geom.units, geom.units)),
        ("d", (geom.units, geom.n_out)),
    ):
        if pos + 8 > len(data):
            raise ModelFormatError(f"truncated before {name} block length")
        (length,) = struct.unpack_from("<Q", data, pos)
        pos += 8
        if pos + length > len(data):
            raise ModelFormatError(f"{name} block of {length} bytes overruns the file")
        block = data[pos : pos + length]
        pos += length
        bits = rle_decode(block, shape[0] * shape[1])
        matrices.append(bits.reshape(shape))
    if pos != len(data):
        raise ModelFormatError(f"{len(data) - pos} trailing bytes after d block")
    return SdrMemory.restore(params, *matrices)


def _write_atomic(path: Path, data: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(data)
        os.replace(tmp_name, path)
    except BaseException:
        try:
            os.unlink(tmp_name)
        except OSError:
            pass
        raise
