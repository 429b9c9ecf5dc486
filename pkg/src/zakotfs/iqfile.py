"""
Raw I/Q files: one UTF-8 text header line starting with ``#`` and made of
``key=value`` tokens, followed by little-endian float64 samples
interleaved as ``re0, im0, re1, im1, ...``.
"""

from __future__ import annotations

from typing import Dict, Tuple

import numpy as np

from .errors import InvalidConfig

MAGIC = "zakotfs-iq/1"


def write_iq(path, samples: np.ndarray, header: Dict[str, object]) -> None:
    x = np.asarray(samples, dtype=np.complex128).reshape(-1)
    tokens = [MAGIC] + [f"{k}={v}" for k, v in header.items()] + [f"samples={x.size}"]
    for t in tokens:
        if any(c.isspace() for c in t):
            raise InvalidConfig(f"header token {t!r} contains whitespace")
    inter = np.empty(2 * x.size, dtype="<f8")
    inter[0::2] = x.real
    inter[1::2] = x.imag
    with open(path, "wb") as fh:
        fh.write(("# " + " ".join(tokens) + "\n").encode("utf-8"))
        fh.write(inter.tobytes())


def read_iq(path) -> Tuple[Dict[str, str], np.ndarray]:
    """Return ``(header, samples)``; header values stay strings."""
    with open(path, "rb") as fh:
        line = fh.readline()
        body = fh.read()
    text = line.decode("utf-8").strip()
    if not text.startswith("#"):
        raise InvalidConfig(f"{path}: missing '#' header line")
    tokens = text[1:].split()
    if not tokens or tokens[0] != MAGIC:
        raise InvalidConfig(f"{path}: not a {MAGIC} file")
    header = dict(t.split("=", 1) for t in tokens[1:])
    data = np.frombuffer(body, dtype="<f8")
    if data.size % 2:
        raise InvalidConfig(f"{path}: odd number of float64 values")
    x = data[0::2] + 1j * data[1::2]
    if "samples" in header and int(header["samples"]) != x.size:
        raise InvalidConfig(f"{path}: header announces {header['samples']} samples, found {x.size}")
    return header, x
