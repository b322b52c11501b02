"""File formats and run-configuration parsing.

All labels are 1-based on disk and 0-based in memory.  Data files
(feature matrix, co-clustering matrix) round-trip at full double precision;
report files (results, traces) use 6 decimals.  Writes go through a
temporary file in the target directory followed by an atomic rename.
"""

from __future__ import annotations

import os
import tempfile
from pathlib import Path

import numpy as np

from .model import Labeling, Network, VectorDataset

__all__ = [
    "FormatError",
    "read_vectors", "write_vectors",
    "read_network", "write_network",
    "read_labels", "write_labels",
    "read_coclust", "write_coclust",
    "write_pgm", "pgm_pixels", "map_ordering",
    "write_results_csv", "write_trace_csv",
    "parse_config_file", "CONFIG_KEYS",
]


class FormatError(ValueError):
    """Malformed input file."""


def _atomic_write(path, data: bytes):
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or Path("."), prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.chmod(tmp, 0o644)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_vectors(path, data: VectorDataset):
    lines = [",".join("%.17g" % v for v in row) for row in data.values]
    _atomic_write(path, ("\n".join(lines) + "\n").encode())


def read_vectors(path) -> VectorDataset:
    rows = []
    width = None
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                row = [float(f) for f in line.split(",")]
            except ValueError as exc:
                raise FormatError(f"{path}:{lineno}: bad numeric field ({exc})") from None
            if width is None:
                width = len(row)
            elif len(row) != width:
                raise FormatError(f"{path}:{lineno}: expected {width} fields, got {len(row)}")
            rows.append(row)
    if not rows:
        raise FormatError(f"{path}: empty feature matrix")
    return VectorDataset(np.array(rows))


def write_network(path, net: Network):
    lines = [f"n {net.n}"]
    iu, ju = np.nonzero(np.triu(net.adjacency, 1))
    for i, j in zip(iu, ju):
        lines.append(f"{i + 1} {j + 1}")
    _atomic_write(path, ("\n".join(lines) + "\n").encode())


def read_network(path) -> Network:
    with open(path) as fh:
        header = fh.readline()
        parts = header.split()
        if len(parts) != 2 or parts[0] != "n":
            raise FormatError(f"{path}:1: expected header 'n <N>', got {header.strip()!r}")
        try:
            n = int(parts[1])
        except ValueError:
            raise FormatError(f"{path}:1: bad object count {parts[1]!r}") from None
        if n < 1:
            raise FormatError(f"{path}:1: object count must be positive")
        adj = np.zeros((n, n), dtype=np.uint8)
        for lineno, line in enumerate(fh, 2):
            line = line.strip()
            if not line:
                continue
            fields = line.split()
            if len(fields) != 2:
                raise FormatError(f"{path}:{lineno}: expected 'u v'")
            try:
                u, v = int(fields[0]), int(fields[1])
            except ValueError:
                raise FormatError(f"{path}:{lineno}: non-integer endpoint") from None
            if not (1 <= u <= n and 1 <= v <= n):
                raise FormatError(f"{path}:{lineno}: endpoint out of range 1..{n}")
            if u == v:
                raise FormatError(f"{path}:{lineno}: self loop {u}")
            if not u < v:
                raise FormatError(f"{path}:{lineno}: endpoints must satisfy u < v")
            if adj[u - 1, v - 1]:
                raise FormatError(f"{path}:{lineno}: duplicate edge {u} {v}")
            adj[u - 1, v - 1] = 1
            adj[v - 1, u - 1] = 1
    return Network(adj)


def write_labels(path, labeling: Labeling):
    body = "\n".join(str(int(v) + 1) for v in labeling.labels)
    _atomic_write(path, (body + "\n").encode())


def read_labels(path) -> Labeling:
    vals = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                v = int(line)
            except ValueError:
                raise FormatError(f"{path}:{lineno}: bad label {line!r}") from None
            if v < 1:
                raise FormatError(f"{path}:{lineno}: labels are 1-based, got {v}")
            vals.append(v - 1)
    if not vals:
        raise FormatError(f"{path}: empty labels file")
    labels = np.array(vals, dtype=np.int64)
    return Labeling(labels, int(labels.max()) + 1)


def write_coclust(path, matrix: np.ndarray):
    matrix = np.asarray(matrix, dtype=np.float64)
    lines = [",".join("%.17g" % v for v in row) for row in matrix]
    _atomic_write(path, ("\n".join(lines) + "\n").encode())


def read_coclust(path) -> np.ndarray:
    data = read_vectors(path).values
    if data.shape[0] != data.shape[1]:
        raise FormatError(f"{path}: co-clustering matrix must be square, got {data.shape}")
    if data.min() < 0.0 or data.max() > 1.0:
        raise FormatError(f"{path}: co-clustering entries must lie in [0,1]")
    return data


def map_ordering(map_labels: np.ndarray) -> np.ndarray:
    """Object order sorted by (MAP cluster, original index)."""
    map_labels = np.asarray(map_labels)
    return np.lexsort((np.arange(map_labels.size), map_labels))


def pgm_pixels(matrix: np.ndarray, order: np.ndarray | None = None) -> np.ndarray:
    """8-bit pixel matrix: round(255 * coclustering), optionally reordered."""
    m = np.asarray(matrix, dtype=np.float64)
    if order is not None:
        m = m[np.ix_(order, order)]
    return np.clip(np.rint(255.0 * m), 0, 255).astype(np.uint8)


def write_pgm(path, matrix: np.ndarray, order: np.ndarray | None = None):
    pix = pgm_pixels(matrix, order)
    header = f"P5\n{pix.shape[1]} {pix.shape[0]}\n255\n".encode()
    _atomic_write(path, header + pix.tobytes())


def write_results_csv(path, rows):
    """rows: iterable of (method, mean, sd)."""
    lines = ["method,mean_ari,sd_ari"]
    for method, mean, sd in rows:
        lines.append("%s,%.6f,%.6f" % (method, mean, sd))
    _atomic_write(path, ("\n".join(lines) + "\n").encode())


def write_trace_csv(path, traces: np.ndarray):
    """traces: (n_chains, iterations) log-posterior values."""
    traces = np.atleast_2d(np.asarray(traces, dtype=np.float64))
    header = "iteration," + ",".join(f"chain_{c + 1}" for c in range(traces.shape[0]))
    lines = [header]
    for t in range(traces.shape[1]):
        lines.append(str(t + 1) + "," + ",".join("%.6f" % traces[c, t]
                                                 for c in range(traces.shape[0])))
    _atomic_write(path, ("\n".join(lines) + "\n").encode())


# ---------------------------------------------------------------------------
# run configuration
# ---------------------------------------------------------------------------

_SCALARS = {
    "k": int, "iterations": int, "burn_in": int, "n_chains": int, "seed": int,
    "eta": float, "alpha": float, "v0": float, "beta1": float, "beta2": float,
}
_VECTORS = ("mu0", "t_scale_diag", "a_dirichlet")
CONFIG_KEYS = tuple(_SCALARS) + _VECTORS


def parse_config_file(path) -> dict:
    """Parse flat ``key = value`` lines; '#' starts a comment; unknown keys error."""
    out: dict = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise FormatError(f"{path}:{lineno}: expected 'key = value'")
            key, _, value = line.partition("=")
            key = key.strip()
            value = value.strip()
            if key in _SCALARS:
                try:
                    out[key] = _SCALARS[key](value)
                except ValueError:
                    raise FormatError(f"{path}:{lineno}: bad value for {key}: {value!r}") from None
            elif key in _VECTORS:
                try:
                    out[key] = np.array([float(f) for f in value.split(",")])
                except ValueError:
                    raise FormatError(f"{path}:{lineno}: bad vector for {key}: {value!r}") from None
            else:
                raise FormatError(f"{path}:{lineno}: unknown key {key!r}")
    return out
