"""Fixed-dimension sketches of sparse PageRank vectors.

A sparse vector is first thresholded (entries at or below a cutoff are
dropped) and then folded into a dense vector of fixed length: each
surviving node id is hashed to a bucket and to a sign, and the signed
log-magnitude of its value is accumulated there. Distances between the
sketches of consecutive snapshots are the per-node anomaly signal.

Hash scheme v1 (stable across releases; changing any constant is a
breaking format change): the 64-bit finalizer below (splitmix64) is
applied to ``node_id XOR mix(seed)`` for the bucket stream and to
``node_id XOR mix(seed XOR sign_salt)`` for the sign stream; the bucket
is the hash modulo the dimension and the sign is the low bit mapped to
{-1, +1}.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import IncompatibleEmbeddingError, InternalInconsistencyError

DEFAULT_DIM = 1024
SPARSIFY_CEIL = 1e-4

_MASK64 = np.uint64(0xFFFFFFFFFFFFFFFF)
_SIGN_SALT = 0xA5A5A5A5A5A5A5A5

VALUE_MODES = ("log-ratio", "log-raw")


def _splitmix64(x: np.ndarray) -> np.ndarray:
    x = (x + np.uint64(0x9E3779B97F4A7C15)) & _MASK64
    x = ((x ^ (x >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)) & _MASK64
    x = ((x ^ (x >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)) & _MASK64
    return x ^ (x >> np.uint64(31))


def _mix_scalar(x: int) -> np.uint64:
    # pure-python ints avoid numpy's scalar overflow warnings
    m = 0xFFFFFFFFFFFFFFFF
    x = (x + 0x9E3779B97F4A7C15) & m
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & m
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & m
    return np.uint64(x ^ (x >> 31))


def bucket_and_sign(
    ids: np.ndarray, dim: int, hash_seed: int
) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic bucket in [0, dim) and sign in {-1, +1} per node id."""
    ids = ids.astype(np.uint64, copy=False)
    h_bucket = _splitmix64(ids ^ _mix_scalar(hash_seed))
    h_sign = _splitmix64(ids ^ _mix_scalar(hash_seed ^ _SIGN_SALT))
    buckets = (h_bucket % np.uint64(dim)).astype(np.int64)
    signs = 1.0 - 2.0 * (h_sign & np.uint64(1)).astype(np.float64)
    return buckets, signs


@dataclass
class SparsifyConfig:
    """Cutoff for dropping near-zero PageRank entries before sketching."""

    epsilon_c: float

    @classmethod
    def from_node_count(cls, node_count: int) -> "SparsifyConfig":
        if node_count <= 0:
            return cls(SPARSIFY_CEIL)
        return cls(min(1.0 / node_count, SPARSIFY_CEIL))


def sparsify(p, cfg: SparsifyConfig) -> dict[int, float]:
    """Drop entries at or below the cutoff (negatives always drop)."""
    eps_c = cfg.epsilon_c
    return {i: q for i, q in p.items() if q > eps_c}


@dataclass(eq=False)
class Embedding:
    """Dense sketch of one node's PageRank vector.

    Embeddings are only comparable when they share both the dimension
    and the hash seed.
    """

    values: np.ndarray
    dim: int
    hash_seed: int


def zero_embedding(dim: int, hash_seed: int) -> Embedding:
    return Embedding(np.zeros(dim), dim, hash_seed)


def reduce_dim(
    p,
    dim: int,
    hash_seed: int,
    cfg: SparsifyConfig,
    value_mode: str = "log-ratio",
) -> Embedding:
    """Fold an already-sparsified vector into a fixed-length sketch.

    ``log-ratio`` accumulates ln(value / cutoff), which is positive on
    every surviving entry; ``log-raw`` accumulates the literal
    ln(value), which is negative for values below 1. The support is
    sorted before accumulation so the result is independent of input
    ordering, bit for bit.
    """
    if value_mode not in VALUE_MODES:
        raise ValueError(f"value_mode must be one of {VALUE_MODES}, got {value_mode!r}")
    if dim <= 0:
        raise ValueError(f"dim must be positive, got {dim}")
    out = np.zeros(dim)
    if p:
        ids = np.array(sorted(p), dtype=np.uint64)
        vals = np.array([p[int(i)] for i in ids], dtype=np.float64)
        if np.any(vals <= 0.0):
            raise InternalInconsistencyError(
                "non-positive entry in sparsified support; sparsify() was skipped"
            )
        if value_mode == "log-ratio":
            logs = np.log(vals / cfg.epsilon_c)
        else:
            logs = np.log(vals)
        buckets, signs = bucket_and_sign(ids, dim, hash_seed)
        out = np.bincount(buckets, weights=signs * logs, minlength=dim)
    return Embedding(out, dim, hash_seed)


def distance(a: Embedding, b: Embedding, p_norm: float = 2.0) -> float:
    """Minkowski distance between two compatible embeddings."""
    if a.dim != b.dim or a.hash_seed != b.hash_seed:
        raise IncompatibleEmbeddingError(
            f"dim/seed mismatch: ({a.dim},{a.hash_seed}) vs ({b.dim},{b.hash_seed})"
        )
    if p_norm < 1.0:
        raise ValueError(f"p_norm must be >= 1, got {p_norm}")
    diff = np.abs(a.values - b.values)
    if p_norm == 1.0:
        return float(diff.sum())
    if p_norm == 2.0:
        return float(np.sqrt(np.sum(diff * diff)))
    return float(np.sum(diff**p_norm) ** (1.0 / p_norm))


def write_embeddings_csv(path, embeddings) -> None:
    """Dump embeddings as ``node_id,dim_0,...,dim_{d-1}`` rows."""
    items = sorted(embeddings.items())
    with open(path, "w", encoding="utf-8") as fh:
        if items:
            d = items[0][1].dim
            fh.write("node_id," + ",".join(f"dim_{k}" for k in range(d)) + "\n")
        for node, emb in items:
            fh.write(str(node) + "," + ",".join(f"{x:.17g}" for x in emb.values) + "\n")
