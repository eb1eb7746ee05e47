"""Gaze-weighted pooling, shared-space projection, and contrastive alignment.

A feature stack is pooled into one vector per item by weighting its
spatial cells with a gaze map, projected by an affine head into a shared
embedding space, and scored against matching text embeddings with a
temperature-scaled contrastive loss. The loss is one-directional: each
visual embedding is the anchor and the matching text embedding is its
positive against all other texts in the batch. A symmetric variant that
averages the text-anchored direction in as well is available behind a
flag and is never the default.

Similarities are cosine, so the loss is invariant to rescaling any
single embedding. Analytic gradients for the loss and for the full
pooling -> projection -> loss chain are provided and are checked
against central finite differences by the gradient-check suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateNorm, ShapeMismatch
from .grids import FeatureGrid, grid_values

__all__ = [
    "DEFAULT_TEMPERATURE",
    "ProjectionHead",
    "as_embedding_batch",
    "gaze_weighted_pool",
    "project",
    "cosine_sim",
    "info_nce",
    "grad_info_nce",
    "pooled_embeddings",
    "align_path_loss",
    "align_path_weight_grad",
]

#: Default softmax temperature for the contrastive loss.
DEFAULT_TEMPERATURE = 0.07

_NORM_FLOOR = 1e-8


@dataclass(frozen=True, eq=False)
class ProjectionHead:
    """Affine map into the shared embedding space: weight @ x + bias."""

    weight: np.ndarray
    bias: np.ndarray

    def __post_init__(self):
        w = np.array(np.asarray(self.weight, dtype=np.float64), order="C")
        b = np.array(np.asarray(self.bias, dtype=np.float64), order="C")
        if w.ndim != 2 or w.size == 0:
            raise ValueError("weight must be a non-empty (out_dim, in_dim) matrix")
        if b.shape != (w.shape[0],):
            raise ShapeMismatch(f"bias shape {b.shape} does not match {w.shape[0]} outputs")
        if not (np.all(np.isfinite(w)) and np.all(np.isfinite(b))):
            raise ValueError("projection parameters must be finite")
        w.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "weight", w)
        object.__setattr__(self, "bias", b)

    @property
    def in_dim(self) -> int:
        return self.weight.shape[1]

    @property
    def out_dim(self) -> int:
        return self.weight.shape[0]

    @classmethod
    def seeded(cls, in_dim: int, out_dim: int = 256, seed: int = 0) -> "ProjectionHead":
        """Reproducible random head: uniform in [-k, k], k = 1/sqrt(in_dim)."""
        if in_dim < 1 or out_dim < 1:
            raise ValueError("dimensions must be positive")
        k = 1.0 / math.sqrt(in_dim)
        rng = np.random.default_rng(seed)
        return cls(
            weight=rng.uniform(-k, k, size=(out_dim, in_dim)),
            bias=rng.uniform(-k, k, size=out_dim),
        )


def as_embedding_batch(batch) -> np.ndarray:
    """Validate and return a (batch, dim) float64 embedding matrix."""
    m = np.asarray(batch, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise ShapeMismatch("embeddings must form a non-empty (batch, dim) matrix")
    if not np.all(np.isfinite(m)):
        raise ValueError("embeddings must be finite")
    return m


def gaze_weighted_pool(features, weights) -> np.ndarray:
    """Collapse (channels, h, w) features to one vector using cell weights.

    Each output channel is the weight-weighted sum of that channel's
    cells, which is linear in both arguments.
    """
    f = features.values if isinstance(features, FeatureGrid) else np.asarray(features, dtype=np.float64)
    if f.ndim != 3:
        raise ShapeMismatch("features must be a (channels, h, w) array")
    w = grid_values(weights)
    if f.shape[1:] != w.shape:
        raise ShapeMismatch(f"feature cells {f.shape[1:]} do not match weights {w.shape}")
    return np.tensordot(f, w, axes=((1, 2), (0, 1)))


def project(head: ProjectionHead, vec) -> np.ndarray:
    """Apply a projection head to one vector."""
    v = np.asarray(vec, dtype=np.float64)
    if v.shape != (head.in_dim,):
        raise ShapeMismatch(f"vector of shape {v.shape} for head expecting ({head.in_dim},)")
    return head.weight @ v + head.bias


def cosine_sim(a, b) -> float:
    """Cosine similarity; raises DegenerateNorm on a near-zero vector."""
    va = np.asarray(a, dtype=np.float64).ravel()
    vb = np.asarray(b, dtype=np.float64).ravel()
    if va.shape != vb.shape:
        raise ShapeMismatch("vectors must share a dimension")
    na = float(np.linalg.norm(va))
    nb = float(np.linalg.norm(vb))
    if na < _NORM_FLOOR or nb < _NORM_FLOOR:
        raise DegenerateNorm("cosine similarity is undefined near the zero vector")
    return float(va @ vb / (na * nb))


def _unit_rows(m: np.ndarray, label: str) -> tuple[np.ndarray, np.ndarray]:
    norms = np.linalg.norm(m, axis=1)
    if norms.min() < _NORM_FLOOR:
        raise DegenerateNorm(f"{label} embedding with near-zero norm")
    return m / norms[:, None], norms


def _one_direction(scores: np.ndarray) -> float:
    # Mean over rows of logsumexp(row) - diagonal, max-shifted for stability.
    shift = scores.max(axis=1, keepdims=True)
    lse = np.log(np.exp(scores - shift).sum(axis=1)) + shift[:, 0]
    return float((lse - np.diag(scores)).mean())


def info_nce(u_vis, u_txt, tau: float = DEFAULT_TEMPERATURE, symmetric: bool = False) -> float:
    """Contrastive batch loss over matched visual/text embedding rows.

    Row i of each batch is a matched pair. With visual anchors, the loss
    is the mean cross-entropy of picking text i for visual i among all
    texts, at temperature ``tau``. Always nonnegative, and exactly zero
    for a single-item batch.
    """
    if not tau > 0.0:
        raise ValueError("tau must be positive")
    v = as_embedding_batch(u_vis)
    t = as_embedding_batch(u_txt)
    if v.shape != t.shape:
        raise ShapeMismatch(f"batch shapes differ: {v.shape} vs {t.shape}")
    vh, _ = _unit_rows(v, "visual")
    th, _ = _unit_rows(t, "text")
    scores = (vh @ th.T) / tau
    loss = _one_direction(scores)
    if symmetric:
        loss = 0.5 * (loss + _one_direction(scores.T))
    return loss


def grad_info_nce(
    u_vis, u_txt, tau: float = DEFAULT_TEMPERATURE
) -> tuple[np.ndarray, np.ndarray]:
    """Analytic gradient of the visual-anchored loss for both batches.

    Returns (grad_u_vis, grad_u_txt). The gradient passes through the
    cosine normalization, so each row's gradient is orthogonal to that
    row: rescaling an embedding does not change the loss.
    """
    if not tau > 0.0:
        raise ValueError("tau must be positive")
    v = as_embedding_batch(u_vis)
    t = as_embedding_batch(u_txt)
    if v.shape != t.shape:
        raise ShapeMismatch(f"batch shapes differ: {v.shape} vs {t.shape}")
    b = v.shape[0]
    vh, vn = _unit_rows(v, "visual")
    th, tn = _unit_rows(t, "text")
    cos = vh @ th.T
    scores = cos / tau
    shift = scores.max(axis=1, keepdims=True)
    expd = np.exp(scores - shift)
    soft = expd / expd.sum(axis=1, keepdims=True)
    d = (soft - np.eye(b)) / (b * tau)

    grad_vh = d @ th
    grad_th = d.T @ vh
    radial_v = (d * cos).sum(axis=1)
    radial_t = (d * cos).sum(axis=0)
    grad_v = (grad_vh - radial_v[:, None] * vh) / vn[:, None]
    grad_t = (grad_th - radial_t[:, None] * th) / tn[:, None]
    return grad_v, grad_t


def _feature_batch(features) -> np.ndarray:
    if isinstance(features, np.ndarray):
        f = np.asarray(features, dtype=np.float64)
        if f.ndim != 4:
            raise ShapeMismatch("features must be a (batch, channels, h, w) array")
        return f
    rows = [g.values if isinstance(g, FeatureGrid) else np.asarray(g, dtype=np.float64) for g in features]
    return np.stack(rows)


def _weight_batch(weights) -> np.ndarray:
    if isinstance(weights, np.ndarray) and weights.ndim == 3:
        return np.asarray(weights, dtype=np.float64)
    return np.stack([grid_values(w) for w in weights])


def pooled_embeddings(features, weights, head: ProjectionHead) -> np.ndarray:
    """Pool and project a batch: one shared-space embedding row per item."""
    f = _feature_batch(features)
    w = _weight_batch(weights)
    if f.shape[0] != w.shape[0] or f.shape[2:] != w.shape[1:]:
        raise ShapeMismatch(f"feature batch {f.shape} does not match weights {w.shape}")
    pooled = np.einsum("bchw,bhw->bc", f, w)
    return pooled @ head.weight.T + head.bias


def align_path_loss(features, weights, head: ProjectionHead, u_txt, tau: float = DEFAULT_TEMPERATURE) -> float:
    """Contrastive loss of the full pooling -> projection -> loss chain."""
    return info_nce(pooled_embeddings(features, weights, head), u_txt, tau)


def align_path_weight_grad(
    features, weights, head: ProjectionHead, u_txt, tau: float = DEFAULT_TEMPERATURE
) -> np.ndarray:
    """Gradient of align_path_loss with respect to every pooling weight.

    Returns a (batch, h, w) array: the chain rule applied through the
    projection head and the pooling sum for each item.
    """
    f = _feature_batch(features)
    w = _weight_batch(weights)
    u_vis = pooled_embeddings(f, w, head)
    grad_vis, _ = grad_info_nce(u_vis, u_txt, tau)
    back = grad_vis @ head.weight
    return np.einsum("bc,bchw->bhw", back, f)
