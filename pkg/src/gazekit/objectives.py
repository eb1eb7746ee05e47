"""Training objectives over gaze maps and token sequences, with exact gradients.

The gaze loss is the forward KL divergence of the softmaxed prediction
from the ground truth, plus a hinge on the divergence gap between a
Gaussian-blurred copy of the prediction and the raw prediction:

    loss = KL(gt, pred) + hinge_weight * max(0, KL(gt, blur(pred)) - KL(gt, pred) + hinge_margin)

The hinge activates when blurring increases the divergence by more than
the margin. All gradients here are analytic and are validated against
central finite differences by the gradient-check suite; at the hinge
kink the subgradient 0 is used (the hinge contributes only when its
argument is strictly positive).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import LengthMismatch
from .grids import GazeMap, _blur_matrix, entropy, grid_values, spatial_softmax
from .saliency import DEFAULT_KL_FLOOR, kl_div

__all__ = [
    "GazeLossConfig",
    "GazeLossBreakdown",
    "LossWeights",
    "TokenSequence",
    "FitStep",
    "loss_kl",
    "grad_loss_kl",
    "loss_gaze",
    "grad_loss_gaze",
    "loss_caption",
    "grad_loss_caption",
    "total_loss",
    "fit_gaze_demo",
]


@dataclass(frozen=True)
class GazeLossConfig:
    """Hinge and blur settings for the gaze loss."""

    hinge_weight: float = 0.3
    hinge_margin: float = 0.05
    blur_sigma: float = 1.0

    def __post_init__(self):
        if self.hinge_weight < 0.0:
            raise ValueError("hinge_weight must be nonnegative")
        if self.hinge_margin < 0.0:
            raise ValueError("hinge_margin must be nonnegative")
        if not self.blur_sigma > 0.0:
            raise ValueError("blur_sigma must be positive")


@dataclass(frozen=True)
class LossWeights:
    """Mixing weights for the combined training objective."""

    gaze: float = 1.0
    caption: float = 1.0
    align: float = 0.2


@dataclass(frozen=True)
class GazeLossBreakdown:
    """Gaze loss value with its two additive parts."""

    total: float
    kl: float
    hinge: float


@dataclass(frozen=True)
class TokenSequence:
    """Target token ids for one caption, with the vocabulary size."""

    tokens: tuple[int, ...]
    vocab_size: int

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(int(t) for t in self.tokens))
        if self.vocab_size < 1:
            raise ValueError("vocab_size must be positive")
        if len(self.tokens) == 0:
            raise ValueError("token sequence must be non-empty")
        for t in self.tokens:
            if not 0 <= t < self.vocab_size:
                raise ValueError(f"token id {t} outside vocabulary of {self.vocab_size}")


class FitStep(NamedTuple):
    """One record of the demo fit: step index, loss, prediction entropy."""

    step: int
    loss: float
    entropy: float


def loss_kl(gt, pred, floor: float = DEFAULT_KL_FLOOR) -> float:
    """Forward KL divergence term, identical to the evaluation metric.

    Delegates to the single shared divergence so training and scoring
    can never drift apart.
    """
    return kl_div(gt, pred, floor)


def _kl_grad_wrt_pred(g: np.ndarray, p: np.ndarray, floor: float) -> np.ndarray:
    # Gradient of KL(g, clamp-renormalize(p)) with respect to p. Cells
    # sitting below the floor are flattened by the clamp and get zero
    # gradient; the renormalization contributes the 1/Z term.
    clamped = np.maximum(p, floor)
    z = clamped.sum()
    return np.where(p >= floor, 1.0 / z - g / clamped, 0.0)


def _softmax_backprop(p: np.ndarray, v: np.ndarray) -> np.ndarray:
    # Pull a gradient in probability space back through the softmax.
    return p * (v - (v * p).sum())


def grad_loss_kl(gt, logits, floor: float = DEFAULT_KL_FLOOR) -> np.ndarray:
    """Gradient of loss_kl(gt, softmax(logits)) with respect to the logits."""
    g = grid_values(gt)
    p = spatial_softmax(logits).values
    return _softmax_backprop(p, _kl_grad_wrt_pred(g, p, floor))


def loss_gaze(gt, logits, cfg: GazeLossConfig = GazeLossConfig()) -> GazeLossBreakdown:
    """KL-plus-hinge gaze loss on a logit grid.

    The prediction is the spatial softmax of the logits; the hinge
    compares the divergence of its blurred copy against the raw
    divergence. Both divergences use the shared clamped KL.
    """
    pred = spatial_softmax(logits)
    blurred = _blur_values(pred.values, cfg.blur_sigma)
    raw_kl = kl_div(gt, pred)
    blur_kl = kl_div(gt, blurred)
    hinge = cfg.hinge_weight * max(0.0, blur_kl - raw_kl + cfg.hinge_margin)
    return GazeLossBreakdown(total=raw_kl + hinge, kl=raw_kl, hinge=hinge)


def _blur_values(p: np.ndarray, sigma: float) -> np.ndarray:
    h, w = p.shape
    out = _blur_matrix(h, float(sigma)) @ p @ _blur_matrix(w, float(sigma)).T
    return out / out.sum()


def grad_loss_gaze(
    gt, logits, cfg: GazeLossConfig = GazeLossConfig(), floor: float = DEFAULT_KL_FLOOR
) -> np.ndarray:
    """Analytic gradient of loss_gaze with respect to every logit.

    Matches central finite differences away from the hinge kink; at the
    kink the hinge branch is treated as inactive. Because the loss is
    invariant to shifting all logits, the returned components sum to
    zero up to rounding.
    """
    g = grid_values(gt)
    p = spatial_softmax(logits).values
    h, w = p.shape
    mh = _blur_matrix(h, float(cfg.blur_sigma))
    mw = _blur_matrix(w, float(cfg.blur_sigma))
    b = mh @ p @ mw.T
    b = b / b.sum()

    raw_kl = kl_div(g, p, floor)
    blur_kl = kl_div(g, b, floor)

    v = _kl_grad_wrt_pred(g, p, floor)
    if blur_kl - raw_kl + cfg.hinge_margin > 0.0:
        v_blur = mh.T @ _kl_grad_wrt_pred(g, b, floor) @ mw
        v = v + cfg.hinge_weight * (v_blur - v)
    return _softmax_backprop(p, v)


def _step_logits(step_logits) -> np.ndarray:
    rows = np.asarray(step_logits, dtype=np.float64)
    if rows.ndim != 2:
        raise LengthMismatch("step logits must form a (steps, vocab) array")
    if not np.all(np.isfinite(rows)):
        raise ValueError("logits must be finite")
    return rows


def loss_caption(step_logits, target: TokenSequence) -> float:
    """Summed autoregressive cross-entropy of target tokens under the logits.

    ``step_logits`` holds one vocabulary-sized logit vector per target
    token. Computed with a max-shifted log-sum-exp, so large logits are
    safe.
    """
    rows = _step_logits(step_logits)
    if rows.shape[0] != len(target.tokens):
        raise LengthMismatch(
            f"{rows.shape[0]} logit rows for {len(target.tokens)} target tokens"
        )
    if rows.shape[1] != target.vocab_size:
        raise LengthMismatch(
            f"logit rows of width {rows.shape[1]} for vocabulary {target.vocab_size}"
        )
    shifted = rows - rows.max(axis=1, keepdims=True)
    lse = np.log(np.exp(shifted).sum(axis=1))
    picked = shifted[np.arange(rows.shape[0]), list(target.tokens)]
    return float((lse - picked).sum())


def grad_loss_caption(step_logits, target: TokenSequence) -> np.ndarray:
    """Gradient of loss_caption: per-step softmax minus the target one-hot."""
    rows = _step_logits(step_logits)
    if rows.shape[0] != len(target.tokens):
        raise LengthMismatch(
            f"{rows.shape[0]} logit rows for {len(target.tokens)} target tokens"
        )
    if rows.shape[1] != target.vocab_size:
        raise LengthMismatch(
            f"logit rows of width {rows.shape[1]} for vocabulary {target.vocab_size}"
        )
    shifted = np.exp(rows - rows.max(axis=1, keepdims=True))
    grad = shifted / shifted.sum(axis=1, keepdims=True)
    grad[np.arange(rows.shape[0]), list(target.tokens)] -= 1.0
    return grad


def total_loss(
    gaze: float, caption: float, align: float, weights: LossWeights = LossWeights()
) -> float:
    """Weighted sum of the three loss terms."""
    for name, v in (("gaze", gaze), ("caption", caption), ("align", align)):
        if not math.isfinite(v):
            raise ValueError(f"{name} loss must be finite")
    return weights.gaze * gaze + weights.caption * caption + weights.align * align


def fit_gaze_demo(
    gt: GazeMap,
    steps: int,
    learning_rate: float,
    cfg: GazeLossConfig = GazeLossConfig(),
    use_hinge: bool = False,
) -> list[FitStep]:
    """Fit logits to a target map by plain gradient descent.

    Logits start at zero (a uniform prediction) and take ``steps``
    updates. One record is appended per visited point, including the
    starting point, so the result has ``steps + 1`` rows and the last
    row reflects every update. With ``use_hinge`` false the loss is the
    bare KL term. Fully deterministic: no randomness is involved.
    """
    if steps < 0:
        raise ValueError("steps must be nonnegative")
    z = np.zeros_like(gt.values)
    trajectory: list[FitStep] = []
    for step in range(steps + 1):
        pred = spatial_softmax(z)
        if use_hinge:
            loss = loss_gaze(gt, z, cfg).total
            grad = grad_loss_gaze(gt, z, cfg)
        else:
            loss = kl_div(gt, pred)
            grad = grad_loss_kl(gt, z)
        trajectory.append(FitStep(step=step, loss=loss, entropy=entropy(pred)))
        if step < steps:
            z = z - learning_rate * grad
    return trajectory
