"""Agreement metrics between predicted gaze maps, ground truth, and fixations.

The suite follows the usual saliency-benchmark conventions:

* CC is the Pearson correlation over cells, standardized with the
  population (not sample) standard deviation,
* KL is the forward divergence of the prediction from the ground truth,
  with the prediction floored at 1e-8 and renormalized before taking logs,
* SIM is histogram intersection (sum of per-cell minima),
* NSS standardizes the prediction and averages it at fixated cells,
* AUC-Judd and AUC-Borji sweep thresholds over the predicted values at
  fixated cells with a ">= threshold" decision rule, so a constant
  prediction scores exactly 0.5.

Maps are scored exactly as given: nothing here blurs, recenters, or
rescales its inputs first. NSS and the AUCs only use the ranking or
affine position of raw values, so they accept bare value grids as well
as normalized maps.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    AllFixated,
    DegenerateRange,
    InsufficientNegatives,
    NoFixations,
    ShapeMismatch,
    ZeroVariance,
)
from .grids import fixation_mask, grid_values

__all__ = [
    "DEFAULT_KL_FLOOR",
    "MetricReport",
    "cc",
    "kl_div",
    "sim",
    "nss",
    "auc_judd",
    "auc_borji",
    "radar_normalize",
    "score_maps",
]

#: Lower clamp applied to predictions inside the KL computation.
DEFAULT_KL_FLOOR = 1e-8

_STD_FLOOR = 1e-12


def _paired_values(a, b) -> tuple[np.ndarray, np.ndarray]:
    va, vb = grid_values(a), grid_values(b)
    if va.shape != vb.shape:
        raise ShapeMismatch(f"grid shapes differ: {va.shape} vs {vb.shape}")
    return va, vb


def cc(pred, gt) -> float:
    """Pearson correlation coefficient between two maps, taken over cells.

    Raises ZeroVariance when either map's population standard deviation
    falls below 1e-12.
    """
    p, g = _paired_values(pred, gt)
    dp = p - p.mean()
    dg = g - g.mean()
    sp = np.sqrt((dp * dp).mean())
    sg = np.sqrt((dg * dg).mean())
    if sp < _STD_FLOOR or sg < _STD_FLOOR:
        raise ZeroVariance("correlation needs non-constant maps")
    return float((dp * dg).mean() / (sp * sg))


def kl_div(gt, pred, floor: float = DEFAULT_KL_FLOOR) -> float:
    """Forward KL divergence of ``pred`` from ``gt`` in nats.

    The prediction is clamped below at ``floor`` and renormalized, which
    keeps the result finite when the prediction has empty cells. Cells
    where the ground truth is zero contribute nothing. This is the one
    canonical divergence shared by evaluation, training losses, and
    dataset curation.
    """
    g, p = _paired_values(gt, pred)
    clamped = np.maximum(p, floor)
    q = clamped / clamped.sum()
    mask = g > 0.0
    gs = g[mask]
    total = float((gs * (np.log(gs) - np.log(q[mask]))).sum())
    return max(0.0, total)


def sim(pred, gt) -> float:
    """Histogram intersection: the summed per-cell minimum of two maps."""
    p, g = _paired_values(pred, gt)
    return float(np.minimum(p, g).sum())


def nss(pred, fix) -> float:
    """Normalized scanpath saliency: standardized prediction at fixations.

    The prediction is shifted to zero mean and unit population standard
    deviation, then averaged over fixated cells.
    """
    p = grid_values(pred)
    mask = fixation_mask(fix)
    if p.shape != mask.shape:
        raise ShapeMismatch(f"grid shapes differ: {p.shape} vs {mask.shape}")
    if not mask.any():
        raise NoFixations("NSS needs at least one fixated cell")
    d = p - p.mean()
    std = np.sqrt((d * d).mean())
    if std < _STD_FLOOR:
        raise ZeroVariance("NSS needs a non-constant prediction")
    return float((d[mask] / std).mean())


def _trapezoid(xs: np.ndarray, ys: np.ndarray) -> float:
    return float(((xs[1:] - xs[:-1]) * (ys[1:] + ys[:-1]) * 0.5).sum())


def _roc_points(pos: np.ndarray, neg: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # Thresholds are the distinct positive values, swept descending; the
    # curve is closed with (0, 0) and (1, 1) before integration.
    thresholds = np.unique(pos)[::-1]
    tpr = [0.0]
    fpr = [0.0]
    for th in thresholds:
        tpr.append(float((pos >= th).mean()))
        fpr.append(float((neg >= th).mean()) if neg.size else 0.0)
    tpr.append(1.0)
    fpr.append(1.0)
    return np.asarray(fpr), np.asarray(tpr)


def _split_by_fixation(pred, fix) -> tuple[np.ndarray, np.ndarray]:
    p = grid_values(pred)
    mask = fixation_mask(fix)
    if p.shape != mask.shape:
        raise ShapeMismatch(f"grid shapes differ: {p.shape} vs {mask.shape}")
    if not mask.any():
        raise NoFixations("AUC needs at least one fixated cell")
    if mask.all():
        raise AllFixated("AUC needs at least one non-fixated cell")
    return p[mask], p[~mask]


def auc_judd(pred, fix) -> float:
    """ROC area using every non-fixated cell as a negative.

    Thresholds sweep the predicted values at fixated cells, descending
    and deduplicated; a cell counts as "selected" when its value is >=
    the threshold. Only the ordering of values matters, so the score is
    invariant under strictly monotone transforms of the prediction.
    """
    pos, neg = _split_by_fixation(pred, fix)
    fpr, tpr = _roc_points(pos, neg)
    return _trapezoid(fpr, tpr)


def auc_borji(pred, fix, n_splits: int = 100, seed: int = 0) -> float:
    """ROC area against repeatedly sampled random negative cells.

    Each of ``n_splits`` trials draws as many negatives as there are
    fixations, uniformly without replacement from the non-fixated cells
    of a seeded generator, and the per-trial areas are averaged. Fixed
    inputs and seed give a bit-identical result.
    """
    if n_splits < 1:
        raise ValueError("n_splits must be positive")
    pos, neg = _split_by_fixation(pred, fix)
    if neg.size < pos.size:
        raise InsufficientNegatives(
            f"need at least {pos.size} non-fixated cells, have {neg.size}"
        )
    rng = np.random.default_rng(seed)
    areas = []
    for _ in range(n_splits):
        sample = rng.choice(neg, size=pos.size, replace=False)
        fpr, tpr = _roc_points(pos, sample)
        areas.append(_trapezoid(fpr, tpr))
    return float(np.mean(areas))


def radar_normalize(scores, invert: bool = False) -> list[float]:
    """Min-max normalize a score list to [0, 1], optionally inverted.

    Inversion maps the minimum to 1 and the maximum to 0, which is how
    smaller-is-better metrics are plotted on a radar chart. Raises
    DegenerateRange when all scores are equal.
    """
    values = [float(s) for s in scores]
    if len(values) < 2:
        raise ValueError("normalization needs at least two scores")
    lo, hi = min(values), max(values)
    if hi == lo:
        raise DegenerateRange("all scores are equal")
    span = hi - lo
    out = [(v - lo) / span for v in values]
    if invert:
        out = [1.0 - v for v in out]
    return out


@dataclass(frozen=True)
class MetricReport:
    """One row of saliency scores for a prediction/ground-truth pair."""

    cc: float
    kl: float
    sim: float
    auc_judd: float
    auc_borji: float
    nss: float

    def __post_init__(self):
        if self.kl < 0.0:
            raise ValueError("kl must be nonnegative")
        for name in ("sim", "auc_judd", "auc_borji"):
            v = getattr(self, name)
            if not -1e-9 <= v <= 1.0 + 1e-9:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")


def score_maps(pred, gt, fix, n_splits: int = 100, seed: int = 0) -> MetricReport:
    """Compute the full six-metric report for one frame."""
    return MetricReport(
        cc=cc(pred, gt),
        kl=kl_div(gt, pred),
        sim=sim(pred, gt),
        auc_judd=auc_judd(pred, fix),
        auc_borji=auc_borji(pred, fix, n_splits=n_splits, seed=seed),
        nss=nss(pred, fix),
    )
