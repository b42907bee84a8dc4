"""Overlap and topology metrics: Dice, topology precision/sensitivity,
clDice, the weighted combined loss, small-component removal and the full
per-volume evaluation report.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass

import numpy as np

from .grid import BinaryVolume, ScalarVolume, count_foreground
from .morphology import SoftSkeletonConfig, soft_skeleton
from .thinning import ThinningMethod, skeletonize
from .topology import betti_error, label_components

CSV_COLUMNS = ["dice", "cl_dice", "t_prec", "t_sens",
               "b0_err", "b1_err", "chi_err", "runtime_ms"]

SKELETON_METHODS = ("euler", "boolean", "soft")


class UndefinedMetricError(ValueError):
    """Raised when a ratio metric is evaluated on an empty centerline."""


@dataclass(frozen=True)
class LossWeights:
    lambda1: float = 0.5
    lambda2: float = 0.5

    def __post_init__(self):
        if not (np.isfinite(self.lambda1) and np.isfinite(self.lambda2)):
            raise ValueError("loss weights must be finite")
        if self.lambda1 < 0 or self.lambda2 < 0:
            raise ValueError("loss weights must be non-negative")


@dataclass(frozen=True)
class MetricsReport:
    dice: float
    cl_dice: float
    t_prec: float
    t_sens: float
    b0_err: int
    b1_err: int
    chi_err: int
    runtime_ms: float | None = None

    def to_dict(self):
        return {c: getattr(self, c) for c in CSV_COLUMNS}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def to_csv_row(self) -> str:
        vals = []
        for c in CSV_COLUMNS:
            v = getattr(self, c)
            vals.append("" if v is None else repr(v) if isinstance(v, float) else str(v))
        return ",".join(vals)

    @staticmethod
    def csv_header() -> str:
        return ",".join(CSV_COLUMNS)


def _check_dims(a: BinaryVolume, b: BinaryVolume):
    if a.dims != b.dims:
        raise ValueError(f"dimension mismatch: {a.dims} vs {b.dims}")


def dice(a: BinaryVolume, b: BinaryVolume) -> float:
    """2|a^b| / (|a|+|b|); 1 when both volumes are empty."""
    _check_dims(a, b)
    na, nb = count_foreground(a), count_foreground(b)
    if na + nb == 0:
        return 1.0
    inter = int((a.data & b.data).sum())
    return 2.0 * inter / (na + nb)


def t_prec(c_p: BinaryVolume, s_g: BinaryVolume) -> float:
    """|C_P ^ S_G| / |C_P| (fraction of predicted centerline inside the
    ground-truth segmentation)."""
    _check_dims(c_p, s_g)
    n = count_foreground(c_p)
    if n == 0:
        raise UndefinedMetricError("empty centerline in topology precision")
    return int((c_p.data & s_g.data).sum()) / n


def t_sens(c_g: BinaryVolume, s_p: BinaryVolume) -> float:
    """|C_G ^ S_P| / |C_G|."""
    _check_dims(c_g, s_p)
    n = count_foreground(c_g)
    if n == 0:
        raise UndefinedMetricError("empty centerline in topology sensitivity")
    return int((c_g.data & s_p.data).sum()) / n


def cl_dice(s_p: BinaryVolume, s_g: BinaryVolume,
            c_p: BinaryVolume, c_g: BinaryVolume) -> float:
    """Harmonic mean of topology precision and sensitivity.

    Conventions for empty centerlines: both empty -> 1.0 (a perfectly empty
    prediction of an empty truth is not penalized); exactly one empty -> 0.0.
    """
    _check_dims(s_p, s_g)
    p_empty = count_foreground(c_p) == 0
    g_empty = count_foreground(c_g) == 0
    if p_empty or g_empty:
        return 1.0 if (p_empty and g_empty) else 0.0
    tp = t_prec(c_p, s_g)
    ts = t_sens(c_g, s_p)
    if tp + ts == 0.0:
        return 0.0
    return 2.0 * tp * ts / (tp + ts)


def combined_loss(s_p, s_g, c_p, c_g, w: LossWeights) -> float:
    """(1 - Dice(S)) + lambda1*(1 - Dice(C)) + lambda2*(1 - clDice)."""
    return ((1.0 - dice(s_p, s_g))
            + w.lambda1 * (1.0 - dice(c_p, c_g))
            + w.lambda2 * (1.0 - cl_dice(s_p, s_g, c_p, c_g)))


def remove_small_components(vol: BinaryVolume, min_voxels: int = 100) -> BinaryVolume:
    """Drop 26-connected components with size strictly below min_voxels."""
    if min_voxels < 1:
        raise ValueError("min_voxels must be positive")
    lab = label_components(vol, connectivity=26)
    if lab.count == 0:
        return vol
    keep = np.zeros(lab.count + 1, dtype=bool)
    for k, size in lab.component_sizes.items():
        keep[k] = size >= min_voxels
    return BinaryVolume(np.where(keep[lab.labels], 1, 0).astype(np.uint8),
                        vol.spacing)


def extract_centerline(vol: BinaryVolume, method: str = "euler",
                       soft_iterations: int = 10, threads: int = 1,
                       preserve_endpoints: bool = True) -> BinaryVolume:
    """Skeletonize with the chosen method; soft skeletons are binarized at
    0.5 (a no-op on binary inputs)."""
    if method in ("euler", "boolean"):
        return skeletonize(
            vol,
            ThinningMethod(variant=method, preserve_endpoints=preserve_endpoints),
            threads=threads)
    if method == "soft":
        s = soft_skeleton(ScalarVolume.from_binary(vol),
                          SoftSkeletonConfig(iterations=soft_iterations))
        return BinaryVolume((s.data > 0.5).astype(np.uint8), vol.spacing)
    raise ValueError(f"unknown skeletonization method {method!r}")


def evaluate(pred: BinaryVolume, gt: BinaryVolume, skel_method: str = "euler",
             postprocess: bool = True, min_voxels: int = 100,
             soft_iterations: int = 10) -> MetricsReport:
    """Full per-volume report; post-processing applies to the prediction
    only.  runtime_ms covers centerline extraction and metric computation."""
    _check_dims(pred, gt)
    t0 = time.perf_counter()
    if postprocess:
        pred = remove_small_components(pred, min_voxels)
    c_p = extract_centerline(pred, skel_method, soft_iterations)
    c_g = extract_centerline(gt, skel_method, soft_iterations)
    d = dice(pred, gt)
    cd = cl_dice(pred, gt, c_p, c_g)
    # Report-level convention mirrors cl_dice: both centerlines empty reads
    # as a perfect 1.0, a single empty one as 0.0.
    p_empty = count_foreground(c_p) == 0
    g_empty = count_foreground(c_g) == 0
    tp = t_prec(c_p, gt) if not p_empty else (1.0 if g_empty else 0.0)
    ts = t_sens(c_g, pred) if not g_empty else (1.0 if p_empty else 0.0)
    b0e, b1e, chie = betti_error(pred, gt)
    ms = (time.perf_counter() - t0) * 1000.0
    return MetricsReport(dice=d, cl_dice=cd, t_prec=tp, t_sens=ts,
                         b0_err=b0e, b1_err=b1e, chi_err=chie, runtime_ms=ms)
