"""Gaussian confidence maps for point annotations.

Points are encoded as unit-height isotropic Gaussian bumps combined per pixel
by maximum (so adjacent points keep distinct peaks), decoded back by strict
local-maximum detection with radius suppression, and compared against
predictions with a mask-weighted squared loss that ignores unreliable pixels.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class FullyMaskedFrameError(RuntimeError):
    """The loss mask has no valid pixels, so the frame carries no signal."""


@dataclass(frozen=True)
class PointSet:
    """Sub-pixel 2D positions (x, y) tied to a 1-based frame index."""

    frame: int
    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.size == 0:
            pts = pts.reshape(0, 2)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise ValueError(f"points must be an (N, 2) array, got shape {pts.shape}")
        if not np.isfinite(pts).all():
            raise ValueError("points must be finite")
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return self.points.shape[0]

    @classmethod
    def empty(cls, frame: int) -> "PointSet":
        return cls(frame, np.empty((0, 2), dtype=np.float64))

    def as_tuples(self) -> list[tuple[float, float]]:
        return [(float(x), float(y)) for x, y in self.points]


def encode_heatmap(points: PointSet, width: int, height: int, sigma: float) -> np.ndarray:
    """Render a float32 (height, width) grid of unit Gaussians around ``points``.

    The value at pixel q is max over points c of exp(-|q - c|^2 / (2 sigma^2)).
    Because all bumps share sigma and amplitude, the maximum is a monotone
    transform of the distance to the nearest point, which is what gets
    evaluated. Pixel centers sit on integer coordinates.
    """
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    if width < 1 or height < 1:
        raise ValueError("width and height must be >= 1")
    pts = points.points
    if len(points) == 0:
        return np.zeros((height, width), dtype=np.float32)
    if ((pts[:, 0] < 0) | (pts[:, 0] >= width) | (pts[:, 1] < 0) | (pts[:, 1] >= height)).any():
        raise ValueError("point outside image bounds")
    xs = np.arange(width, dtype=np.float64)
    ys = np.arange(height, dtype=np.float64)
    d2 = np.full((height, width), np.inf)
    for x, y in pts:
        np.minimum(d2, (xs - x) ** 2 + ((ys - y) ** 2)[:, None], out=d2)
    return np.exp(-d2 / (2.0 * sigma * sigma)).astype(np.float32)


def detect_peaks(
    heatmap: np.ndarray,
    peak_threshold: float,
    min_separation: float,
    frame: int = 0,
) -> PointSet:
    """Extract peak positions from a confidence grid.

    Candidates are strict local maxima over the 8-neighbourhood with value >=
    ``peak_threshold`` (border pixels compare only against in-bounds
    neighbours; equal-valued plateaus yield no candidate). Candidates are then
    visited by descending value, ties broken by smaller (y, x), and any
    candidate within ``min_separation`` of an already retained one is dropped.
    Returned positions are pixel centers.
    """
    h = np.asarray(heatmap, dtype=np.float64)
    if h.ndim != 2:
        raise ValueError("heatmap must be 2-D")
    if not 0 < peak_threshold < 1:
        raise ValueError(f"peak_threshold must be in (0, 1), got {peak_threshold}")
    if min_separation < 1:
        raise ValueError(f"min_separation must be >= 1, got {min_separation}")
    nrow, ncol = h.shape
    padded = np.full((nrow + 2, ncol + 2), -np.inf)
    padded[1:-1, 1:-1] = h
    core = padded[1:-1, 1:-1]
    cand = core >= peak_threshold
    for dy in (-1, 0, 1):
        for dx in (-1, 0, 1):
            if dy == 0 and dx == 0:
                continue
            cand &= core > padded[1 + dy : nrow + 1 + dy, 1 + dx : ncol + 1 + dx]
    ys, xs = np.nonzero(cand)
    if ys.size == 0:
        return PointSet.empty(frame)
    vals = h[ys, xs]
    order = np.lexsort((xs, ys, -vals))
    min_sep2 = float(min_separation) ** 2
    kept_x: list[float] = []
    kept_y: list[float] = []
    for i in order:
        x = float(xs[i])
        y = float(ys[i])
        if kept_x:
            dx = np.asarray(kept_x) - x
            dy = np.asarray(kept_y) - y
            if float(np.min(dx * dx + dy * dy)) <= min_sep2:
                continue
        kept_x.append(x)
        kept_y.append(y)
    return PointSet(frame, np.column_stack([kept_x, kept_y]))


def masked_mse(pred: np.ndarray, target: np.ndarray, mask: np.ndarray) -> float:
    """Mean squared error over mask-valid pixels, normalized by the mask sum.

    Pixels where the mask is 0 contribute nothing; the result is
    sum(mask * (pred - target)^2) / sum(mask).
    """
    p = np.asarray(pred, dtype=np.float64)
    t = np.asarray(target, dtype=np.float64)
    m = np.asarray(mask)
    if p.shape != t.shape or p.shape != m.shape:
        raise ValueError(f"shape mismatch: pred {p.shape}, target {t.shape}, mask {m.shape}")
    if not np.isin(m, (0, 1)).all():
        raise ValueError("mask values must be exactly 0 or 1")
    mf = m.astype(np.float64)
    total = mf.sum()
    if total == 0:
        raise FullyMaskedFrameError("mask has no valid pixels")
    diff = p - t
    return float((mf * diff * diff).sum() / total)
