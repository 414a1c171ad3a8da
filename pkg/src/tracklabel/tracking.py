"""Frame-to-frame association and track building rooted at the labeled frame.

Detections in successive frames are paired by an optimal gated one-by-one
matching (most pairs first, then least total Euclidean cost). Chains are
seeded from every detection at the labeled frame and extended independently
forward and backward; a chain that fails to extend is terminated and the
termination recorded. The confident frame range is the maximal contiguous
interval around the labeled frame where the ratio of chained detections stays
above a threshold.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from tracklabel.heatmap import PointSet

FORWARD = "forward"
BACKWARD = "backward"


@dataclass(frozen=True)
class Matching:
    """One-by-one pairing between two point sets, by index."""

    pairs: list[tuple[int, int]]
    unmatched_left: list[int]
    unmatched_right: list[int]


def associate_frames(left: PointSet, right: PointSet, gate: float) -> Matching:
    """Optimal gated one-by-one matching between two detection sets.

    Only pairs with Euclidean distance <= ``gate`` are eligible. Among gated
    matchings the result maximizes the number of pairs first and minimizes the
    total distance second (implemented as a linear assignment with an
    unmatched penalty large enough to dominate any pair cost).
    """
    if gate <= 0:
        raise ValueError(f"gate must be positive, got {gate}")
    n = len(left)
    m = len(right)
    if n == 0 or m == 0:
        return Matching([], list(range(n)), list(range(m)))
    d = np.linalg.norm(left.points[:, None, :] - right.points[None, :, :], axis=2)
    allowed = d <= gate
    if not allowed.any():
        return Matching([], list(range(n)), list(range(m)))
    # Unmatched penalty > max possible total pair cost makes the assignment
    # lexicographic (count first, cost second); forbidden entries cost more
    # than unmatching both endpoints so they are never selected.
    penalty = (min(n, m) + 1.0) * gate
    forbidden = 2.0 * penalty + 1.0
    size = n + m
    cost = np.full((size, size), forbidden)
    cost[:n, :m] = np.where(allowed, d, forbidden)
    cost[n:, m:] = 0.0
    cost[np.arange(n), m + np.arange(n)] = penalty
    cost[n + np.arange(m), np.arange(m)] = penalty
    rows, cols = linear_sum_assignment(cost)
    pairs = sorted(
        (int(i), int(j)) for i, j in zip(rows, cols) if i < n and j < m and allowed[i, j]
    )
    matched_l = {i for i, _ in pairs}
    matched_r = {j for _, j in pairs}
    return Matching(
        pairs,
        [i for i in range(n) if i not in matched_l],
        [j for j in range(m) if j not in matched_r],
    )


@dataclass
class Track:
    """A chain of detections over a contiguous frame interval."""

    track_id: int
    first_frame: int
    last_frame: int
    positions: dict[int, tuple[float, float]] = field(default_factory=dict)
    indices: dict[int, int] = field(default_factory=dict)

    def alive_at(self, t: int) -> bool:
        return self.first_frame <= t <= self.last_frame


@dataclass(frozen=True)
class Termination:
    """Last confirmed position of a chain that failed to extend."""

    track_id: int
    frame: int
    x: float
    y: float
    direction: str


@dataclass
class TrackSet:
    """Chains rooted at the labeled frame plus their termination records."""

    labeled_frame: int
    n_frames: int
    tracks: list[Track]
    terminations: list[Termination]

    def alive_at(self, t: int) -> list[Track]:
        return [tr for tr in self.tracks if tr.alive_at(t)]

    def chained_indices(self, t: int) -> set[int]:
        return {tr.indices[t] for tr in self.tracks if tr.alive_at(t)}


@dataclass(frozen=True)
class FrameRange:
    """Inclusive 1-based frame interval [a, b]."""

    a: int
    b: int

    def __post_init__(self):
        if self.a > self.b:
            raise ValueError(f"empty frame range [{self.a}, {self.b}]")

    def frames(self) -> range:
        return range(self.a, self.b + 1)

    def __contains__(self, t: int) -> bool:
        return self.a <= t <= self.b


def _check_detections(detections: Sequence[PointSet]) -> None:
    for i, ps in enumerate(detections):
        if ps.frame != i + 1:
            raise ValueError(
                f"detections must cover frames 1..T in order; index {i} has frame {ps.frame}"
            )


def build_tracks(detections: Sequence[PointSet], labeled_frame: int, gate: float) -> TrackSet:
    """Seed one chain per detection at the labeled frame and extend both ways.

    Detections of consecutive frames are matched with :func:`associate_frames`
    (always called with the current frame on the left and the next frame in
    the walking direction on the right, so a time-reversed input yields the
    mirrored result). A chain whose endpoint is unmatched at a step is
    terminated there with the step direction. Track ids order seeds by (y, x).
    """
    total = len(detections)
    if total < 1:
        raise ValueError("need at least one frame of detections")
    _check_detections(detections)
    if not 1 <= labeled_frame <= total:
        raise ValueError(f"labeled frame {labeled_frame} outside [1, {total}]")

    def det(t: int) -> PointSet:
        return detections[t - 1]

    seeds = det(labeled_frame)
    order = np.lexsort((seeds.points[:, 0], seeds.points[:, 1])) if len(seeds) else []
    tracks = []
    for tid, idx in enumerate(order):
        x, y = seeds.points[idx]
        tracks.append(
            Track(
                track_id=tid,
                first_frame=labeled_frame,
                last_frame=labeled_frame,
                positions={labeled_frame: (float(x), float(y))},
                indices={labeled_frame: int(idx)},
            )
        )
    terminations: list[Termination] = []

    def extend(step: int) -> None:
        t = labeled_frame
        alive = list(tracks)
        while alive and 1 <= t + step <= total:
            matching = associate_frames(det(t), det(t + step), gate)
            nxt = dict(matching.pairs)
            still = []
            for tr in alive:
                j = nxt.get(tr.indices[t])
                if j is None:
                    x, y = tr.positions[t]
                    direction = FORWARD if step > 0 else BACKWARD
                    terminations.append(Termination(tr.track_id, t, x, y, direction))
                    continue
                x, y = det(t + step).points[j]
                tr.positions[t + step] = (float(x), float(y))
                tr.indices[t + step] = int(j)
                if step > 0:
                    tr.last_frame = t + step
                else:
                    tr.first_frame = t + step
                still.append(tr)
            alive = still
            t += step

    extend(+1)
    extend(-1)
    terminations.sort(key=lambda term: (term.track_id, term.frame))
    return TrackSet(labeled_frame, total, tracks, terminations)


def tracked_ratio(tracks: TrackSet, detections: Sequence[PointSet], t: int) -> float:
    """Fraction of frame ``t``'s detections that belong to a chain."""
    if not 1 <= t <= len(detections):
        raise ValueError(f"frame {t} outside [1, {len(detections)}]")
    alive = sum(1 for tr in tracks.tracks if tr.alive_at(t))
    return alive / max(1, len(detections[t - 1]))


def select_frame_range(ratios: Sequence[float], alpha: float, labeled_frame: int) -> FrameRange:
    """Maximal contiguous interval around the labeled frame with ratio >= alpha."""
    if not 0 < alpha <= 1:
        raise ValueError(f"alpha must be in (0, 1], got {alpha}")
    total = len(ratios)
    if not 1 <= labeled_frame <= total:
        raise ValueError(f"labeled frame {labeled_frame} outside [1, {total}]")
    if ratios[labeled_frame - 1] < alpha:
        # Every labeled-frame detection seeds a chain, so this cannot happen
        # for ratios produced by build_tracks.
        raise RuntimeError(
            f"ratio {ratios[labeled_frame - 1]:.3f} at the labeled frame is below alpha"
        )
    a = labeled_frame
    while a > 1 and ratios[a - 2] >= alpha:
        a -= 1
    b = labeled_frame
    while b < total and ratios[b] >= alpha:
        b += 1
    return FrameRange(a, b)


def write_tracks_csv(path, tracks: TrackSet) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["track_id", "frame", "x", "y"])
        for tr in tracks.tracks:
            for t in range(tr.first_frame, tr.last_frame + 1):
                x, y = tr.positions[t]
                writer.writerow([tr.track_id, t, repr(x), repr(y)])


def write_terminations_csv(path, tracks: TrackSet) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["track_id", "frame", "x", "y", "direction"])
        for term in tracks.terminations:
            writer.writerow([term.track_id, term.frame, repr(term.x), repr(term.y), term.direction])
