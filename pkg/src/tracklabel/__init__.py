"""Semi-supervised point detection for time-lapse image sequences.

One frame of a sequence carries human centroid annotations. A detector is
trained on that frame, its detections are tracked outward in both temporal
directions, frames where tracking stays confident are turned into
pseudo-heatmaps with reliability masks, and the detector is retrained with a
mask-weighted loss. Iterating grows the usable frame range.
"""

from tracklabel.heatmap import (
    FullyMaskedFrameError,
    PointSet,
    detect_peaks,
    encode_heatmap,
    masked_mse,
)
from tracklabel.tracking import (
    FrameRange,
    Matching,
    Termination,
    Track,
    TrackSet,
    associate_frames,
    build_tracks,
    select_frame_range,
    tracked_ratio,
)
from tracklabel.pseudolabel import (
    PseudoLabeledFrame,
    UnreliableRegions,
    build_mask,
    build_pseudo_labels,
    collect_tracked_positions,
    collect_unassociated,
)
from tracklabel.detector import (
    CorrelationDetector,
    ExternalDetector,
    ExternalDetectorError,
)
from tracklabel.simulator import SimConfig, SyntheticSequence, render_overlay, simulate
from tracklabel.evaluation import DetectionScore, match_detections_to_gt, score_sequence
from tracklabel.config import PipelineConfig
from tracklabel.pipeline import IterationReport, run_pipeline

__version__ = "0.1.0"

__all__ = [
    "CorrelationDetector",
    "DetectionScore",
    "ExternalDetector",
    "ExternalDetectorError",
    "FrameRange",
    "FullyMaskedFrameError",
    "IterationReport",
    "Matching",
    "PipelineConfig",
    "PointSet",
    "PseudoLabeledFrame",
    "SimConfig",
    "SyntheticSequence",
    "Termination",
    "Track",
    "TrackSet",
    "UnreliableRegions",
    "associate_frames",
    "build_mask",
    "build_pseudo_labels",
    "build_tracks",
    "collect_tracked_positions",
    "collect_unassociated",
    "detect_peaks",
    "encode_heatmap",
    "masked_mse",
    "match_detections_to_gt",
    "render_overlay",
    "run_pipeline",
    "score_sequence",
    "select_frame_range",
    "simulate",
    "tracked_ratio",
]
