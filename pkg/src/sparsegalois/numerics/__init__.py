"""Complex arithmetic substrate: evaluation, start solving and path tracking."""
from .system import SparseSystem, evaluate, jacobian, random_system
from .solve import Root, solve_system, solve_system_2d, solve_univariate
from .track import Family, TrackOptions, TrackedPath, circle, reverse, scaled_part, segment, track_batch, track_path

__all__ = [
    "SparseSystem", "evaluate", "jacobian", "random_system", "Root", "solve_system",
    "solve_system_2d", "solve_univariate", "Family", "TrackOptions", "TrackedPath",
    "circle", "reverse", "scaled_part", "segment", "track_batch", "track_path",
]
