from .objects import builtin_mesh, BUILTIN_OBJECTS
from .candidates import GraspCandidate, sample_candidates, CandidateConfig
from .episode import EpisodeRecord, run_episode, classify_outcome
from .batch import run_batch, BatchReport

__all__ = [
    "builtin_mesh", "BUILTIN_OBJECTS", "GraspCandidate", "sample_candidates",
    "CandidateConfig", "EpisodeRecord", "run_episode", "classify_outcome",
    "run_batch", "BatchReport",
]
