"""Fully dynamic approximate matching by coloring buckets of a fractional matching and sparsifying.

Main entry points: :class:`RoundingFramework` (randomized, robust to adaptive
updates), :class:`DeterministicMatcher` (value-weighted multigraph buckets)
and :func:`run_experiment` for driving either one with an adversary.
"""

from .adversaries import (
    AdaptiveMatchedDeleter,
    AdaptiveSparsifierEraser,
    Adversary,
    RandomOblivious,
    SlidingWindow,
    generate_next,
)
from .coloring import ColoredMultigraph
from .det import DeterministicMatcher, MultiBucketFamily
from .errors import (
    DegreeBoundViolated,
    DegreeCapExceeded,
    DynMatchError,
    GraphError,
    IncompleteComputation,
    InvalidValue,
    InvariantViolation,
    NoLegalMove,
)
from .fractional import HierarchicalFractionalMatching
from .framework import FrameworkConfig, RoundingFramework, StaticMatcherKind, WorkMode
from .graph import DynamicGraph, EventKind, UpdateEvent, edge_key, read_stream, write_stream
from .harness import ExperimentConfig, ExperimentResult, run_experiment, run_to_string
from .matching import ExactMatcher, Matching, matching_number, max_matching_exact
from .sparsifier import BucketedColoring, SampleCountPolicy, SparsifyParams, sample_sparsifier

__version__ = "0.1.0"

__all__ = [
    "AdaptiveMatchedDeleter",
    "AdaptiveSparsifierEraser",
    "Adversary",
    "BucketedColoring",
    "ColoredMultigraph",
    "DegreeBoundViolated",
    "DegreeCapExceeded",
    "DeterministicMatcher",
    "DynMatchError",
    "DynamicGraph",
    "EventKind",
    "ExactMatcher",
    "ExperimentConfig",
    "ExperimentResult",
    "FrameworkConfig",
    "GraphError",
    "HierarchicalFractionalMatching",
    "IncompleteComputation",
    "InvalidValue",
    "InvariantViolation",
    "Matching",
    "MultiBucketFamily",
    "NoLegalMove",
    "RandomOblivious",
    "RoundingFramework",
    "SampleCountPolicy",
    "SlidingWindow",
    "SparsifyParams",
    "StaticMatcherKind",
    "UpdateEvent",
    "WorkMode",
    "edge_key",
    "generate_next",
    "matching_number",
    "max_matching_exact",
    "read_stream",
    "run_experiment",
    "run_to_string",
    "sample_sparsifier",
    "write_stream",
]
