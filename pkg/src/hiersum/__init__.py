"""Lossless hierarchical graph summarization with signed correction edges."""

from hiersum.graph import InputGraph, load_edge_list, load_edge_list_path
from hiersum.summary import HierarchicalSummary, trivial_summary
from hiersum.pipeline import SummarizeConfig, summarize

__all__ = [
    "InputGraph",
    "load_edge_list",
    "load_edge_list_path",
    "HierarchicalSummary",
    "trivial_summary",
    "SummarizeConfig",
    "summarize",
]

__version__ = "0.1.0"
