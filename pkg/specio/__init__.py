"""Spec files, trajectory CSV and the command-line surface."""
from .dtos import CasimirEntry, Dims, Entry, SpecDocument, SystemDocument
from .spec_files import (
    SpecFormatError,
    document_of,
    load_classification,
    load_spec,
    load_system,
    save_spec,
    save_system,
    spec_from_document,
)
from .trajectory_csv import TrajectoryLayout, read_trajectory, write_trajectory

__all__ = [
    "CasimirEntry",
    "Dims",
    "Entry",
    "SpecDocument",
    "SpecFormatError",
    "SystemDocument",
    "TrajectoryLayout",
    "document_of",
    "load_classification",
    "load_spec",
    "load_system",
    "read_trajectory",
    "save_spec",
    "save_system",
    "spec_from_document",
    "write_trajectory",
]
