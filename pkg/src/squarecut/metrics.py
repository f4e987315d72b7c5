"""Overlap and summary statistics for mask evaluation."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Sequence

import numpy as np

from .errors import DimensionMismatch, EmptyInput
from .imaging import BinaryMask


@dataclass(frozen=True)
class OverlapReport:
    """Dice overlap between an automatic mask and a reference mask."""

    dsc: float
    volume_a: float
    volume_r: float
    voxels_a: int
    voxels_r: int
    voxels_intersection: int

    def to_dict(self) -> Dict:
        return {
            "dsc": self.dsc,
            "volume_a_mm3": self.volume_a,
            "volume_r_mm3": self.volume_r,
            "voxels_a": self.voxels_a,
            "voxels_r": self.voxels_r,
            "voxels_intersection": self.voxels_intersection,
        }


@dataclass(frozen=True)
class SummaryStats:
    minimum: float
    maximum: float
    mean: float
    std: float  # population convention

    def to_dict(self) -> Dict:
        return {
            "min": self.minimum,
            "max": self.maximum,
            "mean": self.mean,
            "std_population": self.std,
        }


def dsc(a: BinaryMask, r: BinaryMask) -> OverlapReport:
    """Dice similarity 2|A∩R| / (|A|+|R|) plus voxel counts and mm^3 volumes.

    Two empty masks count as identical (dsc 1).
    """
    if a.bits.shape != r.bits.shape:
        raise DimensionMismatch(f"mask shapes differ: {a.bits.shape} vs {r.bits.shape}")
    if a.spacing != r.spacing or a.slice_thickness != r.slice_thickness:
        raise DimensionMismatch("mask spacings differ")
    voxels_a = int(a.bits.sum())
    voxels_r = int(r.bits.sum())
    inter = int((a.bits & r.bits).sum())
    denom = voxels_a + voxels_r
    value = 1.0 if denom == 0 else 2.0 * inter / denom
    voxel_volume = a.spacing[0] * a.spacing[1] * a.slice_thickness
    return OverlapReport(
        dsc=value,
        volume_a=voxels_a * voxel_volume,
        volume_r=voxels_r * voxel_volume,
        voxels_a=voxels_a,
        voxels_r=voxels_r,
        voxels_intersection=inter,
    )


def summarize(values: Sequence[float]) -> SummaryStats:
    """Min, max, mean, and population standard deviation."""
    arr = np.asarray(list(values), dtype=np.float64)
    if arr.size == 0:
        raise EmptyInput("cannot summarize an empty list")
    return SummaryStats(
        minimum=float(arr.min()),
        maximum=float(arr.max()),
        mean=float(arr.mean()),
        std=float(arr.std()),
    )


TABLE_COLUMNS = [
    "no",
    "volume_reference_mm3",
    "volume_automatic_mm3",
    "voxels_reference",
    "voxels_automatic",
    "dsc_percent",
]


def table_csv(rows: List[OverlapReport]) -> str:
    """CSV mirroring the per-case evaluation table: volumes, voxel counts,
    DSC in percent, reference columns first."""
    out = [",".join(TABLE_COLUMNS)]
    for i, rep in enumerate(rows, start=1):
        out.append(
            f"{i},{rep.volume_r:.3f},{rep.volume_a:.3f},"
            f"{rep.voxels_r},{rep.voxels_a},{100.0 * rep.dsc:.2f}"
        )
    return "\n".join(out) + "\n"
