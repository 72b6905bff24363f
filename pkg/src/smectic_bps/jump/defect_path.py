"""Polyline defect sets and the limit energy carried along them."""

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Tuple, Union

from ..errors import InadmissibleDefectError
from .cost import check_jump_condition, jump_cost
from .states import JumpSpec

ANGLE_TOLERANCE = 1e-9


@dataclass
class DefectPath:
    """Vertices in (x, z) and, per segment, the slopes (a_minus, a_plus) of the two traces."""

    vertices: List[Tuple[float, float]] = field(default_factory=list)
    segments: List[Tuple[float, float]] = field(default_factory=list)

    @classmethod
    def from_dict(cls, data: Dict) -> "DefectPath":
        vertices = [(float(x), float(z)) for x, z in data.get("vertices", [])]
        segments = [(float(s["a_minus"]), float(s["a_plus"])) for s in data.get("segments", [])]
        return cls(vertices, segments)

    def to_dict(self) -> Dict:
        return {
            "vertices": [list(v) for v in self.vertices],
            "segments": [{"a_minus": a_minus, "a_plus": a_plus} for a_minus, a_plus in self.segments],
        }

    def segment_geometry(self, index: int) -> Tuple[float, Tuple[float, float]]:
        """Length and unit normal of one segment."""
        (x0, z0), (x1, z1) = self.vertices[index], self.vertices[index + 1]
        length = math.hypot(x1 - x0, z1 - z0)
        if length == 0.0:
            return 0.0, (1.0, 0.0)
        return length, ((z1 - z0) / length, -(x1 - x0) / length)

    def jump(self, index: int) -> JumpSpec:
        a_minus, a_plus = self.segments[index]
        _, normal = self.segment_geometry(index)
        return JumpSpec.from_slopes(a_minus, a_plus, normal=normal)


def _check_segment(path: DefectPath, index: int) -> None:
    length, normal = path.segment_geometry(index)
    if length == 0.0:
        raise InadmissibleDefectError(f"Segment {index} has zero length", index)
    j = path.jump(index)
    if j.degenerate:
        return
    n1, n2 = j.n
    angle = math.asin(min(1.0, abs(normal[0] * n2 - normal[1] * n1)))
    if angle > ANGLE_TOLERANCE:
        raise InadmissibleDefectError(
            f"Segment {index}: normal {normal} is {angle:.3e} rad away from the jump direction {j.n}", index
        )
    if not check_jump_condition(j):
        raise InadmissibleDefectError(f"Segment {index}: tangential traces do not match", index)


def validate_defect_path(path: DefectPath) -> Dict:
    """Validate a path and return validation results instead of raising."""
    if path.vertices and len(path.segments) != len(path.vertices) - 1:
        return {
            "valid": False,
            "error": f"{len(path.vertices)} vertices need {len(path.vertices) - 1} segment states, got {len(path.segments)}",
        }
    if not path.vertices and path.segments:
        return {"valid": False, "error": "Segment states given without vertices"}
    for index in range(len(path.segments)):
        try:
            _check_segment(path, index)
        except InadmissibleDefectError as exc:
            return {"valid": False, "error": str(exc), "segment": exc.segment_index}
    return {"valid": True, "message": f"Defect path is admissible with {len(path.segments)} segments"}


def limit_energy(path: DefectPath) -> float:
    """Sum over segments of jump_cost times segment length."""
    if path.vertices and len(path.segments) != len(path.vertices) - 1:
        raise InadmissibleDefectError("Vertex and segment counts do not match", len(path.segments))
    total = 0.0
    for index in range(len(path.segments)):
        _check_segment(path, index)
        length, _ = path.segment_geometry(index)
        total += jump_cost(path.jump(index)) * length
    return total


def load_defect_path(path: Union[str, Path]) -> DefectPath:
    with open(path, "r", encoding="utf-8") as handle:
        return DefectPath.from_dict(json.load(handle))


def save_defect_path(defect: DefectPath, path: Union[str, Path]) -> Path:
    path = Path(path)
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(defect.to_dict(), handle, indent=2, sort_keys=True)
    return path
