"""Device coupling graph, calibration data, and benchmark line selection.

A benchmark line is a path of five qubits on the coupling graph, centered on
the qubit under test: code qubits at the ends and middle, auxiliaries in
between. Lines are undirected placements; a path and its reverse are the same
candidate, stored with the smaller endpoint first.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

Edge = tuple[int, int]

DEFAULT_P0 = 1.0
DEFAULT_READOUT_ERROR = 0.01
DEFAULT_X_NS = 35.0
T2_STAR_FACTOR = 0.5

# cx gates above this error rate signal a broken calibration and disqualify
# any line containing them
CX_ERROR_CUTOFF = 0.5


class CalibrationError(ValueError):
    """Malformed calibration data or an invariant violation."""


def canonical_edge(a: int, b: int) -> Edge:
    return (a, b) if a <= b else (b, a)


@dataclass(frozen=True)
class QubitCalibration:
    """Per-qubit timing and error figures. Durations in ns."""

    t1_ns: float
    t2_ns: float
    t2_star_ns: float
    p0: float
    readout_error: float
    readout_ns: float
    x_ns: float

    def __post_init__(self) -> None:
        for name in ("t1_ns", "t2_ns", "t2_star_ns", "readout_ns", "x_ns"):
            if not getattr(self, name) > 0:
                raise CalibrationError(f"{name} must be positive, got {getattr(self, name)}")
        for name in ("p0", "readout_error"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise CalibrationError(f"{name} must be in [0, 1], got {value}")
        if self.t2_star_ns > self.t2_ns and math.isfinite(self.t2_ns):
            raise CalibrationError(
                f"t2_star_ns ({self.t2_star_ns}) must not exceed t2_ns ({self.t2_ns})"
            )


@dataclass(frozen=True)
class DeviceCalibration:
    """Coupling graph plus calibration data, immutable after load."""

    qubit_count: int
    edges: frozenset[Edge]
    qubits: tuple[QubitCalibration, ...]
    cx_error: dict[Edge, float]
    cx_duration_ns: dict[Edge, float]
    name: str = "device"
    positions: dict[int, tuple[float, float]] | None = None

    def __post_init__(self) -> None:
        if self.qubit_count <= 0:
            raise CalibrationError("qubit_count must be positive")
        if len(self.qubits) != self.qubit_count:
            raise CalibrationError("per-qubit data does not match qubit_count")
        for a, b in self.edges:
            if a == b:
                raise CalibrationError(f"self-loop on qubit {a}")
            if (a, b) != canonical_edge(a, b):
                raise CalibrationError(f"edge ({a}, {b}) not in canonical order")
            if not (0 <= a < self.qubit_count and 0 <= b < self.qubit_count):
                raise CalibrationError(f"edge ({a}, {b}) references an unknown qubit")
        for edge in self.edges:
            if edge not in self.cx_error or edge not in self.cx_duration_ns:
                raise CalibrationError(f"edge {edge} is missing cx data")
            if not 0.0 <= self.cx_error[edge] <= 1.0:
                raise CalibrationError(f"cx error on {edge} outside [0, 1]")
            if not self.cx_duration_ns[edge] > 0:
                raise CalibrationError(f"cx duration on {edge} must be positive")
        for q, qc in enumerate(self.qubits):
            if qc.t2_ns > 2.0 * qc.t1_ns:
                warnings.warn(
                    f"qubit {q}: t2 ({qc.t2_ns}) exceeds 2*t1 ({2.0 * qc.t1_ns})",
                    stacklevel=2,
                )

    @cached_property
    def adjacency(self) -> dict[int, tuple[int, ...]]:
        nbrs: dict[int, list[int]] = {q: [] for q in range(self.qubit_count)}
        for a, b in self.edges:
            nbrs[a].append(b)
            nbrs[b].append(a)
        return {q: tuple(sorted(v)) for q, v in nbrs.items()}

    def neighbors(self, qubit: int) -> tuple[int, ...]:
        return self.adjacency[qubit]

    def degree(self, qubit: int) -> int:
        return len(self.adjacency[qubit])

    def edge_error(self, a: int, b: int) -> float:
        return self.cx_error[canonical_edge(a, b)]

    def edge_duration(self, a: int, b: int) -> float:
        return self.cx_duration_ns[canonical_edge(a, b)]


@dataclass(frozen=True)
class BenchLine:
    """A five-qubit benchmarking path: code, aux, code, aux, code."""

    qubits: tuple[int, int, int, int, int]
    max_cx_center: float
    max_cx_all: float

    @property
    def center(self) -> int:
        return self.qubits[2]

    @property
    def code_qubits(self) -> tuple[int, int, int]:
        return (self.qubits[0], self.qubits[2], self.qubits[4])

    @property
    def aux_qubits(self) -> tuple[int, int]:
        return (self.qubits[1], self.qubits[3])


def _make_line(cal: DeviceCalibration, path: tuple[int, ...]) -> BenchLine:
    if len(path) != 5 or len(set(path)) != 5:
        raise ValueError(f"not a five-qubit line: {path}")
    pairs = list(zip(path, path[1:]))
    for a, b in pairs:
        if canonical_edge(a, b) not in cal.edges:
            raise ValueError(f"({a}, {b}) is not an edge of the device graph")
    errors = [cal.edge_error(a, b) for a, b in pairs]
    center_errors = [cal.edge_error(path[1], path[2]), cal.edge_error(path[2], path[3])]
    return BenchLine(qubits=tuple(path), max_cx_center=max(center_errors), max_cx_all=max(errors))


def load_calibration(source) -> DeviceCalibration:
    """Load and validate a calibration file.

    Accepts a path, raw bytes/str, or a readable binary/text stream. Optional
    fields take documented defaults: p0 = 1.0, t2_star_ns = 0.5 * t2_ns,
    readout_error = 0.01, x_ns = 35.0.
    """
    if isinstance(source, Path):
        raw = source.read_bytes()
    elif isinstance(source, str):
        try:
            is_file = Path(source).exists()
        except OSError:
            is_file = False
        raw = Path(source).read_bytes() if is_file else source
    elif isinstance(source, bytes):
        raw = source
    elif hasattr(source, "read"):
        raw = source.read()
    else:
        raise CalibrationError(f"cannot read calibration from {type(source).__name__}")
    try:
        doc = json.loads(raw)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise CalibrationError(f"calibration is not valid JSON: {exc}") from exc

    if not isinstance(doc, dict) or "qubits" not in doc or "cx_gates" not in doc:
        raise CalibrationError("calibration must have top-level 'qubits' and 'cx_gates'")

    entries = doc["qubits"]
    ids = [entry.get("id") for entry in entries]
    if sorted(ids) != list(range(len(entries))):
        raise CalibrationError("qubit ids must be exactly 0..n-1")

    qubits: list[QubitCalibration | None] = [None] * len(entries)
    positions: dict[int, tuple[float, float]] = {}
    for entry in entries:
        q = entry["id"]
        try:
            t1 = float(entry["t1_ns"])
            t2 = float(entry["t2_ns"])
            readout_ns = float(entry["readout_ns"])
        except KeyError as exc:
            raise CalibrationError(f"qubit {q}: missing required field {exc}") from exc
        qubits[q] = QubitCalibration(
            t1_ns=t1,
            t2_ns=t2,
            t2_star_ns=float(entry.get("t2_star_ns", T2_STAR_FACTOR * t2)),
            p0=float(entry.get("p0", DEFAULT_P0)),
            readout_error=float(entry.get("readout_error", DEFAULT_READOUT_ERROR)),
            readout_ns=readout_ns,
            x_ns=float(entry.get("x_ns", DEFAULT_X_NS)),
        )
        if "position" in entry:
            x, y = entry["position"]
            positions[q] = (float(x), float(y))

    edges: set[Edge] = set()
    cx_error: dict[Edge, float] = {}
    cx_duration: dict[Edge, float] = {}
    for gate in doc["cx_gates"]:
        try:
            a, b = gate["qubits"]
            edge = canonical_edge(int(a), int(b))
        except (KeyError, TypeError, ValueError) as exc:
            raise CalibrationError(f"bad cx_gates entry {gate!r}") from exc
        if edge in edges:
            raise CalibrationError(f"duplicate cx edge {edge}")
        edges.add(edge)
        cx_error[edge] = float(gate["error"])
        cx_duration[edge] = float(gate["duration_ns"])

    return DeviceCalibration(
        qubit_count=len(entries),
        edges=frozenset(edges),
        qubits=tuple(qubits),
        cx_error=cx_error,
        cx_duration_ns=cx_duration,
        name=str(doc.get("name", "device")),
        positions=positions or None,
    )


def enumerate_lines(cal: DeviceCalibration, center: int) -> list[BenchLine]:
    """All simple five-qubit paths centered on `center`, as undirected
    placements in canonical order. Empty when the qubit cannot sit at the
    center of any line (leaf qubits, sparse corners)."""
    if not 0 <= center < cal.qubit_count:
        raise ValueError(f"qubit {center} is not on the device")
    paths: set[tuple[int, ...]] = set()
    for left in cal.neighbors(center):
        for right in cal.neighbors(center):
            if left == right:
                continue
            for a in cal.neighbors(left):
                if a in (center, right):
                    continue
                for d in cal.neighbors(right):
                    if d in (center, left, a):
                        continue
                    path = (a, left, center, right, d)
                    if path[-1] < path[0]:
                        path = path[::-1]
                    paths.add(path)
    return [_make_line(cal, p) for p in sorted(paths)]


def select_line(cal: DeviceCalibration, candidates: list[BenchLine]) -> BenchLine | None:
    """Pick the line minimizing (max cx error at the center, max cx error
    overall), ties broken by smallest qubit sequence. Candidates containing a
    cx with error over 0.5 are discarded; returns None if nothing survives."""
    if not candidates:
        return None
    centers = {line.center for line in candidates}
    if len(centers) != 1:
        raise ValueError(f"candidates have mixed centers: {sorted(centers)}")
    surviving = [line for line in candidates if line.max_cx_all <= CX_ERROR_CUTOFF]
    if not surviving:
        return None
    return min(surviving, key=lambda ln: (ln.max_cx_center, ln.max_cx_all, ln.qubits))


def plan_device(cal: DeviceCalibration) -> dict[int, BenchLine | None]:
    """Selected benchmark line for every qubit (None where infeasible)."""
    return {q: select_line(cal, enumerate_lines(cal, q)) for q in range(cal.qubit_count)}
