"""Finite multigraph stages and periodic schedules for time-evolving graphs.

A stage is a loopless undirected multigraph snapshot over a fixed vertex set
0..n-1, optionally with one designated sink vertex.  A schedule is a periodic
sequence of stages sharing the same vertex set and sink; the graph in force at
time t is ``stage_at(t) = stages[t % period]``.  Only edges evolve over time,
never the vertex set.

Stages and schedules are immutable after construction and safe to share
between concurrent simulations.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy import sparse


@dataclass(frozen=True)
class StageGraph:
    """One snapshot of the evolving graph.

    ``multiplicity`` maps ordered pairs (u, v) to the number of parallel
    edges between u and v.  A valid stage stores both orientations with
    equal counts; use :func:`validate` to check a raw mapping.
    """

    n_vertices: int
    multiplicity: dict[tuple[int, int], int] = field(default_factory=dict)
    sink: int | None = None

    @classmethod
    def from_edges(
        cls,
        n_vertices: int,
        edges: list[tuple[int, int, int]] | list[tuple[int, int]],
        sink: int | None = None,
    ) -> "StageGraph":
        """Build a stage from undirected edge triples (u, v, multiplicity).

        Plain (u, v) pairs get multiplicity 1.  Repeated pairs accumulate.
        Both orientations are stored, so the result is symmetric by
        construction.
        """
        mult: dict[tuple[int, int], int] = {}
        for e in edges:
            u, v, m = e if len(e) == 3 else (*e, 1)
            if m == 0:
                continue
            mult[(u, v)] = mult.get((u, v), 0) + m
            mult[(v, u)] = mult.get((v, u), 0) + m
        return cls(n_vertices=n_vertices, multiplicity=mult, sink=sink)

    def edge_count(self, u: int, v: int) -> int:
        return self.multiplicity.get((u, v), 0)

    @cached_property
    def degrees(self) -> np.ndarray:
        """Vertex degrees (edge multiplicities counted), as an int64 vector."""
        deg = np.zeros(self.n_vertices, dtype=np.int64)
        for (u, _v), m in self.multiplicity.items():
            deg[u] += m
        deg.setflags(write=False)
        return deg

    @cached_property
    def adjacency(self) -> sparse.csr_array:
        """Sparse symmetric adjacency with multiplicities as entries."""
        if self.multiplicity:
            rows, cols, vals = zip(*((u, v, m) for (u, v), m in self.multiplicity.items()))
        else:
            rows, cols, vals = (), (), ()
        a = sparse.coo_array(
            (np.asarray(vals, dtype=np.int64), (rows, cols)),
            shape=(self.n_vertices, self.n_vertices),
        )
        return a.tocsr()

    @cached_property
    def nonsink_mask(self) -> np.ndarray:
        mask = np.ones(self.n_vertices, dtype=bool)
        if self.sink is not None:
            mask[self.sink] = False
        mask.setflags(write=False)
        return mask


def degree(stage: StageGraph, v: int) -> int:
    """Number of edge endpoints at v, counting parallel edges."""
    if not 0 <= v < stage.n_vertices:
        raise ValueError(f"vertex {v} out of range for {stage.n_vertices} vertices")
    return int(stage.degrees[v])


def laplacian(stage: StageGraph) -> np.ndarray:
    """Dense integer Laplacian: degrees on the diagonal, -multiplicity off it.

    Every row sums to zero.  Intended for small graphs; the simulation core
    uses the sparse adjacency instead.
    """
    lap = -stage.adjacency.toarray().astype(np.int64)
    np.fill_diagonal(lap, stage.degrees)
    return lap


def validate(stage: StageGraph) -> list[str]:
    """Check stage invariants; return a list of violations (empty when ok).

    Checks symmetry of the multiplicity mapping, looplessness, vertex and
    sink index ranges, and non-negative multiplicities.  Never raises.
    """
    problems: list[str] = []
    n = stage.n_vertices
    if n < 0:
        problems.append(f"negative vertex count {n}")
    for (u, v), m in stage.multiplicity.items():
        if not (0 <= u < n and 0 <= v < n):
            problems.append(f"edge ({u},{v}) outside vertex range 0..{n - 1}")
            continue
        if u == v and m != 0:
            problems.append(f"loop at vertex {u} with multiplicity {m}")
        if m < 0:
            problems.append(f"negative multiplicity {m} on edge ({u},{v})")
        if stage.multiplicity.get((v, u), 0) != m:
            problems.append(
                f"asymmetric multiplicity: ({u},{v})={m} but "
                f"({v},{u})={stage.multiplicity.get((v, u), 0)}"
            )
    if stage.sink is not None and not 0 <= stage.sink < n:
        problems.append(f"sink {stage.sink} outside vertex range 0..{n - 1}")
    return problems


@dataclass(frozen=True)
class Schedule:
    """Periodic sequence of stages; ``stage_at(t)`` repeats with the period."""

    stages: tuple[StageGraph, ...]

    def __post_init__(self):
        if not self.stages:
            raise ValueError("a schedule needs at least one stage")
        first = self.stages[0]
        for s in self.stages[1:]:
            if s.n_vertices != first.n_vertices:
                raise ValueError("all stages must share the same vertex set")
            if s.sink != first.sink:
                raise ValueError("all stages must share the same sink designation")

    @property
    def period(self) -> int:
        return len(self.stages)

    @property
    def n_vertices(self) -> int:
        return self.stages[0].n_vertices

    @property
    def sink(self) -> int | None:
        return self.stages[0].sink

    def stage_at(self, t: int) -> StageGraph:
        return self.stages[t % len(self.stages)]


def schedule_to_json(schedule: Schedule) -> str:
    """Serialize a schedule to the JSON stage/schedule text format.

    The document has fields ``period``, ``n_vertices``, ``sink`` (nullable)
    and ``stages``, a list of per-stage edge lists ``[u, v, multiplicity]``
    with each undirected edge written once (u < v).
    """
    stages = []
    for s in schedule.stages:
        edges = sorted(
            [u, v, m] for (u, v), m in s.multiplicity.items() if u < v and m > 0
        )
        stages.append(edges)
    doc = {
        "period": schedule.period,
        "n_vertices": schedule.n_vertices,
        "sink": schedule.sink,
        "stages": stages,
    }
    return json.dumps(doc, indent=2) + "\n"


def schedule_from_json(text: str) -> Schedule:
    """Parse the JSON stage/schedule text format produced by schedule_to_json."""
    doc = json.loads(text)
    try:
        period = doc["period"]
        n = doc["n_vertices"]
        sink = doc["sink"]
        stage_edges = doc["stages"]
    except KeyError as missing:
        raise ValueError(f"schedule JSON is missing field {missing}") from None
    if len(stage_edges) != period:
        raise ValueError(
            f"period is {period} but {len(stage_edges)} stages are listed"
        )
    stages = tuple(
        StageGraph.from_edges(n, [tuple(e) for e in edges], sink=sink)
        for edges in stage_edges
    )
    schedule = Schedule(stages)
    for i, s in enumerate(schedule.stages):
        problems = validate(s)
        if problems:
            raise ValueError(f"stage {i} is invalid: {'; '.join(problems)}")
    return schedule
