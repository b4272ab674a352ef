"""Problem files: JSON documents describing an algebra, named matrices and tasks.

Layout (``version`` 1)::

    {
      "version": 1,
      "shape": {"dims": [2], "weights": [1.0]},
      "matrices": {"h_phi": [[[[0.75, 0], [0, 0]], [[0, 0], [0.25, 0]]]], ...},
      "states": ["h_phi", "h_omega"],
      "tasks": [{"type": "entropy", "phi": "h_phi", "omega": "h_omega"}, ...]
    }

Each matrix is a list of blocks, each block a list of rows, each entry an
``[re, im]`` pair.  Matrices listed under ``states`` must be positive.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .algebra import (
    GROUP_TOL,
    HERMITIAN_TOL,
    SUPPORT_ETA,
    AlgebraShape,
    Element,
    NotHermitianError,
    NotPositiveError,
    State,
)
from .entropy import QuasiFamily

SCHEMA_VERSION = 1
TASK_TYPES = ("entropy", "quasi", "renyi", "verify", "bench")


class ProblemError(ValueError):
    """Invalid problem file; ``line`` points into the source text when known."""

    def __init__(self, message: str, line: int | None = None, path: str | None = None):
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where = f"{path}:{line}: " if line is not None else f"{path}: "
        elif line is not None:
            where = f"line {line}: "
        super().__init__(where + message)


@dataclass
class Task:
    type: str
    params: dict[str, Any]
    index: int


@dataclass
class ProblemFile:
    shape: AlgebraShape
    matrices: dict[str, Element]
    states: dict[str, State]
    tasks: list[Task] = field(default_factory=list)


def _key_line(text: str, key: str) -> int | None:
    m = re.search(r'"' + re.escape(key) + r'"\s*:', text)
    if m is None:
        return None
    return text.count("\n", 0, m.start()) + 1


def _matrix_from_json(name, raw, shape: AlgebraShape, fail) -> Element:
    if not isinstance(raw, list) or len(raw) != shape.num_blocks:
        fail(f"matrix {name!r} must be a list of {shape.num_blocks} blocks", name)
    blocks = []
    for k, (blk, n) in enumerate(zip(raw, shape.block_dims)):
        try:
            arr = np.asarray(blk, dtype=float)
        except (TypeError, ValueError):
            fail(f"matrix {name!r} block {k} is not a numeric array of [re, im] pairs", name)
        if arr.shape != (n, n, 2):
            fail(
                f"matrix {name!r} block {k} has shape {arr.shape}, expected ({n}, {n}, 2)",
                name,
            )
        if not np.all(np.isfinite(arr)):
            fail(f"matrix {name!r} block {k} has non-finite entries", name)
        blocks.append(arr[..., 0] + 1j * arr[..., 1])
    return Element(shape, blocks)


def matrix_to_json(x: Element) -> list:
    return [
        [[[float(z.real), float(z.imag)] for z in row] for row in blk]
        for blk in x.blocks
    ]


def _validate_task(i: int, raw: dict, names: set[str], states: set[str], fail) -> Task:
    if not isinstance(raw, dict) or "type" not in raw:
        fail(f"task {i} must be an object with a 'type'", "tasks")
    ttype = raw["type"]
    if ttype not in TASK_TYPES:
        fail(f"task {i}: unknown task type {ttype!r} (expected one of {', '.join(TASK_TYPES)})", "tasks")
    params = {k: v for k, v in raw.items() if k != "type"}
    if ttype in ("entropy", "quasi", "renyi"):
        for role in ("phi", "omega"):
            ref = params.get(role)
            if ref not in states:
                fail(f"task {i}: {role} must name a matrix listed under 'states', got {ref!r}", "tasks")
    if ttype == "quasi":
        k = params.get("k")
        if k is not None and k not in names:
            fail(f"task {i}: unknown matrix {k!r} for k", "tasks")
        try:
            QuasiFamily(params.get("family", ""), tuple(params.get("params", ())))
        except (ValueError, TypeError) as exc:
            fail(f"task {i}: {exc}", "tasks")
    if ttype == "renyi":
        alphas = params.get("alphas")
        if not isinstance(alphas, list) or not alphas:
            fail(f"task {i}: renyi needs a non-empty 'alphas' list", "tasks")
        for a in alphas:
            if not isinstance(a, (int, float)) or a == 1 or a < 0 or not math.isfinite(a):
                fail(f"task {i}: invalid alpha {a!r}", "tasks")
    return Task(ttype, params, i)


def parse_problem_text(
    text: str,
    path: str | None = None,
    *,
    tol: float = HERMITIAN_TOL,
    group_tol: float = GROUP_TOL,
    eta: float = SUPPORT_ETA,
) -> ProblemFile:
    def fail(message, key=None):
        raise ProblemError(message, _key_line(text, key) if key else None, path)

    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProblemError(f"parse error: {exc.msg} (column {exc.colno})", exc.lineno, path) from None
    if not isinstance(doc, dict):
        fail("top level must be an object")
    if doc.get("version") != SCHEMA_VERSION:
        fail(f"unsupported or missing version {doc.get('version')!r} (expected {SCHEMA_VERSION})", "version")

    raw_shape = doc.get("shape")
    if not isinstance(raw_shape, dict):
        fail("missing 'shape' object", "shape")
    weights = raw_shape.get("weights")
    if isinstance(weights, list) and any(
        isinstance(w_, (int, float)) and w_ <= 0 for w_ in weights
    ):
        fail("trace weights must all be > 0: a zero or negative weight makes the trace unfaithful", "weights")
    try:
        shape = AlgebraShape(tuple(raw_shape.get("dims", ())), tuple(weights or ()))
    except (ValueError, TypeError) as exc:
        fail(f"invalid shape: {exc}", "shape")

    raw_matrices = doc.get("matrices", {})
    if not isinstance(raw_matrices, dict):
        fail("'matrices' must be an object", "matrices")
    matrices = {
        name: _matrix_from_json(name, raw, shape, fail) for name, raw in raw_matrices.items()
    }

    state_names = doc.get("states", [])
    if not isinstance(state_names, list):
        fail("'states' must be a list of matrix names", "states")
    states = {}
    for name in state_names:
        if name not in matrices:
            fail(f"state {name!r} is not a defined matrix", "states")
        try:
            states[name] = State(matrices[name], tol=tol, group_tol=group_tol, eta=eta)
        except (NotPositiveError, NotHermitianError) as exc:
            fail(f"matrix {name!r} is not a valid density: {exc}", name)

    raw_tasks = doc.get("tasks", [])
    if not isinstance(raw_tasks, list):
        fail("'tasks' must be a list", "tasks")
    tasks = [
        _validate_task(i, t, set(matrices), set(states), fail) for i, t in enumerate(raw_tasks)
    ]
    return ProblemFile(shape, matrices, states, tasks)


def parse_problem(path, **kw) -> ProblemFile:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ProblemError(f"cannot read file: {exc.strerror}", None, str(path)) from None
    return parse_problem_text(text, str(path), **kw)


def problem_to_dict(problem: ProblemFile) -> dict:
    return {
        "version": SCHEMA_VERSION,
        "shape": {
            "dims": list(problem.shape.block_dims),
            "weights": list(problem.shape.weights),
        },
        "matrices": {name: matrix_to_json(x) for name, x in problem.matrices.items()},
        "states": list(problem.states),
        "tasks": [{"type": t.type, **t.params} for t in problem.tasks],
    }


def dump_problem(problem: ProblemFile) -> str:
    """Canonical text form; ``parse_problem_text(dump_problem(p))`` reproduces ``p``."""
    return json.dumps(problem_to_dict(problem), indent=2) + "\n"
