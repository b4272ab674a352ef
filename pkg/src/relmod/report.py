"""Evaluate the tasks of a problem file and build the JSON report."""

from __future__ import annotations

import math
from datetime import datetime, timezone

from .entropy import (
    QuasiFamily,
    araki_relative_entropy,
    quasi_entropy_closed,
    quasi_entropy_generic,
    renyi_relative_entropy,
    renyi_spectral,
    segal_entropy,
    support_dominated,
    umegaki_information,
)
from .modular import build_delta
from .problem import ProblemFile, Task

REPORT_TYPES = ("entropy", "quasi", "renyi")


class TaskError(RuntimeError):
    """A computation failed inside a task; the message names the task."""


def encode(x: float):
    """JSON-safe float: infinities become ``"+inf"``/``"-inf"``, NaN ``"nan"``."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "+inf" if x > 0 else "-inf"
    return x + 0.0  # no negative zero in reports


def residual(a: float, b: float) -> float:
    """``|a - b| / max(1, |a|)``; zero for equal infinities."""
    if math.isinf(a) or math.isinf(b):
        return 0.0 if a == b else math.inf
    return abs(a - b) / max(1.0, abs(a))


def _pair(phi_name, omega_name, problem):
    return problem.states[phi_name], problem.states[omega_name]


def _entropy_task(task: Task, problem: ProblemFile) -> dict:
    p = task.params
    phi, omega = _pair(p["phi"], p["omega"], problem)
    delta = build_delta(phi, omega)
    araki = araki_relative_entropy(phi, omega, delta)
    umegaki = umegaki_information(omega, phi)
    return {
        "support_dominance": support_dominated(omega, phi),
        "segal_omega": segal_entropy(omega),
        "araki": araki,
        "umegaki": umegaki,
        "araki_umegaki_residual": residual(araki, umegaki),
    }


def _quasi_task(task: Task, problem: ProblemFile) -> dict:
    p = task.params
    phi, omega = _pair(p["phi"], p["omega"], problem)
    family = QuasiFamily(p["family"], tuple(p.get("params", ())))
    k_name = p.get("k")
    k = problem.matrices[k_name] if k_name is not None else phi.shape.identity()
    generic = quasi_entropy_generic(family, k, phi, omega)
    closed = quasi_entropy_closed(family, k, phi, omega)
    return {
        "family": family.label,
        "k": k_name if k_name is not None else "identity",
        "support_dominance": support_dominated(omega, phi),
        "generic": generic,
        "closed": closed,
        "residual": residual(generic, closed),
    }


def _renyi_task(task: Task, problem: ProblemFile) -> dict:
    p = task.params
    phi, omega = _pair(p["phi"], p["omega"], problem)
    delta = build_delta(phi, omega)
    rows = []
    for alpha in p["alphas"]:
        spectral = renyi_spectral(omega, phi, alpha, delta)
        closed = renyi_relative_entropy(omega, phi, alpha)
        rows.append({
            "alpha": float(alpha),
            "spectral": spectral,
            "closed": closed,
            "residual": residual(spectral, closed),
        })
    return {"support_dominance": support_dominated(omega, phi), "values": rows}


RUNNERS = {"entropy": _entropy_task, "quasi": _quasi_task, "renyi": _renyi_task}


def _encode_tree(obj):
    if isinstance(obj, bool) or obj is None or isinstance(obj, (str, int)):
        return obj
    if isinstance(obj, float):
        return encode(obj)
    if isinstance(obj, dict):
        return {k: _encode_tree(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_encode_tree(v) for v in obj]
    return encode(obj)


def _has_sentinel(obj) -> bool:
    if isinstance(obj, float):
        return math.isinf(obj)
    if isinstance(obj, dict):
        return any(_has_sentinel(v) for k, v in obj.items() if k != "residual" and not k.endswith("_residual"))
    if isinstance(obj, list):
        return any(_has_sentinel(v) for v in obj)
    return False


def run_task(task: Task, problem: ProblemFile) -> dict:
    try:
        body = RUNNERS[task.type](task, problem)
    except (ValueError, ArithmeticError, KeyError) as exc:
        raise TaskError(f"task {task.index} ({task.type}): {exc}") from exc
    head = {"task": task.index, "type": task.type}
    if "phi" in task.params:
        head.update(phi=task.params["phi"], omega=task.params["omega"])
    return {**head, **body}


def run_report(
    problem: ProblemFile,
    types=REPORT_TYPES,
    *,
    source: str | None = None,
    tolerances: dict | None = None,
    timestamp: bool = True,
) -> tuple[dict, bool]:
    """Run every task whose type is in ``types``, in file order.

    Returns the JSON-ready report and whether any value is a ``±inf``
    sentinel (residual fields excluded).
    """
    results = [run_task(t, problem) for t in problem.tasks if t.type in types]
    sentinel = _has_sentinel(results)
    report = {"version": 1}
    if source is not None:
        report["source"] = source
    if timestamp:
        report["generated_at"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
    report["shape"] = {
        "dims": list(problem.shape.block_dims),
        "weights": list(problem.shape.weights),
    }
    if tolerances is not None:
        report["tolerances"] = tolerances
    report["results"] = _encode_tree(results)
    report["sentinel"] = sentinel
    return report, sentinel
