"""Granularity-vs-accuracy evaluation over recorded session traces.

Quantitative trials are scored against intended states from a fixture;
qualitative trials have no ground truth and are reported unscored, with
divergence notes where this gateway's deterministic backend is known to
differ from the recorded live-model behavior.
"""

from __future__ import annotations

import csv
import io
import json
import math
import statistics
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

from .errors import FixtureMismatch, UnknownFormat
from .model import JOINT_NAMES, BasePose2D, JointVector, rad_to_deg, wrap_angle
from .session import SessionEvent

# success thresholds: tight enough to catch unit-conversion and sign bugs
JOINT_SUCCESS_RAD = 0.01
PLANAR_SUCCESS_M = 0.01
HEADING_SUCCESS_RAD = math.pi / 180.0  # 1 degree


def joint_error(intended: JointVector, achieved: JointVector) -> float:
    """L-infinity distance over the 7 joints, radians."""
    return max(abs(intended[name] - achieved[name]) for name in JOINT_NAMES)


def planar_error(intended: BasePose2D, achieved: BasePose2D) -> Tuple[float, float]:
    """(Euclidean xy distance, wrap-aware absolute heading difference)."""
    dist = math.hypot(intended.x - achieved.x, intended.y - achieved.y)
    dtheta = abs(wrap_angle(intended.theta - achieved.theta))
    return dist, dtheta


@dataclass
class TrialRecord:
    prompt_id: str
    prompt: str
    label: str
    robot: str                       # arm | base
    tool: Optional[str] = None
    intended: Optional[Dict[str, Any]] = None
    achieved: Optional[Dict[str, Any]] = None
    errors: Dict[str, float] = field(default_factory=dict)   # metric name -> value
    success: Optional[bool] = None   # None when unscored
    divergence: Optional[str] = None


@dataclass
class EvalReport:
    rows: List[TrialRecord]
    aggregates: Dict[str, Dict[str, Dict[str, float]]]  # label -> metric -> stats
    divergence_notes: List[str]


def _trials_from_trace(trace: Sequence[SessionEvent]) -> List[TrialRecord]:
    trials: Dict[str, TrialRecord] = {}
    order: List[str] = []
    for event in trace:
        payload = event.payload
        pid = payload.get("prompt_id")
        if event.kind == "prompt" and pid:
            trials[pid] = TrialRecord(prompt_id=pid, prompt=payload["text"], label="qualitative", robot="")
            order.append(pid)
        elif event.kind == "granularity" and pid in trials:
            trials[pid].label = payload["label"]
        elif event.kind == "tool_call" and pid in trials:
            trials[pid].tool = payload["tool"]
            trials[pid].robot = "base" if payload["tool"] == "drive" else "arm"
        elif event.kind == "tool_result" and pid in trials:
            trials[pid].achieved = payload["result"]
    return [trials[pid] for pid in order]


def _score(trial: TrialRecord) -> None:
    intended, achieved = trial.intended, trial.achieved
    if intended is None or achieved is None:
        return
    if trial.robot == "base":
        dist, dtheta = planar_error(BasePose2D.from_json(intended), BasePose2D.from_json(achieved))
        trial.errors = {"planar_distance_m": dist, "heading_error_rad": dtheta}
        trial.success = dist <= PLANAR_SUCCESS_M and dtheta <= HEADING_SUCCESS_RAD
    elif trial.tool == "approach_pose":
        dist = math.sqrt(
            (intended["position_x"] - achieved["position_x"]) ** 2
            + (intended["position_y"] - achieved["position_y"]) ** 2
            + (intended["position_z"] - achieved["position_z"]) ** 2
        )
        trial.errors = {"pose_distance_m": dist}
        trial.success = dist <= PLANAR_SUCCESS_M
    else:
        err = joint_error(JointVector.from_json(intended), JointVector.from_json(achieved))
        trial.errors = {"joint_linf_rad": err}
        trial.success = err <= JOINT_SUCCESS_RAD


def evaluate(trace: Sequence[SessionEvent], expectations: Optional[Sequence[Dict[str, Any]]] = None) -> EvalReport:
    """Pair trace trials with fixture intents, score, and aggregate."""
    trials = _trials_from_trace(trace)
    by_id = {t.prompt_id: t for t in trials}
    divergence_notes: List[str] = []
    for entry in expectations or []:
        pid = entry["prompt_id"]
        trial = by_id.get(pid)
        if trial is None:
            raise FixtureMismatch(f"fixture prompt_id {pid!r} not present in trace")
        if "prompt" in entry and entry["prompt"] != trial.prompt:
            raise FixtureMismatch(
                f"{pid}: fixture prompt {entry['prompt']!r} != trace prompt {trial.prompt!r}"
            )
        trial.intended = entry.get("intended")
        note = entry.get("divergence")
        if note:
            trial.divergence = note
            divergence_notes.append(f"{pid}: {note}")
    for trial in trials:
        _score(trial)

    aggregates: Dict[str, Dict[str, Dict[str, float]]] = {}
    for label in ("qualitative", "quantitative"):
        rows = [t for t in trials if t.label == label]
        metrics: Dict[str, List[float]] = {}
        successes = [t.success for t in rows if t.success is not None]
        for t in rows:
            for metric, value in t.errors.items():
                metrics.setdefault(metric, []).append(value)
        aggregates[label] = {
            metric: {
                "mean": statistics.fmean(values),
                "max": max(values),
                "count": float(len(values)),
            }
            for metric, values in metrics.items()
        }
        aggregates[label]["_summary"] = {
            "trials": float(len(rows)),
            "scored": float(len(successes)),
            "success_rate": (sum(successes) / len(successes)) if successes else float("nan"),
        }
    return EvalReport(rows=trials, aggregates=aggregates, divergence_notes=divergence_notes)


CSV_HEADER = ["prompt", "label", "metric", "intended", "achieved", "error", "success"]


def render_report(report: EvalReport, format: str) -> bytes:
    if format == "csv":
        return _render_csv(report)
    if format == "md":
        return _render_md(report)
    raise UnknownFormat(f"unsupported report format {format!r}")


def _render_csv(report: EvalReport) -> bytes:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for trial in report.rows:
        intended = json.dumps(trial.intended, sort_keys=True) if trial.intended is not None else ""
        achieved = json.dumps(trial.achieved, sort_keys=True) if trial.achieved is not None else ""
        if trial.errors:
            for metric, value in sorted(trial.errors.items()):
                writer.writerow([
                    trial.prompt, trial.label, metric, intended, achieved,
                    repr(value), str(trial.success),
                ])
        else:
            writer.writerow([trial.prompt, trial.label, "", intended, achieved, "", ""])
    return out.getvalue().encode("utf-8")


def _fmt(value: float) -> str:
    return f"{value:.4f}"


def _render_md(report: EvalReport) -> bytes:
    lines: List[str] = []
    arm_rows = [t for t in report.rows if t.robot == "arm" and t.tool == "move_arm_to_joint_positions"]
    pose_rows = [t for t in report.rows if t.tool == "approach_pose"]
    base_rows = [t for t in report.rows if t.robot == "base"]
    other = [t for t in report.rows if t not in arm_rows and t not in pose_rows and t not in base_rows]

    lines.append("## Arm (joint mode)")
    lines.append("| Prompt | Label | " + " | ".join(JOINT_NAMES) + " | Error (rad) | Success |")
    lines.append("|" + "---|" * (len(JOINT_NAMES) + 4))
    for t in arm_rows:
        joints = t.achieved or {}
        cells = [_fmt(joints.get(name, float("nan"))) for name in JOINT_NAMES]
        err = _fmt(t.errors["joint_linf_rad"]) if t.errors else "unscored"
        lines.append(
            f"| {t.prompt} | {t.label} | " + " | ".join(cells) + f" | {err} | {t.success} |"
        )

    if pose_rows:
        lines.append("")
        lines.append("## Arm (pose mode)")
        lines.append("| Prompt | Label | x | y | z | Error (m) | Success |")
        lines.append("|" + "---|" * 7)
        for t in pose_rows:
            pose = t.achieved or {}
            err = _fmt(t.errors["pose_distance_m"]) if t.errors else "unscored"
            lines.append(
                f"| {t.prompt} | {t.label} | {_fmt(pose.get('position_x', float('nan')))} | "
                f"{_fmt(pose.get('position_y', float('nan')))} | {_fmt(pose.get('position_z', float('nan')))} | "
                f"{err} | {t.success} |"
            )

    lines.append("")
    lines.append("## Base")
    lines.append("| Prompt | Label | x | y | theta (deg) | Distance err (m) | Heading err (deg) | Success |")
    lines.append("|" + "---|" * 8)
    for t in base_rows:
        pose = t.achieved or {}
        theta_deg = pose.get("theta_deg", rad_to_deg(pose.get("theta", float("nan"))))
        dist = _fmt(t.errors["planar_distance_m"]) if t.errors else "unscored"
        heading = _fmt(rad_to_deg(t.errors["heading_error_rad"])) if t.errors else "unscored"
        lines.append(
            f"| {t.prompt} | {t.label} | {_fmt(pose.get('x', float('nan')))} | "
            f"{_fmt(pose.get('y', float('nan')))} | {_fmt(theta_deg)} | {dist} | {heading} | {t.success} |"
        )

    if other:
        lines.append("")
        lines.append("## Unattributed trials")
        for t in other:
            lines.append(f"- {t.prompt_id} {t.prompt!r} ({t.label}): no tool call recorded")

    lines.append("")
    lines.append("## Aggregates")
    lines.append("| Label | Metric | Mean | Max | Count |")
    lines.append("|---|---|---|---|---|")
    for label, metrics in report.aggregates.items():
        for metric, stats in metrics.items():
            if metric == "_summary":
                continue
            lines.append(
                f"| {label} | {metric} | {_fmt(stats['mean'])} | {_fmt(stats['max'])} | {int(stats['count'])} |"
            )
    for label, metrics in report.aggregates.items():
        summary = metrics["_summary"]
        rate = summary["success_rate"]
        rate_str = "n/a" if math.isnan(rate) else f"{rate:.0%}"
        lines.append(
            f"| {label} | _summary | trials={int(summary['trials'])} | "
            f"scored={int(summary['scored'])} | success={rate_str} |"
        )

    if report.divergence_notes:
        lines.append("")
        lines.append("## Divergence notes")
        for note in report.divergence_notes:
            lines.append(f"- {note}")
    lines.append("")
    return "\n".join(lines).encode("utf-8")
