"""CSV, JSON, and SVG emission for inference reports.

CSV files carry the envelope and reliability tables with a header comment
referencing the master seed; JSON mirrors the full report together with the
resolved configuration; SVG is a minimal static rendering of each envelope
as a shaded band (no scripts, suitable for quick inspection only).
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Dict, Optional

from .inference import InferenceReport

__all__ = ["emit_csv", "emit_json", "emit_svg", "report_to_dict"]


def _fmt(x: float) -> str:
    return f"{x:.9g}"


def emit_csv(report: InferenceReport, out_dir: str | Path) -> Dict[str, Path]:
    """Write envelopes.csv and reliability.csv; returns the file paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    env_path = out_dir / "envelopes.csv"
    rel_path = out_dir / "reliability.csv"

    lines = [f"# master_seed={report.master_seed}", "level,entity,t,lower,upper"]
    for level, entity, env in report.entity_envelopes():
        for t, lo, hi in zip(env.t, env.lower, env.upper):
            lines.append(f"{level},{entity},{_fmt(t)},{_fmt(lo)},{_fmt(hi)}")
    env_path.write_text("\n".join(lines) + "\n")

    lines = [
        f"# master_seed={report.master_seed}",
        "level,entity,n_F,expected_lower,expected_upper",
    ]
    for (level, entity), curve in report.reliability.items():
        for n_f, lo, hi in zip(curve.horizons, curve.expected_lower, curve.expected_upper):
            lines.append(f"{level},{entity},{n_f},{_fmt(lo)},{_fmt(hi)}")
    rel_path.write_text("\n".join(lines) + "\n")
    return {"envelopes": env_path, "reliability": rel_path}


def report_to_dict(
    report: InferenceReport, config_echo: Optional[Dict[str, Any]] = None
) -> Dict[str, Any]:
    """JSON-serializable mirror of the full report."""
    return {
        "master_seed": report.master_seed,
        "config": config_echo if config_echo is not None else {},
        "t": [float(v) for v in report.t],
        "envelopes": [
            {
                "level": level,
                "entity": entity,
                "lower": [float(v) for v in env.lower],
                "upper": [float(v) for v in env.upper],
            }
            for level, entity, env in report.entity_envelopes()
        ],
        "reliability": [
            {
                "level": level,
                "entity": entity,
                "horizons": list(curve.horizons),
                "expected_lower": [float(v) for v in curve.expected_lower],
                "expected_upper": [float(v) for v in curve.expected_upper],
            }
            for (level, entity), curve in report.reliability.items()
        ],
    }


def emit_json(
    report: InferenceReport,
    out_dir: str | Path,
    config_echo: Optional[Dict[str, Any]] = None,
) -> Path:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / "report.json"
    path.write_text(json.dumps(report_to_dict(report, config_echo), indent=2) + "\n")
    return path


_SVG_COLORS = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2"]

_W, _H = 760, 480
_ML, _MR, _MT, _MB = 60, 20, 20, 50  # margins


def _x(t: float) -> float:
    return _ML + t * (_W - _ML - _MR)


def _y(f: float) -> float:
    return _H - _MB - f * (_H - _MT - _MB)


def emit_svg(report: InferenceReport, out_dir: str | Path) -> Path:
    """One shaded band per reported entity, with axes and a legend."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / "envelopes.svg"

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
        f'<line x1="{_ML}" y1="{_y(0)}" x2="{_W - _MR}" y2="{_y(0)}" stroke="black"/>',
        f'<line x1="{_ML}" y1="{_y(0)}" x2="{_ML}" y2="{_y(1)}" stroke="black"/>',
        f'<text x="{(_ML + _W - _MR) / 2}" y="{_H - 12}" text-anchor="middle" '
        f'font-size="14">non-failure probability t</text>',
        f'<text x="16" y="{(_y(0) + _y(1)) / 2}" font-size="14" '
        f'transform="rotate(-90 16 {(_y(0) + _y(1)) / 2})" text-anchor="middle">CDF</text>',
    ]
    for tick in (0.0, 0.25, 0.5, 0.75, 1.0):
        parts.append(
            f'<text x="{_x(tick)}" y="{_y(0) + 18}" text-anchor="middle" '
            f'font-size="11">{tick:g}</text>'
        )
        parts.append(
            f'<text x="{_ML - 8}" y="{_y(tick) + 4}" text-anchor="end" '
            f'font-size="11">{tick:g}</text>'
        )

    legend_y = _MT + 6
    for idx, (level, entity, env) in enumerate(report.entity_envelopes()):
        color = _SVG_COLORS[idx % len(_SVG_COLORS)]
        fwd = [f"{_x(t):.2f},{_y(u):.2f}" for t, u in zip(env.t, env.upper)]
        back = [f"{_x(t):.2f},{_y(l):.2f}" for t, l in zip(env.t[::-1], env.lower[::-1])]
        parts.append(
            f'<polygon points="{" ".join(fwd + back)}" fill="{color}" '
            f'fill-opacity="0.25" stroke="{color}" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{_W - _MR - 6}" y="{legend_y}" text-anchor="end" '
            f'font-size="11" fill="{color}">{level}:{entity}</text>'
        )
        legend_y += 14
    parts.append("</svg>")
    path.write_text("\n".join(parts) + "\n")
    return path
