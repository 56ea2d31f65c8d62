"""SVG scene output: rectangle outlines, bold solution segments, a legend."""

from __future__ import annotations

import xml.etree.ElementTree as ET
from typing import Optional

from .geometry import Instance, Solution

SVG_NS = "http://www.w3.org/2000/svg"


def _num(v) -> str:
    return f"{float(v):.6g}"


def render_svg(inst: Instance, sol: Optional[Solution] = None, size: int = 600,
               margin: int = 20, title: str = "") -> str:
    """Well-formed SVG; larger y is drawn higher up."""
    box = inst.bounds
    if box is None:
        x0 = y0 = 0
        span = 1
    else:
        x0, y0 = box.x1, box.y1
        span = max(box.width, box.height)
    scale = (size - 2 * margin) / span
    height = size + 40

    def px(x):
        return margin + (x - x0) * scale

    def py(y):
        return size - margin - (y - y0) * scale

    root = ET.Element("svg", xmlns=SVG_NS, width=str(size), height=str(height),
                      viewBox=f"0 0 {size} {height}")
    rect_group = ET.SubElement(root, "g", id="rects", fill="none", stroke="#555")
    for r in inst.rects:
        ET.SubElement(rect_group, "rect", {
            "class": "rect", "data-id": str(r.id),
            "x": _num(px(r.x1)), "y": _num(py(r.y2)),
            "width": _num(r.width * scale), "height": _num(r.height * scale),
        })
    seg_group = ET.SubElement(root, "g", id="segments", stroke="#c00")
    seg_group.set("stroke-width", "3")
    segments = sol.segments if sol is not None else ()
    for s in segments:
        (xa, ya), (xb, yb) = s.endpoints()
        ET.SubElement(seg_group, "line", {
            "class": "segment", "data-orientation": s.orientation.value,
            "x1": _num(px(xa)), "y1": _num(py(ya)),
            "x2": _num(px(xb)), "y2": _num(py(yb)),
        })
    legend = ET.SubElement(root, "g", id="legend")
    legend.set("font-size", "12")
    lines = [f"rectangles: {inst.n} (outline)"]
    if sol is not None:
        lines.append(f"segments: {len(segments)} (bold), cost {sol.cost * inst.grid_unit}"
                     + (f", solver {sol.solver_tag}" if sol.solver_tag else ""))
    if title:
        lines.insert(0, title)
    for k, text in enumerate(lines):
        t = ET.SubElement(legend, "text", {"class": "legend", "x": str(margin),
                                           "y": str(size + 12 + 14 * k)})
        t.text = text
    return ET.tostring(root, encoding="unicode") + "\n"
