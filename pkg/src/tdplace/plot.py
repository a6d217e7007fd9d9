"""SVG rendering of a placement with optional critical-path overlays."""

from __future__ import annotations

import xml.etree.ElementTree as ET

import numpy as np

from .errors import MismatchError
from .files import load_placement, paths_from_dict, read_json, write_text
from .netlist import TERMINAL, Design

SVG_NS = "http://www.w3.org/2000/svg"
PATH_COLORS = ("#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def path_vertices(design: Design, positions, pins) -> list:
    """One vertex per cell or terminal visited, in path order.

    Consecutive pins on the same cell collapse onto the cell center.
    """
    nl = design.netlist
    pin_pos = nl.pin_positions(positions)
    out, last = [], None
    for p in pins:
        if not 0 <= p < nl.n_pins:
            raise MismatchError(f"pin id {p} is not in the design")
        owner = int(nl.pin_owner[p])
        if owner == TERMINAL:
            out.append(tuple(pin_pos[p]))
            last = None
        elif owner != last:
            w, h = nl.cell_size[owner]
            out.append((positions[owner, 0] + w / 2, positions[owner, 1] + h / 2))
            last = owner
    return out


def render_svg(design: Design, positions, paths=(), width: float = 800.0) -> str:
    """Standalone SVG text. ``paths`` holds ``(slack, [pin ids])`` entries."""
    nl = design.netlist
    positions = np.asarray(positions, dtype=float)
    if positions.shape != (nl.n_cells, 2):
        raise MismatchError(f"expected {nl.n_cells} cell positions, got {positions.shape}")
    x_lo, y_lo, x_hi, y_hi = design.constraints.core
    scale = width / (x_hi - x_lo)
    header = 18.0 * max(1, len(paths)) + 12.0
    height = (y_hi - y_lo) * scale + header

    def sx(x):
        return (x - x_lo) * scale

    def sy(y):  # layout y grows upwards
        return header + (y_hi - y) * scale

    svg = ET.Element("svg", xmlns=SVG_NS, width=_f(width), height=_f(height),
                     viewBox=f"0 0 {_f(width)} {_f(height)}")
    ET.SubElement(svg, "title").text = "placement"
    ET.SubElement(svg, "path", {
        "class": "die", "fill": "none", "stroke": "black",
        "d": f"M {_f(sx(x_lo))} {_f(sy(y_lo))} H {_f(sx(x_hi))} V {_f(sy(y_hi))} H {_f(sx(x_lo))} Z",
    })
    cells = ET.SubElement(svg, "g", {"class": "cells"})
    for c in nl.cells:
        x, y = positions[c.id]
        ET.SubElement(cells, "rect", {
            "class": "cell fixed" if c.is_fixed else "cell", "id": c.name,
            "x": _f(sx(x)), "y": _f(sy(y + c.height)),
            "width": _f(c.width * scale), "height": _f(c.height * scale),
            "fill": "#999999" if c.is_fixed else "#c6dbef", "stroke": "#4a6d8c",
        })
    terms = ET.SubElement(svg, "g", {"class": "terminals"})
    for p in nl.pins:
        if p.owner == TERMINAL:
            tx, ty = p.terminal_xy
            ET.SubElement(terms, "circle", {"class": "terminal", "cx": _f(sx(tx + p.offset[0])),
                                            "cy": _f(sy(ty + p.offset[1])), "r": "3", "fill": "black"})
    for i, (slack, pins) in enumerate(paths):
        color = PATH_COLORS[i % len(PATH_COLORS)]
        pts = path_vertices(design, positions, pins)
        ET.SubElement(svg, "polyline", {
            "class": "path", "fill": "none", "stroke": color, "stroke-width": "2",
            "points": " ".join(f"{_f(sx(x))},{_f(sy(y))}" for x, y in pts),
        })
        label = f"path {i}: {nl.pins[pins[0]].name} -> {nl.pins[pins[-1]].name}"
        if slack is not None:
            label += f", slack {slack:.4g}"
        ET.SubElement(svg, "text", {"class": "slack", "x": "6", "y": _f(18.0 * (i + 1)),
                                    "fill": color, "font-size": "13"}).text = label
    return ET.tostring(svg, encoding="unicode") + "\n"


def _f(v) -> str:
    return f"{float(v):.3f}".rstrip("0").rstrip(".")


def cmd_plot(design: Design, placement, paths=None, out=None) -> str:
    """Render ``placement`` (a path or a position array) and optional ``paths.json``.

    Returns the SVG text and writes it to ``out`` when given.
    """
    positions = load_placement(placement, design) if isinstance(placement, (str, bytes)) or hasattr(
        placement, "__fspath__") else np.asarray(placement, dtype=float)
    path_list = []
    if paths is not None:
        data = read_json(paths) if not isinstance(paths, (dict, list)) else paths
        if isinstance(data, dict):
            path_list = paths_from_dict(data, design.netlist)
        else:
            path_list = [(getattr(p, "slack", None), list(p.pins)) for p in data]
    text = render_svg(design, positions, path_list)
    if out is not None:
        write_text(out, text)
    return text
