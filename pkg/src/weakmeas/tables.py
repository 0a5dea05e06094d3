"""CSV tables with ``#`` metadata lines, plus a minimal SVG histogram."""
from __future__ import annotations

import os
import tempfile
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

FLOAT_FMT = "%.17g"


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return FLOAT_FMT % v
    return str(v)


def _atomic_write(path: Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def format_csv(header, rows, metadata=None) -> str:
    lines = [f"# {k}: {_fmt(v)}" for k, v in (metadata or {}).items()]
    lines.append(",".join(header))
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def write_csv(path, header, rows, metadata=None) -> Path:
    _atomic_write(Path(path), format_csv(header, rows, metadata))
    return Path(path)


def read_csv(path):
    """Return ``(metadata, header, data)``; ``data`` is a float array (rows x columns)."""
    metadata, header, rows = {}, None, []
    with open(path) as fh:
        for line in fh:
            line = line.rstrip("\n")
            if line.startswith("#"):
                key, _, value = line[1:].strip().partition(": ")
                metadata[key] = value
            elif header is None:
                header = line.split(",")
            elif line:
                rows.append([float(v) for v in line.split(",")])
    data = np.array(rows, dtype=float).reshape(len(rows), len(header or []))
    return metadata, header, data


_COLORS = ("#e08214", "#1b9e77", "#7570b3", "#d95f02")


def write_histogram_svg(path, edges, series: dict, curves: dict | None = None, title: str = "") -> Path:
    """Overlayed step histograms (``series``) and line curves, all sharing ``edges``."""
    w, h, pad = 640, 400, 50
    edges = np.asarray(edges, dtype=float)
    curves = curves or {}
    ymax = max([float(np.max(v)) for v in list(series.values()) + list(curves.values())] + [1e-300])
    sx = lambda x: pad + (x - edges[0]) / (edges[-1] - edges[0]) * (w - 2 * pad)
    sy = lambda y: h - pad - y / ymax * (h - 2 * pad)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">',
        f'<rect width="{w}" height="{h}" fill="white"/>',
        f'<line x1="{pad}" y1="{h - pad}" x2="{w - pad}" y2="{h - pad}" stroke="black"/>',
        f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{h - pad}" stroke="black"/>',
        f'<text x="{w / 2}" y="{pad / 2}" text-anchor="middle" font-size="14">{escape(title)}</text>',
        f'<text x="{w / 2}" y="{h - 10}" text-anchor="middle" font-size="12">xi</text>',
    ]
    for x in np.linspace(edges[0], edges[-1], 5):
        parts.append(f'<text x="{sx(x):.1f}" y="{h - pad + 15}" text-anchor="middle" font-size="10">{x:.3g}</text>')
    for i, (name, dens) in enumerate(series.items()):
        pts = []
        for l, r, d in zip(edges[:-1], edges[1:], dens):
            pts += [f"{sx(l):.2f},{sy(d):.2f}", f"{sx(r):.2f},{sy(d):.2f}"]
        color = _COLORS[i % len(_COLORS)]
        parts.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{" ".join(pts)}"/>')
        parts.append(f'<text x="{w - pad - 5}" y="{pad + 15 * (i + 1)}" text-anchor="end" font-size="11" fill="{color}">{escape(str(name))}</text>')
    centers = 0.5 * (edges[:-1] + edges[1:])
    for j, (name, dens) in enumerate(curves.items()):
        pts = " ".join(f"{sx(c):.2f},{sy(d):.2f}" for c, d in zip(centers, dens))
        parts.append(f'<polyline fill="none" stroke="black" stroke-dasharray="4,3" points="{pts}"/>')
        parts.append(f'<text x="{w - pad - 5}" y="{pad + 15 * (len(series) + j + 1)}" text-anchor="end" font-size="11">{escape(str(name))}</text>')
    parts.append("</svg>")
    _atomic_write(Path(path), "\n".join(parts) + "\n")
    return Path(path)
