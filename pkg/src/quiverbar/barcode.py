"""Barcodes: sorted multisets of (dim, birth, death) bars, plus text and SVG output."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable

INF = math.inf


@dataclass(frozen=True, order=True)
class Bar:
    dim: int
    birth: float
    death: float

    @property
    def infinite(self) -> bool:
        return self.death == INF


def _fmt(x) -> str:
    if x == INF:
        return "inf"
    if isinstance(x, float) and x.is_integer():
        return str(int(x))
    return str(x)


@dataclass(frozen=True)
class Barcode:
    bars: tuple

    def __init__(self, bars: Iterable = ()):
        object.__setattr__(self, "bars", tuple(sorted(b if isinstance(b, Bar) else Bar(*b) for b in bars)))

    def __iter__(self):
        return iter(self.bars)

    def __len__(self):
        return len(self.bars)

    def in_dim(self, k: int) -> "Barcode":
        return Barcode(b for b in self.bars if b.dim == k)

    def intervals(self, k: int | None = None) -> list[tuple]:
        return [(b.birth, b.death) for b in self.bars if k is None or b.dim == k]

    def without_empty(self) -> "Barcode":
        """Drop bars whose birth equals their death."""
        return Barcode(b for b in self.bars if b.birth != b.death)

    def remap(self, fn: Callable) -> "Barcode":
        """Apply ``fn`` to every finite endpoint (infinite deaths stay infinite)."""
        return Barcode(
            Bar(b.dim, fn(b.birth), b.death if b.death == INF else fn(b.death)) for b in self.bars
        )

    def lines(self) -> list[str]:
        return [f"{b.dim} {_fmt(b.birth)} {_fmt(b.death)}" for b in self.bars]

    def to_text(self) -> str:
        return "".join(line + "\n" for line in self.lines())

    def to_svg(self, width: int = 480, row: int = 14) -> str:
        """Horizontal bar plot; infinite bars end in an arrowhead."""
        finite = [x for b in self.bars for x in (b.birth, b.death) if x != INF]
        lo = min(finite, default=0)
        hi = max(finite, default=1)
        if hi == lo:
            hi = lo + 1
        pad = 40
        span = width - 2 * pad
        stop = width - pad / 2

        def xpos(v):
            return pad + (v - lo) / (hi - lo) * span

        height = row * (len(self.bars) + 2)
        out = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
            '<defs><marker id="arrow" markerWidth="6" markerHeight="6" refX="5" refY="3" '
            'orient="auto"><path d="M0,0 L6,3 L0,6 z"/></marker></defs>',
        ]
        colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"]
        for k, b in enumerate(self.bars):
            y = row * (k + 1)
            x1 = xpos(b.birth)
            x2 = stop if b.infinite else xpos(b.death)
            color = colors[b.dim % len(colors)]
            extra = ' marker-end="url(#arrow)"' if b.infinite else ""
            out.append(
                f'<line x1="{x1:.1f}" y1="{y}" x2="{x2:.1f}" y2="{y}" stroke="{color}" '
                f'stroke-width="4"{extra}/>'
            )
            out.append(f'<text x="4" y="{y + 4}" font-size="10">H{b.dim}</text>')
        out.append("</svg>")
        return "\n".join(out) + "\n"
