"""
SVG figures of barcodes.

Every bar is drawn by a single artist whose gid is ``bar-<k>``, with ``k``
its index in the barcode, so the SVG holds one ``<g id="bar-k">`` per bar.
"""

import logging
from pathlib import Path
from typing import List, Optional, Tuple, Union

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from persistlab.constants import NEGATIVE_COLOR, POSITIVE_COLOR
from persistlab.exceptions import InvalidParametersError
from persistlab.multigrid import SignedBarcode
from persistlab.persistence1 import Bar, Barcode

logger = logging.getLogger(__name__)

SVG_RC = {"svg.hashsalt": "persistlab", "svg.fonttype": "none"}


def _extent(bars: List[Bar]) -> Tuple[float, float]:
    values = [v for bar in bars for v in bar.birth + (bar.death or ())]
    if not values:
        return 0.0, 1.0
    lo, hi = min(values), max(values)
    pad = 0.1 * (hi - lo) if hi > lo else 1.0
    return lo - pad, hi + pad


def _save(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    logger.info(f"Figura salva em {path}")
    return path


def barcode_svg(B: Barcode, path, title: Optional[str] = None) -> Path:
    """
    Persistence diagram of a 1-parameter barcode: one marker per bar at
    (birth, death), infinite bars on a dashed line above the finite ones.
    """
    if B.n != 1:
        raise InvalidParametersError("persistence diagrams are drawn for 1-parameter barcodes")
    lo, hi = _extent(list(B.bars))
    with matplotlib.rc_context(SVG_RC):
        fig, ax = plt.subplots(figsize=(5, 5))
        ax.plot([lo, hi], [lo, hi], color="0.6", linewidth=1)
        if B.infinite_count():
            ax.axhline(hi, color="0.6", linestyle="--", linewidth=1)
        for k, bar in enumerate(B.bars):
            death = hi if bar.is_infinite else bar.death[0]
            marker = "^" if bar.is_infinite else "o"
            ax.plot([bar.birth[0]], [death], marker=marker, color=POSITIVE_COLOR, linestyle="none", gid=f"bar-{k}")
        ax.set_xlim(lo, hi)
        ax.set_ylim(lo, hi + 0.05 * (hi - lo))
        ax.set_xlabel("birth")
        ax.set_ylabel("death")
        ax.set_aspect("equal")
        if title:
            ax.set_title(title)
        return _save(fig, path)


def _segment(bar: Bar, n: int, k: int, top: float) -> Tuple[List[float], List[float]]:
    """Coordinates of the drawn shape of a bar: a segment or a diagonal ray."""
    if n == 1:
        end = top if bar.is_infinite else bar.death[0]
        return [bar.birth[0], end], [k, k]
    if bar.is_infinite:
        reach = max(top - max(bar.birth), 0.0)
        return [bar.birth[0], bar.birth[0] + reach], [bar.birth[1], bar.birth[1] + reach]
    return [bar.birth[0], bar.death[0]], [bar.birth[1], bar.death[1]]


def signed_barcode_svg(S: Union[SignedBarcode, Barcode], path, title: Optional[str] = None) -> Path:
    """
    Signed barcode figure: positive bars in blue, negative in red.

    For two parameters a hook ``[p, q)`` is the segment from p to q and an
    upset ``[p, inf)`` the diagonal ray from p; for one parameter bars are
    stacked horizontal segments.
    """
    if S.n not in (1, 2):
        raise InvalidParametersError(f"signed barcodes are drawn for n <= 2, got n={S.n}")
    bars = list(S.bars)
    lo, hi = _extent(bars)
    with matplotlib.rc_context(SVG_RC):
        fig, ax = plt.subplots(figsize=(5, 5))
        for k, bar in enumerate(bars):
            xs, ys = _segment(bar, S.n, k, hi)
            color = POSITIVE_COLOR if bar.sign > 0 else NEGATIVE_COLOR
            ax.plot(xs, ys, color=color, linewidth=1.5, marker="o", markevery=[0], gid=f"bar-{k}")
        ax.set_xlim(lo, hi)
        if S.n == 2:
            ax.set_ylim(lo, hi)
            ax.set_aspect("equal")
        else:
            ax.set_ylim(-1, max(len(bars), 1))
            ax.set_yticks([])
        if title:
            ax.set_title(title)
        return _save(fig, path)
