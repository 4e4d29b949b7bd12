"""SVG figures of a sweep: average AoI and bounded AoI against received power."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .scheme import Scheme  # noqa: E402

_STYLE = {Scheme.TDMA: ("tab:blue", "o"), Scheme.FDMA: ("tab:red", "s")}

FIGURES = {
    "avg_aoi.svg": (
        "Average AoI",
        (("avg_aoi_analytic", "theory", "-"), ("avg_aoi_sim", "simulation", "--")),
    ),
    "bounded_aoi.svg": (
        "Bounded AoI",
        (("bounded_aoi_chebyshev", "Chebyshev bound", "-"), ("bounded_aoi_sim", "simulation", "--")),
    ),
}


def _series(rows, scheme, column):
    pts = sorted((r.power_db, getattr(r, column)) for r in rows if r.scheme is scheme)
    return [p for p, _ in pts], [v for _, v in pts]


def render_figures(rows, out_dir) -> list[Path]:
    """Write one SVG per metric into ``out_dir`` and return their paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    schemes = [s for s in Scheme if any(r.scheme is s for r in rows)]
    users = sorted({r.N for r in rows})
    written = []
    with plt.rc_context({"svg.hashsalt": "aoi-mac", "svg.fonttype": "none"}):
        for name, (ylabel, series) in FIGURES.items():
            fig, ax = plt.subplots(figsize=(6.4, 4.2))
            for scheme in schemes:
                color, marker = _STYLE[scheme]
                for column, label, ls in series:
                    x, y = _series(rows, scheme, column)
                    ax.plot(x, y, ls, color=color, marker=marker, ms=4,
                            fillstyle="none" if ls == "--" else "full",
                            label=f"{scheme.value} {label}")
            ax.set_xlabel("Received power P (dB)")
            ax.set_ylabel(ylabel)
            ax.set_yscale("log")
            ax.grid(True, which="both", alpha=0.3)
            ax.set_title(f"N = {', '.join(map(str, users))}")
            ax.legend(fontsize=8)
            fig.tight_layout()
            path = out_dir / name
            fig.savefig(path, format="svg", metadata={"Date": None})
            plt.close(fig)
            written.append(path)
    return written
