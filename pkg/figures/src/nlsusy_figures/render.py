"""Render the four-panel overview figure from the CSV files written by `nlsusy figure2`.

The renderer does no arithmetic on the data beyond plotting transforms:
masked rows (written as nan) become gaps in the curves, never interpolated,
so singular points stay visibly singular.  A sha256 checksum of the input
CSV bytes is embedded in the image metadata for provenance.

Usage: render-figures <csv_dir> <out_image>
"""

from __future__ import annotations

import hashlib
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

PANEL_FILES = (
    "figure2_a_phi.csv",
    "figure2_b_psi.csv",
    "figure2_c_u.csv",
    "figure2_d_w.csv",
)

_PANEL_STYLE = (
    ("a)", r"$\varphi_n = \sqrt{3}\,\mathrm{sech}\,x\,\tanh x$", "tab:blue"),
    ("b)", r"$\psi_n = \mathrm{sech}\,x$", "tab:orange"),
    ("c)", r"$u_n = \frac{1}{\sqrt{3}}\cosh x\,\coth x$", "tab:green"),
    ("d)", r"$W_n = 2\tanh x$", "tab:red"),
)


def read_panel_csv(path: Path) -> tuple[np.ndarray, np.ndarray]:
    """Read one panel file; returns (x, re-values with nan at masked rows)."""
    lines = Path(path).read_text(encoding="utf-8").strip().splitlines()
    if not lines or lines[0].strip() != "x,re,im,abs":
        raise ValueError(f"{path}: expected header 'x,re,im,abs'")
    xs, vals = [], []
    for line in lines[1:]:
        parts = line.split(",")
        if len(parts) != 4:
            raise ValueError(f"{path}: malformed row {line!r}")
        xs.append(float(parts[0]))
        vals.append(float(parts[1]))  # nan marks a masked (singular) sample
    if not xs:
        raise ValueError(f"{path}: no data rows")
    return np.asarray(xs), np.asarray(vals)


def csv_checksum(csv_dir: Path) -> str:
    digest = hashlib.sha256()
    for name in PANEL_FILES:
        digest.update((csv_dir / name).read_bytes())
    return digest.hexdigest()


def render_figure2(csv_dir: Path | str, out_image: Path | str) -> Path:
    """Write the 4-panel image; returns the output path."""
    csv_dir = Path(csv_dir)
    panels = []
    for name in PANEL_FILES:
        path = csv_dir / name
        if not path.exists():
            raise FileNotFoundError(f"missing panel file {path}")
        panels.append(read_panel_csv(path))

    fig, axes = plt.subplots(2, 2, figsize=(9, 6), sharex=True)
    for ax, (x, y), (tag, label, color) in zip(axes.flat, panels, _PANEL_STYLE):
        ax.plot(x, y, color=color, lw=1.5)
        ax.set_title(f"{tag} {label}", fontsize=10)
        ax.axhline(0.0, color="0.8", lw=0.6, zorder=0)
        ax.grid(alpha=0.25)
    # the reciprocal panel diverges at its gap; keep a sane viewport
    finite_u = panels[2][1][np.isfinite(panels[2][1])]
    if finite_u.size:
        lim = float(np.percentile(np.abs(finite_u), 90))
        axes.flat[2].set_ylim(-1.2 * lim, 1.2 * lim)
    for ax in axes[1]:
        ax.set_xlabel(r"$x$ axis in units of $\hbar = 2m = 1$")
    fig.tight_layout()

    out_image = Path(out_image)
    fig.savefig(out_image, dpi=160, metadata={"csv-sha256": csv_checksum(csv_dir)})
    plt.close(fig)
    return out_image


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    if len(argv) != 2:
        print("usage: render-figures <csv_dir> <out_image>", file=sys.stderr)
        return 2
    try:
        out = render_figure2(argv[0], argv[1])
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
