from .render import PANEL_FILES, csv_checksum, read_panel_csv, render_figure2

__version__ = "0.1.0"

__all__ = ["PANEL_FILES", "csv_checksum", "read_panel_csv", "render_figure2"]
