"""Figure rendering for the MLA solver's CSV/JSON outputs."""

from .io import MissingColumns, read_csv_columns
from .plots import PlotJob, plot_convergence, plot_heatmap, plot_line

__all__ = ["MissingColumns", "read_csv_columns", "PlotJob",
           "plot_convergence", "plot_heatmap", "plot_line"]

__version__ = "0.1.0"
