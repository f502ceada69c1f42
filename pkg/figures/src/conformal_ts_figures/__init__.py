"""Static benchmark figures from persisted conformal-ts summaries."""

from .plots import FigureSpec, load_summary, plot_coverage_width, plot_runtime, runtime_means

__version__ = "0.1.0"

__all__ = ["FigureSpec", "load_summary", "plot_coverage_width", "plot_runtime", "runtime_means"]
