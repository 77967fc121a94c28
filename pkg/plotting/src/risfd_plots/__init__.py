"""Figure rendering for risfd result CSVs."""

from .figures import (FigureSpec, KINDS, SchemaError, best_so_far,
                      build_figure, empirical_cdf, read_reward_csv,
                      read_sweep_csv, render)

__version__ = "0.1.0"

__all__ = ["FigureSpec", "KINDS", "SchemaError", "best_so_far",
           "build_figure", "empirical_cdf", "read_reward_csv",
           "read_sweep_csv", "render"]
