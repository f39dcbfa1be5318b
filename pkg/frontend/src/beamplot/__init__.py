from .figures import BEAMFORMER_LABELS, FigureSpec, aggregate, read_rows, render

__version__ = "0.1.0"
