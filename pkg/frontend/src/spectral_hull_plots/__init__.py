from .render import FigureSpec, METRIC_REGISTRY, render

__version__ = "0.1.0"
