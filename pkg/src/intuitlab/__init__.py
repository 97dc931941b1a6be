"""intuitlab: proof kernel and realizability laboratory for intuitionistic systems."""

__version__ = "0.1.0"
