"""fmmlab: a laboratory for fast and numerically accurate 2x2-block
recursive matrix multiplication.

Exact manipulation and validation of bilinear formulas, growth-factor and
error-bound computation, orbit optimization, straight-line-program
optimization (including alternative-basis sparsification), and an accuracy
benchmark harness.
"""

__version__ = "0.1.0"

from .coeff import Coefficient, parse_coeff, format_coeff  # noqa: F401
