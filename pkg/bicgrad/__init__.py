"""Log potentials, bounded-integral-curvature metrics and their gradient estimates."""

__version__ = "0.1.0"
