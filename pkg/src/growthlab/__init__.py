"""growthlab: a numerical laboratory for generalized growth scales of
entire functions, power-series solutions of linear complex ODEs, and
desk-scale verification experiments built on top of both."""

__version__ = "0.1.0"
